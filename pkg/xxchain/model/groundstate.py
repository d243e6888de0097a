"""
XX Chain : Sector Ground States
===============================

The lowest state of sector r written as a real superposition over the
r-subsets of sites, with the weight of |k_1 ... k_r> given by the sine
product over all pairs of down spins.

Copyright 2021 MET Norway

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

import math
import logging

from itertools import combinations

import numpy as np

import xxchain

from xxchain.common import CapacityError, ValidationError, binomial, checkInt
from xxchain.model.spectrum import groundSector

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


##
#  Subsets
##

def checkSubset(N, sites):
    """Validate a site subset and return it as a tuple.

    Parameters
    ----------
    N : int
        Number of sites.
    sites : sequence of int
        Strictly increasing site indices in [1, N].

    Raises
    ------
    ValidationError
        On repeated, unordered or out of range sites.
    """
    sites = tuple(checkInt(k, "site", lower=1, upper=N) for k in sites)
    for a, b in zip(sites, sites[1:]):
        if not a < b:
            raise ValidationError("Sites must be strictly increasing, got %r" % (sites,))
    return sites


def enumerateSubsets(N, r, offset=0):
    """All r-subsets of the sites 1..N in lexicographic order.

    Parameters
    ----------
    N : int
        Number of sites to choose from.
    r : int
        Subset size.
    offset : int
        Added to every site index, used for the right half of a cut.

    Returns
    -------
    numpy.ndarray
        Integer array of shape (C(N, r), r).
    """
    count = binomial(N, r)
    flat = np.fromiter(
        (k for subset in combinations(range(1 + offset, N + 1 + offset), r) for k in subset),
        dtype=np.int64, count=count*r,
    )
    return flat.reshape(count, r)


def subsetIndex(N, subset):
    """Lexicographic rank of a subset among all subsets of its size."""
    r = len(subset)
    index = 0
    previous = 0
    for i, k in enumerate(subset):
        for v in range(previous + 1, k):
            index += binomial(N - v, r - i - 1)
        previous = k
    return index


def basisIndices(N, subsets):
    """Computational basis index of each subset.

    Site 1 is the most significant bit and a down spin is a set bit.
    """
    if N > 62:
        raise CapacityError("Basis indices are limited to N <= 62, got N=%d" % N)
    subsets = np.asarray(subsets, dtype=np.int64)
    if subsets.shape[1] == 0:
        return np.zeros(subsets.shape[0], dtype=np.int64)
    return np.sum(np.left_shift(np.int64(1), N - subsets), axis=1)


##
#  Amplitudes
##

def sineProducts(N, subsets, pairs=None):
    """Products of sin((k_i - k_j) pi / N) over pairs of columns.

    Every row is computed with the same sequence of elementwise
    operations, so a single subset and the same subset inside a larger
    array give bit-identical values.

    Parameters
    ----------
    N : int
        Number of sites.
    subsets : numpy.ndarray
        Integer array of shape (count, r), rows strictly increasing.
    pairs : iterable of (int, int) or None
        Column pairs (i, j) to include. Defaults to all i < j.
    """
    subsets = np.asarray(subsets, dtype=np.int64)
    count, r = subsets.shape
    if pairs is None:
        pairs = combinations(range(r), 2)

    values = np.ones(count, dtype=np.float64)
    scale = np.pi/N
    for i, j in pairs:
        values *= np.sin((subsets[:, i] - subsets[:, j])*scale)

    return values


def sineLogProducts(N, subsets, pairs=None):
    """Sign and log-magnitude form of sineProducts.

    Returns
    -------
    tuple of numpy.ndarray
        The signs (+1 or -1) and the natural logarithms of the
        magnitudes.
    """
    subsets = np.asarray(subsets, dtype=np.int64)
    count, r = subsets.shape
    if pairs is None:
        pairs = combinations(range(r), 2)

    signs = np.ones(count, dtype=np.float64)
    logAbs = np.zeros(count, dtype=np.float64)
    scale = np.pi/N
    for i, j in pairs:
        factor = np.sin((subsets[:, i] - subsets[:, j])*scale)
        signs *= np.sign(factor)
        logAbs += np.log(np.abs(factor))

    return signs, logAbs


def amplitude(N, subset):
    """The unnormalised amplitude of |k_1 ... k_r>.

    Parameters
    ----------
    N : int
        Number of sites.
    subset : sequence of int
        The down spin sites, strictly increasing.

    Returns
    -------
    float
        The product of sin((k_i - k_j) pi / N) over all i < j.
    """
    N = checkInt(N, "N", lower=2)
    subset = checkSubset(N, subset)
    return float(sineProducts(N, np.array([subset], dtype=np.int64).reshape(1, len(subset)))[0])


def amplitudeLog(N, subset):
    """The amplitude of |k_1 ... k_r> as (sign, log|amplitude|)."""
    N = checkInt(N, "N", lower=2)
    subset = checkSubset(N, subset)
    signs, logAbs = sineLogProducts(N, np.array([subset], dtype=np.int64).reshape(1, len(subset)))
    return int(signs[0]), float(logAbs[0])


##
#  Sector State
##

class SectorState():
    """The lowest state of sector r on N sites.

    Amplitudes are stored either directly or, for large r where the
    sine products underflow, as signs and log-magnitudes. The global
    phase of the state is dropped, so all amplitudes are real.

    Parameters
    ----------
    N : int
        Number of sites.
    r : int
        Number of down spins.
    subsets : numpy.ndarray
        The C(N, r) subsets in lexicographic order.
    amplitudes : numpy.ndarray or None
        Direct amplitudes, or None when signs and logAbs are given.
    signs, logAbs : numpy.ndarray or None
        Log-magnitude representation.
    """

    def __init__(self, N, r, subsets, amplitudes=None, signs=None, logAbs=None):

        self._N = N
        self._r = r
        self._subsets = _frozen(subsets)
        self._amplitudes = None
        self._signs = None
        self._logAbs = None

        if amplitudes is not None:
            self._amplitudes = _frozen(amplitudes)
            normSq = float(np.dot(self._amplitudes, self._amplitudes))
            self._normConstant = 1.0/math.sqrt(normSq)
            self._logNormConstant = -0.5*math.log(normSq)
        else:
            self._signs = _frozen(signs)
            self._logAbs = _frozen(logAbs)
            self._logNormConstant = -0.5*_logSumSquares(self._logAbs)
            try:
                self._normConstant = math.exp(self._logNormConstant)
            except OverflowError:
                self._normConstant = math.inf

        return

    def __len__(self):
        return self._subsets.shape[0]

    def __getitem__(self, subset):
        """The unnormalised amplitude of a subset."""
        subset = checkSubset(self._N, subset)
        if len(subset) != self._r:
            raise ValidationError("Subset must have %d sites, got %d" % (self._r, len(subset)))
        index = subsetIndex(self._N, subset)
        if self._amplitudes is not None:
            return float(self._amplitudes[index])
        return float(self._signs[index]*np.exp(self._logAbs[index]))

    ##
    #  Properties
    ##

    @property
    def N(self):
        return self._N

    @property
    def r(self):
        return self._r

    @property
    def subsets(self):
        return self._subsets

    @property
    def isLogForm(self):
        return self._amplitudes is None

    @property
    def amplitudes(self):
        """Unnormalised amplitudes, exponentiated on demand in log form."""
        if self._amplitudes is not None:
            return self._amplitudes
        return self._signs*np.exp(self._logAbs)

    @property
    def normConstant(self):
        return self._normConstant

    @property
    def logNormConstant(self):
        return self._logNormConstant

    ##
    #  Methods
    ##

    def normalized(self):
        """The amplitudes multiplied by the normalisation constant."""
        if self._amplitudes is not None:
            return self._normConstant*self._amplitudes
        return self._signs*np.exp(self._logAbs + self._logNormConstant)

    def toJson(self):
        """Return the state as a JSON compatible dict.

        The entries are lists of the down spin sites followed by the
        unnormalised amplitude.
        """
        amps = self.amplitudes
        entries = [
            [int(k) for k in subset] + [float(amp)]
            for subset, amp in zip(self._subsets, amps)
        ]
        return {
            "schemaVersion": SCHEMA_VERSION,
            "N": self._N,
            "r": self._r,
            "normConstant": self._normConstant,
            "logNormConstant": self._logNormConstant,
            "entries": entries,
        }

# END Class SectorState


def buildState(N, r, maxEntries=None, logOrder=None):
    """Construct the lowest state of sector r.

    Parameters
    ----------
    N : int
        Number of sites, at least 2.
    r : int
        Number of down spins, 0 <= r <= N//2.
    maxEntries : int or None
        Cap on C(N, r). Defaults to the maxStateEntries config setting.
    logOrder : int or None
        Sectors with r above this use the log-magnitude form. Defaults
        to the logAmplitudeOrder config setting.

    Returns
    -------
    SectorState

    Raises
    ------
    CapacityError
        If C(N, r) exceeds the cap. Use the block rank functions in
        that case, they never build the full state.
    """
    conf = xxchain.CONFIG
    N = checkInt(N, "N", lower=2)
    r = checkInt(r, "r", lower=0, upper=N//2)
    if maxEntries is None:
        maxEntries = conf.maxStateEntries
    if logOrder is None:
        logOrder = conf.logAmplitudeOrder

    count = binomial(N, r)
    if count > maxEntries:
        logger.error("Sector N=%d, r=%d has %d entries, cap is %d", N, r, count, maxEntries)
        raise CapacityError("State has %d entries, above the cap of %d" % (count, maxEntries))

    logger.debug("Building sector state N=%d, r=%d with %d entries", N, r, count)
    subsets = enumerateSubsets(N, r)
    if r > logOrder:
        signs, logAbs = sineLogProducts(N, subsets)
        return SectorState(N, r, subsets, signs=signs, logAbs=logAbs)

    return SectorState(N, r, subsets, amplitudes=sineProducts(N, subsets))


def stateAt(p):
    """The ground state of the chain at field p.B."""
    return buildState(p.N, groundSector(p))


def denseVector(state, maxSites=None):
    """Embed a sector state in the full 2^N dimensional space.

    Parameters
    ----------
    state : SectorState
        The state to embed.
    maxSites : int or None
        Cap on N. Defaults to the maxDenseSites config setting.

    Returns
    -------
    numpy.ndarray
        Unit norm vector with site 1 as the most significant bit.
    """
    if maxSites is None:
        maxSites = xxchain.CONFIG.maxDenseSites
    if state.N > maxSites:
        raise CapacityError("Dense embedding is limited to N <= %d, got %d" % (maxSites, state.N))

    vector = np.zeros(2**state.N, dtype=np.float64)
    vector[basisIndices(state.N, state.subsets)] = state.normalized()

    return vector


def translationCheck(state):
    """Largest change of |amplitude|^2 under a cyclic shift by one site.

    The sector ground states carry a fixed momentum, so the probability
    distribution is translation invariant and this should vanish up to
    rounding.
    """
    N = state.N
    probs = state.normalized()**2
    if state.r == 0:
        return 0.0

    shifted = np.sort(state.subsets % N + 1, axis=1)
    original = basisIndices(N, state.subsets)
    target = basisIndices(N, shifted)

    order = np.argsort(original)
    position = np.searchsorted(original[order], target)
    return float(np.max(np.abs(probs[order][position] - probs)))


##
#  Internal Functions
##

def _frozen(array):
    """Return a read-only copy of an array."""
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


def _logSumSquares(logAbs):
    """The log of sum(exp(2*logAbs)), shifted by the largest term."""
    shift = float(np.max(logAbs))
    return 2.0*shift + math.log(float(np.sum(np.exp(2.0*(logAbs - shift)))))

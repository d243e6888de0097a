"""
XX Chain : Brute Force Oracle
=============================

Exact diagonalisation of the spin Hamiltonian in fixed magnetisation
blocks, and the Schmidt rank of an explicitly reshaped state. Nothing
here uses the fermion picture, so the results can be used to check the
closed forms in the other modules.

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

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

import xxchain

from xxchain.common import (
    CapacityError, ConvergenceError, ValidationError, binomial, checkInt, checkTolerance
)
from xxchain.model.entanglement import Bipartition

logger = logging.getLogger(__name__)

# Relative spectral gap below which the lowest level counts as degenerate
DEGENERACY_GAP = 1e-10

# Residual contract of the eigensolver, relative to the matrix norm
RESIDUAL_BOUND = 1e-10


@dataclass(frozen=True, eq=False)
class HamiltonianBlock:
    """The Hamiltonian restricted to configurations with r down spins.

    The basis holds the C(N, r) subsets of down spin sites in
    lexicographic order.
    """
    N: int
    r: int
    J: float
    B: float
    basis: np.ndarray = field(repr=False)
    matrix: scipy.sparse.csr_matrix = field(repr=False)

    @property
    def dim(self):
        return self.basis.shape[0]

# END Class HamiltonianBlock


@dataclass(frozen=True, eq=False)
class OracleResult:
    """The lowest eigenpair of a Hamiltonian block."""
    N: int
    r: int
    groundEnergy: float
    groundVector: np.ndarray = field(repr=False)
    degenerate: bool = False
    gap: float = math.inf
    residual: float = 0.0

# END Class OracleResult


def buildBlockHamiltonian(p, r, maxSites=None, maxDim=None):
    """Build the spin Hamiltonian in the sector with r down spins.

    The Hamiltonian is H = -(J/4) sum_i (sx_i sx_{i+1} + sy_i sy_{i+1})
    - B sum_i sz_i with site N+1 identified with site 1. The exchange
    term equals -(J/2) sum_i (s+_i s-_{i+1} + s-_i s+_{i+1}), which moves
    a down spin across bond (i, i+1) with amplitude -J/2. The bond sum is
    taken literally, so the two bonds of a two-site ring add up.

    Parameters
    ----------
    p : ChainParams
        The chain parameters.
    r : int
        Number of down spins, 0 <= r <= N.
    maxSites : int or None
        Cap on N. Defaults to the maxOracleSites setting.
    maxDim : int or None
        Cap on C(N, r). Defaults to the maxOracleDim setting.

    Returns
    -------
    HamiltonianBlock
    """
    conf = xxchain.CONFIG
    maxSites = conf.maxOracleSites if maxSites is None else maxSites
    maxDim = conf.maxOracleDim if maxDim is None else maxDim

    N = p.N
    r = checkInt(r, "r", lower=0, upper=N)
    if N > maxSites:
        raise CapacityError("The oracle is limited to N <= %d, got N=%d" % (maxSites, N))
    dim = binomial(N, r)
    if dim > maxDim:
        raise CapacityError("Block dimension %d is above the cap of %d" % (dim, maxDim))

    basis = np.array(list(combinations(range(1, N + 1), r)), dtype=np.int64).reshape(dim, r)
    masks = np.zeros(dim, dtype=np.int64)
    for k in range(r):
        masks |= np.left_shift(np.int64(1), N - basis[:, k])

    order = np.argsort(masks)
    sortedMasks = masks[order]
    columns = np.arange(dim)

    rowIdx = [columns]
    colIdx = [columns]
    values = [np.full(dim, -p.B*(N - 2*r))]

    for i in range(1, N + 1):
        j = i % N + 1
        bitI = (masks >> (N - i)) & 1
        bitJ = (masks >> (N - j)) & 1
        hops = bitI != bitJ
        if not np.any(hops):
            continue
        flip = np.int64((1 << (N - i)) | (1 << (N - j)))
        target = order[np.searchsorted(sortedMasks, masks[hops] ^ flip)]
        rowIdx.append(target)
        colIdx.append(columns[hops])
        values.append(np.full(target.shape[0], -0.5*p.J))

    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(values), (np.concatenate(rowIdx), np.concatenate(colIdx))),
        shape=(dim, dim),
    ).tocsr()

    logger.debug("Built Hamiltonian block N=%d, r=%d of dimension %d", N, r, dim)

    return HamiltonianBlock(N=N, r=r, J=p.J, B=p.B, basis=basis, matrix=matrix)


def groundOfBlock(h, denseDim=None):
    """The lowest eigenpair of a Hamiltonian block.

    Blocks up to denseDim are diagonalised densely, larger ones with the
    Lanczos solver. The sign of the eigenvector is fixed so that its
    largest magnitude component is positive.

    Parameters
    ----------
    h : HamiltonianBlock
        The block.
    denseDim : int or None
        Dense solver limit. Defaults to the denseEigenDim setting.

    Returns
    -------
    OracleResult

    Raises
    ------
    ConvergenceError
        If the iterative solver fails.
    """
    denseDim = xxchain.CONFIG.denseEigenDim if denseDim is None else denseDim

    if h.dim <= denseDim:
        evals, evecs = scipy.linalg.eigh(h.matrix.toarray())
        energy = float(evals[0])
        vector = evecs[:, 0]
        gap = float(evals[1] - evals[0]) if h.dim > 1 else math.inf
        radius = float(max(abs(evals[0]), abs(evals[-1])))
    else:
        try:
            evals, evecs = scipy.sparse.linalg.eigsh(h.matrix, k=2, which="SA", tol=1e-12)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            residual = math.inf
            if len(exc.eigenvalues) > 0:
                lowest = np.argmin(exc.eigenvalues)
                vector = exc.eigenvectors[:, lowest]
                shifted = h.matrix @ vector - exc.eigenvalues[lowest]*vector
                residual = float(np.linalg.norm(shifted))
            logger.error("Lanczos did not converge for block N=%d, r=%d", h.N, h.r)
            raise ConvergenceError("Iterative eigensolver did not converge", residual)
        order = np.argsort(evals)
        energy = float(evals[order[0]])
        vector = evecs[:, order[0]]
        gap = float(evals[order[1]] - evals[order[0]])
        radius = float(scipy.sparse.linalg.norm(h.matrix, ord=1))

    vector = vector/np.linalg.norm(vector)
    if vector[np.argmax(np.abs(vector))] < 0.0:
        vector = -vector

    residual = float(np.linalg.norm(h.matrix @ vector - energy*vector))
    norm = float(scipy.sparse.linalg.norm(h.matrix, ord=1))
    if residual > RESIDUAL_BOUND*max(norm, 1.0):
        logger.warning("Eigenpair residual %.3e for block N=%d, r=%d", residual, h.N, h.r)

    degenerate = radius > 0.0 and gap < DEGENERACY_GAP*radius

    return OracleResult(
        N=h.N, r=h.r, groundEnergy=energy, groundVector=vector,
        degenerate=bool(degenerate), gap=gap, residual=residual,
    )


def groundEnergyOfChain(p):
    """The lowest energy over all blocks r = 0..N.

    Returns
    -------
    tuple of (float, int)
        The ground energy and the smallest r attaining it within
        rounding.
    """
    energies = [groundOfBlock(buildBlockHamiltonian(p, r)).groundEnergy for r in range(p.N + 1)]
    lowest = min(energies)
    scale = max(1.0, abs(lowest))
    for r, energy in enumerate(energies):
        if energy - lowest <= 1e-10*scale:
            return lowest, r
    return lowest, int(np.argmin(energies))  # pragma: no cover


def overlap(analytic, numeric):
    """The overlap |<analytic|numeric>| of a sector state and an oracle
    ground state in the same basis.

    Raises
    ------
    ValidationError
        If the two states belong to different chains or sectors.
    """
    if (analytic.N, analytic.r) != (numeric.N, numeric.r):
        raise ValidationError(
            "Cannot compare N=%d, r=%d with N=%d, r=%d"
            % (analytic.N, analytic.r, numeric.N, numeric.r)
        )
    vector = analytic.normalized()
    if vector.shape != numeric.groundVector.shape:
        raise ValidationError("Basis sizes differ")
    return float(min(1.0, abs(np.dot(vector, numeric.groundVector))))


def denseBipartitionRank(state, M=None, tol=None, maxSites=None):
    """Schmidt rank of a state from its reshaped amplitude matrix.

    The state is written as a sparse 2^M x 2^(N-M) matrix indexed by
    the left and right spin configurations. Rows and columns are grouped
    by their number of down spins, and each non-empty group is
    decomposed densely without any rescaling.

    Parameters
    ----------
    state : SectorState
        The state.
    M : int or None
        Sites left of the cut. Defaults to N//2.
    tol : float or None
        Relative tolerance. If None, the numpy default of
        s_max * max(rows, cols) * eps is used.
    maxSites : int or None
        Cap on N. Defaults to the maxOracleSites setting.

    Returns
    -------
    int
    """
    maxSites = xxchain.CONFIG.maxOracleSites if maxSites is None else maxSites
    if state.N > maxSites:
        raise CapacityError("The oracle is limited to N <= %d, got N=%d" % (maxSites, state.N))
    cut = Bipartition.default(state.N) if M is None else Bipartition(state.N, M)
    if tol is not None:
        tol = checkTolerance(tol)

    N = cut.N
    subsets = state.subsets
    isLeft = subsets <= cut.M
    leftShift = np.where(isLeft, cut.M - subsets, 0)
    rightShift = np.where(isLeft, 0, N - subsets)
    leftBits = np.where(isLeft, np.left_shift(np.int64(1), leftShift), 0).sum(axis=1)
    rightBits = np.where(isLeft, 0, np.left_shift(np.int64(1), rightShift)).sum(axis=1)

    reshaped = scipy.sparse.coo_matrix(
        (state.normalized(), (leftBits, rightBits)), shape=(2**cut.M, 2**(N - cut.M))
    ).tocsr()

    leftCount = _popCount(np.arange(2**cut.M))
    rightCount = _popCount(np.arange(2**(N - cut.M)))

    rank = 0
    for l in cut.blockRange(state.r):
        rows = np.flatnonzero(leftCount == l)
        cols = np.flatnonzero(rightCount == state.r - l)
        block = reshaped[rows][:, cols].toarray()
        if tol is None:
            rank += int(np.linalg.matrix_rank(block))
        else:
            singular = np.linalg.svd(block, compute_uv=False)
            rank += int(np.sum(singular > tol*singular[0]*max(block.shape)))

    return rank


##
#  Internal Functions
##

def _popCount(values):
    """Number of set bits of each integer in an array."""
    values = np.asarray(values, dtype=np.int64)
    counts = np.zeros(values.shape, dtype=np.int64)
    while np.any(values):
        counts += values & 1
        values = values >> 1
    return counts

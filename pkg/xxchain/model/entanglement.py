"""
XX Chain : Block Schmidt Ranks
==============================

The sector ground state splits across a cut after site M into r+1
orthogonal groups by the number l of down spins left of the cut. Each
group is a matrix A^{r(l)} whose rank is its Schmidt rank, and the
total Schmidt rank is the sum over l. Different total ranks across the
same cut certify that two states are not SLOCC equivalent.

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

import mpmath
import numpy as np

import xxchain

from xxchain.common import (
    CapacityError, ValidationError, binomial, checkInt, checkTolerance
)
from xxchain.model.groundstate import enumerateSubsets, sineLogProducts, sineProducts
from xxchain.model.spectrum import ChainParams, criticalField

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PRECISION_STANDARD = "standard"
PRECISION_EXTENDED = "extended"
PRECISION_MODES = (PRECISION_STANDARD, PRECISION_EXTENDED)

VERDICT_INEQUIVALENT = "INEQUIVALENT"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"

# Significant decimal digits of a double
DOUBLE_DIGITS = 16


##
#  Value Types
##

@dataclass(frozen=True)
class Bipartition:
    """A cut of the ring into sites 1..M and M+1..N."""
    N: int
    M: int

    def __post_init__(self):
        object.__setattr__(self, "N", checkInt(self.N, "N", lower=2))
        object.__setattr__(self, "M", checkInt(self.M, "M", lower=1, upper=self.N - 1))

    @classmethod
    def default(cls, N):
        """The balanced cut, M = N//2."""
        return cls(N, checkInt(N, "N", lower=2)//2)

    def blockRange(self, r):
        """The values of l for which A^{r(l)} is not empty."""
        return range(max(0, r - (self.N - self.M)), min(r, self.M) + 1)

# END Class Bipartition


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """The block A^{r(l)} of the amplitude matrix.

    Rows are the l-subsets of 1..M and columns the (r-l)-subsets of
    M+1..N, both in lexicographic order. The entries are held either
    directly, or as signs and log-magnitudes when r is large.
    """
    N: int
    M: int
    r: int
    l: int
    rowSubsets: np.ndarray = field(repr=False)
    colSubsets: np.ndarray = field(repr=False)
    entries: np.ndarray = field(default=None, repr=False)
    signs: np.ndarray = field(default=None, repr=False)
    logAbs: np.ndarray = field(default=None, repr=False)
    simplified: bool = False

    @property
    def shape(self):
        return (self.rowSubsets.shape[0], self.colSubsets.shape[0])

    @property
    def isLogForm(self):
        return self.entries is None

    def values(self):
        """The entries, exponentiated on demand in log form."""
        if self.entries is not None:
            return self.entries
        return self.signs*np.exp(self.logAbs)

    def pairs(self):
        """The site pairs (i, j), i < j, entering each entry."""
        if self.simplified:
            return [(i, j) for i in range(self.l) for j in range(self.l, self.r)]
        return list(combinations(range(self.r), 2))

    def concatenated(self):
        """The full r-site subset of every entry, row major."""
        nRows, nCols = self.shape
        return np.concatenate([
            np.repeat(self.rowSubsets, nCols, axis=0),
            np.tile(self.colSubsets, (nRows, 1)),
        ], axis=1)

# END Class BlockMatrix


@dataclass(frozen=True)
class BlockRank:
    """The measured rank of one block and its diagnostics."""
    l: int
    rank: int
    rows: int
    cols: int
    smallestRetained: float
    largestDiscarded: float
    gap: float
    reliable: bool
    precision: str
    tolerance: float

    def toJson(self):
        return {
            "l": self.l,
            "rank": self.rank,
            "rows": self.rows,
            "cols": self.cols,
            "smallestRetained": self.smallestRetained,
            "largestDiscarded": self.largestDiscarded,
            "gap": self.gap,
            "reliable": self.reliable,
            "precision": self.precision,
            "tolerance": self.tolerance,
        }

# END Class BlockRank


@dataclass(frozen=True)
class RankReport:
    """Schmidt rank of a sector state across a cut, block by block."""
    N: int
    M: int
    r: int
    tolerance: float
    precision: str
    blocks: tuple

    @property
    def totalRank(self):
        return sum(block.rank for block in self.blocks)

    @property
    def reliable(self):
        return all(block.reliable for block in self.blocks)

    @property
    def blockRanks(self):
        return tuple(block.rank for block in self.blocks)

    @property
    def precisionUsed(self):
        """The precision of the most demanding block."""
        if any(block.precision == PRECISION_EXTENDED for block in self.blocks):
            return PRECISION_EXTENDED
        return PRECISION_STANDARD

    @property
    def expectedRank(self):
        """The rank 2^r expected when both sides hold at least r sites,
        or None otherwise. Informational only.
        """
        if self.r <= min(self.M, self.N - self.M):
            return 2**self.r
        return None

    def toJson(self):
        return {
            "schemaVersion": SCHEMA_VERSION,
            "N": self.N,
            "M": self.M,
            "r": self.r,
            "tolerance": self.tolerance,
            "precision": self.precision,
            "blocks": [block.toJson() for block in self.blocks],
            "totalRank": self.totalRank,
            "expectedRank": self.expectedRank,
            "precisionUsed": self.precisionUsed,
            "reliable": self.reliable,
        }

# END Class RankReport


@dataclass(frozen=True)
class Verdict:
    """Outcome of the Schmidt rank witness for two states."""
    verdict: str
    rankA: int
    rankB: int
    N: int
    M: int
    reliable: bool

    def toJson(self):
        return {
            "verdict": self.verdict,
            "rankA": self.rankA,
            "rankB": self.rankB,
            "N": self.N,
            "M": self.M,
            "reliable": self.reliable,
        }

# END Class Verdict


@dataclass(frozen=True)
class RecurrenceResult:
    """Residual of a_i + a_{i+2} = 2 cos(pi/N) a_{i+1} on A^{2(1)}."""
    N: int
    M: int
    maxResidual: float
    passed: bool

# END Class RecurrenceResult


##
#  Blocks
##

def buildBlock(N, M, r, l, simplified=False, maxEntries=None, logOrder=None):
    """Build the block matrix A^{r(l)}.

    Parameters
    ----------
    N : int
        Number of sites.
    M : int
        Number of sites left of the cut, 1 <= M < N.
    r : int
        Number of down spins.
    l : int
        Number of down spins left of the cut.
    simplified : bool
        If True, only the l(r-l) sine factors crossing the cut enter
        each entry. The dropped factors are constant along rows and
        columns, so the rank is unchanged.
    maxEntries : int or None
        Cap on rows*cols. Defaults to the maxBlockEntries setting.
    logOrder : int or None
        Blocks with r above this are built in log-magnitude form.
        Defaults to the logAmplitudeOrder setting.

    Returns
    -------
    BlockMatrix
    """
    conf = xxchain.CONFIG
    cut = Bipartition(N, M)
    r = checkInt(r, "r", lower=0, upper=N)
    l = checkInt(l, "l", lower=0, upper=r)
    if l > M or r - l > N - M:
        raise ValidationError(
            "Block l=%d of sector r=%d does not fit the cut %d|%d" % (l, r, M, N - M)
        )
    if maxEntries is None:
        maxEntries = conf.maxBlockEntries
    if logOrder is None:
        logOrder = conf.logAmplitudeOrder

    nRows = binomial(M, l)
    nCols = binomial(N - M, r - l)
    if nRows*nCols > maxEntries:
        logger.error(
            "Block A^{%d(%d)} is %d x %d, cap is %d entries", r, l, nRows, nCols, maxEntries
        )
        raise CapacityError(
            "Block has %d entries, above the cap of %d" % (nRows*nCols, maxEntries)
        )

    rowSubsets = enumerateSubsets(M, l)
    colSubsets = enumerateSubsets(N - M, r - l, offset=M)
    block = BlockMatrix(
        N=cut.N, M=cut.M, r=r, l=l, rowSubsets=rowSubsets, colSubsets=colSubsets,
        simplified=simplified,
    )

    full = block.concatenated()
    if r > logOrder:
        signs, logAbs = sineLogProducts(N, full, pairs=block.pairs())
        return _replace(block, signs=signs.reshape(nRows, nCols),
                        logAbs=logAbs.reshape(nRows, nCols))

    entries = sineProducts(N, full, pairs=block.pairs()).reshape(nRows, nCols)
    return _replace(block, entries=entries)


def equilibrate(matrix, rounds=2):
    """Scale rows, then columns, to unit sup-norm.

    All entries of the blocks are non-zero, so the scaling is
    invertible and keeps the rank.

    Parameters
    ----------
    matrix : numpy.ndarray
        The matrix to scale.
    rounds : int
        Number of row and column passes.
    """
    scaled = np.array(matrix, dtype=np.float64, copy=True)
    for _ in range(rounds):
        rowMax = np.max(np.abs(scaled), axis=1, keepdims=True)
        scaled /= np.where(rowMax > 0.0, rowMax, 1.0)
        colMax = np.max(np.abs(scaled), axis=0, keepdims=True)
        scaled /= np.where(colMax > 0.0, colMax, 1.0)
    return scaled


def equilibrateLog(logAbs, rounds=2):
    """Log domain counterpart of equilibrate, acting on log-magnitudes."""
    scaled = np.array(logAbs, dtype=np.float64, copy=True)
    for _ in range(rounds):
        scaled -= np.max(scaled, axis=1, keepdims=True)
        scaled -= np.max(scaled, axis=0, keepdims=True)
    return scaled


##
#  Ranks
##

def numericalRank(block, tol=None, precision=PRECISION_STANDARD, minGap=None, digits=None,
                  rounds=None):
    """Rank of a block by singular value thresholding.

    The block is equilibrated and its singular values s_i are counted
    if s_i > tol * s_max * max(rows, cols). When the ratio between the
    smallest retained and largest discarded value is below minGap, the
    entries and the decomposition are recomputed with mpmath at the
    extended precision, where the tolerance becomes
    tol^(digits/16).

    Parameters
    ----------
    block : BlockMatrix
        The block.
    tol : float or None
        Relative tolerance in (0, 1). Defaults to rankTolerance.
    precision : str
        Either "standard" (double, escalating when needed) or
        "extended" (mpmath only).
    minGap : float or None
        Reliability threshold. Defaults to minGap.
    digits : int or None
        Decimal digits of the extended path. Defaults to extendedDigits.
    rounds : int or None
        Equilibration rounds. Defaults to equilibrationRounds.

    Returns
    -------
    BlockRank
    """
    conf = xxchain.CONFIG
    tol = checkTolerance(conf.rankTolerance if tol is None else tol)
    minGap = conf.minGap if minGap is None else minGap
    digits = conf.extendedDigits if digits is None else digits
    rounds = conf.equilibrationRounds if rounds is None else rounds
    if precision not in PRECISION_MODES:
        raise ValidationError("Unknown precision mode '%s'" % precision)
    if not block.isLogForm and not np.all(np.isfinite(block.entries)):
        raise ValidationError("Block entries must be finite")

    if precision == PRECISION_STANDARD:
        if block.isLogForm:
            scaled = block.signs*np.exp(equilibrateLog(block.logAbs, rounds))
        else:
            scaled = equilibrate(block.entries, rounds)
        singular = np.linalg.svd(scaled, compute_uv=False)
        result = _decideRank(block, singular, tol, minGap, PRECISION_STANDARD)
        if result.reliable:
            return result
        logger.debug(
            "Escalating A^{%d(%d)} for N=%d, M=%d: gap %.3g below %.3g",
            block.r, block.l, block.N, block.M, result.gap, minGap
        )

    with mpmath.workdps(digits):
        extTol = mpmath.mpf(tol)**(mpmath.mpf(digits)/DOUBLE_DIGITS)
        singular = _extendedSingularValues(block, rounds)
        result = _decideRank(block, singular, extTol, minGap, PRECISION_EXTENDED)

    if not result.reliable:
        logger.warning(
            "Unreliable rank for A^{%d(%d)}, N=%d, M=%d: gap %.3g",
            block.r, block.l, block.N, block.M, result.gap
        )

    return result


def schmidtRank(N, r, M=None, tol=None, precision=PRECISION_STANDARD, simplified=False):
    """Total Schmidt rank of the sector r ground state across a cut.

    Parameters
    ----------
    N : int
        Number of sites.
    r : int
        Number of down spins.
    M : int or None
        Sites left of the cut. Defaults to N//2.
    tol : float or None
        Relative rank tolerance, see numericalRank.
    precision : str
        Precision mode, see numericalRank.
    simplified : bool
        Use the cross-factor-only block entries.

    Returns
    -------
    RankReport
        The report holds what was measured. Unreliable blocks are
        flagged, not raised.
    """
    N = checkInt(N, "N", lower=2)
    cut = Bipartition.default(N) if M is None else Bipartition(N, M)
    r = checkInt(r, "r", lower=0, upper=N)
    tol = checkTolerance(xxchain.CONFIG.rankTolerance if tol is None else tol)

    blocks = []
    for l in cut.blockRange(r):
        block = buildBlock(cut.N, cut.M, r, l, simplified=simplified)
        blocks.append(numericalRank(block, tol=tol, precision=precision))

    report = RankReport(
        N=cut.N, M=cut.M, r=r, tolerance=tol, precision=precision, blocks=tuple(blocks),
    )
    logger.debug(
        "Schmidt rank N=%d, M=%d, r=%d: %s -> %d", N, cut.M, r, report.blockRanks, report.totalRank
    )

    return report


def sloccVerdict(reportA, reportB):
    """Compare two states with the Schmidt rank witness.

    Different ranks across the same cut prove SLOCC inequivalence.
    Equal ranks prove nothing.

    Raises
    ------
    ValidationError
        If the reports were measured on different cuts.
    """
    if (reportA.N, reportA.M) != (reportB.N, reportB.M):
        raise ValidationError(
            "Reports use different cuts: %d|%d and %d|%d"
            % (reportA.M, reportA.N - reportA.M, reportB.M, reportB.N - reportB.M)
        )
    rankA = reportA.totalRank
    rankB = reportB.totalRank
    return Verdict(
        verdict=VERDICT_INEQUIVALENT if rankA != rankB else VERDICT_INCONCLUSIVE,
        rankA=rankA,
        rankB=rankB,
        N=reportA.N,
        M=reportA.M,
        reliable=reportA.reliable and reportB.reliable,
    )


def classifyTransitions(N, J=1.0, M=None, tol=None, precision=PRECISION_STANDARD, mapper=map):
    """The witness verdict at every critical field of the chain.

    Parameters
    ----------
    mapper : callable
        A map-like callable used to compute the sector reports, for
        instance the map method of a worker pool.

    Returns
    -------
    list of dict
        One entry per critical field with keys r, field, reportAbove,
        reportBelow and verdict. Sector r holds the ground state above
        the field and sector r+1 below it.
    """
    p = ChainParams(N, J)
    reports = list(mapper(
        lambda r: schmidtRank(p.N, r, M=M, tol=tol, precision=precision), range(p.halfN + 1)
    ))

    transitions = []
    for r in range(p.halfN):
        transitions.append({
            "r": r,
            "field": criticalField(p, r),
            "reportAbove": reports[r],
            "reportBelow": reports[r + 1],
            "verdict": sloccVerdict(reports[r], reports[r + 1]),
        })

    return transitions


def blockSymmetryCheck(N, r, M=None, tol=None):
    """Compare the ranks of A^{r(l)} and A^{r(r-l)}.

    Returns
    -------
    list of tuple
        Entries (l, rank of A^{r(l)}, rank of A^{r(r-l)}) for every l
        where both blocks exist.
    """
    report = schmidtRank(N, r, M=M, tol=tol)
    ranks = {block.l: block.rank for block in report.blocks}
    return [(l, ranks[l], ranks[r - l]) for l in sorted(ranks) if r - l in ranks]


def rowRecurrenceCheck(N, M=None, threshold=1e-12):
    """Check the row recurrence of the unscaled A^{2(1)}.

    Consecutive rows satisfy a_i + a_{i+2} = 2 cos(pi/N) a_{i+1}, so
    only two rows are independent.

    Parameters
    ----------
    N : int
        Number of sites.
    M : int or None
        Sites left of the cut, at least 3. Defaults to N//2.
    threshold : float
        Residual below which the check passes.

    Returns
    -------
    RecurrenceResult
    """
    N = checkInt(N, "N", lower=2)
    cut = Bipartition.default(N) if M is None else Bipartition(N, M)
    if cut.M < 3:
        raise ValidationError("The row recurrence needs M >= 3, got M=%d" % cut.M)

    rows = buildBlock(cut.N, cut.M, 2, 1, logOrder=2).entries
    twoCos = 2.0*math.cos(math.pi/cut.N)
    residual = rows[:-2] + rows[2:] - twoCos*rows[1:-1]
    maxResidual = float(np.max(np.abs(residual)))

    return RecurrenceResult(N=cut.N, M=cut.M, maxResidual=maxResidual,
                            passed=maxResidual < threshold)


##
#  Internal Functions
##

def _replace(block, **changes):
    """Return a copy of a frozen block with some fields replaced."""
    values = {name: getattr(block, name) for name in block.__dataclass_fields__}
    values.update(changes)
    return BlockMatrix(**values)


def _decideRank(block, singular, tol, minGap, precision):
    """Apply the threshold rule to a list of singular values."""
    nRows, nCols = block.shape
    values = sorted(singular, reverse=True)
    sMax = values[0] if values else 0
    cutoff = tol*sMax*max(nRows, nCols)

    retained = [s for s in values if s > cutoff]
    rank = len(retained)
    discarded = values[rank:]

    smallest = retained[-1] if retained else 0
    largest = discarded[0] if discarded else 0
    if rank == 0:
        gap = 0.0
    elif discarded and largest > 0:
        gap = float(smallest/largest)
    elif discarded:
        gap = math.inf
    else:
        gap = float(smallest/cutoff)

    return BlockRank(
        l=block.l,
        rank=rank,
        rows=nRows,
        cols=nCols,
        smallestRetained=float(smallest),
        largestDiscarded=float(largest),
        gap=gap,
        reliable=rank > 0 and gap >= minGap,
        precision=precision,
        tolerance=float(tol),
    )


def _extendedSingularValues(block, rounds):
    """Singular values of the equilibrated block at the working mpmath
    precision. Entries are recomputed from the subsets.
    """
    nRows, nCols = block.shape
    pairs = block.pairs()
    scale = mpmath.pi/block.N
    full = block.concatenated()

    entries = []
    for subset in full:
        value = mpmath.mpf(1)
        for i, j in pairs:
            value *= mpmath.sin(int(subset[i] - subset[j])*scale)
        entries.append(value)

    rowsList = [entries[i*nCols:(i + 1)*nCols] for i in range(nRows)]
    for _ in range(rounds):
        rowsList = [[x/max(abs(y) for y in row) for x in row] for row in rowsList]
        colMax = [max(abs(row[j]) for row in rowsList) for j in range(nCols)]
        rowsList = [[x/colMax[j] for j, x in enumerate(row)] for row in rowsList]

    matrix = mpmath.matrix(rowsList)
    if nRows < nCols:
        matrix = matrix.T

    singular = mpmath.svd_r(matrix, compute_uv=False)
    return [singular[i] for i in range(singular.rows)]

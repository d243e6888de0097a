"""
XX Chain : Sector Spectrum
==========================

Closed-form energies of the lowest state in every magnetisation sector
of the periodic XX chain, the critical fields where neighbouring
sectors cross, and the resulting ground state phase diagram.

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

from dataclasses import dataclass

import numpy as np

import xxchain

from xxchain.common import DegenerateError, ValidationError, checkFloat, checkInt

logger = logging.getLogger(__name__)

REGIME_MOTT = "mott"
REGIME_SUPERFLUID = "superfluid"


##
#  Value Types
##

@dataclass(frozen=True)
class ChainParams:
    """Model inputs of the XX chain.

    Parameters
    ----------
    N : int
        Number of sites on the ring, at least 2.
    J : float
        Exchange constant, strictly positive.
    B : float
        External field, non-negative.
    """
    N: int
    J: float = 1.0
    B: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "N", checkInt(self.N, "N", lower=2))
        object.__setattr__(self, "J", checkFloat(self.J, "J", lower=0.0, strict=True))
        object.__setattr__(self, "B", checkFloat(self.B, "B", lower=0.0))

    @property
    def halfN(self):
        """The largest sector in the ground state family, floor(N/2)."""
        return self.N // 2

    def withField(self, B):
        """Return a copy with a different field."""
        return ChainParams(self.N, self.J, B)

# END Class ChainParams


@dataclass(frozen=True)
class Sector:
    """A magnetisation sector with r down spins on N sites."""
    N: int
    r: int

    def __post_init__(self):
        object.__setattr__(self, "N", checkInt(self.N, "N", lower=2))
        object.__setattr__(self, "r", checkInt(self.r, "r", lower=0, upper=self.N // 2))

    @property
    def alpha(self):
        """The fermion parity (-1)^r."""
        return -1 if self.r % 2 else 1

    @property
    def parity(self):
        return "odd" if self.r % 2 else "even"

    @property
    def gridOffset(self):
        """Offset of the momentum quantum number n from the integers.

        Odd sectors use integer n, even sectors half-odd integer n.
        """
        return 0.0 if self.r % 2 else 0.5

# END Class Sector


@dataclass(frozen=True)
class MomentumSet:
    """The occupied momenta q_l = pi(r+1-2l)/N, l = 1..r."""
    N: int
    r: int
    values: tuple

    def isSymmetric(self, tol=1e-12):
        """Check that the set is closed under negation."""
        ordered = np.sort(np.asarray(self.values, dtype=float))
        return bool(np.all(np.abs(ordered + ordered[::-1]) <= tol))

    def inRange(self):
        """Check that all momenta lie in (-pi, pi]."""
        return all(-math.pi < q <= math.pi for q in self.values)

    def onGrid(self, tol=1e-9):
        """Check that every momentum is 2 pi n / N with n on the sector grid."""
        offset = Sector(self.N, self.r).gridOffset
        for q in self.values:
            n = q*self.N/(2.0*math.pi) - offset
            if abs(n - round(n)) > tol:
                return False
        return True

# END Class MomentumSet


@dataclass(frozen=True)
class PhaseInterval:
    """A field interval on which sector r is the ground sector."""
    r: int
    lower: float
    upper: float
    dCoefficient: float
    slope: int
    regime: str

    def contains(self, B):
        return self.lower < B < self.upper

    def samples(self, count=3):
        """Return evenly spread interior fields.

        The unbounded top interval is sampled on (lower, 2*lower].
        """
        upper = 2.0*self.lower if math.isinf(self.upper) else self.upper
        width = upper - self.lower
        return tuple(self.lower + width*(i + 1)/(count + 1) for i in range(count))

    def midpoint(self):
        return self.samples(count=1)[0]

# END Class PhaseInterval


@dataclass(frozen=True)
class PhaseDiagram:
    """Critical fields and ground sectors of a finite chain.

    The critical fields are ordered by sector, B_c^0 > B_c^1 > ... > 0,
    and the intervals run from the top (r = 0) to B = 0.
    """
    N: int
    J: float
    criticalFields: tuple
    intervals: tuple

    def sectorAt(self, B):
        """The ground sector at field B, see groundSector."""
        return groundSector(ChainParams(self.N, self.J, B))

    def intervalMidpoints(self):
        """One non-degenerate field inside every interval."""
        return tuple(interval.midpoint() for interval in self.intervals)

    def slopeJumps(self):
        """The change of dE/dB crossing each critical field downwards.

        Returns
        -------
        list of dict
            Entries with keys r, field, slopeAbove, slopeBelow and jump.
        """
        jumps = []
        for r, field in enumerate(self.criticalFields):
            above = self.intervals[r].slope
            below = self.intervals[r + 1].slope
            jumps.append({
                "r": r, "field": field, "slopeAbove": above, "slopeBelow": below,
                "jump": below - above,
            })
        return jumps

# END Class PhaseDiagram


##
#  Closed Forms
##

def momenta(N, r):
    """The momenta occupied by the lowest state in sector r.

    Parameters
    ----------
    N : int
        Number of sites.
    r : int
        Number of down spins, 0 <= r <= N//2.

    Returns
    -------
    MomentumSet
    """
    sector = Sector(N, r)
    values = tuple(math.pi*(sector.r + 1 - 2*l)/sector.N for l in range(1, sector.r + 1))
    return MomentumSet(sector.N, sector.r, values)


def dispersion(q, p):
    """Single fermion energy 2B - J cos(q) for q in (-pi, pi]."""
    q = checkFloat(q, "q")
    if not -math.pi < q <= math.pi:
        raise ValidationError("Momentum must lie in (-pi, pi], got %r" % q)
    return 2.0*p.B - p.J*math.cos(q)


def dCoefficient(N, r):
    """The energy coefficient D^r = csc(pi/N) sin(pi r/N).

    Evaluated on min(r, N-r) so that D^r = D^{N-r} holds exactly.

    Parameters
    ----------
    N : int
        Number of sites, at least 2.
    r : int
        Sector index, 0 <= r <= N.
    """
    N = checkInt(N, "N", lower=2)
    r = checkInt(r, "r", lower=0, upper=N)
    k = min(r, N - r)
    if k == 0:
        return 0.0
    return math.sin(math.pi*k/N)/math.sin(math.pi/N)


def sectorEnergy(p, r):
    """Energy E_0^r = -D^r J - B(N-2r) of the lowest state in sector r."""
    r = checkInt(r, "r", lower=0, upper=p.halfN)
    return -dCoefficient(p.N, r)*p.J - p.B*(p.N - 2*r)


def cosineSumEnergy(p, r):
    """Energy of sector r from the explicit occupied-mode sum.

    This is the slow path, kept to cross-check sectorEnergy.
    """
    qValues = np.asarray(momenta(p.N, r).values, dtype=float)
    return -p.J*math.fsum(np.cos(qValues)) - p.B*(p.N - 2*r)


def criticalField(p, r):
    """The field B_c^r = (J/2) sec(pi/2N) cos(pi(r+1/2)/N) where the
    ground state changes from sector r to sector r+1.

    Parameters
    ----------
    p : ChainParams
        The chain parameters. The field value is not used.
    r : int
        Sector index, 0 <= r <= N//2 - 1.
    """
    r = checkInt(r, "r")
    if not 0 <= r < p.halfN:
        raise ValidationError(
            "Critical fields exist for 0 <= r < %d, got r=%d" % (p.halfN, r)
        )
    # Both angles are formed the same way so that r = 0 gives exactly J/2
    halfStep = math.pi*0.5/p.N
    angle = math.pi*(r + 0.5)/p.N
    return 0.5*p.J*(math.cos(angle)/math.cos(halfStep))


def criticalFields(p):
    """All critical fields B_c^r, r = 0..N//2-1, strictly decreasing."""
    return tuple(criticalField(p, r) for r in range(p.halfN))


def criticalFieldGaps(N, J=1.0):
    """Spacings of consecutive critical fields, including the last one
    down to zero field.
    """
    fields = criticalFields(ChainParams(N, J)) + (0.0,)
    return tuple(fields[i] - fields[i + 1] for i in range(len(fields) - 1))


def groundSector(p, tol=None):
    """The sector holding the ground state at field p.B.

    This is the number of critical fields strictly above B.

    Parameters
    ----------
    p : ChainParams
        The chain parameters.
    tol : float or None
        Relative coincidence tolerance, multiplied by |J|. Defaults to
        the degeneracyTolerance config setting.

    Raises
    ------
    DegenerateError
        If B lies within tolerance of a critical field.
    """
    if tol is None:
        tol = xxchain.CONFIG.degeneracyTolerance

    above = 0
    for r, field in enumerate(criticalFields(p)):
        if abs(p.B - field) <= tol*abs(p.J):
            logger.warning("Degenerate ground space at B = %.17g", p.B)
            raise DegenerateError(field, (r, r + 1))
        if field > p.B:
            above += 1

    return above


def groundEnergy(p, tol=None):
    """The ground state energy and its sector at field p.B.

    At a critical field the energy is still well defined, and the lower
    of the two degenerate sectors is returned.

    Returns
    -------
    tuple of (float, int)
    """
    try:
        r = groundSector(p, tol=tol)
    except DegenerateError as exc:
        r = exc.sectors[0]
    return sectorEnergy(p, r), r


def energySlope(p, tol=None):
    """The derivative dE/dB = -(N - 2r) of the ground state energy."""
    r = groundSector(p, tol=tol)
    return -(p.N - 2*r)


def slopeJump(p, r):
    """Difference of the right and left derivative of the ground energy
    across B_c^r, taken downwards in field.
    """
    field = criticalField(p, r)
    above = p.withField(field + 0.5*_sectorWidth(p, r - 1, field))
    below = p.withField(field - 0.5*_sectorWidth(p, r + 1, field))
    return energySlope(below) - energySlope(above)


def phaseDiagram(p):
    """Build the phase diagram of a chain.

    Parameters
    ----------
    p : ChainParams
        The chain parameters. The field value is not used.

    Returns
    -------
    PhaseDiagram
    """
    fields = criticalFields(p)
    bounds = (math.inf,) + fields + (0.0,)
    intervals = []
    for r in range(p.halfN + 1):
        intervals.append(PhaseInterval(
            r=r,
            lower=bounds[r + 1],
            upper=bounds[r],
            dCoefficient=dCoefficient(p.N, r),
            slope=-(p.N - 2*r),
            regime=REGIME_MOTT if r == 0 else REGIME_SUPERFLUID,
        ))

    logger.debug("Phase diagram for N=%d has %d critical fields", p.N, len(fields))

    return PhaseDiagram(N=p.N, J=p.J, criticalFields=fields, intervals=tuple(intervals))


##
#  Internal Functions
##

def _sectorWidth(p, r, field):
    """Width of the ground interval of sector r, measured from the
    neighbouring critical field. Used to step safely off a crossing.
    """
    fields = criticalFields(p)
    if r < 0:
        return field
    if r >= len(fields):
        return field
    return abs(field - fields[r])

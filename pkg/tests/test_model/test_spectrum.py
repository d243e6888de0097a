"""
XX Chain : Spectrum Tests
=========================

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

import pytest

from xxchain.common import DegenerateError, ValidationError
from xxchain.model.spectrum import (
    REGIME_MOTT, REGIME_SUPERFLUID, ChainParams, Sector, cosineSumEnergy, criticalField,
    criticalFieldGaps, criticalFields, dCoefficient, dispersion, energySlope, groundEnergy,
    groundSector, momenta, phaseDiagram, sectorEnergy, slopeJump
)


@pytest.mark.model
def testModelSpectrum_ChainParams():
    """Test the parameter validation."""
    p = ChainParams(8, 1, 0)
    assert (p.N, p.J, p.B) == (8, 1.0, 0.0)
    assert isinstance(p.J, float)
    assert p.halfN == 4
    assert p.withField(0.3).B == 0.3
    assert ChainParams(5).halfN == 2

    with pytest.raises(ValidationError):
        ChainParams(1)
    with pytest.raises(ValidationError):
        ChainParams(4, 0.0)
    with pytest.raises(ValidationError):
        ChainParams(4, -1.0)
    with pytest.raises(ValidationError):
        ChainParams(4, 1.0, -0.1)
    with pytest.raises(ValidationError):
        ChainParams(4, math.nan)
    with pytest.raises(ValidationError):
        ChainParams(4.0)

# END Test testModelSpectrum_ChainParams


@pytest.mark.model
def testModelSpectrum_Sector():
    """Test the sector parity and momentum grid."""
    assert Sector(8, 0).alpha == 1
    assert Sector(8, 3).alpha == -1
    assert Sector(8, 3).parity == "odd"
    assert Sector(8, 2).gridOffset == 0.5
    assert Sector(8, 1).gridOffset == 0.0

    with pytest.raises(ValidationError):
        Sector(8, 5)
    with pytest.raises(ValidationError):
        Sector(8, -1)

# END Test testModelSpectrum_Sector


@pytest.mark.model
def testModelSpectrum_Momenta():
    """Test the occupied momenta of every sector."""
    assert momenta(8, 0).values == ()
    assert momenta(4, 1).values == (0.0,)

    for N in range(2, 17):
        for r in range(N//2 + 1):
            qSet = momenta(N, r)
            assert len(qSet.values) == r
            assert len(set(qSet.values)) == r
            assert qSet.isSymmetric()
            assert qSet.inRange()
            assert qSet.onGrid()

# END Test testModelSpectrum_Momenta


@pytest.mark.model
def testModelSpectrum_Dispersion():
    """Test the single fermion energy."""
    assert dispersion(0.0, ChainParams(4, 1.0, 0.0)) == -1.0
    assert dispersion(math.pi/2, ChainParams(4, 1.0, 0.5)) == pytest.approx(1.0, abs=1e-15)
    assert dispersion(momenta(4, 1).values[0], ChainParams(4, 2.0, 1.0)) == 0.0
    assert dispersion(math.pi, ChainParams(4, 1.0, 0.0)) == 1.0

    with pytest.raises(ValidationError):
        dispersion(-math.pi, ChainParams(4))
    with pytest.raises(ValidationError):
        dispersion(4.0, ChainParams(4))

# END Test testModelSpectrum_Dispersion


@pytest.mark.model
def testModelSpectrum_DCoefficient():
    """Test the energy coefficient D^r."""
    assert dCoefficient(8, 0) == 0.0
    assert dCoefficient(8, 1) == 1.0
    assert dCoefficient(6, 3) == pytest.approx(2.0, rel=1e-14)
    assert dCoefficient(4, 2) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    # Exact reflection symmetry
    for N in range(2, 40):
        for r in range(N + 1):
            assert dCoefficient(N, r) == dCoefficient(N, N - r)

    # Closed form against the explicit mode sum
    for N in range(2, 33):
        p = ChainParams(N, 1.3, 0.0)
        for r in range(p.halfN + 1):
            assert sectorEnergy(p, r) == pytest.approx(cosineSumEnergy(p, r), rel=1e-12, abs=1e-12)

    with pytest.raises(ValidationError):
        dCoefficient(8, 9)
    with pytest.raises(ValidationError):
        dCoefficient(1, 0)

# END Test testModelSpectrum_DCoefficient


@pytest.mark.model
def testModelSpectrum_SectorEnergy():
    """Test the sector energies."""
    for N in (2, 5, 8, 13):
        assert sectorEnergy(ChainParams(N, 2.0, 0.7), 0) == pytest.approx(-0.7*N)

    assert sectorEnergy(ChainParams(8, 1.0, 0.6), 1) == pytest.approx(-4.6, rel=1e-14)
    assert sectorEnergy(ChainParams(4, 1.0, 0.0), 2) == pytest.approx(-math.sqrt(2.0), rel=1e-14)

    with pytest.raises(ValidationError):
        sectorEnergy(ChainParams(8), 5)

# END Test testModelSpectrum_SectorEnergy


@pytest.mark.model
def testModelSpectrum_CriticalField():
    """Test the critical fields."""
    for N in range(2, 65):
        assert criticalField(ChainParams(N, 1.0), 0) == 0.5
        assert criticalField(ChainParams(N, 3.0), 0) == 1.5

    p = ChainParams(4, 1.0)
    expected = 0.5*math.cos(3*math.pi/8)/math.cos(math.pi/8)
    assert criticalField(p, 1) == pytest.approx(expected, rel=1e-15)
    assert criticalField(p, 1) == pytest.approx(0.207107, abs=1e-6)

    # Independently solve E^1(B) = E^2(B) for N = 4
    crossing = (dCoefficient(4, 2) - dCoefficient(4, 1))/2.0
    assert criticalField(p, 1) == pytest.approx(crossing, rel=1e-14)

    with pytest.raises(ValidationError):
        criticalField(p, 2)
    with pytest.raises(ValidationError):
        criticalField(p, -1)
    with pytest.raises(ValidationError):
        criticalField(p, 1.0)

# END Test testModelSpectrum_CriticalField


@pytest.mark.model
def testModelSpectrum_CrossingEnergies():
    """The two sectors meeting at a critical field share their energy,
    and the fields are strictly decreasing towards zero.
    """
    for N in range(2, 65):
        p = ChainParams(N, 1.0)
        fields = criticalFields(p)
        assert len(fields) == N//2
        assert all(a > b for a, b in zip(fields, fields[1:]))
        assert fields[-1] > 0.0
        for r, field in enumerate(fields):
            pB = p.withField(field)
            upper = sectorEnergy(pB, r)
            lower = sectorEnergy(pB, r + 1)
            assert abs(upper - lower) <= 1e-12*max(1.0, abs(upper))

# END Test testModelSpectrum_CrossingEnergies


@pytest.mark.model
def testModelSpectrum_GroundSector():
    """Test the ground sector lookup."""
    assert groundSector(ChainParams(4, 1.0, 0.3)) == 1
    assert groundSector(ChainParams(4, 1.0, 0.1)) == 2
    assert groundSector(ChainParams(4, 1.0, 0.0)) == 2
    assert groundSector(ChainParams(9, 1.0, 0.0)) == 4
    for N in (2, 7, 16):
        assert groundSector(ChainParams(N, 1.0, 0.51)) == 0
        assert groundSector(ChainParams(N, 1.0, 5.0)) == 0
        assert groundSector(ChainParams(N, 1.0, 1e-6)) == N//2

    # The ground sector minimises the sector energy
    p = ChainParams(10, 1.0)
    for interval in phaseDiagram(p).intervals:
        for B in interval.samples(3):
            pB = p.withField(B)
            energies = [sectorEnergy(pB, r) for r in range(p.halfN + 1)]
            assert groundSector(pB) == energies.index(min(energies)) == interval.r

    # Degenerate queries
    with pytest.raises(DegenerateError) as exc:
        groundSector(ChainParams(4, 1.0, 0.5))
    assert exc.value.sectors == (0, 1)
    assert exc.value.field == 0.5

    field = criticalField(ChainParams(8, 1.0), 2)
    with pytest.raises(DegenerateError):
        groundSector(ChainParams(8, 1.0, field + 1e-14))
    assert groundSector(ChainParams(8, 1.0, field + 1e-14), tol=1e-15) == 2

# END Test testModelSpectrum_GroundSector


@pytest.mark.model
def testModelSpectrum_GroundEnergy():
    """Test the ground energy and slope."""
    p = ChainParams(8, 1.0, 0.6)
    assert groundEnergy(p) == (sectorEnergy(p, 0), 0)
    assert energySlope(p) == -8

    # At a crossing the lower sector is used
    energy, r = groundEnergy(ChainParams(8, 1.0, 0.5))
    assert r == 0
    assert energy == pytest.approx(-4.0)

    with pytest.raises(DegenerateError):
        energySlope(ChainParams(8, 1.0, 0.5))

# END Test testModelSpectrum_GroundEnergy


@pytest.mark.model
def testModelSpectrum_SlopeJump():
    """The derivative jumps by exactly two at every crossing."""
    for N in range(2, 33):
        p = ChainParams(N, 1.0)
        for r in range(p.halfN):
            assert slopeJump(p, r) == 2

    jumps = phaseDiagram(ChainParams(8, 1.0)).slopeJumps()
    assert [jump["jump"] for jump in jumps] == [2, 2, 2, 2]
    assert jumps[0]["slopeAbove"] == -8
    assert jumps[0]["slopeBelow"] == -6

# END Test testModelSpectrum_SlopeJump


@pytest.mark.model
def testModelSpectrum_PhaseDiagram():
    """Test the phase diagram."""
    diagram = phaseDiagram(ChainParams(2, 1.0))
    assert diagram.criticalFields == (0.5,)
    assert [interval.r for interval in diagram.intervals] == [0, 1]
    assert diagram.intervals[0].lower == 0.5
    assert math.isinf(diagram.intervals[0].upper)
    assert diagram.intervals[1].upper == 0.5
    assert diagram.intervals[1].lower == 0.0
    assert diagram.intervals[0].regime == REGIME_MOTT
    assert diagram.intervals[1].regime == REGIME_SUPERFLUID

    assert len(phaseDiagram(ChainParams(5, 1.0)).criticalFields) == 2

    diagram = phaseDiagram(ChainParams(8, 1.0))
    assert len(diagram.criticalFields) == 4
    assert diagram.criticalFields[0] == 0.5
    assert [interval.slope for interval in diagram.intervals] == [-8, -6, -4, -2, 0]

    # Every interval sample is inside and non-degenerate
    for interval in diagram.intervals:
        for B in interval.samples(3):
            assert interval.contains(B)
            assert diagram.sectorAt(B) == interval.r
    top = diagram.intervals[0]
    assert top.samples(3) == (0.625, 0.75, 0.875)
    assert [diagram.sectorAt(B) for B in diagram.intervalMidpoints()] == [0, 1, 2, 3, 4]

# END Test testModelSpectrum_PhaseDiagram


@pytest.mark.model
def testModelSpectrum_FieldRefinement():
    """The critical fields fill (0, J/2] more densely with growing N."""
    gaps16 = criticalFieldGaps(16)
    gaps64 = criticalFieldGaps(64)
    assert len(gaps16) == 8
    assert sum(gaps16) == pytest.approx(0.5)
    assert max(gaps64) < max(gaps16)

    previous = math.inf
    for N in (8, 16, 32, 64, 128):
        largest = max(criticalFieldGaps(N, 2.0))
        assert largest < previous
        previous = largest

# END Test testModelSpectrum_FieldRefinement

"""
XX Chain : Commands
===================

The command implementations. Each command takes a validated RunConfig
and returns a Report with its exit code set.

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

from multiprocessing.pool import ThreadPool

import numpy as np

import xxchain

from xxchain import EXIT_UNRELIABLE, EXIT_VERIFY
from xxchain.common import CapacityError, DegenerateError, binomial
from xxchain.cli.report import Report
from xxchain.model.spectrum import (
    ChainParams, criticalFieldGaps, dCoefficient, groundEnergy, groundSector, phaseDiagram,
    sectorEnergy
)
from xxchain.model.groundstate import buildState
from xxchain.model.entanglement import (
    PRECISION_EXTENDED, PRECISION_STANDARD, classifyTransitions, rowRecurrenceCheck, schmidtRank
)
from xxchain.model.oracle import (
    buildBlockHamiltonian, denseBipartitionRank, groundOfBlock, overlap
)

logger = logging.getLogger(__name__)

# Number of cells of the default phase diagram grid on [0, J]
PLOT_CELLS = 200

# Pass criteria of the verify command
ENERGY_TOLERANCE = 1e-9
OVERLAP_TOLERANCE = 1e-9
CROSSING_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-10
RECURRENCE_THRESHOLD = 1e-12


##
#  Commands
##

def cmdEnergy(cfg):
    """Tabulate E_0^r over the requested sectors and fields.

    Without a field option the table is for B = 0.
    """
    p = ChainParams(cfg.N, cfg.J)
    fields = _fieldGrid(cfg, p, default=[0.0])
    conf = xxchain.CONFIG

    report = Report(cfg, tolerance=conf.degeneracyTolerance, precision=PRECISION_STANDARD)
    report.setColumns(["N", "J", "B", "r", "D", "energy", "isGround"])

    for B in fields:
        pB = p.withField(B)
        try:
            ground = groundSector(pB)
        except DegenerateError as exc:
            ground = exc.sectors
        for r in cfg.sectorList():
            report.addRow({
                "N": p.N,
                "J": p.J,
                "B": B,
                "r": r,
                "D": dCoefficient(p.N, r),
                "energy": sectorEnergy(pB, r),
                "isGround": r in ground if isinstance(ground, tuple) else r == ground,
            })

    return report


def cmdPhaseDiagram(cfg):
    """Critical fields, ground sectors, slopes and slope jumps.

    The rows hold the plot data (B, E_min, dE/dB, r) on the requested
    field grid, or on the cell midpoints of [0, J] by default. Fields
    at a crossing get an empty slope and sector.
    """
    p = ChainParams(cfg.N, cfg.J)
    diagram = phaseDiagram(p)
    conf = xxchain.CONFIG

    gaps = criticalFieldGaps(p.N, p.J)
    report = Report(cfg, tolerance=conf.degeneracyTolerance, precision=PRECISION_STANDARD)
    report.setSection("criticalFields", list(diagram.criticalFields))
    report.setSection("intervals", [{
        "r": interval.r,
        "lower": interval.lower,
        "upper": interval.upper,
        "D": interval.dCoefficient,
        "slope": interval.slope,
        "regime": interval.regime,
    } for interval in diagram.intervals])
    report.setSection("slopeJumps", diagram.slopeJumps())
    report.setSection("criticalFieldGaps", {
        "gaps": list(gaps),
        "maxGap": max(gaps) if gaps else None,
    })

    default = [p.J*(k + 0.5)/PLOT_CELLS for k in range(PLOT_CELLS)]
    report.setColumns(["B", "E_min", "dE/dB", "r"])
    for B in _fieldGrid(cfg, p, default=default):
        pB = p.withField(B)
        energy, _ = groundEnergy(pB)
        try:
            r = groundSector(pB)
            slope = -(p.N - 2*r)
        except DegenerateError:
            r = None
            slope = None
        report.addRow({"B": B, "E_min": energy, "dE/dB": slope, "r": r})

    return report


def cmdState(cfg):
    """Amplitudes of a single sector state."""
    r = cfg.sectorList()[0]
    state = buildState(cfg.N, r)

    report = Report(cfg, tolerance=NORM_TOLERANCE, precision=PRECISION_STANDARD)
    report.setSection("state", state.toJson())
    report.setColumns(["N", "r", "sites", "amplitude", "normalized"])
    for subset, amp, norm in zip(state.subsets, state.amplitudes, state.normalized()):
        report.addRow({
            "N": state.N,
            "r": state.r,
            "sites": " ".join(str(int(k)) for k in subset),
            "amplitude": float(amp),
            "normalized": float(norm),
        })

    return report


def cmdSchmidt(cfg):
    """Block Schmidt ranks of the requested sectors across the cut.

    Exits with the unreliable code if any block rank is unreliable and
    the user did not allow it.
    """
    tol = cfg.rankTolerance
    with _workPool(cfg) as pool:
        reports = pool.map(
            lambda r: schmidtRank(cfg.N, r, M=cfg.cut, tol=tol, precision=cfg.precision),
            cfg.sectorList(),
        )

    report = Report(cfg, tolerance=tol, precision=cfg.precision)
    report.setSection("reports", [rank.toJson() for rank in reports])
    report.setColumns([
        "N", "M", "r", "l", "rank", "rows", "cols", "smallestRetained", "largestDiscarded",
        "gap", "reliable", "totalRank",
    ])
    for rank in reports:
        for block in rank.blocks:
            report.addRow({
                "N": rank.N,
                "M": rank.M,
                "r": rank.r,
                "l": block.l,
                "rank": block.rank,
                "rows": block.rows,
                "cols": block.cols,
                "smallestRetained": block.smallestRetained,
                "largestDiscarded": block.largestDiscarded,
                "gap": block.gap,
                "reliable": block.reliable,
                "totalRank": rank.totalRank,
                "tolerance": block.tolerance,
                "precision": block.precision,
            })

    _checkReliable(cfg, report, [rank.reliable for rank in reports])

    return report


def cmdClassify(cfg):
    """The witness verdict at every critical field."""
    tol = cfg.rankTolerance
    with _workPool(cfg) as pool:
        transitions = classifyTransitions(
            cfg.N, cfg.J, M=cfg.cut, tol=tol, precision=cfg.precision, mapper=pool.map
        )

    report = Report(cfg, tolerance=tol, precision=cfg.precision)
    report.setColumns(["r", "field", "rankAbove", "rankBelow", "verdict", "M", "reliable"])
    entries = []
    for item in transitions:
        verdict = item["verdict"]
        entries.append({
            "r": item["r"],
            "field": item["field"],
            "verdict": verdict.toJson(),
            "reportAbove": item["reportAbove"].toJson(),
            "reportBelow": item["reportBelow"].toJson(),
        })
        report.addRow({
            "r": item["r"],
            "field": item["field"],
            "rankAbove": verdict.rankA,
            "rankBelow": verdict.rankB,
            "verdict": verdict.verdict,
            "M": verdict.M,
            "reliable": verdict.reliable,
            "precision": _precisionUsed(item["reportAbove"], item["reportBelow"]),
        })
    report.setSection("transitions", entries)

    _checkReliable(cfg, report, [item["verdict"].reliable for item in transitions])

    return report


def cmdVerify(cfg):
    """Cross-check the closed forms against the spin Hamiltonian.

    Runs the crossing, normalisation, energy, ground sector, overlap,
    rank and recurrence checks and reports one row per case. The exit
    code is the verify failure code if any case fails.
    """
    conf = xxchain.CONFIG
    if cfg.N > conf.maxOracleSites:
        raise CapacityError(
            "The oracle is limited to N <= %d, got N=%d" % (conf.maxOracleSites, cfg.N)
        )

    p = ChainParams(cfg.N, cfg.J)
    diagram = phaseDiagram(p)
    sectors = list(range(p.halfN + 1))
    tol = cfg.rankTolerance

    if cfg.autoGrid or (cfg.fieldRange is None and cfg.B is None):
        fields = [B for interval in diagram.intervals for B in interval.samples(3)]
    else:
        fields = _fieldGrid(cfg, p)

    report = Report(cfg, tolerance=tol, precision=cfg.precision)
    report.setColumns(["check", "case", "value", "threshold", "passed"])

    # Crossings
    for r, field in enumerate(diagram.criticalFields):
        pB = p.withField(field)
        upper = sectorEnergy(pB, r)
        lower = sectorEnergy(pB, r + 1)
        value = abs(upper - lower)/max(1.0, abs(upper))
        _addCheck(report, "crossing", "r=%d" % r, value, CROSSING_TOLERANCE)

    with _workPool(cfg) as pool:

        states = pool.map(lambda r: buildState(p.N, r), sectors)
        for state in states:
            value = abs(float(np.sum(state.normalized()**2)) - 1.0)
            _addCheck(report, "normalization", "r=%d" % state.r, value, NORM_TOLERANCE)

        # Energies on the sample grid
        cases = [(B, r) for B in fields for r in sectors]
        results = pool.map(
            lambda case: groundOfBlock(buildBlockHamiltonian(p.withField(case[0]), case[1])),
            cases,
        )
        energies = {}
        for (B, r), result in zip(cases, results):
            exact = sectorEnergy(p.withField(B), r)
            energies[(B, r)] = result.groundEnergy
            value = abs(result.groundEnergy - exact)/max(1.0, abs(exact))
            _addCheck(report, "energy", "B=%.12g r=%d" % (B, r), value, ENERGY_TOLERANCE)

        for B in fields:
            try:
                expected = groundSector(p.withField(B))
            except DegenerateError:
                logger.info("Skipping ground sector check at crossing B=%.12g", B)
                continue
            found = int(np.argmin([energies[(B, r)] for r in sectors]))
            _addCheck(
                report, "groundSector", "B=%.12g" % B, abs(found - expected), 0, strict=False
            )

        # Overlaps inside each sector's own interval
        midpoints = diagram.intervalMidpoints()
        numerics = pool.map(
            lambda r: groundOfBlock(buildBlockHamiltonian(p.withField(midpoints[r]), r)),
            sectors,
        )
        for state, numeric in zip(states, numerics):
            if numeric.degenerate:
                logger.info("Skipping overlap check of degenerate block r=%d", state.r)
                continue
            value = 1.0 - overlap(state, numeric)
            _addCheck(report, "overlap", "r=%d" % state.r, value, OVERLAP_TOLERANCE)

        # Ranks across the cut
        ranks = pool.map(
            lambda r: schmidtRank(p.N, r, M=cfg.cut, tol=tol, precision=cfg.precision), sectors
        )
        dense = pool.map(lambda state: denseBipartitionRank(state, M=cfg.cut), states)

    for rank, denseRank in zip(ranks, dense):
        case = "M=%d r=%d" % (rank.M, rank.r)
        used = rank.precisionUsed
        _addCheck(
            report, "denseRank", case, abs(rank.totalRank - denseRank), 0, strict=False,
            precision=used,
        )
        law = [binomial(rank.r, block.l) for block in rank.blocks]
        if rank.expectedRank is not None:
            misses = sum(abs(a - b) for a, b in zip(rank.blockRanks, law))
            misses += abs(rank.totalRank - rank.expectedRank)
            _addCheck(report, "rankLaw", case, misses, 0, strict=False, precision=used)

    if cfg.cut >= 3:
        recurrence = rowRecurrenceCheck(p.N, M=cfg.cut, threshold=RECURRENCE_THRESHOLD)
        _addCheck(
            report, "recurrence", "M=%d" % recurrence.M, recurrence.maxResidual,
            RECURRENCE_THRESHOLD,
        )

    failed = [row for row in report.rows if not row["passed"]]
    report.setSection("summary", {
        "checks": len(report.rows),
        "passed": len(report.rows) - len(failed),
        "failed": len(failed),
    })
    for row in failed:
        logger.error(
            "Check '%s' failed for %s: %.3g above %.3g",
            row["check"], row["case"], row["value"], row["threshold"]
        )
    _checkReliable(cfg, report, [rank.reliable for rank in ranks])
    if failed:
        report.exitCode = EXIT_VERIFY
    else:
        logger.info("All %d checks passed for N=%d", len(report.rows), p.N)

    return report


COMMANDS = {
    "energy": cmdEnergy,
    "phase_diagram": cmdPhaseDiagram,
    "state": cmdState,
    "schmidt": cmdSchmidt,
    "classify": cmdClassify,
    "verify": cmdVerify,
}


##
#  Internal Functions
##

def _workPool(cfg):
    """A thread pool sized by the run config or the config file."""
    threads = cfg.threads or xxchain.CONFIG.threadCount()
    logger.debug("Using a pool of %d threads", threads)
    return ThreadPool(processes=threads)


def _fieldGrid(cfg, p, default=None):
    """The fields requested by the run config.

    Automatic grids take precedence over ranges, and ranges over a
    single field.
    """
    if cfg.autoGrid:
        return list(phaseDiagram(p).intervalMidpoints())
    if cfg.fieldRange is not None:
        start, stop, steps = cfg.fieldRange
        return [float(B) for B in np.linspace(start, stop, steps)]
    if cfg.B is not None:
        return [cfg.B]
    return default


def _checkReliable(cfg, report, flags):
    """Set the unreliable exit code unless allowed."""
    if all(flags):
        return
    if cfg.allowUnreliable:
        logger.warning("Some ranks are unreliable, reported as measured")
        return
    logger.error("Some ranks are unreliable, use --allow-unreliable to accept them")
    report.exitCode = EXIT_UNRELIABLE
    return


def _addCheck(report, check, case, value, threshold, strict=True, precision=None):
    """Add a verify row. Strict checks pass below the threshold, the
    others at or below it. Rank rows carry the precision the ranks
    were measured with.
    """
    value = float(value)
    if math.isnan(value):
        passed = False
    elif strict:
        passed = value < threshold
    else:
        passed = value <= threshold
    row = {
        "check": check, "case": case, "value": value, "threshold": threshold, "passed": passed,
    }
    if precision is not None:
        row["precision"] = precision
    report.addRow(row)
    return


def _precisionUsed(*reports):
    """The extended mode if any of the rank reports needed it."""
    if any(rank.precisionUsed == PRECISION_EXTENDED for rank in reports):
        return PRECISION_EXTENDED
    return PRECISION_STANDARD

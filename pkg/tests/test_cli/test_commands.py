"""
XX Chain : Command Tests
========================

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

import os
import math

import pytest

from tools import readFile, readJson, writeFile

from xxchain import EXIT_INVALID, EXIT_OK, EXIT_UNRELIABLE, EXIT_VERIFY
from xxchain.common import ConvergenceError
from xxchain.cli import runCommand


@pytest.mark.cli
def testCliCommands_Energy(tmpConf, runJson):
    """Test the energy command."""
    status, data = runJson("energy", ["-N", "8", "-B", "0.6", "-r", "0..4"])
    assert status == EXIT_OK
    assert data["schemaVersion"] == 1
    assert data["command"] == "energy"
    assert data["parameters"]["N"] == 8
    assert data["numerics"]["precision"] == "standard"
    assert data["numerics"]["tolerance"] == tmpConf.degeneracyTolerance
    assert len(data["rows"]) == 5
    assert data["rows"][0]["energy"] == pytest.approx(-4.8)
    assert data["rows"][1]["energy"] == pytest.approx(-4.6)
    assert data["rows"][0]["isGround"] is True
    assert all(row["precision"] == "standard" for row in data["rows"])

    status, data = runJson("energy", ["-N", "4", "-B", "0", "-r", "2"])
    assert status == EXIT_OK
    assert data["rows"][0]["energy"] == pytest.approx(-math.sqrt(2.0), rel=1e-14)

    # Invalid sector
    status, data = runJson("energy", ["-N", "8", "-r", "5"])
    assert status == EXIT_INVALID
    assert data is None

    # Automatic grid, one field per phase interval
    status, data = runJson("energy", ["-N", "8", "--auto-grid"])
    assert status == EXIT_OK
    assert len(data["rows"]) == 25
    grounds = [row["r"] for row in data["rows"] if row["isGround"]]
    assert grounds == [0, 1, 2, 3, 4]

    # Field range
    status, data = runJson("energy", ["-N", "6", "--field-range", "0:1:3", "-r", "0"])
    assert [row["B"] for row in data["rows"]] == [0.0, 0.5, 1.0]
    assert data["rows"][1]["isGround"] is True

# END Test testCliCommands_Energy


@pytest.mark.cli
def testCliCommands_PhaseDiagram(tmpConf, runJson, capsys):
    """Test the phase diagram command."""
    status, data = runJson("phase_diagram", ["-N", "2"])
    assert status == EXIT_OK
    assert data["criticalFields"] == [0.5]
    assert [item["r"] for item in data["intervals"]] == [0, 1]
    assert data["intervals"][0]["upper"] is None
    assert data["slopeJumps"][0]["jump"] == 2

    status, data = runJson("phase_diagram", ["-N", "8"])
    fields = data["criticalFields"]
    assert len(fields) == 4
    assert fields[0] == 0.5
    assert all(a > b for a, b in zip(fields, fields[1:]))
    assert [jump["jump"] for jump in data["slopeJumps"]] == [2, 2, 2, 2]
    assert len(data["rows"]) == 200
    assert data["rows"][-1]["r"] == 0
    assert data["rows"][0]["r"] == 4
    assert data["rows"][0]["dE/dB"] == 0

    status, data = runJson("phase_diagram", ["-N", "5"])
    assert len(data["criticalFields"]) == 2
    assert len(data["criticalFieldGaps"]["gaps"]) == 2

    # A query on the crossing has no sector
    status, data = runJson("phase_diagram", ["-N", "4", "-B", "0.5"])
    assert status == EXIT_OK
    assert data["rows"][0]["r"] is None
    assert data["rows"][0]["dE/dB"] is None
    assert data["rows"][0]["E_min"] == pytest.approx(-2.0)

    # Plot ready CSV
    status = runCommand("phase_diagram", ["-N", "8", "-f", "csv"])
    lines = capsys.readouterr().out.split("\n")
    assert status == EXIT_OK
    assert lines[0] == "B,E_min,dE/dB,r,tolerance,precision"
    assert len(lines) == 202
    assert lines[-1] == ""

    # A crossing on the grid leaves the integer columns as integers
    status = runCommand("phase_diagram", ["-N", "4", "--field-range", "0:1:5", "-f", "csv"])
    lines = capsys.readouterr().out.split("\n")
    assert status == EXIT_OK
    assert lines[1].startswith("0.0,-1.4142135623730951,0,2,")
    assert lines[3].startswith("0.5,-2.0,,,")
    assert lines[5].startswith("1.0,-4.0,-4,0,")

# END Test testCliCommands_PhaseDiagram


@pytest.mark.cli
def testCliCommands_State(tmpConf, runJson, capsys, fncDir):
    """Test the state command."""
    status, data = runJson("state", ["-N", "4", "-r", "2"])
    assert status == EXIT_OK
    assert data["state"]["N"] == 4
    assert len(data["state"]["entries"]) == 6
    assert sum(row["normalized"]**2 for row in data["rows"]) == pytest.approx(1.0)
    assert data["rows"][0]["sites"] == "1 2"
    assert data["numerics"]["tolerance"] == 1e-10
    assert all(row["tolerance"] == 1e-10 for row in data["rows"])

    outFile = os.path.join(fncDir, "state.csv")
    status = runCommand("state", ["-N", "3", "-r", "1", "-f", "csv", "-o", outFile])
    assert status == EXIT_OK
    assert capsys.readouterr().out == ""
    lines = readFile(outFile).splitlines()
    assert lines[0] == "N,r,sites,amplitude,normalized,tolerance,precision"
    assert lines[1].startswith("3,1,1,1.0,0.57735026918962")
    assert len(lines) == 4

# END Test testCliCommands_State


@pytest.mark.cli
def testCliCommands_Schmidt(tmpConf, runJson):
    """Test the Schmidt rank command."""
    status, data = runJson("schmidt", ["-N", "10", "-M", "5", "-r", "3"])
    assert status == EXIT_OK
    report = data["reports"][0]
    assert report["totalRank"] == 8
    assert [block["rank"] for block in report["blocks"]] == [1, 3, 3, 1]
    assert all("gap" in block for block in report["blocks"])
    assert len(data["rows"]) == 4
    assert data["numerics"]["tolerance"] == 1e-10

    status, data = runJson("schmidt", ["-N", "6", "-M", "3", "-r", "0"])
    assert data["reports"][0]["totalRank"] == 1

    status, data = runJson("schmidt", ["-N", "12", "-M", "6", "-r", "4"])
    assert data["reports"][0]["totalRank"] == 16

    # Default sweep over all sectors, in order
    status, data = runJson("schmidt", ["-N", "8", "--threads", "3"])
    assert [report["r"] for report in data["reports"]] == [0, 1, 2, 3, 4]
    assert [report["totalRank"] for report in data["reports"]] == [1, 2, 4, 8, 16]

# END Test testCliCommands_Schmidt


@pytest.mark.cli
def testCliCommands_Unreliable(tmpConf, runJson, fncDir):
    """Unreliable ranks give their own exit code unless allowed."""
    confFile = os.path.join(fncDir, "config.yaml")
    writeFile(confFile, "numerics:\n  minGap: 1.0e+300\n")

    status, data = runJson("schmidt", ["-N", "4", "-r", "1", "--config", confFile])
    assert status == EXIT_UNRELIABLE
    assert data["reports"][0]["reliable"] is False
    assert data["reports"][0]["totalRank"] == 2

    assert all(row["precision"] == "extended" for row in data["rows"])
    assert all(row["tolerance"] == pytest.approx(1e-40) for row in data["rows"])

    status, data = runJson(
        "schmidt", ["-N", "4", "-r", "1", "--config", confFile, "--allow-unreliable"]
    )
    assert status == EXIT_OK

    # Verification counts unreliable ranks even when every check passes
    status, data = runJson("verify", ["-N", "4", "--config", confFile])
    assert status == EXIT_UNRELIABLE
    assert data["summary"]["failed"] == 0
    rankRows = [row for row in data["rows"] if row["check"] in ("denseRank", "rankLaw")]
    assert rankRows
    assert all(row["precision"] == "extended" for row in rankRows)

    status, data = runJson("verify", ["-N", "4", "--config", confFile, "--allow-unreliable"])
    assert status == EXIT_OK

    status, data = runJson("classify", ["-N", "4", "--config", confFile])
    assert status == EXIT_UNRELIABLE
    assert all(row["precision"] == "extended" for row in data["rows"])

    # Missing config file
    status, data = runJson("schmidt", ["-N", "4", "--config", "no_such_file.yaml"])
    assert status == EXIT_INVALID
    assert data is None

# END Test testCliCommands_Unreliable


@pytest.mark.cli
def testCliCommands_Classify(tmpConf, runJson):
    """Test the classification command."""
    status, data = runJson("classify", ["-N", "8"])
    assert status == EXIT_OK
    pairs = [(row["rankAbove"], row["rankBelow"]) for row in data["rows"]]
    assert pairs == [(1, 2), (2, 4), (4, 8), (8, 16)]
    assert all(row["verdict"] == "INEQUIVALENT" for row in data["rows"])
    assert data["rows"][0]["field"] == 0.5
    assert len(data["transitions"]) == 4
    assert data["transitions"][3]["reportBelow"]["r"] == 4

    status, data = runJson("classify", ["-N", "2"])
    assert [(row["rankAbove"], row["rankBelow"]) for row in data["rows"]] == [(1, 2)]

    status, data = runJson("classify", ["-N", "5"])
    assert [(row["rankAbove"], row["rankBelow"]) for row in data["rows"]] == [(1, 2), (2, 4)]

# END Test testCliCommands_Classify


@pytest.mark.cli
@pytest.mark.oracle
def testCliCommands_Verify(tmpConf, runJson):
    """Test the verification command."""
    status, data = runJson("verify", ["-N", "8"])
    assert status == EXIT_OK
    assert data["summary"]["failed"] == 0
    assert data["summary"]["passed"] == data["summary"]["checks"]
    checks = {row["check"] for row in data["rows"]}
    assert checks == {
        "crossing", "normalization", "energy", "groundSector", "overlap", "denseRank",
        "rankLaw", "recurrence",
    }
    assert len([row for row in data["rows"] if row["check"] == "energy"]) == 75

    # Above the oracle limit
    status, data = runJson("verify", ["-N", "30"])
    assert status == EXIT_INVALID
    assert data is None

    # A tolerance that wipes out the ranks
    status, data = runJson("verify", ["-N", "6", "--tol", "0.9"])
    assert status == EXIT_VERIFY
    failed = [row for row in data["rows"] if not row["passed"]]
    assert failed
    assert {row["check"] for row in failed} <= {"denseRank", "rankLaw"}
    assert data["summary"]["failed"] == len(failed)

# END Test testCliCommands_Verify


@pytest.mark.cli
@pytest.mark.oracle
@pytest.mark.slow
def testCliCommands_VerifyTolerance(tmpConf, runJson):
    """A loose tolerance leaves the sector r=5 rank unreliable."""
    status, data = runJson("verify", ["-N", "10", "--tol", "1e-2"])
    assert status == EXIT_UNRELIABLE
    assert data["numerics"]["tolerance"] == 1e-2
    assert data["summary"]["failed"] == 0
    rows = [row for row in data["rows"] if row["check"] == "denseRank"]
    assert rows[5]["case"] == "M=5 r=5"
    assert rows[5]["precision"] == "extended"

    status, data = runJson("verify", ["-N", "10", "--tol", "1e-2", "--allow-unreliable"])
    assert status == EXIT_OK

# END Test testCliCommands_VerifyTolerance


@pytest.mark.cli
def testCliCommands_Deterministic(tmpConf, capsys, fncDir):
    """Identical runs give identical reports."""
    args = ["-N", "7", "--auto-grid", "-f", "csv"]
    assert runCommand("energy", args) == EXIT_OK
    first = capsys.readouterr().out
    assert runCommand("energy", args + ["--threads", "4"]) == EXIT_OK
    assert capsys.readouterr().out == first

    outA = os.path.join(fncDir, "a.json")
    outB = os.path.join(fncDir, "b.json")
    assert runCommand("classify", ["-N", "6", "-o", outA, "--threads", "1"]) == EXIT_OK
    assert runCommand("classify", ["-N", "6", "-o", outB, "--threads", "3"]) == EXIT_OK
    assert readFile(outA) == readFile(outB)
    assert readJson(outA)["command"] == "classify"

    # Files hold the same text as stdout
    assert runCommand("classify", ["-N", "6"]) == EXIT_OK
    assert capsys.readouterr().out == readFile(outA)

# END Test testCliCommands_Deterministic


@pytest.mark.cli
def testCliCommands_Errors(tmpConf, capsys, fncDir, monkeypatch):
    """Test the mapping of errors to exit codes."""
    assert runCommand("nonsense", []) == EXIT_INVALID
    assert runCommand("energy", ["--bogus"]) == EXIT_INVALID
    assert runCommand("energy", ["-h"]) == EXIT_OK
    capsys.readouterr()

    # Capacity
    tmpConf.maxStateEntries = 10
    assert runCommand("state", ["-N", "10", "-r", "3"]) == EXIT_INVALID
    assert capsys.readouterr().out == ""

    # Unwritable output
    outFile = os.path.join(fncDir, "no_such_folder", "out.json")
    assert runCommand("energy", ["-N", "4", "-o", outFile]) == EXIT_INVALID
    outFile = os.path.join(fncDir, "no_such_folder", "out.csv")
    assert runCommand("energy", ["-N", "4", "-f", "csv", "-o", outFile]) == EXIT_INVALID
    assert not os.path.exists(outFile)

    # Solver failure
    def noConvergence(*args, **kwargs):
        raise ConvergenceError("Stuck", 1.0)

    monkeypatch.setattr("xxchain.cli.commands.groundOfBlock", noConvergence)
    assert runCommand("verify", ["-N", "4"]) == EXIT_VERIFY

# END Test testCliCommands_Errors

"""
XX Chain : Run Config
=====================

Command line parsing and validation for all commands. Every numeric
parameter is checked against the preconditions of the model functions
before a command is dispatched.

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

import getopt
import logging

from dataclasses import dataclass

import xxchain

from xxchain.common import ValidationError, checkFloat, checkInt, checkTolerance
from xxchain.model.entanglement import PRECISION_MODES, PRECISION_STANDARD

logger = logging.getLogger(__name__)

FORMAT_JSON = "json"
FORMAT_CSV = "csv"
OUTPUT_FORMATS = (FORMAT_JSON, FORMAT_CSV)

# Valid Input Options
SHORT_OPT = "hN:J:B:M:r:t:p:f:o:"
LONG_OPT = [
    "help",
    "sites=",
    "coupling=",
    "field=",
    "field-range=",
    "auto-grid",
    "cut=",
    "sectors=",
    "tol=",
    "precision=",
    "format=",
    "output=",
    "allow-unreliable",
    "threads=",
    "config=",
]

HELP_MSG = (
    "Usage: ./xxtool.py {command} [options]\n"
    " -h, --help              Print this message.\n"
    " -N, --sites N           Number of sites, at least 2. Required.\n"
    " -J, --coupling J        Exchange constant, larger than 0. Default 1.\n"
    " -B, --field B           External field, at least 0. Default 0.\n"
    "     --field-range A:B:S Sweep S fields from A to B.\n"
    "     --auto-grid         Sample the midpoint of every phase interval.\n"
    " -M, --cut M             Sites left of the cut. Default N//2.\n"
    " -r, --sectors R         Sector, list or range: 2, 1,3 or 0..4.\n"
    " -t, --tol T             Relative rank tolerance in (0, 1).\n"
    " -p, --precision P       Rank precision, standard or extended.\n"
    " -f, --format F          Output format, json or csv. Default json.\n"
    " -o, --output PATH       Write the report to a file instead of stdout.\n"
    "     --allow-unreliable  Exit with 0 even if a rank is flagged unreliable.\n"
    "     --threads N         Size of the work pool.\n"
    "     --config PATH       Read settings from a yaml file.\n"
)


@dataclass(frozen=True)
class RunConfig:
    """All parameters of a single command run."""
    command: str
    N: int
    J: float = 1.0
    B: float = None
    fieldRange: tuple = None
    autoGrid: bool = False
    M: int = None
    sectors: tuple = None
    tolerance: float = None
    precision: str = PRECISION_STANDARD
    fmt: str = FORMAT_JSON
    output: str = None
    allowUnreliable: bool = False
    threads: int = None
    configFile: str = None

    @property
    def cut(self):
        """The left block size, defaulting to N//2."""
        return self.N//2 if self.M is None else self.M

    @property
    def rankTolerance(self):
        return xxchain.CONFIG.rankTolerance if self.tolerance is None else self.tolerance

    def sectorList(self):
        """The requested sectors, defaulting to the full ground state family."""
        if self.sectors is None:
            return tuple(range(self.N//2 + 1))
        return self.sectors

    def asJson(self):
        """The parameters that determine the report content."""
        return {
            "N": self.N,
            "J": self.J,
            "B": self.B,
            "fieldRange": list(self.fieldRange) if self.fieldRange else None,
            "autoGrid": self.autoGrid,
            "M": self.cut,
            "sectors": list(self.sectorList()),
        }

# END Class RunConfig


def parseRunConfig(command, sysArgs):
    """Parse and validate the options of a command.

    Parameters
    ----------
    command : str
        The command name.
    sysArgs : list of str
        The options following the command name.

    Returns
    -------
    RunConfig or None
        None if help was requested.

    Raises
    ------
    ValidationError
        On unknown options or invalid values.
    """
    try:
        inOpts, inRemain = getopt.getopt(sysArgs, SHORT_OPT, LONG_OPT)
    except getopt.GetoptError as exc:
        raise ValidationError(str(exc))

    if inRemain:
        raise ValidationError("Unexpected arguments: %s" % " ".join(inRemain))

    values = {"command": command}
    for inOpt, inArg in inOpts:
        if inOpt in ("-h", "--help"):
            print(HELP_MSG.format(command=command))
            return None
        elif inOpt in ("-N", "--sites"):
            values["N"] = _parseInt(inArg, "N")
        elif inOpt in ("-J", "--coupling"):
            values["J"] = _parseFloat(inArg, "J")
        elif inOpt in ("-B", "--field"):
            values["B"] = _parseFloat(inArg, "B")
        elif inOpt == "--field-range":
            values["fieldRange"] = _parseFieldRange(inArg)
        elif inOpt == "--auto-grid":
            values["autoGrid"] = True
        elif inOpt in ("-M", "--cut"):
            values["M"] = _parseInt(inArg, "M")
        elif inOpt in ("-r", "--sectors"):
            values["sectors"] = _parseSectors(inArg)
        elif inOpt in ("-t", "--tol"):
            values["tolerance"] = _parseFloat(inArg, "tolerance")
        elif inOpt in ("-p", "--precision"):
            values["precision"] = inArg
        elif inOpt in ("-f", "--format"):
            values["fmt"] = inArg
        elif inOpt in ("-o", "--output"):
            values["output"] = inArg
        elif inOpt == "--allow-unreliable":
            values["allowUnreliable"] = True
        elif inOpt == "--threads":
            values["threads"] = _parseInt(inArg, "threads")
        elif inOpt == "--config":
            values["configFile"] = inArg

    if "N" not in values:
        raise ValidationError("The number of sites must be given with -N")

    cfg = RunConfig(**values)
    validateRunConfig(cfg)

    return cfg


def validateRunConfig(cfg):
    """Check a run config against the model preconditions.

    Raises
    ------
    ValidationError
        On the first invalid value.
    """
    N = checkInt(cfg.N, "N", lower=2)
    checkFloat(cfg.J, "J", lower=0.0, strict=True)
    if cfg.B is not None:
        checkFloat(cfg.B, "B", lower=0.0)
    if cfg.fieldRange is not None:
        start, stop, steps = cfg.fieldRange
        checkFloat(start, "field range start", lower=0.0)
        checkFloat(stop, "field range stop", lower=0.0)
        checkInt(steps, "field range steps", lower=1)
    if cfg.M is not None:
        checkInt(cfg.M, "M", lower=1, upper=N - 1)
    for r in cfg.sectorList():
        checkInt(r, "r", lower=0, upper=N//2)
    if cfg.tolerance is not None:
        checkTolerance(cfg.tolerance)
    if cfg.precision not in PRECISION_MODES:
        raise ValidationError(
            "Precision must be one of %s, got '%s'" % (", ".join(PRECISION_MODES), cfg.precision)
        )
    if cfg.fmt not in OUTPUT_FORMATS:
        raise ValidationError(
            "Format must be one of %s, got '%s'" % (", ".join(OUTPUT_FORMATS), cfg.fmt)
        )
    if cfg.threads is not None:
        checkInt(cfg.threads, "threads", lower=1)
    if cfg.command == "state" and len(cfg.sectorList()) != 1:
        raise ValidationError("The state command takes exactly one sector")

    return True


##
#  Internal Functions
##

def _parseInt(value, name):
    try:
        return int(value)
    except ValueError:
        raise ValidationError("Value '%s' must be an integer, got '%s'" % (name, value))


def _parseFloat(value, name):
    try:
        return float(value)
    except ValueError:
        raise ValidationError("Value '%s' must be a number, got '%s'" % (name, value))


def _parseFieldRange(value):
    """Parse 'start:stop:steps'."""
    parts = value.split(":")
    if len(parts) != 3:
        raise ValidationError("Field range must be start:stop:steps, got '%s'" % value)
    return (
        _parseFloat(parts[0], "field range start"),
        _parseFloat(parts[1], "field range stop"),
        _parseInt(parts[2], "field range steps"),
    )


def _parseSectors(value):
    """Parse '2', '1,3' or '0..4' into a tuple of ints."""
    if ".." in value:
        first, _, last = value.partition("..")
        first = _parseInt(first, "r")
        last = _parseInt(last, "r")
        if last < first:
            raise ValidationError("Empty sector range '%s'" % value)
        return tuple(range(first, last + 1))
    return tuple(_parseInt(part, "r") for part in value.split(","))

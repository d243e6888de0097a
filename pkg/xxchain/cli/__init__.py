"""
XX Chain : Command Line
=======================

Dispatch of the command line commands and mapping of errors to exit
codes.

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
import logging

import xxchain

from xxchain import EXIT_INVALID, EXIT_OK, EXIT_VERIFY
from xxchain.common import (
    CapacityError, ConvergenceError, DegenerateError, ValidationError, logException
)
from xxchain.cli.runconfig import RunConfig, parseRunConfig
from xxchain.cli.commands import (
    COMMANDS, cmdClassify, cmdEnergy, cmdPhaseDiagram, cmdSchmidt, cmdState, cmdVerify
)

logger = logging.getLogger(__name__)

__all__ = [
    "COMMANDS",
    "RunConfig",
    "cmdClassify",
    "cmdEnergy",
    "cmdPhaseDiagram",
    "cmdSchmidt",
    "cmdState",
    "cmdVerify",
    "parseRunConfig",
    "runCommand",
]


def runCommand(command, sysArgs):
    """Parse, run and emit a command.

    Parameters
    ----------
    command : str
        A key of COMMANDS.
    sysArgs : list of str
        The command options.

    Returns
    -------
    int
        The exit code.
    """
    if command not in COMMANDS:
        logger.error("Unknown command '%s'", command)
        return EXIT_INVALID

    try:
        cfg = parseRunConfig(command, sysArgs)
    except ValidationError:
        logException()
        logger.error("Run './xxtool.py %s --help' for the list of options", command)
        return EXIT_INVALID

    if cfg is None:
        return EXIT_OK

    if not loadConfig(cfg.configFile):
        return EXIT_INVALID

    try:
        report = COMMANDS[command](cfg)
    except (ValidationError, DegenerateError, CapacityError):
        logException()
        return EXIT_INVALID
    except ConvergenceError:
        logException()
        return EXIT_VERIFY

    if not report.emit(cfg.fmt, cfg.output):
        return EXIT_INVALID

    return report.exitCode


def loadConfig(configFile=None):
    """Load settings for a run.

    An explicit file must exist and be valid. Without one, the package
    root config.yaml is read if present, and the built-in defaults are
    used otherwise.

    Returns
    -------
    bool
        True if the settings are usable, False otherwise.
    """
    conf = xxchain.CONFIG
    if configFile is not None:
        return conf.readConfig(configFile)

    defaultFile = os.path.join(conf.pkgRoot, "config.yaml")
    if os.path.isfile(defaultFile):
        return conf.readConfig(defaultFile)

    logger.debug("No config file found, using defaults")
    return True

"""
XX Chain : Report
=================

The report object collects the result of a command and writes it as
JSON or CSV, either to stdout or to a file.

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

import sys
import logging

import xxchain

from xxchain import EXIT_OK
from xxchain.common import dumpCsv, dumpJson, logException, safeWriteCsv, safeWriteJson
from xxchain.cli.runconfig import FORMAT_CSV

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1


class Report():
    """A command result.

    The JSON form holds the run parameters, the numerics settings and
    the command sections. The CSV form holds the rows only, each row
    carrying the tolerance and precision it was computed with.
    """

    def __init__(self, cfg, tolerance, precision):

        self._cfg = cfg
        self._tolerance = tolerance
        self._precision = precision
        self._sections = {}
        self._rows = []
        self._columns = None

        self.exitCode = EXIT_OK

        return

    ##
    #  Properties
    ##

    @property
    def rows(self):
        return self._rows

    @property
    def sections(self):
        return self._sections

    ##
    #  Methods
    ##

    def setSection(self, name, value):
        """Add or replace a named section of the JSON output."""
        self._sections[name] = value
        return

    def setColumns(self, columns):
        """Fix the CSV column order. Tolerance and precision are
        appended automatically.
        """
        self._columns = list(columns) + ["tolerance", "precision"]
        return

    def addRow(self, row):
        """Add a table row. Rows without their own tolerance and
        precision get the report values.
        """
        entry = dict(row)
        entry.setdefault("tolerance", self._tolerance)
        entry.setdefault("precision", self._precision)
        self._rows.append(entry)
        return

    def asJson(self):
        """Return the full report as a JSON-ready dict."""
        data = {
            "schemaVersion": REPORT_SCHEMA_VERSION,
            "command": self._cfg.command,
            "parameters": self._cfg.asJson(),
            "numerics": {
                "tolerance": self._tolerance,
                "precision": self._precision,
                "settings": xxchain.CONFIG.asDict(),
            },
        }
        data.update(self._sections)
        data["rows"] = self._rows
        return data

    def render(self, fmt):
        """Return the report as a string in the requested format."""
        if fmt == FORMAT_CSV:
            return dumpCsv(self._rows, columns=self._columns)
        return dumpJson(self.asJson())

    def emit(self, fmt, output=None):
        """Write the report to a file, or stdout if output is None.

        Returns
        -------
        bool
            True if successful, False otherwise.
        """
        if output is None:
            try:
                text = self.render(fmt)
            except Exception:
                logger.error("Could not serialise the %s report", self._cfg.command)
                logException()
                return False
            sys.stdout.write(text)
            sys.stdout.flush()
            return True

        if fmt == FORMAT_CSV:
            written = safeWriteCsv(output, self._rows, columns=self._columns)
        else:
            written = safeWriteJson(output, self.asJson())

        if written:
            logger.info("Wrote %s report to: %s", fmt, output)
            return True

        return False

# END Class Report

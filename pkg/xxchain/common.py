"""
XX Chain : Common Functions
===========================

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
import math
import json
import logging
import numbers

import pandas as pd

logger = logging.getLogger(__name__)


##
#  Exceptions
##

class XXChainError(Exception):
    """Base class for all errors raised by the package."""


class ValidationError(XXChainError, ValueError):
    """A precondition on the input values is violated."""


class CapacityError(XXChainError):
    """A size cap would be exceeded."""


class DegenerateError(XXChainError):
    """A query coincides with a level crossing.

    Parameters
    ----------
    field : float
        The critical field the query coincides with.
    sectors : tuple of int
        The two degenerate sectors, (r, r+1).
    """

    def __init__(self, field, sectors):
        super().__init__(
            "Field %.17g coincides with the critical field between sectors %d and %d"
            % (field, sectors[0], sectors[1])
        )
        self.field = field
        self.sectors = tuple(sectors)


class ConvergenceError(XXChainError):
    """The iterative eigensolver did not converge.

    Parameters
    ----------
    residual : float
        The residual norm of the best available eigenpair.
    """

    def __init__(self, message, residual):
        super().__init__("%s (residual %.3e)" % (message, residual))
        self.residual = residual


##
#  Value Checks
##

def checkInt(value, name, lower=None, upper=None):
    """Check that a value is an integer within an inclusive range.

    Returns
    -------
    int
        The value as a Python int.

    Raises
    ------
    ValidationError
        If the value is not an integer or out of range.
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError("Value '%s' must be an integer, got %r" % (name, value))
    value = int(value)
    if lower is not None and value < lower:
        raise ValidationError("Value '%s' must be at least %d, got %d" % (name, lower, value))
    if upper is not None and value > upper:
        raise ValidationError("Value '%s' must be at most %d, got %d" % (name, upper, value))
    return value


def checkFloat(value, name, lower=None, strict=False):
    """Check that a value is a finite real number above a bound.

    Parameters
    ----------
    value : Any
        The value to check.
    name : str
        The value name for error messages.
    lower : float or None
        Lower bound.
    strict : bool
        If True, the lower bound itself is rejected.

    Returns
    -------
    float
        The value as a Python float.
    """
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError("Value '%s' must be a real number, got %r" % (name, value))
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError("Value '%s' must be finite, got %r" % (name, value))
    if lower is not None:
        if strict and not value > lower:
            raise ValidationError(
                "Value '%s' must be larger than %g, got %g" % (name, lower, value)
            )
        if not strict and not value >= lower:
            raise ValidationError("Value '%s' must be at least %g, got %g" % (name, lower, value))
    return value


def checkTolerance(value, name="tolerance"):
    """Check that a relative tolerance lies in the open interval (0, 1)."""
    value = checkFloat(value, name, lower=0.0, strict=True)
    if not value < 1.0:
        raise ValidationError("Value '%s' must be smaller than 1, got %g" % (name, value))
    return value


def binomial(n, k):
    """Exact binomial coefficient as a Python int."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def jsonSafe(value):
    """Recursively replace non-finite floats with None so that the
    data can be written as strict JSON.
    """
    if isinstance(value, dict):
        return {key: jsonSafe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonSafe(item) for item in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


##
#  File I/O
##

def safeWriteString(path, data):
    """Write data to file and log exceptions.

    Parameters
    ----------
    path : str
        Path to the file to be created.
    data : Any
        Data to be dumped.

    Returns
    -------
    bool
        True if successful, False otherwise.
    """
    try:
        with open(path, mode="w", encoding="utf-8", newline="\n") as outFile:
            outFile.write(str(data))
        return True
    except Exception:
        logger.error("Could not write to file: %s", path)
        logException()
        return False


def dumpJson(data):
    """Serialise report data to a deterministic JSON string."""
    return json.dumps(jsonSafe(data), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dumpCsv(rows, columns=None):
    """Serialise a list of row dicts to a CSV string.

    The output uses '.' as decimal mark and '\\n' as line terminator
    regardless of the platform and locale. Integer columns with empty
    cells are kept as integers.
    """
    rows = jsonSafe(list(rows))
    frame = pd.DataFrame(rows, columns=columns)
    for name in frame.columns:
        values = [row[name] for row in rows if row.get(name) is not None]
        if values and all(_isPlainInt(value) for value in values):
            frame[name] = frame[name].astype("Int64")
    return frame.to_csv(index=False, lineterminator="\n", float_format=None)


def safeWriteJson(path, data):
    """Write data to a json file and log exceptions.

    Parameters
    ----------
    path : str
        Path to the file to be created.
    data : list, dict, tuple
        Data to be dumped. Must be writeable as a JSON object or array.

    Returns
    -------
    bool
        True if successful, False otherwise.
    """
    try:
        string = dumpJson(data)
    except Exception:
        logger.error("Could not serialise data for file: %s", path)
        logException()
        return False
    return safeWriteString(path, string)


def safeWriteCsv(path, rows, columns=None):
    """Write a list of row dicts to a csv file and log exceptions.

    Returns
    -------
    bool
        True if successful, False otherwise.
    """
    try:
        string = dumpCsv(rows, columns=columns)
    except Exception:
        logger.error("Could not serialise data for file: %s", path)
        logException()
        return False
    return safeWriteString(path, string)


def logException():
    """Format and write the last exception to the logger object.

    Format and log the content of an exception message. Intended to be
    used in try/except structures to make the exception easier to read.
    """
    exType, exValue, _ = sys.exc_info()
    logger.error("%s: %s" % (exType.__name__, str(exValue)))


def _isPlainInt(value):
    return isinstance(value, int) and not isinstance(value, bool)

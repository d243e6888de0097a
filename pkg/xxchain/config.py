"""
XX Chain : Main Config
======================

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

import yaml

from xxchain.common import logException

logger = logging.getLogger(__name__)

# Setting name, type, lower bound, upper bound (exclusive bounds for floats)
NUMERIC_SETTINGS = {
    "rankTolerance":       (float, 0.0, 1.0),
    "minGap":              (float, 1.0, None),
    "degeneracyTolerance": (float, 0.0, 1.0),
    "extendedDigits":      (int, 32, None),
    "logAmplitudeOrder":   (int, 1, None),
    "equilibrationRounds": (int, 0, None),
}
LIMIT_SETTINGS = {
    "maxStateEntries": (int, 1, None),
    "maxBlockEntries": (int, 1, None),
    "maxDenseSites":   (int, 2, 25),
    "maxOracleSites":  (int, 2, 30),
    "maxOracleDim":    (int, 1, None),
    "denseEigenDim":   (int, 2, None),
}


class Config():
    """Main config class wrapping the config yaml file."""

    def __init__(self):

        # Internals
        self._pkgRoot = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
        self._rawConf = {}
        self._defaults = {}

        # Config Settings
        # ===============
        # These should only be set from file.

        # Numerics
        self.rankTolerance = 1e-10
        self.minGap = 1e3
        self.degeneracyTolerance = 1e-12
        self.extendedDigits = 64
        self.logAmplitudeOrder = 12
        self.equilibrationRounds = 2

        # Limits
        self.maxStateEntries = 2**26
        self.maxBlockEntries = 2**24
        self.maxDenseSites = 24
        self.maxOracleSites = 20
        self.maxOracleDim = 2**20
        self.denseEigenDim = 4096

        # Runtime
        self.threads = None

        for name in list(NUMERIC_SETTINGS) + list(LIMIT_SETTINGS) + ["threads"]:
            self._defaults[name] = getattr(self, name)

        return

    def readConfig(self, configFile=None):
        """Read the config file.

        Parameters
        ----------
        configFile : str or None, optional
            The config file to be loaded. If None, pkgRoot/config.yaml
            is attempted loaded instead.

        Returns
        -------
        bool
            True if successful, False if anything failed.
        """
        if configFile is None:
            configFile = os.path.join(self._pkgRoot, "config.yaml")

        if not os.path.isfile(configFile):
            logger.error("Config file not found: %s" % configFile)
            return False

        try:
            with open(configFile, mode="r", encoding="utf8") as inFile:
                self._rawConf = yaml.safe_load(inFile) or {}
            logger.debug("Read config from: %s" % configFile)
        except Exception:
            logger.error("Could not read file: %s" % configFile)
            logException()
            return False

        if not isinstance(self._rawConf, dict):
            logger.error("Config file must contain a mapping: %s" % configFile)
            self._rawConf = {}
            return False

        # Read Values
        self._readSection("numerics", NUMERIC_SETTINGS)
        self._readSection("limits", LIMIT_SETTINGS)
        self._readRuntimeSettings()

        valid = self._validateConfig()

        return valid

    @property
    def pkgRoot(self):
        return self._pkgRoot

    def resetConfig(self):
        """Restore all settings to their built-in defaults."""
        for name, value in self._defaults.items():
            setattr(self, name, value)
        self._rawConf = {}
        return

    def threadCount(self):
        """Return the work pool size.

        The environment variable XXCHAIN_THREADS takes precedence over
        the config file. Invalid values fall back to the CPU count.
        """
        wantThreads = os.environ.get("XXCHAIN_THREADS", self.threads)
        if wantThreads is None:
            return os.cpu_count() or 1
        try:
            value = int(wantThreads)
        except (TypeError, ValueError):
            logger.warning("Ignoring invalid thread count '%s'", str(wantThreads))
            return os.cpu_count() or 1
        return max(1, value)

    def asDict(self):
        """Return the numerics settings that influence report values."""
        return {name: getattr(self, name) for name in NUMERIC_SETTINGS}

    ##
    #  Internal Functions
    ##

    def _readSection(self, section, settings):
        """Read the config values under a section."""
        conf = self._rawConf.get(section, {}) or {}
        for name in settings:
            setattr(self, name, conf.get(name, getattr(self, name)))
        return

    def _readRuntimeSettings(self):
        """Read config values under 'runtime'."""
        conf = self._rawConf.get("runtime", {}) or {}

        self.threads = conf.get("threads", self.threads)

        return

    def _validateConfig(self):
        """Check config value types and ranges.

        This function should be called after all the read functions
        when all settings have been handled. Invalid values are reset
        to their defaults.

        Returns
        -------
        bool
            True if all settings passed check, False otherwise.
        """
        valid = True

        for settings in (NUMERIC_SETTINGS, LIMIT_SETTINGS):
            for name, (kind, lower, upper) in settings.items():
                if not self._checkValue(name, kind, lower, upper):
                    setattr(self, name, self._defaults[name])
                    valid = False

        if self.threads is not None:
            if not (isinstance(self.threads, int) and self.threads > 0):
                logger.error("Setting 'threads' must be a positive integer or null")
                self.threads = None
                valid = False

        return valid

    def _checkValue(self, name, kind, lower, upper):
        """Check that a setting has the right type and range.

        Parameters
        ----------
        name : str
            The setting name.
        kind : type
            Either int or float.
        lower, upper : int, float or None
            Range of accepted values. Float bounds are exclusive, int
            bounds are inclusive lower and exclusive upper.

        Returns
        -------
        bool
            True if the value is valid, False otherwise.
        """
        value = getattr(self, name)
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
            setattr(self, name, value)

        if isinstance(value, bool) or not isinstance(value, kind):
            logger.error("Setting '%s' must be of type %s" % (name, kind.__name__))
            return False

        if kind is float:
            inRange = value > lower and (upper is None or value < upper)
        else:
            inRange = value >= lower and (upper is None or value < upper)

        if not inRange:
            logger.error("Setting '%s' is out of range: %s" % (name, str(value)))
            return False

        return True

# END Class Config

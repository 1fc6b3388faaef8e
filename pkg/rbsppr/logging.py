#!/usr/bin/env python3
# This file is part of rbs-ppr, a toolkit for single-target Personalized
# PageRank queries.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3, as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
"""Logging helper functions."""
import logging
import sys

import colorlog

FORMAT_STRING = "%(log_color)s%(asctime)s [%(levelname)s] %(message)s"
PLAIN_FORMAT_STRING = "%(asctime)s [%(levelname)s] %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}
LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}


class Logger:
    """Helper class for logging.

    Query and build progress goes to stderr so that result files written to
    stdout stay clean.
    """

    def __init__(self, level=None, logfile=None):
        """Set up logging instance and set log level."""
        self.logger = colorlog.getLogger()
        self.set_level(level)
        if len(self.logger.handlers):
            return
        self.logger.addHandler(self._console_handler())
        if logfile:
            self.logger.addHandler(self._file_handler(logfile))

    @staticmethod
    def _console_handler():
        """Coloured handler on stderr."""
        handler = colorlog.StreamHandler(sys.stderr)
        handler.setFormatter(
            colorlog.TTYColoredFormatter(
                FORMAT_STRING,
                datefmt=DATE_FORMAT,
                log_colors=LOG_COLORS,
                stream=sys.stderr,
            )
        )
        return handler

    @staticmethod
    def _file_handler(logfile):
        """Plain handler appending to ``logfile``."""
        handler = logging.FileHandler(logfile)
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT_STRING, datefmt=DATE_FORMAT))
        return handler

    @staticmethod
    def fubar(msg, exit_code=1):
        """Exit and print to stderr because everything is FUBAR."""
        sys.stderr.write("E: %s\n" % (msg))
        sys.exit(exit_code)

    def set_level(self, level="info"):
        """Set the level to the provided level, unknown names mean info."""
        if not level:
            return False
        self.logger.setLevel(LEVELS.get(str(level).lower(), logging.INFO))
        return True

    def debug(self, message):
        """Log a message with debug loglevel."""
        self.logger.debug(message)

    def warn(self, message):
        """Log a message with warn loglevel."""
        self.logger.warning(message)

    def info(self, message):
        """Log a message with info loglevel."""
        self.logger.info(message)

    def error(self, message):
        """Log a message with error loglevel."""
        self.logger.error(message)

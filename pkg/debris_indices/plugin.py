#
#  Copyright (C) 2026 The debris-indices authors
#
#  This program is free software; you can redistribute it and/or
#  modify it under the terms of the GNU Lesser General Public
#  License as published by the Free Software Foundation; either
#  version 2 of the License, or (at your option) any later version.
#
#  This library is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#  Lesser General Public License for more details.
#
#  You should have received a copy of the GNU Lesser General Public
#  License along with this library. If not, see <http://www.gnu.org/licenses/>.

"""
Detector - Base detector class
==============================

Detectors turn the index maps of a scene into a class map. They are
plugins: a detector module defines a :class:`Detector` subclass and a
``setup()`` function returning it, and is registered under the
``debris_indices.detectors`` entry point group.

A detector module may ship a YAML file of the same basename holding its
default configuration under a ``config`` key. User configuration is
composited on top before :meth:`Detector.configure` is called.

Abstract Methods
----------------
For loading and configuration purposes, detectors must implement the
following:

* :func:`Detector.configure`
* :func:`Detector.preflight`
* :func:`Detector.get_unique_key`
* :func:`Detector.detect`
"""

import os
import sys

from ._config import composite, load_file, node_validate, node_get_member
from ._exceptions import ConfigError, ConfigErrorReason
from ._message import get_logger, timed_activity
from .classifier import POLARITIES, THRESHOLD_KEYS, classify_single


class Detector():
    """Base Detector class

    Args:
       kind (str): The kind the detector was loaded as
       config (dict): User configuration, composited over the defaults
    """

    # Index kinds the detector reads from an IndexSet
    INDICES = ()

    def __init__(self, kind, config=None):
        self.kind = kind
        self._logger = get_logger('detectors.{}'.format(kind))

        defaults = self._load_defaults()
        node = composite(defaults.get('config', {}), config)
        self.configure(node)
        self.preflight()

    def __str__(self):
        return '{} detector'.format(self.kind)

    #############################################################
    #                      Abstract Methods                     #
    #############################################################

    # configure()
    #
    # Read the composited configuration node
    #
    # Args:
    #    node (dict): The configuration
    #
    # Raises:
    #    (ConfigError): If the configuration is invalid
    #
    def configure(self, node):
        raise NotImplementedError("{} does not implement configure()".format(type(self).__name__))

    # preflight()
    #
    # Check anything the detector needs beyond its configuration
    #
    def preflight(self):
        raise NotImplementedError("{} does not implement preflight()".format(type(self).__name__))

    # get_unique_key()
    #
    # Returns:
    #    (dict): Everything which affects the output of the detector,
    #            recorded in run summaries
    #
    def get_unique_key(self):
        raise NotImplementedError("{} does not implement get_unique_key()".format(type(self).__name__))

    # detect()
    #
    # Args:
    #    indices (IndexSet): The index maps of the scene
    #    thresholds (ThresholdConfig): Thresholds resolved for the scene
    #
    # Returns:
    #    (ClassMap): The classification
    #
    def detect(self, indices, thresholds):
        raise NotImplementedError("{} does not implement detect()".format(type(self).__name__))

    #############################################################
    #                     Messaging Methods                     #
    #############################################################

    def info(self, brief, *, detail=None):
        self._message('info', brief, detail)

    def status(self, brief, *, detail=None):
        self._message('debug', brief, detail)

    def warn(self, brief, *, detail=None):
        self._message('warning', brief, detail)

    # timed_activity()
    #
    # Context manager logging the start, outcome and duration of
    # an activity of this detector.
    #
    def timed_activity(self, activity_name, *, detail=None, silent_nested=False):
        return timed_activity('{}: {}'.format(self, activity_name), detail=detail,
                              logger=self._logger, silent_nested=silent_nested)

    #############################################################
    #                     Private Methods                       #
    #############################################################

    def _message(self, level, brief, detail):
        text = '{}: {}'.format(self, brief)
        if detail:
            text = '{}\n\n{}'.format(text, detail)
        getattr(self._logger, level)(text)

    def _load_defaults(self):
        module = sys.modules[type(self).__module__]
        filename = getattr(module, '__file__', None)
        if filename is None:
            return {}
        defaults = os.path.splitext(filename)[0] + '.yaml'
        if not os.path.exists(defaults):
            return {}
        return load_file(defaults)


class SingleIndexDetector(Detector):
    """A detector thresholding a single index

    Configuration:

    * ``threshold``: the ThresholdConfig key of the threshold to apply
    * ``polarity``: ``above`` or ``below``, the side of the threshold
      which is debris
    """

    # The index kind, set by subclasses
    INDEX = None

    def configure(self, node):
        node_validate(node, ['threshold', 'polarity'], path=self.kind)
        self.threshold_key = node_get_member(node, str, 'threshold', path=self.kind)
        self.polarity = node_get_member(node, str, 'polarity', path=self.kind)

        if self.threshold_key not in THRESHOLD_KEYS:
            raise ConfigError("{}: Invalid threshold '{}'".format(self, self.threshold_key),
                              detail="Valid thresholds: {}".format(', '.join(THRESHOLD_KEYS)),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.polarity not in POLARITIES:
            raise ConfigError("{}: Invalid polarity '{}'".format(self, self.polarity),
                              detail="Valid polarities: {}".format(', '.join(POLARITIES)),
                              reason=ConfigErrorReason.INVALID_VALUE)

    def preflight(self):
        if self.INDEX is None:
            raise ConfigError("{}: No index kind declared".format(self),
                              reason=ConfigErrorReason.UNKNOWN_KIND)

    def get_unique_key(self):
        return {
            'index': self.INDEX,
            'threshold': self.threshold_key,
            'polarity': self.polarity
        }

    def detect(self, indices, thresholds):
        threshold = thresholds.value(self.threshold_key)
        self.status("Flagging {} {} {:.6g}".format(self.INDEX.upper(), self.polarity, threshold))
        return classify_single(indices[self.INDEX], threshold, self.polarity)

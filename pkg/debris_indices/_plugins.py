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

import importlib
from importlib import metadata

from ._exceptions import ConfigError, ConfigErrorReason
from ._message import get_logger
from .plugin import Detector


ENTRY_POINT_GROUP = 'debris_indices.detectors'

# Available without installed package metadata, e.g. when
# running from a source checkout
BUILTIN_DETECTORS = {
    'ndvi': 'debris_indices.detectors.ndvi',
    'fdi': 'debris_indices.detectors.fdi',
    'wci': 'debris_indices.detectors.wci',
    'combined': 'debris_indices.detectors.combined',
}

logger = get_logger('plugins')


def _entry_points():
    eps = metadata.entry_points()
    if hasattr(eps, 'select'):
        return {ep.name: ep for ep in eps.select(group=ENTRY_POINT_GROUP)}
    return {ep.name: ep for ep in eps.get(ENTRY_POINT_GROUP, [])}


# DetectorFactory
#
# Resolves detector kinds to Detector subclasses, through the
# entry point group first and the built-in detectors second.
#
class DetectorFactory():

    def __init__(self):
        self._types = {}
        self._entry_points = None

    # kinds()
    #
    # Returns:
    #    (list): Every loadable detector kind, sorted
    #
    def kinds(self):
        return sorted(set(BUILTIN_DETECTORS) | set(self._get_entry_points()))

    # lookup()
    #
    # Args:
    #    kind (str): The detector kind
    #
    # Returns:
    #    (type): The Detector subclass
    #
    def lookup(self, kind):
        if kind not in self._types:
            self._types[kind] = self._load(kind)
        return self._types[kind]

    # create()
    #
    # Args:
    #    kind (str): The detector kind
    #    config (dict): User configuration
    #
    # Returns:
    #    (Detector): A configured detector
    #
    def create(self, kind, config=None):
        return self.lookup(kind)(kind, config)

    def _get_entry_points(self):
        if self._entry_points is None:
            self._entry_points = _entry_points()
        return self._entry_points

    def _load(self, kind):
        entry_points = self._get_entry_points()
        try:
            if kind in entry_points:
                module = entry_points[kind].load()
            elif kind in BUILTIN_DETECTORS:
                module = importlib.import_module(BUILTIN_DETECTORS[kind])
            else:
                raise ConfigError("Unknown detector kind '{}'".format(kind),
                                  detail="Available detectors: {}".format(', '.join(self.kinds())),
                                  reason=ConfigErrorReason.UNKNOWN_KIND)
        except ImportError as e:
            raise ConfigError("Could not load detector '{}': {}".format(kind, e),
                              reason=ConfigErrorReason.UNKNOWN_KIND) from e

        setup = getattr(module, 'setup', None)
        if setup is None:
            raise ConfigError("Detector module '{}' has no setup() function".format(module.__name__),
                              reason=ConfigErrorReason.UNKNOWN_KIND)

        detector_type = setup()
        if not (isinstance(detector_type, type) and issubclass(detector_type, Detector)):
            raise ConfigError("setup() of detector '{}' did not return a Detector subclass".format(kind),
                              reason=ConfigErrorReason.UNKNOWN_KIND)

        logger.debug("Loaded detector '%s' from %s", kind, module.__name__)
        return detector_type


_factory = DetectorFactory()


# load_detector()
#
# Args:
#    kind (str): The detector kind
#    config (dict): User configuration
#
# Returns:
#    (Detector): A configured detector
#
def load_detector(kind, config=None):
    return _factory.create(kind, config)


def detector_kinds():
    return _factory.kinds()

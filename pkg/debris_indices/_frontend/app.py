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

import logging
import os
import sys

from .._config import load_file, node_validate, node_get_member
from .._exceptions import ConfigError, ConfigErrorReason, RasterError, RasterErrorReason
from .._message import get_logger
from ..classifier import WATER, ThresholdConfig
from ..evaluation import LabelMapping, map_labels
from ..indices import resolve_water_reference
from ..pipeline import fdi_params_for, run_config
from ..raster.files import read_mask, read_raster
from ..spectral import ESTIMATORS, RESAMPLING_METHODS, WavelengthTable, harmonize
from ..tiling import thread_count


RUN_CONFIG_KEYS = [
    'sensor', 'band-order', 'scale', 'threads', 'resampling', 'thresholds', 'fdi', 'wci',
    'detector', 'detectors', 'mapping', 'palette', 'output-directory'
]

LOG_FORMAT = '[%(levelname)-7s] %(name)s: %(message)s'


# RunConfig
#
# The effective configuration of one invocation, read from the
# shipped defaults composited with the user configuration.
#
class RunConfig():

    def __init__(self, node):
        node_validate(node, RUN_CONFIG_KEYS, path='configuration')

        self.sensor = node_get_member(node, str, 'sensor')
        self.band_order = node_get_member(node, list, 'band-order', None)
        self.scale = node_get_member(node, float, 'scale', None)
        self.threads = node_get_member(node, int, 'threads', None)
        self.resampling = node_get_member(node, str, 'resampling')
        self.thresholds = ThresholdConfig.from_node(node_get_member(node, dict, 'thresholds', {}))
        self.fdi = node_get_member(node, dict, 'fdi', {})
        self.detector = node_get_member(node, str, 'detector')
        self.detectors = node_get_member(node, dict, 'detectors', {})
        self.mapping = node_get_member(node, str, 'mapping', None)
        self.palette = node_get_member(node, dict, 'palette', {})
        self.output_directory = node_get_member(node, str, 'output-directory', '.')

        wci = node_get_member(node, dict, 'wci', {})
        node_validate(wci, ['estimator', 'reference'], path='wci')
        self.estimator = node_get_member(wci, str, 'estimator', 'pearson', path='wci')
        self.water_reference = node_get_member(wci, str, 'reference', None, path='wci')

        if self.estimator not in ESTIMATORS:
            raise ConfigError("wci.estimator: Unknown estimator '{}'".format(self.estimator),
                              detail="Known estimators: {}".format(', '.join(ESTIMATORS)),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.resampling not in RESAMPLING_METHODS:
            raise ConfigError("resampling: Unknown method '{}'".format(self.resampling),
                              detail="Known methods: {}".format(', '.join(RESAMPLING_METHODS)),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.scale is not None and not self.scale > 0:
            raise ConfigError("scale: Must be positive, got {}".format(self.scale),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads: Must be at least 1, got {}".format(self.threads),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.band_order is not None and not all(isinstance(name, str) for name in self.band_order):
            raise ConfigError("band-order: Expected a list of band names",
                              reason=ConfigErrorReason.INVALID_VALUE)

    # load()
    #
    # Args:
    #    path (str): An optional run configuration file
    #    overrides (dict): Values from command line flags
    #
    # Returns:
    #    (RunConfig): The effective configuration
    #
    @classmethod
    def load(cls, path=None, overrides=None):
        user = {}
        if path is not None:
            user = load_file(path)
            if user is None:
                user = {}
            if not isinstance(user, dict):
                raise ConfigError("{}: Expected a dictionary".format(path),
                                  reason=ConfigErrorReason.INVALID_DATA)
        node = run_config(user)

        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if isinstance(value, dict):
                node[key] = dict(node.get(key) or {}, **value)
            else:
                node[key] = value

        return cls(node)

    def detector_config(self, kind):
        return self.detectors.get(kind)

    def label_mapping(self, path=None):
        path = path or self.mapping
        if path is None:
            return LabelMapping.marida()
        return LabelMapping.load(path)


# App
#
# Per invocation state of the frontend: the run configuration, the
# log handler and the helpers the commands share.
#
class App():

    def __init__(self, config_path=None, overrides=None, verbosity=0):
        self._handler = None
        self.logger = get_logger('frontend')
        self.setup_logging(verbosity)
        self.config = RunConfig.load(config_path, overrides)

    # setup_logging()
    #
    # Route the package loggers to stderr, replacing the handler of a
    # previous invocation in the same process.
    #
    def setup_logging(self, verbosity):
        root = get_logger()
        for handler in list(root.handlers):
            if getattr(handler, '_debris_frontend', False):
                root.removeHandler(handler)

        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._debris_frontend = True
        root.addHandler(handler)
        root.propagate = False

        if verbosity > 0:
            root.setLevel(logging.DEBUG)
        elif verbosity < 0:
            root.setLevel(logging.ERROR)
        else:
            root.setLevel(logging.INFO)
        self._handler = handler

    @property
    def threads(self):
        return thread_count(self.config.threads)

    def read_stack(self, path):
        return read_raster(path, scale=self.config.scale, sensor=self.config.sensor,
                           band_order=self.config.band_order)

    def wavelength_table(self, sensor=None):
        return WavelengthTable.resolve(sensor or self.config.sensor)

    def fdi_params(self, stack):
        return fdi_params_for(stack, self.config.fdi)

    # water_reference()
    #
    # Resolve the water reference of a run. Without a reference file
    # or a water mask this returns None and the reference is estimated
    # from the scene when the WCI is computed.
    #
    # Args:
    #    stack (BandStack): The harmonized stack
    #    path (str): A water reference file, overriding the configuration
    #    mask_path (str): A mask whose water pixels give the reference
    #    mapping (LabelMapping): The mapping of the mask codes
    #
    def water_reference(self, stack, path=None, mask_path=None, mapping=None):
        path = path or self.config.water_reference
        water_mask = None
        if path is None and mask_path is not None:
            labels = map_labels(read_mask(mask_path), mapping or self.config.label_mapping()).labels
            water_mask = labels == WATER

        if path is None and water_mask is None:
            return None
        return resolve_water_reference(stack, path=path, water_mask=water_mask)

    def harmonize(self, stack):
        return harmonize(stack, resampling=self.config.resampling)

    def output_path(self, directory, filename):
        directory = directory or self.config.output_directory
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as e:
            raise RasterError("{}: Could not create directory: {}".format(directory, e),
                              reason=RasterErrorReason.IO_FAILURE) from e
        return os.path.join(directory, filename)

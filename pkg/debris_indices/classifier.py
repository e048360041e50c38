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

"""Threshold classification of index maps

Single index rules flag pixels as debris on one side of a threshold,
the combined rule separates water, debris, other floating matter and
wakes using all three indices at once::

    WCI >= water-correlation                  -> water
    FDI >= fdi and NDVI >= ndvi-low           -> debris
    FDI >= fdi                                -> floating_other
    NDVI >= ndvi-high                         -> wake
    otherwise                                 -> water

The first matching rule wins. Pixels invalid in any input are
undetermined.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ._config import node_validate, node_get_member
from ._exceptions import ClassifyError, ClassifyErrorReason, ConfigError, ConfigErrorReason
from ._message import get_logger


# Class codes of prediction maps
UNDETERMINED = 0
WATER = 1
DEBRIS = 2
FLOATING_OTHER = 3
WAKE = 4

# Truth pixels excluded from evaluation
IGNORE = 255

CLASS_CODES = {
    'undetermined': UNDETERMINED,
    'water': WATER,
    'debris': DEBRIS,
    'floating_other': FLOATING_OTHER,
    'wake': WAKE,
    'ignore': IGNORE,
}
CLASS_NAMES = {code: name for name, code in CLASS_CODES.items()}

PREDICTION_CODES = (UNDETERMINED, WATER, DEBRIS, FLOATING_OTHER, WAKE)

POLARITIES = ('above', 'below')
THRESHOLD_KEYS = ('water-correlation', 'fdi', 'ndvi-low', 'ndvi-high')
THRESHOLD_MODES = ('fixed', 'otsu')

OTSU_BINS = 256

logger = get_logger('classifier')


class ClassMap():
    """A per-pixel label raster

    Prediction maps hold the class codes of this module. Truth maps read
    from disk hold raw dataset codes (``raw=True``) until they are mapped.

    Args:
       labels (numpy.ndarray): 2-D integer labels
       raw (bool): Whether the labels are raw dataset codes
    """

    def __init__(self, labels, raw=False):
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.size == 0:
            raise ClassifyError("Class maps must be non-empty 2-D arrays, got shape {}".format(labels.shape),
                                reason=ClassifyErrorReason.INVALID_LABELS)
        if labels.dtype.kind not in 'ui':
            raise ClassifyError("Class map labels must be integers, got {}".format(labels.dtype),
                                reason=ClassifyErrorReason.INVALID_LABELS)
        if not raw:
            unknown = np.setdiff1d(np.unique(labels), PREDICTION_CODES + (IGNORE,))
            if unknown.size:
                raise ClassifyError("Unknown class code(s) in class map: {}"
                                    .format(', '.join(str(c) for c in unknown)),
                                    reason=ClassifyErrorReason.INVALID_LABELS)
            labels = labels.astype(np.uint8)

        labels = labels.copy()
        labels.flags.writeable = False
        self.labels = labels
        self.raw = raw

    def __repr__(self):
        return 'ClassMap({}x{}{})'.format(self.width, self.height, ', raw' if self.raw else '')

    def __eq__(self, other):
        if not isinstance(other, ClassMap):
            return NotImplemented
        return self.raw == other.raw and np.array_equal(self.labels, other.labels)

    __hash__ = None

    @property
    def shape(self):
        return self.labels.shape

    @property
    def height(self):
        return self.labels.shape[0]

    @property
    def width(self):
        return self.labels.shape[1]

    # counts()
    #
    # Returns:
    #    (dict): Pixel count per present label, by class name for
    #            prediction maps and by raw code for raw maps
    #
    def counts(self):
        codes, counts = np.unique(self.labels, return_counts=True)
        if self.raw:
            return {int(code): int(count) for code, count in zip(codes, counts)}
        return {CLASS_NAMES[int(code)]: int(count) for code, count in zip(codes, counts)}


@dataclass(frozen=True)
class ThresholdConfig():
    """Thresholds of the classification rules

    In ``otsu`` mode the water correlation, FDI and low NDVI thresholds
    are replaced per scene by the Otsu threshold of the corresponding index,
    see :meth:`resolve`.
    """

    water_correlation: float = 0.9
    fdi: float = 0.04
    ndvi_low: float = 0.1
    ndvi_high: float = 0.3
    mode: str = 'fixed'

    def __post_init__(self):
        for name in ('water_correlation', 'fdi', 'ndvi_low', 'ndvi_high'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError("Threshold {} must be a finite number, got {}".format(name, value),
                                  reason=ConfigErrorReason.INVALID_VALUE)
        if not -1.0 <= self.water_correlation <= 1.0:
            raise ConfigError("Water correlation threshold must lie in [-1, 1], got {}"
                              .format(self.water_correlation),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.ndvi_low > self.ndvi_high:
            raise ConfigError("NDVI thresholds must satisfy ndvi-low <= ndvi-high, got {} and {}"
                              .format(self.ndvi_low, self.ndvi_high),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.mode not in THRESHOLD_MODES:
            raise ConfigError("Unknown threshold mode '{}'".format(self.mode),
                              detail="Known modes: {}".format(', '.join(THRESHOLD_MODES)),
                              reason=ConfigErrorReason.INVALID_VALUE)

    @classmethod
    def from_node(cls, node, path='thresholds'):
        node_validate(node, ['water-correlation', 'fdi', 'ndvi-low', 'ndvi-high', 'mode'], path=path)
        return cls(
            water_correlation=node_get_member(node, float, 'water-correlation', cls.water_correlation, path=path),
            fdi=node_get_member(node, float, 'fdi', cls.fdi, path=path),
            ndvi_low=node_get_member(node, float, 'ndvi-low', cls.ndvi_low, path=path),
            ndvi_high=node_get_member(node, float, 'ndvi-high', cls.ndvi_high, path=path),
            mode=node_get_member(node, str, 'mode', cls.mode, path=path)
        )

    def to_node(self):
        return {
            'water-correlation': self.water_correlation,
            'fdi': self.fdi,
            'ndvi-low': self.ndvi_low,
            'ndvi-high': self.ndvi_high,
            'mode': self.mode
        }

    # value()
    #
    # Args:
    #    key (str): A threshold name as used in configuration files
    #
    # Returns:
    #    (float): The threshold
    #
    def value(self, key):
        node = self.to_node()
        if key not in THRESHOLD_KEYS:
            raise ConfigError("Unknown threshold '{}'".format(key),
                              detail="Known thresholds: {}".format(', '.join(THRESHOLD_KEYS)),
                              reason=ConfigErrorReason.INVALID_KEY)
        return node[key]

    # resolve()
    #
    # Turn the configuration into fixed thresholds for one scene. In
    # fixed mode this is the configuration itself.
    #
    # Args:
    #    ndvi (IndexMap): The scene NDVI
    #    fdi (IndexMap): The scene FDI
    #    wci (IndexMap): The scene WCI
    #
    # Returns:
    #    (ThresholdConfig): Thresholds in fixed mode
    #
    def resolve(self, ndvi, fdi, wci):
        if self.mode == 'fixed':
            return self

        def scene_threshold(index, fallback):
            if index is None:
                return fallback
            try:
                return otsu_threshold(index)
            except ClassifyError as e:
                logger.warning("Otsu threshold undefined for %s, keeping fixed threshold %r: %s",
                               index.kind.upper(), fallback, e)
                return fallback

        water_correlation = min(1.0, max(-1.0, scene_threshold(wci, self.water_correlation)))
        fdi_threshold = scene_threshold(fdi, self.fdi)
        ndvi_low = scene_threshold(ndvi, self.ndvi_low)
        resolved = replace(self, water_correlation=water_correlation, fdi=fdi_threshold, ndvi_low=ndvi_low,
                           ndvi_high=max(self.ndvi_high, ndvi_low), mode='fixed')

        logger.info("Scene thresholds: water-correlation %.6g, fdi %.6g, ndvi-low %.6g, ndvi-high %.6g",
                    resolved.water_correlation, resolved.fdi, resolved.ndvi_low, resolved.ndvi_high)
        return resolved


# classify_single()
#
# Args:
#    index (IndexMap): The index to threshold
#    threshold (float): The threshold
#    polarity (str): ``above`` flags values >= threshold,
#                    ``below`` flags values < threshold
#
# Returns:
#    (ClassMap): Flagged pixels are debris, others water, invalid
#                pixels undetermined
#
def classify_single(index, threshold, polarity):
    if polarity not in POLARITIES:
        raise ConfigError("Unknown polarity '{}'".format(polarity),
                          detail="Known polarities: {}".format(', '.join(POLARITIES)),
                          reason=ConfigErrorReason.INVALID_VALUE)

    if polarity == 'above':
        flagged = index.values >= threshold
    else:
        flagged = index.values < threshold

    labels = np.where(flagged, DEBRIS, WATER).astype(np.uint8)
    labels[~index.valid] = UNDETERMINED
    return ClassMap(labels)


# classify_combined()
#
# Args:
#    ndvi (IndexMap): The NDVI
#    fdi (IndexMap): The FDI
#    wci (IndexMap): The WCI
#    cfg (ThresholdConfig): The thresholds, Otsu thresholds are
#                           resolved on the given maps
#    detect_wakes (bool): Whether to apply the wake rule
#
# Returns:
#    (ClassMap): The combined classification
#
def classify_combined(ndvi, fdi, wci, cfg, detect_wakes=True):
    if not (ndvi.shape == fdi.shape == wci.shape):
        raise ClassifyError("Index grids differ: NDVI {}, FDI {}, WCI {}".format(ndvi.shape, fdi.shape, wci.shape),
                            reason=ClassifyErrorReason.GRID_MISMATCH)

    cfg = cfg.resolve(ndvi, fdi, wci)

    is_water = wci.values >= cfg.water_correlation
    floating = fdi.values >= cfg.fdi
    vegetated = ndvi.values >= cfg.ndvi_low

    # Reverse rule order, later assignments take precedence
    labels = np.full(ndvi.shape, WATER, dtype=np.uint8)
    if detect_wakes:
        labels[ndvi.values >= cfg.ndvi_high] = WAKE
    labels[floating] = FLOATING_OTHER
    labels[floating & vegetated] = DEBRIS
    labels[is_water] = WATER
    labels[~(ndvi.valid & fdi.valid & wci.valid)] = UNDETERMINED

    return ClassMap(labels)


# otsu_sweep()
#
# Evaluate the Otsu between-class variance at every interior
# boundary of a 256 bin histogram of the valid index values.
#
# Args:
#    index (IndexMap): The index
#
# Returns:
#    (numpy.ndarray): The 255 interior bin boundaries
#    (numpy.ndarray): The between-class variance per boundary, zero where
#                     a class is empty
#
def otsu_sweep(index):
    values = index.valid_values()
    if np.unique(values).size < 2:
        raise ClassifyError("{} histogram is degenerate: fewer than 2 distinct valid values"
                            .format(index.kind.upper()),
                            reason=ClassifyErrorReason.DEGENERATE_HISTOGRAM)

    counts, edges = np.histogram(values, bins=OTSU_BINS, range=(values.min(), values.max()))
    counts = counts.astype(np.float64)
    centers = (edges[:-1] + edges[1:]) / 2.0

    total = counts.sum()
    w0 = np.cumsum(counts)[:-1]
    w1 = total - w0
    sum0 = np.cumsum(counts * centers)[:-1]
    sum1 = (counts * centers).sum() - sum0

    populated = (w0 > 0) & (w1 > 0)
    with np.errstate(divide='ignore', invalid='ignore'):
        mu0 = sum0 / w0
        mu1 = sum1 / w1
        variance = (w0 / total) * (w1 / total) * (mu0 - mu1) ** 2
    variance = np.where(populated, variance, 0.0)

    return edges[1:-1], variance


# otsu_threshold()
#
# Args:
#    index (IndexMap): The index
#
# Returns:
#    (float): The boundary maximising the between-class variance, the
#             lowest one on ties. Values >= the threshold form the
#             upper class.
#
def otsu_threshold(index):
    boundaries, variance = otsu_sweep(index)
    return float(boundaries[int(np.argmax(variance))])

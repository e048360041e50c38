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

"""Spectral data model

The in-memory representation every other module works on:

* :class:`WavelengthTable` describes the bands of a sensor
* :class:`BandStack` holds co-registered reflectance planes
* :class:`SpectralSignature` holds one reflectance per band
* :class:`IndexMap` holds a single real-valued index per pixel

Plus the per-pixel operations the indices are built from: signature
extraction, correlation estimators and resampling onto a common grid.

All arithmetic is done in 64-bit floating point.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, stats

from ._config import load_data, load_file, node_get_member, node_validate
from ._exceptions import SpectralError, SpectralErrorReason, ConfigError, ConfigErrorReason
from .raster.header import RasterHeader


VALID_RESOLUTIONS = (10, 20, 60)
UPSAMPLE_FACTORS = (1, 2, 3, 6)
ESTIMATORS = ('pearson', 'spearman', 'cosine')
RESAMPLING_METHODS = ('nearest', 'bilinear')
INDEX_KINDS = ('ndvi', 'fdi', 'wci')

# Payload value of invalid index pixels, also the nodata value
# of index rasters written to disk
FILL_VALUE = -9999.0

# Tolerance, in nanometres, when matching bare wavelengths to a sensor table
_WAVELENGTH_MATCH_NM = 1.0

_EPS = np.finfo(np.float64).eps


@functools.lru_cache(maxsize=None)
def _sensor_data():
    return load_data('sensors.yaml')


# BandInfo
#
# Description of a single sensor band
#
@dataclass(frozen=True)
class BandInfo():
    name: str
    descriptor: str
    wavelength: float
    resolution: int


class WavelengthTable():
    """The bands of a band stack, in stack order

    Bands can be looked up by name (``B8``) or by descriptor (``NIR``),
    case insensitively.
    """

    def __init__(self, bands):
        self._bands = tuple(bands)
        if not self._bands:
            raise SpectralError("A wavelength table needs at least one band",
                                reason=SpectralErrorReason.BAD_WAVELENGTHS)

        self._lookup = {}
        for idx, band in enumerate(self._bands):
            if not (math.isfinite(band.wavelength) and band.wavelength > 0):
                raise SpectralError("Band {}: wavelength must be positive, got {}"
                                    .format(band.name, band.wavelength),
                                    reason=SpectralErrorReason.BAD_WAVELENGTHS)
            if band.resolution not in VALID_RESOLUTIONS:
                raise SpectralError("Band {}: resolution must be one of {}, got {}"
                                    .format(band.name, VALID_RESOLUTIONS, band.resolution),
                                    reason=SpectralErrorReason.BAD_WAVELENGTHS)
            key = band.name.lower()
            if key in self._lookup:
                raise SpectralError("Duplicate band name: {}".format(band.name),
                                    reason=SpectralErrorReason.BAD_WAVELENGTHS)
            self._lookup[key] = idx

        # Descriptors resolve only where they do not shadow a band name
        for idx, band in enumerate(self._bands):
            if band.descriptor:
                self._lookup.setdefault(band.descriptor.lower(), idx)

    def __len__(self):
        return len(self._bands)

    def __iter__(self):
        return iter(self._bands)

    def __getitem__(self, idx):
        return self._bands[idx]

    def __eq__(self, other):
        if not isinstance(other, WavelengthTable):
            return NotImplemented
        return self._bands == other._bands

    def __hash__(self):
        return hash(self._bands)

    def __repr__(self):
        return 'WavelengthTable({})'.format(', '.join(band.name for band in self._bands))

    def __contains__(self, key):
        return isinstance(key, str) and key.lower() in self._lookup

    @property
    def names(self):
        return tuple(band.name for band in self._bands)

    @property
    def wavelengths(self):
        return np.array([band.wavelength for band in self._bands], dtype=np.float64)

    @property
    def resolutions(self):
        return tuple(band.resolution for band in self._bands)

    # index()
    #
    # Args:
    #    key (str|int): A band name, descriptor or position
    #
    # Returns:
    #    (int): The position of the band in the table
    #
    # Raises:
    #    (SpectralError): If the band is not part of the table
    #
    def index(self, key):
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if 0 <= key < len(self._bands):
                return int(key)
        elif isinstance(key, str) and key.lower() in self._lookup:
            return self._lookup[key.lower()]

        raise SpectralError("Band '{}' is not available".format(key),
                            detail="Available bands: {}".format(', '.join(self.names)),
                            reason=SpectralErrorReason.UNKNOWN_BAND)

    def get(self, key):
        return self._bands[self.index(key)]

    # select()
    #
    # Args:
    #    keys (list): Band names, descriptors or positions
    #
    # Returns:
    #    (WavelengthTable): A table of the selected bands, in the given order
    #
    def select(self, keys):
        return WavelengthTable([self.get(key) for key in keys])

    def to_node(self):
        return [
            {
                'band': band.name,
                'descriptor': band.descriptor,
                'wavelength': band.wavelength,
                'resolution': band.resolution
            }
            for band in self._bands
        ]

    @classmethod
    def from_node(cls, node, path='bands'):
        if not isinstance(node, list):
            raise ConfigError("{}: Expected a list of bands".format(path),
                              reason=ConfigErrorReason.INVALID_DATA)

        bands = []
        for idx, entry in enumerate(node):
            entry_path = '{}[{}]'.format(path, idx)
            node_validate(entry, ['band', 'descriptor', 'wavelength', 'resolution'], path=entry_path)
            bands.append(BandInfo(
                name=node_get_member(entry, str, 'band', path=entry_path),
                descriptor=node_get_member(entry, str, 'descriptor', '', path=entry_path),
                wavelength=node_get_member(entry, float, 'wavelength', path=entry_path),
                resolution=node_get_member(entry, int, 'resolution', path=entry_path)
            ))
        return cls(bands)

    # builtin()
    #
    # Args:
    #    sensor (str): One of the built-in sensors, ``s2a`` or ``s2b``
    #
    # Returns:
    #    (WavelengthTable): The band table of the sensor
    #
    @classmethod
    def builtin(cls, sensor='s2a'):
        sensors = _sensor_data()['sensors']
        key = sensor.lower()
        if key not in sensors:
            raise ConfigError("Unknown sensor '{}'".format(sensor),
                              detail="Built-in sensors: {}".format(', '.join(sorted(sensors))),
                              reason=ConfigErrorReason.UNKNOWN_KIND)
        return cls.from_node(sensors[key], path='sensors.{}'.format(key))

    # load()
    #
    # Load a custom band table from a JSON, YAML or TOML file, either
    # a list of bands or a dictionary with a ``bands`` list.
    #
    @classmethod
    def load(cls, path):
        data = load_file(path)
        if isinstance(data, dict):
            node_validate(data, ['bands'], path=path)
            data = data.get('bands')
        return cls.from_node(data, path=path)

    # resolve()
    #
    # Resolve a sensor specification to a table: a built-in sensor
    # name or the path of a custom table file.
    #
    @classmethod
    def resolve(cls, sensor):
        if isinstance(sensor, WavelengthTable):
            return sensor
        if sensor.lower() in _sensor_data()['sensors']:
            return cls.builtin(sensor)
        return cls.load(sensor)

    # for_band_count()
    #
    # The table for a file carrying ``count`` bands and no band metadata.
    #
    # Args:
    #    count (int): The number of bands in the file
    #    sensor (str|WavelengthTable): The sensor the file comes from
    #    band_order (list): Explicit band names, overriding the built-in orders
    #
    @classmethod
    def for_band_count(cls, count, sensor='s2a', band_order=None):
        table = cls.resolve(sensor)
        if band_order is None:
            if count == len(table):
                return table
            orders = _sensor_data()['band-orders']
            band_order = orders.get(count)
            if band_order is None:
                raise ConfigError("No band order known for {} bands".format(count),
                                  detail="Specify the band order explicitly with 'band-order'",
                                  reason=ConfigErrorReason.MISSING_BAND_ORDER)

        if len(band_order) != count:
            raise ConfigError("Band order lists {} bands but the raster has {}".format(len(band_order), count),
                              reason=ConfigErrorReason.INVALID_VALUE)
        return table.select(band_order)

    # from_wavelengths()
    #
    # Build a table from bare center wavelengths, naming bands after
    # the sensor band they match.
    #
    @classmethod
    def from_wavelengths(cls, wavelengths, sensor='s2a'):
        reference = cls.resolve(sensor)
        bands = []
        for wavelength in wavelengths:
            wavelength = float(wavelength)
            distances = np.abs(reference.wavelengths - wavelength)
            nearest = int(np.argmin(distances))
            match = reference[nearest]
            if distances[nearest] <= _WAVELENGTH_MATCH_NM and match.name not in [b.name for b in bands]:
                bands.append(BandInfo(match.name, match.descriptor, wavelength, match.resolution))
            else:
                bands.append(BandInfo('{:g}nm'.format(wavelength), '', wavelength, 10))
        return cls(bands)


class BandStack():
    """Co-registered reflectance planes with wavelength metadata

    Planes are float64 reflectance. Before :func:`harmonize` planes may sit
    on different grids, recorded per plane in ``grid`` (metres per pixel);
    afterwards every plane shares the finest grid.

    Stacks are immutable, the planes and masks are read-only arrays.
    """

    def __init__(self, planes, wavelengths, *, masks=None, grid=None, header=None, calibrated=True):
        planes = tuple(np.array(plane, dtype=np.float64) for plane in planes)
        if len(planes) != len(wavelengths):
            raise SpectralError("Stack has {} planes but {} bands in its wavelength table"
                                .format(len(planes), len(wavelengths)),
                                reason=SpectralErrorReason.BAD_WAVELENGTHS)
        for plane in planes:
            if plane.ndim != 2 or plane.size == 0:
                raise SpectralError("Band planes must be non-empty 2-D arrays, got shape {}".format(plane.shape),
                                    reason=SpectralErrorReason.INCONSISTENT_DIMS)

        if masks is None:
            masks = [np.ones(plane.shape, dtype=bool) for plane in planes]
        if len(masks) != len(planes):
            raise SpectralError("Stack has {} planes but {} validity masks".format(len(planes), len(masks)),
                                reason=SpectralErrorReason.INCONSISTENT_DIMS)

        checked_masks = []
        for plane, mask in zip(planes, masks):
            mask = np.array(mask, dtype=bool)
            if mask.shape != plane.shape:
                raise SpectralError("Validity mask of shape {} does not match plane of shape {}"
                                    .format(mask.shape, plane.shape),
                                    reason=SpectralErrorReason.INCONSISTENT_DIMS)
            # Non-finite reflectance is never valid
            mask &= np.isfinite(plane)
            checked_masks.append(mask)

        if calibrated:
            for band, plane, mask in zip(wavelengths, planes, checked_masks):
                if np.any(plane[mask] < 0):
                    raise SpectralError("Band {} holds negative reflectance".format(band.name),
                                        detail="Flag the stack as uncalibrated to accept raw values",
                                        reason=SpectralErrorReason.NEGATIVE_REFLECTANCE)

        if grid is None:
            if len({plane.shape for plane in planes}) == 1:
                grid = (min(wavelengths.resolutions),) * len(planes)
            else:
                grid = wavelengths.resolutions
        grid = tuple(grid)
        if len(grid) != len(planes):
            raise SpectralError("Stack has {} planes but {} grid resolutions".format(len(planes), len(grid)),
                                reason=SpectralErrorReason.INCONSISTENT_DIMS)

        for array in planes + tuple(checked_masks):
            array.flags.writeable = False

        self._planes = planes
        self._masks = tuple(checked_masks)
        self._wavelengths = wavelengths
        self._grid = grid
        self._header = header
        self._calibrated = calibrated
        self._valid = None

    def __repr__(self):
        shapes = sorted({plane.shape for plane in self._planes})
        return 'BandStack({} bands, shapes {})'.format(len(self._planes), shapes)

    def __eq__(self, other):
        if not isinstance(other, BandStack):
            return NotImplemented
        if self._wavelengths != other._wavelengths or self._grid != other._grid:
            return False
        if len(self._planes) != len(other._planes):
            return False
        for a, b, ma, mb in zip(self._planes, other._planes, self._masks, other._masks):
            if a.shape != b.shape or not np.array_equal(ma, mb):
                return False
            if not np.array_equal(a[ma], b[mb]):
                return False
        return True

    __hash__ = None

    @property
    def planes(self):
        return self._planes

    @property
    def masks(self):
        return self._masks

    @property
    def wavelengths(self):
        return self._wavelengths

    @property
    def grid(self):
        return self._grid

    @property
    def calibrated(self):
        return self._calibrated

    @property
    def band_count(self):
        return len(self._planes)

    @property
    def is_harmonized(self):
        return len({plane.shape for plane in self._planes}) == 1 and len(set(self._grid)) == 1

    @property
    def shape(self):
        self._require_harmonized()
        return self._planes[0].shape

    @property
    def height(self):
        return self.shape[0]

    @property
    def width(self):
        return self.shape[1]

    @property
    def header(self):
        if self._header is not None:
            return self._header
        height, width = self.shape
        return RasterHeader(width=width, height=height, band_count=self.band_count)

    # valid
    #
    # The per-pixel conjunction of the band validity masks
    #
    @property
    def valid(self):
        if self._valid is None:
            self._require_harmonized()
            valid = np.logical_and.reduce(self._masks)
            valid.flags.writeable = False
            self._valid = valid
        return self._valid

    def index(self, key):
        return self._wavelengths.index(key)

    def band(self, key):
        return self._planes[self.index(key)]

    def band_mask(self, key):
        return self._masks[self.index(key)]

    # cube()
    #
    # Args:
    #    keys (list): Optional band keys, defaults to every band
    #
    # Returns:
    #    (numpy.ndarray): A (bands, height, width) float64 array
    #
    def cube(self, keys=None):
        self._require_harmonized()
        if keys is None:
            return np.stack(self._planes)
        return np.stack([self.band(key) for key in keys])

    # window()
    #
    # Args:
    #    start (int): First row
    #    end (int): Row after the last row
    #
    # Returns:
    #    (BandStack): The rows [start, end) of this stack
    #
    def window(self, start, end):
        self._require_harmonized()
        return BandStack([plane[start:end] for plane in self._planes], self._wavelengths,
                         masks=[mask[start:end] for mask in self._masks],
                         grid=self._grid, calibrated=self._calibrated)

    # with_planes()
    #
    # A stack sharing this stack's metadata with new planes.
    #
    def with_planes(self, planes, masks=None, calibrated=None):
        if masks is None:
            masks = self._masks
        if calibrated is None:
            calibrated = self._calibrated
        return BandStack(planes, self._wavelengths, masks=masks, grid=self._grid,
                         header=self._header, calibrated=calibrated)

    # scaled()
    #
    # Args:
    #    factor (float): A positive factor
    #
    # Returns:
    #    (BandStack): This stack with every reflectance multiplied by ``factor``
    #
    def scaled(self, factor):
        return self.with_planes([plane * factor for plane in self._planes])

    def _require_harmonized(self):
        if len({plane.shape for plane in self._planes}) != 1:
            raise SpectralError("Band planes are not on a common grid, harmonize the stack first",
                                reason=SpectralErrorReason.INCONSISTENT_DIMS)


@dataclass(frozen=True)
class SpectralSignature():
    """One reflectance value per band"""

    values: tuple
    band_ids: tuple = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        band_ids = self.band_ids
        if band_ids is None:
            band_ids = tuple('band{}'.format(idx) for idx in range(len(values)))
        band_ids = tuple(str(b) for b in band_ids)

        if len(values) != len(band_ids):
            raise SpectralError("Signature has {} values but {} band ids".format(len(values), len(band_ids)),
                                reason=SpectralErrorReason.LENGTH_MISMATCH)
        if len(values) < 2:
            raise SpectralError("A spectral signature needs at least 2 bands",
                                reason=SpectralErrorReason.LENGTH_MISMATCH)
        if not all(math.isfinite(v) for v in values):
            raise SpectralError("Spectral signature holds non-finite values",
                                reason=SpectralErrorReason.NON_FINITE)

        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'band_ids', band_ids)

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.array(self.values, dtype=np.float64)

    # select()
    #
    # Args:
    #    band_ids (list): Band ids, in the wanted order
    #
    # Returns:
    #    (SpectralSignature): The values for the given bands
    #
    def select(self, band_ids):
        lookup = {b.lower(): idx for idx, b in enumerate(self.band_ids)}
        missing = [b for b in band_ids if b.lower() not in lookup]
        if missing:
            raise SpectralError("Signature does not cover band(s): {}".format(', '.join(missing)),
                                reason=SpectralErrorReason.UNKNOWN_BAND)
        return SpectralSignature([self.values[lookup[b.lower()]] for b in band_ids], band_ids)


class IndexMap():
    """A single-channel index raster with a validity mask

    Invalid pixels hold :data:`FILL_VALUE`.
    """

    def __init__(self, kind, values, valid):
        kind = kind.lower()
        if kind not in INDEX_KINDS:
            raise ConfigError("Unknown index kind '{}'".format(kind),
                              detail="Known kinds: {}".format(', '.join(INDEX_KINDS)),
                              reason=ConfigErrorReason.UNKNOWN_KIND)

        values = np.asarray(values, dtype=np.float64)
        valid = np.asarray(valid, dtype=bool)
        if values.ndim != 2 or values.shape != valid.shape:
            raise SpectralError("Index values of shape {} do not match mask of shape {}"
                                .format(values.shape, valid.shape),
                                reason=SpectralErrorReason.INCONSISTENT_DIMS)

        valid = valid & np.isfinite(values)
        values = np.where(valid, values, FILL_VALUE)
        values.flags.writeable = False
        valid.flags.writeable = False

        self.kind = kind
        self.values = values
        self.valid = valid

    def __repr__(self):
        return 'IndexMap({}, {}x{})'.format(self.kind, self.width, self.height)

    @property
    def shape(self):
        return self.values.shape

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def valid_count(self):
        return int(np.count_nonzero(self.valid))

    def valid_values(self):
        return self.values[self.valid]

    # stats()
    #
    # Returns:
    #    (dict): min, max, mean and valid_count over valid pixels, the
    #            statistics are None when no pixel is valid
    #
    def stats(self):
        values = self.valid_values()
        if values.size == 0:
            return {'min': None, 'max': None, 'mean': None, 'valid_count': 0}
        return {
            'min': float(values.min()),
            'max': float(values.max()),
            'mean': float(values.mean()),
            'valid_count': int(values.size)
        }

    # concatenate()
    #
    # Join index maps computed over consecutive row windows
    #
    @classmethod
    def concatenate(cls, maps):
        maps = list(maps)
        return cls(maps[0].kind,
                   np.concatenate([m.values for m in maps], axis=0),
                   np.concatenate([m.valid for m in maps], axis=0))


# pixel_signature()
#
# Args:
#    stack (BandStack): A harmonized stack
#    x (int): Column
#    y (int): Row
#
# Returns:
#    (SpectralSignature): The reflectance of every band at (x, y)
#
def pixel_signature(stack, x, y):
    height, width = stack.shape
    if not (0 <= x < width and 0 <= y < height):
        raise SpectralError("Pixel ({}, {}) is outside the {}x{} stack".format(x, y, width, height),
                            reason=SpectralErrorReason.OUT_OF_BOUNDS)
    if not stack.valid[y, x]:
        raise SpectralError("Pixel ({}, {}) is not valid".format(x, y),
                            reason=SpectralErrorReason.INVALID_PIXEL)
    return SpectralSignature([plane[y, x] for plane in stack.planes], stack.wavelengths.names)


def _as_vector(signature):
    if isinstance(signature, SpectralSignature):
        return signature.as_array()
    return np.asarray(signature, dtype=np.float64)


# Sums of squared deviations this small relative to the magnitude
# of the data are rounding noise, not variance.
def _negligible(ss, data, axis=None):
    n = data.shape[0] if axis is not None else data.size
    scale = np.abs(data).max(axis=axis)
    return ss <= n * (_EPS * scale) ** 2


def _pearson_vectors(x, y):
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if _negligible(sxx, x) or _negligible(syy, y):
        raise SpectralError("Correlation is undefined for a constant signature",
                            reason=SpectralErrorReason.ZERO_VARIANCE)
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


# pearson()
#
# Pearson product-moment correlation of two signatures
#
# Args:
#    a (SpectralSignature|sequence): First signature
#    b (SpectralSignature|sequence): Second signature
#
# Returns:
#    (float): The correlation coefficient, in [-1, 1]
#
def pearson(a, b):
    return correlation(a, b, 'pearson')


# correlation()
#
# Args:
#    a (SpectralSignature|sequence): First signature
#    b (SpectralSignature|sequence): Second signature
#    estimator (str): One of ESTIMATORS
#
# Returns:
#    (float): The correlation coefficient, in [-1, 1]
#
def correlation(a, b, estimator='pearson'):
    x = _as_vector(a)
    y = _as_vector(b)
    if x.shape != y.shape or x.ndim != 1:
        raise SpectralError("Cannot correlate signatures of {} and {} bands".format(x.size, y.size),
                            reason=SpectralErrorReason.LENGTH_MISMATCH)
    if x.size < 2:
        raise SpectralError("Correlation needs at least 2 bands",
                            reason=SpectralErrorReason.LENGTH_MISMATCH)

    if estimator == 'pearson':
        return _pearson_vectors(x, y)
    elif estimator == 'spearman':
        return _pearson_vectors(stats.rankdata(x), stats.rankdata(y))
    elif estimator == 'cosine':
        nx = float(np.sqrt(x @ x))
        ny = float(np.sqrt(y @ y))
        if nx == 0 or ny == 0:
            raise SpectralError("Cosine similarity is undefined for a zero signature",
                                reason=SpectralErrorReason.ZERO_VARIANCE)
        return min(1.0, max(-1.0, float(x @ y) / (nx * ny)))

    raise ConfigError("Unknown correlation estimator '{}'".format(estimator),
                      detail="Known estimators: {}".format(', '.join(ESTIMATORS)),
                      reason=ConfigErrorReason.UNKNOWN_KIND)


def _pearson_planes(cube, reference):
    dx = cube - cube.mean(axis=0)
    dy = reference - reference.mean()
    sxx = np.einsum('ijk,ijk->jk', dx, dx)
    sxy = np.tensordot(dy, dx, axes=(0, 0))
    syy = float(dy @ dy)

    defined = ~_negligible(sxx, cube, axis=0)
    with np.errstate(divide='ignore', invalid='ignore'):
        r = sxy / np.sqrt(sxx * syy)
    return np.clip(r, -1.0, 1.0), defined


# correlate_planes()
#
# Correlate the spectrum of every pixel with a reference spectrum.
#
# Args:
#    cube (numpy.ndarray): A (bands, height, width) array
#    reference (numpy.ndarray): A (bands,) array with nonzero variance
#    estimator (str): One of ESTIMATORS
#
# Returns:
#    (numpy.ndarray, numpy.ndarray): The correlation per pixel, and a
#    boolean array which is False where the pixel spectrum is constant
#
def correlate_planes(cube, reference, estimator='pearson'):
    reference = np.asarray(reference, dtype=np.float64)

    if estimator == 'pearson':
        return _pearson_planes(cube, reference)
    elif estimator == 'spearman':
        return _pearson_planes(stats.rankdata(cube, axis=0), stats.rankdata(reference))
    elif estimator == 'cosine':
        norms = np.sqrt(np.einsum('ijk,ijk->jk', cube, cube))
        dots = np.tensordot(reference, cube, axes=(0, 0))
        defined = norms > 0
        with np.errstate(divide='ignore', invalid='ignore'):
            r = dots / (norms * np.sqrt(reference @ reference))
        return np.clip(r, -1.0, 1.0), defined

    raise ConfigError("Unknown correlation estimator '{}'".format(estimator),
                      detail="Known estimators: {}".format(', '.join(ESTIMATORS)),
                      reason=ConfigErrorReason.UNKNOWN_KIND)


def _check_factor(factor):
    if isinstance(factor, bool) or not isinstance(factor, (int, np.integer)) or factor not in UPSAMPLE_FACTORS:
        raise SpectralError("Unsupported upsampling factor: {}".format(factor),
                            detail="Supported factors: {}".format(', '.join(str(f) for f in UPSAMPLE_FACTORS)),
                            reason=SpectralErrorReason.BAD_FACTOR)
    return int(factor)


# upsample_nearest()
#
# Bring a coarse plane onto a finer grid by block replication.
#
# Args:
#    plane (numpy.ndarray): A 2-D array
#    factor (int): One of UPSAMPLE_FACTORS
#
# Returns:
#    (numpy.ndarray): A plane ``factor`` times larger along both axes
#
def upsample_nearest(plane, factor):
    factor = _check_factor(factor)
    plane = np.asarray(plane)
    if factor == 1:
        return plane.copy()
    return np.repeat(np.repeat(plane, factor, axis=0), factor, axis=1)


# upsample_bilinear()
#
# Bilinear upsampling, only meant for visual products since it
# invents values between source pixels.
#
def upsample_bilinear(plane, factor):
    factor = _check_factor(factor)
    plane = np.asarray(plane, dtype=np.float64)
    if factor == 1:
        return plane.copy()
    return ndimage.zoom(plane, factor, order=1, mode='nearest', grid_mode=True)


# harmonize()
#
# Resample every plane of a stack onto the finest grid present.
#
# Args:
#    stack (BandStack): The stack to harmonize
#    resampling (str): One of RESAMPLING_METHODS, masks always use
#                      nearest neighbour
#
# Returns:
#    (BandStack): A stack whose planes all share one grid
#
def harmonize(stack, resampling='nearest'):
    if resampling not in RESAMPLING_METHODS:
        raise ConfigError("Unknown resampling method '{}'".format(resampling),
                          reason=ConfigErrorReason.UNKNOWN_KIND)

    if stack.is_harmonized:
        return stack

    finest = min(stack.grid)
    fine_shapes = {plane.shape for plane, res in zip(stack.planes, stack.grid) if res == finest}
    if len(fine_shapes) != 1:
        raise SpectralError("Planes at {} m do not share one grid: {}".format(finest, sorted(fine_shapes)),
                            reason=SpectralErrorReason.INCONSISTENT_DIMS)
    fine_shape = fine_shapes.pop()

    upsample = upsample_nearest if resampling == 'nearest' else upsample_bilinear

    planes = []
    masks = []
    for band, plane, mask, res in zip(stack.wavelengths, stack.planes, stack.masks, stack.grid):
        ratio = res / finest
        factor = int(round(ratio))
        expected = (plane.shape[0] * factor, plane.shape[1] * factor)
        if abs(ratio - factor) > 1e-9 or factor not in UPSAMPLE_FACTORS or expected != fine_shape:
            raise SpectralError("Band {} at {} m has dimensions {} which do not fit the {} m grid {}"
                                .format(band.name, res, plane.shape, finest, fine_shape),
                                reason=SpectralErrorReason.INCONSISTENT_DIMS)
        planes.append(upsample(plane, factor))
        masks.append(upsample_nearest(mask, factor))

    header = None
    if stack._header is not None:
        old = stack._header
        header = RasterHeader(width=fine_shape[1], height=fine_shape[0], band_count=stack.band_count,
                              dtype=old.dtype, scale=old.scale, nodata=old.nodata, geo_tags=old.geo_tags)

    return BandStack(planes, stack.wavelengths, masks=masks, grid=(finest,) * len(planes),
                     header=header, calibrated=stack.calibrated)

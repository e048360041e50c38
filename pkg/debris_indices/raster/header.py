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

import math
from dataclasses import dataclass, field

import numpy as np

from .._exceptions import RasterError, RasterErrorReason, EvaluationError, EvaluationErrorReason


# Storage types of the supported raster subset
SUPPORTED_DTYPES = ('uint8', 'uint16', 'float32')

# Scale applied to uint16 payloads which do not declare one, this
# is the Sentinel-2 L1C quantification value
DEFAULT_UINT16_SCALE = 1.0 / 10000.0


# default_scale()
#
# Args:
#    dtype (str): A storage type from SUPPORTED_DTYPES
#
# Returns:
#    (float): The reflectance scale assumed for the storage type
#
def default_scale(dtype):
    if dtype == 'uint16':
        return DEFAULT_UINT16_SCALE
    return 1.0


# RasterHeader
#
# Storage description of a raster payload.
#
# Reflectance values are ``stored_value * scale``; pixels whose stored
# value equals ``nodata`` are invalid.
#
@dataclass(frozen=True)
class RasterHeader():
    width: int
    height: int
    band_count: int
    dtype: str = 'float32'
    scale: float = 1.0
    nodata: float = None

    # Geo-referencing TIFF tags carried through untouched, as
    # (code, datatype, count, value) tuples
    geo_tags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for name in ('width', 'height', 'band_count'):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise RasterError("Invalid raster {}: {}".format(name, value),
                                  reason=RasterErrorReason.CORRUPT_FILE)
        if self.dtype not in SUPPORTED_DTYPES:
            raise RasterError("Unsupported raster data type: {}".format(self.dtype),
                              reason=RasterErrorReason.DTYPE_MISMATCH)
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise RasterError("Raster scale must be positive, got {}".format(self.scale),
                              reason=RasterErrorReason.CORRUPT_FILE)

    @property
    def payload_size(self):
        return self.width * self.height * self.band_count

    # check_payload()
    #
    # Ensure that a payload matches the header exactly
    #
    # Args:
    #    payload (numpy.ndarray): A (bands, height, width) array
    #
    def check_payload(self, payload):
        if payload.shape != (self.band_count, self.height, self.width):
            raise RasterError("Payload of shape {} does not match header {}x{}x{}"
                              .format(payload.shape, self.band_count, self.height, self.width),
                              reason=RasterErrorReason.CORRUPT_FILE)
        if payload.dtype != np.dtype(self.dtype):
            raise RasterError("Payload type {} does not match declared type {}"
                              .format(payload.dtype, self.dtype),
                              reason=RasterErrorReason.DTYPE_MISMATCH)

    # nodata_mask()
    #
    # Args:
    #    stored (numpy.ndarray): Stored values
    #
    # Returns:
    #    (numpy.ndarray): Boolean array, True where the stored value is nodata
    #
    def nodata_mask(self, stored):
        mask = np.zeros(stored.shape, dtype=bool)
        if stored.dtype.kind == 'f':
            mask |= np.isnan(stored)
        if self.nodata is not None and not math.isnan(self.nodata):
            mask |= stored == stored.dtype.type(self.nodata)
        return mask

    # to_reflectance()
    #
    # Args:
    #    stored (numpy.ndarray): Stored values
    #
    # Returns:
    #    (numpy.ndarray): float64 reflectance
    #
    def to_reflectance(self, stored):
        reflectance = stored.astype(np.float64)
        if self.scale != 1.0:
            reflectance *= self.scale
        return reflectance

    # to_stored()
    #
    # The inverse of to_reflectance(), integer types are rounded
    # to the nearest stored value.
    #
    # Args:
    #    reflectance (numpy.ndarray): float64 reflectance
    #
    # Returns:
    #    (numpy.ndarray): Values in the storage type
    #
    def to_stored(self, reflectance):
        stored = np.asarray(reflectance, dtype=np.float64)
        if self.scale != 1.0:
            stored = stored / self.scale
        dtype = np.dtype(self.dtype)
        if dtype.kind == 'u':
            info = np.iinfo(dtype)
            stored = np.clip(np.rint(np.nan_to_num(stored, nan=0.0)), info.min, info.max)
        return stored.astype(dtype)


# LabeledScene
#
# A band stack and its ground truth on the same pixel grid
#
@dataclass(frozen=True)
class LabeledScene():
    stack: object
    truth: object
    scene_id: str = 'scene'

    def __post_init__(self):
        if (self.stack.height, self.stack.width) != (self.truth.height, self.truth.width):
            raise EvaluationError("Grid mismatch in scene '{}': truth grid {}x{} does not match stack grid {}x{}"
                                  .format(self.scene_id, self.truth.width, self.truth.height,
                                          self.stack.width, self.stack.height),
                                  reason=EvaluationErrorReason.GRID_MISMATCH)

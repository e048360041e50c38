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

"""Format dispatch

Files ending in ``.bsf`` are BSF, anything else is GeoTIFF. Masks are
recognised by content, BSF masks by their magic.
"""

import os

import numpy as np

from .._exceptions import RasterError, RasterErrorReason
from ..classifier import ClassMap
from ..spectral import FILL_VALUE
from .bsf import PRODUCT_WAVELENGTH, is_bsf, read_bsf, write_bsf, read_bsf_payload, write_bsf_payload
from .geotiff import read_geotiff, write_geotiff, read_tiff_payload, write_tiff_payload
from .header import RasterHeader


def is_bsf_path(path):
    return os.path.splitext(path)[1].lower() == '.bsf'


# read_raster()
#
# Args:
#    path (str): A GeoTIFF or BSF file
#    **kwargs: Passed on to read_geotiff() or read_bsf()
#
# Returns:
#    (BandStack): The stack
#
def read_raster(path, *, dtype=None, scale=None, sensor='s2a', band_order=None):
    if is_bsf_path(path):
        return read_bsf(path, dtype=dtype, scale=scale, sensor=sensor)
    return read_geotiff(path, dtype=dtype, scale=scale, sensor=sensor, band_order=band_order)


def write_stack(stack, path):
    if is_bsf_path(path):
        write_bsf(stack, path)
    else:
        write_geotiff(stack, path)


# read_mask()
#
# Read a single band integer raster holding class codes
#
# Args:
#    path (str): A GeoTIFF or BSF file
#
# Returns:
#    (ClassMap): The raw codes
#
def read_mask(path):
    if is_bsf(path):
        payload, header, _ = read_bsf_payload(path)
    else:
        payload, header, _ = read_tiff_payload(path, scale=1.0)

    if header.band_count != 1:
        raise RasterError("{}: Masks must have a single band, found {}".format(path, header.band_count),
                          reason=RasterErrorReason.NON_INTEGER_MASK)
    if payload.dtype.kind != 'u':
        raise RasterError("{}: Masks must hold integer codes, found {}".format(path, payload.dtype),
                          reason=RasterErrorReason.NON_INTEGER_MASK)

    return ClassMap(payload[0], raw=True)


# write_mask()
#
# Write a class map as single band uint8 raster
#
def write_mask(classmap, path):
    labels = classmap.labels
    if labels.min() < 0 or labels.max() > 255:
        raise RasterError("{}: Class codes outside the uint8 range".format(path),
                          reason=RasterErrorReason.DTYPE_MISMATCH)

    payload = labels.astype(np.uint8)[np.newaxis]
    header = RasterHeader(width=classmap.width, height=classmap.height, band_count=1, dtype='uint8')
    if is_bsf_path(path):
        write_bsf_payload(path, payload, header, [PRODUCT_WAVELENGTH])
    else:
        write_tiff_payload(path, payload, header)


# write_index()
#
# Write an index map as single band float32 raster, invalid
# pixels hold FILL_VALUE which is recorded as nodata
#
def write_index(index_map, path):
    payload = index_map.values.astype(np.float32)[np.newaxis]
    header = RasterHeader(width=index_map.width, height=index_map.height, band_count=1,
                          dtype='float32', nodata=FILL_VALUE)
    if is_bsf_path(path):
        write_bsf_payload(path, payload, header, [PRODUCT_WAVELENGTH])
    else:
        write_tiff_payload(path, payload, header)


# read_index_values()
#
# Args:
#    path (str): An index raster written by write_index()
#
# Returns:
#    (numpy.ndarray): float64 values
#    (numpy.ndarray): Boolean validity
#
def read_index_values(path):
    if is_bsf(path):
        payload, header, _ = read_bsf_payload(path)
    else:
        payload, header, _ = read_tiff_payload(path, scale=1.0)
    stored = payload[0]
    return header.to_reflectance(stored), ~header.nodata_mask(stored)

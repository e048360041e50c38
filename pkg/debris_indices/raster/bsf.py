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
bsf - Band-sequential format
============================

A minimal little-endian raster container:

========  =======  =========================================
Offset    Type     Field
========  =======  =========================================
0         4 bytes  magic ``BSF1``
4         u32      width
8         u32      height
12        u32      band count
16        u32      storage type (1 uint8, 2 uint16, 3 float32)
20        f64      reflectance scale
28        f64      nodata value, NaN when there is none
36        28 bytes reserved, zero
========  =======  =========================================

The header is followed by the band-sequential payload and then one f64
center wavelength (nm) per band. Nothing may follow the wavelengths.

Single band products such as class and index rasters record the
wavelength 0, they are read with read_mask() and read_index_values()
and not as band stacks.
"""

import math

import numpy as np

from .._exceptions import RasterError, RasterErrorReason
from .header import RasterHeader


MAGIC = b'BSF1'

HEADER_DTYPE = np.dtype([
    ('magic', 'S4'),
    ('width', '<u4'),
    ('height', '<u4'),
    ('band_count', '<u4'),
    ('dtype', '<u4'),
    ('scale', '<f8'),
    ('nodata', '<f8'),
    ('reserved', 'V28'),
])

HEADER_SIZE = HEADER_DTYPE.itemsize

DTYPE_CODES = {
    1: 'uint8',
    2: 'uint16',
    3: 'float32',
}

_CODES_BY_DTYPE = {name: code for code, name in DTYPE_CODES.items()}

# Wavelength recorded by single band products
PRODUCT_WAVELENGTH = 0.0


def is_bsf(path):
    try:
        with open(path, 'rb') as f:
            return f.read(len(MAGIC)) == MAGIC
    except OSError as e:
        raise RasterError("{}: Could not read file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e


# read_bsf_payload()
#
# Args:
#    path (str): The file to read
#    dtype (str): The declared storage type, if any
#    scale (float): A scale overriding the one recorded in the file
#
# Returns:
#    (numpy.ndarray): The stored (bands, height, width) payload
#    (RasterHeader): The header describing the payload
#    (numpy.ndarray): The f64 center wavelengths
#
def read_bsf_payload(path, dtype=None, scale=None):
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise RasterError("{}: Could not read file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e

    if data[:len(MAGIC)] != MAGIC:
        raise RasterError("{}: Not a BSF file".format(path),
                          detail="Expected magic {!r}, found {!r}".format(MAGIC, data[:len(MAGIC)]),
                          reason=RasterErrorReason.BAD_MAGIC)
    if len(data) < HEADER_SIZE:
        raise RasterError("{}: Truncated BSF header".format(path),
                          reason=RasterErrorReason.TRUNCATED_PAYLOAD)

    fields = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    code = int(fields['dtype'])
    if code not in DTYPE_CODES:
        raise RasterError("{}: Unknown BSF storage type code {}".format(path, code),
                          reason=RasterErrorReason.CORRUPT_FILE)
    stored_dtype = DTYPE_CODES[code]
    if dtype is not None and dtype != stored_dtype:
        raise RasterError("{}: Declared type {} but the file stores {}".format(path, dtype, stored_dtype),
                          reason=RasterErrorReason.DTYPE_MISMATCH)

    nodata = float(fields['nodata'])
    header = RasterHeader(
        width=int(fields['width']),
        height=int(fields['height']),
        band_count=int(fields['band_count']),
        dtype=stored_dtype,
        scale=float(fields['scale']) if scale is None else scale,
        nodata=None if math.isnan(nodata) else nodata
    )

    item = np.dtype(stored_dtype).newbyteorder('<')
    payload_bytes = header.payload_size * item.itemsize
    expected = HEADER_SIZE + payload_bytes + 8 * header.band_count
    if len(data) < expected:
        raise RasterError("{}: Truncated BSF payload".format(path),
                          detail="Expected {} bytes, found {}".format(expected, len(data)),
                          reason=RasterErrorReason.TRUNCATED_PAYLOAD)
    if len(data) > expected:
        raise RasterError("{}: {} unexpected bytes after the wavelength table"
                          .format(path, len(data) - expected),
                          reason=RasterErrorReason.CORRUPT_FILE)

    payload = np.frombuffer(data, dtype=item, count=header.payload_size, offset=HEADER_SIZE)
    payload = payload.reshape(header.band_count, header.height, header.width).astype(stored_dtype)
    wavelengths = np.frombuffer(data, dtype='<f8', count=header.band_count,
                                offset=HEADER_SIZE + payload_bytes).astype(np.float64)

    return payload, header, wavelengths


# write_bsf_payload()
#
# Args:
#    path (str): The file to write
#    payload (numpy.ndarray): The stored (bands, height, width) payload
#    header (RasterHeader): The header describing the payload
#    wavelengths (sequence): One center wavelength per band
#
def write_bsf_payload(path, payload, header, wavelengths):
    header.check_payload(payload)
    wavelengths = np.asarray(wavelengths, dtype='<f8')
    if wavelengths.shape != (header.band_count,):
        raise RasterError("{}: {} wavelengths for {} bands".format(path, wavelengths.size, header.band_count),
                          reason=RasterErrorReason.MISSING_WAVELENGTHS)

    fields = np.zeros(1, dtype=HEADER_DTYPE)
    fields['magic'] = MAGIC
    fields['width'] = header.width
    fields['height'] = header.height
    fields['band_count'] = header.band_count
    fields['dtype'] = _CODES_BY_DTYPE[header.dtype]
    fields['scale'] = header.scale
    fields['nodata'] = math.nan if header.nodata is None else header.nodata

    item = np.dtype(header.dtype).newbyteorder('<')
    try:
        with open(path, 'wb') as f:
            f.write(fields.tobytes())
            f.write(payload.astype(item, copy=False).tobytes(order='C'))
            f.write(wavelengths.tobytes())
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e


# read_bsf()
#
# Read a band stack from a BSF file. Bands are named after the
# sensor band whose center wavelength they match.
#
# Args:
#    path (str): The file to read
#    dtype (str): The declared storage type, a mismatch is an error
#    scale (float): Reflectance scale overriding the recorded one
#    sensor (str|WavelengthTable): The sensor to match wavelengths against
#
# Returns:
#    (BandStack): The stack, bands in stored order
#
def read_bsf(path, *, dtype=None, scale=None, sensor='s2a'):
    from ..spectral import WavelengthTable
    from .geotiff import payload_to_stack

    payload, header, wavelengths = read_bsf_payload(path, dtype=dtype, scale=scale)
    if PRODUCT_WAVELENGTH in wavelengths:
        raise RasterError("{}: Not a band stack, the file holds a class or index raster".format(path),
                          detail="Class rasters are read as masks, index rasters as index values",
                          reason=RasterErrorReason.MISSING_WAVELENGTHS)
    table = WavelengthTable.from_wavelengths(wavelengths, sensor)
    return payload_to_stack(payload, header, table, path)


# write_bsf()
#
# Args:
#    stack (BandStack): A harmonized stack
#    path (str): The file to write
#
def write_bsf(stack, path):
    from .geotiff import stack_to_payload

    payload, header = stack_to_payload(stack)
    write_bsf_payload(path, payload, header, stack.wavelengths.wavelengths)

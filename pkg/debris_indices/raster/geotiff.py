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
geotiff - GeoTIFF subset
========================

Reading and writing of a declared GeoTIFF subset with ``tifffile``:

* classic TIFF, no BigTIFF
* a single image, no overviews and no SubIFDs
* 1 to 16 samples per pixel, stored as uint8, uint16 or float32
* no compression or Deflate, without predictor
* striped or tiled layout

Anything else raises :class:`RasterError` with reason
``unsupported-tiff-feature`` naming the offending tag.

Scale, nodata and band metadata travel in the GDAL tags
(``GDAL_METADATA`` 42112, ``GDAL_NODATA`` 42113), geo-referencing tags are
carried through as opaque values.
"""

import math
import xml.etree.ElementTree as ET

import numpy as np
import tifffile

from .._exceptions import RasterError, RasterErrorReason
from .._message import get_logger
from .header import RasterHeader, SUPPORTED_DTYPES, default_scale


GDAL_METADATA_TAG = 42112
GDAL_NODATA_TAG = 42113

# ModelPixelScale, ModelTiepoint, ModelTransformation,
# GeoKeyDirectory, GeoDoubleParams, GeoAsciiParams
GEO_TAGS = (33550, 33922, 34264, 34735, 34736, 34737)

MAX_SAMPLES = 16

_COMPRESSIONS = (1, 8, 32946)

logger = get_logger('raster')


def _unsupported(path, feature, detail=None):
    return RasterError("{}: Unsupported TIFF feature: {}".format(path, feature),
                       detail=detail,
                       reason=RasterErrorReason.UNSUPPORTED_TIFF_FEATURE)


# Parse the GDAL_METADATA XML into (dataset items, per sample items)
def _parse_gdal_metadata(path, text):
    dataset = {}
    samples = {}
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise RasterError("{}: Malformed GDAL_METADATA tag".format(path), detail=str(e),
                          reason=RasterErrorReason.CORRUPT_FILE) from e

    for item in root.iter('Item'):
        name = item.get('name', '').upper()
        value = (item.text or '').strip()
        sample = item.get('sample')
        if sample is None:
            dataset[name] = value
        else:
            samples.setdefault(int(sample), {})[name] = value
    return dataset, samples


def _format_gdal_metadata(header, wavelengths):
    root = ET.Element('GDALMetadata')

    def add(name, value, sample=None, role=None):
        item = ET.SubElement(root, 'Item', name=name)
        if sample is not None:
            item.set('sample', str(sample))
        if role is not None:
            item.set('role', role)
        item.text = value

    for idx in range(header.band_count):
        add('SCALE', repr(header.scale), sample=idx, role='scale')
        if wavelengths is not None:
            band = wavelengths[idx]
            add('BAND', band.name, sample=idx)
            add('DESCRIPTION', band.descriptor, sample=idx, role='description')
            add('WAVELENGTH', repr(band.wavelength), sample=idx)
            add('RESOLUTION', str(band.resolution), sample=idx)

    return ET.tostring(root, encoding='unicode')


# read_tiff_payload()
#
# Read the raw payload of a TIFF in the supported subset
#
# Args:
#    path (str): The file to read
#    dtype (str): The declared storage type, if any
#    scale (float): A scale overriding the one recorded in the file
#
# Returns:
#    (numpy.ndarray): The stored (bands, height, width) payload
#    (RasterHeader): The header describing the payload
#    (dict): Per sample GDAL metadata items
#
def read_tiff_payload(path, dtype=None, scale=None):
    try:
        with tifffile.TiffFile(path) as tif:
            if tif.is_bigtiff:
                raise _unsupported(path, 'BigTIFF')
            if len(tif.pages) != 1:
                raise _unsupported(path, 'multiple IFDs',
                                   detail="Found {} images, overviews and pages are not supported"
                                   .format(len(tif.pages)))

            page = tif.pages[0]
            if page.subifds:
                raise _unsupported(path, 'SubIFDs')
            if int(page.compression) not in _COMPRESSIONS:
                raise _unsupported(path, 'Compression', detail="Compression {} is not supported"
                                   .format(page.compression.name))
            if int(page.predictor) != 1:
                raise _unsupported(path, 'Predictor')
            if not 1 <= page.samplesperpixel <= MAX_SAMPLES:
                raise _unsupported(path, 'SamplesPerPixel',
                                   detail="{} samples, at most {} are supported"
                                   .format(page.samplesperpixel, MAX_SAMPLES))

            stored_dtype = str(page.dtype) if page.dtype is not None else None
            if stored_dtype not in SUPPORTED_DTYPES:
                raise _unsupported(path, 'SampleFormat/BitsPerSample',
                                   detail="Storage type {} is not supported".format(stored_dtype))
            if dtype is not None and dtype != stored_dtype:
                raise RasterError("{}: Declared type {} but the file stores {}"
                                  .format(path, dtype, stored_dtype),
                                  reason=RasterErrorReason.DTYPE_MISMATCH)

            data = page.asarray()
            axes = page.axes
            tags = {tag.code: tag for tag in page.tags.values()}

    except tifffile.TiffFileError as e:
        raise RasterError("{}: Not a readable TIFF file".format(path), detail=str(e),
                          reason=RasterErrorReason.CORRUPT_FILE) from e
    except OSError as e:
        raise RasterError("{}: Could not read file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e

    if 'S' in axes:
        data = np.moveaxis(data, axes.index('S'), 0)
    else:
        data = data[np.newaxis]
    if data.ndim != 3:
        raise _unsupported(path, 'ImageDepth', detail="Unexpected axes '{}'".format(axes))
    data = np.ascontiguousarray(data)

    nodata = None
    if GDAL_NODATA_TAG in tags:
        text = str(tags[GDAL_NODATA_TAG].value).strip().rstrip('\x00')
        try:
            nodata = float(text)
        except ValueError as e:
            raise RasterError("{}: Malformed GDAL_NODATA tag '{}'".format(path, text),
                              reason=RasterErrorReason.CORRUPT_FILE) from e

    samples = {}
    if GDAL_METADATA_TAG in tags:
        _, samples = _parse_gdal_metadata(path, tags[GDAL_METADATA_TAG].value)

    if scale is None:
        recorded = samples.get(0, {}).get('SCALE')
        scale = float(recorded) if recorded else default_scale(str(data.dtype))

    geo_tags = tuple(
        (code, int(tags[code].dtype), tags[code].count, tags[code].value)
        for code in GEO_TAGS if code in tags
    )

    header = RasterHeader(width=data.shape[2], height=data.shape[1], band_count=data.shape[0],
                          dtype=str(data.dtype), scale=scale, nodata=nodata, geo_tags=geo_tags)
    header.check_payload(data)

    return data, header, samples


# write_tiff_payload()
#
# Args:
#    path (str): The file to write
#    payload (numpy.ndarray): The stored (bands, height, width) payload
#    header (RasterHeader): The header describing the payload
#    wavelengths (WavelengthTable): The band metadata to record, if any
#    compress (bool): Whether to Deflate compress the payload
#
def write_tiff_payload(path, payload, header, wavelengths=None, compress=False):
    header.check_payload(payload)

    extratags = [(GDAL_METADATA_TAG, 's', 0, _format_gdal_metadata(header, wavelengths), True)]
    if header.nodata is not None:
        extratags.append((GDAL_NODATA_TAG, 's', 0, repr(float(header.nodata)), True))
    for code, datatype, count, value in header.geo_tags:
        extratags.append((code, datatype, count, value, True))

    kwargs = {
        'photometric': 'minisblack',
        'metadata': None,
        'extratags': extratags,
        'compression': 'zlib' if compress else None
    }
    if header.band_count == 1:
        data = payload[0]
    else:
        data = payload
        kwargs['planarconfig'] = 'separate'

    try:
        tifffile.imwrite(path, data, **kwargs)
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e


def _table_from_metadata(samples, band_count):
    # Imported here, the spectral model depends on this package
    from ..spectral import BandInfo, WavelengthTable

    bands = []
    for idx in range(band_count):
        items = samples.get(idx, {})
        if not all(key in items for key in ('BAND', 'WAVELENGTH', 'RESOLUTION')):
            return None
        bands.append(BandInfo(items['BAND'], items.get('DESCRIPTION', ''),
                              float(items['WAVELENGTH']), int(items['RESOLUTION'])))
    return WavelengthTable(bands)


# payload_to_stack()
#
# Convert a stored payload into a BandStack
#
# Args:
#    payload (numpy.ndarray): The stored (bands, height, width) payload
#    header (RasterHeader): The header describing the payload
#    wavelengths (WavelengthTable): The band table
#    path (str): The source of the payload, for logging
#
def payload_to_stack(payload, header, wavelengths, path):
    from ..spectral import BandStack

    planes = []
    masks = []
    calibrated = True
    for stored in payload:
        mask = ~header.nodata_mask(stored)
        plane = header.to_reflectance(stored)
        if np.any(plane[mask] < 0):
            calibrated = False
        planes.append(plane)
        masks.append(mask)

    if not calibrated:
        logger.warning("%s: Raster holds negative reflectance, treating it as uncalibrated", path)

    return BandStack(planes, wavelengths, masks=masks, header=header, calibrated=calibrated)


# stack_to_payload()
#
# Convert a harmonized BandStack to its stored payload. Invalid
# pixels are stored as the nodata value, or NaN for float payloads
# without nodata.
#
# Returns:
#    (numpy.ndarray): The stored payload
#    (RasterHeader): The header of the payload
#
def stack_to_payload(stack):
    header = stack.header
    if (header.height, header.width) != stack.shape or header.band_count != stack.band_count:
        header = RasterHeader(width=stack.width, height=stack.height, band_count=stack.band_count,
                              dtype=header.dtype, scale=header.scale, nodata=header.nodata,
                              geo_tags=header.geo_tags)

    any_invalid = not all(mask.all() for mask in stack.masks)
    if any_invalid and header.nodata is None and np.dtype(header.dtype).kind == 'u':
        logger.warning("Integer raster without nodata value holds invalid pixels, storing them as 0")
        header = RasterHeader(width=header.width, height=header.height, band_count=header.band_count,
                              dtype=header.dtype, scale=header.scale, nodata=0.0,
                              geo_tags=header.geo_tags)

    payload = header.to_stored(stack.cube())
    for idx, mask in enumerate(stack.masks):
        if not mask.all():
            fill = header.nodata if header.nodata is not None else math.nan
            payload[idx][~mask] = payload.dtype.type(fill)

    return payload, header


# read_geotiff()
#
# Read a band stack from a GeoTIFF
#
# Args:
#    path (str): The file to read
#    dtype (str): The declared storage type, a mismatch is an error
#    scale (float): Reflectance scale overriding the recorded one
#    sensor (str|WavelengthTable): Sensor for files without band metadata
#    band_order (list): Band names for files without band metadata
#
# Returns:
#    (BandStack): The stack, bands in stored order
#
def read_geotiff(path, *, dtype=None, scale=None, sensor='s2a', band_order=None):
    from ..spectral import WavelengthTable

    payload, header, samples = read_tiff_payload(path, dtype=dtype, scale=scale)

    wavelengths = None
    if band_order is None:
        wavelengths = _table_from_metadata(samples, header.band_count)
    if wavelengths is None:
        wavelengths = WavelengthTable.for_band_count(header.band_count, sensor, band_order)

    logger.debug("%s: %d bands of %dx%d %s, scale %r", path, header.band_count,
                 header.width, header.height, header.dtype, header.scale)
    return payload_to_stack(payload, header, wavelengths, path)


# write_geotiff()
#
# Write a harmonized band stack to a GeoTIFF
#
# Args:
#    stack (BandStack): The stack to write
#    path (str): The file to write
#    compress (bool): Whether to Deflate compress the payload
#
def write_geotiff(stack, path, *, compress=False):
    payload, header = stack_to_payload(stack)
    write_tiff_payload(path, payload, header, wavelengths=stack.wavelengths, compress=compress)

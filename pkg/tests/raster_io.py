import os

import numpy as np
import pytest
import tifffile

from debris_indices._exceptions import ConfigError, ConfigErrorReason, EvaluationError, EvaluationErrorReason
from debris_indices._exceptions import RasterError, RasterErrorReason
from debris_indices.classifier import ClassMap
from debris_indices.raster.bsf import HEADER_SIZE, read_bsf_payload
from debris_indices.raster.files import (
    read_raster, write_stack, read_mask, write_mask, write_index, read_index_values
)
from debris_indices.raster.geotiff import read_geotiff
from debris_indices.raster.header import LabeledScene, RasterHeader
from debris_indices.spectral import FILL_VALUE, BandStack, IndexMap, WavelengthTable


MARIDA_BANDS = ('B1', 'B2', 'B3', 'B4', 'B5', 'B6', 'B7', 'B8', 'B8A', 'B11', 'B12')


def random_stack(height=12, width=10, bands=MARIDA_BANDS, seed=0, **kwargs):
    rng = np.random.default_rng(seed)
    table = WavelengthTable.builtin('s2a').select(bands)
    planes = rng.uniform(0.0, 0.5, size=(len(bands), height, width)).astype(np.float32)
    return BandStack(planes, table, **kwargs)


@pytest.mark.parametrize('filename', ['stack.tif', 'stack.bsf'])
def test_float_roundtrip(tmpdir, filename):
    path = os.path.join(str(tmpdir), filename)
    stack = random_stack()

    write_stack(stack, path)
    loaded = read_raster(path)

    assert loaded.wavelengths.names == MARIDA_BANDS
    assert loaded.shape == stack.shape
    for original, read in zip(stack.planes, loaded.planes):
        assert np.array_equal(original, read)


def test_float_nodata_roundtrip(tmpdir):
    path = os.path.join(str(tmpdir), 'holes.tif')
    stack = random_stack(bands=['B4', 'B8'])
    masks = [np.ones(stack.shape, dtype=bool), np.ones(stack.shape, dtype=bool)]
    masks[1][3, 4] = False

    write_stack(stack.with_planes(stack.planes, masks=masks), path)
    loaded = read_raster(path)

    assert loaded.band_mask('B4').all()
    assert not loaded.band_mask('B8')[3, 4]
    assert np.count_nonzero(~loaded.valid) == 1


def test_uint16_scale(tmpdir):
    path = os.path.join(str(tmpdir), 'uint16.tif')
    stored = np.arange(2 * 4 * 5, dtype=np.uint16).reshape(2, 4, 5) * 100
    header = RasterHeader(width=5, height=4, band_count=2, dtype='uint16', scale=1e-4)
    table = WavelengthTable.builtin('s2a').select(['B4', 'B8'])
    stack = BandStack([header.to_reflectance(plane) for plane in stored], table, header=header)

    write_stack(stack, path)
    loaded = read_raster(path)

    assert loaded.header.dtype == 'uint16'
    assert loaded.header.scale == pytest.approx(1e-4)
    assert np.allclose(loaded.band('B8'), stored[1] * 1e-4)

    # An explicit scale overrides the recorded one
    rescaled = read_raster(path, scale=1.0)
    assert np.array_equal(rescaled.band('B8'), stored[1].astype(np.float64))


def test_unmarked_uint16_uses_default_scale(tmpdir):
    path = os.path.join(str(tmpdir), 'plain.tif')
    tifffile.imwrite(path, np.full((11, 3, 3), 1000, dtype=np.uint16), photometric='minisblack',
                     planarconfig='separate', metadata=None)

    stack = read_geotiff(path)
    assert stack.wavelengths.names == MARIDA_BANDS
    assert np.allclose(stack.band('B2'), 0.1)


def test_band_order_required(tmpdir):
    path = os.path.join(str(tmpdir), 'seven.tif')
    tifffile.imwrite(path, np.ones((7, 3, 3), dtype=np.float32), photometric='minisblack',
                     planarconfig='separate', metadata=None)

    with pytest.raises(ConfigError) as exc:
        read_geotiff(path)
    assert exc.value.reason == ConfigErrorReason.MISSING_BAND_ORDER

    order = ['B2', 'B3', 'B4', 'B6', 'B8', 'B11', 'B12']
    stack = read_geotiff(path, band_order=order)
    assert stack.wavelengths.names == tuple(order)


def test_bigtiff_rejected(tmpdir):
    path = os.path.join(str(tmpdir), 'big.tif')
    tifffile.imwrite(path, np.ones((2, 4, 4), dtype=np.float32), bigtiff=True,
                     photometric='minisblack', planarconfig='separate', metadata=None)

    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.UNSUPPORTED_TIFF_FEATURE


def test_multiple_pages_rejected(tmpdir):
    path = os.path.join(str(tmpdir), 'pages.tif')
    tifffile.imwrite(path, np.ones((4, 4), dtype=np.float32), metadata=None)
    tifffile.imwrite(path, np.ones((4, 4), dtype=np.float32), metadata=None, append=True)

    with pytest.raises(RasterError) as exc:
        read_raster(path, band_order=['B4'])
    assert exc.value.reason == RasterErrorReason.UNSUPPORTED_TIFF_FEATURE


def test_unsupported_dtype(tmpdir):
    path = os.path.join(str(tmpdir), 'int32.tif')
    tifffile.imwrite(path, np.ones((4, 4), dtype=np.int32), metadata=None)

    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.UNSUPPORTED_TIFF_FEATURE


def test_declared_dtype_mismatch(tmpdir):
    path = os.path.join(str(tmpdir), 'stack.tif')
    write_stack(random_stack(), path)

    with pytest.raises(RasterError) as exc:
        read_raster(path, dtype='uint16')
    assert exc.value.reason == RasterErrorReason.DTYPE_MISMATCH


def test_missing_file(tmpdir):
    with pytest.raises(RasterError) as exc:
        read_raster(os.path.join(str(tmpdir), 'absent.tif'))
    assert exc.value.reason == RasterErrorReason.IO_FAILURE


def test_not_a_tiff(tmpdir):
    path = os.path.join(str(tmpdir), 'garbage.tif')
    with open(path, 'wb') as f:
        f.write(b'definitely not a tiff file')

    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.CORRUPT_FILE


def test_geo_tags_preserved(tmpdir):
    source = os.path.join(str(tmpdir), 'geo.tif')
    copy = os.path.join(str(tmpdir), 'copy.tif')
    tifffile.imwrite(source, np.ones((11, 4, 4), dtype=np.float32), photometric='minisblack',
                     planarconfig='separate', metadata=None,
                     extratags=[(33550, 'd', 3, (10.0, 10.0, 0.0), True)])

    stack = read_raster(source)
    assert [tag[0] for tag in stack.header.geo_tags] == [33550]

    write_stack(stack, copy)
    with tifffile.TiffFile(copy) as tif:
        assert tuple(tif.pages[0].tags[33550].value) == (10.0, 10.0, 0.0)


def test_bsf_bad_magic(tmpdir):
    path = os.path.join(str(tmpdir), 'stack.bsf')
    with open(path, 'wb') as f:
        f.write(b'TIFF' + bytes(100))

    with pytest.raises(RasterError) as exc:
        read_bsf_payload(path)
    assert exc.value.reason == RasterErrorReason.BAD_MAGIC


def test_bsf_truncated(tmpdir):
    path = os.path.join(str(tmpdir), 'stack.bsf')
    write_stack(random_stack(), path)
    with open(path, 'rb') as f:
        data = f.read()
    with open(path, 'wb') as f:
        f.write(data[:-9])

    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.TRUNCATED_PAYLOAD

    # Not even a header
    with open(path, 'wb') as f:
        f.write(data[:HEADER_SIZE - 1])
    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.TRUNCATED_PAYLOAD


def test_bsf_trailing_bytes(tmpdir):
    path = os.path.join(str(tmpdir), 'stack.bsf')
    write_stack(random_stack(), path)
    with open(path, 'ab') as f:
        f.write(b'\0')

    with pytest.raises(RasterError) as exc:
        read_raster(path)
    assert exc.value.reason == RasterErrorReason.CORRUPT_FILE


def test_bsf_names_bands_by_wavelength(tmpdir):
    path = os.path.join(str(tmpdir), 'stack.bsf')
    write_stack(random_stack(bands=['B8', 'B4', 'B11']), path)

    assert read_raster(path).wavelengths.names == ('B8', 'B4', 'B11')


@pytest.mark.parametrize('filename', ['mask.tif', 'mask.bsf'])
def test_mask_roundtrip(tmpdir, filename):
    path = os.path.join(str(tmpdir), filename)
    labels = np.arange(6 * 7, dtype=np.uint8).reshape(6, 7) % 16

    write_mask(ClassMap(labels, raw=True), path)
    mask = read_mask(path)

    assert mask.raw
    assert np.array_equal(mask.labels, labels)


def test_float_mask_rejected(tmpdir):
    path = os.path.join(str(tmpdir), 'float.tif')
    tifffile.imwrite(path, np.ones((4, 4), dtype=np.float32), metadata=None)

    with pytest.raises(RasterError) as exc:
        read_mask(path)
    assert exc.value.reason == RasterErrorReason.NON_INTEGER_MASK


def test_index_fill_value(tmpdir):
    path = os.path.join(str(tmpdir), 'index.tif')
    values = np.linspace(-1.0, 1.0, 12).reshape(3, 4)
    valid = np.ones((3, 4), dtype=bool)
    valid[1, 2] = False

    write_index(IndexMap('ndvi', values, valid), path)
    read, read_valid = read_index_values(path)

    assert np.array_equal(read_valid, valid)
    assert read[1, 2] == FILL_VALUE
    assert np.allclose(read[valid], values[valid].astype(np.float32))


def test_bsf_products_are_not_stacks(tmpdir):
    mask_path = os.path.join(str(tmpdir), 'classes.bsf')
    index_path = os.path.join(str(tmpdir), 'fdi.bsf')
    write_mask(ClassMap(np.ones((3, 4), dtype=np.uint8)), mask_path)
    write_index(IndexMap('fdi', np.full((3, 4), 0.05), np.ones((3, 4), dtype=bool)), index_path)

    for path in (mask_path, index_path):
        with pytest.raises(RasterError) as exc:
            read_raster(path)
        assert exc.value.reason == RasterErrorReason.MISSING_WAVELENGTHS
        assert 'class or index raster' in str(exc.value)

    assert read_mask(mask_path).labels.tolist() == [[1] * 4] * 3
    values, valid = read_index_values(index_path)
    assert valid.all()
    assert np.allclose(values, 0.05)


def test_labeled_scene_grid_mismatch():
    stack = random_stack(height=8, width=8)
    with pytest.raises(EvaluationError) as exc:
        LabeledScene(stack, ClassMap(np.ones((8, 9), dtype=np.uint8), raw=True))
    assert exc.value.reason == EvaluationErrorReason.GRID_MISMATCH

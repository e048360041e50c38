import os

import numpy as np
import pytest
from PIL import Image

from debris_indices._exceptions import ConfigError, ConfigErrorReason, RasterError, RasterErrorReason
from debris_indices.classifier import ClassMap, DEBRIS, FLOATING_OTHER, UNDETERMINED, WAKE, WATER
from debris_indices.render import palette_table, write_overlay, write_quicklook


def test_palette_table():
    table = palette_table({'wake': '#010203'})

    assert len(table) == 768
    assert table[3 * WAKE:3 * WAKE + 3] == [1, 2, 3]
    assert table[3 * DEBRIS:3 * DEBRIS + 3] == [0xFF, 0xFF, 0xB2]
    assert table[3 * UNDETERMINED:3 * UNDETERMINED + 3] == [0xBD, 0xBD, 0xBD]


@pytest.mark.parametrize('palette,reason', [
    ({'plastic': '#FF0000'}, ConfigErrorReason.INVALID_KEY),
    ({'debris': '#F00'}, ConfigErrorReason.INVALID_VALUE),
    ({'debris': '#GG0000'}, ConfigErrorReason.INVALID_VALUE),
])
def test_invalid_palette(palette, reason):
    with pytest.raises(ConfigError) as exc:
        palette_table(palette)
    assert exc.value.reason == reason


def test_write_overlay(tmpdir):
    labels = np.array([[WATER, DEBRIS, FLOATING_OTHER], [WAKE, UNDETERMINED, WATER]], dtype=np.uint8)
    path = os.path.join(str(tmpdir), 'classes.png')

    write_overlay(ClassMap(labels), path)

    image = Image.open(path)
    assert image.mode == 'P'
    assert image.size == (3, 2)
    assert np.array_equal(np.asarray(image), labels)


def test_overlay_rejects_truth(tmpdir):
    truth = ClassMap(np.array([[1, 255]], dtype=np.uint8))
    with pytest.raises(RasterError) as exc:
        write_overlay(truth, os.path.join(str(tmpdir), 'truth.png'))
    assert exc.value.reason == RasterErrorReason.NON_INTEGER_MASK


def test_write_quicklook(tmpdir, plastic_scene):
    path = os.path.join(str(tmpdir), 'rgb.png')

    write_quicklook(plastic_scene.stack, path)

    image = np.asarray(Image.open(path))
    assert image.shape == (64, 64, 3)
    assert image.dtype == np.uint8
    assert image.max() == 255
    assert image.min() == 0

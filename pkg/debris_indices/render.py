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

"""PNG products

Class maps are written as palette PNGs, one pixel per raster pixel.
True colour quicklooks are stretched to 8 bits and may be resampled
bilinearly, they are for viewing only.
"""

import numpy as np
from PIL import Image

from ._exceptions import ConfigError, ConfigErrorReason, RasterError, RasterErrorReason
from .classifier import CLASS_CODES, PREDICTION_CODES
from .spectral import harmonize

DEFAULT_PALETTE = {
    'water': '#08306B',
    'debris': '#FFFFB2',
    'floating_other': '#6BAED6',
    'wake': '#FED976',
    'undetermined': '#BDBDBD',
}


def _parse_color(name, value):
    text = value.lstrip('#')
    if len(text) != 6:
        raise ConfigError("Invalid colour for {}: '{}'".format(name, value),
                          detail="Colours are given as #RRGGBB",
                          reason=ConfigErrorReason.INVALID_VALUE)
    try:
        return tuple(int(text[idx:idx + 2], 16) for idx in (0, 2, 4))
    except ValueError as e:
        raise ConfigError("Invalid colour for {}: '{}'".format(name, value),
                          reason=ConfigErrorReason.INVALID_VALUE) from e


# palette_table()
#
# Args:
#    palette (dict): Class name to #RRGGBB colour, missing classes
#                    take the default colour
#
# Returns:
#    (list): A flat 768 entry PIL palette indexed by class code
#
def palette_table(palette=None):
    colors = dict(DEFAULT_PALETTE)
    if palette:
        unknown = [name for name in palette if name not in DEFAULT_PALETTE]
        if unknown:
            raise ConfigError("Palette names unknown class(es): {}".format(', '.join(unknown)),
                              detail="Known classes: {}".format(', '.join(DEFAULT_PALETTE)),
                              reason=ConfigErrorReason.INVALID_KEY)
        colors.update(palette)

    table = [0] * 768
    for name, value in colors.items():
        code = CLASS_CODES[name]
        table[3 * code:3 * code + 3] = _parse_color(name, value)
    return table


# write_overlay()
#
# Args:
#    classmap (ClassMap): A prediction map
#    path (str): The PNG to write
#    palette (dict): Colour overrides
#
def write_overlay(classmap, path, palette=None):
    labels = classmap.labels
    if np.setdiff1d(np.unique(labels), PREDICTION_CODES).size:
        raise RasterError("{}: Only prediction maps can be rendered".format(path),
                          reason=RasterErrorReason.NON_INTEGER_MASK)

    image = Image.frombytes('P', (classmap.width, classmap.height), labels.astype(np.uint8).tobytes())
    image.putpalette(palette_table(palette))
    try:
        image.save(path, format='PNG')
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e


# write_quicklook()
#
# Write a true colour PNG of a stack, stretched linearly between
# the 2nd and 98th percentile of valid pixels per band.
#
# Args:
#    stack (BandStack): The stack, harmonized bilinearly if needed
#    path (str): The PNG to write
#    bands (tuple): The red, green and blue band keys
#
def write_quicklook(stack, path, bands=('B4', 'B3', 'B2')):
    stack = harmonize(stack, resampling='bilinear')
    valid = stack.valid

    channels = []
    for key in bands:
        plane = stack.band(key)
        if valid.any():
            low, high = np.percentile(plane[valid], [2, 98])
        else:
            low, high = 0.0, 1.0
        if high <= low:
            high = low + 1.0
        scaled = np.clip((plane - low) / (high - low), 0.0, 1.0)
        channels.append(np.where(valid, np.rint(scaled * 255), 0).astype(np.uint8))

    image = Image.fromarray(np.dstack(channels))
    try:
        image.save(path, format='PNG')
    except OSError as e:
        raise RasterError("{}: Could not write file: {}".format(path, e),
                          reason=RasterErrorReason.IO_FAILURE) from e

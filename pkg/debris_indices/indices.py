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

"""Spectral indices

* **NDVI** ``(NIR - RED) / (NIR + RED)``
* **FDI** the NIR reflectance above a baseline interpolated between the
  red edge and the short wave infrared bands
* **WCI** the correlation of each pixel spectrum with a water reference
  spectrum, the water correlation index

All three return an :class:`~debris_indices.spectral.IndexMap` whose
validity is a subset of the input validity.
"""

import json
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from ._config import load_file, node_validate, node_get_member
from ._exceptions import (
    ConfigError, ConfigErrorReason, IndexComputeError, IndexErrorReason, SpectralError,
)
from ._message import get_logger
from .spectral import IndexMap, SpectralSignature, WavelengthTable, correlate_planes, correlation


PROVENANCES = ('file', 'mask', 'estimated', 'builtin')

FDI_DENOMINATORS = ('nir+red', 'swir1-red')

# Water pixels required to estimate a reference from a mask
MIN_WATER_PIXELS = 32

logger = get_logger('indices')


def _require_band(stack, key, index_name):
    try:
        return stack.index(key)
    except SpectralError as e:
        raise IndexComputeError("{} needs band {} which the stack does not carry".format(index_name, key),
                                detail="Stack bands: {}".format(', '.join(stack.wavelengths.names)),
                                reason=IndexErrorReason.MISSING_BAND) from e


def _band_valid(stack, keys):
    return np.logical_and.reduce([stack.band_mask(key) for key in keys])


@dataclass(frozen=True)
class FdiParams():
    """Parameters of the floating debris index

    The baseline under the NIR band is the red edge band plus the
    difference to the SWIR band scaled by a wavelength factor. With the
    ``nir+red`` denominator the factor is
    ``(nir - red) / (nir + red) * factor_scale``, with ``swir1-red`` it is
    ``(nir - red) / (swir1 - red) * factor_scale``.
    """

    lambda_nir: float = 832.8
    lambda_red: float = 664.6
    lambda_swir1: float = 1613.7
    nir_band: str = 'B8'
    baseline_lo_band: str = 'B6'
    baseline_hi_band: str = 'B11'
    factor_scale: float = 10.0
    denominator: str = 'nir+red'

    def __post_init__(self):
        if not (self.lambda_nir > self.lambda_red > 0):
            raise ConfigError("FDI wavelengths must satisfy nir > red > 0, got nir {} and red {}"
                              .format(self.lambda_nir, self.lambda_red),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if not (math.isfinite(self.factor_scale) and self.factor_scale > 0):
            raise ConfigError("FDI factor scale must be positive, got {}".format(self.factor_scale),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.denominator not in FDI_DENOMINATORS:
            raise ConfigError("Unknown FDI denominator '{}'".format(self.denominator),
                              detail="Known denominators: {}".format(', '.join(FDI_DENOMINATORS)),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if self.denominator == 'swir1-red' and not self.lambda_swir1 > self.lambda_red:
            raise ConfigError("FDI wavelengths must satisfy swir1 > red, got swir1 {} and red {}"
                              .format(self.lambda_swir1, self.lambda_red),
                              reason=ConfigErrorReason.INVALID_VALUE)

    # factor
    #
    # The multiplier applied to the SWIR minus red edge difference
    #
    @property
    def factor(self):
        if self.denominator == 'nir+red':
            ratio = (self.lambda_nir - self.lambda_red) / (self.lambda_nir + self.lambda_red)
        else:
            ratio = (self.lambda_nir - self.lambda_red) / (self.lambda_swir1 - self.lambda_red)
        return ratio * self.factor_scale

    # from_table()
    #
    # Take the wavelengths from a band table
    #
    # Args:
    #    table (WavelengthTable): The table of the sensor
    #    red_band (str): The red band
    #    **kwargs: Other FdiParams fields
    #
    @classmethod
    def from_table(cls, table, red_band='B4', **kwargs):
        nir_band = kwargs.get('nir_band', cls.nir_band)
        swir_band = kwargs.get('baseline_hi_band', cls.baseline_hi_band)
        return cls(lambda_nir=table.get(nir_band).wavelength,
                   lambda_red=table.get(red_band).wavelength,
                   lambda_swir1=table.get(swir_band).wavelength,
                   **kwargs)

    @classmethod
    def from_node(cls, node, table=None, path='fdi'):
        node_validate(node, ['denominator', 'factor-scale', 'baseline-low', 'baseline-high',
                             'lambda-nir', 'lambda-red', 'lambda-swir1'], path=path)
        kwargs = {
            'denominator': node_get_member(node, str, 'denominator', cls.denominator, path=path),
            'factor_scale': node_get_member(node, float, 'factor-scale', cls.factor_scale, path=path),
            'baseline_lo_band': node_get_member(node, str, 'baseline-low', cls.baseline_lo_band, path=path),
            'baseline_hi_band': node_get_member(node, str, 'baseline-high', cls.baseline_hi_band, path=path),
        }
        if table is None:
            table = WavelengthTable.builtin('s2a')
        params = cls.from_table(table, **kwargs)

        overrides = {
            'lambda_nir': node_get_member(node, float, 'lambda-nir', None, path=path),
            'lambda_red': node_get_member(node, float, 'lambda-red', None, path=path),
            'lambda_swir1': node_get_member(node, float, 'lambda-swir1', None, path=path),
        }
        overrides = {key: value for key, value in overrides.items() if value is not None}
        if overrides:
            params = dataclasses.replace(params, **overrides)
        return params


class WaterReference():
    """The spectrum of clean water the WCI correlates against

    Args:
       signature (SpectralSignature): The water spectrum
       provenance (str): Where the spectrum comes from, one of PROVENANCES
    """

    def __init__(self, signature, provenance):
        if provenance not in PROVENANCES:
            raise IndexComputeError("Unknown water reference provenance '{}'".format(provenance),
                                    reason=IndexErrorReason.BAD_REFERENCE)
        _check_reference_variance(signature)
        self.signature = signature
        self.provenance = provenance

    def __repr__(self):
        return 'WaterReference({}, {})'.format(self.provenance, ', '.join(self.signature.band_ids))

    @property
    def band_ids(self):
        return self.signature.band_ids

    def to_node(self):
        return {
            'bands': list(self.signature.band_ids),
            'values': list(self.signature.values),
            'provenance': self.provenance
        }

    # save()
    #
    # Write the reference as JSON, floats are written with the shortest
    # representation which reads back to the identical value.
    #
    def save(self, path):
        try:
            with open(path, 'w') as f:
                json.dump(self.to_node(), f, indent=2)
                f.write('\n')
        except OSError as e:
            raise IndexComputeError("Could not write water reference {}: {}".format(path, e),
                                    reason=IndexErrorReason.BAD_REFERENCE) from e

    # load()
    #
    # Load a water reference from JSON or YAML, the loaded
    # reference has provenance ``file``.
    #
    @classmethod
    def load(cls, path):
        node = load_file(path)
        node_validate(node, ['bands', 'values', 'provenance'], path=path)
        bands = node_get_member(node, list, 'bands', path=path)
        values = node_get_member(node, list, 'values', path=path)
        try:
            signature = SpectralSignature(values, bands)
        except (SpectralError, TypeError, ValueError) as e:
            raise IndexComputeError("Invalid water reference {}".format(path), detail=str(e),
                                    reason=IndexErrorReason.BAD_REFERENCE) from e
        return cls(signature, 'file')


def _check_reference_variance(signature):
    try:
        correlation(signature, signature)
    except SpectralError as e:
        raise IndexComputeError("Water reference spectrum has zero variance",
                                detail="Bands: {}".format(', '.join(signature.band_ids)),
                                reason=IndexErrorReason.ZERO_VARIANCE_REFERENCE) from e


# ndvi()
#
# Args:
#    stack (BandStack): A harmonized stack
#    nir (str): The near infrared band
#    red (str): The red band
#
# Returns:
#    (IndexMap): The NDVI, invalid where NIR + RED is zero
#
def ndvi(stack, nir='B8', red='B4'):
    i_nir = stack.planes[_require_band(stack, nir, 'NDVI')]
    i_red = stack.planes[_require_band(stack, red, 'NDVI')]

    total = i_nir + i_red
    valid = _band_valid(stack, [nir, red]) & (total != 0)
    with np.errstate(divide='ignore', invalid='ignore'):
        values = (i_nir - i_red) / total

    return IndexMap('ndvi', values, valid)


# fdi()
#
# Args:
#    stack (BandStack): A harmonized stack
#    params (FdiParams): The index parameters, S2A wavelengths by default
#
# Returns:
#    (IndexMap): The floating debris index
#
def fdi(stack, params=None):
    if params is None:
        params = FdiParams()

    keys = [params.nir_band, params.baseline_lo_band, params.baseline_hi_band]
    i_nir, i_lo, i_hi = (stack.planes[_require_band(stack, key, 'FDI')] for key in keys)

    baseline = i_lo + (i_hi - i_lo) * params.factor
    values = i_nir - baseline

    return IndexMap('fdi', values, _band_valid(stack, keys))


# wci()
#
# Args:
#    stack (BandStack): A harmonized stack
#    ref (WaterReference): The water reference spectrum
#    band_subset (list): Bands to correlate over, defaults to every
#                        stack band the reference covers
#    estimator (str): The correlation estimator
#
# Returns:
#    (IndexMap): The water correlation index, invalid where the pixel
#                spectrum is constant
#
def wci(stack, ref, band_subset=None, estimator='pearson'):
    reference = ref.signature if isinstance(ref, WaterReference) else ref
    covered = {band.lower() for band in reference.band_ids}

    if band_subset is None:
        band_subset = [name for name in stack.wavelengths.names if name.lower() in covered]
    else:
        band_subset = [stack.wavelengths[_require_band(stack, key, 'WCI')].name for key in band_subset]

    missing = [name for name in band_subset if name.lower() not in covered]
    if missing:
        raise IndexComputeError("Water reference does not cover band(s): {}".format(', '.join(missing)),
                                reason=IndexErrorReason.MISSING_BAND)
    if len(band_subset) < 2:
        raise IndexComputeError("WCI needs at least 2 bands shared by the stack and the water reference",
                                detail="Reference bands: {}".format(', '.join(reference.band_ids)),
                                reason=IndexErrorReason.MISSING_BAND)

    reference = reference.select(band_subset)
    _check_reference_variance(reference)

    r, defined = correlate_planes(stack.cube(band_subset), reference.as_array(), estimator)
    return IndexMap('wci', r, _band_valid(stack, band_subset) & defined)


# estimate_water_signature()
#
# Estimate the water spectrum of a scene as the per band median over
# water pixels. Without a water mask, the darkest vegetation quartile
# (lowest NDVI) of valid pixels is taken as water.
#
# Args:
#    stack (BandStack): A harmonized stack
#    water_mask (numpy.ndarray): Optional boolean mask of known water
#
# Returns:
#    (WaterReference): With provenance ``mask`` or ``estimated``
#
def estimate_water_signature(stack, water_mask=None):
    cube = stack.cube()

    if water_mask is not None:
        water_mask = np.asarray(water_mask, dtype=bool)
        if water_mask.shape != stack.shape:
            raise IndexComputeError("Water mask of shape {} does not match the stack grid {}"
                                    .format(water_mask.shape, stack.shape),
                                    reason=IndexErrorReason.BAD_REFERENCE)
        selected = water_mask & stack.valid
        count = int(np.count_nonzero(selected))
        if count < MIN_WATER_PIXELS:
            raise IndexComputeError("Only {} valid water pixels in the mask, {} are required"
                                    .format(count, MIN_WATER_PIXELS),
                                    reason=IndexErrorReason.TOO_FEW_WATER_PIXELS)
        pixels = cube[:, selected]
        provenance = 'mask'
    else:
        index = ndvi(stack)
        valid = index.valid & stack.valid
        rows, cols = np.nonzero(valid)
        if rows.size == 0:
            raise IndexComputeError("No valid pixels to estimate a water spectrum from",
                                    reason=IndexErrorReason.TOO_FEW_WATER_PIXELS)
        order = np.argsort(index.values[rows, cols], kind='stable')
        keep = order[:math.ceil(rows.size / 4)]
        pixels = cube[:, rows[keep], cols[keep]]
        provenance = 'estimated'

    values = np.median(pixels, axis=1)
    signature = SpectralSignature(values, stack.wavelengths.names)
    logger.debug("Estimated water spectrum from %d pixels (%s)", pixels.shape[1], provenance)

    return WaterReference(signature, provenance)


# resolve_water_reference()
#
# Pick the water reference of a run, in order of preference: a
# reference file, an estimate over a water mask, an unsupervised
# estimate.
#
# Args:
#    stack (BandStack): A harmonized stack
#    path (str): A water reference file
#    water_mask (numpy.ndarray): A boolean mask of known water
#
# Returns:
#    (WaterReference): The reference
#
def resolve_water_reference(stack, path=None, water_mask=None):
    if path is not None:
        reference = WaterReference.load(path)
    else:
        reference = estimate_water_signature(stack, water_mask=water_mask)

    logger.info("Water reference provenance: %s", reference.provenance)
    return reference

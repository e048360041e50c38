import os
import time

import numpy as np
import pytest

from debris_indices._exceptions import ConfigError, ConfigErrorReason, IndexComputeError, IndexErrorReason
from debris_indices.indices import (
    FdiParams, WaterReference, MIN_WATER_PIXELS, ndvi, fdi, wci, estimate_water_signature, resolve_water_reference
)
from debris_indices.spectral import BandStack, SpectralSignature, WavelengthTable
from debris_indices.synth import EndmemberLibrary, mix

from tests.testutils import oracles


ELEVEN = WavelengthTable.for_band_count(11)


def uniform_stack(spectrum, height=4, width=4, table=ELEVEN):
    return BandStack([np.full((height, width), value) for value in spectrum], table)


def endmember(name):
    return EndmemberLibrary.builtin().get(name).on(ELEVEN)


def water_reference():
    return WaterReference(SpectralSignature(endmember('water'), ELEVEN.names), 'builtin')


def random_stack(seed=0, table=ELEVEN, size=(6, 5)):
    rng = np.random.default_rng(seed)
    return BandStack(rng.uniform(0.0, 0.4, size=(len(table),) + size), table)


def test_fdi_factor():
    assert FdiParams().factor == pytest.approx(1.1232803, abs=1e-7)

    s2b = FdiParams.from_table(WavelengthTable.builtin('s2b'))
    assert s2b.lambda_red == 665.0
    assert s2b.factor == pytest.approx((833.0 - 665.0) / (833.0 + 665.0) * 10.0)

    swir = FdiParams(denominator='swir1-red')
    assert swir.factor == pytest.approx((832.8 - 664.6) / (1613.7 - 664.6) * 10.0)


def test_fdi_params_from_node():
    params = FdiParams.from_node({'factor-scale': 5, 'lambda-nir': 842.0}, WavelengthTable.builtin('s2a'))

    assert params.factor_scale == 5.0
    assert params.lambda_nir == 842.0
    assert params.lambda_red == 664.6

    with pytest.raises(ConfigError) as exc:
        FdiParams.from_node({'denominator': 'nir-red'})
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE

    with pytest.raises(ConfigError) as exc:
        FdiParams.from_node({'baseline': 'B7'})
    assert exc.value.reason == ConfigErrorReason.INVALID_KEY

    with pytest.raises(ConfigError) as exc:
        FdiParams(lambda_nir=600.0)
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE


def test_ndvi_matches_scalar():
    stack = random_stack()
    index = ndvi(stack)
    nir, red = stack.band('B8'), stack.band('B4')

    assert index.valid.all()
    for (row, col), value in np.ndenumerate(index.values):
        assert value == pytest.approx(oracles.ndvi(nir[row, col], red[row, col]), abs=1e-12)


def test_ndvi_zero_denominator():
    spectrum = endmember('water').copy()
    spectrum[ELEVEN.index('B8')] = 0.0
    spectrum[ELEVEN.index('B4')] = 0.0

    index = ndvi(uniform_stack(spectrum))
    assert index.valid_count == 0


@pytest.mark.parametrize('denominator', ['nir+red', 'swir1-red'])
def test_fdi_matches_scalar(denominator):
    stack = random_stack(seed=1)
    params = FdiParams(denominator=denominator)
    index = fdi(stack, params)
    nir, lo, hi = stack.band('B8'), stack.band('B6'), stack.band('B11')

    for (row, col), value in np.ndenumerate(index.values):
        expected = oracles.fdi(nir[row, col], lo[row, col], hi[row, col], 832.8, 664.6, 1613.7,
                               denominator=denominator)
        assert value == pytest.approx(expected, abs=1e-12)


def test_fdi_linear_in_coverage():
    plastic, water = endmember('plastic'), endmember('water')
    alphas = np.linspace(0.0, 1.0, 11)
    values = [fdi(uniform_stack(mix(plastic, water, alpha), 1, 1)).values[0, 0] for alpha in alphas]

    assert np.allclose(np.diff(values, 2), 0.0, atol=1e-12)
    assert values[0] == pytest.approx(0.023, abs=0.002)
    assert values[-1] == pytest.approx(0.0825, abs=0.002)


def test_index_values_of_endmembers():
    water = uniform_stack(endmember('water'), 1, 1)
    plastic = uniform_stack(endmember('plastic'), 1, 1)

    assert ndvi(water).values[0, 0] == pytest.approx(-0.2)
    assert ndvi(plastic).values[0, 0] == pytest.approx(0.12 / 0.28)
    assert wci(water, water_reference()).values[0, 0] == pytest.approx(1.0)
    assert wci(plastic, water_reference()).values[0, 0] < 0.0


def test_wci_scale_invariant():
    stack = random_stack(seed=2)
    ref = water_reference()

    base = wci(stack, ref)
    scaled = wci(stack.scaled(2.5), ref)

    assert np.allclose(base.values, scaled.values, atol=1e-12)


def test_wci_band_subset():
    stack = random_stack(seed=4)
    ref = water_reference()
    subset = ['B2', 'B3', 'B4', 'B8']

    index = wci(stack, ref, band_subset=subset)
    row, col = 3, 2
    pixel = [stack.band(key)[row, col] for key in subset]
    expected = oracles.pearson(pixel, list(ref.signature.select(subset).values))

    assert index.values[row, col] == pytest.approx(expected, abs=1e-12)


@pytest.mark.slow
def test_indices_match_scalar_randomized():
    ref = water_reference()
    ref_values = ref.signature.select(ELEVEN.names).as_array().tolist()
    params = FdiParams()
    b4, b6, b8, b11 = (ELEVEN.index(key) for key in ('B4', 'B6', 'B8', 'B11'))

    elapsed = 0.0
    for seed in range(1000):
        stack = random_stack(seed, size=(32, 32))

        start = time.perf_counter()
        maps = (ndvi(stack), fdi(stack, params), wci(stack, ref))
        elapsed += time.perf_counter() - start

        for index in maps:
            assert index.valid.all()

        pixels = stack.cube().reshape(len(ELEVEN), -1).T.tolist()
        columns = [index.values.ravel().tolist() for index in maps]
        for pixel, n, f, w in zip(pixels, *columns):
            assert abs(n - oracles.ndvi(pixel[b8], pixel[b4])) <= 1e-12
            assert abs(f - oracles.fdi(pixel[b8], pixel[b6], pixel[b11], 832.8, 664.6, 1613.7)) <= 1e-12
            assert abs(w - oracles.pearson(pixel, ref_values)) <= 1e-12

    assert elapsed < 10.0


def test_index_invariants_randomized():
    ref = water_reference()
    rng = np.random.default_rng(21)

    for seed in range(50):
        stack = random_stack(seed, size=(16, 16))
        scale = rng.uniform(0.1, 10.0)
        offset = rng.uniform(0.0, 0.2)
        scaled = stack.scaled(scale)
        shifted = BandStack(stack.cube() * scale + offset, ELEVEN)

        assert np.allclose(ndvi(scaled).values, ndvi(stack).values, rtol=0.0, atol=1e-12)
        assert np.allclose(fdi(scaled).values, scale * fdi(stack).values, rtol=0.0, atol=1e-12)
        assert np.allclose(wci(scaled, ref).values, wci(stack, ref).values, rtol=0.0, atol=1e-12)
        assert np.allclose(wci(shifted, ref).values, wci(stack, ref).values, rtol=0.0, atol=1e-12)

        assert np.all(np.abs(ndvi(stack).values) <= 1.0 + 1e-12)
        assert np.all(np.abs(wci(stack, ref).values) <= 1.0 + 1e-12)


def test_wci_constant_pixel_invalid():
    stack = uniform_stack([0.1] * 11)
    index = wci(stack, water_reference())
    assert index.valid_count == 0


def test_zero_variance_reference():
    with pytest.raises(IndexComputeError) as exc:
        WaterReference(SpectralSignature([0.05] * 11, ELEVEN.names), 'file')
    assert exc.value.reason == IndexErrorReason.ZERO_VARIANCE_REFERENCE

    # Constant over the bands the stack shares with it
    values = [0.05] * 11
    values[0] = 0.2
    ref = WaterReference(SpectralSignature(values, ELEVEN.names), 'file')
    with pytest.raises(IndexComputeError) as exc:
        wci(random_stack(), ref, band_subset=['B2', 'B3', 'B4'])
    assert exc.value.reason == IndexErrorReason.ZERO_VARIANCE_REFERENCE


def test_missing_bands():
    table = WavelengthTable.builtin('s2a').select(['B2', 'B3', 'B4'])
    stack = BandStack([np.full((2, 2), 0.1), np.full((2, 2), 0.2), np.full((2, 2), 0.3)], table)

    with pytest.raises(IndexComputeError) as exc:
        ndvi(stack)
    assert exc.value.reason == IndexErrorReason.MISSING_BAND

    with pytest.raises(IndexComputeError) as exc:
        fdi(stack)
    assert exc.value.reason == IndexErrorReason.MISSING_BAND

    narrow = WaterReference(SpectralSignature([0.1, 0.05], ['B2', 'B8']), 'file')
    with pytest.raises(IndexComputeError) as exc:
        wci(stack, narrow)
    assert exc.value.reason == IndexErrorReason.MISSING_BAND


def test_estimate_from_mask(plastic_scene):
    water_mask = plastic_scene.truth.labels == 1
    reference = estimate_water_signature(plastic_scene.stack, water_mask)

    assert reference.provenance == 'mask'
    assert np.allclose(reference.signature.as_array(), endmember('water'), atol=0.002)


def test_estimate_unsupervised(plastic_scene):
    reference = estimate_water_signature(plastic_scene.stack)

    assert reference.provenance == 'estimated'
    # The darkest quartile leans towards low NIR and high red
    assert np.allclose(reference.signature.as_array(), endmember('water'), atol=0.01)


def test_too_few_water_pixels(plastic_scene):
    water_mask = np.zeros(plastic_scene.stack.shape, dtype=bool)
    water_mask[0, :MIN_WATER_PIXELS - 1] = True

    with pytest.raises(IndexComputeError) as exc:
        estimate_water_signature(plastic_scene.stack, water_mask)
    assert exc.value.reason == IndexErrorReason.TOO_FEW_WATER_PIXELS


def test_mask_shape_mismatch(plastic_scene):
    with pytest.raises(IndexComputeError) as exc:
        estimate_water_signature(plastic_scene.stack, np.ones((4, 4), dtype=bool))
    assert exc.value.reason == IndexErrorReason.BAD_REFERENCE


def test_reference_save_load(tmpdir, plastic_scene):
    path = os.path.join(str(tmpdir), 'water.json')
    reference = estimate_water_signature(plastic_scene.stack)

    reference.save(path)
    loaded = resolve_water_reference(plastic_scene.stack, path=path)

    assert loaded.provenance == 'file'
    assert loaded.signature == reference.signature


def test_reference_load_errors(tmpdir):
    path = os.path.join(str(tmpdir), 'water.yaml')
    with open(path, 'w') as f:
        f.write("bands: [B2, B3]\nvalues: [0.1]\n")

    with pytest.raises(IndexComputeError) as exc:
        WaterReference.load(path)
    assert exc.value.reason == IndexErrorReason.BAD_REFERENCE

    with pytest.raises(IndexComputeError) as exc:
        WaterReference(SpectralSignature([0.1, 0.2]), 'guessed')
    assert exc.value.reason == IndexErrorReason.BAD_REFERENCE


@pytest.mark.parametrize('with_mask', [False, True])
def test_estimate_from_two_populations(with_mask):
    water, plastic = endmember('water'), endmember('plastic')
    cube = np.empty((len(ELEVEN), 10, 10))
    cube[:, :8, :] = water[:, None, None]
    cube[:, 8:, :] = plastic[:, None, None]
    stack = BandStack(cube, ELEVEN)

    water_mask = None
    if with_mask:
        water_mask = np.zeros((10, 10), dtype=bool)
        water_mask[:8, :] = True

    reference = estimate_water_signature(stack, water_mask)

    assert np.allclose(reference.signature.as_array(), water, rtol=0.0, atol=1e-12)

import math
import os
import time

import numpy as np
import pytest

from debris_indices._exceptions import ConfigError, ConfigErrorReason, SynthError, SynthErrorReason
from debris_indices.spectral import SpectralSignature, WavelengthTable
from debris_indices.synth import (
    Endmember, EndmemberLibrary, SceneObject, SceneSpec,
    mix, gaussian_noise, generate, ndvi_along_mixture, check_ndvi_monotonic, sensitivity_curve
)


DATA_DIR = os.path.join(
    os.path.dirname(os.path.realpath(__file__)),
    "project"
)

ELEVEN = WavelengthTable.for_band_count(11)


def spectrum(name):
    return EndmemberLibrary.builtin().get(name).on(ELEVEN)


def test_mix():
    a = np.array([0.2, 0.4])
    b = np.array([0.0, 0.2])

    assert np.allclose(mix(a, b, 0.25), [0.05, 0.25])
    assert np.array_equal(mix(a, b, 1), a)
    assert np.array_equal(mix(a, b, 0.0), b)

    signature = mix(SpectralSignature(a, ['B4', 'B8']), SpectralSignature(b, ['B4', 'B8']), 0.5)
    assert isinstance(signature, SpectralSignature)
    assert signature.band_ids == ('B4', 'B8')


@pytest.mark.parametrize('alpha', [-0.1, 1.5, float('nan'), '0.5'])
def test_mix_bad_alpha(alpha):
    with pytest.raises(SynthError) as exc:
        mix([0.1, 0.2], [0.2, 0.1], alpha)
    assert exc.value.reason == SynthErrorReason.BAD_ALPHA


def test_mix_length_mismatch():
    with pytest.raises(SynthError) as exc:
        mix([0.1, 0.2, 0.3], [0.2, 0.1], 0.5)
    assert exc.value.reason == SynthErrorReason.LENGTH_MISMATCH


@pytest.mark.datafiles(DATA_DIR)
def test_generate_from_file(datafiles):
    spec = SceneSpec.load(os.path.join(str(datafiles), 'plastic.yaml'))
    scene = generate(spec)

    assert scene.scene_id == 'plastic'
    assert scene.stack.shape == (64, 64)
    assert scene.stack.wavelengths.names == ELEVEN.names
    assert scene.truth.raw
    assert scene.truth.counts() == {1: 64 * 64 - 64, 2: 64}
    assert np.all(scene.truth.labels[28:36, 28:36] == 2)


@pytest.mark.datafiles(DATA_DIR)
def test_generate_disk(datafiles):
    spec = SceneSpec.load(os.path.join(str(datafiles), 'small.toml'))
    scene = generate(spec)

    assert scene.stack.shape == (16, 24)
    # Lattice points within distance 3 of the center
    assert scene.truth.counts() == {1: 16 * 24 - 29, 3: 29}
    assert scene.truth.labels[8, 11] == 3
    assert scene.truth.labels[11, 10] == 1


@pytest.mark.datafiles(DATA_DIR)
def test_later_objects_cover_earlier(datafiles):
    spec = SceneSpec.load(os.path.join(str(datafiles), 'ship.json'))
    spec = SceneSpec(spec.width, spec.height, objects=list(spec.objects) + [
        SceneObject('plastic', 1.0, x=10, y=10, width=2, height=2)
    ])
    truth = generate(spec).truth.counts()

    assert truth[2] == 64 + 4
    assert truth[3] == 60 - 4


def test_noise_free_mixture():
    spec = SceneSpec(4, 4, objects=[SceneObject('plastic', 0.3, x=1, y=1, width=2, height=2)])
    stack = generate(spec).stack

    expected = mix(spectrum('plastic'), spectrum('water'), 0.3)
    assert np.allclose(stack.cube()[:, 1, 1], expected)
    assert np.allclose(stack.cube()[:, 0, 0], spectrum('water'))


def test_generate_deterministic():
    spec = SceneSpec(16, 16, objects=[SceneObject('plastic', 0.5, x=4, y=4, width=4, height=4)],
                     noise_sigma=0.01, seed=42)

    first = generate(spec)
    second = generate(spec)
    other = generate(SceneSpec(16, 16, objects=spec.objects, noise_sigma=0.01, seed=43))

    assert first.stack == second.stack
    assert first.truth == second.truth
    assert not first.stack == other.stack


def test_gaussian_noise_from_raw_stream():
    noise = gaussian_noise(5, 0.01, (3, 7))

    # The first pair of 53 bit uniforms gives the first cosine and sine deviates
    raw = np.random.PCG64(5).random_raw(2)
    u1, u2 = [(int(value) >> 11) / 2.0 ** 53 for value in raw]
    radius = math.sqrt(-2.0 * math.log(1.0 - u1))

    assert noise.shape == (3, 7)
    assert noise[0, 0] == pytest.approx(0.01 * radius * math.cos(2.0 * math.pi * u2), rel=1e-12)
    assert noise.ravel()[11] == pytest.approx(0.01 * radius * math.sin(2.0 * math.pi * u2), rel=1e-12)
    assert np.array_equal(noise, gaussian_noise(5, 0.01, (3, 7)))


def test_gaussian_noise_moments():
    noise = gaussian_noise(0, 0.005, (11, 64, 64))

    assert abs(noise.mean()) < 0.0002
    assert noise.std() == pytest.approx(0.005, rel=0.02)
    assert np.count_nonzero(np.abs(noise) > 0.025) < 5


def test_noise_clipped_at_zero():
    spec = SceneSpec(32, 32, noise_sigma=0.05, seed=1)
    stack = generate(spec).stack

    assert stack.calibrated
    assert stack.cube().min() == 0.0


def test_object_out_of_bounds():
    spec = SceneSpec(8, 8, objects=[SceneObject('plastic', x=6, y=0, width=3, height=2)])
    with pytest.raises(SynthError) as exc:
        generate(spec)
    assert exc.value.reason == SynthErrorReason.OUT_OF_BOUNDS

    spec = SceneSpec(8, 8, objects=[SceneObject('plastic', shape='disk', x=2, y=4, radius=2.5)])
    with pytest.raises(SynthError) as exc:
        generate(spec)
    assert exc.value.reason == SynthErrorReason.OUT_OF_BOUNDS


def test_unknown_endmember():
    spec = SceneSpec(8, 8, objects=[SceneObject('styrofoam', x=0, y=0)])
    with pytest.raises(SynthError) as exc:
        generate(spec)
    assert exc.value.reason == SynthErrorReason.UNKNOWN_ENDMEMBER


def test_invalid_scene_nodes():
    with pytest.raises(ConfigError) as exc:
        SceneObject('plastic', shape='triangle')
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE

    with pytest.raises(ConfigError) as exc:
        SceneSpec.from_node({'width': 8, 'height': 8, 'noise': 0.1})
    assert exc.value.reason == ConfigErrorReason.INVALID_KEY

    with pytest.raises(ConfigError) as exc:
        SceneSpec.from_node({'width': 8, 'height': 8, 'objects': [{'endmember': 'wood', 'x': 1, 'y': 1,
                                                                   'radius': 2}]})
    assert exc.value.reason == ConfigErrorReason.INVALID_KEY

    with pytest.raises(ConfigError) as exc:
        SceneSpec(8, 8, noise_sigma=-0.1)
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE


def test_scene_node_roundtrip():
    spec = SceneSpec(12, 10, objects=[SceneObject('wood', 0.5, shape='disk', x=5, y=5, radius=2.0),
                                      SceneObject('plastic', x=0, y=0, width=2, height=3)],
                     noise_sigma=0.002, seed=9, scene_id='roundtrip')
    assert SceneSpec.from_node(spec.to_node()) == spec


@pytest.mark.datafiles(DATA_DIR)
def test_custom_library(datafiles):
    library = EndmemberLibrary.load(os.path.join(str(datafiles), 'endmembers.yaml'))

    assert library.names == ['foam', 'plastic', 'seaweed', 'ship-metal', 'water', 'wood']
    assert library.get('foam').eval_class == 'floating_other'

    spec = SceneSpec(8, 8, objects=[SceneObject('foam', x=2, y=2, width=2, height=2)])
    assert generate(spec, library=library).truth.counts() == {1: 60, 3: 4}


def test_library_errors():
    node = {'bands': ['B4', 'B8'], 'endmembers': {'odd': {'values': [0.1, 0.2, 0.3]}}}
    with pytest.raises(SynthError) as exc:
        EndmemberLibrary.from_node(node)
    assert exc.value.reason == SynthErrorReason.LENGTH_MISMATCH

    with pytest.raises(SynthError) as exc:
        Endmember('dark', SpectralSignature([0.1, -0.1], ['B4', 'B8']))
    assert exc.value.reason == SynthErrorReason.NEGATIVE_REFLECTANCE

    with pytest.raises(ConfigError) as exc:
        Endmember('odd', SpectralSignature([0.1, 0.2], ['B4', 'B8']), 'cloud')
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE


def test_ndvi_monotonic_along_mixture():
    alphas = np.linspace(0.0, 1.0, 21)
    for name in ('plastic', 'wood', 'seaweed', 'ship-metal'):
        assert check_ndvi_monotonic(spectrum(name), spectrum('water'), alphas, ELEVEN)

    profile = ndvi_along_mixture(spectrum('plastic'), spectrum('water'), [0.0, 1.0], ELEVEN)
    assert profile[0] == pytest.approx(-0.2)
    assert profile[1] == pytest.approx(0.12 / 0.28)


def test_ndvi_monotonic_skipped():
    dark = np.zeros(11)
    assert check_ndvi_monotonic(dark, spectrum('water'), [0.0, 0.5, 1.0], ELEVEN) is None


def test_sensitivity_curve():
    alphas = [round(0.1 * step, 1) for step in range(1, 11)]

    start = time.perf_counter()
    curve = sensitivity_curve('plastic', 'water', alphas, 'fdi', realizations=100, threads=1)
    elapsed = time.perf_counter() - start

    assert [alpha for alpha, _ in curve] == alphas
    rates = [rate for _, rate in curve]
    assert all(later >= earlier - 0.02 for earlier, later in zip(rates, rates[1:]))
    assert rates[0] < 0.15
    assert rates[-1] >= 0.99
    assert elapsed < 30.0


def test_sensitivity_curve_without_cover():
    curve = sensitivity_curve('plastic', 'water', [0.0], 'fdi', realizations=20, threads=1)

    assert curve[0][1] <= 0.05


def test_sensitivity_curve_threads():
    alphas = [0.3]
    single = sensitivity_curve('plastic', 'water', alphas, 'combined', realizations=4, threads=1)
    pooled = sensitivity_curve('plastic', 'water', alphas, 'combined', realizations=4, threads=3)

    assert single == pooled


def test_sensitivity_curve_bad_alpha():
    with pytest.raises(SynthError) as exc:
        sensitivity_curve('plastic', 'water', [0.5, 2.0], 'fdi', realizations=1)
    assert exc.value.reason == SynthErrorReason.BAD_ALPHA

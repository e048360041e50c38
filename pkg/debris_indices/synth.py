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

"""Synthetic scenes

Scenes are built by linear mixing of endmember spectra: an object
covering a fraction ``alpha`` of a pixel contributes
``alpha * object + (1 - alpha) * background``. Gaussian noise is added
per band, and reflectance is clipped at zero.

The noise is a Box-Muller transform of the raw output of a PCG64 bit
generator seeded with the scene seed. NumPy keeps bit generator streams
stable across releases but not the output of ``Generator.normal()``, so
scenes do not change when NumPy is upgraded.

A scene is a pure function of its spec and wavelength table, the same
inputs always produce bit-identical stacks and truth masks.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ._config import load_data, load_file, node_validate, node_get_member
from ._exceptions import SynthError, SynthErrorReason, ConfigError, ConfigErrorReason
from ._message import get_logger
from .classifier import ClassMap, CLASS_CODES, ThresholdConfig, UNDETERMINED, WATER
from .raster.header import LabeledScene
from .spectral import BandStack, SpectralSignature, WavelengthTable
from .tiling import thread_count

SHAPES = ('rect', 'disk')
ENDMEMBER_CLASSES = ('water', 'debris', 'floating_other', 'wake')

logger = get_logger('synth')


@dataclass(frozen=True)
class Endmember():
    """A pure material spectrum

    Args:
       name (str): The endmember name
       signature (SpectralSignature): Nonnegative reflectance per band
       eval_class (str): The class its pixels are labelled with
    """

    name: str
    signature: SpectralSignature
    eval_class: str = 'debris'

    def __post_init__(self):
        if any(value < 0 for value in self.signature.values):
            raise SynthError("Endmember '{}' has negative reflectance".format(self.name),
                             reason=SynthErrorReason.NEGATIVE_REFLECTANCE)
        if self.eval_class not in ENDMEMBER_CLASSES:
            raise ConfigError("Endmember '{}' has unknown class '{}'".format(self.name, self.eval_class),
                              detail="Known classes: {}".format(', '.join(ENDMEMBER_CLASSES)),
                              reason=ConfigErrorReason.INVALID_VALUE)

    # on()
    #
    # Args:
    #    table (WavelengthTable): The active band table
    #
    # Returns:
    #    (numpy.ndarray): The reflectance in the band order of the table
    #
    def on(self, table):
        return self.signature.select(table.names).as_array()


class EndmemberLibrary():
    """A set of named endmembers

    Libraries are JSON, YAML or TOML files with a ``bands`` list and
    an ``endmembers`` dictionary of ``{"values": [...], "class": ...}``.
    """

    def __init__(self, endmembers):
        self._endmembers = {}
        for endmember in endmembers:
            if endmember.name in self._endmembers:
                raise ConfigError("Duplicate endmember '{}'".format(endmember.name),
                                  reason=ConfigErrorReason.INVALID_VALUE)
            self._endmembers[endmember.name] = endmember

    def __contains__(self, name):
        return name in self._endmembers

    def __iter__(self):
        return iter(self._endmembers.values())

    @property
    def names(self):
        return sorted(self._endmembers)

    def get(self, name):
        try:
            return self._endmembers[name]
        except KeyError:
            raise SynthError("Unknown endmember '{}'".format(name),
                             detail="Known endmembers: {}".format(', '.join(self.names)),
                             reason=SynthErrorReason.UNKNOWN_ENDMEMBER) from None

    # extended()
    #
    # Returns:
    #    (EndmemberLibrary): This library with entries of ``other``
    #                        added or replaced
    #
    def extended(self, other):
        merged = dict(self._endmembers)
        merged.update({endmember.name: endmember for endmember in other})
        return EndmemberLibrary(merged.values())

    @classmethod
    def from_node(cls, node, path='endmembers'):
        node_validate(node, ['bands', 'endmembers'], path=path)
        bands = node_get_member(node, list, 'bands', path=path)
        entries = node_get_member(node, dict, 'endmembers', path=path)

        endmembers = []
        for name, entry in entries.items():
            entry_path = '{}.endmembers.{}'.format(path, name)
            node_validate(entry, ['values', 'class'], path=entry_path)
            values = node_get_member(entry, list, 'values', path=entry_path)
            if len(values) != len(bands):
                raise SynthError("{}: {} values for {} bands".format(entry_path, len(values), len(bands)),
                                 reason=SynthErrorReason.LENGTH_MISMATCH)
            endmembers.append(Endmember(str(name), SpectralSignature(values, bands),
                                        node_get_member(entry, str, 'class', 'debris', path=entry_path)))
        return cls(endmembers)

    @classmethod
    def builtin(cls):
        return cls.from_node(load_data('endmembers.yaml'), path='endmembers.yaml')

    # load()
    #
    # A library file, its entries override the built-in endmembers
    #
    @classmethod
    def load(cls, path):
        return cls.builtin().extended(cls.from_node(load_file(path), path=path))


@dataclass(frozen=True)
class SceneObject():
    """An object planted in a synthetic scene

    Rectangles are given by their top left corner and size, disks by
    their center and radius. A pixel belongs to a disk when its
    distance to the center is at most the radius.
    """

    endmember: str
    alpha: float = 1.0
    shape: str = 'rect'
    x: int = 0
    y: int = 0
    width: int = 1
    height: int = 1
    radius: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError("Unknown object shape '{}'".format(self.shape),
                              detail="Known shapes: {}".format(', '.join(SHAPES)),
                              reason=ConfigErrorReason.INVALID_VALUE)
        _check_alpha(self.alpha)

    # footprint()
    #
    # Args:
    #    height (int): Scene rows
    #    width (int): Scene columns
    #
    # Returns:
    #    (numpy.ndarray): Boolean mask of the covered pixels
    #
    def footprint(self, height, width):
        if self.shape == 'rect':
            if (self.width < 1 or self.height < 1 or self.x < 0 or self.y < 0 or
                    self.x + self.width > width or self.y + self.height > height):
                raise SynthError("Rectangle at ({}, {}) of size {}x{} exceeds the {}x{} scene"
                                 .format(self.x, self.y, self.width, self.height, width, height),
                                 reason=SynthErrorReason.OUT_OF_BOUNDS)
            mask = np.zeros((height, width), dtype=bool)
            mask[self.y:self.y + self.height, self.x:self.x + self.width] = True
            return mask

        if (self.radius < 0 or self.x - self.radius < 0 or self.y - self.radius < 0 or
                self.x + self.radius > width - 1 or self.y + self.radius > height - 1):
            raise SynthError("Disk at ({}, {}) of radius {} exceeds the {}x{} scene"
                             .format(self.x, self.y, self.radius, width, height),
                             reason=SynthErrorReason.OUT_OF_BOUNDS)
        rows, cols = np.mgrid[0:height, 0:width]
        return (cols - self.x) ** 2 + (rows - self.y) ** 2 <= self.radius ** 2

    @classmethod
    def from_node(cls, node, path='object'):
        shape = node_get_member(node, str, 'shape', 'rect', path=path)
        if shape == 'disk':
            node_validate(node, ['shape', 'endmember', 'alpha', 'x', 'y', 'radius'], path=path)
        else:
            node_validate(node, ['shape', 'endmember', 'alpha', 'x', 'y', 'width', 'height'], path=path)

        return cls(
            endmember=node_get_member(node, str, 'endmember', path=path),
            alpha=node_get_member(node, float, 'alpha', 1.0, path=path),
            shape=shape,
            x=node_get_member(node, int, 'x', path=path),
            y=node_get_member(node, int, 'y', path=path),
            width=node_get_member(node, int, 'width', 1, path=path),
            height=node_get_member(node, int, 'height', 1, path=path),
            radius=node_get_member(node, float, 'radius', 1.0, path=path)
        )

    def to_node(self):
        node = {'shape': self.shape, 'endmember': self.endmember, 'alpha': self.alpha, 'x': self.x, 'y': self.y}
        if self.shape == 'rect':
            node.update(width=self.width, height=self.height)
        else:
            node.update(radius=self.radius)
        return node


@dataclass(frozen=True)
class SceneSpec():
    """Description of a synthetic scene"""

    width: int
    height: int
    background: str = 'water'
    objects: tuple = field(default=())
    noise_sigma: float = 0.0
    seed: int = 0
    scene_id: str = 'synthetic'

    def __post_init__(self):
        object.__setattr__(self, 'objects', tuple(self.objects))
        if self.width < 1 or self.height < 1:
            raise ConfigError("Scene size must be positive, got {}x{}".format(self.width, self.height),
                              reason=ConfigErrorReason.INVALID_VALUE)
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ConfigError("Noise sigma must be nonnegative, got {}".format(self.noise_sigma),
                              reason=ConfigErrorReason.INVALID_VALUE)

    @classmethod
    def from_node(cls, node, path='scene'):
        node_validate(node, ['scene-id', 'width', 'height', 'background', 'objects', 'noise-sigma', 'seed'],
                      path=path)
        objects = node_get_member(node, list, 'objects', [], path=path)
        return cls(
            width=node_get_member(node, int, 'width', path=path),
            height=node_get_member(node, int, 'height', path=path),
            background=node_get_member(node, str, 'background', 'water', path=path),
            objects=[SceneObject.from_node(obj, path='{}.objects[{}]'.format(path, idx))
                     for idx, obj in enumerate(objects)],
            noise_sigma=node_get_member(node, float, 'noise-sigma', 0.0, path=path),
            seed=node_get_member(node, int, 'seed', 0, path=path),
            scene_id=node_get_member(node, str, 'scene-id', 'synthetic', path=path)
        )

    @classmethod
    def load(cls, path):
        return cls.from_node(load_file(path), path=path)

    def to_node(self):
        return {
            'scene-id': self.scene_id,
            'width': self.width,
            'height': self.height,
            'background': self.background,
            'objects': [obj.to_node() for obj in self.objects],
            'noise-sigma': self.noise_sigma,
            'seed': self.seed
        }


def _check_alpha(alpha):
    if not (isinstance(alpha, (int, float)) and 0.0 <= alpha <= 1.0):
        raise SynthError("Coverage fraction must lie in [0, 1], got {}".format(alpha),
                         reason=SynthErrorReason.BAD_ALPHA)


# mix()
#
# Linear mixture of two spectra
#
# Args:
#    a (SpectralSignature|numpy.ndarray): The object spectrum
#    b (SpectralSignature|numpy.ndarray): The background spectrum
#    alpha (float): The coverage of ``a``, in [0, 1]
#
# Returns:
#    (SpectralSignature|numpy.ndarray): ``alpha * a + (1 - alpha) * b``,
#    a signature when both inputs are signatures
#
def mix(a, b, alpha):
    _check_alpha(alpha)

    as_signature = isinstance(a, SpectralSignature) and isinstance(b, SpectralSignature)
    x = a.as_array() if isinstance(a, SpectralSignature) else np.asarray(a, dtype=np.float64)
    y = b.as_array() if isinstance(b, SpectralSignature) else np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise SynthError("Cannot mix spectra of {} and {} bands".format(x.size, y.size),
                         reason=SynthErrorReason.LENGTH_MISMATCH)

    mixed = alpha * x + (1.0 - alpha) * y
    if as_signature:
        return SpectralSignature(mixed, a.band_ids)
    return mixed


def _default_table():
    return WavelengthTable.for_band_count(11, 's2a')


# gaussian_noise()
#
# Args:
#    seed (int): The PCG64 seed
#    sigma (float): The standard deviation
#    shape (tuple): The shape of the noise array
#
# Returns:
#    (numpy.ndarray): Normal deviates, consecutive pairs of uniforms
#                     give the cosine half then the sine half
#
def gaussian_noise(seed, sigma, shape):
    count = int(np.prod(shape))
    pairs = (count + 1) // 2

    raw = np.random.PCG64(seed).random_raw(2 * pairs)
    uniform = (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    radius = np.sqrt(-2.0 * np.log1p(-uniform[0::2]))
    angle = 2.0 * np.pi * uniform[1::2]

    normal = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]
    return sigma * normal.reshape(shape)


# generate()
#
# Args:
#    spec (SceneSpec): The scene description
#    wavelengths (WavelengthTable): The band table, the 11 band
#                                   MARIDA order of S2A by default
#    library (EndmemberLibrary): The endmembers, built-in by default
#
# Returns:
#    (LabeledScene): The stack and its truth mask, which holds
#                    evaluation class codes
#
def generate(spec, wavelengths=None, library=None):
    if wavelengths is None:
        wavelengths = _default_table()
    if library is None:
        library = EndmemberLibrary.builtin()

    background = library.get(spec.background)
    cube = np.empty((len(wavelengths), spec.height, spec.width), dtype=np.float64)
    cube[:] = background.on(wavelengths)[:, np.newaxis, np.newaxis]
    truth = np.full((spec.height, spec.width), CLASS_CODES[background.eval_class], dtype=np.uint8)

    # Later objects cover earlier ones
    for obj in spec.objects:
        endmember = library.get(obj.endmember)
        footprint = obj.footprint(spec.height, spec.width)
        cube[:, footprint] = mix(endmember.on(wavelengths), background.on(wavelengths), obj.alpha)[:, np.newaxis]
        truth[footprint] = CLASS_CODES[endmember.eval_class]

    if spec.noise_sigma > 0:
        cube += gaussian_noise(spec.seed, spec.noise_sigma, cube.shape)
    np.clip(cube, 0.0, None, out=cube)

    stack = BandStack(cube, wavelengths, grid=(min(wavelengths.resolutions),) * len(wavelengths))
    return LabeledScene(stack, ClassMap(truth, raw=True), scene_id=spec.scene_id)


# ndvi_along_mixture()
#
# NDVI of the mixtures of two spectra over a grid of coverage
# fractions, without noise.
#
# Returns:
#    (numpy.ndarray): The NDVI per alpha, NaN where undefined
#
def ndvi_along_mixture(a, b, alpha_grid, table, nir='B8', red='B4'):
    i_nir, i_red = table.index(nir), table.index(red)
    values = []
    for alpha in alpha_grid:
        mixed = mix(a, b, alpha)
        total = mixed[i_nir] + mixed[i_red]
        values.append((mixed[i_nir] - mixed[i_red]) / total if total != 0 else math.nan)
    return np.array(values)


# check_ndvi_monotonic()
#
# NDVI along a mixing segment is monotonic when NIR + RED is
# positive at both ends. Where this holds, check it numerically.
#
# Returns:
#    (bool|None): Whether the NDVI profile is monotonic, None when
#                 the sign condition fails and the check is skipped
#
def check_ndvi_monotonic(a, b, alpha_grid, table, nir='B8', red='B4'):
    i_nir, i_red = table.index(nir), table.index(red)
    for spectrum in (np.asarray(a), np.asarray(b)):
        if not spectrum[i_nir] + spectrum[i_red] > 0:
            logger.info("Skipping NDVI monotonicity check, NIR + RED is not positive along the segment")
            return None

    profile = ndvi_along_mixture(a, b, sorted(alpha_grid), table, nir=nir, red=red)
    steps = np.diff(profile)
    tolerance = 1e-12
    return bool(np.all(steps >= -tolerance) or np.all(steps <= tolerance))


def _planted_square(size):
    side = max(1, size // 2)
    start = (size - side) // 2
    return start, side


def _realization_rate(detector, thresholds, spec, table, library, water_ref, footprint):
    from .pipeline import detect_scene

    scene = generate(spec, table, library)
    classes, _, _ = detect_scene(scene.stack, thresholds, water_ref=water_ref, detector=detector, threads=1)
    labels = classes.labels[footprint]
    return int(np.count_nonzero((labels != WATER) & (labels != UNDETERMINED)))


# sensitivity_curve()
#
# The fraction of planted pixels a detector flags, as a function
# of the coverage of the planted endmember.
#
# Args:
#    endmember (str): The planted endmember
#    background (str): The background endmember
#    alpha_grid (list): Coverage fractions to evaluate
#    detector (str|Detector): The detector, or its kind
#    realizations (int): Noise realizations per alpha
#    noise_sigma (float): The noise standard deviation
#    size (int): The side of the square scenes, the planted square
#                covers the central half
#    seed (int): Realization r uses seed ``seed + r``
#    thresholds (ThresholdConfig): The thresholds, fixed defaults if None
#    wavelengths (WavelengthTable): The band table
#    library (EndmemberLibrary): The endmembers
#    threads (int): Worker count for realizations
#
# Returns:
#    (list): (alpha, detection_rate) tuples in alpha_grid order
#
def sensitivity_curve(endmember, background, alpha_grid, detector, realizations=100, noise_sigma=0.005,
                      size=16, seed=0, thresholds=None, wavelengths=None, library=None, threads=None):
    from ._plugins import load_detector
    from .indices import WaterReference

    if wavelengths is None:
        wavelengths = _default_table()
    if library is None:
        library = EndmemberLibrary.builtin()
    if thresholds is None:
        thresholds = ThresholdConfig()
    if isinstance(detector, str):
        detector = load_detector(detector)
    threads = thread_count(threads)

    for alpha in alpha_grid:
        _check_alpha(alpha)

    reference = library.get(background)
    water_ref = WaterReference(SpectralSignature(reference.on(wavelengths), wavelengths.names), 'builtin')

    start, side = _planted_square(size)
    footprint = np.zeros((size, size), dtype=bool)
    footprint[start:start + side, start:start + side] = True
    planted = int(np.count_nonzero(footprint))

    curve = []
    for alpha in alpha_grid:
        specs = [
            SceneSpec(size, size, background=background,
                      objects=[SceneObject(endmember, alpha, x=start, y=start, width=side, height=side)],
                      noise_sigma=noise_sigma, seed=seed + r, scene_id='sensitivity-{}'.format(r))
            for r in range(realizations)
        ]
        detected = Parallel(n_jobs=threads, prefer='threads')(
            delayed(_realization_rate)(detector, thresholds, spec, wavelengths, library, water_ref, footprint)
            for spec in specs
        )
        rate = sum(detected) / float(planted * realizations)
        logger.debug("alpha %.3f: detection rate %.4f", alpha, rate)
        curve.append((float(alpha), rate))

    return curve

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

"""Scene processing

Ties the index computations and the detectors together: harmonize the
stack, compute the requested indices over row windows, resolve the
scene thresholds and run a detector.
"""

from dataclasses import dataclass

from ._config import composite, load_data
from ._exceptions import ConfigError, ConfigErrorReason, IndexComputeError, IndexErrorReason, SpectralError
from ._message import get_logger, timed_activity
from ._plugins import load_detector
from .indices import FdiParams, ndvi, fdi, wci, resolve_water_reference
from .spectral import INDEX_KINDS, IndexMap, harmonize
from .tiling import map_windows, DEFAULT_TILE_ROWS

logger = get_logger('pipeline')


@dataclass(frozen=True)
class IndexSet():
    """The index maps of one scene, None for kinds not computed"""

    ndvi: IndexMap = None
    fdi: IndexMap = None
    wci: IndexMap = None
    water_reference: object = None

    def __getitem__(self, kind):
        if kind not in INDEX_KINDS:
            raise ConfigError("Unknown index kind '{}'".format(kind),
                              detail="Known kinds: {}".format(', '.join(INDEX_KINDS)),
                              reason=ConfigErrorReason.UNKNOWN_KIND)
        return getattr(self, kind)


# fdi_params_for()
#
# FDI parameters from the wavelengths of the stack bands
#
# Args:
#    stack (BandStack): The stack
#    node (dict): The ``fdi`` node of a run configuration
#
def fdi_params_for(stack, node=None):
    try:
        return FdiParams.from_node(node or {}, stack.wavelengths)
    except SpectralError as e:
        raise IndexComputeError("FDI needs the NIR, red and SWIR bands: {}".format(e),
                                reason=IndexErrorReason.MISSING_BAND) from e


# compute_indices()
#
# Args:
#    stack (BandStack): The stack, harmonized if needed
#    water_ref (WaterReference): The WCI reference, resolved from the
#                                scene if not given
#    fdi_params (FdiParams): FDI parameters, from the stack bands by default
#    kinds (list): The index kinds to compute
#    threads (int): Worker count, DEBRIS_THREADS by default
#    tile_rows (int): Rows per window
#    estimator (str): The WCI correlation estimator
#
# Returns:
#    (IndexSet): The computed maps
#
def compute_indices(stack, water_ref=None, fdi_params=None, kinds=INDEX_KINDS, threads=None,
                    tile_rows=DEFAULT_TILE_ROWS, estimator='pearson'):
    kinds = tuple(kinds)
    for kind in kinds:
        if kind not in INDEX_KINDS:
            raise ConfigError("Unknown index kind '{}'".format(kind),
                              detail="Known kinds: {}".format(', '.join(INDEX_KINDS)),
                              reason=ConfigErrorReason.UNKNOWN_KIND)

    stack = harmonize(stack)
    if 'fdi' in kinds and fdi_params is None:
        fdi_params = fdi_params_for(stack)
    if 'wci' in kinds and water_ref is None:
        water_ref = resolve_water_reference(stack)

    def compute(window):
        maps = []
        for kind in kinds:
            if kind == 'ndvi':
                maps.append(ndvi(window))
            elif kind == 'fdi':
                maps.append(fdi(window, fdi_params))
            else:
                maps.append(wci(window, water_ref, estimator=estimator))
        return maps

    with timed_activity("Computing {}".format(', '.join(kind.upper() for kind in kinds)),
                        detail="{}x{} pixels, {} bands".format(stack.width, stack.height, stack.band_count),
                        logger=logger, silent_nested=True):
        windows = map_windows(compute, stack, threads=threads, tile_rows=tile_rows)

    maps = {kind: IndexMap.concatenate([window[idx] for window in windows])
            for idx, kind in enumerate(kinds)}
    return IndexSet(water_reference=water_ref if 'wci' in kinds else None, **maps)


# detect_scene()
#
# Run a detector on a stack
#
# Args:
#    stack (BandStack): The stack
#    thresholds (ThresholdConfig): The thresholds
#    water_ref (WaterReference): The WCI reference, resolved from
#                                the scene if not given
#    detector (str|Detector): The detector, or its kind
#    detector_config (dict): Configuration for a detector given by kind
#    fdi_params (FdiParams): FDI parameters
#    threads (int): Worker count
#    estimator (str): The WCI correlation estimator
#
# Returns:
#    (ClassMap): The classification
#    (IndexSet): The index maps
#    (ThresholdConfig): The thresholds resolved for the scene
#
def detect_scene(stack, thresholds, water_ref=None, detector='combined', detector_config=None,
                 fdi_params=None, threads=None, estimator='pearson'):
    if isinstance(detector, str):
        detector = load_detector(detector, detector_config)

    # Otsu thresholds need every index
    kinds = INDEX_KINDS if thresholds.mode == 'otsu' else detector.INDICES
    indices = compute_indices(stack, water_ref, fdi_params=fdi_params, kinds=kinds, threads=threads,
                              estimator=estimator)
    resolved = thresholds.resolve(indices.ndvi, indices.fdi, indices.wci)

    return detector.detect(indices, resolved), indices, resolved


# run_config()
#
# Args:
#    overrides (dict): User configuration
#
# Returns:
#    (dict): The shipped run configuration defaults with the user
#            configuration composited on top
#
def run_config(overrides=None):
    return composite(load_data('defaults.yaml'), overrides)

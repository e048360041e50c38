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

__version__ = '0.1.0'

from ._exceptions import ErrorDomain, DebrisError, RasterError, SpectralError, IndexComputeError
from ._exceptions import ClassifyError, EvaluationError, SynthError, ConfigError
from .spectral import BandStack, SpectralSignature, IndexMap, WavelengthTable, harmonize, correlation
from .raster.header import RasterHeader, LabeledScene
from .raster.files import read_raster, write_stack, read_mask, write_mask, write_index
from .indices import FdiParams, WaterReference, ndvi, fdi, wci, estimate_water_signature
from .classifier import ClassMap, ThresholdConfig, classify_single, classify_combined, otsu_threshold
from .evaluation import LabelMapping, EvalReport, map_labels, evaluate, per_index_report
from .plugin import Detector
from .pipeline import compute_indices, detect_scene
from .synth import Endmember, EndmemberLibrary, SceneSpec, SceneObject, mix, generate, sensitivity_curve

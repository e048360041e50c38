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

"""Accuracy assessment

Predictions are scored against labelled truth masks. Raw dataset codes
are first mapped onto the evaluation classes with a
:class:`LabelMapping`; pixels mapped to ``ignore`` take no part in the
evaluation. Predictions left undetermined count as errors.

The confusion matrix has truth classes as rows and predicted classes as
columns, both in the order of :data:`EVAL_CLASSES`.
"""

import json
from collections import OrderedDict

import numpy as np

from ._config import load_data, load_file
from ._exceptions import ConfigError, ConfigErrorReason, EvaluationError, EvaluationErrorReason
from ._message import get_logger
from .classifier import ClassMap, CLASS_CODES, IGNORE

EVAL_CLASSES = ('water', 'debris', 'floating_other', 'wake', 'undetermined')
MAPPING_TARGETS = ('water', 'debris', 'floating_other', 'wake', 'ignore')

REPORT_ORDER = ('ndvi', 'fdi', 'wci', 'combined')

_EVAL_CODES = tuple(CLASS_CODES[name] for name in EVAL_CLASSES)

logger = get_logger('evaluation')


class LabelMapping():
    """Raw dataset label codes to evaluation classes

    Args:
       mapping (dict): Raw integer code to one of MAPPING_TARGETS
    """

    def __init__(self, mapping):
        checked = {}
        for code, target in mapping.items():
            try:
                code = int(code)
            except (TypeError, ValueError) as e:
                raise ConfigError("Label mapping code '{}' is not an integer".format(code),
                                  reason=ConfigErrorReason.INVALID_KEY) from e
            if target not in MAPPING_TARGETS:
                raise ConfigError("Label code {} maps to unknown class '{}'".format(code, target),
                                  detail="Known classes: {}".format(', '.join(MAPPING_TARGETS)),
                                  reason=ConfigErrorReason.INVALID_VALUE)
            checked[code] = target
        self._mapping = checked

    def __repr__(self):
        return 'LabelMapping({})'.format(self._mapping)

    def __eq__(self, other):
        if not isinstance(other, LabelMapping):
            return NotImplemented
        return self._mapping == other._mapping

    def __getitem__(self, code):
        return self._mapping[code]

    def __contains__(self, code):
        return code in self._mapping

    def items(self):
        return sorted(self._mapping.items())

    def to_node(self):
        return {str(code): target for code, target in self.items()}

    def save(self, path):
        try:
            with open(path, 'w') as f:
                json.dump(self.to_node(), f, indent=2)
                f.write('\n')
        except OSError as e:
            raise ConfigError("Could not write label mapping {}: {}".format(path, e),
                              reason=ConfigErrorReason.MISSING_FILE) from e

    # load()
    #
    # Load a ``{"code": "class"}`` mapping from JSON, YAML or TOML
    #
    @classmethod
    def load(cls, path):
        node = load_file(path)
        if not isinstance(node, dict):
            raise ConfigError("{}: Expected a dictionary of label codes".format(path),
                              reason=ConfigErrorReason.INVALID_DATA)
        return cls(node)

    # marida()
    #
    # The mapping of the 15 MARIDA classes, loaded from the
    # editable copy shipped with the package.
    #
    @classmethod
    def marida(cls):
        return cls(load_data('marida.yaml'))

    # identity()
    #
    # The mapping of masks which already hold evaluation class codes
    #
    @classmethod
    def identity(cls):
        mapping = {CLASS_CODES[name]: name for name in MAPPING_TARGETS if name != 'ignore'}
        mapping[CLASS_CODES['undetermined']] = 'ignore'
        mapping[IGNORE] = 'ignore'
        return cls(mapping)


# map_labels()
#
# Args:
#    mask (ClassMap): A raw truth mask
#    mapping (LabelMapping): The mapping to apply
#
# Returns:
#    (ClassMap): Evaluation class codes, ignored pixels hold IGNORE
#
def map_labels(mask, mapping):
    codes = np.unique(mask.labels)
    unmapped = [int(code) for code in codes if int(code) not in mapping]
    if unmapped:
        raise EvaluationError("Unmapped label code(s) in truth mask: {}".format(', '.join(str(c) for c in unmapped)),
                              detail="Mapped codes: {}".format(', '.join(str(c) for c, _ in mapping.items())),
                              reason=EvaluationErrorReason.UNMAPPED_CODE)

    labels = np.full(mask.shape, IGNORE, dtype=np.uint8)
    for code in codes:
        labels[mask.labels == code] = CLASS_CODES[mapping[int(code)]]

    return ClassMap(labels)


class EvalReport():
    """Agreement of a prediction with the truth

    Args:
       confusion (numpy.ndarray): K x K pixel counts, truth rows and
                                  predicted columns in EVAL_CLASSES order
       ignored_pixels (int): Truth pixels excluded from the evaluation
    """

    def __init__(self, confusion, ignored_pixels=0):
        confusion = np.asarray(confusion, dtype=np.int64)
        if confusion.shape != (len(EVAL_CLASSES),) * 2:
            raise EvaluationError("Confusion matrix must be {0}x{0}".format(len(EVAL_CLASSES)),
                                  reason=EvaluationErrorReason.GRID_MISMATCH)
        confusion.flags.writeable = False
        self.confusion = confusion
        self.ignored_pixels = int(ignored_pixels)

    def __repr__(self):
        return 'EvalReport(accuracy={!r}, pixels={})'.format(self.overall_accuracy, self.evaluated_pixels)

    @property
    def evaluated_pixels(self):
        return int(self.confusion.sum())

    @property
    def overall_accuracy(self):
        return float(np.trace(self.confusion)) / self.evaluated_pixels

    # object_accuracy
    #
    # Accuracy over pixels where the truth or the prediction is not
    # water, None when every pixel is water in both.
    #
    @property
    def object_accuracy(self):
        water = EVAL_CLASSES.index('water')
        pixels = self.evaluated_pixels - int(self.confusion[water, water])
        if pixels == 0:
            return None
        correct = float(np.trace(self.confusion)) - self.confusion[water, water]
        return float(correct) / pixels

    def _ratio(self, numerator, denominator):
        if denominator == 0:
            return None
        return float(numerator) / float(denominator)

    def true_positives(self, name):
        k = EVAL_CLASSES.index(name)
        return int(self.confusion[k, k])

    def precision(self, name):
        k = EVAL_CLASSES.index(name)
        return self._ratio(self.confusion[k, k], self.confusion[:, k].sum())

    def recall(self, name):
        k = EVAL_CLASSES.index(name)
        return self._ratio(self.confusion[k, k], self.confusion[k, :].sum())

    def f1(self, name):
        k = EVAL_CLASSES.index(name)
        return self._ratio(2 * self.confusion[k, k], self.confusion[k, :].sum() + self.confusion[:, k].sum())

    def iou(self, name):
        k = EVAL_CLASSES.index(name)
        union = self.confusion[k, :].sum() + self.confusion[:, k].sum() - self.confusion[k, k]
        return self._ratio(self.confusion[k, k], union)

    # macro_f1
    #
    # Mean F1 over the evaluation classes which have one,
    # undetermined excluded
    #
    @property
    def macro_f1(self):
        scores = [self.f1(name) for name in EVAL_CLASSES if name != 'undetermined']
        scores = [score for score in scores if score is not None]
        if not scores:
            return None
        return sum(scores) / len(scores)

    def to_node(self):
        return OrderedDict([
            ('overall_accuracy', self.overall_accuracy),
            ('object_accuracy', self.object_accuracy),
            ('macro_f1', self.macro_f1),
            ('evaluated_pixels', self.evaluated_pixels),
            ('ignored_pixels', self.ignored_pixels),
            ('classes', list(EVAL_CLASSES)),
            ('confusion', self.confusion.tolist()),
            ('per_class', OrderedDict(
                (name, OrderedDict([
                    ('precision', self.precision(name)),
                    ('recall', self.recall(name)),
                    ('f1', self.f1(name)),
                    ('iou', self.iou(name)),
                    ('truth_pixels', int(self.confusion[k, :].sum())),
                    ('predicted_pixels', int(self.confusion[:, k].sum())),
                ]))
                for k, name in enumerate(EVAL_CLASSES)
            )),
        ])


# evaluate()
#
# Args:
#    pred (ClassMap): The prediction
#    truth (ClassMap): The mapped truth, see map_labels()
#
# Returns:
#    (EvalReport): The report over all truth pixels which are not ignored
#
def evaluate(pred, truth):
    if pred.shape != truth.shape:
        raise EvaluationError("Grid mismatch: prediction {}x{} against truth {}x{}"
                              .format(pred.width, pred.height, truth.width, truth.height),
                              reason=EvaluationErrorReason.GRID_MISMATCH)
    if truth.raw:
        raise EvaluationError("Truth mask holds raw label codes, map them to evaluation classes first",
                              reason=EvaluationErrorReason.UNMAPPED_TRUTH)

    counted = truth.labels != IGNORE
    if np.any(truth.labels[counted] == CLASS_CODES['undetermined']):
        raise EvaluationError("Truth mask holds undetermined pixels",
                              reason=EvaluationErrorReason.UNMAPPED_TRUTH)
    if np.any(pred.labels == IGNORE):
        raise EvaluationError("Prediction holds ignored pixels",
                              reason=EvaluationErrorReason.UNMAPPED_CODE)

    evaluated = int(np.count_nonzero(counted))
    if evaluated == 0:
        raise EvaluationError("No pixels left to evaluate, every truth pixel is ignored",
                              reason=EvaluationErrorReason.NO_EVALUATED_PIXELS)

    # Class codes to matrix positions
    lookup = np.zeros(256, dtype=np.int64)
    for position, code in enumerate(_EVAL_CODES):
        lookup[code] = position

    k = len(EVAL_CLASSES)
    rows = lookup[truth.labels[counted]]
    cols = lookup[pred.labels[counted]]
    confusion = np.bincount(k * rows + cols, minlength=k * k).reshape(k, k)

    return EvalReport(confusion, ignored_pixels=truth.labels.size - evaluated)


# per_index_report()
#
# Evaluate each single index detector and the combined detector on
# one scene, all over the same evaluated pixels.
#
# Args:
#    scene (LabeledScene): The scene, truth holding raw codes or
#                          evaluation classes
#    cfg (ThresholdConfig): The thresholds
#    water_ref (WaterReference): The water reference for the WCI
#    mapping (LabelMapping): The mapping of raw truth codes
#    fdi_params (FdiParams): The FDI parameters
#    threads (int): Tile parallelism
#    estimator (str): The WCI correlation estimator
#
# Returns:
#    (OrderedDict): EvalReport per detector, in REPORT_ORDER
#
def per_index_report(scene, cfg, water_ref, mapping=None, fdi_params=None, threads=1,
                     estimator='pearson'):
    from ._plugins import load_detector
    from .pipeline import compute_indices

    truth = scene.truth
    if truth.raw:
        if mapping is None:
            mapping = LabelMapping.identity()
        truth = map_labels(truth, mapping)

    indices = compute_indices(scene.stack, water_ref, fdi_params=fdi_params, threads=threads,
                              estimator=estimator)
    thresholds = cfg.resolve(indices.ndvi, indices.fdi, indices.wci)

    reports = OrderedDict()
    for kind in REPORT_ORDER:
        detector = load_detector(kind)
        reports[kind] = evaluate(detector.detect(indices, thresholds), truth)
        logger.info("%s: overall accuracy %.4f over %d pixels",
                    kind, reports[kind].overall_accuracy, reports[kind].evaluated_pixels)

    return reports


def _format_score(value):
    if value is None:
        return 'n/a'
    return '{:.4f}'.format(value)


# format_table()
#
# Args:
#    reports (OrderedDict): EvalReport per detector
#
# Returns:
#    (str): An aligned plain text table, one row per detector
#
def format_table(reports):
    columns = ['detector', 'accuracy', 'object_acc', 'macro_f1',
               'debris_prec', 'debris_rec', 'debris_f1', 'debris_iou']
    rows = [columns]
    for name, report in reports.items():
        rows.append([name] + [_format_score(value) for value in (
            report.overall_accuracy, report.object_accuracy, report.macro_f1,
            report.precision('debris'), report.recall('debris'),
            report.f1('debris'), report.iou('debris'))])

    widths = [max(len(row[col]) for row in rows) for col in range(len(columns))]
    lines = []
    for idx, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append('  '.join(cells))
        if idx == 0:
            lines.append('=' * len(lines[0]))
    return '\n'.join(lines)


# reports_to_json()
#
# Args:
#    reports (OrderedDict): EvalReport per detector
#
# Returns:
#    (str): The reports as a JSON document
#
def reports_to_json(reports):
    return json.dumps(OrderedDict((name, report.to_node()) for name, report in reports.items()), indent=2)

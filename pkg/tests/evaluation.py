import json
import os

import numpy as np
import pytest

from debris_indices._exceptions import ConfigError, ConfigErrorReason, EvaluationError, EvaluationErrorReason
from debris_indices.classifier import ClassMap, ThresholdConfig
from debris_indices.evaluation import (
    EVAL_CLASSES, REPORT_ORDER, EvalReport, LabelMapping, evaluate, format_table, map_labels,
    per_index_report, reports_to_json
)

from tests.testutils import oracles


DATA_DIR = os.path.join(
    os.path.dirname(os.path.realpath(__file__)),
    "project"
)

EVAL_CODES = [1, 2, 3, 4, 0]


def test_confusion_matches_scalar():
    rng = np.random.default_rng(8)
    truth = rng.choice([1, 2, 3, 4, 255], size=(20, 30)).astype(np.uint8)
    pred = rng.choice([0, 1, 2, 3, 4], size=(20, 30)).astype(np.uint8)

    report = evaluate(ClassMap(pred), ClassMap(truth))
    expected = oracles.confusion(truth.ravel().tolist(), pred.ravel().tolist(), EVAL_CODES, ignore=(255,))

    assert report.confusion.tolist() == expected
    assert report.ignored_pixels == int(np.count_nonzero(truth == 255))
    assert report.evaluated_pixels + report.ignored_pixels == truth.size


@pytest.mark.slow
def test_metrics_match_scalar_randomized():
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        shape = tuple(rng.integers(1, 24, size=2))
        truth = rng.choice([1, 2, 3, 4, 255], size=shape).astype(np.uint8)
        pred = rng.choice([0, 1, 2, 3, 4], size=shape).astype(np.uint8)
        if np.all(truth == 255):
            truth[0, 0] = 1

        report = evaluate(ClassMap(pred), ClassMap(truth))
        matrix = oracles.confusion(truth.ravel().tolist(), pred.ravel().tolist(), EVAL_CODES, ignore=(255,))

        assert report.confusion.tolist() == matrix
        total = sum(map(sum, matrix))
        assert abs(report.overall_accuracy - sum(matrix[k][k] for k in range(5)) / total) <= 1e-12

        for name, expected in zip(EVAL_CLASSES, oracles.scores(matrix)):
            for metric in ('precision', 'recall', 'f1', 'iou'):
                value = getattr(report, metric)(name)
                if expected[metric] is None:
                    assert value is None
                else:
                    assert abs(value - expected[metric]) <= 1e-12


def small_report():
    truth = ClassMap(np.array([[1, 1, 2, 2, 3, 255]]))
    pred = ClassMap(np.array([[1, 2, 2, 0, 3, 2]]))
    return evaluate(pred, truth)


def test_metrics():
    report = small_report()

    assert report.evaluated_pixels == 5
    assert report.ignored_pixels == 1
    assert report.overall_accuracy == pytest.approx(0.6)
    assert report.object_accuracy == pytest.approx(0.5)

    assert report.precision('debris') == pytest.approx(0.5)
    assert report.recall('debris') == pytest.approx(0.5)
    assert report.f1('debris') == pytest.approx(0.5)
    assert report.iou('debris') == pytest.approx(1.0 / 3.0)

    assert report.precision('water') == pytest.approx(1.0)
    assert report.recall('water') == pytest.approx(0.5)
    assert report.f1('floating_other') == pytest.approx(1.0)

    assert report.macro_f1 == pytest.approx((2.0 / 3.0 + 0.5 + 1.0) / 3.0)


def test_undefined_metrics():
    report = small_report()

    assert report.precision('wake') is None
    assert report.recall('wake') is None
    assert report.f1('wake') is None
    assert report.iou('wake') is None

    # Only undetermined predictions, which are always wrong
    assert report.recall('undetermined') is None
    assert report.precision('undetermined') == 0.0

    water = evaluate(ClassMap(np.ones((2, 2), dtype=np.uint8)), ClassMap(np.ones((2, 2), dtype=np.uint8)))
    assert water.object_accuracy is None
    assert water.overall_accuracy == 1.0


def test_report_node():
    node = small_report().to_node()

    assert node['classes'] == list(EVAL_CLASSES)
    assert node['confusion'][1] == [0, 1, 0, 0, 1]
    assert node['per_class']['wake']['iou'] is None
    assert node['per_class']['debris']['truth_pixels'] == 2
    assert node['per_class']['debris']['predicted_pixels'] == 2


def test_every_pixel_ignored():
    truth = ClassMap(np.full((2, 2), 255, dtype=np.uint8))
    with pytest.raises(EvaluationError) as exc:
        evaluate(ClassMap(np.ones((2, 2), dtype=np.uint8)), truth)
    assert exc.value.reason == EvaluationErrorReason.NO_EVALUATED_PIXELS


def test_grid_mismatch():
    with pytest.raises(EvaluationError) as exc:
        evaluate(ClassMap(np.ones((2, 2), dtype=np.uint8)), ClassMap(np.ones((2, 3), dtype=np.uint8)))
    assert exc.value.reason == EvaluationErrorReason.GRID_MISMATCH


def test_raw_truth_rejected():
    truth = ClassMap(np.array([[7, 1]]), raw=True)
    with pytest.raises(EvaluationError) as exc:
        evaluate(ClassMap(np.array([[1, 1]])), truth)
    assert exc.value.reason == EvaluationErrorReason.UNMAPPED_TRUTH


def test_marida_mapping():
    mapping = LabelMapping.marida()
    raw = ClassMap(np.array([[0, 1, 2, 5, 6, 7, 14, 15]]), raw=True)

    mapped = map_labels(raw, mapping)

    assert mapped.labels.tolist() == [[255, 2, 3, 3, 255, 1, 4, 1]]
    assert [code for code, _ in mapping.items()] == list(range(16))


def test_unmapped_code():
    raw = ClassMap(np.array([[1, 99]]), raw=True)
    with pytest.raises(EvaluationError) as exc:
        map_labels(raw, LabelMapping.marida())
    assert exc.value.reason == EvaluationErrorReason.UNMAPPED_CODE


@pytest.mark.datafiles(DATA_DIR)
def test_load_mapping(datafiles):
    mapping = LabelMapping.load(os.path.join(str(datafiles), 'mapping.json'))
    assert mapping == LabelMapping.identity()


def test_mapping_save_load(tmpdir):
    path = os.path.join(str(tmpdir), 'marida.json')
    LabelMapping.marida().save(path)
    assert LabelMapping.load(path) == LabelMapping.marida()


def test_invalid_mapping():
    with pytest.raises(ConfigError) as exc:
        LabelMapping({1: 'plastic'})
    assert exc.value.reason == ConfigErrorReason.INVALID_VALUE

    with pytest.raises(ConfigError) as exc:
        LabelMapping({'one': 'debris'})
    assert exc.value.reason == ConfigErrorReason.INVALID_KEY


def test_format_table():
    table = format_table({'ndvi': small_report(), 'combined': small_report()})
    lines = table.splitlines()

    assert lines[0].split() == ['detector', 'accuracy', 'object_acc', 'macro_f1',
                                'debris_prec', 'debris_rec', 'debris_f1', 'debris_iou']
    assert set(lines[1]) == {'='}
    assert lines[2].split()[:2] == ['ndvi', '0.6000']
    assert lines[3].split()[-1] == '0.3333'


def test_format_table_undefined_score():
    truth = ClassMap(np.ones((2, 2), dtype=np.uint8))
    report = evaluate(ClassMap(np.ones((2, 2), dtype=np.uint8)), truth)

    row = format_table({'fdi': report}).splitlines()[2].split()

    assert row[0] == 'fdi'
    assert row[2] == 'n/a'
    assert row[-1] == 'n/a'


def test_per_index_report(plastic_scene):
    reports = per_index_report(plastic_scene, ThresholdConfig(mode='otsu'), None)

    assert list(reports) == list(REPORT_ORDER)
    evaluated = {report.evaluated_pixels for report in reports.values()}
    assert evaluated == {64 * 64}

    document = json.loads(reports_to_json(reports))
    assert list(document) == list(REPORT_ORDER)
    assert document['combined']['per_class']['debris']['iou'] >= 0.9


def test_per_index_report_mapping(plastic_scene):
    # Count water as ignored, only the plastic is evaluated
    mapping = LabelMapping({1: 'ignore', 2: 'debris'})

    reports = per_index_report(plastic_scene, ThresholdConfig(mode='otsu'), None, mapping=mapping)

    for report in reports.values():
        assert report.evaluated_pixels == 64
        assert report.ignored_pixels == 64 * 64 - 64

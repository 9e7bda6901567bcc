import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from evaluation.config import DELTA_BASE
from evaluation.metrics import confusion_matrix, depth_metrics, seg_metrics
from tensorcore import DimensionError, ParameterError


class TestSegMetrics:
    def test_two_class_example(self):
        metrics = seg_metrics(np.array([0, 1, 1, 1]), np.array([0, 0, 1, 1]), 2)
        np.testing.assert_allclose(metrics.per_class_iou, [0.5, 2 / 3])
        assert metrics.miou == pytest.approx(7 / 12)
        assert metrics.global_accuracy == pytest.approx(0.75)
        np.testing.assert_array_equal(metrics.confusion, [[1, 1], [0, 2]])

    def test_perfect_prediction(self):
        labels = np.array([[0, 1], [2, 2]])
        metrics = seg_metrics(labels, labels, 3)
        assert metrics.miou == 1.0
        assert metrics.global_accuracy == 1.0

    def test_absent_class_left_out_of_mean(self):
        metrics = seg_metrics(np.array([0, 1]), np.array([0, 1]), 4)
        assert np.isnan(metrics.per_class_iou[2]) and np.isnan(metrics.per_class_iou[3])
        assert metrics.miou == 1.0
        assert metrics.as_dict()["per_class_iou"][2] is None

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            seg_metrics(np.zeros((2, 2)), np.zeros((2, 3)), 2)

    def test_label_out_of_range(self):
        with pytest.raises(ParameterError, match="labels"):
            seg_metrics(np.array([0, 5]), np.array([0, 1]), 2)

    @settings(deadline=None)
    @given(arrays(np.int64, 30, elements=st.integers(0, 4)), arrays(np.int64, 30, elements=st.integers(0, 4)))
    def test_global_accuracy_is_trace_over_sum(self, pred, gt):
        metrics = seg_metrics(pred, gt, 5)
        confusion = confusion_matrix(pred, gt, 5)
        assert metrics.global_accuracy == pytest.approx(np.trace(confusion) / confusion.sum())
        assert 0.0 <= metrics.miou <= 1.0

    @settings(deadline=None, max_examples=200)
    @given(arrays(np.int64, (4, 6), elements=st.integers(0, 4)), arrays(np.int64, (4, 6), elements=st.integers(0, 4)))
    def test_matches_pixel_loop(self, pred, gt):
        num_classes = 5
        tp, fp, fn = [0] * num_classes, [0] * num_classes, [0] * num_classes
        correct = 0
        for i in range(pred.shape[0]):
            for j in range(pred.shape[1]):
                p, g = int(pred[i, j]), int(gt[i, j])
                if p == g:
                    tp[g] += 1
                    correct += 1
                else:
                    fp[p] += 1
                    fn[g] += 1
        iou = [tp[c] / (tp[c] + fp[c] + fn[c]) if tp[c] + fp[c] + fn[c] else None for c in range(num_classes)]
        present = [value for value in iou if value is not None]
        metrics = seg_metrics(pred, gt, num_classes)
        for c in range(num_classes):
            if iou[c] is None:
                assert np.isnan(metrics.per_class_iou[c])
            else:
                assert metrics.per_class_iou[c] == pytest.approx(iou[c])
        assert metrics.miou == pytest.approx(sum(present) / len(present))
        assert metrics.global_accuracy == pytest.approx(correct / pred.size)


class TestDepthMetrics:
    def test_scaled_prediction(self):
        gt = np.linspace(0.1, 1.0, 20).reshape(1, 1, 4, 5)
        metrics = depth_metrics(1.3 * gt, gt)
        assert metrics.delta1 == 0.0
        assert metrics.delta2 == 1.0
        assert metrics.delta3 == 1.0
        assert metrics.rmse_log == pytest.approx(np.log(1.3))

    def test_offset_prediction(self):
        gt = np.full((2, 1, 4, 4), 0.5)
        metrics = depth_metrics(gt + 0.1, gt)
        assert metrics.rmse_lin == pytest.approx(0.1)
        assert metrics.delta1 == 1.0

    def test_zero_depth_is_clipped(self):
        metrics = depth_metrics(np.zeros(4), np.zeros(4))
        assert metrics.delta1 == 1.0
        assert metrics.rmse_log == 0.0
        assert np.isfinite(metrics.abs_rel)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            depth_metrics(np.zeros(3), np.zeros(4))

    def test_clip_must_be_positive(self):
        with pytest.raises(ParameterError, match="min_depth_clip"):
            depth_metrics(np.ones(3), np.ones(3), min_depth_clip=0.0)

    @settings(deadline=None)
    @given(arrays(np.float64, 16, elements=st.floats(0.0, 1.0)), arrays(np.float64, 16, elements=st.floats(0.0, 1.0)))
    def test_thresholds_are_monotone(self, pred, gt):
        metrics = depth_metrics(pred, gt)
        assert metrics.delta1 <= metrics.delta2 <= metrics.delta3
        assert metrics.rmse_lin >= 0.0

    @settings(deadline=None, max_examples=200)
    @given(arrays(np.float64, (3, 5), elements=st.floats(0.0, 2.0)),
           arrays(np.float64, (3, 5), elements=st.floats(0.0, 2.0)))
    def test_matches_pixel_loop(self, pred, gt):
        clip = 1e-3
        hits = [0, 0, 0]
        squared, squared_log = 0.0, 0.0
        for i in range(pred.shape[0]):
            for j in range(pred.shape[1]):
                p, g = max(pred[i, j], clip), max(gt[i, j], clip)
                ratio = max(g / p, p / g)
                for k in range(3):
                    if ratio < DELTA_BASE ** (k + 1):
                        hits[k] += 1
                squared += (pred[i, j] - gt[i, j]) ** 2
                squared_log += (np.log(p) - np.log(g)) ** 2
        metrics = depth_metrics(pred, gt, min_depth_clip=clip)
        assert [metrics.delta1, metrics.delta2, metrics.delta3] == [h / pred.size for h in hits]
        assert metrics.rmse_lin == pytest.approx(np.sqrt(squared / pred.size), abs=1e-12)
        assert metrics.rmse_log == pytest.approx(np.sqrt(squared_log / pred.size), abs=1e-12)

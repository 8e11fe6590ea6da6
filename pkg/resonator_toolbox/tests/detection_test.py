# -*- coding:utf-8 -*-
"""

"""
import numpy as np
import pytest

from resonator_toolbox.baseline_ft import RangeAngleMap
from resonator_toolbox.detection import CfarConfig, DetectionMap, ca_cfar, neighbour_mean


def naive_cfar(values, alpha, offset):
    n_range, n_angle = values.shape
    hits = np.zeros(values.shape, dtype=bool)
    for i in range(n_range):
        for j in range(n_angle):
            total, count = 0.0, 0
            for di in (-1, 0, 1):
                for dj in (-2, -1, 0, 1, 2):
                    if di == 0 and dj == 0:
                        continue
                    r, c = i + di, j + dj
                    if 0 <= r < n_range and 0 <= c < n_angle:
                        total += values[r, c]
                        count += 1
            hits[i, j] = values[i, j] > alpha * (total / count + offset)
    return hits


class Test_CaCfar():
    def test_uniform(self):
        det = ca_cfar(np.full((8, 8), 3.0), CfarConfig(alpha=1.0, offset=0.0))
        assert det.n_hits == 0

    def test_threshold(self):
        values = np.full((5, 5), 2.0)
        values[2, 2] = 7.0
        det = ca_cfar(values, CfarConfig(alpha=2.0, offset=1.0))
        assert det.coordinates() == [(2, 2)]

        values[2, 2] = 6.0
        assert ca_cfar(values, CfarConfig(alpha=2.0, offset=1.0)).n_hits == 0

    def test_truncated_edges(self):
        values = np.ones((6, 8))
        values[0, 0] = 1.9
        assert neighbour_mean(values)[0, 0] == 1.0
        assert not ca_cfar(values, CfarConfig(alpha=2.0)).hits[0, 0]
        values[0, 0] = 2.5
        assert ca_cfar(values, CfarConfig(alpha=2.0)).hits[0, 0]

    def test_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            values = rng.exponential(size=(16, 16))
            alpha = rng.uniform(1.0, 3.0)
            offset = rng.uniform(0.0, 0.5)
            det = ca_cfar(RangeAngleMap(values), CfarConfig(alpha=alpha, offset=offset))
            assert np.array_equal(det.hits, naive_cfar(values, alpha, offset))

    def test_scale_covariance(self):
        rng = np.random.default_rng(1)
        values = rng.exponential(size=(16, 16))
        base = ca_cfar(values, CfarConfig(alpha=1.5)).hits
        for c in (0.25, 4.0):
            assert np.array_equal(ca_cfar(values * c, CfarConfig(alpha=1.5)).hits, base)

    def test_monotone_cut(self):
        rng = np.random.default_rng(2)
        values = rng.exponential(size=(16, 16))
        cfg = CfarConfig(alpha=1.5, offset=0.1)
        for r, l in ca_cfar(values, cfg).coordinates():
            raised = values.copy()
            raised[r, l] += 1.0
            assert ca_cfar(raised, cfg).hits[r, l]

    def test_errors(self):
        with pytest.raises(ValueError):
            ca_cfar(np.ones((2, 8)))
        with pytest.raises(ValueError):
            ca_cfar(np.ones((8, 4)))
        with pytest.raises(ValueError):
            CfarConfig(alpha=0.0)
        with pytest.raises(ValueError):
            CfarConfig(window=(5, 5))
        with pytest.raises(ValueError):
            CfarConfig(guard=1)

    def test_detection_map(self):
        hits = np.zeros((4, 6), dtype=bool)
        hits[1, 2] = hits[3, 0] = True
        det = DetectionMap(hits)
        assert det.n_hits == 2
        assert det.coordinates() == [(1, 2), (3, 0)]

# -*- coding:utf-8 -*-
"""

"""
import numpy as np
import pytest
from scipy import fft as sp_fft

from resonator_toolbox.baseline_ft import RangeAngleMap, ft_map, ft_map_avg, ft_spectrum, dft_2d_oracle
from resonator_toolbox.signal_sim import RadarParams, PointTarget, Scene, synthesize, range_resolution


def tone(j, l, n_samples=64, n_vx=8, a=1.0):
    n = np.arange(n_samples)
    m = np.arange(n_vx)
    phi = 2 * np.pi * (l - n_vx // 2) / n_vx
    return a * np.outer(np.exp(2j * np.pi * j * n / n_samples), np.exp(1j * m * phi))


class Test_FtMap():
    def test_zero(self):
        m = ft_map(np.zeros((64, 8), dtype=complex), 32)
        assert m.shape == (32, 8)
        assert np.all(m.values == 0)

    def test_tone_peak(self):
        m = ft_map(tone(9, 6, a=0.5), 32)
        assert np.unravel_index(np.argmax(m.values), m.shape) == (9, 6)
        assert m.values[9, 6] == pytest.approx(64 * 8 * 0.5, rel=1e-12)

    def test_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            chirp = rng.normal(size=(64, 8)) + 1j * rng.normal(size=(64, 8))
            oracle = dft_2d_oracle(chirp, 32)
            scale = np.abs(oracle).max()
            np.testing.assert_allclose(ft_spectrum(chirp, 32), oracle, rtol=1e-9, atol=1e-9 * scale)
            np.testing.assert_allclose(ft_map(chirp, 32).values, np.abs(oracle), rtol=1e-9, atol=1e-9 * scale)

    def test_parseval(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(64, 8)) + 1j * rng.normal(size=(64, 8))
        spectrum = sp_fft.fft(x, axis=0)
        np.testing.assert_allclose(np.sum(np.abs(spectrum) ** 2, axis=0), 64 * np.sum(np.abs(x) ** 2, axis=0),
                                   rtol=1e-9)
        full = ft_spectrum(x)
        assert np.sum(np.abs(full) ** 2) == pytest.approx(64 * 8 * np.sum(np.abs(x) ** 2), rel=1e-9)

    def test_bad_input(self):
        with pytest.raises(ValueError):
            ft_map(np.zeros(64, dtype=complex))
        with pytest.raises(ValueError):
            ft_map(np.zeros((64, 8), dtype=complex), 65)
        with pytest.raises(ValueError):
            RangeAngleMap(-np.ones((2, 2)))


class Test_FtMapAvg():
    def test_single(self):
        x = tone(3, 2) + 0.1
        assert np.array_equal(ft_map_avg([x], 32).values, ft_map(x, 32).values)

    def test_identical(self):
        x = tone(3, 2) + 0.1
        avg = ft_map_avg([x] * 8, 32)
        np.testing.assert_allclose(avg.values, ft_map(x, 32).values, rtol=1e-14)
        assert avg.chirp_span == 8

    def test_empty(self):
        with pytest.raises(ValueError):
            ft_map_avg([])

    def test_noise_averaging(self):
        # peak over the strongest background cell
        p = RadarParams(n_samples=64, n_vx=8, n_chirps=8)
        target = PointTarget(5 * range_resolution(p), 0.0)
        single, averaged = [], []
        for seed in range(20):
            frame = synthesize(Scene([target], noise_stddev=0.2, seed=seed, params=p))
            for maps, m in ((single, ft_map(frame.chirp(0), 32)), (averaged, ft_map_avg(frame.samples, 32))):
                background = m.values.copy()
                background[4:7, 3:6] = 0
                maps.append(m.values[5, 4] / background.max())
        assert np.median(averaged) >= np.median(single)

    def test_noise_contrast(self):
        # averaging magnitudes keeps the background mean and narrows its spread
        p = RadarParams(n_samples=64, n_vx=8, n_chirps=8)
        target = PointTarget(5 * range_resolution(p), 0.0)
        single, averaged = [], []
        for seed in range(20):
            frame = synthesize(Scene([target], noise_stddev=0.2, seed=seed, params=p))
            for contrast, m in ((single, ft_map(frame.chirp(0), 32)), (averaged, ft_map_avg(frame.samples, 32))):
                mask = np.ones(m.shape, dtype=bool)
                mask[4:7, 3:6] = False
                background = m.values[mask]
                contrast.append((m.values[5, 4] - background.mean()) / background.std())
        assert np.median(averaged) > 2 * np.median(single)

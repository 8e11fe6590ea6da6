# -*- coding:utf-8 -*-
"""
Fourier-transform range-angle baseline.

The contract is the plain 2-D DFT with the resonator grid's bin indexing:

    X[j, l] = sum_n sum_m x[n, m] exp(-i 2 pi j n / N) exp(-i m phi_l),  phi_l = 2 pi (l - M // 2) / M

truncated to the first n_range_bins rows; scipy.fft computes it.
"""
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .const import MODEL_FT
from .signal_sim import angle_bin_phase


@dataclass
class RangeAngleMap:
    values: np.ndarray  # real [n_range_bins][n_angle_bins]
    source: str = MODEL_FT
    chirp_span: int = 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError(f'map values must be 2-D, got shape {self.values.shape}')
        if np.any(self.values < 0):
            raise ValueError('map values must be non-negative')

    @property
    def shape(self):
        return self.values.shape


def _check_chirp(chirp, n_range_bins):
    chirp = np.asarray(chirp)
    if chirp.ndim != 2:
        raise ValueError(f'chirp must be [n_samples][n_vx], got shape {chirp.shape}')
    n_range_bins = chirp.shape[0] if n_range_bins is None else n_range_bins
    if not 1 <= n_range_bins <= chirp.shape[0]:
        raise ValueError(f'n_range_bins {n_range_bins} out of range for {chirp.shape[0]} samples')
    return chirp, n_range_bins


def ft_spectrum(chirp, n_range_bins=None):
    chirp, n_range_bins = _check_chirp(chirp, n_range_bins)
    angle = sp_fft.fftshift(sp_fft.fft(chirp, axis=1), axes=1)
    return sp_fft.fft(angle, axis=0)[:n_range_bins]


def ft_map(chirp, n_range_bins=None):
    return RangeAngleMap(np.abs(ft_spectrum(chirp, n_range_bins)), MODEL_FT, 1)


def ft_map_avg(chirps, n_range_bins=None):
    """Element-wise mean of the per-chirp magnitude maps."""
    chirps = list(chirps)
    if not chirps:
        raise ValueError('ft_map_avg needs at least one chirp')
    total = sum(ft_map(c, n_range_bins).values for c in chirps)
    return RangeAngleMap(total / len(chirps), MODEL_FT, len(chirps))


def dft_2d_oracle(chirp, n_range_bins=None):
    """Direct 2-D DFT, one explicit sum per output bin, O(N^2 M^2); the reference for tests."""
    chirp, n_range_bins = _check_chirp(chirp, n_range_bins)
    n_samples, n_vx = chirp.shape
    phi = angle_bin_phase(np.arange(n_vx), n_vx)
    n = np.arange(n_samples)
    m = np.arange(n_vx)
    out = np.zeros((n_range_bins, n_vx), dtype=np.complex128)
    for j in range(n_range_bins):
        for l in range(n_vx):
            kernel = np.outer(np.exp(-2j * np.pi * j * n / n_samples), np.exp(-1j * m * phi[l]))
            out[j, l] = np.sum(chirp * kernel)
    return out

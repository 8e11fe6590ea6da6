# -*- coding:utf-8 -*-
"""
Cell-averaging CFAR over range-angle maps.

A cell under test (CUT) is a hit when value > alpha * (mean of its neighbours + offset),
the neighbours being the cells of a 3 x 5 (range x angle) window without the CUT and
without guard cells; at the map edges the window is truncated.
"""
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .utils import logging

logger = logging.get_logger(__name__)

CFAR_WINDOW = (3, 5)


@dataclass
class CfarConfig:
    alpha: float = 2.0
    offset: float = 0.0
    window: tuple = CFAR_WINDOW
    guard: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f'alpha must be > 0, got {self.alpha}')
        self.window = tuple(self.window)
        if self.window != CFAR_WINDOW:
            raise ValueError(f'window is fixed to {CFAR_WINDOW}, got {self.window}')
        if self.guard != 0:
            raise ValueError(f'guard cells are not supported, got {self.guard}')

    def to_dict(self):
        return dict(alpha=self.alpha, offset=self.offset)


@dataclass
class DetectionMap:
    hits: np.ndarray  # bool [n_range_bins][n_angle_bins]

    @property
    def n_hits(self):
        return int(self.hits.sum())

    def coordinates(self):
        """Hit (range_bin, angle_bin) pairs in row-major order."""
        return [(int(r), int(l)) for r, l in zip(*np.nonzero(self.hits))]


def _kernel(window):
    kernel = np.ones(window)
    kernel[window[0] // 2, window[1] // 2] = 0.0
    return kernel


def neighbour_mean(values, window=CFAR_WINDOW):
    kernel = _kernel(window)
    total = convolve2d(values, kernel, mode='same', boundary='fill', fillvalue=0)
    count = convolve2d(np.ones_like(values), kernel, mode='same', boundary='fill', fillvalue=0)
    return total / count


def cfar_threshold(values, cfg):
    return cfg.alpha * (neighbour_mean(values, cfg.window) + cfg.offset)


def ca_cfar(range_angle_map, cfg=None):
    cfg = cfg if cfg is not None else CfarConfig()
    values = getattr(range_angle_map, 'values', range_angle_map)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < cfg.window[0] or values.shape[1] < cfg.window[1]:
        raise ValueError(f'map of shape {values.shape} is smaller than the CFAR window {cfg.window}')

    threshold = cfar_threshold(values, cfg)
    hits = values > threshold
    if logger.is_debug_enabled():
        logger.debug(f'cfar alpha={cfg.alpha} offset={cfg.offset}: {int(hits.sum())} hits')
    return DetectionMap(hits)

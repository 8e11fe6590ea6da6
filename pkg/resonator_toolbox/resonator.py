# -*- coding:utf-8 -*-
"""
Grid of resonate-and-fire neurons, one per (range bin j, angle bin l).

Per sample n every angle neuron l projects the antenna vector onto its weight row,
y_l = sum_m W_lm x_m, then each neuron (j, l) runs

    s      <- exp(i dw_j) s + y_l                 (rf_step)
    s_max  <- max(s_max, |s|)                      (envelope_update)
    w_max  <- max(w_max, s_max - |s|)
    g      <- (1 - alpha_g) g + alpha_g dLambda   (gradient_update)

followed by the spike codec. After a full chirp |s| equals the magnitude of the
2-D DFT of the chirp, and s * exp(i dw_j) equals its value.
"""
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import pandas as pd

from .const import RESET, CONTINUOUS, DEFAULT_RANGE_BINS
from .signal_sim import angle_bin_phase
from .spike_codecs import concat_events
from .utils import logging, parallel_map

logger = logging.get_logger(__name__)


@dataclass
class GridConfig:
    n_range_bins: int = DEFAULT_RANGE_BINS
    n_angle_bins: int = 32
    n_samples: int = 512
    alpha_g: float = 0.001
    alpha_x: float = 1.0

    def __post_init__(self):
        for name in ('n_range_bins', 'n_angle_bins', 'n_samples'):
            if int(getattr(self, name)) < 1:
                raise ValueError(f'{name} must be >= 1, got {getattr(self, name)}')
            setattr(self, name, int(getattr(self, name)))
        if self.n_range_bins > self.n_samples:
            raise ValueError(f'n_range_bins ({self.n_range_bins}) must not exceed n_samples ({self.n_samples})')
        if not 0 < self.alpha_g <= 1:
            raise ValueError(f'alpha_g must lie in (0, 1], got {self.alpha_g}')
        if not 0 < self.alpha_x <= 1:
            raise ValueError(f'alpha_x must lie in (0, 1], got {self.alpha_x}')

    @property
    def shape(self):
        return self.n_range_bins, self.n_angle_bins

    @property
    def n_neurons(self):
        return self.n_range_bins * self.n_angle_bins

    @staticmethod
    def from_radar(params, n_range_bins=DEFAULT_RANGE_BINS, **kwargs):
        """Grid matching a sensor, keeping only positive-frequency range bins."""
        return GridConfig(n_range_bins=min(n_range_bins, max(params.n_samples // 2, 1)),
                          n_angle_bins=params.n_vx,
                          n_samples=params.n_samples,
                          **kwargs)


@dataclass
class NeuronState:
    s: np.ndarray
    s_max: np.ndarray
    w_max: np.ndarray
    g: np.ndarray
    # alpha_x smoothed magnitude
    s_f: np.ndarray
    codec: Any = None

    @staticmethod
    def zeros(shape=()):
        return NeuronState(s=np.zeros(shape, dtype=np.complex128),
                           s_max=np.zeros(shape),
                           w_max=np.zeros(shape),
                           g=np.zeros(shape),
                           s_f=np.zeros(shape))

    @property
    def envelope(self):
        return self.s_max - self.w_max

    def reset_chirp(self, mode=RESET):
        if mode not in (RESET, CONTINUOUS):
            raise ValueError(f'Unknown chirp mode "{mode}"')
        self.s[...] = 0
        self.s_max[...] = 0
        self.w_max[...] = 0
        self.s_f[...] = 0
        if mode == RESET:
            self.g[...] = 0
        return self

    def block(self, rows):
        """State of a contiguous block of range bins; the arrays are views."""
        return NeuronState(s=self.s[rows], s_max=self.s_max[rows], w_max=self.w_max[rows],
                           g=self.g[rows], s_f=self.s_f[rows],
                           codec=self.codec.block(rows) if self.codec is not None else None)


@dataclass
class WeightMatrix:
    w: np.ndarray  # complex [n_angle_bins][n_vx]

    @property
    def phases(self):
        n_angle_bins = self.w.shape[0]
        return angle_bin_phase(np.arange(n_angle_bins), n_angle_bins)


@dataclass
class RotationTable:
    rot: np.ndarray  # complex [n_range_bins]


def weight_matrix(n_angle_bins, n_vx=None):
    """W_lm = exp(-i m phi_l), phi_l uniformly spaced over [-pi, pi)."""
    n_vx = n_angle_bins if n_vx is None else n_vx
    phi = angle_bin_phase(np.arange(n_angle_bins), n_angle_bins)
    m = np.arange(n_vx)
    return WeightMatrix(np.exp(-1j * np.outer(phi, m)))


def rotation_table(n_range_bins, n_samples):
    """rot_j = exp(i dw_j), dw_j = 2 pi j / n_samples."""
    return RotationTable(np.exp(1j * 2.0 * np.pi * np.arange(n_range_bins) / n_samples))


def dendritic_project(x, w_l):
    x = np.asarray(x)
    w_l = np.asarray(w_l)
    if x.shape != w_l.shape or x.ndim != 1:
        raise ValueError(f'antenna vector {x.shape} and weight row {w_l.shape} do not match')
    return complex(np.dot(w_l, x))


def project_chirp(chirp, weights):
    """Dendritic projection of every sample onto every weight row, [n_samples][n_angle_bins]."""
    if chirp.shape[-1] != weights.w.shape[1]:
        raise ValueError(f'chirp has {chirp.shape[-1]} antennas, weights expect {weights.w.shape[1]}')
    return chirp @ weights.w.T


def rf_step(state, y, rot_j):
    state.s[...] = rot_j * state.s + y
    return state


def envelope_update(state, alpha_x=1.0):
    """
    Update s_max and w_max from the fresh |s|.

    :return: (state, d_s_max, d_w_max)
    """
    mag = np.abs(state.s)
    if alpha_x < 1.0:
        state.s_f[...] = (1.0 - alpha_x) * state.s_f + alpha_x * mag
        mag = state.s_f

    s_max = np.maximum(state.s_max, mag)
    w_max = np.maximum(state.w_max, s_max - mag)
    d_s_max = s_max - state.s_max
    d_w_max = w_max - state.w_max
    state.s_max[...] = s_max
    state.w_max[...] = w_max
    return state, d_s_max, d_w_max


def gradient_update(state, d_lambda, alpha_g):
    state.g[...] = (1.0 - alpha_g) * state.g + alpha_g * d_lambda
    return state


def analytic_state(t, targets, omega_j):
    """
    Closed-form continuous-time state of ds/dt = i omega_j s + sum_k b_k exp(i omega_k t), s(0) = 0.

    :param targets: iterable of (b_k, omega_k) with b_k = a_k * beta_kl
    """
    s = 0j
    for b, omega_k in targets:
        d = omega_j - omega_k
        if d == 0:
            s += b * t * np.exp(1j * omega_j * t)
        else:
            s += 1j * b * np.exp(1j * omega_j * t) / d * (np.exp(-1j * d * t) - 1.0)
    return s


@dataclass
class ChirpResult:
    events: np.ndarray
    snapshots: Dict[int, np.ndarray]


class ResonatorGrid(object):
    """
    All neurons of a range-angle map together with an optional spike codec.

    The codec reads s_max, w_max and g after the gradient update and never writes them.
    """

    def __init__(self, config, codec=None, n_vx=None):
        self.config = config
        self.codec = codec
        self.weights = weight_matrix(config.n_angle_bins, n_vx)
        self.rotation = rotation_table(config.n_range_bins, config.n_samples)
        self.state = NeuronState.zeros(config.shape)
        if codec is not None:
            self.state.codec = codec.init_state(config.shape)
        self.chirps_processed = 0

    @property
    def n_vx(self):
        return self.weights.w.shape[1]

    def reset(self):
        self.state.reset_chirp(RESET)
        if self.codec is not None:
            self.codec.reset(self.state.codec)
        self.chirps_processed = 0
        return self

    def process_chirp(self, chirp, mode=RESET, chirp_idx=None, checkpoints=None, n_jobs=1):
        """
        Run one chirp through every neuron.

        :param chirp: complex [n_samples][n_vx]
        :param mode: RESET clears the gradient at chirp start, CONTINUOUS carries it over
        :param checkpoints: sample counts at which the readout map is captured
        :param n_jobs: range-bin blocks processed in parallel, results do not depend on it
        :return: ChirpResult with the ordered spike events and the captured readouts
        """
        chirp = np.asarray(chirp)
        expected = (self.config.n_samples, self.n_vx)
        if chirp.shape != expected:
            raise ValueError(f'chirp shape {chirp.shape} does not match grid {expected}')

        chirp_idx = self.chirps_processed if chirp_idx is None else chirp_idx
        checkpoints = sorted(set(checkpoints)) if checkpoints else []

        self.state.reset_chirp(mode)
        if self.codec is not None:
            self.codec.reset(self.state.codec)

        y = project_chirp(chirp, self.weights)

        n_range = self.config.n_range_bins
        n_blocks = max(1, min(n_jobs or 1, n_range))
        bounds = np.linspace(0, n_range, n_blocks + 1).astype(int)
        blocks = [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

        results = parallel_map(lambda rows: self._run_block(y, rows, chirp_idx, checkpoints), blocks, n_blocks)

        events = concat_events([r[0] for r in results])
        snapshots = {c: np.concatenate([r[1][c] for r in results], axis=0) for c in checkpoints}

        self.chirps_processed += 1
        if logger.is_debug_enabled():
            logger.debug(f'chirp {chirp_idx} ({mode}): {len(events)} spikes')
        return ChirpResult(events=events, snapshots=snapshots)

    def _run_block(self, y, rows, chirp_idx, checkpoints):
        cfg = self.config
        state = self.state.block(rows)
        rot = self.rotation.rot[rows][:, None]
        codec = self.codec
        wanted = set(checkpoints)

        events = []
        snapshots = {}
        for n in range(cfg.n_samples):
            rf_step(state, y[n][None, :], rot)
            _, d_s_max, d_w_max = envelope_update(state, cfg.alpha_x)
            gradient_update(state, d_s_max - d_w_max, cfg.alpha_g)
            if codec is not None:
                block_events = codec.step(state.codec, state, chirp_idx, n, rows.start)
                if block_events is not None:
                    events.append(block_events)
            if n + 1 in wanted:
                snapshots[n + 1] = self._readout(state, cfg.n_samples)

        return concat_events(events), snapshots

    def _readout(self, state, n_samples):
        if self.codec is None:
            return np.maximum(state.g, 0.0)
        return self.codec.readout(state.codec, n_samples)

    def readout(self):
        """Map intensity of the current state, the codec decode or max(g, 0) without codec."""
        return self._readout(self.state, self.config.n_samples)

    def magnitude(self):
        return np.abs(self.state.s)

    def spectrum(self):
        """State rotated by one step, equal to the 2-D DFT value after a full chirp."""
        return self.state.s * self.rotation.rot[:, None]

    def snapshot(self):
        n_range, n_angle = self.config.shape
        range_bin, angle_bin = np.meshgrid(np.arange(n_range), np.arange(n_angle), indexing='ij')
        return pd.DataFrame({
            'range_bin': range_bin.ravel(),
            'angle_bin': angle_bin.ravel(),
            'g': self.state.g.ravel(),
            's_max': self.state.s_max.ravel(),
            'w_max': self.state.w_max.ravel(),
            'abs_s': np.abs(self.state.s).ravel(),
        })


def process_chirp(chirp, grid, mode=RESET, **kwargs):
    result = grid.process_chirp(chirp, mode=mode, **kwargs)
    return grid, result


# -*- coding:utf-8 -*-
"""
Spiking functions turning the resonator envelope into spikes, and their readouts.

adaptive  +1 spikes while s_max exceeds a self-incrementing threshold, -1 spikes likewise for w_max;
          readout n_pos - n_neg
rate      LIF membrane driven by gain * g, reset by subtraction; readout spike count
time      LIF membrane driven by gain * g, a single spike per chirp; readout T_c - t_s

All state is held in arrays so that one step updates a whole grid, or a single
neuron when the arrays are 0-d.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from .const import MODEL_ADAPTIVE, MODEL_RATE, MODEL_TIME, SPIKING_MODELS, MODEL_FT, MODEL_GRADIENT
from .utils import logging

logger = logging.get_logger(__name__)

# one packed event record, also the on-disk layout of binary spike streams
SPIKE_DTYPE = np.dtype([('chirp', '<u2'),
                        ('sample', '<u2'),
                        ('range_bin', '<u2'),
                        ('angle_bin', '<u2'),
                        ('polarity', 'i1')])

SPIKE_COLUMNS = list(SPIKE_DTYPE.names)

NO_SPIKE = -1


class SpikeEvent(NamedTuple):
    chirp_idx: int
    sample_idx: int
    range_bin: int
    angle_bin: int
    polarity: int


def empty_events():
    return np.empty(0, dtype=SPIKE_DTYPE)


def make_events(counts, chirp_idx, sample_idx, polarity, row_offset=0):
    """Expand per-neuron spike counts of one sample into event records."""
    counts = np.asarray(counts)
    if counts.ndim != 2:
        raise ValueError(f'spike counts must be a [range][angle] array, got shape {counts.shape}')
    r, l = np.nonzero(counts)
    if r.size == 0:
        return empty_events()

    reps = counts[r, l].astype(np.int64)
    events = np.empty(int(reps.sum()), dtype=SPIKE_DTYPE)
    events['chirp'] = chirp_idx
    events['sample'] = sample_idx
    events['range_bin'] = np.repeat(r + row_offset, reps)
    events['angle_bin'] = np.repeat(l, reps)
    events['polarity'] = polarity
    return events


def sort_events(events):
    """Order by (chirp, sample, range_bin, angle_bin), positive before negative."""
    order = np.lexsort((-events['polarity'].astype(np.int16),
                        events['angle_bin'],
                        events['range_bin'],
                        events['sample'],
                        events['chirp']))
    return events[order]


def concat_events(parts):
    parts = [p for p in parts if p is not None and len(p) > 0]
    if not parts:
        return empty_events()
    return sort_events(np.concatenate(parts))


def events_to_frame(events):
    return pd.DataFrame({name: events[name] for name in SPIKE_COLUMNS}, columns=SPIKE_COLUMNS)


def frame_to_events(df):
    missing = set(SPIKE_COLUMNS) - set(df.columns)
    if missing:
        raise ValueError(f'spike table lacks columns {sorted(missing)}')
    events = np.empty(len(df), dtype=SPIKE_DTYPE)
    for name in SPIKE_COLUMNS:
        events[name] = df[name].to_numpy()
    return events


def event_list(events):
    return [SpikeEvent(*(int(v) for v in e)) for e in events]


@dataclass
class AdaptiveThresholdState:
    u_th_s: np.ndarray
    u_th_w: np.ndarray
    n_pos: np.ndarray
    n_neg: np.ndarray
    gamma: float

    def block(self, rows):
        return AdaptiveThresholdState(self.u_th_s[rows], self.u_th_w[rows],
                                      self.n_pos[rows], self.n_neg[rows], self.gamma)


@dataclass
class LifState:
    u: np.ndarray
    n_spikes: np.ndarray
    # first spike sample of the chirp, NO_SPIKE when silent
    t_spike: np.ndarray
    refractory_done: np.ndarray
    u_th: float
    u_rest: float
    tau: float
    leak: bool = True

    def block(self, rows):
        return LifState(self.u[rows], self.n_spikes[rows], self.t_spike[rows], self.refractory_done[rows],
                        self.u_th, self.u_rest, self.tau, self.leak)


def adaptive_state(shape=(), gamma=0.1):
    st = AdaptiveThresholdState(u_th_s=np.zeros(shape), u_th_w=np.zeros(shape),
                                n_pos=np.zeros(shape, dtype=np.int64), n_neg=np.zeros(shape, dtype=np.int64),
                                gamma=gamma)
    return reset_adaptive(st)


def reset_adaptive(st):
    # the first spike fires when the estimate crosses gamma
    st.u_th_s[...] = st.gamma
    st.u_th_w[...] = st.gamma
    st.n_pos[...] = 0
    st.n_neg[...] = 0
    return st


def lif_state(shape=(), u_th=0.35, u_rest=0.0, tau=100.0, leak=True):
    st = LifState(u=np.zeros(shape), n_spikes=np.zeros(shape, dtype=np.int64),
                  t_spike=np.full(shape, NO_SPIKE, dtype=np.int64),
                  refractory_done=np.zeros(shape, dtype=bool),
                  u_th=u_th, u_rest=u_rest, tau=tau, leak=leak)
    return st


def reset_lif(st):
    st.u[...] = 0
    st.n_spikes[...] = 0
    st.t_spike[...] = NO_SPIKE
    st.refractory_done[...] = False
    return st


def _cross(value, threshold, gamma):
    """Count threshold crossings of one step, raising the threshold by gamma per spike."""
    counts = np.zeros(np.shape(value), dtype=np.int64)
    mask = value > threshold
    while np.any(mask):
        counts += mask
        threshold[...] = np.where(mask, threshold + gamma, threshold)
        mask = value > threshold
    return counts


def adaptive_step(st, s_max, w_max):
    """
    :return: (st, n_pos, n_neg) spike counts emitted in this step
    """
    n_pos = _cross(s_max, st.u_th_s, st.gamma)
    n_neg = _cross(w_max, st.u_th_w, st.gamma)
    st.n_pos += n_pos
    st.n_neg += n_neg
    return st, n_pos, n_neg


def _charge(st, g):
    drive = g + st.u_rest
    if st.leak:
        return st.u + (drive - st.u) / st.tau
    return st.u + drive / st.tau


def rate_lif_step(st, g):
    """
    One forward-Euler step (dt = 1 sample) of tau du/dt = -u + g + u_rest, reset by subtraction.

    :return: (st, spike) boolean spike flags
    """
    u = _charge(st, g)
    spike = u >= st.u_th
    st.u[...] = np.where(spike, u - st.u_th, u)
    st.n_spikes += spike
    return st, spike


def time_lif_step(st, g, sample_idx=0):
    """
    Like rate_lif_step, but a neuron stays refractory after its first spike until the chirp ends.

    :return: (st, spike) boolean spike flags
    """
    active = ~st.refractory_done
    u = _charge(st, g)
    st.u[...] = np.where(active, u, st.u)
    spike = active & (st.u >= st.u_th)
    st.refractory_done |= spike
    st.t_spike[...] = np.where(spike, sample_idx, st.t_spike)
    st.n_spikes += spike
    return st, spike


def decode_time(t_s, T_c):
    """
    Linear readout of a time-coded spike, T_c - t_s; no spike (None or NO_SPIKE) decodes to 0.
    """
    if t_s is None:
        return 0.0
    t_s = np.asarray(t_s)
    spiked = t_s != NO_SPIKE
    if np.any(spiked & ((t_s < 0) | (t_s > T_c))):
        raise ValueError(f'spike times must lie in [0, {T_c}]')
    value = np.where(spiked, T_c - t_s, 0).astype(float)
    return float(value) if value.ndim == 0 else value


def decode_rate(n_spikes, n_neg=None):
    """Spike count readout; with negative spikes given, n_pos - n_neg."""
    if n_neg is None:
        return np.asarray(n_spikes, dtype=float) if np.ndim(n_spikes) else float(n_spikes)
    diff = np.asarray(n_spikes, dtype=float) - np.asarray(n_neg, dtype=float)
    return diff if diff.ndim else float(diff)


def time_code_interval(t_s, u_th, u_rest, tau, leak=True):
    """
    Range [low, high) of constant g that makes the discrete membrane first spike at sample t_s.

    The membrane reaches u_k = G (1 - (1 - 1/tau)^k) after k steps with leak, k G / tau without,
    G = g + u_rest; a spike at sample t_s means k = t_s + 1 is the first step with u_k >= u_th.
    """
    k = np.asarray(t_s, dtype=float) + 1.0
    with np.errstate(divide='ignore'):
        if leak:
            rho = 1.0 - 1.0 / tau
            low = u_th / (1.0 - rho ** k)
            high = u_th / (1.0 - rho ** (k - 1.0))
        else:
            low = u_th * tau / k
            high = u_th * tau / (k - 1.0)
    return low - u_rest, high - u_rest


def invert_time(t_s, u_th, u_rest, tau, leak=True):
    """Smallest constant g consistent with a first spike at sample t_s."""
    return time_code_interval(t_s, u_th, u_rest, tau, leak)[0]


def min_spiking_drive(n_samples, u_th, u_rest, tau, leak=True):
    """Smallest constant drive whose membrane spikes within a chirp of n_samples."""
    return float(invert_time(n_samples - 1, u_th, u_rest, tau, leak))


def spike_time(g, u_th, u_rest, tau):
    """Continuous-time first spike instant -tau ln(1 - u_th / (g + u_rest)); inf when never reached."""
    drive = np.asarray(g, dtype=float) + u_rest
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(drive > u_th, -tau * np.log(1.0 - u_th / drive), np.inf)
    return t if t.ndim else float(t)


class AdaptiveThresholdCodec(object):
    name = MODEL_ADAPTIVE

    def __init__(self, gamma=0.1):
        if not gamma > 0:
            raise ValueError(f'gamma must be > 0, got {gamma}')
        self.gamma = gamma

    def init_state(self, shape):
        return adaptive_state(shape, self.gamma)

    def reset(self, st):
        return reset_adaptive(st)

    def step(self, st, neuron, chirp_idx, sample_idx, row_offset=0):
        _, n_pos, n_neg = adaptive_step(st, neuron.s_max, neuron.w_max)
        return concat_events([make_events(n_pos, chirp_idx, sample_idx, 1, row_offset),
                              make_events(n_neg, chirp_idx, sample_idx, -1, row_offset)])

    def readout(self, st, n_samples):
        return np.maximum(decode_rate(st.n_pos, st.n_neg), 0.0)


class _LifCodec(object):
    """
    LIF membrane charged by gain * g; gain maps the gradient scale of a sensor onto the
    membrane thresholds and is the only input the codecs add to the neuron model.
    """

    def __init__(self, u_th=0.35, u_rest=0.0, tau=100.0, leak=True, gain=1.0):
        if not u_th > 0:
            raise ValueError(f'u_th must be > 0, got {u_th}')
        if not tau > 0:
            raise ValueError(f'tau must be > 0, got {tau}')
        if not gain > 0:
            raise ValueError(f'gain must be > 0, got {gain}')
        self.u_th = u_th
        self.u_rest = u_rest
        self.tau = tau
        self.leak = leak
        self.gain = gain

    def init_state(self, shape):
        return lif_state(shape, self.u_th, self.u_rest, self.tau, self.leak)

    def reset(self, st):
        return reset_lif(st)


class RateLifCodec(_LifCodec):
    name = MODEL_RATE

    def step(self, st, neuron, chirp_idx, sample_idx, row_offset=0):
        _, spike = rate_lif_step(st, self.gain * neuron.g)
        return make_events(spike, chirp_idx, sample_idx, 1, row_offset)

    def readout(self, st, n_samples):
        return decode_rate(st.n_spikes)


class TimeLifCodec(_LifCodec):
    name = MODEL_TIME

    def __init__(self, u_th=231.0, u_rest=250.0, tau=200.0, leak=True, gain=1.0):
        super(TimeLifCodec, self).__init__(u_th, u_rest, tau, leak, gain)

    def step(self, st, neuron, chirp_idx, sample_idx, row_offset=0):
        _, spike = time_lif_step(st, self.gain * neuron.g, sample_idx)
        return make_events(spike, chirp_idx, sample_idx, 1, row_offset)

    def readout(self, st, n_samples):
        return decode_time(st.t_spike, n_samples)


_CODECS = {
    MODEL_ADAPTIVE: AdaptiveThresholdCodec,
    MODEL_RATE: RateLifCodec,
    MODEL_TIME: TimeLifCodec,
}


def make_codec(model, **params):
    """Codec for a model tag; the ft and gradient models have none."""
    if model in (MODEL_FT, MODEL_GRADIENT):
        return None
    if model not in _CODECS:
        raise ValueError(f'Unknown spiking model "{model}", valid models are {", ".join(SPIKING_MODELS)}')
    return _CODECS[model](**params)


def decode_stream(events, model, shape, n_samples, n_chirps=1):
    """
    Rebuild a map from a spike stream: the per-chirp readout averaged over n_chirps.
    """
    if model not in SPIKING_MODELS:
        raise ValueError(f'only spiking models can be decoded from spikes, got "{model}"')
    if n_chirps < 1:
        raise ValueError(f'n_chirps must be >= 1, got {n_chirps}')

    total = np.zeros(shape)
    for chirp in np.unique(events['chirp']):
        ev = events[events['chirp'] == chirp]
        rows = ev['range_bin'].astype(np.int64)
        cols = ev['angle_bin'].astype(np.int64)
        m = np.zeros(shape)
        if model == MODEL_ADAPTIVE:
            np.add.at(m, (rows, cols), ev['polarity'].astype(float))
            m = np.maximum(m, 0.0)
        elif model == MODEL_RATE:
            np.add.at(m, (rows, cols), 1.0)
        else:
            first = np.full(shape, NO_SPIKE, dtype=np.int64)
            # events are sorted by sample, keep the earliest per neuron
            for r, c, s in zip(rows[::-1], cols[::-1], ev['sample'][::-1].astype(np.int64)):
                first[r, c] = s
            m = decode_time(first, n_samples)
        total += m
    return total / n_chirps

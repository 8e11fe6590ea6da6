# -*- coding:utf-8 -*-
"""
Scoring of detection maps against scene labels.

"""
from dataclasses import dataclass, field, asdict
from typing import List, NamedTuple, Optional

import numpy as np
import pandas as pd

from .const import MAP_CELL_BITS, SPIKE_RECORD_BITS, EARLY_STRIDE, RESET
from .detection import ca_cfar, CfarConfig
from .signal_sim import RangeOutOfBoundsError, range_to_bin, azimuth_to_phase, phase_to_angle_bin
from .utils import logging

logger = logging.get_logger(__name__)

DEFAULT_MATCH_RADIUS = 1


@dataclass
class BinLabel:
    bins: List[tuple] = field(default_factory=list)

    def __len__(self):
        return len(self.bins)

    def sorted(self):
        return sorted(self.bins)


class ScoreCounts(NamedTuple):
    tp: int
    fp: int
    fn: int


def label_bins(scene, grid):
    """
    Ground-truth bins of every target of a scene: range bin round(omega_k / d_omega) half-up,
    angle bin the nearest phi_l to the inter-antenna phase.
    """
    bins = []
    for k, target in enumerate(scene.targets):
        range_bin = int(np.floor(range_to_bin(target.range_m, scene.params) + 0.5))
        if not 0 <= range_bin < grid.n_range_bins:
            raise RangeOutOfBoundsError(
                f'target {k} at {target.range_m} m falls in range bin {range_bin}, '
                f'outside the grid of {grid.n_range_bins} bins')
        angle_bin = int(phase_to_angle_bin(azimuth_to_phase(target.azimuth_rad, scene.params), grid.n_angle_bins))
        bins.append((range_bin, angle_bin))
    return BinLabel(bins)


def score(det, labels, radius=DEFAULT_MATCH_RADIUS):
    """
    Greedy one-to-one matching of labels to hits.

    Labels are visited in (range_bin, angle_bin) order; each takes the nearest free hit within
    Chebyshev distance radius, ties broken by the lowest hit bin.

    :return: ScoreCounts(tp, fp, fn)
    """
    if radius < 0:
        raise ValueError(f'radius must be >= 0, got {radius}')
    hits = getattr(det, 'hits', det)
    hit_bins = np.argwhere(hits)
    free = np.ones(len(hit_bins), dtype=bool)

    tp = 0
    for r, l in labels.sorted():
        if not free.any():
            break
        dist = np.maximum(np.abs(hit_bins[:, 0] - r), np.abs(hit_bins[:, 1] - l))
        candidates = np.nonzero(free & (dist <= radius))[0]
        if candidates.size == 0:
            continue
        # argwhere is row-major, so the first minimum is the lowest bin
        best = candidates[np.argmin(dist[candidates])]
        free[best] = False
        tp += 1

    return ScoreCounts(tp=tp, fp=len(hit_bins) - tp, fn=len(labels) - tp)


def precision_recall(tp, fp, fn):
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return precision, recall


def f_score(precision, recall):
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def snr_adjusted(range_angle_map, labels):
    """Mean over targets of the map value at the label divided by the map sum; 0 for an empty map."""
    values = np.asarray(getattr(range_angle_map, 'values', range_angle_map), dtype=float)
    if np.any(values < 0):
        raise ValueError('snr_adjusted needs a non-negative map')
    total = values.sum()
    if total <= 0 or len(labels) == 0:
        return 0.0
    return float(np.mean([values[r, l] for r, l in labels.bins]) / total)


def bandwidth_ratio(spike_count, n_cells, bits_per_spike=1):
    """Spike bits over the bits of one float32 range-angle map."""
    return spike_count * bits_per_spike / (n_cells * MAP_CELL_BITS)


@dataclass
class SceneScore:
    index: int
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_score: float
    snr: float
    spike_count: float = 0
    recipe: Optional[str] = None


def scene_score(range_angle_map, labels, cfar=None, radius=DEFAULT_MATCH_RADIUS, spike_count=0, index=0,
                recipe=None):
    det = ca_cfar(range_angle_map, cfar if cfar is not None else CfarConfig())
    counts = score(det, labels, radius)
    p, r = precision_recall(*counts)
    if len(labels) == 0:
        logger.warning(f'scene {index} has no labels')
    return SceneScore(index=index, tp=counts.tp, fp=counts.fp, fn=counts.fn,
                      precision=p, recall=r, f_score=f_score(p, r),
                      snr=snr_adjusted(range_angle_map, labels),
                      spike_count=float(spike_count), recipe=recipe)


@dataclass
class EvalReport:
    model: str
    f_score: float
    precision: float
    recall: float
    snr: float
    spike_count: float
    bandwidth_ratio: float
    bandwidth_ratio_packed: float
    n_cells: int
    scenes: List[SceneScore] = field(default_factory=list)
    mode: Optional[str] = None

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d['scenes'] = [SceneScore(**s) for s in d.get('scenes', [])]
        return EvalReport(**d)

    def summary(self):
        return dict(model=self.model, f_score=self.f_score, precision=self.precision, recall=self.recall,
                    snr=self.snr, spike_count=self.spike_count, bandwidth_ratio=self.bandwidth_ratio)


def make_report(model, scene_scores, n_cells, mode=None):
    """
    Macro average over scenes: precision and recall are averaged with equal weight,
    the F-score is taken from the averages.
    """
    if scene_scores:
        p = float(np.mean([s.precision for s in scene_scores]))
        r = float(np.mean([s.recall for s in scene_scores]))
        snr = float(np.mean([s.snr for s in scene_scores]))
        spikes = float(np.mean([s.spike_count for s in scene_scores]))
    else:
        p = r = snr = spikes = 0.0
    return EvalReport(model=model, f_score=f_score(p, r), precision=p, recall=r, snr=snr,
                      spike_count=spikes,
                      bandwidth_ratio=bandwidth_ratio(spikes, n_cells),
                      bandwidth_ratio_packed=bandwidth_ratio(spikes, n_cells, SPIKE_RECORD_BITS),
                      n_cells=int(n_cells), scenes=list(scene_scores), mode=mode)


def reports_to_frame(reports):
    return pd.DataFrame([r.summary() for r in reports],
                        columns=['model', 'f_score', 'precision', 'recall', 'snr', 'spike_count', 'bandwidth_ratio'])


_CURVE_VALUES = ('precision', 'recall', 'f_score')


def _normalize_curve(df):
    for name in _CURVE_VALUES:
        final = df[name].iloc[-1]
        peak = df[name].max()
        df[f'{name}_norm'] = df[name] / final if final > 0 else 0.0
        df[f'{name}_norm_max'] = df[name] / peak if peak > 0 else 0.0
    return df


def early_detection_curve(chirp, grid, labels, cfar=None, stride=EARLY_STRIDE, radius=DEFAULT_MATCH_RADIUS,
                          n_jobs=1):
    """
    Detection quality of the readout after every stride samples of one chirp.

    :param grid: ResonatorGrid, usually with a spike codec
    :return: DataFrame with one row per checkpoint: samples, tp, fp, fn, precision, recall, f_score
        and the same three values normalized by the final checkpoint and by their maximum
    """
    n_samples = grid.config.n_samples
    if stride < 1 or n_samples % stride != 0:
        raise ValueError(f'stride {stride} must divide n_samples {n_samples}')
    checkpoints = list(range(stride, n_samples + 1, stride))

    grid.reset()
    result = grid.process_chirp(chirp, mode=RESET, checkpoints=checkpoints, n_jobs=n_jobs)

    rows = []
    for c in checkpoints:
        s = scene_score(result.snapshots[c], labels, cfar, radius)
        rows.append(dict(samples=c, tp=s.tp, fp=s.fp, fn=s.fn,
                         precision=s.precision, recall=s.recall, f_score=s.f_score))
    return _normalize_curve(pd.DataFrame(rows))


def average_curves(curves):
    """Scene-averaged early-detection curve, normalized after averaging."""
    if not curves:
        raise ValueError('no curves to average')
    df = pd.concat(curves).groupby('samples', sort=True)[['tp', 'fp', 'fn'] + list(_CURVE_VALUES)].mean()
    return _normalize_curve(df.reset_index())

# -*- coding:utf-8 -*-
"""
Two-stage grid search maximizing the training F-score.

Stage 'gradient+cfar' tunes alpha_g, alpha_x and the CFAR alpha/offset on the gradient readout
(the map itself for the ft and gradient models); stage 'codec' tunes the spike codec with
the stage-1 values held fixed. The LIF codec grids sweep the input gain around the value
that brings the typical target gradient of the training scenes to the spiking threshold.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd
from sklearn.model_selection import ParameterGrid

from .const import STAGE_GRADIENT_CFAR, STAGE_CODEC, MODELS, MODEL_FT, MODEL_GRADIENT, MODEL_ADAPTIVE, \
    MODEL_TIME, SPIKING_MODELS, MODE_SINGLE, MODES, PARAMS_DEFAULT, GRADIENT_KEYS, CODEC_KEYS, CFAR_DEFAULT, \
    TRAIN_SEED
from .detection import CfarConfig
from .evaluator import Evaluator, make_model
from .metrics import DEFAULT_MATCH_RADIUS, label_bins
from .signal_sim import synthesize
from .spike_codecs import min_spiking_drive
from .utils import logging, parallel_map, merge_params

logger = logging.get_logger(__name__)

STAGES = (STAGE_GRADIENT_CFAR, STAGE_CODEC)

# sweep grid names of the CFAR parameters, kept apart from model params
CFAR_PREFIX = 'cfar_'
CFAR_OFFSET_GRID = (0.0, 0.001, 0.01, 0.1, 1.0)

BRACKET = (0.25, 0.5, 1.0, 2.0, 4.0)

# multiples of the reference gain, skewed upwards so that weaker targets reach the threshold
GAIN_STEPS = (0.25, 1.0, 4.0, 16.0, 64.0, 256.0)
# label-cell gradient level the reference gain is computed for
GAIN_QUANTILE = 0.5

GRID_REGISTRY = {}


def register_grid(stage):
    def register_grid_fn(fn):
        if stage in GRID_REGISTRY:
            raise ValueError(f'Cannot register duplicate grid ({stage})')
        GRID_REGISTRY[stage] = fn
        return fn

    return register_grid_fn


def bracket(value, upper=None):
    """value scaled by 1/4 .. 4 in 5 log steps, optionally clipped to upper."""
    if isinstance(value, bool) or value == 0:
        return [value]
    values = [value * k for k in BRACKET]
    if upper is not None:
        values = [min(v, upper) for v in values]
    return sorted(set(values))


@register_grid(STAGE_GRADIENT_CFAR)
def _gradient_cfar_grid(model, base):
    grid = {}
    if model != MODEL_FT:
        grid['alpha_g'] = bracket(base['alpha_g'], upper=1.0)
        grid['alpha_x'] = bracket(base['alpha_x'], upper=1.0)
    grid[CFAR_PREFIX + 'alpha'] = bracket(CFAR_DEFAULT['alpha'])
    grid[CFAR_PREFIX + 'offset'] = list(CFAR_OFFSET_GRID)
    return grid


def gain_grid(reference):
    return [float(reference * k) for k in GAIN_STEPS]


@register_grid(STAGE_CODEC)
def _codec_grid(model, base, gain=None):
    if model == MODEL_ADAPTIVE:
        return dict(gamma=bracket(base['gamma']))
    if model not in SPIKING_MODELS:
        return {}
    # u_th and gain only scale each other, the membrane shape stays at its tuned values
    grid = {k: [base[k]] for k in ('u_th', 'u_rest', 'leak') if k in base}
    # the time codec keeps tau, together with u_th and u_rest it puts the zero-input spike past the chirp
    grid['tau'] = [base['tau']] if model == MODEL_TIME else bracket(base['tau'])
    grid['gain'] = gain_grid(base['gain'] if gain is None else gain)
    return grid


def default_grid(stage, model, params=None, gain=None):
    if stage not in GRID_REGISTRY:
        raise ValueError(f'Unknown stage "{stage}", valid stages are {", ".join(STAGES)}')
    base = merge_params(PARAMS_DEFAULT[model], params)
    if stage == STAGE_CODEC:
        return GRID_REGISTRY[stage](model, base, gain)
    return GRID_REGISTRY[stage](model, base)


@dataclass
class SweepSpec:
    stage: str
    model: str
    grids: Dict[str, list] = field(default_factory=dict)
    # model params and 'cfar' dict fixed by the previous stage
    fixed: Dict[str, object] = field(default_factory=dict)
    mode: str = MODE_SINGLE
    n_chirps: int = 8
    radius: int = DEFAULT_MATCH_RADIUS
    # replace the gain grid by one around the reference gain of the training scenes
    calibrate_gain: bool = False

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f'Unknown stage "{self.stage}", valid stages are {", ".join(STAGES)}')
        if self.model not in MODELS:
            raise ValueError(f'Unknown model "{self.model}", valid models are {", ".join(MODELS)}')
        if self.mode not in MODES:
            raise ValueError(f'Unknown mode "{self.mode}", valid modes are {", ".join(MODES)}')
        if not self.grids:
            self.grids = default_grid(self.stage, self.model, self.fixed_params)
            self.calibrate_gain = 'gain' in self.grids
        self.grids = {k: list(v) for k, v in self.grids.items()}
        empty = [k for k, v in self.grids.items() if len(v) == 0]
        if empty:
            raise ValueError(f'grids must be non-empty, got empty {empty}')

        allowed = set(self.allowed_keys())
        unknown = set(self.grids) - allowed
        if unknown:
            raise ValueError(f'stage {self.stage} of {self.model} can not sweep {sorted(unknown)}, '
                             f'allowed are {sorted(allowed)}')

    def allowed_keys(self):
        if self.stage == STAGE_CODEC:
            return CODEC_KEYS[self.model]
        keys = [CFAR_PREFIX + 'alpha', CFAR_PREFIX + 'offset']
        return keys if self.model == MODEL_FT else list(GRADIENT_KEYS) + keys

    @property
    def fixed_params(self):
        return {k: v for k, v in self.fixed.items() if k != 'cfar'}

    @property
    def fixed_cfar(self):
        return merge_params(CFAR_DEFAULT, self.fixed.get('cfar'))

    def points(self):
        """Every grid point in ParameterGrid order, the tie-break order."""
        return list(ParameterGrid(self.grids))

    def split(self, point):
        """(model params, cfar params) of a grid point merged over the fixed values."""
        params = merge_params(self.fixed_params, {k: v for k, v in point.items() if not k.startswith(CFAR_PREFIX)})
        cfar = merge_params(self.fixed_cfar,
                            {k[len(CFAR_PREFIX):]: v for k, v in point.items() if k.startswith(CFAR_PREFIX)})
        return params, cfar

    def to_dict(self):
        return dict(stage=self.stage, model=self.model, grids=self.grids, fixed=self.fixed, mode=self.mode,
                    n_chirps=self.n_chirps, radius=self.radius, calibrate_gain=self.calibrate_gain)

    @staticmethod
    def from_dict(d):
        return SweepSpec(**d)


@dataclass
class SweepResult:
    best_params: Dict[str, object]
    best_cfar: Dict[str, float]
    best_score: float
    best_index: int
    table: pd.DataFrame
    spec: Optional[SweepSpec] = None


def _check_train(train):
    if not train:
        raise ValueError('the training dataset is empty')
    bad = [i for i, s in enumerate(train) if s.dataset_seed != TRAIN_SEED]
    if bad:
        raise ValueError(f'sweeps run on training scenes (seed {TRAIN_SEED}) only, scenes {bad[:5]} are not')


def _model_key(params):
    return tuple(sorted((k, repr(v)) for k, v in params.items()))


def gradient_params(params):
    return {k: v for k, v in params.items() if k in GRADIENT_KEYS}


def reference_gain(model, params, train, frames=None, mode=MODE_SINGLE, n_chirps=8, n_jobs=1,
                   quantile=GAIN_QUANTILE):
    """
    LIF gain that lifts the quantile of the gradient at the label cells of the training scenes to
    the smallest drive spiking within a chirp.

    Falls back to the gain of params when the scenes carry no positive gradient at their labels.
    """
    codec = merge_params(PARAMS_DEFAULT[model], params)
    gradient = make_model(MODEL_GRADIENT, gradient_params(codec), mode=mode, n_chirps=n_chirps)
    outputs = Evaluator(n_jobs=n_jobs).run(gradient, train, frames)

    levels = []
    for out, scene in zip(outputs, train):
        labels = label_bins(scene, gradient.grid_config(scene.params))
        levels.extend(out.map.values[r, l] for r, l in labels.bins)
    level = float(np.quantile(levels, quantile)) if levels else 0.0
    drive = min_spiking_drive(train[0].params.n_samples, codec['u_th'], codec['u_rest'], codec['tau'],
                              codec.get('leak', True))
    if not (level > 0 and drive > 0):
        logger.warning(f'no reference gain for {model}: label gradient {level:.3g}, drive {drive:.3g}, '
                       f'keeping gain {codec["gain"]}')
        return codec['gain']

    gain = drive / level
    logger.info(f'[{model}] reference gain {gain:.4g} from label gradient {level:.4g} and drive {drive:.4g}')
    return gain


def _score_model(spec):
    """Model the points of a stage are scored on; stage 1 of a spiking model uses its gradient readout."""
    if spec.stage == STAGE_GRADIENT_CFAR and spec.model in SPIKING_MODELS:
        return MODEL_GRADIENT
    return spec.model


def run_sweep(spec, train, frames=None, n_jobs=1):
    """
    Evaluate every grid point on the training scenes.

    Maps are computed once per distinct model-param combination and scored under every
    CFAR combination of the grid.

    :return: SweepResult, the best point is the first maximum in ParameterGrid order
    """
    _check_train(train)
    if frames is None:
        frames = parallel_map(synthesize, train, n_jobs)
    if spec.calibrate_gain and 'gain' in spec.grids:
        gain = reference_gain(spec.model, spec.fixed_params, train, frames, spec.mode, spec.n_chirps, n_jobs)
        spec.grids['gain'] = gain_grid(gain)
        spec.calibrate_gain = False

    points = spec.points()
    split = [spec.split(p) for p in points]
    groups = {}
    for i, (params, _) in enumerate(split):
        groups.setdefault(_model_key(params), []).append(i)

    name = _score_model(spec)
    evaluator = Evaluator(radius=spec.radius, n_jobs=n_jobs)
    reports = [None] * len(points)
    for n, indices in enumerate(groups.values()):
        params = split[indices[0]][0]
        if name != spec.model:
            params = gradient_params(params)
        model = make_model(name, params or None, mode=spec.mode, n_chirps=spec.n_chirps)
        outputs = evaluator.run(model, train, frames)
        for i in indices:
            reports[i] = evaluator.score(model, outputs, train, CfarConfig(**split[i][1]))
        logger.log_every_n(logging.INFO, f'[{spec.stage}/{spec.model}] {n + 1}/{len(groups)} param sets', 10)

    rows = []
    for point, report in zip(points, reports):
        row = dict(point)
        row.update(f_score=report.f_score, precision=report.precision, recall=report.recall,
                   snr=report.snr, spike_count=report.spike_count)
        rows.append(row)
    table = pd.DataFrame(rows)

    scores = np.array([r.f_score for r in reports])
    best = int(np.argmax(scores))
    best_params, best_cfar = split[best]

    if spec.stage == STAGE_CODEC:
        assert all(best_params[k] == v for k, v in gradient_params(spec.fixed_params).items())
    logger.info(f'[{spec.stage}/{spec.model}] best f_score={scores[best]:.4f} at {points[best]}')
    return SweepResult(best_params=best_params, best_cfar=best_cfar, best_score=float(scores[best]),
                       best_index=best, table=table, spec=spec)

# -*- coding:utf-8 -*-
"""

"""
import time
import traceback
from dataclasses import dataclass

import numpy as np

from ..const import MODES, MODE_SINGLE, DEFAULT_RANGE_BINS
from ..detection import CfarConfig
from ..metrics import DEFAULT_MATCH_RADIUS, label_bins, scene_score, make_report
from ..resonator import GridConfig
from ..signal_sim import synthesize
from ..spike_codecs import empty_events
from ..utils import logging, parallel_map

logger = logging.get_logger(__name__)


@dataclass
class ModelOutput:
    map: object  # RangeAngleMap
    events: np.ndarray
    # events behind one map, the bandwidth a frame costs; averaged per chirp in average mode
    spike_count: float
    n_chirps: int
    # final resonator grid, None for the ft model
    grid: object = None


class BaseModel(object):
    name = None

    def __init__(self, params=None, mode=MODE_SINGLE, n_chirps=8, n_range_bins=DEFAULT_RANGE_BINS, n_jobs=1):
        if mode not in MODES:
            raise ValueError(f'Unknown mode "{mode}", valid modes are {", ".join(MODES)}')
        if n_chirps < 1:
            raise ValueError(f'n_chirps must be >= 1, got {n_chirps}')
        self.params = dict(params or {})
        self.mode = mode
        self.n_chirps = n_chirps
        self.n_range_bins = n_range_bins
        self.n_jobs = n_jobs

    def grid_config(self, radar):
        return GridConfig.from_radar(radar, self.n_range_bins)

    def chirps_for(self, radar):
        """Chirps a frame of radar feeds into one map."""
        if self.mode == MODE_SINGLE:
            return 1
        return min(self.n_chirps, radar.n_chirps)

    def chirps_to_use(self, frame):
        if self.mode == MODE_SINGLE:
            return 1
        return min(self.n_chirps, frame.n_chirps)

    def check_frame(self, frame, radar):
        if frame.samples.ndim != 3 or frame.samples.shape[1:] != radar.chirp_shape:
            raise ValueError(f'frame shape {frame.samples.shape} does not match chirps of {radar.chirp_shape}')
        if frame.n_chirps < 1:
            raise ValueError('frame has no chirps')

    def process(self, frame, radar):
        """
        :return: ModelOutput of one frame under the model's evaluation mode
        """
        raise NotImplementedError

    def empty_events(self):
        return empty_events()


class Evaluator(object):
    def __init__(self, cfar=None, radius=DEFAULT_MATCH_RADIUS, n_jobs=1):
        self.cfar = cfar if cfar is not None else CfarConfig()
        self.radius = radius
        self.n_jobs = n_jobs

    def run(self, model, scenes, frames=None):
        """Model outputs of every scene, frames synthesized when not given."""
        if frames is not None and len(frames) != len(scenes):
            raise ValueError(f'{len(frames)} frames for {len(scenes)} scenes')

        def fn(i):
            frame = frames[i] if frames is not None else synthesize(scenes[i])
            out = model.process(frame, scenes[i].params)
            out.grid = None
            return out

        return parallel_map(fn, range(len(scenes)), self.n_jobs)

    def score(self, model, outputs, scenes, cfar=None):
        if len(outputs) != len(scenes):
            raise ValueError(f'{len(outputs)} outputs for {len(scenes)} scenes')
        cfar = cfar if cfar is not None else self.cfar
        scores = []
        for i, (out, scene) in enumerate(zip(outputs, scenes)):
            labels = label_bins(scene, model.grid_config(scene.params))
            scores.append(scene_score(out.map, labels, cfar, self.radius, out.spike_count, i, scene.recipe))
        n_cells = outputs[0].map.values.size if outputs else 0
        return make_report(model.name, scores, n_cells, model.mode)

    def evaluate(self, scenes, models, frames=None):
        """
        :return: (reports, errors), a failing model is logged and listed as (name, message)
        """
        if not scenes:
            raise ValueError('no scenes to evaluate')
        if frames is None:
            frames = parallel_map(synthesize, scenes, self.n_jobs)

        reports = []
        errors = []
        for model in models:
            try:
                start = time.time()
                outputs = self.run(model, scenes, frames)
                report = self.score(model, outputs, scenes)
                elapsed = time.time() - start
                logger.info(f'[{model.name}/{model.mode}] f_score={report.f_score:.4f} precision={report.precision:.4f}'
                            f' recall={report.recall:.4f} snr={report.snr:.4f} spikes={report.spike_count:.1f}'
                            f' in {elapsed:.1f}s')
                reports.append(report)
            except Exception as e:
                errors.append((model.name, str(e)))
                logger.warning(f'model {model.name} failed: {e}')
                if logger.is_debug_enabled():
                    logger.debug(traceback.format_exc())

        return reports, errors

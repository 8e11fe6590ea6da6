# -*- coding:utf-8 -*-
"""
Resonator-grid models: the gradient readout and the three spiking codecs.
"""
import numpy as np

from ._base import BaseModel, ModelOutput
from ..baseline_ft import RangeAngleMap
from ..const import MODELS, MODEL_FT, PARAMS_DEFAULT, GRADIENT_KEYS, CODEC_KEYS, RESET, CONTINUOUS, \
    MODE_SINGLE, MODE_CONTINUOUS
from ..resonator import GridConfig, ResonatorGrid
from ..spike_codecs import make_codec, concat_events
from ..utils import logging, merge_params

logger = logging.get_logger(__name__)


class ResonatorModel(BaseModel):
    def __init__(self, name, params=None, **kwargs):
        if name not in MODELS or name == MODEL_FT:
            raise ValueError(f'Unknown resonator model "{name}"')
        allowed = set(GRADIENT_KEYS) | set(CODEC_KEYS[name])
        unknown = set(params or {}) - allowed
        if unknown:
            raise ValueError(f'unknown {name} params {sorted(unknown)}, valid are {sorted(allowed)}')
        self.name = name
        super(ResonatorModel, self).__init__(merge_params(PARAMS_DEFAULT[name], params), **kwargs)

    @property
    def codec_params(self):
        return {k: v for k, v in self.params.items() if k in CODEC_KEYS[self.name]}

    def grid_config(self, radar):
        return GridConfig.from_radar(radar, self.n_range_bins,
                                     alpha_g=self.params['alpha_g'], alpha_x=self.params['alpha_x'])

    def make_grid(self, radar):
        return ResonatorGrid(self.grid_config(radar), make_codec(self.name, **self.codec_params), n_vx=radar.n_vx)

    def process(self, frame, radar):
        self.check_frame(frame, radar)
        grid = self.make_grid(radar)
        n = self.chirps_to_use(frame)

        if self.mode in (MODE_SINGLE, MODE_CONTINUOUS):
            parts = []
            for c in range(n):
                mode = CONTINUOUS if self.mode == MODE_CONTINUOUS and c > 0 else RESET
                result = grid.process_chirp(frame.chirp(c), mode=mode, chirp_idx=c, n_jobs=self.n_jobs)
                parts.append(result.events)
            values = grid.readout()
            spike_count = len(parts[-1])
        else:
            parts = []
            total = np.zeros(grid.config.shape)
            for c in range(n):
                result = grid.process_chirp(frame.chirp(c), mode=RESET, chirp_idx=c, n_jobs=self.n_jobs)
                parts.append(result.events)
                total += grid.readout()
            values = total / n
            # spikes per chirp, the stream of every chirp carries one map
            spike_count = sum(len(p) for p in parts) / n

        events = concat_events(parts)
        if logger.is_debug_enabled():
            logger.debug(f'[{self.name}/{self.mode}] {n} chirps, {len(events)} spikes')
        return ModelOutput(map=RangeAngleMap(values, self.name, n), events=events, spike_count=spike_count,
                           n_chirps=n, grid=grid)

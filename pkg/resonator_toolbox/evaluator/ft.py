# -*- coding:utf-8 -*-
"""

"""
from ._base import BaseModel, ModelOutput
from ..baseline_ft import ft_map, ft_map_avg
from ..const import MODEL_FT, MODE_AVERAGE


class FTModel(BaseModel):
    """Fourier-transform baseline; without state, the continuous mode reads the final chirp."""
    name = MODEL_FT

    def __init__(self, params=None, **kwargs):
        if params:
            raise ValueError(f'the ft model takes no params, got {sorted(params)}')
        super(FTModel, self).__init__(None, **kwargs)

    def process(self, frame, radar):
        self.check_frame(frame, radar)
        n_range_bins = self.grid_config(radar).n_range_bins
        n = self.chirps_to_use(frame)
        if self.mode == MODE_AVERAGE:
            m = ft_map_avg([frame.chirp(c) for c in range(n)], n_range_bins)
        else:
            m = ft_map(frame.chirp(n - 1), n_range_bins)
        return ModelOutput(map=m, events=self.empty_events(), spike_count=0, n_chirps=n)

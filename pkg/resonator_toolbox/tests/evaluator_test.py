# -*- coding:utf-8 -*-
"""

"""
from functools import lru_cache

import numpy as np
import pytest

from resonator_toolbox.const import MODE_SINGLE, MODE_CONTINUOUS, MODE_AVERAGE, RESET, CONTINUOUS, LIF_GAIN, MODELS, \
    MODEL_FT, MODEL_GRADIENT, MODEL_ADAPTIVE, MODEL_RATE, MODEL_TIME, SPIKING_MODELS, PARAMS_DEFAULT, \
    STAGE_GRADIENT_CFAR, STAGE_CODEC, RECIPE_CLOSE_2010, EVAL_SEED
from resonator_toolbox.datasets import dsutils
from resonator_toolbox.detection import CfarConfig
from resonator_toolbox.evaluator import BaseModel, Evaluator, FTModel, ResonatorModel, make_model
from resonator_toolbox.resonator import GridConfig, ResonatorGrid
from resonator_toolbox.metrics import label_bins, early_detection_curve, average_curves
from resonator_toolbox.signal_sim import RadarParams, PointTarget, Scene, ChirpFrame, synthesize, synthesize_chirp, \
    range_resolution
from resonator_toolbox.spike_codecs import make_codec
from resonator_toolbox.sweep import SweepSpec, run_sweep, default_grid, reference_gain

PARAMS = RadarParams(n_samples=64, n_vx=8, n_chirps=4)


def scene(seed=0, noise=0.01):
    targets = [PointTarget(8 * range_resolution(PARAMS), 0.0, rcs=2.0),
               PointTarget(20 * range_resolution(PARAMS), 0.4, rcs=3.0)]
    return Scene(targets, noise_stddev=noise, seed=seed, params=PARAMS, dataset_seed=0)


class FailingModel(BaseModel):
    name = 'failing'

    def process(self, frame, radar):
        raise ValueError('broken')


class Test_Models():
    def test_ft_zero(self):
        frame = ChirpFrame(np.zeros(PARAMS.frame_shape, dtype=complex))
        out = FTModel().process(frame, PARAMS)
        assert out.map.shape == (32, 8)
        assert np.all(out.map.values == 0)
        assert out.spike_count == 0

    def test_ft_average(self):
        frame = synthesize(scene())
        out = FTModel(mode=MODE_AVERAGE, n_chirps=8).process(frame, PARAMS)
        assert out.n_chirps == 4
        assert out.map.chirp_span == 4

    def test_gradient_matches_library(self):
        frame = synthesize(scene())
        out = make_model('gradient', dict(alpha_g=0.01)).process(frame, PARAMS)

        grid = ResonatorGrid(GridConfig.from_radar(PARAMS, alpha_g=0.01, alpha_x=1.0))
        grid.process_chirp(frame.chirp(0), mode=RESET, chirp_idx=0)
        assert np.array_equal(out.map.values, grid.readout())
        assert len(out.events) == 0

    def test_continuous(self):
        frame = synthesize(scene())
        out = make_model('rate', dict(alpha_g=0.01), mode=MODE_CONTINUOUS).process(frame, PARAMS)

        grid = ResonatorGrid(GridConfig.from_radar(PARAMS, alpha_g=0.01), make_codec('rate', gain=LIF_GAIN))
        for c in range(4):
            result = grid.process_chirp(frame.chirp(c), mode=CONTINUOUS if c else RESET, chirp_idx=c)
        assert np.array_equal(out.map.values, grid.readout())
        assert out.spike_count == len(result.events)
        assert set(np.unique(out.events['chirp'])) <= {0, 1, 2, 3}

    def test_time_single_spike_per_chirp(self):
        frame = synthesize(scene())
        model = make_model('time', dict(alpha_g=0.05, u_th=0.5, u_rest=0.0, tau=10.0), mode=MODE_CONTINUOUS)
        out = model.process(frame, PARAMS)
        assert len(out.events) > 0
        keys = np.stack([out.events['chirp'], out.events['range_bin'], out.events['angle_bin']], axis=1)
        _, counts = np.unique(keys, axis=0, return_counts=True)
        assert counts.max() == 1

    def test_average(self):
        frame = synthesize(scene())
        out = make_model('adaptive', mode=MODE_AVERAGE).process(frame, PARAMS)

        grid = ResonatorGrid(GridConfig.from_radar(PARAMS), make_codec('adaptive'))
        maps, n_events = [], 0
        for c in range(4):
            n_events += len(grid.process_chirp(frame.chirp(c), chirp_idx=c).events)
            maps.append(grid.readout())
        np.testing.assert_allclose(out.map.values, np.mean(maps, axis=0))
        assert len(out.events) == n_events
        assert out.spike_count == n_events / 4

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_model('rate', dict(gamma=0.1))
        with pytest.raises(ValueError):
            make_model('ft', dict(alpha_g=0.1))
        with pytest.raises(ValueError):
            make_model('gradient', mode='burst')
        with pytest.raises(ValueError):
            ResonatorModel('ft')

    def test_shape_mismatch(self):
        frame = ChirpFrame(np.zeros((1, 32, 8), dtype=complex))
        with pytest.raises(ValueError):
            make_model('gradient').process(frame, PARAMS)


class Test_Evaluator():
    def test_perfect_noise_free(self):
        scenes = [scene(noise=0.0)]
        reports, errors = Evaluator().evaluate(scenes, [FTModel(), make_model('gradient', dict(alpha_g=0.01))])
        assert errors == []
        for report in reports:
            assert report.recall == 1.0
            assert report.scenes[0].tp + report.scenes[0].fn == 2

    def test_errors_collected(self):
        reports, errors = Evaluator().evaluate([scene()], [FailingModel(), FTModel()])
        assert [r.model for r in reports] == ['ft']
        assert errors == [('failing', 'broken')]

    def test_thread_invariance(self):
        scenes = [scene(seed=s) for s in range(4)]
        models = [make_model('rate', dict(alpha_g=0.01))]
        r1, _ = Evaluator(n_jobs=1).evaluate(scenes, models)
        r4, _ = Evaluator(n_jobs=4).evaluate(scenes, models)
        assert r1[0].to_dict() == r4[0].to_dict()

    def test_empty(self):
        with pytest.raises(ValueError):
            Evaluator().evaluate([], [FTModel()])

    def test_frame_count(self):
        with pytest.raises(ValueError):
            Evaluator().run(FTModel(), [scene()], [])


DIRECTIONAL_SCENES = 2
STAGE1_GRIDS = dict(alpha_g=[0.001], alpha_x=[0.6, 1.0])
CHIRPS = 8


@lru_cache(maxsize=None)
def desk_data():
    train = dsutils.load_train(n_scenes=DIRECTIONAL_SCENES)
    evaluation = dsutils.load_eval(n_scenes=DIRECTIONAL_SCENES)
    return train, [synthesize(s) for s in train], evaluation, [synthesize(s) for s in evaluation]


@lru_cache(maxsize=None)
def tuned():
    """Two-stage sweep on the training scenes, {model: (params, cfar)}."""
    train, train_frames, _, _ = desk_data()
    ft = run_sweep(SweepSpec(STAGE_GRADIENT_CFAR, MODEL_FT), train, train_frames)
    # stage 1 of the spiking models scores the gradient readout, one run serves them all
    grids = dict(default_grid(STAGE_GRADIENT_CFAR, MODEL_GRADIENT), **STAGE1_GRIDS)
    stage1 = run_sweep(SweepSpec(STAGE_GRADIENT_CFAR, MODEL_GRADIENT, grids=grids), train, train_frames)

    result = {MODEL_FT: (ft.best_params, ft.best_cfar), MODEL_GRADIENT: (stage1.best_params, stage1.best_cfar)}
    fixed = dict(stage1.best_params, cfar=stage1.best_cfar)
    for model in SPIKING_MODELS:
        grids = default_grid(STAGE_CODEC, model, stage1.best_params)
        if 'tau' in grids:
            grids['tau'] = [PARAMS_DEFAULT[model]['tau']]
        stage2 = run_sweep(SweepSpec(STAGE_CODEC, model, grids=grids, fixed=fixed, calibrate_gain=True),
                           train, train_frames)
        result[model] = (stage2.best_params, stage2.best_cfar)
    return result


@lru_cache(maxsize=None)
def continuous_gain_factor():
    # the gain follows the gradient level, which converges over the chirps of continuous mode
    train, train_frames, _, _ = desk_data()
    params = tuned()[MODEL_RATE][0]
    single = reference_gain(MODEL_RATE, params, train, train_frames)
    multi = reference_gain(MODEL_RATE, params, train, train_frames, MODE_CONTINUOUS, CHIRPS)
    return multi / single


@lru_cache(maxsize=None)
def reports(mode=MODE_SINGLE, models=MODELS):
    _, _, evaluation, frames = desk_data()
    result = {}
    for model in models:
        params, cfar = tuned()[model]
        if mode == MODE_CONTINUOUS and 'gain' in params:
            params = dict(params, gain=params['gain'] * continuous_gain_factor())
        m = make_model(model, params or None, mode=mode, n_chirps=CHIRPS)
        evaluator = Evaluator(cfar=CfarConfig(**cfar))
        result[model] = evaluator.score(m, evaluator.run(m, evaluation, frames), evaluation)
    return result


class Test_Directional():
    def test_spiking_models_keep_up_with_ft(self):
        r = reports()
        for model in SPIKING_MODELS:
            assert r[model].f_score >= r[MODEL_FT].f_score - 0.05, model

    def test_snr_order(self):
        r = reports()
        assert min(r[MODEL_TIME].snr, r[MODEL_RATE].snr) > r[MODEL_GRADIENT].snr > r[MODEL_FT].snr

    def test_spike_count_order(self):
        r = reports()
        assert r[MODEL_ADAPTIVE].spike_count > r[MODEL_RATE].spike_count > r[MODEL_TIME].spike_count > 0

    def test_time_bandwidth(self):
        assert reports()[MODEL_TIME].bandwidth_ratio < 0.01

    def test_continuous_not_worse(self):
        models = (MODEL_GRADIENT, MODEL_RATE, MODEL_TIME)
        single = reports()
        multi = reports(MODE_CONTINUOUS, models)
        for model in models:
            assert multi[model].f_score >= single[model].f_score - 0.02, model

    def test_early_detection(self):
        scenes = dsutils.load_recipe(RECIPE_CLOSE_2010, seed=EVAL_SEED, n_scenes=4)
        for model in (MODEL_ADAPTIVE, MODEL_RATE):
            params, cfar = tuned()[model]
            m = make_model(model, params)
            curve = average_curves([early_detection_curve(synthesize_chirp(s), m.make_grid(s.params),
                                                          label_bins(s, m.grid_config(s.params)), CfarConfig(**cfar))
                                    for s in scenes])
            recall = curve['recall'].to_numpy()
            half = curve.loc[curve['samples'] == scenes[0].params.n_samples // 2, 'recall'].iloc[0]
            assert half >= 0.65 * recall[-1], model
            # at most one target of the averaged scenes lost between checkpoints
            assert np.all(np.diff(recall) >= -1.0 / (2 * len(scenes)) - 1e-12), model

    def test_rate_target_over_noise_neurons(self):
        p = RadarParams()
        frame = synthesize(Scene([PointTarget(40 * range_resolution(p), 0.0)], seed=2, params=p))
        counts = make_model(MODEL_RATE).process(frame, p).map.values
        far = np.abs(np.arange(counts.shape[0]) - 40) >= 8
        assert counts[40, 16] > 0
        assert counts[40, 16] > counts[far].max()

# -*- coding:utf-8 -*-
"""

"""
import pytest

from resonator_toolbox.const import STAGE_GRADIENT_CFAR, STAGE_CODEC, RECIPE_CLOSE_2010, RECIPE_MIXED_5, EVAL_SEED, \
    TRAIN_SEED, PARAMS_DEFAULT, LIF_GAIN
from resonator_toolbox.datasets import dsutils
from resonator_toolbox.detection import CfarConfig
from resonator_toolbox.evaluator import Evaluator, make_model
from resonator_toolbox.signal_sim import RadarParams, Scene, synthesize
from resonator_toolbox.sweep import GAIN_STEPS, SweepSpec, run_sweep, default_grid, bracket, gain_grid, reference_gain

PARAMS = RadarParams(n_samples=64, n_vx=8, n_chirps=1)


def train_scenes(seed=0):
    return dsutils.load_all(seed, n_scenes=2, recipes=(RECIPE_CLOSE_2010, RECIPE_MIXED_5), params=PARAMS)


class Test_Grid():
    def test_bracket(self):
        assert bracket(1.0) == [0.25, 0.5, 1.0, 2.0, 4.0]
        assert bracket(1.0, upper=1.0) == [0.25, 0.5, 1.0]
        assert bracket(0.0) == [0.0]
        assert bracket(True) == [True]

    def test_default_rate_grid(self):
        grid = default_grid(STAGE_CODEC, 'rate')
        assert 0.35 in grid['u_th']
        assert grid['u_rest'] == [0.0]
        assert 100.0 in grid['tau']
        assert grid['leak'] == [True]
        assert grid['gain'] == gain_grid(LIF_GAIN)

    def test_default_time_grid(self):
        grid = default_grid(STAGE_CODEC, 'time', gain=2.0)
        assert grid['tau'] == [PARAMS_DEFAULT['time']['tau']]
        assert grid['u_th'] == [PARAMS_DEFAULT['time']['u_th']]
        assert grid['gain'] == [2.0 * k for k in GAIN_STEPS]
        assert default_grid(STAGE_CODEC, 'adaptive') == dict(gamma=bracket(PARAMS_DEFAULT['adaptive']['gamma']))
        assert default_grid(STAGE_CODEC, 'gradient') == {}

    def test_default_gradient_grid(self):
        grid = default_grid(STAGE_GRADIENT_CFAR, 'gradient')
        assert sorted(grid) == ['alpha_g', 'alpha_x', 'cfar_alpha', 'cfar_offset']
        assert max(grid['alpha_x']) == 1.0
        assert sorted(default_grid(STAGE_GRADIENT_CFAR, 'ft')) == ['cfar_alpha', 'cfar_offset']


class Test_Spec():
    def test_stage_isolation(self):
        with pytest.raises(ValueError):
            SweepSpec(STAGE_CODEC, 'rate', grids=dict(alpha_g=[0.01]))
        with pytest.raises(ValueError):
            SweepSpec(STAGE_CODEC, 'rate', grids=dict(cfar_alpha=[1.0]))
        with pytest.raises(ValueError):
            SweepSpec(STAGE_GRADIENT_CFAR, 'rate', grids=dict(u_th=[0.35]))

    def test_invalid(self):
        with pytest.raises(ValueError):
            SweepSpec(STAGE_CODEC, 'rate', grids=dict(u_th=[]))
        with pytest.raises(ValueError):
            SweepSpec('everything', 'rate')
        with pytest.raises(ValueError):
            SweepSpec(STAGE_CODEC, 'resnet')

    def test_calibrate_gain(self):
        assert SweepSpec(STAGE_CODEC, 'rate').calibrate_gain
        assert SweepSpec(STAGE_CODEC, 'time').calibrate_gain
        assert not SweepSpec(STAGE_CODEC, 'adaptive').calibrate_gain
        assert not SweepSpec(STAGE_CODEC, 'rate', grids=dict(gain=[1.0])).calibrate_gain

    def test_dict(self):
        spec = SweepSpec(STAGE_CODEC, 'time', fixed=dict(alpha_g=0.01, cfar=dict(alpha=3.0)))
        assert SweepSpec.from_dict(spec.to_dict()) == spec
        params, cfar = spec.split(spec.points()[0])
        assert params['alpha_g'] == 0.01
        assert cfar == dict(alpha=3.0, offset=0.0)


class Test_RunSweep():
    def test_single_point(self):
        scenes = train_scenes()
        spec = SweepSpec(STAGE_GRADIENT_CFAR, 'gradient',
                         grids=dict(alpha_g=[0.01], alpha_x=[1.0], cfar_alpha=[2.0], cfar_offset=[0.0]))
        result = run_sweep(spec, scenes)
        assert result.best_index == 0
        assert result.best_params == dict(alpha_g=0.01, alpha_x=1.0)
        assert result.best_cfar == dict(alpha=2.0, offset=0.0)
        assert len(result.table) == 1

        model = make_model('gradient', result.best_params)
        frames = [synthesize(s) for s in scenes]
        evaluator = Evaluator()
        report = evaluator.score(model, evaluator.run(model, scenes, frames), scenes, CfarConfig(**result.best_cfar))
        assert report.f_score == result.best_score

    def test_tie_break(self):
        spec = SweepSpec(STAGE_GRADIENT_CFAR, 'ft', grids=dict(cfar_alpha=[2.0], cfar_offset=[1e9, 2e9]))
        result = run_sweep(spec, train_scenes())
        assert result.best_score == 0.0
        assert result.best_index == 0
        assert result.best_cfar['offset'] == 1e9

    def test_codec_stage_keeps_fixed(self):
        fixed = dict(alpha_g=0.02, alpha_x=1.0, cfar=dict(alpha=1.5, offset=0.0))
        spec = SweepSpec(STAGE_CODEC, 'rate', grids=dict(u_th=[0.35, 0.7], tau=[100.0]), fixed=fixed)
        result = run_sweep(spec, train_scenes())
        assert result.best_params['alpha_g'] == 0.02
        assert result.best_params['alpha_x'] == 1.0
        assert result.best_cfar == dict(alpha=1.5, offset=0.0)
        assert sorted(result.table['u_th']) == [0.35, 0.7]
        assert result.table['f_score'][result.best_index] == result.best_score

    def test_determinism(self):
        scenes = train_scenes()
        spec = SweepSpec(STAGE_GRADIENT_CFAR, 'gradient',
                         grids=dict(alpha_g=[0.005, 0.02], alpha_x=[1.0], cfar_alpha=[1.5, 3.0], cfar_offset=[0.0]))
        r1 = run_sweep(spec, scenes, n_jobs=1)
        r3 = run_sweep(spec, scenes, n_jobs=3)
        assert r1.table.equals(r3.table)
        assert r1.best_index == r3.best_index

    def test_training_seed_only(self):
        spec = SweepSpec(STAGE_GRADIENT_CFAR, 'ft', grids=dict(cfar_alpha=[2.0], cfar_offset=[0.0]))
        with pytest.raises(ValueError):
            run_sweep(spec, train_scenes(seed=EVAL_SEED))
        with pytest.raises(ValueError):
            run_sweep(spec, [])

    def test_stage1_scores_gradient(self):
        scenes = train_scenes()
        grids = dict(alpha_g=[0.01, 0.04], alpha_x=[1.0], cfar_alpha=[1.5, 3.0], cfar_offset=[0.0])
        gradient = run_sweep(SweepSpec(STAGE_GRADIENT_CFAR, 'gradient', grids=grids), scenes)
        for model in ('rate', 'time', 'adaptive'):
            result = run_sweep(SweepSpec(STAGE_GRADIENT_CFAR, model, grids=grids), scenes)
            assert result.table.equals(gradient.table), model
            assert result.best_params == gradient.best_params

    def test_calibrated_gain(self):
        scenes = train_scenes()
        fixed = dict(alpha_g=0.02, alpha_x=1.0, cfar=dict(alpha=1.5, offset=0.0))
        reference = reference_gain('rate', dict(alpha_g=0.02, alpha_x=1.0), scenes)
        assert reference > 0
        spec = SweepSpec(STAGE_CODEC, 'rate', grids=dict(tau=[100.0], gain=[1.0]), fixed=fixed, calibrate_gain=True)
        result = run_sweep(spec, scenes)
        assert sorted(result.table['gain']) == gain_grid(reference)
        assert not spec.calibrate_gain
        counts = result.table.sort_values('gain')['spike_count'].to_numpy()
        assert counts[-1] > 0
        assert counts[-1] >= counts[0]


class Test_ReferenceGain():
    def test_no_targets(self):
        scenes = [Scene([], seed=s, params=PARAMS, dataset_seed=TRAIN_SEED) for s in range(2)]
        assert reference_gain('rate', {}, scenes) == LIF_GAIN
        assert reference_gain('time', dict(gain=3.0), scenes) == 3.0

    def test_scales_with_threshold(self):
        scenes = train_scenes()
        low = reference_gain('rate', dict(u_th=0.35), scenes)
        high = reference_gain('rate', dict(u_th=0.7), scenes)
        assert high == pytest.approx(2 * low, rel=1e-9)

# -*- coding:utf-8 -*-
from ..const import RECIPES, TRAIN_SEED, EVAL_SEED, DEFAULT_NOISE_STDDEV, DEFAULT_RANGE_BINS
from ..signal_sim import make_dataset

N_SCENES = 32


def load_recipe(recipe, seed=TRAIN_SEED, n_scenes=N_SCENES, params=None, noise_stddev=DEFAULT_NOISE_STDDEV,
                n_range_bins=DEFAULT_RANGE_BINS):
    return make_dataset(recipe, n_scenes=n_scenes, seed=seed, params=params, noise_stddev=noise_stddev,
                        n_range_bins=n_range_bins)


def load_all(seed, n_scenes=N_SCENES, recipes=RECIPES, **kwargs):
    scenes = []
    for recipe in recipes:
        scenes.extend(load_recipe(recipe, seed, n_scenes, **kwargs))
    return scenes


def load_train(n_scenes=N_SCENES, recipes=RECIPES, **kwargs):
    return load_all(TRAIN_SEED, n_scenes, recipes, **kwargs)


def load_eval(n_scenes=N_SCENES, recipes=RECIPES, **kwargs):
    return load_all(EVAL_SEED, n_scenes, recipes, **kwargs)

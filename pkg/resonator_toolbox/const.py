# -*- coding:utf-8 -*-
"""

"""

SPEED_OF_LIGHT = 299792458.0

MODEL_FT = 'ft'
MODEL_GRADIENT = 'gradient'
MODEL_ADAPTIVE = 'adaptive'
MODEL_RATE = 'rate'
MODEL_TIME = 'time'
MODELS = (MODEL_FT, MODEL_GRADIENT, MODEL_ADAPTIVE, MODEL_RATE, MODEL_TIME)
SPIKING_MODELS = (MODEL_ADAPTIVE, MODEL_RATE, MODEL_TIME)

MODE_SINGLE = 'single'
MODE_CONTINUOUS = 'continuous'
MODE_AVERAGE = 'average'
MODES = (MODE_SINGLE, MODE_CONTINUOUS, MODE_AVERAGE)

# chirp-start behaviour of the resonator grid
RESET = 'reset'
CONTINUOUS = 'continuous'

RECIPE_CLOSE_2010 = 'close_targets_2010'
RECIPE_CLOSE_0010 = 'close_targets_0010'
RECIPE_MIXED_5 = 'mixed_5'
RECIPE_PERSONS_5 = 'persons_5'
RECIPE_TARGETS_8 = 'targets_8'
RECIPES = (RECIPE_CLOSE_2010, RECIPE_CLOSE_0010, RECIPE_MIXED_5, RECIPE_PERSONS_5, RECIPE_TARGETS_8)

TRAIN_SEED = 0
EVAL_SEED = 1

STAGE_GRADIENT_CFAR = 'gradient+cfar'
STAGE_CODEC = 'codec'

# file formats
FRAME_MAGIC = b'NRRF'
GRID_MAGIC = b'NRRG'
FORMAT_VERSION = 1
PARAMS_SCHEMA = 'resonator-toolbox/params/1'
REPORT_SCHEMA = 'resonator-toolbox/report/1'
SWEEP_SCHEMA = 'resonator-toolbox/sweep/1'

# bits of one float32 map cell, the comparison basis of the bandwidth ratio
MAP_CELL_BITS = 32
# packed spike record: u16 chirp, u16 sample, u16 range_bin, u16 angle_bin, i8 polarity
SPIKE_RECORD_BITS = 72

EARLY_STRIDE = 64

PROFILE_DESK = dict(
    f0=76e9,
    bandwidth=507.6e6,
    n_samples=512,
    n_chirps=8,
    n_vx=32,
    t_chirp=20.52e-6,
    t_wait=5.96e-6,
)

PROFILE_PAPER = dict(PROFILE_DESK, n_chirps=32)

PROFILES = {
    'desk': PROFILE_DESK,
    'paper': PROFILE_PAPER,
}

DEFAULT_NOISE_STDDEV = 1e-3
DEFAULT_RANGE_BINS = 256

CFAR_DEFAULT = dict(alpha=2.0, offset=0.0)

# input gain of the LIF codecs, g is scaled by it before it charges the membrane
LIF_GAIN = 200.0

# gradient estimation + codec parameters, per model
PARAMS_DEFAULT = {
    MODEL_FT: {},
    MODEL_GRADIENT: dict(alpha_g=0.001, alpha_x=1.0),
    MODEL_ADAPTIVE: dict(alpha_g=0.001, alpha_x=1.0, gamma=0.1),
    MODEL_RATE: dict(alpha_g=0.001, alpha_x=1.0, u_th=0.35, u_rest=0.0, tau=100.0, leak=True, gain=LIF_GAIN),
    MODEL_TIME: dict(alpha_g=0.001, alpha_x=1.0, u_th=231.0, u_rest=250.0, tau=200.0, gain=LIF_GAIN),
}

PARAMS_TUNED_SINGLE = {
    MODEL_FT: {},
    MODEL_GRADIENT: dict(alpha_g=0.001, alpha_x=0.6),
    MODEL_ADAPTIVE: dict(alpha_g=0.001, alpha_x=0.6, gamma=0.1),
    MODEL_RATE: dict(alpha_g=0.001, alpha_x=0.6, u_th=0.35, u_rest=0.0, tau=100.0, leak=True, gain=LIF_GAIN),
    MODEL_TIME: dict(alpha_g=0.001, alpha_x=0.6, u_th=231.0, u_rest=250.0, tau=200.0, gain=LIF_GAIN),
}

PARAMS_TUNED_MULTI = {
    MODEL_FT: {},
    MODEL_GRADIENT: dict(alpha_g=0.001, alpha_x=0.6),
    MODEL_ADAPTIVE: dict(alpha_g=0.001, alpha_x=0.6, gamma=0.1),
    MODEL_RATE: dict(alpha_g=0.001, alpha_x=0.6, u_th=1.5, u_rest=0.0, tau=100.0, leak=True, gain=LIF_GAIN),
    MODEL_TIME: dict(alpha_g=0.001, alpha_x=0.6, u_th=232.0, u_rest=250.0, tau=200.0, gain=LIF_GAIN),
}

GRADIENT_KEYS = ('alpha_g', 'alpha_x')
CFAR_KEYS = ('alpha', 'offset')
CODEC_KEYS = {
    MODEL_FT: (),
    MODEL_GRADIENT: (),
    MODEL_ADAPTIVE: ('gamma',),
    MODEL_RATE: ('u_th', 'u_rest', 'tau', 'leak', 'gain'),
    MODEL_TIME: ('u_th', 'u_rest', 'tau', 'leak', 'gain'),
}

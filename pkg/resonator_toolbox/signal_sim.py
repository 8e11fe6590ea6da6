# -*- coding:utf-8 -*-
"""
Synthetic raw FMCW IF data for labeled point-target scenes.

A static point target k at range r_k and azimuth theta_k contributes, per chirp,

    x_m(t_n) = a_k * exp(i * m * phi_k) * exp(i * omega_k * t_n)

with beat frequency omega_k = 2 pi * 2 B r_k / (c t_chirp), inter-antenna phase
phi_k = 2 pi d sin(theta_k) (d in wavelengths, pi sin(theta) at half-wavelength spacing),
amplitude a_k = rcs_k / (r_k / 1 m)^2 and sampling instants t_n = n t_chirp / n_samples.
"""
from dataclasses import dataclass, field, asdict
from typing import List, Optional

import numpy as np

from .const import SPEED_OF_LIGHT, PROFILE_DESK, DEFAULT_NOISE_STDDEV, DEFAULT_RANGE_BINS, RECIPES, \
    RECIPE_CLOSE_2010, RECIPE_CLOSE_0010, RECIPE_MIXED_5, RECIPE_PERSONS_5, RECIPE_TARGETS_8
from .utils import logging

logger = logging.get_logger(__name__)

REFERENCE_RANGE_M = 1.0

RECIPE_SIGMAS = {
    RECIPE_CLOSE_2010: (10.0, 20.0),
    RECIPE_CLOSE_0010: (10.0, 0.0),
    RECIPE_MIXED_5: (0.0, 5.0, 10.0, 15.0, 20.0),
    RECIPE_PERSONS_5: (0.0, 0.0, 5.0, 5.0, 10.0),
    RECIPE_TARGETS_8: (0.0, 5.0, 10.0, 15.0, 20.0),
}

MAX_TARGETS_8 = 8
MAX_DRAW_ATTEMPTS = 1000


class RangeOutOfBoundsError(ValueError):
    pass


@dataclass
class RadarParams:
    f0: float = PROFILE_DESK['f0']
    bandwidth: float = PROFILE_DESK['bandwidth']
    n_samples: int = PROFILE_DESK['n_samples']
    n_chirps: int = PROFILE_DESK['n_chirps']
    n_vx: int = PROFILE_DESK['n_vx']
    t_chirp: float = PROFILE_DESK['t_chirp']
    t_wait: float = PROFILE_DESK['t_wait']
    antenna_spacing_wavelengths: float = 0.5

    def __post_init__(self):
        for name in ('n_samples', 'n_chirps', 'n_vx'):
            if int(getattr(self, name)) < 1:
                raise ValueError(f'{name} must be >= 1, got {getattr(self, name)}')
            setattr(self, name, int(getattr(self, name)))
        if self.bandwidth <= 0:
            raise ValueError(f'bandwidth must be > 0, got {self.bandwidth}')
        if self.t_chirp <= 0:
            raise ValueError(f't_chirp must be > 0, got {self.t_chirp}')
        if self.antenna_spacing_wavelengths <= 0:
            raise ValueError(f'antenna_spacing_wavelengths must be > 0, got {self.antenna_spacing_wavelengths}')

    @property
    def dt(self):
        return self.t_chirp / self.n_samples

    @property
    def chirp_shape(self):
        return self.n_samples, self.n_vx

    @property
    def frame_shape(self):
        return self.n_chirps, self.n_samples, self.n_vx


@dataclass
class PointTarget:
    range_m: float
    azimuth_rad: float
    rcs: float = 1.0
    velocity_mps: float = 0.0
    # radar cross-section label of the dataset recipe, rcs = 1 + sigma / 10
    sigma: Optional[float] = None

    def __post_init__(self):
        if not self.range_m > 0:
            raise ValueError(f'range_m must be > 0, got {self.range_m}')
        if abs(self.azimuth_rad) > np.pi / 2:
            raise ValueError(f'azimuth_rad must lie in [-pi/2, pi/2], got {self.azimuth_rad}')


@dataclass
class Scene:
    targets: List[PointTarget] = field(default_factory=list)
    noise_stddev: float = DEFAULT_NOISE_STDDEV
    seed: int = 0
    params: RadarParams = field(default_factory=RadarParams)
    recipe: Optional[str] = None
    dataset_seed: Optional[int] = None

    def __post_init__(self):
        if self.noise_stddev < 0:
            raise ValueError(f'noise_stddev must be >= 0, got {self.noise_stddev}')

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d):
        d = dict(d)
        d['targets'] = [PointTarget(**t) for t in d.get('targets', [])]
        d['params'] = RadarParams(**d.get('params', {}))
        return Scene(**d)


@dataclass
class ChirpFrame:
    samples: np.ndarray  # complex [n_chirps][n_samples][n_vx]

    @property
    def n_chirps(self):
        return self.samples.shape[0]

    def chirp(self, i):
        return self.samples[i]

    def check(self, params):
        if self.samples.shape != params.frame_shape:
            raise ValueError(f'frame shape {self.samples.shape} does not match radar params {params.frame_shape}')
        return self


def range_resolution(params):
    return SPEED_OF_LIGHT / (2.0 * params.bandwidth)


def max_range(params):
    """First range whose beat frequency reaches Nyquist."""
    return range_resolution(params) * params.n_samples / 2.0


def range_to_bin(range_m, params):
    """Fractional range bin, equal to omega_k / delta_omega."""
    return range_m / range_resolution(params)


def bin_to_range(range_bin, params):
    return range_bin * range_resolution(params)


def beat_omega(range_m, params):
    return 2.0 * np.pi * (2.0 * params.bandwidth * range_m) / (SPEED_OF_LIGHT * params.t_chirp)


def azimuth_to_phase(azimuth_rad, params):
    return 2.0 * np.pi * params.antenna_spacing_wavelengths * np.sin(azimuth_rad)


def phase_to_angle_bin(phase, n_angle_bins):
    """Nearest angle bin to an inter-antenna phase, ties round half up, wrapping at +-pi."""
    offset = np.floor(phase / (2.0 * np.pi / n_angle_bins) + 0.5).astype(int)
    return (offset + n_angle_bins // 2) % n_angle_bins


def angle_bin_phase(angle_bin, n_angle_bins):
    return 2.0 * np.pi * (np.asarray(angle_bin) - n_angle_bins // 2) / n_angle_bins


def angle_bin_to_azimuth(angle_bin, n_angle_bins, params=None):
    spacing = params.antenna_spacing_wavelengths if params is not None else 0.5
    s = angle_bin_phase(angle_bin, n_angle_bins) / (2.0 * np.pi * spacing)
    return np.arcsin(np.clip(s, -1.0, 1.0))


def target_amplitude(target):
    return target.rcs / (target.range_m / REFERENCE_RANGE_M) ** 2


def _clean_chirp(scene):
    p = scene.params
    n = np.arange(p.n_samples)
    m = np.arange(p.n_vx)
    chirp = np.zeros(p.chirp_shape, dtype=np.complex128)

    for k, target in enumerate(scene.targets):
        omega = beat_omega(target.range_m, p)
        if omega * p.dt >= np.pi:
            raise RangeOutOfBoundsError(
                f'target {k} at {target.range_m} m is beyond the unambiguous range {max_range(p):.3f} m')
        phi = azimuth_to_phase(target.azimuth_rad, p)
        tone = np.exp(1j * omega * p.dt * n)
        steering = np.exp(1j * m * phi)
        chirp += target_amplitude(target) * np.outer(tone, steering)

    return chirp


def _noise(scene, chirp_idx):
    p = scene.params
    rng = np.random.default_rng([scene.seed, chirp_idx])
    z = rng.normal(0.0, scene.noise_stddev, size=p.chirp_shape + (2,))
    return z[..., 0] + 1j * z[..., 1]


def synthesize_chirp(scene, chirp_idx=0):
    if not 0 <= chirp_idx < scene.params.n_chirps:
        raise ValueError(f'chirp_idx {chirp_idx} out of range [0, {scene.params.n_chirps})')

    chirp = _clean_chirp(scene)
    if scene.noise_stddev > 0:
        chirp = chirp + _noise(scene, chirp_idx)
    return chirp


def synthesize(scene):
    """
    Generate the raw IF tensor of a scene, [n_chirps][n_samples][n_vx].

    Targets are static, so every chirp carries the same tones; the additive complex
    Gaussian noise is drawn independently per chirp from a stream seeded by (seed, chirp).
    """
    p = scene.params
    clean = _clean_chirp(scene)
    samples = np.empty(p.frame_shape, dtype=np.complex128)
    for c in range(p.n_chirps):
        samples[c] = clean
        if scene.noise_stddev > 0:
            samples[c] += _noise(scene, c)
    return ChirpFrame(samples)


def _scene_seed(seed, recipe_idx, scene_idx):
    return int(np.random.SeedSequence([seed, recipe_idx, scene_idx]).generate_state(1)[0])


def max_sin_azimuth(params):
    """Edge of the unambiguous angle field in sin(theta), where the inter-antenna phase reaches pi."""
    return min(1.0, 1.0 / (2.0 * params.antenna_spacing_wavelengths))


def _draw_sin_azimuth(rng, params):
    s = max_sin_azimuth(params)
    return rng.uniform(-s, s)


def _draw_target(rng, params, n_range_bins, sigma):
    res = range_resolution(params)
    r = rng.uniform(2.0 * res, (n_range_bins - 2) * res)
    theta = np.arcsin(_draw_sin_azimuth(rng, params))
    return PointTarget(range_m=float(r), azimuth_rad=float(theta), rcs=1.0 + sigma / 10.0, sigma=float(sigma))


def _target_bins(target, params, n_range_bins):
    range_bin = int(np.floor(range_to_bin(target.range_m, params) + 0.5))
    angle_bin = int(phase_to_angle_bin(azimuth_to_phase(target.azimuth_rad, params), params.n_vx))
    return range_bin, angle_bin


def _draw_random_targets(rng, params, n_range_bins, sigmas):
    targets, occupied = [], set()
    for sigma in sigmas:
        for _ in range(MAX_DRAW_ATTEMPTS):
            t = _draw_target(rng, params, n_range_bins, sigma)
            bins = _target_bins(t, params, n_range_bins)
            if bins not in occupied:
                break
        else:
            raise ValueError(f'could not place {len(sigmas)} targets on distinct bins')
        occupied.add(bins)
        targets.append(t)
    return targets


def _draw_close_targets(rng, params, n_range_bins, sigmas):
    res = range_resolution(params)
    n_vx = params.n_vx
    d_range = int(rng.integers(1, 4))
    d_angle = int(rng.integers(0, 3))

    r0 = rng.uniform(2.0 * res, (n_range_bins - 2 - d_range) * res)
    sin0 = _draw_sin_azimuth(rng, params)
    # shift towards boresight, one angle bin is 1 / (n_vx d) in sin(theta)
    step = 1.0 / (n_vx * params.antenna_spacing_wavelengths)
    sin1 = sin0 - np.sign(sin0) * d_angle * step if sin0 != 0 else sin0 + d_angle * step
    sin1 = float(np.clip(sin1, -1.0, 1.0))

    positions = [(r0, float(np.arcsin(sin0))), (r0 + d_range * res, float(np.arcsin(sin1)))]
    return [PointTarget(range_m=float(r), azimuth_rad=theta, rcs=1.0 + sigma / 10.0, sigma=float(sigma))
            for (r, theta), sigma in zip(positions, sigmas)]


def make_dataset(recipe, n_scenes=1, seed=0, params=None, noise_stddev=DEFAULT_NOISE_STDDEV,
                 n_range_bins=DEFAULT_RANGE_BINS):
    """
    Build a deterministic list of labeled scenes for one of the dataset recipes.

    :param recipe: one of const.RECIPES
    :param seed: dataset seed, 0 is the training set and 1 the evaluation set by convention
    :param n_range_bins: targets are placed so that their range bin lies inside the grid
    """
    if recipe not in RECIPES:
        raise ValueError(f'Unknown recipe "{recipe}", valid recipes are {", ".join(RECIPES)}')
    if n_scenes < 0:
        raise ValueError(f'n_scenes must be >= 0, got {n_scenes}')

    params = params if params is not None else RadarParams()
    n_range_bins = min(n_range_bins, params.n_samples // 2)
    recipe_idx = RECIPES.index(recipe)
    rng = np.random.default_rng([seed, recipe_idx])

    scenes = []
    for i in range(n_scenes):
        sigmas = RECIPE_SIGMAS[recipe]
        if recipe in (RECIPE_CLOSE_2010, RECIPE_CLOSE_0010):
            targets = _draw_close_targets(rng, params, n_range_bins, sigmas)
        else:
            if recipe == RECIPE_TARGETS_8:
                n = int(rng.integers(1, MAX_TARGETS_8 + 1))
                sigmas = tuple(float(s) for s in rng.choice(sigmas, size=n))
            targets = _draw_random_targets(rng, params, n_range_bins, sigmas)
        scenes.append(Scene(targets=targets,
                            noise_stddev=noise_stddev,
                            seed=_scene_seed(seed, recipe_idx, i),
                            params=params,
                            recipe=recipe,
                            dataset_seed=seed))

    logger.info(f'made {len(scenes)} scenes of recipe [{recipe}] with seed {seed}')
    return scenes

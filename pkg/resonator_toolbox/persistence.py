# -*- coding:utf-8 -*-
"""
File formats: scene JSON, raw frames (NRRF), grid dumps (NRRG), map/spike/detection CSV,
binary spike streams, params and report JSON.

Binary headers are packed little-endian records: 4-byte magic, u16 version, three u32 dims.
"""

import json
import os

import numpy as np
import pandas as pd

from .const import FRAME_MAGIC, GRID_MAGIC, FORMAT_VERSION, PARAMS_SCHEMA, REPORT_SCHEMA, SWEEP_SCHEMA, \
    MODEL_FT, MODELS, CODEC_KEYS, GRADIENT_KEYS, CFAR_KEYS
from .signal_sim import Scene, ChirpFrame
from .spike_codecs import SPIKE_DTYPE, events_to_frame, frame_to_events
from .utils import logging

logger = logging.get_logger(__name__)

__all__ = ('FormatError',
           'write_scene', 'read_scene', 'write_frame', 'read_frame',
           'write_map_csv', 'read_map_csv', 'write_grid_dump', 'read_grid_dump', 'write_snapshot_csv',
           'write_spikes_csv', 'read_spikes_csv', 'write_spikes_bin', 'read_spikes_bin',
           'write_detections_csv', 'write_params', 'read_params', 'write_report', 'read_report',
           'write_table_csv')

FRAME_HEADER_DTYPE = np.dtype([('magic', 'S4'), ('version', '<u2'),
                               ('n_chirps', '<u4'), ('n_samples', '<u4'), ('n_vx', '<u4')])
GRID_HEADER_DTYPE = np.dtype([('magic', 'S4'), ('version', '<u2'),
                              ('n_fields', '<u4'), ('n_range_bins', '<u4'), ('n_angle_bins', '<u4')])
GRID_FIELDS = ('g', 's_max', 'w_max', 'abs_s')
MAP_FIELDS = ('value',)


class FormatError(ValueError):
    pass


def check_writable(path, force=False):
    if os.path.exists(path) and not force:
        raise FileExistsError(f'{path} exists, use force to overwrite')
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    return path


def _write_json(obj, path, force=True):
    check_writable(path, force)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def _read_json(path):
    with open(path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f'{path} is not valid JSON: {e}')


def write_scene(scene, path, force=False):
    return _write_json(scene.to_dict(), path, force)


def read_scene(path):
    try:
        return Scene.from_dict(_read_json(path))
    except TypeError as e:
        raise FormatError(f'{path} is not a scene file: {e}')


def _write_binary(path, header_dtype, magic, dims, payload, force):
    check_writable(path, force)
    header = np.zeros(1, dtype=header_dtype)
    names = header_dtype.names
    header['magic'] = magic
    header['version'] = FORMAT_VERSION
    for name, v in zip(names[2:], dims):
        header[name] = v
    with open(path, 'wb') as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(payload).tobytes())
    return path


def _read_binary(path, header_dtype, magic, payload_dtype):
    with open(path, 'rb') as f:
        raw = f.read()
    if len(raw) < header_dtype.itemsize:
        raise FormatError(f'{path} is truncated, no header')
    header = np.frombuffer(raw, dtype=header_dtype, count=1)[0]
    if header['magic'] != magic:
        raise FormatError(f'{path} has magic {header["magic"]!r}, expected {magic!r}')
    if header['version'] != FORMAT_VERSION:
        raise FormatError(f'{path} has unsupported version {header["version"]}')
    dims = tuple(int(header[name]) for name in header_dtype.names[2:])
    count = int(np.prod(dims))
    expected = header_dtype.itemsize + count * np.dtype(payload_dtype).itemsize
    if len(raw) != expected:
        raise FormatError(f'{path} has {len(raw)} bytes, expected {expected} for dims {dims}')
    data = np.frombuffer(raw, dtype=payload_dtype, offset=header_dtype.itemsize, count=count)
    return dims, data.reshape(dims)


def write_frame(frame, path, force=False):
    """Raw IF frame as NRRF: header then complex64 [n_chirps][n_samples][n_vx]."""
    samples = np.asarray(frame.samples, dtype='<c8')
    return _write_binary(path, FRAME_HEADER_DTYPE, FRAME_MAGIC, samples.shape, samples, force)


def read_frame(path):
    _, data = _read_binary(path, FRAME_HEADER_DTYPE, FRAME_MAGIC, '<c8')
    return ChirpFrame(data.astype(np.complex128))


def write_grid_dump(fields, path, force=False):
    """
    Float32 dump of named 2-D fields as NRRG, [n_fields][n_range_bins][n_angle_bins].

    :param fields: dict name -> array, either GRID_FIELDS or MAP_FIELDS
    """
    names = tuple(fields.keys())
    if names not in (GRID_FIELDS, MAP_FIELDS):
        raise ValueError(f'grid dump fields must be {GRID_FIELDS} or {MAP_FIELDS}, got {names}')
    data = np.stack([np.asarray(fields[n], dtype='<f4') for n in names])
    return _write_binary(path, GRID_HEADER_DTYPE, GRID_MAGIC, data.shape, data, force)


def read_grid_dump(path):
    dims, data = _read_binary(path, GRID_HEADER_DTYPE, GRID_MAGIC, '<f4')
    if dims[0] == len(GRID_FIELDS):
        names = GRID_FIELDS
    elif dims[0] == len(MAP_FIELDS):
        names = MAP_FIELDS
    else:
        raise FormatError(f'{path} has {dims[0]} fields, expected {len(GRID_FIELDS)} or {len(MAP_FIELDS)}')
    return {n: data[i].astype(float) for i, n in enumerate(names)}


def grid_fields(grid):
    st = grid.state
    return dict(g=st.g, s_max=st.s_max, w_max=st.w_max, abs_s=np.abs(st.s))


def write_snapshot_csv(grid, path, force=False):
    check_writable(path, force)
    grid.snapshot().to_csv(path, index=False)
    return path


def write_map_csv(values, path, force=False):
    """Dense map as rows of (range_bin, angle_bin, value)."""
    values = np.asarray(getattr(values, 'values', values), dtype=float)
    check_writable(path, force)
    r, l = np.meshgrid(np.arange(values.shape[0]), np.arange(values.shape[1]), indexing='ij')
    df = pd.DataFrame({'range_bin': r.ravel(), 'angle_bin': l.ravel(), 'value': values.ravel()})
    df.to_csv(path, index=False, float_format='%.17g')
    return path


def read_map_csv(path, shape=None):
    df = pd.read_csv(path, float_precision='round_trip')
    missing = {'range_bin', 'angle_bin', 'value'} - set(df.columns)
    if missing:
        raise FormatError(f'{path} lacks columns {sorted(missing)}')
    if shape is None:
        shape = (int(df['range_bin'].max()) + 1, int(df['angle_bin'].max()) + 1) if len(df) else (0, 0)
    values = np.zeros(shape)
    values[df['range_bin'].to_numpy(), df['angle_bin'].to_numpy()] = df['value'].to_numpy()
    return values


def write_spikes_csv(events, path, force=False):
    check_writable(path, force)
    events_to_frame(events).to_csv(path, index=False)
    return path


def read_spikes_csv(path):
    try:
        return frame_to_events(pd.read_csv(path, float_precision='round_trip'))
    except ValueError as e:
        raise FormatError(f'{path}: {e}')


def write_spikes_bin(events, path, force=False):
    """Packed 9-byte records (u2 chirp, sample, range_bin, angle_bin; i1 polarity)."""
    check_writable(path, force)
    np.asarray(events, dtype=SPIKE_DTYPE).tofile(path)
    return path


def read_spikes_bin(path):
    size = os.path.getsize(path)
    if size % SPIKE_DTYPE.itemsize != 0:
        raise FormatError(f'{path} has {size} bytes, not a multiple of the {SPIKE_DTYPE.itemsize}-byte record')
    return np.fromfile(path, dtype=SPIKE_DTYPE)


def write_detections_csv(det, path, force=False):
    check_writable(path, force)
    pd.DataFrame(det.coordinates(), columns=['range_bin', 'angle_bin']).to_csv(path, index=False)
    return path


def write_params(model, params, cfar, path, force=False):
    obj = dict(schema=PARAMS_SCHEMA, model=model, params=dict(params), cfar=dict(cfar))
    validate_params(obj, path)
    return _write_json(obj, path, force)


def validate_params(obj, path='<params>'):
    if not isinstance(obj, dict) or obj.get('schema') != PARAMS_SCHEMA:
        raise FormatError(f'{path}: schema must be "{PARAMS_SCHEMA}"')
    unknown = set(obj.keys()) - {'schema', 'model', 'params', 'cfar'}
    if unknown:
        raise FormatError(f'{path}: unknown keys {sorted(unknown)}')
    model = obj.get('model')
    if model not in MODELS:
        raise FormatError(f'{path}: unknown model "{model}", valid models are {", ".join(MODELS)}')
    allowed = set(CODEC_KEYS[model]) | (set(GRADIENT_KEYS) if model != MODEL_FT else set())
    unknown = set(obj.get('params', {}).keys()) - allowed
    if unknown:
        raise FormatError(f'{path}: unknown {model} params {sorted(unknown)}')
    unknown = set(obj.get('cfar', {}).keys()) - set(CFAR_KEYS)
    if unknown:
        raise FormatError(f'{path}: unknown cfar params {sorted(unknown)}')
    return obj


def read_params(path):
    obj = validate_params(_read_json(path), path)
    obj.setdefault('params', {})
    obj.setdefault('cfar', {})
    return obj


def write_report(report, path, force=False):
    obj = dict(schema=REPORT_SCHEMA, report=report.to_dict())
    return _write_json(obj, path, force)


def read_report(path):
    from .metrics import EvalReport

    obj = _read_json(path)
    if not isinstance(obj, dict) or obj.get('schema') != REPORT_SCHEMA or 'report' not in obj:
        raise FormatError(f'{path}: schema must be "{REPORT_SCHEMA}"')
    return EvalReport.from_dict(obj['report'])


def write_sweep_spec(spec, path, force=False):
    return _write_json(dict(schema=SWEEP_SCHEMA, **spec.to_dict()), path, force)


def read_sweep_spec(path):
    from .sweep import SweepSpec

    obj = _read_json(path)
    if not isinstance(obj, dict) or obj.pop('schema', None) != SWEEP_SCHEMA:
        raise FormatError(f'{path}: schema must be "{SWEEP_SCHEMA}"')
    try:
        return SweepSpec.from_dict(obj)
    except TypeError as e:
        raise FormatError(f'{path}: {e}')


def write_table_csv(df, path, force=False):
    check_writable(path, force)
    df.to_csv(path, index=False, float_format='%.17g')
    return path

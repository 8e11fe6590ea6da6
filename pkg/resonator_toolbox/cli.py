# -*- coding:utf-8 -*-
"""
Command line toolchain: simulate, process, evaluate, sweep and early.

    resonator-toolbox simulate --recipe close_targets_2010 --n-scenes 32 --seed 1 --out data/eval
    resonator-toolbox process data/eval --model time --mode single --out out/time
    resonator-toolbox evaluate --scenes data/eval --maps out/time --model time --out out/time/report.json
    resonator-toolbox sweep --stage gradient+cfar --model rate --train data/train --out params/rate.json
    resonator-toolbox early --scenes data/eval --model adaptive --out out/early.csv

Exit codes: 0 success, 2 usage error, 3 data error.
"""
import argparse
import glob
import os
import sys

import numpy as np
import pandas as pd

from . import __version__
from . import persistence as ps
from .const import RECIPES, MODELS, MODES, MODE_SINGLE, MODE_CONTINUOUS, MODE_AVERAGE, PROFILES, PARAMS_DEFAULT, \
    PARAMS_TUNED_SINGLE, PARAMS_TUNED_MULTI, CFAR_DEFAULT, DEFAULT_NOISE_STDDEV, DEFAULT_RANGE_BINS, EARLY_STRIDE, \
    SPIKING_MODELS, SPIKE_RECORD_BITS, MODEL_FT
from .baseline_ft import RangeAngleMap
from .detection import CfarConfig, ca_cfar
from .evaluator import make_model
from .metrics import label_bins, scene_score, make_report, reports_to_frame, bandwidth_ratio, \
    early_detection_curve, average_curves, DEFAULT_MATCH_RADIUS
from .signal_sim import RadarParams, make_dataset, synthesize
from .spike_codecs import decode_stream
from .sweep import SweepSpec, STAGES, run_sweep
from .utils import logging, parallel_map, merge_params, hash_file

logger = logging.get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

SCENE_EXT = '.json'
FRAME_EXT = '.nrrf'
MAP_EXT = '.map.csv'
SPIKES_EXT = '.spikes.csv'
SPIKES_BIN_EXT = '.spikes.bin'
SPIKE_FORMATS = {'csv': SPIKES_EXT, 'bin': SPIKES_BIN_EXT}
MANIFEST_EXT = '.manifest.csv'
PROFILE_PAPER = 'paper'


class DataError(Exception):
    pass


def _parse_value(text):
    lowered = text.lower()
    if lowered in ('true', 'false'):
        return lowered == 'true'
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'"{text}" is not a number or boolean')


def _key_value(text):
    if '=' not in text:
        raise argparse.ArgumentTypeError(f'expected key=value, got "{text}"')
    k, v = text.split('=', 1)
    return k.strip(), _parse_value(v.strip())


def _scene_stems(scene_dir):
    paths = glob.glob(os.path.join(scene_dir, '*' + SCENE_EXT))
    stems = sorted(os.path.splitext(os.path.basename(p))[0] for p in paths)
    if not stems:
        raise DataError(f'no scene files in {scene_dir}')
    return stems


def _load_scenes(scene_dir):
    stems = _scene_stems(scene_dir)
    return stems, [ps.read_scene(os.path.join(scene_dir, s + SCENE_EXT)) for s in stems]


def _load_frame(scene_dir, stem, scene):
    path = os.path.join(scene_dir, stem + FRAME_EXT)
    if os.path.exists(path):
        return ps.read_frame(path).check(scene.params)
    logger.info(f'{path} not found, synthesizing the frame from its scene')
    return synthesize(scene)


def _model_params(args, model):
    """Flags > params file > profile defaults; returns (params, cfar)."""
    if args.profile == PROFILE_PAPER:
        # the multi-chirp set is tuned on a converged gradient, averaging restarts it every chirp
        base = PARAMS_TUNED_MULTI if getattr(args, 'mode', MODE_SINGLE) == MODE_CONTINUOUS else PARAMS_TUNED_SINGLE
    else:
        base = PARAMS_DEFAULT
    file_params, file_cfar = {}, {}
    if getattr(args, 'params', None):
        obj = ps.read_params(args.params)
        if obj['model'] != model:
            raise DataError(f'params file {args.params} is for model "{obj["model"]}", not "{model}"')
        file_params, file_cfar = obj['params'], obj['cfar']
    flag_params = dict(getattr(args, 'param', None) or [])
    flag_cfar = dict(alpha=getattr(args, 'cfar_alpha', None), offset=getattr(args, 'cfar_offset', None))
    return merge_params(base[model], file_params, flag_params), merge_params(CFAR_DEFAULT, file_cfar, flag_cfar)


def _make_model(args, params, n_jobs=1):
    return make_model(args.model, params or None, mode=getattr(args, 'mode', MODE_SINGLE), n_chirps=args.n_chirps,
                      n_range_bins=args.range_bins, n_jobs=n_jobs)


def write_manifest(path, out, names, force=False):
    """md5 digest of every dataset file, rewriting a dataset with its seed reproduces the table."""
    rows = [dict(file=n, bytes=os.path.getsize(os.path.join(out, n)), md5=hash_file(os.path.join(out, n)))
            for n in names]
    return ps.write_table_csv(pd.DataFrame(rows, columns=['file', 'bytes', 'md5']), path, force)


def cmd_simulate(args):
    params = RadarParams(**PROFILES[args.profile])
    scenes = make_dataset(args.recipe, n_scenes=args.n_scenes, seed=args.seed, params=params,
                          noise_stddev=args.noise, n_range_bins=args.range_bins)
    stems = [f'{args.recipe}_s{args.seed}_{i:04d}' for i in range(len(scenes))]
    for stem in stems:
        for ext in (SCENE_EXT, FRAME_EXT):
            ps.check_writable(os.path.join(args.out, stem + ext), args.force)
    manifest = os.path.join(args.out, f'{args.recipe}_s{args.seed}' + MANIFEST_EXT)
    ps.check_writable(manifest, args.force)

    def write(i):
        ps.write_scene(scenes[i], os.path.join(args.out, stems[i] + SCENE_EXT), args.force)
        ps.write_frame(synthesize(scenes[i]), os.path.join(args.out, stems[i] + FRAME_EXT), args.force)
        return stems[i]

    parallel_map(write, range(len(scenes)), args.threads)
    write_manifest(manifest, args.out, [s + ext for s in stems for ext in (SCENE_EXT, FRAME_EXT)], args.force)
    logger.info(f'wrote {len(scenes)} scenes and frames to {args.out}')
    return EXIT_OK


def cmd_process(args):
    params, cfar = _model_params(args, args.model)
    stems, scenes = _load_scenes(args.scenes)
    model = _make_model(args, params)

    def run(i):
        frame = _load_frame(args.scenes, stems[i], scenes[i])
        out = model.process(frame, scenes[i].params)
        base = os.path.join(args.out, stems[i])
        ps.write_map_csv(out.map, base + MAP_EXT, args.force)
        if args.model in SPIKING_MODELS:
            _write_spikes(out.events, base, args.spike_format, args.force)
        if args.detections:
            ps.write_detections_csv(ca_cfar(out.map, CfarConfig(**cfar)), base + '.detections.csv', args.force)
        if args.dump:
            ps.write_grid_dump({'value': out.map.values}, base + '.map.nrrg', args.force)
            if out.grid is not None:
                ps.write_grid_dump(ps.grid_fields(out.grid), base + '.grid.nrrg', args.force)
                ps.write_snapshot_csv(out.grid, base + '.grid.csv', args.force)
        n_cells = out.map.values.size
        return dict(frame=stems[i], n_chirps=out.n_chirps, spike_count=out.spike_count,
                    bandwidth_ratio=bandwidth_ratio(out.spike_count, n_cells),
                    bandwidth_ratio_packed=bandwidth_ratio(out.spike_count, n_cells, SPIKE_RECORD_BITS))

    rows = parallel_map(run, range(len(stems)), args.threads)
    ps.write_table_csv(pd.DataFrame(rows), os.path.join(args.out, 'bandwidth.csv'), args.force)
    logger.info(f'processed {len(rows)} frames with [{args.model}/{args.mode}] into {args.out}')
    return EXIT_OK


def _write_spikes(events, base, spike_format, force):
    if spike_format == 'bin':
        return ps.write_spikes_bin(events, base + SPIKES_BIN_EXT, force)
    return ps.write_spikes_csv(events, base + SPIKES_EXT, force)


def _read_spikes(path):
    if path.endswith(SPIKES_BIN_EXT):
        return ps.read_spikes_bin(path)
    return ps.read_spikes_csv(path)


def _decode_spikes(events, model, shape, n_samples, mode, n_chirps):
    """
    Map and spike count of a stream the way process built them from n_chirps chirps: the last
    chirp in single and continuous mode, the per-chirp mean in average mode.
    """
    if mode == MODE_AVERAGE:
        return decode_stream(events, model, shape, n_samples, n_chirps), len(events) / n_chirps
    last = events[events['chirp'] == n_chirps - 1]
    return decode_stream(last, model, shape, n_samples), len(last)


def cmd_evaluate(args):
    summary = os.path.splitext(args.out)[0] + '.csv'
    ps.check_writable(args.out, args.force)
    ps.check_writable(summary, args.force)
    params, cfar = _model_params(args, args.model)
    stems, scenes = _load_scenes(args.scenes)
    model = _make_model(args, params)
    source = args.spikes or args.maps
    ext = SPIKE_FORMATS[args.spike_format] if args.spikes else MAP_EXT
    found = sorted(os.path.basename(p)[:-len(ext)] for p in glob.glob(os.path.join(source, '*' + ext)))
    if found != stems:
        raise DataError(f'{len(found)} {ext} files in {source} do not match the {len(stems)} scenes of {args.scenes}')
    if args.spikes and args.model not in SPIKING_MODELS:
        raise DataError(f'spike streams need a spiking model, got "{args.model}"')

    scores = []
    for i, (stem, scene) in enumerate(zip(stems, scenes)):
        grid = model.grid_config(scene.params)
        if args.spikes:
            n_chirps = model.chirps_for(scene.params)
            values, spike_count = _decode_spikes(_read_spikes(os.path.join(source, stem + ext)), args.model,
                                                 grid.shape, grid.n_samples, args.mode, n_chirps)
        else:
            values, spike_count = ps.read_map_csv(os.path.join(source, stem + ext), grid.shape), 0
        scores.append(scene_score(RangeAngleMap(values, args.model), label_bins(scene, grid), CfarConfig(**cfar),
                                  args.radius, spike_count, i, scene.recipe))

    report = make_report(args.model, scores, grid.n_neurons, args.mode)
    ps.write_report(report, args.out, args.force)
    ps.write_table_csv(reports_to_frame([report]), summary, args.force)
    logger.info(f'[{args.model}] f_score={report.f_score:.4f} precision={report.precision:.4f} '
                f'recall={report.recall:.4f} snr={report.snr:.4f} spikes={report.spike_count:.1f}')
    return EXIT_OK


def cmd_sweep(args):
    if args.spec:
        spec = ps.read_sweep_spec(args.spec)
    else:
        fixed = {}
        if args.params:
            obj = ps.read_params(args.params)
            fixed = dict(obj['params'], cfar=obj['cfar'])
        spec = SweepSpec(stage=args.stage, model=args.model, fixed=fixed, mode=args.mode, n_chirps=args.n_chirps)
    stems, scenes = _load_scenes(args.train)
    frames = parallel_map(lambda i: _load_frame(args.train, stems[i], scenes[i]), range(len(stems)), args.threads)

    table = os.path.splitext(args.out)[0] + '.sweep.csv'
    ps.check_writable(args.out, args.force)
    ps.check_writable(table, args.force)

    result = run_sweep(spec, scenes, frames, n_jobs=args.threads)
    ps.write_params(spec.model, result.best_params, result.best_cfar, args.out, args.force)
    ps.write_table_csv(result.table, table, args.force)
    logger.info(f'best params written to {args.out}')
    return EXIT_OK


def cmd_early(args):
    if args.model == MODEL_FT:
        raise DataError(f'early detection needs a resonator model, got "{args.model}"')
    params, cfar = _model_params(args, args.model)
    stems, scenes = _load_scenes(args.scenes)
    model = _make_model(args, params)

    def run(i):
        frame = _load_frame(args.scenes, stems[i], scenes[i])
        grid = model.make_grid(scenes[i].params)
        labels = label_bins(scenes[i], grid.config)
        return early_detection_curve(frame.chirp(0), grid, labels, CfarConfig(**cfar), args.stride, args.radius)

    curve = average_curves(parallel_map(run, range(len(stems)), args.threads))
    ps.write_table_csv(curve, args.out, args.force)
    logger.info(f'early detection curve written to {args.out}')
    return EXIT_OK


def _add_common(p):
    p.add_argument('--threads', type=int, default=1, help='worker threads, results do not depend on it')
    p.add_argument('--profile', choices=sorted(PROFILES), default='desk',
                   help='sensor profile and default model params')
    p.add_argument('--log-level', default=None, help='DEBUG, INFO, WARN or ERROR')
    p.add_argument('--force', action='store_true', help='overwrite existing files')
    p.add_argument('--range-bins', type=int, default=DEFAULT_RANGE_BINS)


def _add_model(p, with_mode=True):
    p.add_argument('--model', choices=MODELS, required=True)
    if with_mode:
        p.add_argument('--mode', choices=MODES, default=MODE_SINGLE)
    p.add_argument('--n-chirps', type=int, default=8, help='chirps of the continuous and average modes')
    p.add_argument('--params', default=None, help='params JSON file')
    p.add_argument('--param', type=_key_value, action='append', metavar='KEY=VALUE', help='override a model param')
    p.add_argument('--cfar-alpha', type=float, default=None)
    p.add_argument('--cfar-offset', type=float, default=None)
    p.add_argument('--radius', type=int, default=DEFAULT_MATCH_RADIUS, help='match radius in bins')


def make_parser():
    parser = argparse.ArgumentParser(prog='resonator-toolbox',
                                     description='Resonate-and-fire range-angle processing of FMCW radar data',
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('simulate', help='generate labeled scenes and raw frames')
    p.add_argument('--recipe', choices=RECIPES, required=True)
    p.add_argument('--n-scenes', type=int, default=1)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--noise', type=float, default=DEFAULT_NOISE_STDDEV)
    p.add_argument('--out', required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser('process', help='turn frames into range-angle maps and spike streams')
    p.add_argument('scenes', help='directory of scene JSON and frame files')
    p.add_argument('--out', required=True)
    p.add_argument('--detections', action='store_true', help='also write CFAR hit coordinates')
    p.add_argument('--dump', action='store_true', help='also write float32 map and grid state dumps')
    p.add_argument('--spike-format', choices=sorted(SPIKE_FORMATS), default='csv',
                   help='spike streams as CSV rows or packed 9-byte records')
    _add_model(p)
    _add_common(p)
    p.set_defaults(fn=cmd_process)

    p = sub.add_parser('evaluate', help='score maps or spike streams against scene labels')
    p.add_argument('--scenes', required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument('--maps', help='directory of map CSV files')
    src.add_argument('--spikes', help='directory of spike stream files')
    p.add_argument('--spike-format', choices=sorted(SPIKE_FORMATS), default='csv', help='format of --spikes')
    p.add_argument('--out', required=True, help='report JSON, the summary CSV is written next to it')
    _add_model(p)
    _add_common(p)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser('sweep', help='grid search on training scenes')
    p.add_argument('--spec', default=None, help='sweep spec JSON, otherwise the default grid of --stage')
    p.add_argument('--stage', choices=STAGES, default=STAGES[0])
    p.add_argument('--train', required=True, help='directory of seed-0 scenes')
    p.add_argument('--out', required=True, help='best params JSON, the table is written next to it')
    _add_model(p)
    _add_common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser('early', help='detection quality along the first chirp')
    p.add_argument('--scenes', required=True)
    p.add_argument('--stride', type=int, default=EARLY_STRIDE)
    p.add_argument('--out', required=True)
    _add_model(p, with_mode=False)
    _add_common(p)
    p.set_defaults(fn=cmd_early)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)

    if args.log_level:
        try:
            logging.set_level(args.log_level)
        except ValueError as e:
            parser.error(str(e))
    if args.threads < 1:
        parser.error(f'--threads must be >= 1, got {args.threads}')

    try:
        return args.fn(args)
    except (DataError, ValueError, OSError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_DATA


if __name__ == '__main__':
    sys.exit(main())

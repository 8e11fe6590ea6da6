import hashlib

import dask

from . import logging

logger = logging.get_logger(__name__)


def hash_data(data, method='md5'):
    m = getattr(hashlib, method)()
    m.update(data)
    return m.hexdigest()


def hash_file(file_path, method='md5'):
    with open(file_path, 'rb') as f:
        return hash_data(f.read(), method)


def parallel_map(fn, items, n_jobs=1):
    """
    Apply fn to every item, with up to n_jobs dask threads.

    :return: results list in the order of items, whatever n_jobs is
    """
    items = list(items)
    if n_jobs is None or n_jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    delayed_fn = dask.delayed(fn)
    tasks = [delayed_fn(item) for item in items]
    if logger.is_debug_enabled():
        logger.debug(f'compute {len(tasks)} tasks with {n_jobs} threads')
    results = dask.compute(*tasks, scheduler='threads', num_workers=n_jobs)
    return list(results)


def merge_params(*layers):
    """
    Merge parameter dicts, later layers win; None values never override.
    """
    merged = {}
    for layer in layers:
        if not layer:
            continue
        for k, v in layer.items():
            if v is None:
                continue
            if isinstance(v, dict) and isinstance(merged.get(k), dict):
                merged[k] = merge_params(merged[k], v)
            else:
                merged[k] = v
    return merged

from ._common import hash_data, hash_file, parallel_map, merge_params

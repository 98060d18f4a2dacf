import hashlib
import json
import os
import tempfile

import yaml


def ensure_dir(directory_path):
    if not os.path.exists(directory_path):
        os.makedirs(directory_path)


def dump_config(cfg, logger):
    for k, v in cfg.items():
        logger.info(json.dumps({k: v}, sort_keys=True, default=str))


def read_iterable_from_config(argument, dtype=int):
    """ '5, 10, 20' or [5, 10, 20] -> (5, 10, 20) """
    if isinstance(argument, str):
        argument = argument.split(',')
        argument = [dtype(argument) for argument in argument]
    else:
        argument = [dtype(a) for a in argument]

    return tuple(argument)


def load_json(path):
    with open(path) as f:
        return json.load(f)


def dump_json(obj, path):
    """ sorted keys so the same object always gives the same bytes """
    atomic_write_bytes(
        path,
        (json.dumps(obj, sort_keys=True, indent=2) + '\n').encode('utf-8')
    )


def load_yaml(path):
    with open(path) as f:
        return yaml.safe_load(f)


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 20), b''):
            digest.update(block)
    return digest.hexdigest()


def atomic_write_bytes(path, data):
    """
    Writes to a temp file in the target directory then renames over the target

    args
        path (str) final location
        data (bytes)
    """
    directory = os.path.dirname(os.path.abspath(path))
    ensure_dir(directory)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise

import json
import os
from os.path import exists, join
import shutil

import numpy as np

from shadowpy.common.errors import DataError, FailureRateExceeded
from shadowpy.common.logging import make_new_logger
from shadowpy.common.utils import atomic_write_bytes, ensure_dir


MANIFEST = 'manifest.jsonl'


def read_log(log_file_path):
    with open(log_file_path) as f:
        logs = f.read().splitlines()
    return [json.loads(log) for log in logs]


def read_manifest(directory, name=MANIFEST):
    path = join(directory, name)
    if not exists(path):
        raise DataError('no manifest at {}'.format(path))
    return read_log(path)


def _to_json(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError('{} is not json serializable'.format(type(obj).__name__))


def write_manifest(records, directory, name=MANIFEST):
    """ JSON Lines, one record per sample, in the order given """
    lines = [json.dumps(record, sort_keys=True, default=_to_json) for record in records]
    data = ''.join(line + '\n' for line in lines).encode('utf-8')
    atomic_write_bytes(join(directory, name), data)
    return join(directory, name)


def write_sample_dir(sample_dir, files):
    """
    Writes every file of one sample into a temp dir, then renames it into place

    args
        sample_dir (str)
        files (dict) file name -> bytes
    """
    tmp = sample_dir + '.tmp'
    if exists(tmp):
        shutil.rmtree(tmp)
    ensure_dir(tmp)
    for name, data in files.items():
        with open(join(tmp, name), 'wb') as f:
            f.write(data)

    if exists(sample_dir):
        shutil.rmtree(sample_dir)
    os.replace(tmp, sample_dir)


class SampleRecorder():
    """ logs one structured record per sample and counts failures """

    def __init__(self, run_dir, name='samples'):
        ensure_dir(run_dir)
        self.logger = make_new_logger(name, run_dir)
        self.reset()

    def reset(self):
        self.succeeded = 0
        self.failed = []

    @property
    def total(self):
        return self.succeeded + len(self.failed)

    def record_sample(self, record):
        self.succeeded += 1
        self.logger.debug(json.dumps({
            'sample_id': record['sample_id'],
            'seed': record.get('seed'),
            'status': 'ok',
        }))

    def record_failure(self, index, sample_id, err):
        self.failed.append(sample_id)
        self.logger.info(json.dumps({
            'sample_id': sample_id,
            'index': index,
            'status': 'skipped',
            'error': type(err).__name__,
            'reason': str(err),
        }))

    def summary(self):
        summary = {
            'total': self.total,
            'succeeded': self.succeeded,
            'failed': len(self.failed),
        }
        self.logger.info(json.dumps(summary))
        return summary

    def check_failure_rate(self, threshold):
        """ raises once failures exceed the threshold fraction of all samples """
        if self.total and len(self.failed) / self.total > threshold:
            raise FailureRateExceeded(len(self.failed), self.total, threshold)

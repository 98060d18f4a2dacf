"""
Pipeline configuration

A run is described by one YAML document with an `expt` block and one block
per generator.  Missing keys take the defaults below, unknown keys are an
error.  Generator blocks are passed straight through as **kwargs.
"""
from copy import deepcopy
from os.path import exists, expanduser, join

import yaml

from shadowpy.common.errors import ConfigError
from shadowpy.common.utils import read_iterable_from_config
from shadowpy.shadowsynth.synth import ABLATIONS


DEFAULT_CONFIG = {
    'expt': {
        'name': 'shadowpy',
        'output_root': '~/shadowpy-results',
        'seed': 0,
        'count': 100,
        'workers': 1,
        'failure_threshold': 0.01,
        'holdout_fraction': 0.0,
    },

    #  null paths mean synthetic stand-ins are generated
    'corpus': {
        'faces': None,
        'crops': None,
        'silhouettes': None,
        'landmarks': None,
        'rig': None,
        'scans': None,
        'synthetic_faces': 8,
        'synthetic_silhouettes': 16,
        'synthetic_subjects': 4,
        'face_size': 256,
        'scan_size': 64,
    },

    'foreign': {
        'ablation': [],
        'mask_persistence': [0.0, 0.85],
        'mask_octaves': 4,
        'base_frequency': 4.0,
        'silhouette_scale': [0.3, 1.0],
        'silhouette_spacing': [1.0, 2.0],
        'scatter_profile': None,
        'sv_persistence': [0.05, 0.25],
        'sv_octaves': 2,
        'sigma_range': [0.0, 8.0],
        'intensity_floor': 0.4,
        'sigma_step': 0.5,
        'luminance_gain': [0.25, 0.75],
        'blue_tint': [0.0, 0.3],
        'ccm_perturbation': 0.05,
        'no_color_gain': 0.5,
    },

    'facial': {
        'p_key': [0.7, 1.3],
        'epsilon_ratio': 0.005,
        'light_sizes': [5, 10, 20, 30, 40],
        'fill_ratio': 0.1,
        'fill_size': 20,
    },

    'symmetry': {
        'k_sigma': 4,
    },
}

RANGE_KEYS = {
    'foreign': ['mask_persistence', 'silhouette_scale', 'silhouette_spacing',
                'sv_persistence', 'sigma_range', 'luminance_gain', 'blue_tint'],
    'facial': ['p_key'],
}

PATH_KEYS = ['faces', 'crops', 'silhouettes', 'landmarks', 'rig', 'scans']


def merge_config(cfg, defaults=DEFAULT_CONFIG):
    """ block-wise merge of a user config over the defaults """
    cfg = cfg or {}
    if not isinstance(cfg, dict):
        raise ConfigError('config must be a mapping of blocks, got {}'.format(
            type(cfg).__name__))

    unknown = set(cfg) - set(defaults)
    if unknown:
        raise ConfigError('unknown config blocks {}'.format(sorted(unknown)))

    merged = deepcopy(defaults)
    for block, values in cfg.items():
        values = values or {}
        if not isinstance(values, dict):
            raise ConfigError('config block {} must be a mapping'.format(block))
        unknown = set(values) - set(defaults[block])
        if unknown:
            raise ConfigError('unknown keys in {}: {}'.format(block, sorted(unknown)))
        merged[block].update(deepcopy(values))

    return merged


def _check_range(block, key, value):
    try:
        low, high = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError('{}.{} must be a [low, high] pair, got {}'.format(
            block, key, value))
    if low > high:
        raise ConfigError('{}.{} has low {} above high {}'.format(block, key, low, high))
    return [low, high]


def validate_config(cfg):
    """ checks and normalizes a merged config in place, raising ConfigError """
    expt = cfg['expt']

    for key in ('seed', 'count', 'workers'):
        try:
            expt[key] = int(expt[key])
        except (TypeError, ValueError):
            raise ConfigError('expt.{} must be an integer, got {}'.format(key, expt[key]))
    if not 0 <= expt['seed'] < 2 ** 64:
        raise ConfigError('expt.seed must be a 64-bit unsigned integer')
    if expt['count'] < 1:
        raise ConfigError('expt.count must be at least 1, got {}'.format(expt['count']))
    if expt['workers'] < 1:
        raise ConfigError('expt.workers must be at least 1, got {}'.format(expt['workers']))
    if not 0 <= float(expt['failure_threshold']) <= 1:
        raise ConfigError('expt.failure_threshold must lie in [0, 1]')
    if not 0 <= float(expt['holdout_fraction']) < 1:
        raise ConfigError('expt.holdout_fraction must lie in [0, 1)')

    corpus = cfg['corpus']
    for key in PATH_KEYS:
        path = corpus[key]
        if path is not None:
            corpus[key] = expanduser(str(path))
            if not exists(corpus[key]):
                raise ConfigError('corpus.{} path {} does not exist'.format(key, path))

    for block, keys in RANGE_KEYS.items():
        for key in keys:
            cfg[block][key] = _check_range(block, key, cfg[block][key])

    ablation = cfg['foreign']['ablation'] or []
    if isinstance(ablation, str):
        ablation = [ablation]
    bad = set(ablation) - set(ABLATIONS)
    if bad:
        raise ConfigError('unknown ablation flags {}, expected a subset of {}'.format(
            sorted(bad), list(ABLATIONS)))
    cfg['foreign']['ablation'] = [flag for flag in ABLATIONS if flag in ablation]

    try:
        sizes = read_iterable_from_config(cfg['facial']['light_sizes'])
    except (TypeError, ValueError):
        raise ConfigError('facial.light_sizes must be integers')
    if not sizes or min(sizes) < 1:
        raise ConfigError('facial.light_sizes must be positive, got {}'.format(sizes))
    cfg['facial']['light_sizes'] = list(sizes)

    if float(cfg['facial']['fill_ratio']) < 0:
        raise ConfigError('facial.fill_ratio must be non-negative')
    if float(cfg['facial']['epsilon_ratio']) < 0:
        raise ConfigError('facial.epsilon_ratio must be non-negative')
    if int(cfg['symmetry']['k_sigma']) < 1:
        raise ConfigError('symmetry.k_sigma must be at least 1')

    return cfg


def make_config(expt=None, **overrides):
    """
    Loads, merges and validates a run config

    args
        expt (file, dict or None) open YAML file, parsed dict, or defaults only
        overrides (dict) expt keys from the command line, None values ignored

    returns
        cfg (dict)
    """
    if expt is None:
        cfg = {}
    elif isinstance(expt, dict):
        cfg = expt
    else:
        try:
            cfg = yaml.safe_load(expt)
        except yaml.YAMLError as err:
            raise ConfigError('could not parse config: {}'.format(err))

    cfg = merge_config(cfg)

    ablation = overrides.pop('ablation', None)
    if ablation:
        cfg['foreign']['ablation'] = sorted(set(cfg['foreign']['ablation'] or []) | set(ablation))

    for key, value in overrides.items():
        if value is not None:
            if key not in cfg['expt']:
                raise ConfigError('unknown override {}'.format(key))
            cfg['expt'][key] = value

    cfg = validate_config(cfg)
    cfg['expt']['expt_dir'] = join(
        expanduser(str(cfg['expt']['output_root'])), cfg['expt']['name'])
    return cfg

""" tests for configs, the dataset generators, reports and the cli """

import hashlib
import json
import os
from os.path import dirname, exists, join, relpath

from click.testing import CliRunner
import numpy as np
import pytest
import yaml

import shadowpy
from shadowpy.common.errors import ConfigError, DataError, FailureRateExceeded
from shadowpy.experiments import (
    gen_ablations, gen_facial, gen_foreign, gen_mirrors, holdout_split, make_config)
from shadowpy.experiments.analysis import make_report, metrics_report, write_report
from shadowpy.experiments.blocks import perform_samples
from shadowpy.experiments.cli import cli
from shadowpy.experiments.utils import SampleRecorder, read_manifest
from shadowpy.imgcore import load_image, make_synthetic_landmarks, save_landmarks, save_png
from shadowpy.olat import (
    LIGHT_SIZES, LightRig, load_scan, make_geodesic_rig, relight, render_synthetic_face,
    render_synthetic_scan, save_rig, save_scan)
from shadowpy.symmetry import mirror_warp


def small_config(tmp_path, name='test', **expt):
    cfg = {
        'expt': {'name': name, 'output_root': str(tmp_path), 'seed': 3, 'count': 4,
                 'workers': 1},
        'corpus': {'synthetic_faces': 2, 'synthetic_silhouettes': 3,
                   'synthetic_subjects': 2, 'face_size': 32, 'scan_size': 48},
    }
    cfg['expt'].update(expt)
    return cfg


def tree_digest(directory):
    """ {relative path: sha256} of every file except logs """
    digests = {}
    for root, _, files in os.walk(directory):
        for name in files:
            if name.endswith('.log'):
                continue
            path = join(root, name)
            with open(path, 'rb') as f:
                digests[relpath(path, directory)] = hashlib.sha256(f.read()).hexdigest()
    return digests


def test_make_config_defaults():
    cfg = make_config(seed=5)
    assert cfg['expt']['seed'] == 5
    assert cfg['expt']['expt_dir'].endswith(join('shadowpy-results', 'shadowpy'))
    assert cfg['facial']['light_sizes'] == list(LIGHT_SIZES)
    assert cfg['symmetry']['k_sigma'] == 4


def test_example_config_loads():
    path = join(dirname(shadowpy.__file__), 'examples', 'example_config.yaml')
    with open(path, 'rb') as f:
        cfg = make_config(f)
    assert cfg['expt']['name'] == 'example'
    assert cfg['facial']['light_sizes'] == [5, 10, 20, 30, 40]
    assert cfg['foreign']['scatter_profile']['red']['sigmas'] == [2.0, 6.0, 12.0]


def test_ablation_flags_union_in_canonical_order():
    cfg = make_config({'foreign': {'ablation': ['no_color']}}, ablation=['no_sv'])
    assert cfg['foreign']['ablation'] == ['no_sv', 'no_color']


@pytest.mark.parametrize('cfg, message', [
    ({'training': {}}, 'unknown config blocks'),
    ({'expt': {'epochs': 3}}, 'unknown keys'),
    ({'expt': {'count': 0}}, 'count'),
    ({'expt': {'workers': 0}}, 'workers'),
    ({'expt': {'seed': -1}}, 'seed'),
    ({'expt': {'seed': 'abc'}}, 'seed'),
    ({'expt': {'holdout_fraction': 1.0}}, 'holdout_fraction'),
    ({'foreign': {'sigma_range': [8.0, 0.0]}}, 'sigma_range'),
    ({'foreign': {'blue_tint': 0.3}}, 'blue_tint'),
    ({'foreign': {'ablation': ['no_light']}}, 'ablation'),
    ({'facial': {'light_sizes': 'five, ten'}}, 'light_sizes'),
    ({'corpus': {'faces': '/nonexistent/faces'}}, 'does not exist'),
    ({'symmetry': {'k_sigma': 0}}, 'k_sigma'),
])
def test_bad_configs(cfg, message):
    with pytest.raises(ConfigError, match=message):
        make_config(cfg)


def test_config_from_yaml_file(tmp_path):
    path = tmp_path / 'cfg.yaml'
    path.write_text(yaml.safe_dump(small_config(tmp_path)))
    with open(str(path), 'rb') as f:
        cfg = make_config(f, count=7)
    assert cfg['expt']['count'] == 7
    assert cfg['expt']['expt_dir'] == join(str(tmp_path), 'test')


def test_holdout_split():
    keys = ['face-{}'.format(k) for k in range(1000)]
    assert set(holdout_split(keys, 0.0, 1).values()) == {'train'}

    splits = holdout_split(keys, 0.5, 1)
    test_share = sum(v == 'test' for v in splits.values()) / len(keys)
    assert 0.45 <= test_share <= 0.55

    more = holdout_split(keys + ['face-new'], 0.5, 1)
    assert all(more[k] == splits[k] for k in keys)


def test_perform_samples_isolates_failures(tmp_path):
    def make_sample(index):
        if index == 1:
            raise DataError('bad face')
        return {'sample_id': 'x-{}'.format(index), 'seed': index}

    recorder = SampleRecorder(str(tmp_path))
    ids = ['x-{}'.format(k) for k in range(4)]
    records = perform_samples(make_sample, ids, 3, recorder)
    assert [r['sample_id'] for r in records] == ['x-0', 'x-2', 'x-3']
    assert recorder.failed == ['x-1']
    recorder.check_failure_rate(0.5)
    with pytest.raises(FailureRateExceeded):
        recorder.check_failure_rate(0.01)


def test_gen_foreign(tmp_path):
    cfg = make_config(small_config(tmp_path))
    manifest = gen_foreign(cfg)
    out_dir = join(cfg['expt']['expt_dir'], 'foreign')

    assert [row['sample_id'] for row in manifest] == \
        ['foreign-{:06d}'.format(k) for k in range(4)]
    assert [row['sample_id'] for row in read_manifest(out_dir)] == \
        [row['sample_id'] for row in manifest]
    assert [row['face'] for row in manifest] == \
        ['synthetic-0', 'synthetic-1', 'synthetic-0', 'synthetic-1']

    for row in manifest:
        assert row['params']['ablation'] == []
        mask = load_image(join(out_dir, row['files']['mask']))
        assert mask.shape == (32, 32, 3)
        assert mask.min() >= 0.0 and mask.max() <= 1.0
        assert exists(join(out_dir, row['files']['input']))
        assert exists(join(out_dir, row['files']['target']))


def test_gen_foreign_deterministic_across_workers(tmp_path):
    one = make_config(small_config(tmp_path, name='one', workers=1))
    many = make_config(small_config(tmp_path, name='many', workers=3))
    gen_foreign(one)
    gen_foreign(many)
    first = tree_digest(join(one['expt']['expt_dir'], 'foreign'))
    assert first
    assert first == tree_digest(join(many['expt']['expt_dir'], 'foreign'))


def test_gen_ablations(tmp_path):
    cfg = make_config(small_config(tmp_path, count=2))
    manifests = gen_ablations(cfg)
    assert sorted(manifests) == sorted(['full', 'no_sv', 'no_ss', 'no_color'])

    out_dir = join(cfg['expt']['expt_dir'], 'ablations')
    for variant, manifest in manifests.items():
        expected = [] if variant == 'full' else [variant]
        assert all(row['params']['ablation'] == expected for row in manifest)

    #  colour jitter comes after the mask stages, so the masks are shared
    full = tree_digest(join(out_dir, 'full'))
    no_color = tree_digest(join(out_dir, 'no_color'))
    masks = [path for path in full if path.endswith('mask.pfm')]
    assert len(masks) == 2
    assert all(full[path] == no_color[path] for path in masks)


def test_gen_facial(tmp_path):
    cfg = make_config(small_config(tmp_path, count=6))
    manifest = gen_facial(cfg)
    facial_dir = join(cfg['expt']['expt_dir'], 'facial')
    assert len(manifest) == 6
    for row in manifest:
        params = row['params']
        assert params['m'] in LIGHT_SIZES
        assert 0.0 <= params['p_fill'] <= params['p_key'] / 10
        assert row['split'] == 'train'
        for name in ('harsh', 'soft'):
            png = load_image(join(facial_dir, row['files'][name]))
            linear = load_image(join(facial_dir, row['files'][name + '_linear']))
            assert row['files'][name].endswith('.png')
            np.testing.assert_allclose(png, np.clip(linear, 0.0, 1.0), atol=1e-4)

    again = make_config(small_config(tmp_path, name='again', count=6))
    gen_facial(again)
    assert tree_digest(join(cfg['expt']['expt_dir'], 'facial')) == \
        tree_digest(join(again['expt']['expt_dir'], 'facial'))


def test_gen_mirrors(tmp_path):
    cfg = make_config(small_config(tmp_path, count=2))
    gen_facial(cfg)
    manifest = gen_mirrors(cfg, diagnostics=True)
    facial_dir = join(cfg['expt']['expt_dir'], 'facial')

    assert len(manifest) == 2
    assert read_manifest(facial_dir, 'mirrors.jsonl')[0]['k_sigma'] == 4
    for row in manifest:
        harsh = load_image(join(facial_dir, 'samples', row['sample_id'], 'harsh.pfm'))
        mirror = load_image(join(facial_dir, row['files']['mirror']))
        assert mirror.shape == harsh.shape
        assert exists(join(facial_dir, row['files']['difference']))


def write_partial_landmarks(tmp_path):
    directory = tmp_path / 'landmarks'
    directory.mkdir()
    save_landmarks(make_synthetic_landmarks(size=48), str(directory / 'synthetic-0.json'))
    return str(directory)


def test_gen_mirrors_skips_missing_landmarks(tmp_path):
    cfg = small_config(tmp_path, count=4, failure_threshold=1.0)
    cfg['corpus']['landmarks'] = write_partial_landmarks(tmp_path)
    cfg = make_config(cfg)
    gen_facial(cfg)

    manifest = gen_mirrors(cfg)
    assert [row['sample_id'] for row in manifest] == ['facial-000000', 'facial-000002']


def test_gen_mirrors_failure_rate(tmp_path):
    cfg = small_config(tmp_path, count=2)
    cfg['corpus']['landmarks'] = write_partial_landmarks(tmp_path)
    cfg = make_config(cfg)
    gen_facial(cfg)
    with pytest.raises(FailureRateExceeded):
        gen_mirrors(cfg)


def write_images(directory, images):
    os.makedirs(directory)
    for sid, image in images.items():
        save_png(image, join(directory, sid + '.png'))
    return directory


@pytest.fixture()
def report_dirs(tmp_path):
    rng = np.random.default_rng(0)
    truth = {'s-{}'.format(k): rng.uniform(0.2, 0.8, size=(24, 24, 3)) for k in range(3)}
    noisy = {sid: np.clip(img + rng.normal(0, 0.1, img.shape), 0, 1)
             for sid, img in truth.items()}
    return (write_images(str(tmp_path / 'truth'), truth),
            write_images(str(tmp_path / 'noisy'), noisy))


def test_metrics_report(tmp_path, report_dirs):
    truth_dir, noisy_dir = report_dirs
    report = metrics_report(truth_dir, truth_dir, str(tmp_path / 'metrics.json'))
    assert report['aggregate']['psnr'] == 99.0
    assert report['aggregate']['ssim'] == pytest.approx(1.0)
    assert report['aggregate']['l1'] == 0.0
    assert len(report['images']) == 3
    assert exists(str(tmp_path / 'metrics.json'))


def test_make_report(tmp_path, report_dirs):
    truth_dir, noisy_dir = report_dirs
    table = make_report(truth_dir, {'truth': truth_dir, 'noisy': noisy_dir})
    assert list(table.columns) == ['psnr', 'ssim', 'l1']
    assert table.loc['truth', 'psnr'] == 99.0
    assert table.loc['noisy', 'psnr'] < table.loc['truth', 'psnr']
    assert table.loc['noisy', 'ssim'] < table.loc['truth', 'ssim']
    assert table.loc['noisy', 'l1'] > 0

    json_path, text_path = write_report(table, str(tmp_path / 'report.json'))
    with open(text_path) as f:
        text = f.read()
    assert 'PSNR' in text and 'noisy' in text


def test_report_missing_ids(tmp_path, report_dirs):
    truth_dir, _ = report_dirs
    partial = write_images(str(tmp_path / 'partial'), {'s-0': np.zeros((24, 24, 3))})
    with pytest.raises(DataError, match='no prediction'):
        make_report(truth_dir, {'partial': partial})


def write_cli_config(tmp_path, **expt):
    path = tmp_path / 'cfg.yaml'
    path.write_text(yaml.safe_dump(small_config(tmp_path, **expt)))
    return str(path)


def test_cli_synth_foreign(tmp_path):
    result = CliRunner().invoke(
        cli, ['synth-foreign', '--config', write_cli_config(tmp_path), '--count', '2', '--no-ss'])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output.strip().splitlines()[-1]) == {'foreign': 2}
    manifest = read_manifest(join(str(tmp_path), 'test', 'foreign'))
    assert all(row['params']['ablation'] == ['no_ss'] for row in manifest)


def test_cli_config_error_exit_code(tmp_path):
    result = CliRunner().invoke(
        cli, ['synth-foreign', '--config', write_cli_config(tmp_path), '--count', '0'])
    assert result.exit_code == 2


def test_cli_data_error_exit_code(tmp_path, report_dirs):
    truth_dir, _ = report_dirs
    partial = write_images(str(tmp_path / 'partial'), {'s-0': np.zeros((24, 24, 3))})
    result = CliRunner().invoke(
        cli, ['metrics', '--pred', partial, '--truth', truth_dir,
              '--out', str(tmp_path / 'metrics.json')])
    assert result.exit_code == 3


def test_cli_report(tmp_path, report_dirs):
    truth_dir, noisy_dir = report_dirs
    out = str(tmp_path / 'report.json')
    result = CliRunner().invoke(
        cli, ['report', truth_dir, '--pred', 'noisy={}'.format(noisy_dir), '--out', out])
    assert result.exit_code == 0, result.output
    assert 'noisy' in result.output
    assert exists(out)


def last_json(result):
    return json.loads(result.output.strip().splitlines()[-1])


def test_cli_synth_foreign_ablations(tmp_path):
    result = CliRunner().invoke(
        cli, ['synth-foreign', '--config', write_cli_config(tmp_path), '--count', '2',
              '--ablations'])
    assert result.exit_code == 0, result.output
    assert last_json(result) == {'full': 2, 'no_sv': 2, 'no_ss': 2, 'no_color': 2}
    for variant in ('full', 'no_sv', 'no_ss', 'no_color'):
        manifest = read_manifest(join(str(tmp_path), 'test', 'ablations', variant))
        expected = [] if variant == 'full' else [variant]
        assert [row['params']['ablation'] for row in manifest] == [expected, expected]


def test_cli_synth_facial_with_mirrors(tmp_path):
    result = CliRunner().invoke(
        cli, ['synth-facial', '--config', write_cli_config(tmp_path), '--count', '3',
              '--seed', '11', '--mirrors'])
    assert result.exit_code == 0, result.output
    assert last_json(result) == {'facial': 3, 'mirrors': 3}

    facial_dir = join(str(tmp_path), 'test', 'facial')
    rows = read_manifest(facial_dir)
    assert len(rows) == 3
    for row in rows:
        assert exists(join(facial_dir, row['files']['harsh']))
        assert exists(join(facial_dir, row['files']['soft_linear']))
    for row in read_manifest(facial_dir, 'mirrors.jsonl'):
        assert exists(join(facial_dir, row['files']['mirror']))


def test_cli_mirror_config(tmp_path):
    config = write_cli_config(tmp_path, count=2)
    assert CliRunner().invoke(cli, ['synth-facial', '--config', config]).exit_code == 0

    result = CliRunner().invoke(cli, ['mirror', '--config', config, '--workers', '2'])
    assert result.exit_code == 0, result.output
    assert last_json(result) == {'mirrors': 2}
    assert len(read_manifest(join(str(tmp_path), 'test', 'facial'), 'mirrors.jsonl')) == 2


def test_cli_mirror_image(tmp_path):
    image_path, landmark_path = str(tmp_path / 'face.png'), str(tmp_path / 'face.json')
    save_png(render_synthetic_face(size=48), image_path)
    save_landmarks(make_synthetic_landmarks(size=48), landmark_path)
    out, diff = str(tmp_path / 'mirror.pfm'), str(tmp_path / 'diff.png')

    result = CliRunner().invoke(
        cli, ['mirror', '--image', image_path, '--landmarks', landmark_path,
              '--out', out, '--diff', diff])
    assert result.exit_code == 0, result.output
    expected = mirror_warp(load_image(image_path), make_synthetic_landmarks(size=48))
    np.testing.assert_allclose(load_image(out), expected, atol=1e-6)
    assert exists(diff)

    result = CliRunner().invoke(cli, ['mirror', '--image', image_path])
    assert result.exit_code != 0


def write_small_scan(tmp_path):
    rig = make_geodesic_rig()
    small = LightRig(rig.directions[:6], camera_axis=rig.camera_axis)
    scan_dir, rig_path = str(tmp_path / 'scan'), str(tmp_path / 'rig.json')
    save_scan(render_synthetic_scan(small, size=8), scan_dir)
    save_rig(small, rig_path)
    return scan_dir, rig_path


def test_cli_relight(tmp_path):
    scan_dir, rig_path = write_small_scan(tmp_path)
    weights = [0.5, 1.0, 0.0, 0.0, 0.25, 2.0]
    weights_path = tmp_path / 'weights.json'
    weights_path.write_text(json.dumps(weights))
    out = str(tmp_path / 'relit.pfm')

    result = CliRunner().invoke(
        cli, ['relight', scan_dir, '--rig', rig_path, '--weights', str(weights_path),
              '--out', out])
    assert result.exit_code == 0, result.output
    expected = relight(load_scan(scan_dir), np.array(weights))
    np.testing.assert_allclose(load_image(out), expected, rtol=1e-6, atol=1e-7)


def test_cli_malformed_input_exit_code(tmp_path):
    scan_dir, rig_path = write_small_scan(tmp_path)
    weights_path = tmp_path / 'weights.json'
    weights_path.write_text(json.dumps(['bright'] * 6))
    result = CliRunner().invoke(
        cli, ['relight', scan_dir, '--rig', rig_path, '--weights', str(weights_path),
              '--out', str(tmp_path / 'relit.pfm')])
    assert result.exit_code == 3


def test_cli_align(tmp_path):
    rng = np.random.default_rng(7)
    ys, xs = np.mgrid[0:32, 0:32] / 31.0
    shadow = np.stack([0.2 + 0.6 * xs, 0.2 + 0.6 * ys, 0.5 + 0.3 * xs * ys], axis=-1)
    noisy = np.clip(shadow + rng.normal(0, 0.1, shadow.shape), 0, 1)

    paths = {}
    for name, image in (('shadow', shadow), ('noisy', noisy), ('same', shadow)):
        paths[name] = str(tmp_path / (name + '.png'))
        save_png(image, paths[name])
    corners = [[0.0, 0.0], [31.0, 0.0], [31.0, 31.0], [0.0, 31.0], [16.0, 10.0]]
    pairs_path = tmp_path / 'pairs.json'
    pairs_path.write_text(json.dumps([[p, p] for p in corners]))
    out_dir = str(tmp_path / 'aligned')

    result = CliRunner().invoke(
        cli, ['align', paths['shadow'], '--candidate', paths['noisy'],
              '--candidate', paths['same'], '--correspondences', str(pairs_path),
              '--correspondences', str(pairs_path), '--out-dir', out_dir])
    assert result.exit_code == 0, result.output
    assert last_json(result)['index'] == 1
    with open(join(out_dir, 'alignment.json')) as f:
        alignment = json.load(f)
    assert alignment['counterpart'] == paths['same']
    assert len(alignment['errors']) == 2
    assert exists(join(out_dir, 'shadow.png')) and exists(join(out_dir, 'lit.png'))


def test_cli_runs_are_reproducible(tmp_path):
    digests = []
    for run in ('one', 'two'):
        root = tmp_path / run
        root.mkdir()
        config = write_cli_config(root, count=3)
        for command in ('synth-foreign', 'synth-facial'):
            result = CliRunner().invoke(cli, [command, '--config', config, '--seed', '21'])
            assert result.exit_code == 0, result.output
        digests.append(tree_digest(join(str(root), 'test')))
    assert digests[0] == digests[1]
    assert any(path.endswith('input.png') for path in digests[0])
    assert any(path.endswith('soft.png') for path in digests[0])

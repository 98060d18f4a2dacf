from functools import wraps
import json
from os.path import join
import sys

import click
import numpy as np

from shadowpy.common.errors import DataError, ShadowpyError
from shadowpy.common.utils import dump_json, load_json
from shadowpy.evalkit.homography import dlt_homography, select_counterpart, warp_homography
from shadowpy.experiments.analysis import format_table, make_report, metrics_report, write_report
from shadowpy.experiments.blocks import gen_ablations, gen_facial, gen_foreign, gen_mirrors, setup_expt
from shadowpy.experiments.config import make_config
from shadowpy.imgcore.io import load_image, save_pfm, save_png
from shadowpy.imgcore.landmarks import load_landmarks
from shadowpy.olat.rig import load_rig
from shadowpy.olat.scan import load_scan
from shadowpy.olat.weights import relight
from shadowpy.symmetry.warp import mirror_difference, mirror_warp


def exit_codes(func):
    """ ConfigError -> 2, DataError or bad input files -> 3, FailureRateExceeded -> 4 """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ShadowpyError as err:
            click.echo('error: {}'.format(err), err=True)
            sys.exit(err.exit_code)
        except (OSError, ValueError) as err:
            click.echo('error: {}'.format(err), err=True)
            sys.exit(DataError.exit_code)
    return wrapper


def save_image(image, path):
    if path.lower().endswith('.pfm'):
        save_pfm(image, path)
    else:
        save_png(image, path)


def run_options(func):
    for option in reversed([
        click.option('--config', 'expt', type=click.File('rb'), default=None,
                     help='YAML experiment config'),
        click.option('--seed', type=int, default=None, help='master seed'),
        click.option('--count', type=int, default=None, help='number of samples'),
        click.option('--workers', type=int, default=None, help='worker threads'),
    ]):
        func = option(func)
    return func


@click.group()
def cli():
    """ portrait shadow dataset synthesis and evaluation """


@cli.command('synth-foreign')
@run_options
@click.option('--no-sv', is_flag=True, help='skip spatially varying blur and intensity')
@click.option('--no-ss', is_flag=True, help='skip the subsurface scattering blur')
@click.option('--no-color', is_flag=True, help='neutral colour jitter')
@click.option('--ablations', is_flag=True, help='generate all four ablation variants')
@exit_codes
def synth_foreign(expt, seed, count, workers, no_sv, no_ss, no_color, ablations):
    flags = [flag for flag, on in
             (('no_sv', no_sv), ('no_ss', no_ss), ('no_color', no_color)) if on]
    cfg = make_config(expt, seed=seed, count=count, workers=workers, ablation=flags)
    setup_expt(cfg)

    if ablations:
        manifests = gen_ablations(cfg)
        click.echo(json.dumps({k: len(v) for k, v in manifests.items()}))
    else:
        click.echo(json.dumps({'foreign': len(gen_foreign(cfg))}))


@cli.command('synth-facial')
@run_options
@click.option('--mirrors', is_flag=True, help='also write the mirrored inputs')
@exit_codes
def synth_facial(expt, seed, count, workers, mirrors):
    cfg = make_config(expt, seed=seed, count=count, workers=workers)
    setup_expt(cfg)

    summary = {'facial': len(gen_facial(cfg))}
    if mirrors:
        summary['mirrors'] = len(gen_mirrors(cfg))
    click.echo(json.dumps(summary))


@cli.command()
@click.option('--config', 'expt', type=click.File('rb'), default=None,
              help='mirror every facial sample of this experiment')
@click.option('--workers', type=int, default=None)
@click.option('--image', type=click.Path(exists=True, dir_okay=False), default=None)
@click.option('--landmarks', type=click.Path(exists=True, dir_okay=False), default=None)
@click.option('--out', type=click.Path(dir_okay=False), default=None)
@click.option('--diff', type=click.Path(dir_okay=False), default=None,
              help='also write |I - I_bar|')
@click.option('--k-sigma', type=int, default=4)
@exit_codes
def mirror(expt, workers, image, landmarks, out, diff, k_sigma):
    if image is None:
        if expt is None:
            raise click.UsageError('give either --config or --image with --landmarks and --out')
        cfg = make_config(expt, workers=workers)
        setup_expt(cfg)
        click.echo(json.dumps({'mirrors': len(gen_mirrors(cfg, diagnostics=bool(diff)))}))
        return

    if landmarks is None or out is None:
        raise click.UsageError('--image needs --landmarks and --out')

    img = load_image(image)
    mirrored = mirror_warp(img, load_landmarks(landmarks), k_sigma=k_sigma)
    save_image(mirrored, out)
    if diff:
        save_image(mirror_difference(img, mirrored), diff)


@cli.command('relight')
@click.argument('scan_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--rig', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--weights', type=click.Path(exists=True, dir_okay=False), required=True,
              help='JSON list of weights, one per active light')
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@exit_codes
def relight_scan(scan_dir, rig, weights, out):
    scan = load_scan(scan_dir)
    scan.check_rig(load_rig(rig))
    save_image(relight(scan, np.asarray(load_json(weights), dtype=np.float64)), out)


@cli.command()
@click.argument('shadow', type=click.Path(exists=True, dir_okay=False))
@click.option('--candidate', multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False), help='lit frame, repeatable')
@click.option('--correspondences', multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help='JSON [[x, y], [x\', y\']] pairs, one file per candidate')
@click.option('--out-dir', type=click.Path(file_okay=False), required=True)
@exit_codes
def align(shadow, candidate, correspondences, out_dir):
    shadow_img = load_image(shadow)
    candidates = [load_image(path) for path in candidate]
    pairs = [load_json(path) for path in correspondences]

    index, errors = select_counterpart(shadow_img, candidates, pairs)
    homography = dlt_homography(pairs[index])

    save_png(warp_homography(shadow_img, homography), join(out_dir, 'shadow.png'))
    save_png(candidates[index], join(out_dir, 'lit.png'))
    result = {
        'counterpart': candidate[index],
        'index': index,
        'errors': errors.tolist(),
        'homography': homography.matrix.tolist(),
        'rms': homography.rms,
    }
    dump_json(result, join(out_dir, 'alignment.json'))
    click.echo(json.dumps({'index': index, 'error': float(errors[index])}))


@cli.command()
@click.option('--pred', type=click.Path(exists=True, file_okay=False), required=True)
@click.option('--truth', type=click.Path(exists=True, file_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@click.option('--workers', type=int, default=1)
@exit_codes
def metrics(pred, truth, out, workers):
    report = metrics_report(pred, truth, out, workers)
    click.echo(json.dumps(report['aggregate'], sort_keys=True))


@cli.command()
@click.argument('truth', type=click.Path(exists=True, file_okay=False))
@click.option('--pred', multiple=True, required=True,
              help='NAME=DIR of one method or variant, repeatable')
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@click.option('--workers', type=int, default=1)
@exit_codes
def report(truth, pred, out, workers):
    predictions = {}
    for item in pred:
        name, sep, directory = item.partition('=')
        if not sep or not name or not directory:
            raise click.BadParameter('expected NAME=DIR, got {}'.format(item), param_hint='--pred')
        predictions[name] = directory

    table = make_report(truth, predictions, workers)
    write_report(table, out)
    click.echo(format_table(table))


if __name__ == '__main__':
    cli()

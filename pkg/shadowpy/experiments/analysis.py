from concurrent.futures import ThreadPoolExecutor
from glob import glob
from os.path import basename, join, splitext

import pandas as pd

from shadowpy.common.errors import DataError
from shadowpy.common.utils import atomic_write_bytes, dump_json
from shadowpy.evalkit.metrics import image_metrics
from shadowpy.imgcore.io import load_image


IMAGE_EXTENSIONS = ('.png', '.pfm')

#  column order of the results tables
COLUMNS = ['psnr', 'ssim', 'l1']


def collect_images(directory):
    """ {sample id: path} for every PNG / PFM, the id being the file stem """
    images = {}
    for path in sorted(glob(join(directory, '*'))):
        stem, ext = splitext(basename(path))
        if ext.lower() in IMAGE_EXTENSIONS:
            if stem in images:
                raise DataError('sample id {} appears twice in {}'.format(stem, directory))
            images[stem] = path
    return images


def align_ids(pred, truth, pred_dir, truth_dir):
    missing = sorted(set(truth) - set(pred))
    extra = sorted(set(pred) - set(truth))
    if missing:
        raise DataError('{} has no prediction for ids {}'.format(pred_dir, missing[:10]))
    if extra:
        raise DataError('{} has predictions with no truth in {}: {}'.format(
            pred_dir, truth_dir, extra[:10]))
    if not truth:
        raise DataError('no images in {}'.format(truth_dir))
    return sorted(truth)


def evaluate_dirs(pred_dir, truth_dir, workers=1):
    """
    Per-image metrics of matching files in two directories

    returns
        results (pd.DataFrame) index sample id, columns psnr, ssim, l1
    """
    pred, truth = collect_images(pred_dir), collect_images(truth_dir)
    ids = align_ids(pred, truth, pred_dir, truth_dir)

    def evaluate(sid):
        return image_metrics(load_image(pred[sid]), load_image(truth[sid]))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(evaluate, ids))

    results = pd.DataFrame(rows, index=pd.Index(ids, name='sample_id'))
    return results[COLUMNS]


def aggregate(results):
    return {col: float(results[col].mean()) for col in COLUMNS}


def metrics_report(pred_dir, truth_dir, out=None, workers=1):
    """
    Per-image and aggregate metrics, written as JSON when out is given

    returns
        report (dict) {'images': [...], 'aggregate': {...}}
    """
    results = evaluate_dirs(pred_dir, truth_dir, workers)
    report = {
        'images': results.reset_index().to_dict(orient='records'),
        'aggregate': aggregate(results),
    }
    if out:
        dump_json(report, out)
    return report


def make_report(truth_dir, predictions, workers=1):
    """
    One row per method or variant, one column per metric

    args
        truth_dir (str)
        predictions (dict) variant name -> prediction directory

    returns
        table (pd.DataFrame)
    """
    if not predictions:
        raise DataError('report needs at least one prediction directory')

    rows = {name: aggregate(evaluate_dirs(pred_dir, truth_dir, workers))
            for name, pred_dir in predictions.items()}
    table = pd.DataFrame.from_dict(rows, orient='index')[COLUMNS]
    table.index.name = 'variant'
    return table


def format_table(table):
    printable = table.rename(columns={'psnr': 'PSNR', 'ssim': 'SSIM', 'l1': 'L1'})
    return printable.to_string(float_format=lambda v: '{:.4f}'.format(v))


def write_report(table, out):
    """ writes <out> as JSON and <out stem>.txt as a plain-text table """
    dump_json({name: row for name, row in table.to_dict(orient='index').items()}, out)
    text_path = splitext(out)[0] + '.txt'
    atomic_write_bytes(text_path, (format_table(table) + '\n').encode('utf-8'))
    return out, text_path

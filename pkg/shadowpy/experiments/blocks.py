"""
Dataset generation blocks

Every sample is a pure function of (config, corpus bytes, sample index).
Samples run on a thread pool, are written to a temp dir and renamed into
place, and the manifest is assembled in index order once all are done.
"""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor, as_completed
from copy import deepcopy
from functools import lru_cache
from glob import glob
import json
from os.path import basename, exists, join, relpath

from tqdm import tqdm

from shadowpy import __version__
from shadowpy.common import dump_config, ensure_dir, file_sha256, load_json, make_new_logger
from shadowpy.common.errors import DataError, ShadowpyError
from shadowpy.common.seeding import derive_seed
from shadowpy.imgcore.crop import FaceCrop, load_crops, resize_crop_face
from shadowpy.imgcore.io import encode_pfm, encode_png, load_image, save_pfm
from shadowpy.imgcore.landmarks import load_landmarks, make_synthetic_landmarks, save_landmarks
from shadowpy.maskgen.silhouette import load_silhouette_corpus, make_synthetic_silhouettes
from shadowpy.olat.pairs import make_pair
from shadowpy.olat.rig import load_rig, make_geodesic_rig
from shadowpy.olat.scan import load_scan, render_synthetic_face, render_synthetic_scan
from shadowpy.shadowsynth.synth import ABLATIONS, synth_foreign
from shadowpy.symmetry.warp import mirror_difference, mirror_warp
from shadowpy.experiments.utils import (
    MANIFEST, SampleRecorder, read_manifest, write_manifest, write_sample_dir)


#  per-sample errors that skip the sample instead of aborting the run
SAMPLE_ERRORS = (ShadowpyError, ValueError, OSError)

VARIANTS = ('full',) + ABLATIONS

FaceEntry = namedtuple('FaceEntry', ['face_id', 'path', 'crop', 'subject'])


def setup_expt(cfg, name='expt'):
    """ creates the experiment directory and dumps the resolved config """
    expt_dir = cfg['expt']['expt_dir']
    ensure_dir(expt_dir)
    expt_logger = make_new_logger(name, expt_dir)
    dump_config(cfg, expt_logger)
    return expt_logger


def sample_id(kind, index):
    return '{}-{:06d}'.format(kind, index)


def holdout_split(keys, fraction, seed):
    """
    Assigns whole faces or subjects to the train or test split

    The draw for a key depends only on (seed, key), so adding keys never
    moves existing ones.

    returns
        splits (dict) key -> 'train' | 'test'
    """
    splits = {}
    for key in keys:
        u = derive_seed(seed, 'holdout', str(key)) / 2.0 ** 64
        splits[key] = 'test' if u < fraction else 'train'
    return splits


class FaceCorpus():
    """
    Shadow-free lit faces, cropped and resized on first use

    Faces come from a curated directory whose index.json lists
    {"id", "file", "shadow_free", "crop"} entries; only faces marked
    shadow_free are used.  Without a directory, synthetic faces are rendered.
    """

    def __init__(self, entries, face_size=256):
        if not entries:
            raise DataError('face corpus is empty')
        self.entries = entries
        self.face_size = face_size
        self.load = lru_cache(maxsize=None)(self._load)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return '<shadowpy FaceCorpus {} faces>'.format(len(self))

    def _load(self, index):
        entry = self.entries[index]
        if entry.path is None:
            return render_synthetic_face(self.face_size, subject=entry.subject)

        image = load_image(entry.path)
        crop = entry.crop or FaceCrop.full_frame(image)
        return resize_crop_face(image, crop, size=self.face_size)


def load_face_corpus(corpus_cfg, logger=None):
    directory = corpus_cfg['faces']
    size = int(corpus_cfg['face_size'])

    if directory is None:
        entries = [FaceEntry('synthetic-{}'.format(k), None, None, k)
                   for k in range(int(corpus_cfg['synthetic_faces']))]
        return FaceCorpus(entries, size)

    index_path = join(directory, 'index.json')
    if not exists(index_path):
        raise DataError('face corpus {} has no index.json curation file'.format(directory))

    crops = load_crops(corpus_cfg['crops']) if corpus_cfg['crops'] else {}
    entries = []
    for face in load_json(index_path)['faces']:
        if not face.get('shadow_free', False):
            if logger:
                logger.debug(json.dumps({'face': face['id'], 'status': 'excluded',
                                         'reason': 'not certified shadow free'}))
            continue

        crop = crops.get(face['file'])
        if crop is None and face.get('crop'):
            crop = FaceCrop.from_dict(face['crop'])
        entries.append(FaceEntry(face['id'], join(directory, face['file']), crop, None))

    return FaceCorpus(entries, size)


def load_silhouettes(cfg):
    corpus_cfg = cfg['corpus']
    if corpus_cfg['silhouettes']:
        return load_silhouette_corpus(corpus_cfg['silhouettes'])
    count = int(corpus_cfg['synthetic_silhouettes'])
    if count == 0:
        return []
    return make_synthetic_silhouettes(count=count, seed=cfg['expt']['seed'])


def load_olat_corpus(cfg):
    """
    Rig plus one scan per subject, checked against each other

    returns
        rig (LightRig)
        scans (list) of OlatScan
    """
    corpus_cfg = cfg['corpus']
    rig = load_rig(corpus_cfg['rig']) if corpus_cfg['rig'] else make_geodesic_rig()

    if corpus_cfg['scans']:
        directory = corpus_cfg['scans']
        index_path = join(directory, 'index.json')
        if exists(index_path):
            names = load_json(index_path)
        else:
            names = sorted(basename(d.rstrip('/')) for d in glob(join(directory, '*/')))
        scans = [load_scan(join(directory, name)) for name in names]
    else:
        scans = [render_synthetic_scan(rig, size=int(corpus_cfg['scan_size']), subject=k)
                 for k in range(int(corpus_cfg['synthetic_subjects']))]

    if not scans:
        raise DataError('no OLAT scans found')
    for scan in scans:
        scan.check_rig(rig)

    return rig, scans


def perform_samples(make_sample, ids, workers, recorder, desc=None):
    """
    Runs make_sample(index) for every index into ids on a thread pool

    A sample raising one of SAMPLE_ERRORS is logged and skipped.  Records
    come back in index order whatever order the workers finish in.

    returns
        records (list) of manifest records for the samples that succeeded
    """
    count = len(ids)
    outcomes = [None] * count
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(make_sample, index): index for index in range(count)}
        for future in tqdm(as_completed(futures), total=count, desc=desc, disable=None):
            index = futures[future]
            try:
                outcomes[index] = future.result()
            except SAMPLE_ERRORS as err:
                outcomes[index] = err

    records = []
    for index, outcome in enumerate(outcomes):
        if isinstance(outcome, Exception):
            recorder.record_failure(index, ids[index], outcome)
        else:
            recorder.record_sample(outcome)
            records.append(outcome)

    return records


def finish_run(records, out_dir, recorder, cfg, name=MANIFEST):
    write_manifest(records, out_dir, name=name)
    recorder.summary()
    recorder.check_failure_rate(float(cfg['expt']['failure_threshold']))
    return records


def gen_foreign(cfg, out_dir=None):
    """
    Foreign-shadow training triples (input, lit target, mask)

    Faces are taken round robin, so a count above the corpus size reuses each
    face with different shadow seeds.

    returns
        manifest (list) one record per written sample
    """
    expt = cfg['expt']
    out_dir = out_dir or join(expt['expt_dir'], 'foreign')
    ensure_dir(out_dir)
    logger = make_new_logger('foreign', out_dir)

    faces = load_face_corpus(cfg['corpus'], logger)
    silhouettes = load_silhouettes(cfg)
    splits = holdout_split(
        [entry.face_id for entry in faces.entries], float(expt['holdout_fraction']), expt['seed'])
    foreign_cfg = cfg['foreign']

    logger.info(json.dumps({
        'generator': 'foreign', 'faces': len(faces), 'silhouettes': len(silhouettes),
        'count': expt['count'], 'ablation': foreign_cfg['ablation']}))

    def make_sample(index):
        sid = sample_id('foreign', index)
        seed = derive_seed(expt['seed'], index, 'foreign')
        face_index = index % len(faces)
        entry = faces.entries[face_index]

        sample = synth_foreign(faces.load(face_index), seed, corpus=silhouettes, **foreign_cfg)

        sample_dir = join(out_dir, 'samples', sid)
        write_sample_dir(sample_dir, {
            'input.png': encode_png(sample.composite),
            'target.png': encode_png(sample.lit),
            'mask.pfm': encode_pfm(sample.mask),
        })
        rel = relpath(sample_dir, out_dir)
        return {
            'sample_id': sid,
            'index': index,
            'seed': seed,
            'kind': 'foreign',
            'face': entry.face_id,
            'split': splits[entry.face_id],
            'params': sample.provenance,
            'files': {
                'input': join(rel, 'input.png'),
                'target': join(rel, 'target.png'),
                'mask': join(rel, 'mask.pfm'),
            },
            'version': __version__,
        }

    recorder = SampleRecorder(out_dir)
    ids = [sample_id('foreign', index) for index in range(expt['count'])]
    records = perform_samples(make_sample, ids, expt['workers'], recorder, desc='foreign')
    return finish_run(records, out_dir, recorder, cfg)


def gen_ablations(cfg, out_dir=None):
    """
    The full, No-SV, No-SS and No-Color variants from one master seed

    returns
        manifests (dict) variant -> manifest
    """
    out_dir = out_dir or join(cfg['expt']['expt_dir'], 'ablations')
    manifests = {}
    for variant in VARIANTS:
        variant_cfg = deepcopy(cfg)
        variant_cfg['foreign']['ablation'] = [] if variant == 'full' else [variant]
        manifests[variant] = gen_foreign(variant_cfg, join(out_dir, variant))
    return manifests


def gen_facial(cfg, out_dir=None):
    """
    Harsh / soft OLAT relighting pairs with their light size and fill knobs

    Each pair is written as 16 bit sRGB PNGs for interchange, clamped to
    [0, 1], and as linear PFMs that keep highlights above 1.  Mirrors are
    computed from the PFM.

    returns
        manifest (list)
    """
    expt = cfg['expt']
    out_dir = out_dir or join(expt['expt_dir'], 'facial')
    ensure_dir(out_dir)
    logger = make_new_logger('facial', out_dir)

    rig, scans = load_olat_corpus(cfg)
    splits = holdout_split(
        [scan.subject for scan in scans], float(expt['holdout_fraction']), expt['seed'])
    facial_cfg = cfg['facial']

    logger.info(json.dumps({
        'generator': 'facial', 'lights': rig.num_lights, 'active': rig.num_active,
        'subjects': len(scans), 'count': expt['count']}))

    def make_sample(index):
        sid = sample_id('facial', index)
        seed = derive_seed(expt['seed'], index, 'facial')
        scan = scans[index % len(scans)]

        pair = make_pair(scan, rig, seed, **facial_cfg)

        sample_dir = join(out_dir, 'samples', sid)
        write_sample_dir(sample_dir, {
            'harsh.png': encode_png(pair.harsh),
            'soft.png': encode_png(pair.soft),
            'harsh.pfm': encode_pfm(pair.harsh),
            'soft.pfm': encode_pfm(pair.soft),
        })
        rel = relpath(sample_dir, out_dir)
        return {
            'sample_id': sid,
            'index': index,
            'seed': seed,
            'kind': 'facial',
            'subject': scan.subject,
            'split': splits[scan.subject],
            'params': {
                'key': pair.key,
                'p_key': pair.p_key,
                'm': pair.m,
                'p_fill': pair.p_fill,
                'epsilon': pair.epsilon,
            },
            'files': {
                'harsh': join(rel, 'harsh.png'),
                'soft': join(rel, 'soft.png'),
                'harsh_linear': join(rel, 'harsh.pfm'),
                'soft_linear': join(rel, 'soft.pfm'),
            },
            'version': __version__,
        }

    recorder = SampleRecorder(out_dir)
    ids = [sample_id('facial', index) for index in range(expt['count'])]
    records = perform_samples(make_sample, ids, expt['workers'], recorder, desc='facial')
    return finish_run(records, out_dir, recorder, cfg)


def landmarks_for_subject(cfg, subject, size, out_dir):
    """
    Path of the landmark file for a subject

    Synthetic scans get a synthetic symmetric layout, written once so the
    manifest can record its hash.
    """
    directory = cfg['corpus']['landmarks']
    if directory:
        path = join(directory, '{}.json'.format(subject))
        if not exists(path):
            raise DataError('no landmarks for subject {}'.format(subject))
        return path

    path = join(out_dir, 'landmarks', '{}.json'.format(subject))
    if not exists(path):
        save_landmarks(make_synthetic_landmarks(size=size), path)
    return path


def gen_mirrors(cfg, facial_dir=None, diagnostics=False):
    """
    Writes the mirrored image I_bar beside each facial sample's harsh input

    Samples with missing or invalid landmarks are skipped with the reason
    logged.

    returns
        manifest (list) one record per mirrored sample, in mirrors.jsonl
    """
    expt = cfg['expt']
    facial_dir = facial_dir or join(expt['expt_dir'], 'facial')
    rows = read_manifest(facial_dir)
    k_sigma = int(cfg['symmetry']['k_sigma'])

    #  written up front so workers never race on the same landmark file
    landmark_paths = {}
    for row in rows:
        subject = row['subject']
        if subject not in landmark_paths:
            try:
                size = load_image(join(facial_dir, row['files']['harsh_linear'])).shape[0]
                landmark_paths[subject] = landmarks_for_subject(cfg, subject, size, facial_dir)
            except SAMPLE_ERRORS as err:
                landmark_paths[subject] = err

    def make_sample(index):
        row = rows[index]
        path = landmark_paths[row['subject']]
        if isinstance(path, Exception):
            raise path

        image = load_image(join(facial_dir, row['files']['harsh_linear']))
        landmarks = load_landmarks(path)
        landmarks.check_inside(image.shape[1], image.shape[0])
        mirrored = mirror_warp(image, landmarks, k_sigma=k_sigma)

        sample_dir = join(facial_dir, 'samples', row['sample_id'])
        files = {'mirror': join(relpath(sample_dir, facial_dir), 'mirror.pfm')}
        save_pfm(mirrored, join(facial_dir, files['mirror']))
        if diagnostics:
            files['difference'] = join(relpath(sample_dir, facial_dir), 'difference.pfm')
            save_pfm(mirror_difference(image, mirrored), join(facial_dir, files['difference']))

        return {
            'sample_id': row['sample_id'],
            'seed': row['seed'],
            'landmarks': path if cfg['corpus']['landmarks'] else relpath(path, facial_dir),
            'landmarks_sha256': file_sha256(path),
            'k_sigma': k_sigma,
            'files': files,
            'version': __version__,
        }

    recorder = SampleRecorder(facial_dir, name='mirrors')
    ids = [row['sample_id'] for row in rows]
    records = perform_samples(make_sample, ids, expt['workers'], recorder, desc='mirrors')
    return finish_run(records, facial_dir, recorder, cfg, name='mirrors.jsonl')

""" tests for affine outputs, metrics and homography alignment """

import hypothesis as hp
import hypothesis.strategies as st
import numpy as np
import pytest

from shadowpy.common.errors import DataError
from shadowpy.evalkit import (
    PSNR_CAP, AffineOutput, Homography, apply_affine, dlt_homography, image_metrics,
    l1_pixel, psnr, select_counterpart, ssim, training_loss, warp_homography, warp_overlap)


def smooth_image(height=64, width=64, phase=0.0):
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    image = np.stack([
        0.5 + 0.4 * np.sin(xs / 9.0 + phase) * np.cos(ys / 11.0),
        0.5 + 0.3 * np.cos(xs / 13.0 - ys / 7.0 + phase),
        0.5 + 0.2 * np.sin((xs + ys) / 10.0),
    ], axis=-1)
    return image


def random_homography(rng):
    angle = rng.uniform(-0.3, 0.3)
    scale = rng.uniform(0.8, 1.25)
    rotation = np.array([
        [scale * np.cos(angle), -scale * np.sin(angle), rng.uniform(-20, 20)],
        [scale * np.sin(angle), scale * np.cos(angle), rng.uniform(-20, 20)],
        [0.0, 0.0, 1.0],
    ])
    perspective = np.eye(3)
    perspective[2, :2] = rng.uniform(-5e-4, 5e-4, size=2)
    return perspective @ rotation


def correspondences_for(matrix, src):
    dst = Homography(matrix).apply(src)
    return np.stack([src, dst], axis=1)


def relative_error(a, b):
    a, b = a / a[2, 2], b / b[2, 2]
    return np.abs(a - b).max() / np.abs(b).max()


def test_affine_identity_and_offset():
    image = smooth_image(8, 8)
    np.testing.assert_array_equal(apply_affine(image, AffineOutput.identity(image.shape)), image)

    offset = np.full(image.shape, 0.25)
    np.testing.assert_array_equal(
        apply_affine(image, AffineOutput(np.zeros(image.shape), offset)), offset)


def test_affine_scalar():
    out = apply_affine(np.full((1, 1, 3), 0.6), AffineOutput(np.full((1, 1, 3), 0.5),
                                                             np.full((1, 1, 3), 0.1)))
    np.testing.assert_allclose(out, 0.4, atol=1e-15)


@hp.given(st.floats(-2, 2), st.floats(-2, 2))
@hp.settings(max_examples=20)
def test_affine_linear_in_scale_and_offset(a, b):
    image = smooth_image(6, 6)
    shape = image.shape
    one = AffineOutput(np.full(shape, 0.3), np.full(shape, 0.1))
    two = AffineOutput(np.full(shape, -0.7), np.full(shape, 0.05))
    mixed = AffineOutput(a * one.scale + b * two.scale, a * one.offset + b * two.offset)
    np.testing.assert_allclose(
        apply_affine(image, mixed),
        a * apply_affine(image, one) + b * apply_affine(image, two), atol=1e-12)


def test_affine_errors():
    with pytest.raises(DataError, match='shapes differ'):
        AffineOutput(np.ones((2, 2, 3)), np.zeros((2, 3, 3)))
    with pytest.raises(DataError, match='finite'):
        AffineOutput(np.full((2, 2, 3), np.nan), np.zeros((2, 2, 3)))
    with pytest.raises(DataError, match='shape mismatch'):
        apply_affine(np.ones((4, 4, 3)), AffineOutput.identity((4, 5, 3)))


def test_l1_pixel():
    image = smooth_image(16, 16)
    assert l1_pixel(image, image) == 0.0
    assert l1_pixel(image, image + 0.1) == pytest.approx(0.1, abs=1e-12)
    assert training_loss(image, image + 0.1) == l1_pixel(image, image + 0.1)


def test_l1_pixel_matches_loop():
    rng = np.random.default_rng(0)
    a, b = rng.uniform(0, 1, (7, 9, 3)), rng.uniform(0, 1, (7, 9, 3))
    total, count = 0.0, 0
    for r in range(7):
        for c in range(9):
            for k in range(3):
                total += abs(a[r, c, k] - b[r, c, k])
                count += 1
    assert l1_pixel(a, b) == pytest.approx(total / count, rel=1e-12)


def test_psnr():
    image = smooth_image(16, 16) * 0.5
    assert psnr(image, image) == PSNR_CAP
    assert psnr(image, image + 0.1) == pytest.approx(20.0, abs=0.01)
    drop = psnr(image, image + 0.05) - psnr(image, image + 0.1)
    assert drop == pytest.approx(20 * np.log10(2), abs=1e-9)
    assert psnr(image, image + 1e-9) == PSNR_CAP


def test_metric_shape_mismatch():
    with pytest.raises(DataError):
        psnr(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))
    with pytest.raises(DataError):
        l1_pixel(np.zeros((4, 4, 3)), np.zeros((4, 4, 1)))


def test_ssim_identical_and_inverted():
    image = smooth_image()
    assert ssim(image, image) == pytest.approx(1.0, abs=1e-12)

    checker = (np.indices((64, 64)) // 8).sum(axis=0) % 2
    board = np.repeat(checker[..., None], 3, axis=2).astype(np.float64)
    assert ssim(board, 1.0 - board) < 0.5


@pytest.mark.parametrize('c', [0.0, 0.2, 0.7])
def test_ssim_of_constants(c):
    c1 = 0.01 ** 2
    expected = (2 * c * (c + 0.1) + c1) / (c ** 2 + (c + 0.1) ** 2 + c1)
    value = ssim(np.full((32, 32), c), np.full((32, 32), c + 0.1))
    assert value == pytest.approx(expected, abs=1e-9)


def test_ssim_too_small():
    with pytest.raises(DataError, match='11x11'):
        ssim(np.zeros((10, 20, 3)), np.zeros((10, 20, 3)))


def test_only_ssim_depends_on_pixel_order():
    truth = smooth_image()
    image = np.clip(truth + np.random.default_rng(1).normal(0, 0.02, truth.shape), 0, 1)
    order = np.random.default_rng(2).permutation(64 * 64)

    def shuffle(x):
        return x.reshape(-1, 3)[order].reshape(x.shape)

    before, after = image_metrics(image, truth), image_metrics(shuffle(image), shuffle(truth))
    assert after['psnr'] == pytest.approx(before['psnr'], rel=1e-12)
    assert after['l1'] == pytest.approx(before['l1'], rel=1e-12)
    assert abs(after['ssim'] - before['ssim']) > 1e-3


def test_image_metrics_keys():
    image = smooth_image(12, 12)
    assert set(image_metrics(image, image)) == {'psnr', 'ssim', 'l1'}


def test_homography_normalizes_and_validates():
    h = Homography(2.0 * np.eye(3))
    np.testing.assert_array_equal(h.matrix, np.eye(3))
    with pytest.raises(DataError, match='bottom-right'):
        Homography(np.diag([1.0, 1.0, 0.0]))
    with pytest.raises(DataError, match='singular'):
        Homography(np.diag([1.0, 0.0, 1.0]))
    matrix = random_homography(np.random.default_rng(3))
    np.testing.assert_allclose(
        Homography(matrix).inverse().matrix @ Homography(matrix).matrix, np.eye(3), atol=1e-12)


@pytest.mark.parametrize('scale', [1e-5, 1e-3, 1e4])
def test_homography_accepts_strong_scaling(scale):
    h = Homography(np.diag([scale, scale, 1.0]))
    np.testing.assert_allclose(h.inverse().matrix, np.diag([1 / scale, 1 / scale, 1.0]))


def test_homography_rejects_near_singular():
    with pytest.raises(DataError, match='singular'):
        Homography(np.diag([1.0, 1e-14, 1.0]))


def test_dlt_identity():
    src = np.array([[0.0, 0.0], [100.0, 0.0], [100.0, 80.0], [0.0, 80.0]])
    h = dlt_homography(np.stack([src, src], axis=1))
    np.testing.assert_allclose(h.matrix, np.eye(3), atol=1e-9)
    assert h.rms <= 1e-9


def test_dlt_recovers_known_homographies():
    rng = np.random.default_rng(4)
    for _ in range(100):
        matrix = random_homography(rng)
        src = rng.uniform(0, 256, size=(int(rng.integers(4, 12)), 2))
        h = dlt_homography(correspondences_for(matrix, src))
        assert relative_error(h.matrix, matrix) <= 1e-6


def similarity(angle, scale, tx, ty):
    c, s = scale * np.cos(angle), scale * np.sin(angle)
    return np.array([[c, -s, tx], [s, c, ty], [0.0, 0.0, 1.0]])


def test_dlt_invariant_to_similarities():
    rng = np.random.default_rng(5)
    matrix = random_homography(rng)
    src = rng.uniform(0, 256, size=(20, 2))
    pairs = correspondences_for(matrix, src)
    pairs[:, 1] += rng.normal(0, 0.5, size=(20, 2))

    s_src, s_dst = similarity(0.4, 1.7, 30.0, -12.0), similarity(-1.1, 0.6, -5.0, 44.0)
    moved = np.stack([
        Homography(s_src).apply(pairs[:, 0]), Homography(s_dst).apply(pairs[:, 1])], axis=1)

    expected = s_dst @ dlt_homography(pairs).matrix @ np.linalg.inv(s_src)
    assert relative_error(dlt_homography(moved).matrix, expected) <= 1e-6


@pytest.mark.parametrize('src', [
    [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 5.0]],
    [[5.0, 5.0], [0.0, 3.0], [0.0, 6.0], [0.0, 9.0]],
])
def test_dlt_rejects_collinear(src):
    src = np.array(src)
    dst = src + [3.0, -1.0]
    with pytest.raises(DataError, match='collinear'):
        dlt_homography(np.stack([src, dst], axis=1))


def test_dlt_rejects_too_few_and_malformed():
    with pytest.raises(DataError, match='at least 4'):
        dlt_homography([[[0, 0], [0, 0]], [[1, 0], [1, 0]], [[0, 1], [0, 1]]])
    with pytest.raises(DataError):
        dlt_homography(np.zeros((4, 3)))


def test_warp_identity_is_exact():
    image = smooth_image(20, 24)
    np.testing.assert_array_equal(warp_homography(image, Homography.identity()), image)


def test_warp_integer_translation():
    image = smooth_image(30, 40)
    shift = np.array([[1.0, 0.0, 3.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]])
    warped = warp_homography(image, shift)
    np.testing.assert_allclose(warped[2:, 3:], image[:-2, :-3], atol=1e-12)


def test_warp_round_trip():
    image = smooth_image(128, 128)
    matrix = similarity(0.08, 1.05, -4.0, 3.0)
    matrix[2, :2] = [1e-4, -5e-5]
    h = Homography(matrix)
    back = warp_homography(warp_homography(image, h), h.inverse())
    assert np.abs(back - image)[40:88, 40:88].max() <= 2e-2


def test_warp_rejects_singular():
    with pytest.raises(DataError):
        warp_homography(smooth_image(8, 8), np.zeros((3, 3)))


def identity_pairs(width=64, height=64):
    corners = np.array([[0.0, 0.0], [width - 1.0, 0.0], [width - 1.0, height - 1.0],
                        [0.0, height - 1.0], [width / 2.0, height / 3.0]])
    return np.stack([corners, corners], axis=1).tolist()


def test_select_exact_frame():
    lit = smooth_image()
    others = [smooth_image(phase=1.0), smooth_image(phase=2.0)]
    index, errors = select_counterpart(lit, [others[0], lit, others[1]], [identity_pairs()] * 3)
    assert index == 1
    assert errors[1] <= 1e-6


def test_select_prefers_noise_free_frame():
    lit = smooth_image()
    noisy = np.clip(lit + np.random.default_rng(6).normal(0, 0.1, lit.shape), 0, 1)
    index, _ = select_counterpart(lit, [noisy, lit], [identity_pairs()] * 2)
    assert index == 1


def test_select_ties_to_lowest_index():
    lit = smooth_image()
    index, _ = select_counterpart(lit, [lit, lit.copy()], [identity_pairs()] * 2)
    assert index == 0


def test_select_matches_exhaustive_search():
    base = smooth_image()
    candidates = [np.roll(base, k, axis=1) for k in range(5)]
    for shift in range(5):
        shadow = np.roll(base, shift, axis=1)
        index, errors = select_counterpart(shadow, candidates, [identity_pairs()] * 5)
        oracle = [np.mean(np.abs(shadow - lit)) for lit in candidates]
        assert index == int(np.argmin(oracle)) == shift
        np.testing.assert_allclose(errors, oracle, atol=1e-6)


def test_select_errors():
    with pytest.raises(DataError, match='no candidate'):
        select_counterpart(smooth_image(), [], [])
    with pytest.raises(DataError):
        select_counterpart(smooth_image(), [smooth_image()], [])


def test_warp_overlap():
    np.testing.assert_array_equal(warp_overlap(Homography.identity(), 6, 8), True)
    shift = np.array([[1.0, 0.0, 3.0], [0.0, 1.0, -2.0], [0.0, 0.0, 1.0]])
    overlap = warp_overlap(shift, 10, 12)
    expected = np.zeros((10, 12), dtype=bool)
    expected[:8, 3:] = True
    np.testing.assert_array_equal(overlap, expected)


def shifted_pairs(dx, width=64, height=64):
    src = np.array(identity_pairs(width, height))[:, 0]
    return np.stack([src, src + [dx, 0.0]], axis=1).tolist()


def test_select_ignores_border_outside_overlap():
    #  candidate 0 is the shadow frame moved 20 px right, with unrelated dark
    #  content where the shadow frame has no pixels; candidate 1 covers the
    #  whole frame but is slightly brighter everywhere
    scene = smooth_image(64, 84)
    scene[:, :20] = 0.0
    shadow = scene[:, 20:]
    moved, brighter = scene[:, :64], shadow + 0.05

    index, errors = select_counterpart(
        shadow, [moved, brighter], [shifted_pairs(20.0), identity_pairs()])
    assert index == 0
    assert errors[0] <= 1e-6
    assert errors[1] == pytest.approx(0.05, abs=1e-6)

    #  the whole-frame error would have picked the brighter frame
    whole = l1_pixel(warp_homography(shadow, dlt_homography(shifted_pairs(20.0))), moved)
    assert whole > errors[1]


def test_select_without_overlap_scores_inf():
    image = smooth_image()
    index, errors = select_counterpart(
        image, [image, image], [shifted_pairs(200.0), identity_pairs()])
    assert index == 1
    assert errors[0] == np.inf

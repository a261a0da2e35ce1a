import numpy as np
import pytest

from oracles import fsim_direct, log_gabor_transfer, scharr_direct
from pcstruct.fixtures import textured
from pcstruct.imgcore import ColorImage, GrayImage, to_luminance
from pcstruct.spectral import FilterBankConfig, build_bank
from pcstruct.structconstraint import (
    DegenerateInputError, fsim_score, gradient_magnitude, pc_loss, pc_similarity, similarity_maps,
)


@pytest.fixture(scope="module")
def bank64():
    return build_bank(FilterBankConfig(), 64, 64)


def test_gradient_constant_is_zero():
    assert not gradient_magnitude(GrayImage(np.full((8, 8), 9.0))).magnitude.any()


def test_gradient_unit_ramp():
    # each side of the normalized Scharr kernel sums to 1, central difference spans 2 px
    ramp = np.tile(np.arange(16.0), (10, 1))
    g = gradient_magnitude(GrayImage(ramp, 255)).magnitude
    assert np.allclose(g[1:-1, 1:-1], 2.0, atol=1e-12)
    # replicated border halves the span
    assert np.allclose(g[:, 0], 1.0)


def test_gradient_matches_loop(rng):
    img = rng.random((9, 12)) * 255
    assert np.allclose(gradient_magnitude(GrayImage(img, 255)).magnitude, scharr_direct(img), atol=1e-10)


def test_gradient_rotation(rng):
    img = rng.random((12, 12))
    g = gradient_magnitude(GrayImage(img)).magnitude
    g_rot = gradient_magnitude(GrayImage(np.rot90(img))).magnitude
    assert np.abs(g_rot[1:-1, 1:-1] - np.rot90(g)[1:-1, 1:-1]).max() < 1e-10


def test_similarity_spot_values():
    m = similarity_maps(np.array([[1.0, 0.3]]), np.array([[0.0, 0.3]]),
                        np.array([[10.0, 5.0]]), np.array([[0.0, 5.0]]))
    assert m.s_pc[0, 0] == pytest.approx(0.85 / 1.85, abs=1e-12)
    assert m.s_g[0, 0] == pytest.approx(160 / 260, abs=1e-12)
    assert m.s_pc[0, 1] == 1.0 and m.s_g[0, 1] == 1.0
    assert m.pc_m.tolist() == [[1.0, 0.3]]


def test_similarity_swap_and_bounds(rng):
    a, b = rng.random((8, 8)), rng.random((8, 8))
    g, h = rng.random((8, 8)) * 300, rng.random((8, 8)) * 300
    m1 = similarity_maps(a, b, g, h)
    m2 = similarity_maps(b, a, h, g)
    assert np.array_equal(m1.s_pc, m2.s_pc) and np.array_equal(m1.s_g, m2.s_g)
    for s in (m1.s_pc, m1.s_g):
        assert s.min() > 0 and s.max() <= 1
    assert np.array_equal(m1.pc_m, np.maximum(a, b))


def test_similarity_shape_mismatch():
    with pytest.raises(ValueError):
        similarity_maps(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)), np.zeros((2, 2)))


def test_identical_images(bank64):
    img = textured(64, seed=1)
    assert pc_loss(img, img, bank64) < 1e-9
    assert fsim_score(img, img, bank64) == pytest.approx(1.0, abs=1e-9)


def test_symmetry_and_complement(bank64):
    a, b = textured(64, seed=1), textured(64, seed=2)
    res_ab, _ = pc_similarity(a, b, bank64)
    res_ba, _ = pc_similarity(b, a, bank64)
    assert abs(res_ab.loss - res_ba.loss) < 1e-12
    assert res_ab.loss + res_ab.fsim == pytest.approx(1.0, abs=1e-12)
    assert 0 <= res_ab.loss < 1


def test_matches_brute_force(rng):
    bank = build_bank(FilterBankConfig(), 32, 32)
    transfer = log_gabor_transfer(32, 32)
    for _ in range(2):
        a, b = rng.random((32, 32)), rng.random((32, 32))
        expected = fsim_direct(a, b, transfer)
        assert abs(fsim_score(GrayImage(a), GrayImage(b), bank) - expected) < 1e-10


def test_translation_worse_than_noise(bank64):
    img = textured(64, seed=3)
    shifted = GrayImage(np.roll(img.data, 5, axis=1))
    noisy = GrayImage(img.data + np.random.default_rng(0).normal(0, 1 / 255, img.shape))
    assert pc_loss(img, shifted, bank64) > pc_loss(img, noisy, bank64)


def test_monotone_in_noise(bank64):
    img = textured(64, seed=5)
    rng = np.random.default_rng(21)
    unit = rng.standard_normal(img.shape)
    losses = [pc_loss(img, GrayImage(img.data + unit * s / 255), bank64) for s in (1, 4, 16)]
    assert losses[0] < losses[1] < losses[2]


def test_degenerate_pair(bank64):
    flat = GrayImage(np.full((64, 64), 0.5))
    with pytest.raises(DegenerateInputError):
        pc_loss(flat, flat, bank64)


def test_size_mismatch():
    with pytest.raises(ValueError):
        pc_loss(GrayImage(np.zeros((16, 16))), GrayImage(np.zeros((16, 17))))


def test_color_inputs_use_luminance():
    gray = textured(32, seed=8)
    rgb = ColorImage(np.repeat(gray.data[..., None] * 255, 3, axis=2), 255)
    y = to_luminance(rgb)
    bank = build_bank(FilterBankConfig(), 32, 32)
    assert pc_loss(rgb, gray, bank) == pytest.approx(pc_loss(y, gray, bank), abs=1e-15)
    assert pc_loss(rgb, gray, bank) < 1e-9


def test_default_bank_built_from_image_size():
    a, b = textured(32, seed=1), textured(32, seed=2)
    bank = build_bank(FilterBankConfig(), 32, 32)
    assert pc_loss(a, b) == pc_loss(a, b, bank)

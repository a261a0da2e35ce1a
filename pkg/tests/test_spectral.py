import numpy as np
import pytest

from oracles import dft2_direct
from pcstruct.imgcore import GrayImage
from pcstruct.spectral import (
    FilterBankConfig, apply_bank, build_bank, dft2, filter_responses, idft2, radial_log_gabor,
)


def test_dft_constant():
    X = dft2(np.full((4, 6), 2.5))
    assert X[0, 0] == pytest.approx(2.5 * 24)
    rest = X.copy()
    rest[0, 0] = 0
    assert np.abs(rest).max() < 1e-12


def test_dft_inverse_and_parseval(rng):
    x = rng.standard_normal((32, 32))
    X = dft2(x)
    assert np.allclose(idft2(X).real, x, rtol=1e-10, atol=1e-12)
    lhs = np.sum(x ** 2)
    rhs = np.sum(np.abs(X) ** 2) / x.size
    assert abs(lhs - rhs) / lhs < 1e-8


def test_dft_matches_direct_sum(rng):
    x = rng.standard_normal((6, 5))
    assert np.allclose(dft2(x), dft2_direct(x), atol=1e-10)


def test_config_validation():
    for bad in [dict(n_scales=0), dict(n_orientations=0), dict(min_wavelength=1.5),
                dict(scale_multiplier=1.0), dict(sigma_on_f=1.0), dict(sigma_on_f=0.0)]:
        with pytest.raises(ValueError):
            FilterBankConfig(**bad)


def test_config_round_trip():
    cfg = FilterBankConfig(n_scales=3, n_orientations=6, min_wavelength=3, scale_multiplier=2.1)
    from pcstruct.kvconfig import format_kv
    assert FilterBankConfig.from_text(format_kv(cfg.to_kv())) == cfg
    text = "scales=5\norientations=2\n# note\nmult = 3\n"
    assert FilterBankConfig.from_text(text) == FilterBankConfig(n_scales=5, n_orientations=2, scale_multiplier=3)


def test_radial_peak_at_centre_frequency():
    cfg = FilterBankConfig()
    # 96 px grid: f0 = 1/6 = 16 bins on the horizontal axis
    radial = radial_log_gabor(cfg, 96, 96)
    assert radial[0, 0, 16] == pytest.approx(1.0, abs=1e-15)
    assert radial[1, 0, 8] == pytest.approx(1.0, abs=1e-15)


def test_bank_shape_and_range():
    bank = build_bank(FilterBankConfig(), 64, 64)
    assert bank.transfer.shape == (4, 4, 64, 64)
    assert bank.transfer.max() <= 1.0
    assert bank.transfer.min() >= 0.0
    assert np.all(bank.transfer[:, :, 0, 0] == 0.0)
    assert np.isrealobj(bank.transfer)


def test_bank_rejects_small_grid():
    with pytest.raises(ValueError):
        build_bank(FilterBankConfig(), 3, 8)


def test_dimension_mismatch():
    bank = build_bank(FilterBankConfig(), 16, 16)
    with pytest.raises(ValueError):
        apply_bank(GrayImage(np.zeros((16, 17))), bank)


def test_constant_image_gives_zero_response():
    bank = build_bank(FilterBankConfig(), 32, 32)
    for r in apply_bank(GrayImage(np.full((32, 32), 200.0), 255), bank):
        assert np.abs(r.even).max() < 1e-9 * 255
        assert np.abs(r.odd).max() < 1e-9 * 255


def test_scaling_and_linearity(rng):
    bank = build_bank(FilterBankConfig(), 32, 32)
    a, b = rng.random((32, 32)), rng.random((32, 32))
    ra = filter_responses(GrayImage(a), bank)
    rb = filter_responses(GrayImage(b), bank)
    r3 = filter_responses(GrayImage(3 * a), bank)
    assert np.allclose(r3, 3 * ra, rtol=0, atol=1e-12 * np.abs(ra).max())
    mix = filter_responses(GrayImage(2 * a - 0.5 * b), bank)
    expected = 2 * ra - 0.5 * rb
    assert np.abs(mix - expected).max() <= 1e-8 * np.abs(expected).max()


def test_shift_covariance(rng):
    bank = build_bank(FilterBankConfig(), 32, 32)
    a = rng.random((32, 32))
    shifted = np.roll(a, (5, -3), axis=(0, 1))
    r = filter_responses(GrayImage(a), bank)
    rs = filter_responses(GrayImage(shifted), bank)
    assert np.abs(np.roll(r, (5, -3), axis=(2, 3)) - rs).max() < 1e-8


def test_impulse_response_is_spatial_kernel():
    bank = build_bank(FilterBankConfig(), 32, 32)
    impulse = np.zeros((32, 32))
    impulse[16, 16] = 1.0
    for resp in apply_bank(GrayImage(impulse), bank):
        kernel = np.fft.ifft2(bank.transfer[resp.scale, resp.orientation])
        expected = np.roll(kernel, (16, 16), axis=(0, 1))
        assert np.abs(resp.even - expected.real).max() < 1e-12
        assert np.abs(resp.odd - expected.imag).max() < 1e-12


def test_amplitude_nonnegative(rng):
    bank = build_bank(FilterBankConfig(), 16, 16)
    for r in apply_bank(GrayImage(rng.random((16, 16))), bank):
        assert r.even.shape == (16, 16)
        assert r.amplitude.min() >= 0


def test_odd_sized_grid_runs(rng):
    bank = build_bank(FilterBankConfig(), 15, 9)
    out = filter_responses(GrayImage(rng.random((9, 15))), bank)
    assert out.shape == (4, 4, 9, 15)


def test_thread_count_does_not_change_bits(rng, monkeypatch):
    bank = build_bank(FilterBankConfig(), 32, 32)
    img = GrayImage(rng.random((32, 32)))
    one = filter_responses(img, bank, workers=1)
    monkeypatch.setenv("PCSTRUCT_THREADS", "4")
    four = filter_responses(img, bank)
    assert np.array_equal(one, four)

"""DFT helpers and the log-Gabor quadrature filter bank.

Filtering is done by pointwise multiplication in the frequency domain, i.e.
circular convolution. Every filter is real and one-sided in orientation, so
the inverse transform of a filtered spectrum is an analytic-like signal whose
real part is the even-symmetric response and whose imaginary part is the
odd-symmetric response.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .imgcore import GrayImage
from .kvconfig import parse_kv

THREADS_ENV = "PCSTRUCT_THREADS"


def dft2(grid: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2-D DFT."""
    return np.fft.fft2(np.asarray(grid, dtype=np.float64))


def idft2(spectrum: np.ndarray) -> np.ndarray:
    """Inverse 2-D DFT carrying the 1/(W*H) factor."""
    return np.fft.ifft2(spectrum)


def frequency_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Cycles-per-pixel coordinates in unshifted DFT order.

    For even sizes the Nyquist bin sits on the negative side (-0.5).
    """
    fx = np.fft.fftfreq(width)[np.newaxis, :]
    fy = np.fft.fftfreq(height)[:, np.newaxis]
    return np.broadcast_to(fx, (height, width)), np.broadcast_to(fy, (height, width))


# keys used in the text config file, mapped to dataclass fields
_CONFIG_KEYS = {
    "scales": "n_scales",
    "orientations": "n_orientations",
    "min_wavelength": "min_wavelength",
    "mult": "scale_multiplier",
    "sigma_on_f": "sigma_on_f",
    "d_theta_sigma": "d_theta_sigma",
}


@dataclass(frozen=True)
class FilterBankConfig:
    """Log-Gabor bank geometry.

    ``d_theta_sigma`` is the ratio between the angular spacing of the
    orientations and the standard deviation of the angular Gaussian.
    """

    n_scales: int = 4
    n_orientations: int = 4
    min_wavelength: float = 6.0
    scale_multiplier: float = 2.0
    sigma_on_f: float = 0.55
    d_theta_sigma: float = 1.2

    def __post_init__(self):
        if int(self.n_scales) != self.n_scales or self.n_scales < 1:
            raise ValueError(f"n_scales must be a positive integer, got {self.n_scales}")
        if int(self.n_orientations) != self.n_orientations or self.n_orientations < 1:
            raise ValueError(f"n_orientations must be a positive integer, got {self.n_orientations}")
        if not self.min_wavelength >= 2:
            raise ValueError(f"min_wavelength must be >= 2 (Nyquist), got {self.min_wavelength}")
        if not self.scale_multiplier > 1:
            raise ValueError(f"scale_multiplier must be > 1, got {self.scale_multiplier}")
        if not 0 < self.sigma_on_f < 1:
            raise ValueError(f"sigma_on_f must lie in (0, 1), got {self.sigma_on_f}")
        if not self.d_theta_sigma > 0:
            raise ValueError(f"d_theta_sigma must be positive, got {self.d_theta_sigma}")
        object.__setattr__(self, "n_scales", int(self.n_scales))
        object.__setattr__(self, "n_orientations", int(self.n_orientations))
        for name in ("min_wavelength", "scale_multiplier", "sigma_on_f", "d_theta_sigma"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def wavelength(self, scale: int) -> float:
        return self.min_wavelength * self.scale_multiplier ** scale

    def to_kv(self) -> dict:
        fields = asdict(self)
        return {key: fields[attr] for key, attr in _CONFIG_KEYS.items()}

    @classmethod
    def from_kv(cls, items: dict) -> "FilterBankConfig":
        kwargs = {}
        for key, attr in _CONFIG_KEYS.items():
            if key in items:
                conv = int if attr.startswith("n_") else float
                kwargs[attr] = conv(items[key])
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "FilterBankConfig":
        return cls.from_kv(parse_kv(text))


def radial_log_gabor(config: FilterBankConfig, width: int, height: int) -> np.ndarray:
    """Radial transfer per scale, shape ``(n_scales, height, width)``, zero at DC."""
    fx, fy = frequency_grid(width, height)
    radius = np.hypot(fx, fy)
    radius[0, 0] = 1.0
    log_sigma_sq = 2.0 * math.log(config.sigma_on_f) ** 2
    out = np.empty((config.n_scales, height, width))
    for s in range(config.n_scales):
        f0 = 1.0 / config.wavelength(s)
        out[s] = np.exp(-np.log(radius / f0) ** 2 / log_sigma_sq)
        out[s, 0, 0] = 0.0
    return out


def angular_spread(config: FilterBankConfig, width: int, height: int) -> np.ndarray:
    """Angular Gaussian per orientation, shape ``(n_orientations, height, width)``."""
    fx, fy = frequency_grid(width, height)
    # -fy so angles increase anticlockwise with rows running downward
    theta = np.arctan2(-fy, fx)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    sigma = (math.pi / config.n_orientations) / config.d_theta_sigma
    out = np.empty((config.n_orientations, height, width))
    for o in range(config.n_orientations):
        angle = o * math.pi / config.n_orientations
        ds = sin_t * math.cos(angle) - cos_t * math.sin(angle)
        dc = cos_t * math.cos(angle) + sin_t * math.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        out[o] = np.exp(-dtheta ** 2 / (2.0 * sigma ** 2))
    return out


@dataclass(frozen=True, eq=False)
class FilterBank:
    config: FilterBankConfig
    width: int
    height: int
    transfer: np.ndarray  # (n_scales, n_orientations, height, width)

    @property
    def n_scales(self) -> int:
        return self.config.n_scales

    @property
    def n_orientations(self) -> int:
        return self.config.n_orientations


def build_bank(config: FilterBankConfig, width: int, height: int) -> FilterBank:
    if width < 4 or height < 4:
        raise ValueError(f"filter bank grid must be at least 4x4, got {width}x{height}")
    radial = radial_log_gabor(config, width, height)
    spread = angular_spread(config, width, height)
    transfer = radial[:, np.newaxis] * spread[np.newaxis, :]
    transfer[:, :, 0, 0] = 0.0
    np.clip(transfer, 0.0, 1.0, out=transfer)
    transfer.setflags(write=False)
    return FilterBank(config, width, height, transfer)


@dataclass(frozen=True, eq=False)
class QuadratureResponse:
    even: np.ndarray
    odd: np.ndarray
    scale: int
    orientation: int

    @property
    def amplitude(self) -> np.ndarray:
        return np.hypot(self.even, self.odd)


def default_workers() -> int:
    value = os.environ.get(THREADS_ENV, "").strip()
    if not value:
        return 1
    n = int(value)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1, got {value!r}")
    return n


def filter_responses(img: GrayImage, bank: FilterBank, workers: int | None = None) -> np.ndarray:
    """Complex responses, shape ``(n_scales, n_orientations, height, width)``.

    Each filter is applied independently, so the result does not depend on
    ``workers`` (defaults to ``$PCSTRUCT_THREADS`` or 1).
    """
    if img.shape != (bank.height, bank.width):
        raise ValueError(
            f"image is {img.width}x{img.height} but bank grid is {bank.width}x{bank.height}"
        )
    data = img.data - img.data.mean()
    spectrum = dft2(data)
    n_s, n_o = bank.n_scales, bank.n_orientations
    out = np.empty((n_s, n_o, bank.height, bank.width), dtype=np.complex128)

    def run(index):
        s, o = divmod(index, n_o)
        out[s, o] = idft2(spectrum * bank.transfer[s, o])

    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(n_s * n_o)))
    else:
        for i in range(n_s * n_o):
            run(i)
    return out


def apply_bank(img: GrayImage, bank: FilterBank, workers: int | None = None) -> list[QuadratureResponse]:
    """Even/odd quadrature responses for every (scale, orientation) filter."""
    eo = filter_responses(img, bank, workers)
    return [
        QuadratureResponse(eo[s, o].real.copy(), eo[s, o].imag.copy(), s, o)
        for s in range(bank.n_scales)
        for o in range(bank.n_orientations)
    ]

"""Phase congruency from log-Gabor quadrature responses.

    PC(x) = sum_j E_j(x) / (eps + sum_n sum_j A_nj(x))

where ``E_j`` is the local energy for orientation ``j`` (magnitude of the
response vector summed over scales) and ``A_nj`` the amplitude of the
response at scale ``n``. Images are rescaled to [0, 1] first so that ``eps``
has a fixed meaning regardless of the source bit depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .imgcore import GrayImage, Image, as_gray
from .spectral import FilterBank, QuadratureResponse, filter_responses

DEFAULT_EPSILON = 1e-4
NOISE_K = 2.0


@dataclass(frozen=True, eq=False)
class PCResult:
    pc: np.ndarray
    orientation_energy: np.ndarray  # (n_orientations, H, W)
    total_amplitude: np.ndarray
    epsilon: float
    noise_threshold: np.ndarray | None = None  # per orientation, robust variant only

    def consistency_error(self) -> float:
        """max |pc * (eps + sum A) - sum E|; zero up to round-off by construction."""
        lhs = self.pc * (self.epsilon + self.total_amplitude)
        return float(np.max(np.abs(lhs - self.orientation_energy.sum(axis=0))))


def local_energy(responses: Sequence[QuadratureResponse]) -> np.ndarray:
    """Magnitude of the even/odd response vector summed across scales."""
    if len(responses) == 0:
        raise ValueError("local_energy needs at least one scale of responses")
    sum_even = np.sum([r.even for r in responses], axis=0)
    sum_odd = np.sum([r.odd for r in responses], axis=0)
    return np.hypot(sum_even, sum_odd)


def _unit_scaled(img: Image) -> GrayImage:
    gray = as_gray(img)
    return GrayImage(gray.data / gray.max_value, 1.0)


def _check_epsilon(epsilon: float) -> None:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")


def _energy_and_amplitude(img: Image, bank: FilterBank, workers):
    eo = filter_responses(_unit_scaled(img), bank, workers)
    amplitude = np.abs(eo)  # (S, O, H, W)
    summed = eo.sum(axis=0)  # over scales -> (O, H, W)
    energy = np.abs(summed)
    return energy, amplitude


def compute_pc(img: Image, bank: FilterBank, epsilon: float = DEFAULT_EPSILON,
               workers: int | None = None) -> PCResult:
    _check_epsilon(epsilon)
    energy, amplitude = _energy_and_amplitude(img, bank, workers)
    total = amplitude.sum(axis=(0, 1))
    pc = energy.sum(axis=0) / (epsilon + total)
    return PCResult(pc, energy, total, float(epsilon))


def rayleigh_noise_threshold(smallest_scale_amplitude: np.ndarray, n_scales: int,
                             scale_multiplier: float, k: float = NOISE_K) -> float:
    """Noise-energy threshold from the smallest-scale amplitude.

    The median amplitude of the finest filter is taken as a Rayleigh
    estimate of the noise response; it is propagated to the other scales by
    the 1/mult amplitude fall-off of white noise, and the threshold is the
    mean noise energy plus ``k`` standard deviations.
    """
    tau = np.median(smallest_scale_amplitude) / math.sqrt(math.log(4.0))
    inv = 1.0 / scale_multiplier
    total_tau = tau * (1.0 - inv ** n_scales) / (1.0 - inv)
    mean = total_tau * math.sqrt(math.pi / 2.0)
    sigma = total_tau * math.sqrt((4.0 - math.pi) / 2.0)
    return float(mean + k * sigma)


def compute_pc_noise_compensated(img: Image, bank: FilterBank, epsilon: float = DEFAULT_EPSILON,
                                 noise_method: str | float = "median",
                                 workers: int | None = None) -> PCResult:
    """Like :func:`compute_pc` but with a noise floor subtracted from each
    orientation's energy (clamped at zero) before the division.

    ``noise_method`` is ``"median"`` for the per-orientation Rayleigh estimate
    or a non-negative number used directly as the threshold.
    """
    _check_epsilon(epsilon)
    energy, amplitude = _energy_and_amplitude(img, bank, workers)
    cfg = bank.config
    if noise_method == "median":
        thresholds = np.array([
            rayleigh_noise_threshold(amplitude[0, o], cfg.n_scales, cfg.scale_multiplier)
            for o in range(cfg.n_orientations)
        ])
    else:
        value = float(noise_method)
        if value < 0:
            raise ValueError(f"fixed noise threshold must be >= 0, got {noise_method}")
        thresholds = np.full(cfg.n_orientations, value)
    energy = np.maximum(energy - thresholds[:, np.newaxis, np.newaxis], 0.0)
    total = amplitude.sum(axis=(0, 1))
    pc = energy.sum(axis=0) / (epsilon + total)
    return PCResult(pc, energy, total, float(epsilon), thresholds)

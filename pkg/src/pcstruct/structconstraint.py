"""Phase-congruency/gradient similarity maps and the phase congruency loss.

    S_PC = (2 pc_g pc_r + T1) / (pc_g^2 + pc_r^2 + T1)
    S_G  = (2 g_g g_r + T2)   / (g_g^2 + g_r^2 + T2)
    L_PC = 1 - sum(S_PC S_G PC_m) / sum(PC_m),   PC_m = max(pc_g, pc_r)

``1 - L_PC`` is the luminance-only FSIM index. T2 = 160 assumes gradients
of images on a [0, 255] scale, so the loss always evaluates gradients there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imgcore import GrayImage, Image, as_gray
from .phasecongruency import DEFAULT_EPSILON, compute_pc
from .spectral import FilterBank, FilterBankConfig, build_bank

T1 = 0.85
T2 = 160.0

# Scharr derivative, normalized so the weights on each side sum to 1
SCHARR_X = np.array([[-3.0, 0.0, 3.0],
                     [-10.0, 0.0, 10.0],
                     [-3.0, 0.0, 3.0]]) / 16.0
SCHARR_Y = SCHARR_X.T


class DegenerateInputError(ValueError):
    """Both inputs carry no phase congruency (sum of PC_m is zero)."""


@dataclass(frozen=True, eq=False)
class GradientMap:
    magnitude: np.ndarray
    operator_name: str = "scharr"


@dataclass(frozen=True, eq=False)
class SimilarityMaps:
    s_pc: np.ndarray
    s_g: np.ndarray
    pc_m: np.ndarray
    t1: float = T1
    t2: float = T2


@dataclass(frozen=True)
class PCLossResult:
    loss: float
    fsim: float
    mean_s_pc: float
    mean_s_g: float

    def as_row(self) -> dict:
        return {"loss": self.loss, "fsim": self.fsim,
                "mean_s_pc": self.mean_s_pc, "mean_s_g": self.mean_s_g}


def gradient_magnitude(img: Image) -> GradientMap:
    """Scharr gradient magnitude with replicated borders, on the image's own scale."""
    data = as_gray(img).data
    gx = ndimage.correlate(data, SCHARR_X, mode="nearest")
    gy = ndimage.correlate(data, SCHARR_Y, mode="nearest")
    return GradientMap(np.hypot(gx, gy), "scharr")


def _ratio(a, b, c):
    return (2.0 * a * b + c) / (a * a + b * b + c)


def similarity_maps(pc_gen, pc_real, g_gen, g_real, t1: float = T1, t2: float = T2) -> SimilarityMaps:
    grids = [np.asarray(g, dtype=np.float64) for g in (pc_gen, pc_real, g_gen, g_real)]
    if len({g.shape for g in grids}) != 1:
        raise ValueError(f"grid shapes differ: {[g.shape for g in grids]}")
    if not (t1 > 0 and t2 > 0):
        raise ValueError("t1 and t2 must be positive")
    pc_gen, pc_real, g_gen, g_real = grids
    return SimilarityMaps(
        s_pc=_ratio(pc_gen, pc_real, t1),
        s_g=_ratio(g_gen, g_real, t2),
        pc_m=np.maximum(pc_gen, pc_real),
        t1=float(t1),
        t2=float(t2),
    )


def _to_255(img: GrayImage) -> GrayImage:
    return GrayImage(img.data * (255.0 / img.max_value), 255.0)


def pc_similarity(img_gen: Image, img_real: Image, bank: FilterBank | None = None,
                  epsilon: float = DEFAULT_EPSILON, t1: float = T1, t2: float = T2,
                  workers: int | None = None) -> tuple[PCLossResult, SimilarityMaps]:
    """Full loss computation, returning the scalar summary and the maps."""
    gen, real = as_gray(img_gen), as_gray(img_real)
    if gen.shape != real.shape:
        raise ValueError(f"image shapes differ: {gen.shape} vs {real.shape}")
    if bank is None:
        bank = build_bank(FilterBankConfig(), gen.width, gen.height)
    pc_gen = compute_pc(gen, bank, epsilon, workers).pc
    pc_real = compute_pc(real, bank, epsilon, workers).pc
    g_gen = gradient_magnitude(_to_255(gen)).magnitude
    g_real = gradient_magnitude(_to_255(real)).magnitude
    maps = similarity_maps(pc_gen, pc_real, g_gen, g_real, t1, t2)

    weight = maps.pc_m.sum()
    if not weight > 0:
        raise DegenerateInputError("sum of PC_m is zero; both images are featureless")
    fsim = float((maps.s_pc * maps.s_g * maps.pc_m).sum() / weight)
    result = PCLossResult(1.0 - fsim, fsim, float(maps.s_pc.mean()), float(maps.s_g.mean()))
    return result, maps


def pc_loss(img_gen: Image, img_real: Image, bank: FilterBank | None = None,
            epsilon: float = DEFAULT_EPSILON, t1: float = T1, t2: float = T2) -> float:
    """Phase congruency loss between a generated and a real image, in [0, 1)."""
    return pc_similarity(img_gen, img_real, bank, epsilon, t1, t2)[0].loss


def fsim_score(img_gen: Image, img_real: Image, bank: FilterBank | None = None,
               epsilon: float = DEFAULT_EPSILON, t1: float = T1, t2: float = T2) -> float:
    return pc_similarity(img_gen, img_real, bank, epsilon, t1, t2)[0].fsim

"""Image metrics (PSNR, SSIM) and depth error metrics (RMSE, MAE, SqRel)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .depthgeo import DepthMap
from .imgcore import ColorImage, GrayImage, Image, as_gray

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class DepthMetrics:
    rmse: float
    mae: float
    sq_rel: float
    n_valid: int
    scale: float = 1.0  # applied to the prediction when alignment is on

    def as_row(self) -> dict:
        return {"rmse": self.rmse, "mae": self.mae, "sq_rel": self.sq_rel,
                "n_valid": self.n_valid, "scale": self.scale}


@dataclass(frozen=True)
class ImageMetrics:
    psnr: float
    ssim: float

    def as_row(self) -> dict:
        return {"psnr": self.psnr, "ssim": self.ssim}


def _values(d) -> np.ndarray:
    return d.data if isinstance(d, DepthMap) else np.asarray(d, dtype=np.float64)


def align_scale(pred: np.ndarray, gt: np.ndarray) -> float:
    """Least-squares scale s minimizing sum (s*pred - gt)^2."""
    denom = float(np.dot(pred, pred))
    if denom == 0:
        raise ValueError("cannot align an all-zero prediction")
    return float(np.dot(pred, gt)) / denom


def depth_metrics(pred, gt, valid_mask=None, align: bool = False) -> DepthMetrics:
    """Errors over masked pixels, in the units of the depth maps (mm)."""
    p, g = _values(pred), _values(gt)
    if p.shape != g.shape:
        raise ValueError(f"depth shapes differ: {p.shape} vs {g.shape}")
    mask = np.ones(p.shape, dtype=bool) if valid_mask is None else np.asarray(valid_mask, dtype=bool)
    if mask.shape != p.shape:
        raise ValueError(f"mask shape {mask.shape} does not match depth shape {p.shape}")
    if not mask.any():
        raise ValueError("valid mask selects no pixels")
    p, g = p[mask], g[mask]
    if np.any(g <= 0):
        raise ValueError("ground-truth depth must be positive wherever the mask is set")
    scale = 1.0
    if align:
        scale = align_scale(p, g)
        p = p * scale
    err = p - g
    sq = err * err
    return DepthMetrics(
        rmse=float(np.sqrt(sq.mean())),
        mae=float(np.abs(err).mean()),
        sq_rel=float((sq / g).mean()),
        n_valid=int(p.size),
        scale=scale,
    )


def _check_pair(a: Image, b: Image) -> None:
    if type(a) is not type(b):
        raise ValueError("cannot compare a gray image with a color image")
    if a.data.shape != b.data.shape:
        raise ValueError(f"image shapes differ: {a.data.shape} vs {b.data.shape}")
    if a.max_value != b.max_value:
        raise ValueError(f"max_value differs: {a.max_value} vs {b.max_value}")


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    _check_pair(a, b)
    diff = a.data - b.data
    mse = float(np.mean(diff * diff))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(a.max_value ** 2 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-ax ** 2 / (2.0 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim_map(a: GrayImage, b: GrayImage) -> np.ndarray:
    """Local SSIM over every full 11x11 window (no padding)."""
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.max_value != b.max_value:
        raise ValueError(f"max_value differs: {a.max_value} vs {b.max_value}")
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}")
    w = gaussian_window()
    c1 = (SSIM_K1 * a.max_value) ** 2
    c2 = (SSIM_K2 * a.max_value) ** 2

    def local_mean(x):
        return np.einsum("ijkl,kl->ij", sliding_window_view(x, w.shape), w)

    x, y = a.data, b.data
    mu_x, mu_y = local_mean(x), local_mean(y)
    var_x = local_mean(x * x) - mu_x ** 2
    var_y = local_mean(y * y) - mu_y ** 2
    cov = local_mean(x * y) - mu_x * mu_y
    return ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / ((mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2))


def ssim(a: Image, b: Image) -> float:
    """Mean SSIM; color inputs are compared on BT.601 luminance."""
    if isinstance(a, ColorImage) or isinstance(b, ColorImage):
        _check_pair(a, b)
    return float(ssim_map(as_gray(a), as_gray(b)).mean())


def image_metrics(a: Image, b: Image) -> ImageMetrics:
    return ImageMetrics(psnr(a, b), ssim(a, b))

"""Deterministic synthetic images used by the demos, tests and bundled data."""
from __future__ import annotations

from importlib import resources

import numpy as np
from scipy import ndimage

from .imgcore import ColorImage, GrayImage, read_pnm


def step_edge(size: int = 64, column: int = 32, low: float = 20.0, high: float = 220.0) -> GrayImage:
    """Vertical step between ``column - 1`` and ``column`` on an 8-bit scale.

    A linear ramp with the opposite net rise is added so the image is nearly
    continuous across the periodic wrap, leaving the step as the only
    discontinuity seen by circular filtering.
    """
    x = np.arange(size)
    profile = (x >= column) + (column - x) / size
    row = np.rint(low + (high - low) * profile / profile.max())
    return GrayImage(np.tile(row, (size, 1)), 255)


def textured(size: int = 64, seed: int = 0, smoothing: float = 1.5) -> GrayImage:
    """Band-limited random texture on [0, 1], periodic."""
    rng = np.random.default_rng(seed)
    field = ndimage.gaussian_filter(rng.random((size, size)), smoothing, mode="wrap")
    field = (field - field.min()) / (field.max() - field.min())
    return GrayImage(field, 1.0)


def vascular(size: int = 128, seed: int = 7, contrast: float = 6.0, noise: float = 1.0,
             fold: float = 80.0) -> tuple[GrayImage, np.ndarray, np.ndarray]:
    """Low-contrast vessel texture with one high-contrast fold.

    Returns the 8-bit luminance image, a mask of pixels within 1.5 px of a
    vessel centreline and a mask of the structure-free (noise only) band.
    Vessels occupy the top half, the fold runs across the bottom quarter and
    the blank band lies between them. Everything is periodic.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(float)
    img = np.full((size, size), 140.0)
    vessel = np.zeros((size, size), dtype=bool)
    fade = np.clip(np.minimum(yy - 4, size / 2 - 4 - yy) / 6, 0, 1)
    for _ in range(6):
        x0 = rng.uniform(0, size)
        amp = rng.uniform(3, 8)
        period = size / rng.integers(2, 5)
        phase = rng.uniform(0, 2 * np.pi)
        centre = x0 + amp * np.sin(2 * np.pi * yy / period + phase)
        dist = np.abs((xx - centre + size / 2) % size - size / 2)
        img -= contrast * np.exp(-dist ** 2 / (2 * 0.8 ** 2)) * fade
        vessel |= (dist < 1.5) & (fade > 0.5)
    img -= fold * np.exp(-(yy - 7 * size / 8) ** 2 / (2 * 2.0 ** 2))
    blank = (yy >= size / 2 + 8) & (yy < 3 * size / 4)
    img += rng.normal(0, noise, img.shape)
    return GrayImage(np.clip(np.rint(img), 0, 255), 255), vessel, blank


def colonoscopy_like(size: int = 128, seed: int = 7) -> ColorImage:
    """Reddish RGB rendering of :func:`vascular` for Y-channel workflows."""
    lum, _, _ = vascular(size, seed)
    tint = np.array([1.25, 0.8, 0.7])
    rgb = np.clip(np.rint(lum.data[..., np.newaxis] * tint), 0, 255)
    return ColorImage(rgb, 255)


def bundled_path(name: str):
    """Path of a fixture file shipped in ``pcstruct/data``."""
    return resources.files("pcstruct") / "data" / name


def load_bundled(name: str):
    with resources.as_file(bundled_path(name)) as path:
        return read_pnm(path)

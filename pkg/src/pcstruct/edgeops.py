"""Classical edge operators: Roberts, Prewitt, Sobel, Laplacian and Canny.

All kernels are applied by correlation with replicated borders. Kernels are
unnormalized, so a unit step gives Sobel magnitude 4 next to the step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .imgcore import GrayImage, Image, as_gray

OPERATORS = ("roberts", "prewitt", "sobel", "canny", "laplacian")

ROBERTS = (np.array([[1.0, 0.0], [0.0, -1.0]]),
           np.array([[0.0, 1.0], [-1.0, 0.0]]))
PREWITT_X = np.array([[-1.0, 0.0, 1.0]] * 3)
SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
LAPLACIAN_4 = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])

CANNY_SIGMA = 1.4
CANNY_LOW = 0.1
CANNY_HIGH = 0.3


@dataclass(frozen=True, eq=False)
class EdgeMap:
    values: np.ndarray
    operator: str
    params: dict = field(default_factory=dict)

    @property
    def binary(self) -> bool:
        return self.operator == "canny"


def _separable_pair(data, smooth):
    """(gx, gy) for kernels outer(smooth, [-1, 0, 1]) and its transpose.

    Done as two 1-D passes so constant regions give exactly zero.
    """
    diff = [-1.0, 0.0, 1.0]
    gx = ndimage.correlate1d(ndimage.correlate1d(data, smooth, axis=0, mode="nearest"), diff, axis=1, mode="nearest")
    gy = ndimage.correlate1d(ndimage.correlate1d(data, smooth, axis=1, mode="nearest"), diff, axis=0, mode="nearest")
    return gx, gy


def roberts(data: np.ndarray) -> np.ndarray:
    # origin shifted so the 2x2 window covers (y, x)..(y+1, x+1)
    g1 = ndimage.correlate(data, ROBERTS[0], mode="nearest", origin=-1)
    g2 = ndimage.correlate(data, ROBERTS[1], mode="nearest", origin=-1)
    return np.hypot(g1, g2)


def prewitt(data: np.ndarray) -> np.ndarray:
    return np.hypot(*_separable_pair(data, [1.0, 1.0, 1.0]))


def sobel(data: np.ndarray) -> np.ndarray:
    return np.hypot(*_separable_pair(data, [1.0, 2.0, 1.0]))


def laplacian(data: np.ndarray) -> np.ndarray:
    second = [1.0, -2.0, 1.0]
    return np.abs(ndimage.correlate1d(data, second, axis=0, mode="nearest")
                  + ndimage.correlate1d(data, second, axis=1, mode="nearest"))


# sector -> (dy, dx) of the forward neighbour along the gradient
_SECTOR_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def gradient_sector(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Gradient direction quantized to 0/45/90/135 degrees (codes 0..3)."""
    angle = np.mod(np.rad2deg(np.arctan2(gy, gx)), 180.0)
    return (np.floor((angle + 22.5) / 45.0).astype(int)) % 4


def _along_gradient(arr: np.ndarray, sector: np.ndarray, pad_mode: str, **pad_kw):
    """Forward and backward neighbour values along each pixel's gradient sector."""
    padded = np.pad(arr, 1, mode=pad_mode, **pad_kw)
    h, w = arr.shape
    fwd = np.empty_like(arr)
    bwd = np.empty_like(arr)
    for s, (dy, dx) in _SECTOR_OFFSETS.items():
        sel = sector == s
        fwd[sel] = padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w][sel]
        bwd[sel] = padded[1 - dy:1 - dy + h, 1 - dx:1 - dx + w][sel]
    return fwd, bwd


def _non_max_suppression(mag: np.ndarray, sector: np.ndarray) -> np.ndarray:
    """Keep pixels that are maxima along the quantized gradient direction.

    Ties are broken toward the neighbour on the negative side (``>=`` one
    way, ``>`` the other) so that an edge lying exactly between two pixel
    centres keeps a single pixel.
    """
    fwd, bwd = _along_gradient(mag, sector, "edge")
    return (mag >= fwd) & (mag > bwd) & (mag > 0)


def canny(data: np.ndarray, sigma: float = CANNY_SIGMA, low: float = CANNY_LOW,
          high: float = CANNY_HIGH) -> np.ndarray:
    """Binary Canny map; ``low``/``high`` are fractions of the peak gradient."""
    if not 0 <= low < high:
        raise ValueError(f"canny thresholds need 0 <= low < high, got low={low}, high={high}")
    if not sigma >= 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    smooth = ndimage.gaussian_filter(data, sigma, mode="nearest") if sigma > 0 else data
    gx, gy = _separable_pair(smooth, [1.0, 2.0, 1.0])
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak <= 0:
        return np.zeros(data.shape)
    sector = gradient_sector(gx, gy)
    thin = _non_max_suppression(mag, sector)
    weak = thin & (mag >= low * peak)
    strong = thin & (mag >= high * peak)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3)))
    connected = np.zeros(n + 1, dtype=bool)
    connected[np.unique(labels[strong])] = True
    connected[0] = False
    edges = connected[labels]
    # NMS alone can leave a pixel sandwiched between two neighbouring edge
    # curves; drop those so the map is one pixel wide across the gradient.
    # Removing pixels never creates a new sandwich, so one pass suffices.
    fwd, bwd = _along_gradient(edges, sector, "constant", constant_values=False)
    return (edges & ~(fwd & bwd)).astype(np.float64)


def edge_detect(img: Image, operator: str, **params) -> EdgeMap:
    data = as_gray(img).data
    if operator == "roberts":
        values = roberts(data)
    elif operator == "prewitt":
        values = prewitt(data)
    elif operator == "sobel":
        values = sobel(data)
    elif operator == "laplacian":
        values = laplacian(data)
    elif operator == "canny":
        params = {"sigma": CANNY_SIGMA, "low": CANNY_LOW, "high": CANNY_HIGH, **params}
        values = canny(data, **params)
    else:
        raise ValueError(f"unknown edge operator {operator!r}; choose from {OPERATORS}")
    return EdgeMap(values, operator, dict(params))


def to_pgm_image(edges: EdgeMap) -> GrayImage:
    """8-bit rendering: canny as 0/255, magnitudes scaled so the peak is 255."""
    if edges.binary:
        return GrayImage(edges.values * 255.0, 255)
    peak = edges.values.max()
    scale = 255.0 / peak if peak > 0 else 0.0
    return GrayImage(np.rint(edges.values * scale), 255)

"""Depth encodings, surface normals, the normal-consistency loss and
stair-step quantization diagnostics.

Normals are taken in image space: ``n ~ (-dD/dx, -dD/dy, step_scale)``
where the derivatives use central differences inside the grid and one-sided
differences on the border rows/columns (``numpy.gradient`` with
``edge_order=1``). ``step_scale`` is the size of one pixel in depth units.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imgcore import GrayImage, read_pnm, write_pnm

POSITIVE_16BIT = "positive_16bit"
INVERSE_UNIT = "inverse_unit"
METRIC_MM = "metric_mm"
ENCODINGS = (POSITIVE_16BIT, INVERSE_UNIT, METRIC_MM)

DEPTH_CODE_MAX = 65535.0


class EncodingError(ValueError):
    """Operation called on a depth map with the wrong encoding."""


class DepthFormatError(ValueError):
    """Malformed raw depth file."""


@dataclass(frozen=True, eq=False)
class DepthMap:
    data: np.ndarray
    encoding: str = METRIC_MM

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 2 or min(data.shape) < 1:
            raise ValueError(f"DepthMap needs a non-empty 2-D array, got shape {data.shape}")
        if self.encoding not in ENCODINGS:
            raise EncodingError(f"unknown depth encoding {self.encoding!r}")
        if not np.all(np.isfinite(data)):
            raise ValueError("depth values must be finite")
        lo, hi = {POSITIVE_16BIT: (0.0, DEPTH_CODE_MAX), INVERSE_UNIT: (0.0, 1.0),
                  METRIC_MM: (0.0, np.inf)}[self.encoding]
        if data.min() < lo or data.max() > hi:
            raise ValueError(f"depth values outside [{lo}, {hi}] for encoding {self.encoding}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def _require(d: DepthMap, encoding: str) -> None:
    if d.encoding != encoding:
        raise EncodingError(f"expected {encoding} depth, got {d.encoding}")


def invert_depth(d: DepthMap) -> DepthMap:
    """16-bit positive depth -> inverse depth in [0, 1]: 1 - D/65535."""
    _require(d, POSITIVE_16BIT)
    return DepthMap(1.0 - d.data / DEPTH_CODE_MAX, INVERSE_UNIT)


def revert_depth(d: DepthMap) -> DepthMap:
    """Inverse depth -> 16-bit positive depth codes (not rounded)."""
    _require(d, INVERSE_UNIT)
    return DepthMap(np.clip((1.0 - d.data) * DEPTH_CODE_MAX, 0.0, DEPTH_CODE_MAX), POSITIVE_16BIT)


# --- normals ------------------------------------------------------------

def _grid(d) -> np.ndarray:
    arr = d.data if isinstance(d, DepthMap) else np.asarray(d, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"depth grid must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 2 or arr.shape[1] < 2:
        raise ValueError(f"depth grid must be at least 2x2, got {arr.shape}")
    return arr


def _derivatives(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gy, gx = np.gradient(arr, edge_order=1)
    return gx, gy


def _gradient_adjoint(u: np.ndarray, axis: int) -> np.ndarray:
    """Transpose of the ``numpy.gradient`` stencil along ``axis``."""
    u = np.moveaxis(u, axis, -1)
    n = u.shape[-1]
    r = np.zeros_like(u)
    # one-sided ends
    r[..., 1] += u[..., 0]
    r[..., 0] -= u[..., 0]
    r[..., n - 1] += u[..., n - 1]
    r[..., n - 2] -= u[..., n - 1]
    if n > 2:
        half = 0.5 * u[..., 1:n - 1]
        r[..., 2:n] += half
        r[..., 0:n - 2] -= half
    return np.moveaxis(r, -1, axis)


def _raw_normals(arr: np.ndarray, step_scale: float) -> np.ndarray:
    gx, gy = _derivatives(arr)
    return np.stack([-gx, -gy, np.full_like(gx, step_scale)], axis=-1)


@dataclass(frozen=True, eq=False)
class NormalMap:
    vectors: np.ndarray  # (H, W, 3), unit length, +z toward the camera


def normals_from_depth(d, step_scale: float = 1.0) -> NormalMap:
    if not step_scale > 0:
        raise ValueError(f"step_scale must be positive, got {step_scale}")
    raw = _raw_normals(_grid(d), step_scale)
    return NormalMap(raw / np.linalg.norm(raw, axis=-1, keepdims=True))


def _pair(d_sim, d_rec) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(d_sim, DepthMap) and isinstance(d_rec, DepthMap) and d_sim.encoding != d_rec.encoding:
        raise ValueError(f"encoding mismatch: {d_sim.encoding} vs {d_rec.encoding}")
    a, b = _grid(d_sim), _grid(d_rec)
    if a.shape != b.shape:
        raise ValueError(f"depth shapes differ: {a.shape} vs {b.shape}")
    return a, b


def normal_cosine(d_sim, d_rec, step_scale: float = 1.0) -> np.ndarray:
    a, b = _pair(d_sim, d_rec)
    n_sim = normals_from_depth(a, step_scale).vectors
    n_rec = normals_from_depth(b, step_scale).vectors
    return np.sum(n_sim * n_rec, axis=-1)


def normal_loss(d_sim, d_rec, step_scale: float = 1.0) -> float:
    """Mean over pixels of 1 - cos(angle between the two normal fields), in [0, 2]."""
    return float(np.mean(1.0 - normal_cosine(d_sim, d_rec, step_scale)))


def normal_loss_gradient(d_sim, d_rec, step_scale: float = 1.0) -> np.ndarray:
    """Exact derivative of :func:`normal_loss` with respect to every ``d_rec`` value."""
    a, b = _pair(d_sim, d_rec)
    if not step_scale > 0:
        raise ValueError(f"step_scale must be positive, got {step_scale}")
    v = normals_from_depth(a, step_scale).vectors
    u = _raw_normals(b, step_scale)
    norm_u = np.linalg.norm(u, axis=-1, keepdims=True)
    dot = np.sum(u * v, axis=-1, keepdims=True)
    # d cos / d u  for cos = u.v / |u| with |v| = 1
    dcos = v / norm_u - dot * u / norm_u ** 3
    dloss_du = -dcos / b.size
    # u_x = -gx, u_y = -gy
    return -_gradient_adjoint(dloss_du[..., 0], axis=1) - _gradient_adjoint(dloss_du[..., 1], axis=0)


# --- profiles and quantization ------------------------------------------

def bresenham(start: tuple[int, int], end: tuple[int, int]) -> list[tuple[int, int]]:
    """Integer (x, y) points from ``start`` to ``end`` inclusive."""
    x0, y0 = start
    x1, y1 = end
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    points = []
    while True:
        points.append((x0, y0))
        if x0 == x1 and y0 == y1:
            return points
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def extract_profile(d, row: int | None = None, start: tuple[int, int] | None = None,
                    end: tuple[int, int] | None = None) -> np.ndarray:
    """Depth values along a full row or along an (x, y) segment."""
    arr = d.data if isinstance(d, DepthMap) else np.asarray(d, dtype=np.float64)
    h, w = arr.shape
    if row is not None:
        if start is not None or end is not None:
            raise ValueError("give either row or start/end, not both")
        if not 0 <= row < h:
            raise ValueError(f"row {row} outside [0, {h})")
        return arr[row].copy()
    if start is None or end is None:
        raise ValueError("segment profile needs start and end points")
    for x, y in (start, end):
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"point ({x}, {y}) outside {w}x{h} map")
    pts = bresenham(tuple(map(int, start)), tuple(map(int, end)))
    xs, ys = zip(*pts)
    return arr[list(ys), list(xs)]


@dataclass(frozen=True)
class QuantizationStats:
    distinct_levels: int
    mean_plateau_run: float
    max_step: float

    def as_row(self) -> dict:
        return {"distinct_levels": self.distinct_levels,
                "mean_plateau_run": self.mean_plateau_run,
                "max_step": self.max_step}


def quantization_stats(d) -> QuantizationStats:
    """Level count, mean horizontal run of equal values, and largest jump
    between 4-adjacent pixels."""
    arr = d.data if isinstance(d, DepthMap) else np.asarray(d, dtype=np.float64)
    h, w = arr.shape
    breaks = np.count_nonzero(np.diff(arr, axis=1) != 0)
    n_runs = h + breaks
    steps = [0.0]
    if w > 1:
        steps.append(float(np.abs(np.diff(arr, axis=1)).max()))
    if h > 1:
        steps.append(float(np.abs(np.diff(arr, axis=0)).max()))
    return QuantizationStats(int(np.unique(arr).size), h * w / n_runs, max(steps))


# --- files --------------------------------------------------------------

_RAW_MAGIC = {POSITIVE_16BIT: b"PCSDP16B", INVERSE_UNIT: b"PCSDINVU", METRIC_MM: b"PCSDMMTR"}
_RAW_ENCODING = {v: k for k, v in _RAW_MAGIC.items()}
_RAW_HEADER = struct.Struct("<8sII")


def write_depth_raw(d: DepthMap, path) -> None:
    """16-byte header (8-byte magic, uint32 width, uint32 height, little-endian)
    followed by row-major little-endian float32 samples."""
    header = _RAW_HEADER.pack(_RAW_MAGIC[d.encoding], d.width, d.height)
    with open(path, "wb") as fh:
        fh.write(header + d.data.astype("<f4").tobytes())


def read_depth_raw(path) -> DepthMap:
    buf = Path(path).read_bytes()
    if len(buf) < _RAW_HEADER.size:
        raise DepthFormatError(f"{path}: truncated depth header")
    magic, width, height = _RAW_HEADER.unpack_from(buf)
    if magic not in _RAW_ENCODING:
        raise DepthFormatError(f"{path}: bad depth magic {magic!r}")
    payload = buf[_RAW_HEADER.size:]
    if len(payload) != 4 * width * height:
        raise DepthFormatError(f"{path}: size mismatch, expected {4 * width * height} bytes, got {len(payload)}")
    data = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(height, width)
    return DepthMap(data, _RAW_ENCODING[magic])


def read_depth(path, encoding: str | None = None) -> DepthMap:
    """PGM files are 16-bit positive depth (8-bit PGMs are rejected); anything
    else is read as the raw float format. ``encoding`` overrides PGM only."""
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head in (b"P2", b"P5"):
        img = read_pnm(path)
        if img.max_value != DEPTH_CODE_MAX:
            raise ValueError(f"{path}: depth PGM must have maxval 65535, got {img.max_value:g}")
        return DepthMap(img.data, encoding or POSITIVE_16BIT)
    return read_depth_raw(path)


def write_depth(d: DepthMap, path) -> None:
    if d.encoding == POSITIVE_16BIT and str(path).lower().endswith(".pgm"):
        write_pnm(GrayImage(d.data, DEPTH_CODE_MAX), path)
    else:
        write_depth_raw(d, path)

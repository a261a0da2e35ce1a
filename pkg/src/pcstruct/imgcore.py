"""Raster containers, luminance conversion and PNM (P2/P3/P5/P6) I/O.

Images are stored as float64 arrays in row-major ``(height, width)`` or
``(height, width, 3)`` layout. ``max_value`` records the intensity scale the
values live on (255 for 8-bit sources, 65535 for 16-bit, 1.0 once normalized).
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

import numpy as np

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

PNM_MAXVALS = (255, 65535)


class PNMError(ValueError):
    """Malformed or truncated PNM data."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GrayImage:
    data: np.ndarray
    max_value: float = 1.0

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 2:
            raise ValueError(f"GrayImage needs a 2-D array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("GrayImage must be at least 1x1")
        if not np.all(np.isfinite(data)):
            raise ValueError("GrayImage values must be finite")
        if not self.max_value > 0:
            raise ValueError("max_value must be positive")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "max_value", float(self.max_value))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass(frozen=True)
class ColorImage:
    data: np.ndarray
    max_value: float = 1.0

    def __post_init__(self):
        data = _frozen(self.data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError(f"ColorImage needs an (H, W, 3) array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("ColorImage must be at least 1x1")
        if not np.all(np.isfinite(data)):
            raise ValueError("ColorImage values must be finite")
        if not self.max_value > 0:
            raise ValueError("max_value must be positive")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "max_value", float(self.max_value))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


Image = Union[GrayImage, ColorImage]


def to_luminance(img: ColorImage) -> GrayImage:
    """Y = 0.299 R + 0.587 G + 0.114 B, keeping ``max_value``."""
    y = img.data @ LUMA_WEIGHTS
    # the weights sum to 1, so clipping only removes float round-off
    return GrayImage(np.clip(y, img.data.min(), img.data.max()), img.max_value)


def as_gray(img: Image) -> GrayImage:
    if isinstance(img, ColorImage):
        return to_luminance(img)
    return img


def normalize(img: GrayImage, target_max: float) -> GrayImage:
    """Linearly rescale from ``[0, max_value]`` to ``[0, target_max]``."""
    if not target_max > 0:
        raise ValueError(f"target_max must be positive, got {target_max}")
    if target_max == img.max_value:
        return img
    return GrayImage(img.data * (target_max / img.max_value), target_max)


# --- PNM ----------------------------------------------------------------

_MAGIC_CHANNELS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}


def _header_tokens(buf: bytes, count: int) -> tuple[list[int], int]:
    """Read ``count`` integer tokens after the 2-byte magic.

    Returns the tokens and the offset of the single whitespace byte that ends
    the header (binary payload starts right after it).
    """
    tokens = []
    pos = 2
    n = len(buf)
    while len(tokens) < count:
        if pos >= n:
            raise PNMError(f"unexpected end of header at byte offset {pos}")
        ch = buf[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch.isdigit():
            start = pos
            while pos < n and buf[pos:pos + 1].isdigit():
                pos += 1
            tokens.append(int(buf[start:pos]))
        else:
            raise PNMError(f"invalid header byte {ch!r} at byte offset {pos}")
    return tokens, pos


def parse_pnm(buf: bytes) -> Image:
    magic = buf[:2]
    if magic not in _MAGIC_CHANNELS:
        raise PNMError(f"unsupported PNM magic {magic!r} at byte offset 0")
    channels = _MAGIC_CHANNELS[magic]
    (width, height, maxval), pos = _header_tokens(buf, 3)
    if width < 1 or height < 1:
        raise PNMError(f"invalid dimensions {width}x{height} in header ending at byte offset {pos}")
    if maxval not in PNM_MAXVALS:
        raise PNMError(f"unsupported maxval {maxval} in header ending at byte offset {pos}")
    count = width * height * channels

    if magic in (b"P5", b"P6"):
        if pos >= len(buf) or not buf[pos:pos + 1].isspace():
            raise PNMError(f"missing whitespace after header at byte offset {pos}")
        payload = buf[pos + 1:]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        expected = count * dtype.itemsize
        if len(payload) < expected:
            raise PNMError(
                f"size mismatch: expected {expected} payload bytes, found {len(payload)}"
            )
        values = np.frombuffer(payload[:expected], dtype=dtype)
    else:
        try:
            values = np.array(buf[pos:].split(), dtype=np.int64)
        except ValueError as exc:
            raise PNMError(f"non-integer sample after byte offset {pos}") from exc
        if values.size < count:
            raise PNMError(f"size mismatch: expected {count} samples, found {values.size}")
        values = values[:count]
    if values.max(initial=0) > maxval:
        raise PNMError(f"sample exceeds maxval {maxval}")

    values = values.astype(np.float64)
    if channels == 1:
        return GrayImage(values.reshape(height, width), maxval)
    return ColorImage(values.reshape(height, width, 3), maxval)


def read_pnm(path) -> Image:
    """Read a P2/P3/P5/P6 file with maxval 255 or 65535."""
    with open(path, "rb") as fh:
        buf = fh.read()
    try:
        return parse_pnm(buf)
    except PNMError as exc:
        raise PNMError(f"{path}: {exc}") from None


def encode_pnm(img: Image, binary: bool = True) -> bytes:
    maxval = int(img.max_value)
    if maxval not in PNM_MAXVALS or maxval != img.max_value:
        raise ValueError(
            f"PNM output needs max_value 255 or 65535, got {img.max_value}; normalize first"
        )
    samples = np.clip(np.rint(img.data), 0, maxval).astype(np.int64)
    gray = isinstance(img, GrayImage)
    if binary:
        magic = "P5" if gray else "P6"
        dtype = ">u2" if maxval > 255 else "u1"
        payload = samples.astype(dtype).tobytes()
    else:
        magic = "P2" if gray else "P3"
        rows = samples.reshape(img.height, -1)
        payload = "".join(" ".join(map(str, r)) + "\n" for r in rows).encode("ascii")
    header = f"{magic}\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    return header + payload


def write_pnm(img: Image, path, binary: bool = True) -> None:
    """Write ``img`` as PGM/PPM. Values are rounded to integer codes."""
    data = encode_pnm(img, binary=binary)
    if not os.fspath(path):
        raise OSError("write_pnm: empty output path")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"write_pnm: cannot write {path!r}: {exc}") from exc

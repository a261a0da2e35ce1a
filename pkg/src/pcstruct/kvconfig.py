"""Flat ``key=value`` text configs shared by filter-bank and loss-weight settings."""
from __future__ import annotations

from pathlib import Path


def parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def format_kv(items: dict) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in items.items())


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_kv(path) -> dict[str, str]:
    return parse_kv(Path(path).read_text())


def write_kv(items: dict, path) -> None:
    Path(path).write_text(format_kv(items))

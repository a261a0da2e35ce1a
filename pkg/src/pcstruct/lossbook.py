"""Weighted training objective with delayed phase-congruency term.

    L = a*L_GAN + b*L_cyc + b*L_excyc + L_dir + g*L_iden(D) + g*L_PC + l*L_n

The ``g*L_PC`` term is switched on from ``pc_start_epoch`` (inclusive,
0-indexed). The adversarial/cycle/identity terms are computed by the
training framework and passed in as plain numbers.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .kvconfig import parse_kv


@dataclass(frozen=True)
class LossComponents:
    gan: float = 0.0
    cyc: float = 0.0
    excyc: float = 0.0
    dir: float = 0.0
    iden_d: float = 0.0
    pc: float = 0.0
    normal: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ValueError(f"loss component {f.name} is not finite: {value}")
        if not 0.0 <= self.pc <= 1.0:
            raise ValueError(f"pc loss must lie in [0, 1], got {self.pc}")
        if not 0.0 <= self.normal <= 2.0:
            raise ValueError(f"normal loss must lie in [0, 2], got {self.normal}")

    @classmethod
    def from_kv(cls, items: dict) -> "LossComponents":
        names = {f.name for f in fields(cls)}
        unknown = set(items) - names
        if unknown:
            raise ValueError(f"unknown loss components: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in items.items()})


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 0.5
    beta: float = 10.0
    gamma: float = 5.0
    lambda_: float = 2.4
    pc_start_epoch: int = 160

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "lambda_"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"weight {name} must be finite and >= 0, got {value}")
        if int(self.pc_start_epoch) != self.pc_start_epoch or self.pc_start_epoch < 0:
            raise ValueError(f"pc_start_epoch must be a non-negative integer, got {self.pc_start_epoch}")
        object.__setattr__(self, "pc_start_epoch", int(self.pc_start_epoch))

    def to_kv(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return {k: d[k] for k in ("alpha", "beta", "gamma", "lambda", "pc_start_epoch")}

    @classmethod
    def from_kv(cls, items: dict) -> "LossWeights":
        kwargs = {}
        for key in ("alpha", "beta", "gamma", "lambda"):
            if key in items:
                kwargs["lambda_" if key == "lambda" else key] = float(items[key])
        if "pc_start_epoch" in items:
            kwargs["pc_start_epoch"] = int(items["pc_start_epoch"])
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "LossWeights":
        return cls.from_kv(parse_kv(text))


def default_weights() -> LossWeights:
    return LossWeights(alpha=0.5, beta=10.0, gamma=5.0, lambda_=2.4, pc_start_epoch=160)


def pc_active(weights: LossWeights, epoch: int) -> bool:
    return epoch >= weights.pc_start_epoch


def total_loss(c: LossComponents, w: LossWeights, epoch: int) -> float:
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    total = (w.alpha * c.gan
             + w.beta * c.cyc
             + w.beta * c.excyc
             + c.dir
             + w.gamma * c.iden_d
             + w.lambda_ * c.normal)
    if pc_active(w, epoch):
        total += w.gamma * c.pc
    return total

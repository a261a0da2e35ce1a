import math

import numpy as np
import pytest

from pcstruct.lossbook import LossComponents, LossWeights, default_weights, pc_active, total_loss

ONES = LossComponents(1, 1, 1, 1, 1, 1, 1)


def test_defaults():
    w = default_weights()
    assert (w.alpha, w.beta, w.gamma, w.lambda_, w.pc_start_epoch) == (0.5, 10.0, 5.0, 2.4, 160)
    assert w == LossWeights()


def test_total_examples():
    w = default_weights()
    assert total_loss(LossComponents(), w, 0) == 0.0
    assert total_loss(ONES, w, 200) == pytest.approx(33.9, abs=1e-12)
    assert total_loss(ONES, w, 100) == pytest.approx(28.9, abs=1e-12)


def test_gate_boundary():
    w = default_weights()
    assert not pc_active(w, 159)
    assert pc_active(w, 160)
    assert total_loss(ONES, w, 160) - total_loss(ONES, w, 159) == pytest.approx(5.0, abs=1e-12)


def test_zero_weights_leave_dir():
    w = LossWeights(0, 0, 0, 0, 0)
    c = LossComponents(3.0, 2.0, 1.5, 0.75, 4.0, 0.2, 1.1)
    assert total_loss(c, w, 500) == 0.75


def test_linearity(rng):
    w = default_weights()
    names = ["gan", "cyc", "excyc", "dir", "iden_d", "pc", "normal"]
    for epoch in (10, 300):
        for name in names:
            base = dict(zip(names, rng.random(7) * 0.5))
            f = lambda v: total_loss(LossComponents(**{**base, name: v}), w, epoch)
            a, b = rng.random(2) * 0.5
            t = rng.random()
            # affine in each component: f(t a + (1-t) b) = t f(a) + (1-t) f(b)
            assert f(t * a + (1 - t) * b) == pytest.approx(t * f(a) + (1 - t) * f(b), abs=1e-12)


def test_pc_ignored_before_gate():
    w = default_weights()
    lo = LossComponents(1, 1, 1, 1, 1, 0.0, 1)
    hi = LossComponents(1, 1, 1, 1, 1, 1.0, 1)
    assert total_loss(lo, w, 159) == total_loss(hi, w, 159)


def test_validation():
    with pytest.raises(ValueError):
        LossComponents(gan=math.nan)
    with pytest.raises(ValueError):
        LossComponents(pc=1.5)
    with pytest.raises(ValueError):
        LossComponents(normal=-0.1)
    with pytest.raises(ValueError):
        LossWeights(alpha=-1)
    with pytest.raises(ValueError):
        LossWeights(pc_start_epoch=2.5)
    with pytest.raises(ValueError):
        total_loss(ONES, default_weights(), -1)


def test_kv_round_trip():
    w = LossWeights(alpha=1, lambda_=3.5, pc_start_epoch=7)
    assert LossWeights.from_kv(w.to_kv()) == w
    assert LossWeights.from_text("lambda = 1.25\n") == LossWeights(lambda_=1.25)
    assert LossComponents.from_kv({"pc": "0.5"}) == LossComponents(pc=0.5)
    with pytest.raises(ValueError):
        LossComponents.from_kv({"bogus": 1})

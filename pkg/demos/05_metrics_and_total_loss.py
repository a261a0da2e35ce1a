"""
Evaluation metrics and the weighted training objective
======================================================
"""
import numpy as np

from pcstruct.evalmetrics import depth_metrics, psnr, ssim
from pcstruct.fixtures import textured
from pcstruct.imgcore import GrayImage
from pcstruct.lossbook import LossComponents, default_weights, total_loss

rng = np.random.default_rng(1)
gt = rng.uniform(20, 80, (48, 48))
for name, pred in {"exact": gt, "+2 mm": gt + 2, "x0.9": gt * 0.9}.items():
    m = depth_metrics(pred, gt)
    a = depth_metrics(pred, gt, align=True)
    print(f"{name:<6} rmse={m.rmse:.4f} mae={m.mae:.4f} sqrel={m.sq_rel:.4f}"
          f"   aligned rmse={a.rmse:.4f} (scale {a.scale:.4f})")

ref = GrayImage(np.rint(textured(64, seed=2).data * 200 + 25), 255)
for sigma in (1, 5, 20):
    noisy = GrayImage(np.clip(ref.data + rng.normal(0, sigma, ref.shape), 0, 255), 255)
    print(f"noise sigma={sigma:>2}: psnr={psnr(ref, noisy):6.2f} dB  ssim={ssim(ref, noisy):.4f}")

w = default_weights()
c = LossComponents(gan=1, cyc=1, excyc=1, dir=1, iden_d=1, pc=1, normal=1)
for epoch in (0, 159, 160, 200):
    print(f"epoch {epoch:>3}: total = {total_loss(c, w, epoch):.4f}")

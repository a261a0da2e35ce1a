"""
Inverse depth, surface normals and the normal-consistency loss
==============================================================
"""
import math

import numpy as np

from pcstruct.depthgeo import (
    POSITIVE_16BIT, DepthMap, extract_profile, invert_depth, normal_loss, normal_loss_gradient,
    normals_from_depth, quantization_stats, revert_depth,
)

codes = DepthMap(np.array([[0.0, 13107.0, 65535.0]]), POSITIVE_16BIT)
inv = invert_depth(codes)
print("codes   :", codes.data[0])
print("inverse :", inv.data[0])
print("reverted:", revert_depth(inv).data[0])

# a plane tilted 45 degrees against a flat reference
ramp = np.tile(np.arange(32.0), (32, 1))
flat = np.zeros_like(ramp)
print("normal at (10,10) of ramp:", normals_from_depth(ramp).vectors[10, 10])
print("loss(flat, ramp) =", normal_loss(flat, ramp), " 1 - 1/sqrt(2) =", 1 - 1 / math.sqrt(2))
print("loss(ramp, -ramp) =", normal_loss(ramp, -ramp))

# the analytic gradient touches only the neighbourhood of a perturbation
bump = flat.copy()
bump[16, 16] = 0.5
g = normal_loss_gradient(flat, bump)
ys, xs = np.nonzero(g)
print("gradient footprint rows", ys.min(), "-", ys.max(), "cols", xs.min(), "-", xs.max())

# coarse quantization shows up as long plateaus in a depth profile
stairs = np.floor(ramp / 4) * 4
print("profile:", extract_profile(stairs, row=0)[:12])
print(quantization_stats(stairs))

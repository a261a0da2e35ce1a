"""Slow, independent re-implementations used as test oracles.

Nothing here calls into ``pcstruct`` numerics: transforms use explicit DFT
matrices rather than ``numpy.fft``, filters and similarity terms are built
pixel by pixel with the ``math`` module.
"""
import cmath
import math

import numpy as np


def dft_matrix(n, inverse=False):
    sign = 1 if inverse else -1
    return np.array([[cmath.exp(sign * 2j * math.pi * j * k / n) for k in range(n)] for j in range(n)])


def dft2_direct(x):
    h, w = x.shape
    return dft_matrix(h) @ x @ dft_matrix(w).T


def idft2_direct(X):
    h, w = X.shape
    return dft_matrix(h, True) @ X @ dft_matrix(w, True).T / (h * w)


def _freq(k, n):
    # Nyquist on the negative side for even n
    return (k if k < (n + 1) // 2 else k - n) / n


def log_gabor_transfer(h, w, n_scales=4, n_orient=4, min_wl=6.0, mult=2.0,
                       sigma_on_f=0.55, d_theta_sigma=1.2):
    """Transfer functions built one frequency bin at a time."""
    out = np.zeros((n_scales, n_orient, h, w))
    theta_sigma = math.pi / n_orient / d_theta_sigma
    for r in range(h):
        fy = _freq(r, h)
        for c in range(w):
            fx = _freq(c, w)
            if r == 0 and c == 0:
                continue
            rad = math.sqrt(fx * fx + fy * fy)
            theta = math.atan2(-fy, fx)
            for s in range(n_scales):
                f0 = 1.0 / (min_wl * mult ** s)
                radial = math.exp(-(math.log(rad / f0) ** 2) / (2 * math.log(sigma_on_f) ** 2))
                for o in range(n_orient):
                    angle = o * math.pi / n_orient
                    d = theta - angle
                    d = abs(math.atan2(math.sin(d), math.cos(d)))
                    out[s, o, r, c] = radial * math.exp(-d * d / (2 * theta_sigma ** 2))
    return out


def phase_congruency_direct(img01, transfer, eps=1e-4):
    """PC per pixel from explicit quadrature sums."""
    n_s, n_o, h, w = transfer.shape
    spectrum = dft2_direct(img01)
    resp = [[idft2_direct(spectrum * transfer[s, o]) for o in range(n_o)] for s in range(n_s)]
    pc = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            energy_sum = 0.0
            amp_sum = 0.0
            for o in range(n_o):
                se = so = 0.0
                for s in range(n_s):
                    z = resp[s][o][y, x]
                    se += z.real
                    so += z.imag
                    amp_sum += math.hypot(z.real, z.imag)
                energy_sum += math.hypot(se, so)
            pc[y, x] = energy_sum / (eps + amp_sum)
    return pc


def scharr_direct(img):
    """Scharr magnitude with clamped (replicated) borders, kernel / 16."""
    h, w = img.shape
    wts = {-1: 3.0, 0: 10.0, 1: 3.0}
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx = gy = 0.0
            for d, wt in wts.items():
                yy = min(max(y + d, 0), h - 1)
                xx = min(max(x + d, 0), w - 1)
                gx += wt * (img[yy, min(x + 1, w - 1)] - img[yy, max(x - 1, 0)])
                gy += wt * (img[min(y + 1, h - 1), xx] - img[max(y - 1, 0), xx])
            out[y, x] = math.hypot(gx / 16.0, gy / 16.0)
    return out


def fsim_direct(gen01, real01, transfer, t1=0.85, t2=160.0, eps=1e-4):
    """Loss-complement FSIM: PC maps on [0,1] images, gradients on [0,255]."""
    pc_g = phase_congruency_direct(gen01, transfer, eps)
    pc_r = phase_congruency_direct(real01, transfer, eps)
    g_g = scharr_direct(gen01 * 255.0)
    g_r = scharr_direct(real01 * 255.0)
    num = den = 0.0
    h, w = gen01.shape
    for y in range(h):
        for x in range(w):
            a, b = pc_g[y, x], pc_r[y, x]
            s_pc = (2 * a * b + t1) / (a * a + b * b + t1)
            c, d = g_g[y, x], g_r[y, x]
            s_g = (2 * c * d + t2) / (c * c + d * d + t2)
            m = max(a, b)
            num += s_pc * s_g * m
            den += m
    return num / den


def ssim_direct(a, b, max_value, size=11, sigma=1.5, k1=0.01, k2=0.03):
    half = (size - 1) / 2
    wts = [[math.exp(-((i - half) ** 2 + (j - half) ** 2) / (2 * sigma * sigma))
            for j in range(size)] for i in range(size)]
    total = sum(map(sum, wts))
    wts = [[v / total for v in row] for row in wts]
    c1 = (k1 * max_value) ** 2
    c2 = (k2 * max_value) ** 2
    h, w = a.shape
    vals = []
    for y in range(h - size + 1):
        for x in range(w - size + 1):
            mx = my = 0.0
            for i in range(size):
                for j in range(size):
                    mx += wts[i][j] * a[y + i, x + j]
                    my += wts[i][j] * b[y + i, x + j]
            vx = vy = cxy = 0.0
            for i in range(size):
                for j in range(size):
                    dx = a[y + i, x + j] - mx
                    dy = b[y + i, x + j] - my
                    vx += wts[i][j] * dx * dx
                    vy += wts[i][j] * dy * dy
                    cxy += wts[i][j] * dx * dy
            vals.append(((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return sum(vals) / len(vals)


def psnr_direct(a, b, max_value):
    flat_a, flat_b = a.ravel().tolist(), b.ravel().tolist()
    mse = sum((p - q) ** 2 for p, q in zip(flat_a, flat_b)) / len(flat_a)
    if mse == 0:
        return math.inf
    return 10 * math.log10(max_value * max_value / mse)


def central_fd_gradient(f, x, h=1e-4):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (f(xp) - f(xm)) / (2 * h)
    return g

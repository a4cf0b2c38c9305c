"""Gist-style scene descriptor: oriented band-pass energies pooled on a
4x4 grid.  Filtering is circular (plain FFT) so translations by whole grid
cells permute the pooled blocks exactly."""

from __future__ import annotations

import math

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import Patch, to_grayscale

N_SCALES = 4
N_ORIENT = 8
GRID = 4
PATCH = 200
TOP_FREQUENCY = 0.327


def _transfer_functions(shape: tuple[int, int]) -> list[np.ndarray]:
    """Polar Gabor-like transfer functions, DC forced to zero."""
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    rad = np.hypot(fy, fx)
    ang = np.arctan2(fy, fx)
    out = []
    for s in range(N_SCALES):
        f0 = TOP_FREQUENCY / 2 ** s
        sigma_r = f0 * 0.35
        for k in range(N_ORIENT):
            theta = k * math.pi / N_ORIENT
            dtheta = np.angle(np.exp(1j * (ang - theta)))
            radial = np.exp(-((rad - f0) ** 2) / (2 * sigma_r ** 2))
            angular = np.exp(-(dtheta ** 2) / (2 * (math.pi / N_ORIENT) ** 2))
            tr = radial * angular  # one-sided: analytic (complex) response
            tr[0, 0] = 0.0
            out.append(tr)
    return out


_TRANSFER: list[np.ndarray] | None = None


def _get_transfer() -> list[np.ndarray]:
    global _TRANSFER
    if _TRANSFER is None:
        _TRANSFER = _transfer_functions((PATCH, PATCH))
    return _TRANSFER


def gist(patch: Patch) -> FeatureVector:
    lum = to_grayscale(patch.image).data[..., 0]
    spec = np.fft.fft2(lum)
    cell = PATCH // GRID
    feats = []
    for tr in _get_transfer():
        mag = np.abs(np.fft.ifft2(spec * tr))
        pooled = mag.reshape(GRID, cell, GRID, cell).mean(axis=(1, 3))
        feats.append(pooled.ravel())
    return check_dim(FeatureVector("gist", np.concatenate(feats)),
                     N_SCALES * N_ORIENT * GRID * GRID)

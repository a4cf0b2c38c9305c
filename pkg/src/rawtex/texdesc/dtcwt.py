"""Dual-tree complex wavelet features.

Two orthonormal Daubechies-4 trees are run in parallel, the second tree
using the time-reversed filters (the classic even-length shifted-tree
construction).  Combining the four row/column tree products yields six
oriented complex subbands per scale.  Both trees use circular boundary
handling, so forward + inverse reconstructs the input exactly; input side
lengths must be divisible by 2**levels.
"""

from __future__ import annotations

import math

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import Patch

N_LEVELS = 4
N_SUBBANDS = 6

# Daubechies-4 orthonormal lowpass
_S3 = math.sqrt(3.0)
_H0A = np.array([1 + _S3, 3 + _S3, 3 - _S3, 1 - _S3]) / (4 * math.sqrt(2.0))
_H0B = _H0A[::-1].copy()  # second tree: time-reversed lowpass


def _qmf(h0: np.ndarray) -> np.ndarray:
    return (np.power(-1.0, np.arange(h0.size)) * h0[::-1]).copy()


_FILTERS = {"a": (_H0A, _qmf(_H0A)), "b": (_H0B, _qmf(_H0B))}


def _analysis_1d(x: np.ndarray, tree: str, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Circular one-level DWT along an axis; length must be even."""
    h0, h1 = _FILTERS[tree]
    n = x.shape[axis]
    if n % 2:
        raise ValueError("axis length must be even")
    lo = np.zeros_like(np.take(x, np.arange(0, n, 2), axis=axis))
    hi = np.zeros_like(lo)
    for i, (c0, c1) in enumerate(zip(h0, h1)):
        rolled = np.roll(x, -i, axis=axis)
        dec = np.take(rolled, np.arange(0, n, 2), axis=axis)
        lo = lo + c0 * dec
        hi = hi + c1 * dec
    return lo, hi


def _synthesis_1d(lo: np.ndarray, hi: np.ndarray, tree: str, axis: int) -> np.ndarray:
    """Adjoint of _analysis_1d (exact inverse for orthonormal filters)."""
    h0, h1 = _FILTERS[tree]
    n = lo.shape[axis] * 2
    shape = list(lo.shape)
    shape[axis] = n
    lo_up = np.zeros(shape)
    hi_up = np.zeros(shape)
    idx = [slice(None)] * lo.ndim
    idx[axis] = slice(0, n, 2)
    lo_up[tuple(idx)] = lo
    hi_up[tuple(idx)] = hi
    x = np.zeros(shape)
    for i, (c0, c1) in enumerate(zip(h0, h1)):
        x = x + c0 * np.roll(lo_up, i, axis=axis) + c1 * np.roll(hi_up, i, axis=axis)
    return x


def _analysis_2d(x: np.ndarray, row_tree: str, col_tree: str):
    lo_r, hi_r = _analysis_1d(x, row_tree, axis=0)
    ll, lh = _analysis_1d(lo_r, col_tree, axis=1)
    hl, hh = _analysis_1d(hi_r, col_tree, axis=1)
    return ll, (lh, hl, hh)


def _synthesis_2d(ll, bands, row_tree: str, col_tree: str) -> np.ndarray:
    lh, hl, hh = bands
    lo_r = _synthesis_1d(ll, lh, col_tree, axis=1)
    hi_r = _synthesis_1d(hl, hh, col_tree, axis=1)
    return _synthesis_1d(lo_r, hi_r, row_tree, axis=0)


_TREES = (("a", "a"), ("a", "b"), ("b", "a"), ("b", "b"))


def forward(x: np.ndarray, levels: int = N_LEVELS):
    """Dual-tree forward transform.

    Returns (lowpass, pyramid) where lowpass maps tree-pair -> final LL and
    pyramid[level] is a list of six complex oriented subbands.
    """
    if x.shape[0] % (1 << levels) or x.shape[1] % (1 << levels):
        raise ValueError(f"input sides must be divisible by {1 << levels}")
    lows = {t: x for t in _TREES}
    pyramid = []
    for _ in range(levels):
        raw = {}
        for t in _TREES:
            lows[t], raw[t] = _analysis_2d(lows[t], t[0], t[1])
        level_bands = []
        for s in range(3):  # LH, HL, HH
            waa, wab = raw[("a", "a")][s], raw[("a", "b")][s]
            wba, wbb = raw[("b", "a")][s], raw[("b", "b")][s]
            level_bands.append(0.5 * ((waa - wbb) + 1j * (wab + wba)))
            level_bands.append(0.5 * ((waa + wbb) + 1j * (wab - wba)))
        pyramid.append(level_bands)
    return lows, pyramid


def inverse(lows, pyramid) -> np.ndarray:
    """Invert forward(); averages the four per-tree reconstructions."""
    recon = {}
    for t in _TREES:
        cur = lows[t]
        for level_bands in reversed(pyramid):
            raw = [None, None, None]
            for s in range(3):
                p, q = level_bands[2 * s], level_bands[2 * s + 1]
                waa = p.real + q.real
                wbb = q.real - p.real
                wab = p.imag + q.imag
                wba = p.imag - q.imag
                raw[s] = {("a", "a"): waa, ("a", "b"): wab,
                          ("b", "a"): wba, ("b", "b"): wbb}[t]
            cur = _synthesis_2d(cur, raw, t[0], t[1])
        recon[t] = cur
    return sum(recon.values()) / len(recon)


CROP = 192  # largest multiple of 2**levels that fits a 200px patch


def _center_crop(chan: np.ndarray, size: int = CROP) -> np.ndarray:
    h, w = chan.shape
    y0, x0 = (h - size) // 2, (w - size) // 2
    return chan[y0:y0 + size, x0:x0 + size]


def dtcwt_features(chan: np.ndarray) -> np.ndarray:
    """Mean and std of subband magnitudes, all scales and orientations."""
    _, pyramid = forward(_center_crop(chan))
    feats = []
    for level_bands in pyramid:
        for band in level_bands:
            mag = np.abs(band)
            feats.extend([mag.mean(), mag.std()])
    return np.array(feats)


def dtcwt(patch: Patch) -> FeatureVector:
    vec = np.concatenate([dtcwt_features(patch.image.data[..., c])
                          for c in range(patch.image.channels)])
    return check_dim(FeatureVector("dtcwt", vec),
                     patch.image.channels * N_LEVELS * N_SUBBANDS * 2)

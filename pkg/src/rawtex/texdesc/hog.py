"""Histogram of oriented gradients: 3x3 cells, nine unsigned bins."""

from __future__ import annotations

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import Patch, to_grayscale

N_CELLS = 3
N_ORIENT_BINS = 9


def gradient_xy(lum: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradients with reflective padding."""
    padded = np.pad(lum, 1, mode="reflect")
    gx = 0.5 * (padded[1:-1, 2:] - padded[1:-1, :-2])
    gy = 0.5 * (padded[2:, 1:-1] - padded[:-2, 1:-1])
    return gx, gy


def hog(patch: Patch) -> FeatureVector:
    lum = to_grayscale(patch.image).data[..., 0]
    gx, gy = gradient_xy(lum)
    mag = np.hypot(gx, gy)
    theta = np.arctan2(gy, gx) % np.pi  # unsigned orientation in [0, pi)
    bins = np.minimum((theta / np.pi * N_ORIENT_BINS).astype(np.int64),
                      N_ORIENT_BINS - 1)
    h, w = lum.shape
    ys = np.array_split(np.arange(h), N_CELLS)
    xs = np.array_split(np.arange(w), N_CELLS)
    blocks = []
    for yblk in ys:
        for xblk in xs:
            sub_b = bins[np.ix_(yblk, xblk)].ravel()
            sub_m = mag[np.ix_(yblk, xblk)].ravel()
            hist = np.bincount(sub_b, weights=sub_m, minlength=N_ORIENT_BINS)
            norm = np.linalg.norm(hist)
            blocks.append(hist / norm if norm > 0 else hist)  # zero cell stays zero
    return check_dim(FeatureVector("hog", np.concatenate(blocks)),
                     N_CELLS * N_CELLS * N_ORIENT_BINS)

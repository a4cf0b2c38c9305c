"""Gray-level co-occurrence matrices and the five Haralick statistics."""

from __future__ import annotations

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import Patch, quantize8, to_grayscale

N_LEVELS = 64
# unit offsets at 0, 45, 90, 135 degrees as (dy, dx)
OFFSETS = ((0, 1), (-1, 1), (-1, 0), (-1, -1))


def cooccurrence_matrix(levels: np.ndarray, n_levels: int = N_LEVELS) -> np.ndarray:
    """Symmetric co-occurrence matrix accumulated over the four unit offsets,
    normalized to sum 1."""
    mat = np.zeros((n_levels, n_levels), dtype=np.float64)
    h, w = levels.shape
    for dy, dx in OFFSETS:
        ys = slice(max(0, -dy), min(h, h - dy))
        xs = slice(max(0, -dx), min(w, w - dx))
        a = levels[ys, xs].ravel()
        b = levels[max(0, dy):h + min(0, dy), max(0, dx):w + min(0, dx)].ravel()
        np.add.at(mat, (a, b), 1.0)
    mat = mat + mat.T
    return mat / mat.sum()


def haralick_stats(p: np.ndarray) -> np.ndarray:
    """Contrast, correlation, energy, entropy, homogeneity of a normalized GLCM."""
    n = p.shape[0]
    i = np.arange(n, dtype=np.float64)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    contrast = float(np.sum(p * (ii - jj) ** 2))
    mu_i = float(np.sum(p * ii))
    mu_j = float(np.sum(p * jj))
    var_i = float(np.sum(p * (ii - mu_i) ** 2))
    var_j = float(np.sum(p * (jj - mu_j) ** 2))
    if var_i <= 0 or var_j <= 0:
        correlation = 1.0  # zero-variance convention
    else:
        correlation = float(np.sum(p * (ii - mu_i) * (jj - mu_j))
                            / np.sqrt(var_i * var_j))
    energy = float(np.sum(p * p))
    nz = p[p > 0]
    entropy = float(-np.sum(nz * np.log(nz)))
    homogeneity = float(np.sum(p / (1.0 + np.abs(ii - jj))))
    return np.array([contrast, correlation, energy, entropy, homogeneity])


def _quantize_levels(values01: np.ndarray) -> np.ndarray:
    return quantize8(values01) * N_LEVELS // 256


def cooccurrence_l(patch: Patch) -> FeatureVector:
    lum = to_grayscale(patch.image).data[..., 0]
    stats = haralick_stats(cooccurrence_matrix(_quantize_levels(lum)))
    return check_dim(FeatureVector("coocc-l", stats), 5)


def cooccurrence_rgb(patch: Patch) -> FeatureVector:
    blocks = []
    for c in range(3):
        levels = _quantize_levels(patch.image.data[..., c])
        blocks.append(haralick_stats(cooccurrence_matrix(levels)))
    return check_dim(FeatureVector("coocc-rgb", np.concatenate(blocks)), 15)

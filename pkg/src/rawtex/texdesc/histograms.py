"""Histogram-family descriptors and chromaticity moments."""

from __future__ import annotations

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import (ColorSpace, Image, Patch, convert, quantize8,
                       srgb_decode, to_grayscale, _RGB_TO_XYZ)


def _hist256(levels: np.ndarray) -> np.ndarray:
    h = np.bincount(levels.ravel(), minlength=256).astype(np.float64)
    return h / h.sum()


def hist_l(patch: Patch) -> FeatureVector:
    """256-bin gray-level histogram of the luminance."""
    lum = to_grayscale(patch.image).data[..., 0]
    return check_dim(FeatureVector("hist-l", _hist256(quantize8(lum))), 256)


def hist_hv(patch: Patch) -> FeatureVector:
    """Concatenated 256-bin hue and value marginals (HSV)."""
    hsv = convert(patch.image, ColorSpace.HSV).data
    h = np.minimum((hsv[..., 0] * 256).astype(np.int64), 255)
    v = quantize8(hsv[..., 2])
    vec = np.concatenate([_hist256(h), _hist256(v)])
    return check_dim(FeatureVector("hist-hv", vec), 512)


def hist_rgb(patch: Patch) -> FeatureVector:
    """Concatenated 256-bin R, G, B marginals."""
    q = quantize8(patch.image.data)
    vec = np.concatenate([_hist256(q[..., c]) for c in range(3)])
    return check_dim(FeatureVector("hist-rgb", vec), 768)


def hist_chrom_rgb(patch: Patch) -> FeatureVector:
    """Concatenated 256-bin marginals of the rgb chromaticity ratios."""
    chrom = convert(patch.image, ColorSpace.CHROMATICITY_RGB).data
    q = quantize8(chrom)
    vec = np.concatenate([_hist256(q[..., c]) for c in range(3)])
    return check_dim(FeatureVector("hist-chrom-rgb", vec), 768)


# (p, q) exponent pairs with p + q <= 3, fixed order
MOMENT_EXPONENTS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
                    (3, 0), (2, 1), (1, 2), (0, 3))


def xy_chromaticity(rgb_srgb: np.ndarray) -> np.ndarray:
    """Per-pixel CIE (x, y) chromaticity from sRGB-coded values."""
    xyz = srgb_decode(rgb_srgb) @ _RGB_TO_XYZ.T
    s = xyz.sum(axis=-1)
    safe = np.where(s > 0, s, 1.0)
    x = np.where(s > 0, xyz[..., 0] / safe, 1.0 / 3.0)
    y = np.where(s > 0, xyz[..., 1] / safe, 1.0 / 3.0)
    return np.stack([x, y], axis=-1)


def chromaticity_moments(patch: Patch) -> FeatureVector:
    """Moments m_pq of the normalized chromaticity distribution, p + q <= 3."""
    xy = xy_chromaticity(patch.image.data)
    x, y = xy[..., 0].ravel(), xy[..., 1].ravel()
    vec = np.array([np.mean(x ** p * y ** q) for p, q in MOMENT_EXPONENTS])
    return check_dim(FeatureVector("chrom-moments", vec), 10)

"""Morphological granulometry: pattern spectra from openings with linear
structuring elements at four angles."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..features import FeatureVector, check_dim
from ..imgcore import Patch

ANGLES = (0, 45, 90, 135)
DEFAULT_SIZES = (3, 5)


def linear_se(angle: int, length: int) -> np.ndarray:
    """Boolean line footprint of odd length at one of the four angles."""
    if angle == 0:
        return np.ones((1, length), dtype=bool)
    if angle == 90:
        return np.ones((length, 1), dtype=bool)
    if angle == 45:
        return np.fliplr(np.eye(length, dtype=bool))
    if angle == 135:
        return np.eye(length, dtype=bool)
    raise ValueError(f"unsupported angle {angle}")


def pattern_spectrum(chan: np.ndarray, sizes=DEFAULT_SIZES) -> np.ndarray:
    """Normalized mass removed by successively larger openings, per angle."""
    total = chan.sum()
    spectrum = np.zeros((len(ANGLES), len(sizes)))
    if total <= 0:
        return spectrum.ravel()
    for ai, angle in enumerate(ANGLES):
        prev = chan
        for si, size in enumerate(sizes):
            opened = ndimage.grey_opening(chan, footprint=linear_se(angle, size),
                                          mode="reflect")
            spectrum[ai, si] = (prev.sum() - opened.sum()) / total
            prev = opened
    return spectrum.ravel()


def granulometry(patch: Patch, sizes=DEFAULT_SIZES) -> FeatureVector:
    vec = np.concatenate([pattern_spectrum(patch.image.data[..., c], sizes)
                          for c in range(patch.image.channels)])
    return check_dim(FeatureVector("granulometry", vec),
                     len(ANGLES) * len(sizes) * patch.image.channels)

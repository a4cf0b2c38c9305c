"""Gabor filter bank features, monochrome and opponent variants.

The bank has six orientations (k*pi/6) at four octave-spaced center
frequencies, top frequency 0.327 cycles/pixel, one-octave bandwidth,
DC-free complex kernels.  Filtering runs in the frequency domain on a
reflect-padded patch so boundaries are deterministic.
"""

from __future__ import annotations

import math

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import Patch, to_grayscale

N_ORIENT = 6
TOP_FREQUENCY = 0.327
N_FREQ = 4
PATCH = 200


def bank_frequencies() -> list[float]:
    return [TOP_FREQUENCY / 2 ** i for i in range(N_FREQ)]


def gabor_kernel(freq: float, theta: float) -> np.ndarray:
    """Complex isotropic Gabor kernel with 1-octave bandwidth, DC removed."""
    # sigma from the one-octave half-response bandwidth relation
    sigma = (1.0 / (math.pi * freq)) * math.sqrt(math.log(2) / 2) * 3.0
    radius = int(math.ceil(3.0 * sigma))
    y, x = np.mgrid[-radius:radius + 1, -radius:radius + 1].astype(np.float64)
    xr = x * math.cos(theta) + y * math.sin(theta)
    env = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    k = env * np.exp(2j * math.pi * freq * xr)
    k = k - env * (k.sum() / env.sum())  # exact zero DC
    return k


class GaborBank:
    """Precomputed frequency-domain bank for 200x200 patches."""

    def __init__(self):
        self.kernels = [gabor_kernel(f, k * math.pi / N_ORIENT)
                        for f in bank_frequencies()
                        for k in range(N_ORIENT)]
        self.pad = max(k.shape[0] // 2 for k in self.kernels)
        self.shape = (PATCH + 2 * self.pad, PATCH + 2 * self.pad)
        self.transfer = []
        for k in self.kernels:
            full = np.zeros(self.shape, dtype=np.complex128)
            r = k.shape[0] // 2
            full[:2 * r + 1, :2 * r + 1] = k
            # center the kernel at the origin for linear-phase-free filtering
            full = np.roll(full, (-r, -r), axis=(0, 1))
            self.transfer.append(np.fft.fft2(full))

    def responses(self, chan: np.ndarray) -> list[np.ndarray]:
        """Complex responses of all 24 filters, reflect-padded boundaries."""
        if chan.shape != (PATCH, PATCH):
            raise ValueError(f"expected {PATCH}x{PATCH} channel, got {chan.shape}")
        padded = np.pad(chan, self.pad, mode="reflect")
        spec = np.fft.fft2(padded)
        out = []
        p = self.pad
        for tr in self.transfer:
            resp = np.fft.ifft2(spec * tr)
            out.append(resp[p:p + PATCH, p:p + PATCH])
        return out


_BANK: GaborBank | None = None


def get_bank() -> GaborBank:
    global _BANK
    if _BANK is None:
        _BANK = GaborBank()
    return _BANK


def _mean_std_features(chan: np.ndarray) -> np.ndarray:
    feats = []
    for resp in get_bank().responses(chan):
        mag = np.abs(resp)
        feats.extend([mag.mean(), mag.std()])
    return np.array(feats)


def gabor_l(patch: Patch) -> FeatureVector:
    lum = to_grayscale(patch.image).data[..., 0]
    return check_dim(FeatureVector("gabor-l", _mean_std_features(lum)), 48)


def gabor_rgb(patch: Patch) -> FeatureVector:
    vec = np.concatenate([_mean_std_features(patch.image.data[..., c])
                          for c in range(3)])
    return check_dim(FeatureVector("gabor-rgb", vec), 144)


# Opponent pathways: red-green and blue-yellow, and the cross-scale pairs
# (m, n) with m <= n used for each pathway.
SCALE_PAIRS = [(m, n) for m in range(N_FREQ) for n in range(m, N_FREQ)]


def opponent_gabor(patch: Patch) -> FeatureVector:
    """Monochrome Gabor features on R, G, B plus cross-channel opponent
    features: for the R-G and B-Y pathways, mean magnitude of the difference
    between the scale-m response of one channel and the scale-n response of
    the other, per orientation, for all scale pairs m <= n."""
    rgb = patch.image.data
    bank = get_bank()
    mono = np.concatenate([_mean_std_features(rgb[..., c]) for c in range(3)])

    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    yellow = 0.5 * (r + g)
    resp = {name: bank.responses(chan)
            for name, chan in (("r", r), ("g", g), ("b", b), ("y", yellow))}

    opp = []
    for a_name, b_name in (("r", "g"), ("b", "y")):
        for m, n in SCALE_PAIRS:
            for k in range(N_ORIENT):
                ra = resp[a_name][m * N_ORIENT + k]
                rb = resp[b_name][n * N_ORIENT + k]
                opp.append(np.abs(ra - rb).mean())
    vec = np.concatenate([mono, np.array(opp)])
    return check_dim(FeatureVector("opp-gabor", vec), 264)

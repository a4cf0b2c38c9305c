"""Color-normalization preprocessors: Gray-World, Gray-Edge variants and
two Retinex implementations (Frankle-McCann and McCann99).

All methods decode sRGB to linear RGB, normalize there, and re-encode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .imgcore import ColorSpace, Image, srgb_decode, srgb_encode


class DegenerateChannelError(ValueError):
    pass


@dataclass(frozen=True)
class IlluminantEstimate:
    rgb: np.ndarray        # positive, L2-normalized
    fallback: bool = False  # True when the estimator had no signal

    def __post_init__(self):
        rgb = np.asarray(self.rgb, dtype=np.float64)
        object.__setattr__(self, "rgb", rgb / np.linalg.norm(rgb))


def _von_kries(lin: np.ndarray, est: np.ndarray) -> np.ndarray:
    out = lin / est.reshape(1, 1, 3)
    m = out.max()
    if m > 0:
        out = out / m
    return out


def _finish(lin_out: np.ndarray, est: IlluminantEstimate):
    return Image(srgb_encode(np.clip(lin_out, 0.0, 1.0)), ColorSpace.SRGB8), est


def gray_world(img: Image) -> tuple[Image, IlluminantEstimate]:
    """Illuminant from per-channel means, von Kries correction."""
    if img.channels != 3:
        raise DegenerateChannelError("gray_world needs a 3-channel image")
    lin = srgb_decode(img.data)
    means = lin.mean(axis=(0, 1))
    if np.any(means <= 0):
        raise DegenerateChannelError("channel with zero mean")
    est = IlluminantEstimate(means)
    return _finish(_von_kries(lin, est.rgb), est)


def _gaussian_deriv_energy(chan: np.ndarray, order: int, sigma: float) -> np.ndarray:
    """|n-th Gaussian derivative| magnitude of one channel."""
    if sigma > 0:
        if order == 0:
            return np.abs(ndimage.gaussian_filter(chan, sigma, mode="reflect"))
        dx = ndimage.gaussian_filter(chan, sigma, order=(0, order), mode="reflect")
        dy = ndimage.gaussian_filter(chan, sigma, order=(order, 0), mode="reflect")
        return np.hypot(dx, dy)
    if order == 0:
        return np.abs(chan)
    kernel = np.array([-0.5, 0.0, 0.5]) if order == 1 else np.array([1.0, -2.0, 1.0])
    dx = ndimage.correlate1d(chan, kernel, axis=1, mode="reflect")
    dy = ndimage.correlate1d(chan, kernel, axis=0, mode="reflect")
    return np.hypot(dx, dy)


def gray_edge(img: Image, order: int = 1, minkowski_p: float = 1.0,
              sigma: float = 6.0, weights: np.ndarray | None = None
              ) -> tuple[Image, IlluminantEstimate]:
    """Gray-Edge family e(n, p, sigma); n=0 reduces to Shades-of-Gray."""
    if img.channels != 3:
        raise DegenerateChannelError("gray_edge needs a 3-channel image")
    if minkowski_p < 1:
        raise ValueError("minkowski_p must be >= 1")
    lin = srgb_decode(img.data)
    est_rgb = np.empty(3)
    for c in range(3):
        energy = _gaussian_deriv_energy(lin[..., c], order, sigma)
        if weights is not None:
            energy = energy * weights
        est_rgb[c] = np.mean(energy ** minkowski_p) ** (1.0 / minkowski_p)
    if np.any(est_rgb <= 0):
        est = IlluminantEstimate(np.ones(3), fallback=True)
        return _finish(lin, est)
    est = IlluminantEstimate(est_rgb)
    return _finish(_von_kries(lin, est.rgb), est)


def _angular_deg(a: np.ndarray, b: np.ndarray) -> float:
    cosv = np.clip(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)), -1, 1)
    return float(np.degrees(np.arccos(cosv)))


def weighted_gray_edge(img: Image, iterations: int = 10, kappa: float = 10.0,
                       order: int = 1, minkowski_p: float = 1.0,
                       sigma: float = 2.0) -> tuple[Image, IlluminantEstimate]:
    """Iterative Gray-Edge with specular-edge weighting.

    Edges whose RGB derivative is aligned with the current illuminant
    estimate (quasi-specular edges) are up-weighted by |cos|^kappa of the
    angle between derivative color and estimate.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if img.channels != 3:
        raise DegenerateChannelError("weighted_gray_edge needs a 3-channel image")
    lin = srgb_decode(img.data)

    # per-channel derivative vectors for the weighting
    deriv = np.stack([_gaussian_deriv_energy(lin[..., c], order, sigma)
                      for c in range(3)], axis=-1)
    norms = np.linalg.norm(deriv, axis=-1)
    if not np.any(norms > 0):
        est = IlluminantEstimate(np.ones(3), fallback=True)
        return _finish(lin, est)

    est_rgb = np.ones(3) / np.sqrt(3.0)
    for _ in range(iterations):
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = np.where(norms > 0,
                              (deriv @ est_rgb) / np.where(norms > 0, norms, 1.0),
                              0.0)
        w = np.abs(cosang) ** kappa
        new = np.empty(3)
        for c in range(3):
            new[c] = np.mean((deriv[..., c] * w) ** minkowski_p) ** (1.0 / minkowski_p)
        if np.any(new <= 0):
            break
        new = new / np.linalg.norm(new)
        delta = _angular_deg(new, est_rgb)
        est_rgb = new
        if delta < 0.001:
            break
    est = IlluminantEstimate(est_rgb)
    return _finish(_von_kries(lin, est.rgb), est)


_LOG_FLOOR = 1.0 / 255.0


def _mccann_step(op: np.ndarray, logi: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """One ratio-product-reset-average update for a single shift."""
    sp = np.roll(op, (dy, dx), axis=(0, 1))
    sl = np.roll(logi, (dy, dx), axis=(0, 1))
    product = sp + (logi - sl)
    product = np.minimum(product, 0.0)  # reset: clamp at the global maximum
    return 0.5 * (op + product)


def retinex_frankle_mccann(img: Image, iterations: int = 4) -> Image:
    """Frankle-McCann Retinex: log-domain ratio-product-reset-average over
    power-of-two shift distances, largest first."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    lin = srgb_decode(img.data) if img.space == ColorSpace.SRGB8 else img.data
    out = np.empty_like(lin)
    h, w = lin.shape[:2]
    shift = 1
    while shift * 2 < max(h, w):
        shift *= 2
    for c in range(lin.shape[2]):
        logi = np.log(np.maximum(lin[..., c], _LOG_FLOOR))
        logi = logi - logi.max()
        op = np.zeros_like(logi)  # start at the global maximum
        d = shift
        while d >= 1:
            for dy, dx in ((0, d), (d, 0), (0, -d), (-d, 0)):
                for _ in range(iterations):
                    op = _mccann_step(op, logi, dy, dx)
            d //= 2
        est = np.exp(op)
        out[..., c] = est / max(est.max(), 1e-12)
    return Image(srgb_encode(np.clip(out, 0.0, 1.0)), ColorSpace.SRGB8)


def _downsample2(a: np.ndarray) -> np.ndarray:
    h, w = a.shape
    return a[:h - h % 2, :w - w % 2].reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))


def _upsample_to(a: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    ry = np.minimum(np.arange(shape[0]) // 2, a.shape[0] - 1)
    rx = np.minimum(np.arange(shape[1]) // 2, a.shape[1] - 1)
    return a[np.ix_(ry, rx)]


def retinex_mccann99(img: Image, iterations_per_level: int = 4) -> Image:
    """McCann99 Retinex: coarse-to-fine pyramid of McCann iterations."""
    if iterations_per_level < 1:
        raise ValueError("iterations_per_level must be >= 1")
    lin = srgb_decode(img.data) if img.space == ColorSpace.SRGB8 else img.data
    out = np.empty_like(lin)
    for c in range(lin.shape[2]):
        logi = np.log(np.maximum(lin[..., c], _LOG_FLOOR))
        logi = logi - logi.max()
        pyramid = [logi]
        while min(pyramid[-1].shape) > 32:
            pyramid.append(_downsample2(pyramid[-1]))
        op = np.zeros_like(pyramid[-1])
        for level in reversed(range(len(pyramid))):
            li = pyramid[level]
            if op.shape != li.shape:
                op = _upsample_to(op, li.shape)
            for _ in range(iterations_per_level):
                for dy, dx in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                    op = _mccann_step(op, li, dy, dx)
        est = np.exp(op)
        out[..., c] = est / max(est.max(), 1e-12)
    return Image(srgb_encode(np.clip(out, 0.0, 1.0)), ColorSpace.SRGB8)


def _norm_none(img: Image) -> Image:
    return img


NORMALIZERS = {
    "none": _norm_none,
    "gray-world": lambda img, **kw: gray_world(img)[0],
    "gray-edge": lambda img, **kw: gray_edge(img, **kw)[0],
    "weighted-gray-edge": lambda img, **kw: weighted_gray_edge(img, **kw)[0],
    "retinex-frankle": lambda img, **kw: retinex_frankle_mccann(img, **kw),
    "retinex-mccann99": lambda img, **kw: retinex_mccann99(img, **kw),
}


def normalize(img: Image, name: str, **params) -> Image:
    """Apply a normalizer selected by name; 'none' is the identity."""
    if name not in NORMALIZERS:
        raise KeyError(f"unknown normalizer {name!r}; choose from {sorted(NORMALIZERS)}")
    if name == "none":
        return img
    return NORMALIZERS[name](img, **params)

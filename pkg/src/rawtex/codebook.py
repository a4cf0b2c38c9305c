"""Dense SIFT local features, codebook training and BoVW/VLAD/FV encoders."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .features import FeatureVector, check_dim
from .imgcore import Patch, to_grayscale

SIFT_DIM = 128
SPATIAL_BINS = 4
BIN_EXTENT = 6           # pixels per spatial bin
SUPPORT = SPATIAL_BINS * BIN_EXTENT  # 24
N_ORI = 8
STRIDE = 2
N_SCALES = 5             # scales 2^(i/3), i = 0..4
BASE_SIGMA = 1.0

BOVW_K = 1024
VLAD_K = 200             # 25600 / 128
FV_K = 160               # 40960 / (2 * 128)


class CodebookError(ValueError):
    pass


@dataclass
class LocalDescriptorSet:
    descriptors: np.ndarray  # (n, 128) float64
    positions: np.ndarray    # (n, 3): x, y, scale


@dataclass
class Codebook:
    words: np.ndarray        # (k, 128)
    training_fingerprint: str

    @property
    def k(self) -> int:
        return self.words.shape[0]


@dataclass
class GaussianMixture:
    weights: np.ndarray      # (k,), sums to 1
    means: np.ndarray        # (k, 128)
    variances: np.ndarray    # (k, 128) diagonal, floored
    training_fingerprint: str = ""

    @property
    def k(self) -> int:
        return self.weights.shape[0]


def corpus_fingerprint(descriptors: np.ndarray, seed: int) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(descriptors, dtype=np.float64).tobytes())
    h.update(str(seed).encode())
    return h.hexdigest()[:16]


def _sift_grid(lum: np.ndarray) -> np.ndarray:
    """128-d descriptors on the stride-2 grid of one smoothed image."""
    gx = np.zeros_like(lum)
    gy = np.zeros_like(lum)
    gx[:, 1:-1] = 0.5 * (lum[:, 2:] - lum[:, :-2])
    gy[1:-1, :] = 0.5 * (lum[2:, :] - lum[:-2, :])
    mag = np.hypot(gx, gy)
    ori = np.arctan2(gy, gx) % (2 * np.pi)
    obin = np.minimum((ori / (2 * np.pi) * N_ORI).astype(np.int64), N_ORI - 1)

    h, w = lum.shape
    # box sums of each orientation plane over BIN_EXTENT x BIN_EXTENT windows
    planes = np.zeros((N_ORI, h, w))
    idx = np.arange(h * w)
    np.add.at(planes.reshape(N_ORI, -1), (obin.ravel(), idx), mag.ravel())
    csum = planes.cumsum(axis=1).cumsum(axis=2)
    z = np.zeros((N_ORI, h + 1, w + 1))
    z[:, 1:, 1:] = csum
    e = BIN_EXTENT
    box = (z[:, e:, e:] - z[:, :-e, e:] - z[:, e:, :-e] + z[:, :-e, :-e])
    # box[:, y, x] = sum over rows y..y+e-1, cols x..x+e-1

    pos = np.arange(0, h - SUPPORT + 1, STRIDE)
    n = pos.size
    desc = np.empty((n * n, SPATIAL_BINS, SPATIAL_BINS, N_ORI))
    for by in range(SPATIAL_BINS):
        for bx in range(SPATIAL_BINS):
            block = box[:, pos[:, None] + by * e, pos[None, :] + bx * e]
            desc[:, by, bx, :] = block.reshape(N_ORI, -1).T
    desc = desc.reshape(n * n, SIFT_DIM)

    norms = np.linalg.norm(desc, axis=1, keepdims=True)
    nz = norms[:, 0] > 0
    desc[nz] /= norms[nz]
    desc = np.minimum(desc, 0.2)       # clip, then renormalize
    norms = np.linalg.norm(desc, axis=1, keepdims=True)
    desc[nz] /= norms[nz]
    return desc


def dense_sift(patch: Patch) -> LocalDescriptorSet:
    """Dense SIFT over 5 smoothing scales 2^(i/3), stride 2, 24px support."""
    lum = to_grayscale(patch.image).data[..., 0]
    all_desc, all_pos = [], []
    grid = np.arange(0, lum.shape[0] - SUPPORT + 1, STRIDE) + SUPPORT / 2
    for i in range(N_SCALES):
        scale = 2.0 ** (i / 3.0)
        smoothed = ndimage.gaussian_filter(lum, BASE_SIGMA * scale,
                                           mode="reflect") if i else lum
        desc = _sift_grid(smoothed)
        xs, ys = np.meshgrid(grid, grid)
        pos = np.stack([xs.ravel(), ys.ravel(),
                        np.full(xs.size, scale)], axis=1)
        all_desc.append(desc)
        all_pos.append(pos)
    return LocalDescriptorSet(np.concatenate(all_desc), np.concatenate(all_pos))


def nearest_words(descriptors: np.ndarray, words: np.ndarray,
                  chunk: int = 2048) -> np.ndarray:
    """Index of the L2-nearest word for each descriptor."""
    out = np.empty(descriptors.shape[0], dtype=np.int64)
    w2 = (words ** 2).sum(axis=1)
    for s in range(0, descriptors.shape[0], chunk):
        d = descriptors[s:s + chunk]
        d2 = (d ** 2).sum(axis=1, keepdims=True)
        dist = d2 - 2.0 * d @ words.T + w2[None, :]
        out[s:s + chunk] = dist.argmin(axis=1)
    return out


def kmeans(descriptors: np.ndarray, k: int, seed: int,
           max_iter: int = 100, tol: float = 1e-4) -> Codebook:
    """Seeded k-means++ plus Lloyd iterations; deterministic for a fixed seed."""
    descriptors = np.asarray(descriptors, dtype=np.float64)
    if np.unique(descriptors, axis=0).shape[0] < k:
        raise CodebookError(f"need at least {k} distinct vectors")
    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centers = np.empty((k, descriptors.shape[1]))
    centers[0] = descriptors[rng.integers(descriptors.shape[0])]
    d2 = ((descriptors - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = descriptors[rng.integers(descriptors.shape[0])]
        else:
            centers[j] = descriptors[rng.choice(descriptors.shape[0],
                                                p=d2 / total)]
        d2 = np.minimum(d2, ((descriptors - centers[j]) ** 2).sum(axis=1))

    prev_inertia = np.inf
    for _ in range(max_iter):
        assign = nearest_words(descriptors, centers)
        inertia = ((descriptors - centers[assign]) ** 2).sum()
        for j in range(k):
            members = descriptors[assign == j]
            if members.shape[0]:
                centers[j] = members.mean(axis=0)
        if prev_inertia - inertia <= tol * max(prev_inertia, 1e-300):
            break
        prev_inertia = inertia
    return Codebook(centers, corpus_fingerprint(descriptors, seed))


VAR_FLOOR = 1e-6


def _log_gauss(x: np.ndarray, gmm_means, gmm_vars, gmm_w) -> np.ndarray:
    """(n, k) log of weight * diagonal normal density."""
    n, d = x.shape
    out = np.empty((n, gmm_means.shape[0]))
    for j in range(gmm_means.shape[0]):
        diff = x - gmm_means[j]
        out[:, j] = (np.log(gmm_w[j])
                     - 0.5 * (d * np.log(2 * np.pi)
                              + np.log(gmm_vars[j]).sum()
                              + (diff ** 2 / gmm_vars[j]).sum(axis=1)))
    return out


def gmm_em(descriptors: np.ndarray, k: int, seed: int,
           max_iter: int = 100, tol: float = 1e-5) -> GaussianMixture:
    """Diagonal-covariance EM initialized from k-means."""
    x = np.asarray(descriptors, dtype=np.float64)
    if x.shape[0] < 10 * k:
        raise CodebookError(f"need at least {10 * k} vectors for {k} components")
    cb = kmeans(x, k, seed)
    assign = nearest_words(x, cb.words)
    weights = np.bincount(assign, minlength=k).astype(np.float64)
    weights = np.maximum(weights, 1.0)
    weights /= weights.sum()
    means = cb.words.copy()
    variances = np.empty_like(means)
    gvar = np.maximum(x.var(axis=0), VAR_FLOOR)
    for j in range(k):
        members = x[assign == j]
        variances[j] = np.maximum(members.var(axis=0), VAR_FLOOR) \
            if members.shape[0] > 1 else gvar

    rng = np.random.default_rng(seed + 1)
    reseeded = False
    prev_ll = -np.inf
    for _ in range(max_iter):
        lg = _log_gauss(x, means, variances, weights)
        mx = lg.max(axis=1, keepdims=True)
        lse = mx[:, 0] + np.log(np.exp(lg - mx).sum(axis=1))
        ll = lse.mean()
        resp = np.exp(lg - lse[:, None])
        nk = resp.sum(axis=0)
        if np.any(nk / x.shape[0] < 1e-8):
            if reseeded:
                raise CodebookError("degenerate mixture component")
            reseeded = True
            for j in np.where(nk / x.shape[0] < 1e-8)[0]:
                means[j] = x[rng.integers(x.shape[0])]
                variances[j] = gvar
            continue
        weights = nk / nk.sum()
        means = (resp.T @ x) / nk[:, None]
        variances = np.maximum(
            (resp.T @ (x ** 2)) / nk[:, None] - means ** 2, VAR_FLOOR)
        if ll - prev_ll < tol and np.isfinite(prev_ll):
            break
        prev_ll = ll
    return GaussianMixture(weights, means, variances,
                           corpus_fingerprint(x, seed))


def encode_bovw(local: LocalDescriptorSet, cb: Codebook) -> FeatureVector:
    """Hard-assignment word histogram, normalized to sum 1."""
    if local.descriptors.shape[0] == 0:
        raise CodebookError("empty descriptor set")
    assign = nearest_words(local.descriptors, cb.words)
    h = np.bincount(assign, minlength=cb.k).astype(np.float64)
    return check_dim(FeatureVector("bovw", h / h.sum()), cb.k)


def encode_vlad(local: LocalDescriptorSet, cb: Codebook) -> FeatureVector:
    """Residual aggregation with signed-sqrt and global L2 normalization."""
    if local.descriptors.shape[0] == 0:
        raise CodebookError("empty descriptor set")
    assign = nearest_words(local.descriptors, cb.words)
    agg = np.zeros((cb.k, local.descriptors.shape[1]))
    np.add.at(agg, assign, local.descriptors - cb.words[assign])
    v = agg.ravel()
    v = np.sign(v) * np.sqrt(np.abs(v))
    n = np.linalg.norm(v)
    if n > 0:
        v = v / n
    return check_dim(FeatureVector("vlad", v), cb.k * local.descriptors.shape[1])


def encode_fv(local: LocalDescriptorSet, gmm: GaussianMixture) -> FeatureVector:
    """Improved Fisher vector: mean and variance gradients, signed-sqrt, L2."""
    x = local.descriptors
    if x.shape[0] == 0:
        raise CodebookError("empty descriptor set")
    n, d = x.shape
    lg = _log_gauss(x, gmm.means, gmm.variances, gmm.weights)
    mx = lg.max(axis=1, keepdims=True)
    resp = np.exp(lg - mx)
    resp /= resp.sum(axis=1, keepdims=True)

    sigma = np.sqrt(gmm.variances)
    g_mu = np.empty((gmm.k, d))
    g_var = np.empty((gmm.k, d))
    for j in range(gmm.k):
        u = (x - gmm.means[j]) / sigma[j]
        r = resp[:, j][:, None]
        g_mu[j] = (r * u).sum(axis=0) / (n * np.sqrt(gmm.weights[j]))
        g_var[j] = (r * (u ** 2 - 1.0)).sum(axis=0) / (n * np.sqrt(2 * gmm.weights[j]))
    v = np.concatenate([g_mu.ravel(), g_var.ravel()])
    v = np.sign(v) * np.sqrt(np.abs(v))
    norm = np.linalg.norm(v)
    if norm > 0:
        v = v / norm
    return check_dim(FeatureVector("fv", v), 2 * gmm.k * d)

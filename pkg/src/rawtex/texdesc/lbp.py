"""Local binary patterns (P=16, R=2, uniform), opponent-color LBP and the
local color contrast descriptor."""

from __future__ import annotations

import math

import numpy as np

from ..features import FeatureVector, check_dim
from ..imgcore import ColorSpace, Patch, convert, quantize8, to_grayscale

P = 16
R = 2.0
N_BINS = P * (P - 1) + 3  # 243
BORDER = 2  # valid region only; no phantom edge responses

def _snap(v: float) -> float:
    # exact-integer offsets must stay exact so comparisons are reproducible
    return round(v) if abs(v - round(v)) < 1e-9 else v


# neighbor sample offsets (dy, dx), counter-clockwise from the +x axis
_OFFSETS = [(_snap(-R * math.sin(2 * math.pi * k / P)),
             _snap(R * math.cos(2 * math.pi * k / P)))
            for k in range(P)]


def _build_uniform_lut() -> np.ndarray:
    """Bin index for every 16-bit pattern: all-zeros first, uniform patterns
    ordered by (ones count, rotation index), all-ones, then the catch-all."""
    codes = np.arange(1 << P, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(P)) & 1).astype(np.uint8)
    ones = bits.sum(axis=1)
    rot1 = np.roll(bits, 1, axis=1)
    transitions = (bits != rot1).sum(axis=1)
    uniform = transitions <= 2
    # a uniform non-constant pattern is a single circular run of ones; its
    # rotation index is the run start (the one whose predecessor is zero)
    run_start = np.argmax((bits == 1) & (rot1 == 0), axis=1)
    lut = np.full(codes.shape, N_BINS - 1, dtype=np.int64)  # catch-all
    lut[(ones == 0)] = 0
    mid = uniform & (ones > 0) & (ones < P)
    lut[mid] = 1 + (ones[mid] - 1) * P + run_start[mid]
    lut[(ones == P)] = 1 + P * (P - 1)  # 241
    return lut


_LUT = _build_uniform_lut()


def _neighbor_samples(chan: np.ndarray) -> np.ndarray:
    """(P, Hv, Wv) bilinear neighbor samples over the valid region."""
    h, w = chan.shape
    hv, wv = h - 2 * BORDER, w - 2 * BORDER
    # one extra edge row/col so integer offsets (interp weight exactly 0)
    # can still slice a +1 window
    padded = np.pad(chan, ((0, 1), (0, 1)), mode="edge")
    out = np.empty((P, hv, wv))
    for k, (dy, dx) in enumerate(_OFFSETS):
        y0, x0 = math.floor(dy), math.floor(dx)
        fy, fx = dy - y0, dx - x0
        base_y, base_x = BORDER + y0, BORDER + x0
        blocks = padded[base_y:base_y + hv + 1, base_x:base_x + wv + 1]
        out[k] = ((1 - fy) * (1 - fx) * blocks[:hv, :wv]
                  + (1 - fy) * fx * blocks[:hv, 1:wv + 1]
                  + fy * (1 - fx) * blocks[1:hv + 1, :wv]
                  + fy * fx * blocks[1:hv + 1, 1:wv + 1])
    return out


def lbp_codes(center_chan: np.ndarray, neighbor_chan: np.ndarray | None = None
              ) -> np.ndarray:
    """Pattern codes over the valid region; neighbors may come from a second
    channel (opponent variant)."""
    if neighbor_chan is None:
        neighbor_chan = center_chan
    samples = _neighbor_samples(neighbor_chan)
    center = center_chan[BORDER:-BORDER, BORDER:-BORDER]
    codes = np.zeros(center.shape, dtype=np.uint32)
    for k in range(P):
        codes |= (samples[k] >= center).astype(np.uint32) << k
    return codes


def lbp_histogram(center_chan: np.ndarray,
                  neighbor_chan: np.ndarray | None = None) -> np.ndarray:
    """Normalized 243-bin uniform-pattern histogram."""
    bins = _LUT[lbp_codes(center_chan, neighbor_chan)]
    h = np.bincount(bins.ravel(), minlength=N_BINS).astype(np.float64)
    return h / h.sum()


def _space_channels(patch: Patch, space: str) -> list[np.ndarray]:
    """8-bit quantized channel planes for the requested LBP space."""
    img = patch.image
    if space == "l":
        return [quantize8(to_grayscale(img).data[..., 0]).astype(np.float64)]
    if space == "rgb":
        return [quantize8(img.data[..., c]).astype(np.float64) for c in range(3)]
    if space == "lab":
        lab = convert(img, ColorSpace.LAB).data
        # affine scaling to [0,1] nominal ranges; LBP is offset/gain invariant
        planes = [lab[..., 0] / 100.0,
                  (lab[..., 1] + 110.0) / 220.0,
                  (lab[..., 2] + 110.0) / 220.0]
        return [quantize8(np.clip(p, 0, 1)).astype(np.float64) for p in planes]
    if space == "ohta":
        ohta = convert(img, ColorSpace.OHTA).data
        return [quantize8(np.clip(ohta[..., c], 0, 1)).astype(np.float64)
                for c in range(3)]
    raise ValueError(f"unknown LBP space {space!r}")


def lbp(patch: Patch, space: str = "l") -> FeatureVector:
    chans = _space_channels(patch, space)
    vec = np.concatenate([lbp_histogram(c) for c in chans])
    return check_dim(FeatureVector(f"lbp-{space}", vec),
                     N_BINS * len(chans))


OPPONENT_PAIRS = ((0, 1), (0, 2), (1, 2))  # (R,G), (R,B), (G,B)


def oclbp(patch: Patch) -> FeatureVector:
    """Intra-channel LBP on R, G, B plus inter-channel LBP where the center
    comes from the first channel and neighbors from the second."""
    chans = _space_channels(patch, "rgb")
    blocks = [lbp_histogram(c) for c in chans]
    for a, b in OPPONENT_PAIRS:
        blocks.append(lbp_histogram(chans[a], chans[b]))
    return check_dim(FeatureVector("oclbp", np.concatenate(blocks)), 6 * N_BINS)


N_CONTRAST_BINS = 256


def local_color_contrast(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel angle between the RGB vector and the mean RGB of its 16
    LBP neighbor samples, over the valid region."""
    samples = np.stack([_neighbor_samples(rgb[..., c]) for c in range(3)], axis=-1)
    mean_nb = samples.mean(axis=0)
    center = rgb[BORDER:-BORDER, BORDER:-BORDER, :]
    dot = (center * mean_nb).sum(axis=-1)
    na = np.linalg.norm(center, axis=-1)
    nb = np.linalg.norm(mean_nb, axis=-1)
    denom = na * nb
    cosang = np.where(denom > 0, dot / np.where(denom > 0, denom, 1.0), 1.0)
    return np.arccos(np.clip(cosang, -1.0, 1.0))


def lcc(patch: Patch) -> FeatureVector:
    """Gray LBP concatenated with a 256-bin histogram of local color
    contrast angles quantized over [0, pi/2]."""
    gray_hist = lbp_histogram(_space_channels(patch, "l")[0])
    angles = local_color_contrast(patch.image.data)
    idx = np.minimum((angles / (math.pi / 2) * N_CONTRAST_BINS).astype(np.int64),
                     N_CONTRAST_BINS - 1)
    h = np.bincount(idx.ravel(), minlength=N_CONTRAST_BINS).astype(np.float64)
    vec = np.concatenate([gray_hist, h / h.sum()])
    return check_dim(FeatureVector("lcc", vec), N_BINS + N_CONTRAST_BINS)

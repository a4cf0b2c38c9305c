"""Image container, color-space conversions and patch handling.

All raster data is stored as float64 in [0, 1] for sRGB/linear/gray images
(8-bit files are decoded as v/255); other spaces use their native ranges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage


class ColorSpace(enum.Enum):
    SRGB8 = "srgb8"
    LINEAR_RGB = "linear_rgb"
    GRAY = "gray"
    HSV = "hsv"
    LAB = "lab"
    OHTA = "ohta"
    CHROMATICITY_RGB = "chromaticity_rgb"


# sRGB <-> XYZ (D65) matrices, IEC 61966-2-1
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

# D65 reference white
_WHITE_XYZ = _RGB_TO_XYZ @ np.ones(3)


class InvalidImageError(ValueError):
    pass


@dataclass(frozen=True)
class Image:
    """H x W x C raster with a declared color space."""

    data: np.ndarray  # (H, W, C) float64
    space: ColorSpace

    def __post_init__(self):
        d = self.data
        if d.ndim != 3 or d.shape[2] not in (1, 3):
            raise InvalidImageError(f"expected (H, W, 1|3) array, got {d.shape}")
        if not np.issubdtype(d.dtype, np.floating):
            object.__setattr__(self, "data", d.astype(np.float64))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class Patch:
    """A 200x200 tile of a texture image with its provenance."""

    image: Image
    class_id: int
    condition_id: str
    grid_pos: tuple[int, int]

    def __post_init__(self):
        if self.image.height != 200 or self.image.width != 200:
            raise InvalidImageError("patches must be 200x200")
        r, c = self.grid_pos
        if not (0 <= r < 4 and 0 <= c < 4):
            raise InvalidImageError(f"grid_pos {self.grid_pos} outside 4x4 grid")


def srgb_decode(v: np.ndarray) -> np.ndarray:
    """sRGB electro-optical transfer (gamma decode), IEC 61966-2-1."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def srgb_encode(v: np.ndarray) -> np.ndarray:
    """Inverse of srgb_decode."""
    v = np.asarray(v, dtype=np.float64)
    v = np.clip(v, 0.0, 1.0)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1 / 2.4) - 0.055)


def to_grayscale(img: Image) -> Image:
    """Luminance L = 0.299 R + 0.587 G + 0.114 B of an sRGB image."""
    if img.channels != 3:
        raise InvalidImageError("to_grayscale needs a 3-channel image")
    r, g, b = img.data[..., 0], img.data[..., 1], img.data[..., 2]
    lum = 0.299 * r + 0.587 * g + 0.114 * b
    return Image(lum[..., None], ColorSpace.GRAY)


def _to_hsv(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = rgb.max(axis=-1)
    c = v - rgb.min(axis=-1)
    s = np.where(v > 0, c / np.where(v > 0, v, 1.0), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(c > 0, np.select(
            [v == r, v == g],
            [(g - b) / np.where(c > 0, c, 1.0),
             2.0 + (b - r) / np.where(c > 0, c, 1.0)],
            4.0 + (r - g) / np.where(c > 0, c, 1.0)), 0.0)
    h = (h / 6.0) % 1.0
    return np.stack([h, s, v], axis=-1)


def _to_lab(rgb: np.ndarray) -> np.ndarray:
    lin = srgb_decode(rgb)
    xyz = lin @ _RGB_TO_XYZ.T
    t = xyz / _WHITE_XYZ
    eps = (6 / 29) ** 3
    f = np.where(t > eps, np.cbrt(t), t / (3 * (6 / 29) ** 2) + 4 / 29)
    lstar = 116 * f[..., 1] - 16
    astar = 500 * (f[..., 0] - f[..., 1])
    bstar = 200 * (f[..., 1] - f[..., 2])
    return np.stack([lstar, astar, bstar], axis=-1)


def _to_ohta(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    i1 = (r + g + b) / 3.0
    i2 = (r - b) / 2.0 + 0.5
    i3 = (2 * g - r - b) / 4.0 + 0.5
    return np.stack([i1, i2, i3], axis=-1)


def rgb_chromaticity(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel (r, g, b) ratios; black pixels map to the neutral (1/3, 1/3, 1/3)."""
    s = rgb.sum(axis=-1, keepdims=True)
    out = np.where(s > 0, rgb / np.where(s > 0, s, 1.0), 1.0 / 3.0)
    return out


def convert(img: Image, target: ColorSpace) -> Image:
    """Convert a 3-channel sRGB image to HSV, Lab, Ohta or rgb chromaticity."""
    if img.channels != 3 or img.space != ColorSpace.SRGB8:
        raise InvalidImageError("convert expects a 3-channel SRGB8 image")
    if target == ColorSpace.HSV:
        return Image(_to_hsv(img.data), target)
    if target == ColorSpace.LAB:
        return Image(_to_lab(img.data), target)
    if target == ColorSpace.OHTA:
        return Image(_to_ohta(img.data), target)
    if target == ColorSpace.CHROMATICITY_RGB:
        return Image(rgb_chromaticity(img.data), target)
    raise InvalidImageError(f"unsupported conversion target {target}")


def extract_patches(img: Image, class_id: int, condition_id: str) -> list[Patch]:
    """Cut an 800x800 texture into its 4x4 grid of 200x200 patches."""
    if img.height != 800 or img.width != 800:
        raise InvalidImageError(f"expected 800x800 image, got {img.height}x{img.width}")
    patches = []
    for r in range(4):
        for c in range(4):
            tile = img.data[r * 200:(r + 1) * 200, c * 200:(c + 1) * 200, :]
            patches.append(Patch(Image(tile.copy(), img.space), class_id,
                                 condition_id, (r, c)))
    return patches


def chessboard_split(patches: list[Patch]) -> tuple[list[Patch], list[Patch]]:
    """Partition the 16 grid patches by coordinate parity: even sum trains."""
    if len(patches) != 16 or len({p.grid_pos for p in patches}) != 16:
        raise InvalidImageError("need 16 patches with distinct grid positions")
    train = [p for p in patches if (p.grid_pos[0] + p.grid_pos[1]) % 2 == 0]
    test = [p for p in patches if (p.grid_pos[0] + p.grid_pos[1]) % 2 == 1]
    return train, test


def read_png(path) -> Image:
    """Read an 8-bit PNG; byte v maps to v/255 exactly."""
    with PILImage.open(path) as im:
        if im.mode in ("RGB", "L"):
            arr = np.asarray(im)
        elif im.mode in ("RGBA", "P", "LA"):
            arr = np.asarray(im.convert("RGB"))
        else:
            raise InvalidImageError(f"unsupported PNG mode {im.mode} in {path}")
    data = arr.astype(np.float64) / 255.0
    if data.ndim == 2:
        return Image(data[..., None], ColorSpace.GRAY)
    return Image(data, ColorSpace.SRGB8)


def write_png(img: Image, path) -> None:
    """Write an image as 8-bit PNG (values rounded to v*255)."""
    q = np.clip(np.round(img.data * 255.0), 0, 255).astype(np.uint8)
    if img.channels == 1:
        PILImage.fromarray(q[..., 0], mode="L").save(path)
    else:
        PILImage.fromarray(q, mode="RGB").save(path)


def quantize8(values: np.ndarray) -> np.ndarray:
    """Re-quantize [0,1] samples to integer 8-bit levels (round(v*255))."""
    return np.clip(np.round(np.asarray(values) * 255.0), 0, 255).astype(np.int64)

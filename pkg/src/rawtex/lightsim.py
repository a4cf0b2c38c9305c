"""Lighting-condition catalog, illuminant math and synthetic texture rendering.

The catalog enumerates the 46 shot conditions (intensity, direction, daylight
and LED temperature, combined color/direction, multi-illuminant, primaries).
Rendering applies, in order: illuminant color, direction shading, intensity,
then sRGB encoding.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .imgcore import (ColorSpace, Image, srgb_decode, srgb_encode, write_png,
                      read_png, _XYZ_TO_RGB)


class ConditionKind(enum.Enum):
    INTENSITY = "intensity"
    DIRECTION = "direction"
    DAYLIGHT = "daylight"
    LED = "led"
    COLOR_AND_DIRECTION = "color_and_direction"
    MULTI_ILLUMINANT = "multi_illuminant"
    PRIMARY = "primary"


DAYLIGHT_CCTS = tuple(range(4000, 10000, 500))            # D40 .. D95
LED_CCTS = (2700, 3000, 4000, 5000, 5700, 6500)           # L27 .. L65
DIRECTION_ANGLES = (24, 30, 36, 42, 48, 54, 60, 66, 90)
INTENSITY_LEVELS = (1.0, 0.75, 0.5, 0.25)
COMBO_COLORS = ("d65", "d95", "l27")
COMBO_ANGLES = (24, 60, 90)
MULTI_PAIRS = (("d65", "d95"), ("d65", "l27"), ("d95", "l27"))
PRIMARIES = ("r", "g", "b")


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Chromaticity:
    x: float
    y: float


@dataclass(frozen=True)
class LightCondition:
    id: str
    kind: ConditionKind
    intensity: float = 1.0
    theta: float = 90.0
    cct: float = 6500.0
    pair: tuple[str, str] | None = None
    primary: str | None = None

    def params(self) -> dict:
        d = {"kind": self.kind.value, "intensity": self.intensity,
             "theta": self.theta, "cct": self.cct}
        if self.pair is not None:
            d["pair"] = list(self.pair)
        if self.primary is not None:
            d["primary"] = self.primary
        return d


def _color_cct(name: str) -> float:
    # "d65" -> 6500 K, "l27" -> 2700 K
    return {"d65": 6500.0, "d95": 9500.0, "l27": 2700.0}[name]


def condition_catalog() -> list[LightCondition]:
    """The full 46-condition program, group sizes (4, 9, 12, 6, 9, 3, 3)."""
    out = []
    for f in INTENSITY_LEVELS:
        out.append(LightCondition(f"int{int(f * 100):03d}",
                                  ConditionKind.INTENSITY, intensity=f))
    for th in DIRECTION_ANGLES:
        out.append(LightCondition(f"dir{th:02d}", ConditionKind.DIRECTION, theta=th))
    for t in DAYLIGHT_CCTS:
        out.append(LightCondition(f"d{t // 100:02d}", ConditionKind.DAYLIGHT, cct=t))
    for t in LED_CCTS:
        out.append(LightCondition(f"l{t // 100:02d}", ConditionKind.LED, cct=t))
    for col in COMBO_COLORS:
        for th in COMBO_ANGLES:
            out.append(LightCondition(f"{col}_dir{th:02d}",
                                      ConditionKind.COLOR_AND_DIRECTION,
                                      theta=th, cct=_color_cct(col)))
    for a, b in MULTI_PAIRS:
        out.append(LightCondition(f"multi_{a}_{b}", ConditionKind.MULTI_ILLUMINANT,
                                  pair=(a, b)))
    for p in PRIMARIES:
        out.append(LightCondition(f"prim_{p}", ConditionKind.PRIMARY, primary=p))
    assert len(out) == 46
    return out


def catalog_by_id() -> dict[str, LightCondition]:
    return {c.id: c for c in condition_catalog()}


# Daylight locus coefficients for x(T); low range is 4000-7000 K.
_DAYLIGHT_LOW = (0.244063, 0.09911, 2.9678, -4.6070)
_DAYLIGHT_HIGH = (0.23704, 0.24748, 1.9018, -2.0064)


def cct_to_chromaticity(T: float) -> Chromaticity:
    """Daylight-locus chromaticity for a correlated color temperature in kelvin."""
    if not (4000.0 <= T <= 25000.0):
        raise DomainError(f"CCT {T} outside [4000, 25000] K")
    a0, a1, a2, a3 = _DAYLIGHT_LOW if T <= 7000.0 else _DAYLIGHT_HIGH
    u = 1e3 / T
    x = a0 + a1 * u + a2 * u ** 2 + a3 * u ** 3
    y = -3.0 * x * x + 2.87 * x - 0.275
    return Chromaticity(x, y)


def chromaticity_to_rgb(c: Chromaticity) -> np.ndarray:
    """Map (x, y) at Y=1 to a linear-RGB illuminant scaled so max channel = 1."""
    if c.y <= 0:
        raise DomainError("chromaticity with non-positive y")
    xyz = np.array([c.x / c.y, 1.0, (1.0 - c.x - c.y) / c.y])
    rgb = _XYZ_TO_RGB @ xyz
    rgb = np.clip(rgb, 0.0, None)
    m = rgb.max()
    if m <= 0:
        raise DomainError("degenerate illuminant (all channels non-positive)")
    return rgb / m


# Hook for datasheet LED chromaticities; maps CCT -> (x, y).
LED_CHROMATICITY_OVERRIDES: dict[int, tuple[float, float]] = {}


def illuminant_rgb(cond: LightCondition) -> np.ndarray:
    """Linear-RGB color of a condition's (single) illuminant."""
    if cond.kind == ConditionKind.PRIMARY:
        return {"r": np.array([1.0, 0.0, 0.0]),
                "g": np.array([0.0, 1.0, 0.0]),
                "b": np.array([0.0, 0.0, 1.0])}[cond.primary]
    if cond.kind == ConditionKind.LED and int(cond.cct) in LED_CHROMATICITY_OVERRIDES:
        x, y = LED_CHROMATICITY_OVERRIDES[int(cond.cct)]
        return chromaticity_to_rgb(Chromaticity(x, y))
    t = cond.cct
    if cond.kind == ConditionKind.LED and t < 4000.0:
        # the locus polynomial is only printed for >= 4000 K; extrapolate the
        # low-range cubic for warm LEDs
        a0, a1, a2, a3 = _DAYLIGHT_LOW
        u = 1e3 / t
        x = a0 + a1 * u + a2 * u ** 2 + a3 * u ** 3
        y = -3.0 * x * x + 2.87 * x - 0.275
        return chromaticity_to_rgb(Chromaticity(x, y))
    return chromaticity_to_rgb(cct_to_chromaticity(t))


def apply_illuminant(img: Image, illum: np.ndarray) -> Image:
    """Channel-wise product with a linear-RGB illuminant, clipped to [0, 1]."""
    data = np.clip(img.data * np.asarray(illum).reshape(1, 1, 3), 0.0, 1.0)
    return Image(data, img.space)


def apply_intensity(img: Image, f: float) -> Image:
    """Linear intensity scale by a fraction in (0, 1]."""
    if f <= 0:
        raise DomainError(f"intensity fraction must be positive, got {f}")
    return Image(np.clip(img.data * f, 0.0, 1.0), img.space)


def direction_ramp(height: int, theta: float) -> np.ndarray:
    """Vertical shading ramp S(y) = clamp(1 + beta * (0.5 - y/H), 0, 2)."""
    beta = 0.6 * (90.0 - theta) / 66.0
    y = np.arange(height, dtype=np.float64)
    return np.clip(1.0 + beta * (0.5 - y / height), 0.0, 2.0)


def apply_direction(img: Image, theta: float) -> Image:
    s = direction_ramp(img.height, theta)
    data = np.clip(img.data * s[:, None, None], 0.0, 1.0)
    return Image(data, img.space)


MULTI_BLEND_PX = 64


def _multi_illuminant_field(width: int, cond: LightCondition) -> np.ndarray:
    """(W, 3) illuminant per column: left half A, right half B, linear blend."""
    a = illuminant_rgb(LightCondition("tmp_a", ConditionKind.DAYLIGHT,
                                      cct=_color_cct(cond.pair[0]))
                       if cond.pair[0].startswith("d") else
                       LightCondition("tmp_a", ConditionKind.LED,
                                      cct=_color_cct(cond.pair[0])))
    b = illuminant_rgb(LightCondition("tmp_b", ConditionKind.DAYLIGHT,
                                      cct=_color_cct(cond.pair[1]))
                       if cond.pair[1].startswith("d") else
                       LightCondition("tmp_b", ConditionKind.LED,
                                      cct=_color_cct(cond.pair[1])))
    x = np.arange(width, dtype=np.float64)
    half = width / 2.0
    w = np.clip((x - (half - MULTI_BLEND_PX / 2)) / MULTI_BLEND_PX, 0.0, 1.0)
    return (1.0 - w)[:, None] * a[None, :] + w[:, None] * b[None, :]


def render_condition(tex: Image, cond: LightCondition) -> Image:
    """Render a linear-RGB albedo under one lighting condition, sRGB-encoded."""
    if tex.space != ColorSpace.LINEAR_RGB:
        raise DomainError("render_condition expects a LINEAR_RGB albedo")
    if cond.kind == ConditionKind.MULTI_ILLUMINANT:
        field_ = _multi_illuminant_field(tex.width, cond)
        data = np.clip(tex.data * field_[None, :, :], 0.0, 1.0)
    else:
        data = np.clip(tex.data * illuminant_rgb(cond).reshape(1, 1, 3), 0.0, 1.0)
    data = data * direction_ramp(tex.height, cond.theta)[:, None, None]
    data = np.clip(data * cond.intensity, 0.0, 1.0)
    return Image(srgb_encode(data), ColorSpace.SRGB8)


class GeneratorKind(enum.Enum):
    GRANULAR = "granular"
    BLOB = "blob"
    STRIPE = "stripe"
    MULTIFRACTAL_NOISE = "multifractal_noise"


@dataclass(frozen=True)
class SyntheticClassSpec:
    class_id: int
    generator: GeneratorKind
    base_albedo: tuple[float, float, float]
    grain_scale: float
    seed: int
    stripe_angle: float = 0.0  # degrees, STRIPE only

    def to_dict(self) -> dict:
        return {"class_id": self.class_id, "generator": self.generator.value,
                "base_albedo": list(self.base_albedo),
                "grain_scale": self.grain_scale, "seed": self.seed,
                "stripe_angle": self.stripe_angle}


_TEX_SIZE = 800


def _granular(rng, base, scale):
    n = max(16, int((_TEX_SIZE / scale) ** 2))
    pts = rng.uniform(0, _TEX_SIZE, size=(n, 2))
    shades = np.clip(base[None, :] * rng.uniform(0.55, 1.25, size=(n, 1))
                     + rng.normal(0, 0.03, size=(n, 3)), 0.02, 0.92)
    yy, xx = np.mgrid[0:_TEX_SIZE, 0:_TEX_SIZE]
    grid = np.stack([yy.ravel(), xx.ravel()], axis=1).astype(np.float64)
    _, idx = cKDTree(pts).query(grid, workers=1)
    return shades[idx].reshape(_TEX_SIZE, _TEX_SIZE, 3)


def _blob(rng, base, scale):
    img = np.tile(np.clip(base * 0.45, 0.02, 0.92), (_TEX_SIZE, _TEX_SIZE, 1))
    n = max(20, int((_TEX_SIZE / scale) ** 2 // 3))
    yy, xx = np.mgrid[0:_TEX_SIZE, 0:_TEX_SIZE]
    for _ in range(n):
        cy, cx = rng.uniform(0, _TEX_SIZE, size=2)
        r = rng.uniform(0.4, 1.1) * scale
        col = np.clip(base * rng.uniform(0.7, 1.4) + rng.normal(0, 0.05, 3),
                      0.02, 0.92)
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        img[mask] = col
    return img


def _stripe(rng, base, scale, angle_deg):
    yy, xx = np.mgrid[0:_TEX_SIZE, 0:_TEX_SIZE]
    a = math.radians(angle_deg)
    # stripes run along the given angle: modulate along its normal
    t = xx * math.sin(a) - yy * math.cos(a)
    phase = rng.uniform(0, 2 * math.pi)
    wave = 0.5 + 0.5 * np.sin(2 * math.pi * t / (2 * scale) + phase)
    lo = np.clip(base * 0.4, 0.02, 0.92)
    hi = np.clip(base * 1.1, 0.02, 0.92)
    return lo[None, None, :] + wave[..., None] * (hi - lo)[None, None, :]


def _multifractal(rng, base, scale):
    acc = np.zeros((_TEX_SIZE, _TEX_SIZE))
    octaves, amp, total = 5, 1.0, 0.0
    cell = max(4.0, scale)
    for _ in range(octaves):
        n = max(2, int(round(_TEX_SIZE / cell)) + 1)
        coarse = rng.standard_normal((n, n))
        # bilinear upsample of the coarse lattice
        ys = np.linspace(0, n - 1, _TEX_SIZE)
        xs = np.linspace(0, n - 1, _TEX_SIZE)
        y0 = np.clip(ys.astype(int), 0, n - 2)
        x0 = np.clip(xs.astype(int), 0, n - 2)
        fy, fx = ys - y0, xs - x0
        up = (coarse[np.ix_(y0, x0)] * (1 - fy)[:, None] * (1 - fx)[None, :]
              + coarse[np.ix_(y0 + 1, x0)] * fy[:, None] * (1 - fx)[None, :]
              + coarse[np.ix_(y0, x0 + 1)] * (1 - fy)[:, None] * fx[None, :]
              + coarse[np.ix_(y0 + 1, x0 + 1)] * fy[:, None] * fx[None, :])
        acc += amp * up
        total += amp
        amp *= 0.55
        cell = max(2.0, cell / 2.0)
    acc = (acc - acc.min()) / max(acc.max() - acc.min(), 1e-12)
    lo = np.clip(base * 0.35, 0.02, 0.92)
    hi = np.clip(base * 1.15, 0.02, 0.92)
    return lo[None, None, :] + acc[..., None] * (hi - lo)[None, None, :]


def generate_texture(spec: SyntheticClassSpec) -> Image:
    """Deterministic 800x800 linear-RGB albedo for one synthetic class."""
    rng = np.random.default_rng(spec.seed)
    base = np.asarray(spec.base_albedo, dtype=np.float64)
    if spec.generator == GeneratorKind.GRANULAR:
        data = _granular(rng, base, spec.grain_scale)
    elif spec.generator == GeneratorKind.BLOB:
        data = _blob(rng, base, spec.grain_scale)
    elif spec.generator == GeneratorKind.STRIPE:
        data = _stripe(rng, base, spec.grain_scale, spec.stripe_angle)
    else:
        data = _multifractal(rng, base, spec.grain_scale)
    return Image(np.clip(data, 0.0, 1.0), ColorSpace.LINEAR_RGB)


def default_class_specs(n_classes: int, seed: int) -> list[SyntheticClassSpec]:
    """Fixed family of class specs with hue-separated albedos and mixed generators."""
    rng = np.random.default_rng(seed)
    kinds = [GeneratorKind.GRANULAR, GeneratorKind.BLOB,
             GeneratorKind.STRIPE, GeneratorKind.MULTIFRACTAL_NOISE]
    specs = []
    for i in range(n_classes):
        hue = i / n_classes
        # distinct, moderately saturated albedos kept away from clipping
        base = 0.12 + 0.62 * np.array([
            0.5 + 0.5 * math.cos(2 * math.pi * hue),
            0.5 + 0.5 * math.cos(2 * math.pi * (hue - 1 / 3)),
            0.5 + 0.5 * math.cos(2 * math.pi * (hue - 2 / 3))])
        specs.append(SyntheticClassSpec(
            class_id=i,
            generator=kinds[i % 4],
            base_albedo=tuple(np.round(base, 6)),
            grain_scale=float(10 + 8 * (i % 5)),
            seed=int(rng.integers(0, 2 ** 31)),
            stripe_angle=float((i * 37) % 180)))
    return specs


def write_dataset(root, specs: list[SyntheticClassSpec]) -> None:
    """Render every class under the full catalog into <root>/<class>/<cond>.png."""
    root = str(root)
    catalog = condition_catalog()
    os.makedirs(root, exist_ok=True)
    manifest = {"conditions": [{"id": c.id, **c.params()} for c in catalog],
                "classes": [s.to_dict() for s in specs]}
    with open(os.path.join(root, "catalog.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    for spec in specs:
        cdir = os.path.join(root, str(spec.class_id))
        os.makedirs(cdir, exist_ok=True)
        tex = generate_texture(spec)
        for cond in catalog:
            write_png(render_condition(tex, cond),
                      os.path.join(cdir, f"{cond.id}.png"))


class DatasetError(RuntimeError):
    pass


@dataclass
class Dataset:
    root: str
    class_ids: list[int]
    condition_ids: list[str]
    missing: list[tuple[int, str]] = field(default_factory=list)

    def image_path(self, class_id: int, condition_id: str) -> str:
        return os.path.join(self.root, str(class_id), f"{condition_id}.png")

    def load_image(self, class_id: int, condition_id: str) -> Image:
        return read_png(self.image_path(class_id, condition_id))


def load_dataset(root) -> Dataset:
    """Index a <root>/<class_id>/<condition_id>.png layout against the catalog."""
    root = str(root)
    known = set(catalog_by_id())
    class_ids = sorted(int(d) for d in os.listdir(root)
                       if os.path.isdir(os.path.join(root, d)) and d.isdigit())
    if not class_ids:
        raise DatasetError(f"no class directories under {root}")
    missing = []
    for cid in class_ids:
        present = set()
        cdir = os.path.join(root, str(cid))
        for name in os.listdir(cdir):
            if not name.endswith(".png"):
                continue
            cond = name[:-4]
            if cond not in known:
                raise DatasetError(f"unknown condition id in {os.path.join(cdir, name)}")
            present.add(cond)
        for cond in known - present:
            missing.append((cid, cond))
    cond_order = [c.id for c in condition_catalog()]
    return Dataset(root, class_ids, cond_order, sorted(missing))

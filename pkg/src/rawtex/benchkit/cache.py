"""Bit-exact binary feature cache.

Layout: magic ``RTFX``, format version u16 LE, descriptor name (u16 length +
UTF-8), normalizer name (same), dim u32 LE, entry count u32 LE; then per
entry: class u16, condition-id string (u16 length + UTF-8), grid position u8
(row * 4 + col), dim float32 LE values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"RTFX"
VERSION = 1


class CacheError(RuntimeError):
    pass


@dataclass
class FeatureCache:
    descriptor: str
    normalizer: str
    dim: int
    # (class_id, condition_id, (row, col)) -> float32 vector
    entries: dict[tuple[int, str, tuple[int, int]], np.ndarray]

    def get(self, class_id: int, condition_id: str, grid_pos: tuple[int, int]):
        key = (class_id, condition_id, grid_pos)
        if key not in self.entries:
            raise CacheError(f"missing cache entry {key}")
        return self.entries[key]

    @property
    def class_ids(self) -> list[int]:
        return sorted({k[0] for k in self.entries})


def _write_str(f, s: str) -> None:
    b = s.encode("utf-8")
    f.write(struct.pack("<H", len(b)))
    f.write(b)


def _read_str(f) -> str:
    (n,) = struct.unpack("<H", f.read(2))
    return f.read(n).decode("utf-8")


def write_cache(cache: FeatureCache, path) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", VERSION))
        _write_str(f, cache.descriptor)
        _write_str(f, cache.normalizer)
        f.write(struct.pack("<II", cache.dim, len(cache.entries)))
        for key in sorted(cache.entries):
            class_id, cond_id, (r, c) = key
            vec = np.asarray(cache.entries[key], dtype="<f4")
            if vec.size != cache.dim:
                raise CacheError(f"entry {key} has dim {vec.size} != {cache.dim}")
            f.write(struct.pack("<H", class_id))
            _write_str(f, cond_id)
            f.write(struct.pack("<B", r * 4 + c))
            f.write(vec.tobytes())


def read_cache(path) -> FeatureCache:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise CacheError(f"{path}: bad magic")
        (version,) = struct.unpack("<H", f.read(2))
        if version != VERSION:
            raise CacheError(f"{path}: unsupported version {version}")
        descriptor = _read_str(f)
        normalizer = _read_str(f)
        dim, count = struct.unpack("<II", f.read(8))
        entries = {}
        for _ in range(count):
            (class_id,) = struct.unpack("<H", f.read(2))
            cond_id = _read_str(f)
            (gp,) = struct.unpack("<B", f.read(1))
            vec = np.frombuffer(f.read(4 * dim), dtype="<f4").copy()
            entries[(class_id, cond_id, (gp // 4, gp % 4))] = vec
    return FeatureCache(descriptor, normalizer, dim, entries)

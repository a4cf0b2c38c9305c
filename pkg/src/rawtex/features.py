"""Feature vector container shared by all descriptor families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    descriptor_id: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(v)):
            raise FeatureError(f"{self.descriptor_id}: non-finite feature values")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size


def check_dim(fv: FeatureVector, expected: int) -> FeatureVector:
    if fv.dim != expected:
        raise FeatureError(f"{fv.descriptor_id}: dim {fv.dim} != declared {expected}")
    return fv

"""L1 nearest-neighbor classification under maximum ignorance.

The classifier sees only feature vectors and training labels; no lighting
information crosses this interface.
"""

from __future__ import annotations

import numpy as np

from ..features import FeatureVector


class ClassifyError(ValueError):
    pass


def l1(x: FeatureVector, y: FeatureVector) -> float:
    """Sum of absolute component differences."""
    if x.dim != y.dim or x.descriptor_id != y.descriptor_id:
        raise ClassifyError(
            f"incompatible vectors: {x.descriptor_id}[{x.dim}] vs "
            f"{y.descriptor_id}[{y.dim}]")
    return float(np.abs(x.values - y.values).sum())


def l1_matrix(test: np.ndarray, train: np.ndarray, chunk: int = 256) -> np.ndarray:
    """(n_test, n_train) pairwise L1 distances."""
    out = np.empty((test.shape[0], train.shape[0]))
    for s in range(0, test.shape[0], chunk):
        out[s:s + chunk] = np.abs(test[s:s + chunk, None, :]
                                  - train[None, :, :]).sum(axis=2)
    return out


def classify_1nn(train_vectors: np.ndarray, train_labels: np.ndarray,
                 test_vectors: np.ndarray) -> np.ndarray:
    """Predicted label per test vector; ties break to the lowest train index."""
    if train_vectors.shape[0] == 0:
        raise ClassifyError("empty training set")
    if train_vectors.shape[1] != test_vectors.shape[1]:
        raise ClassifyError("train/test dimensionality mismatch")
    dist = l1_matrix(test_vectors, train_vectors)
    return np.asarray(train_labels)[dist.argmin(axis=1)]


def classify_1nn_pairs(train: list[tuple[FeatureVector, int]],
                       test: list[FeatureVector]) -> list[int]:
    """Convenience wrapper over (FeatureVector, class) pairs."""
    if not train:
        raise ClassifyError("empty training set")
    tv = np.stack([fv.values for fv, _ in train])
    labels = np.array([c for _, c in train])
    xv = np.stack([fv.values for fv in test])
    return classify_1nn(tv, labels, xv).tolist()

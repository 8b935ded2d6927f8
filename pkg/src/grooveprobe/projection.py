"""Principal component analysis via SVD of the centered data matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PcaModel:
    """Fitted PCA: column means, c orthonormal component rows, variance ratios."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray


def fit_pca(X: np.ndarray, c: int) -> PcaModel:
    """Fit the top-c principal directions of X.

    Sign convention: each component's largest-magnitude entry is made
    positive, so outputs are diff-able.  explained_variance_ratio[i] is
    that component's share of the total variance.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-D, got shape {X.shape}")
    n, e = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    if not 1 <= c <= min(n - 1, e):
        raise ValueError(f"c={c} outside [1, {min(n - 1, e)}] for a {n}x{e} matrix")

    mean = X.mean(axis=0)
    centered = X - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    total = float(np.sum(singular**2))
    if total == 0.0:
        raise ValueError("zero-variance input; PCA is degenerate")

    components = vt[:c].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    ratios = singular[:c] ** 2 / total
    return PcaModel(mean, components, ratios)


def project(model: PcaModel, X: np.ndarray) -> np.ndarray:
    """Score rows of X on the fitted components: (X - mean) . components'."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"X has shape {X.shape}, model expects {model.mean.shape[0]} columns"
        )
    return (X - model.mean) @ model.components.T

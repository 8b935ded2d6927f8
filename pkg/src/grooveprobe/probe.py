"""Closed-form ridge probing with seeded repeated k-fold cross-validation.

The ridge solve is (X'X + alpha*I) x = X'y by Cholesky factorization.
Fold shuffling uses the Philox counter-based generator (64-bit,
"philox4x64-10") so splits are bit-reproducible across platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from grooveprobe.corpus import Corpus, RATING_TARGETS
from grooveprobe.embeddings import DesignMatrix, EmbeddingError, assemble_design_matrix

PRNG_ID = "philox4x64-10"

STEM_PROBE_ORDER = ("vocals", "bass", "drums", "other", "full")


@dataclass(frozen=True)
class ProbeConfig:
    alpha: float = 0.2
    folds: int = 4
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    standardize: bool = True
    target: str = "groove"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be non-empty and distinct")
        if self.target not in RATING_TARGETS:
            raise ValueError(f"unknown target {self.target!r}")


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    target_mean: float


@dataclass(frozen=True)
class ProbeResult:
    representation_name: str
    target: str
    per_run_r2: tuple[float, ...]
    mean_r2: float
    std_r2: float
    predictions: dict[str, float]


def fit_ridge(
    X: np.ndarray, y: np.ndarray, alpha: float, standardize: bool = True
) -> RidgeModel:
    """Solve the ridge problem min ||Xx - y||^2 + alpha*||x||^2 in closed form.

    With standardize=True, columns are z-scored with the given (training)
    data's statistics, zero-variance columns are dropped from the solve
    and get weight 0, and y is centered; the intercept restores original
    units.  With standardize=False the objective is solved literally,
    with no intercept.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"incompatible shapes X{X.shape}, y{y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in ridge inputs")
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    n, e = X.shape
    if n < 1:
        raise ValueError("need at least one sample")

    target_mean = float(y.mean())
    if standardize:
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        keep = stds > 0
        Z = (X[:, keep] - means[keep]) / stds[keep]
        yc = y - target_mean
        w_keep = _cholesky_ridge(Z, yc, alpha)
        weights = np.zeros(e)
        weights[keep] = w_keep
        out_stds = np.where(keep, stds, 1.0)
        return RidgeModel(weights, target_mean, means, out_stds, target_mean)

    weights = _cholesky_ridge(X, y, alpha)
    return RidgeModel(weights, 0.0, np.zeros(e), np.ones(e), target_mean)


def _cholesky_ridge(X: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    e = X.shape[1]
    if e == 0:
        return np.zeros(0)
    gram = X.T @ X
    gram[np.diag_indices_from(gram)] += alpha
    try:
        factor = sla.cho_factor(gram, lower=True)
    except sla.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"singular ridge system at alpha={alpha}: {exc}"
        ) from exc
    return sla.cho_solve(factor, X.T @ y)


def predict(model: RidgeModel, X: np.ndarray) -> np.ndarray:
    """Apply a fitted ridge model: ((X - means) / stds) . weights + intercept."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"X has {X.shape[1] if X.ndim == 2 else '?'} columns, "
            f"model expects {model.weights.shape[0]}"
        )
    return ((X - model.feature_means) / model.feature_stds) @ model.weights + model.intercept


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Coefficient of determination: 1 - residual variance / total variance."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.shape[0] < 2:
        raise ValueError("need at least 2 values")
    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("y_true is constant; R^2 is undefined")
    ss_res = float(np.sum((y_pred - y_true) ** 2))
    return 1.0 - ss_res / ss_tot


def kfold_split(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffle 0..n-1 with a Philox generator and cut into k near-equal folds."""
    if n < k:
        raise ValueError(f"cannot split {n} samples into {k} folds")
    if k < 2:
        raise ValueError(f"folds must be >= 2, got {k}")
    perm = np.random.Generator(np.random.Philox(seed)).permutation(n)
    return np.array_split(perm, k)


def run_cv(X, y: np.ndarray, config: ProbeConfig) -> ProbeResult:
    """Repeated k-fold cross-validation of a ridge probe.

    For each seed: split, fit on k-1 folds, predict the held-out fold,
    score each fold with R^2, and average the fold scores into that run's
    score.  mean/std aggregate across seeds (population std); per-track
    predictions are averaged across runs.
    """
    if isinstance(X, DesignMatrix):
        rows, row_ids, rep_name = X.rows, X.row_ids, X.representation_name
    else:
        rows = np.asarray(X, dtype=np.float64)
        row_ids = tuple(str(i) for i in range(rows.shape[0]))
        rep_name = "array"
    y = np.asarray(y, dtype=np.float64)
    n = rows.shape[0]
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if n < config.folds:
        raise ValueError(f"{n} tracks cannot fill {config.folds} folds")

    per_run = []
    pred_sum = np.zeros(n)
    for seed in config.seeds:
        folds = kfold_split(n, config.folds, seed)
        fold_scores = []
        for test_idx in folds:
            mask = np.ones(n, dtype=bool)
            mask[test_idx] = False
            model = fit_ridge(rows[mask], y[mask], config.alpha, config.standardize)
            preds = predict(model, rows[test_idx])
            pred_sum[test_idx] += preds
            if np.all(y[test_idx] == y[test_idx][0]):
                warnings.warn(
                    f"seed {seed}: test fold has constant target; skipping its R^2",
                    stacklevel=2,
                )
                continue
            fold_scores.append(r2_score(y[test_idx], preds))
        if not fold_scores:
            raise ValueError(f"seed {seed}: no scorable folds")
        per_run.append(float(np.mean(fold_scores)))

    per_run_arr = np.asarray(per_run)
    predictions = {
        tid: float(p) for tid, p in zip(row_ids, pred_sum / len(config.seeds))
    }
    return ProbeResult(
        rep_name,
        config.target,
        tuple(per_run),
        float(per_run_arr.mean()),
        float(per_run_arr.std()),
        predictions,
    )


def probe_all_stems(
    corpus: Corpus, model_name: str, config: ProbeConfig, emb_root: str
) -> list[ProbeResult]:
    """Probe one model over the four stems and the full mix.

    Results come back in the order vocals, bass, drums, other, full.
    Sources with missing embedding files are skipped with a warning.
    """
    y = corpus.target_vector(config.target)
    results = []
    for source in STEM_PROBE_ORDER:
        representation = model_name if source == "full" else f"{model_name}/{source}"
        try:
            design = assemble_design_matrix(corpus, representation, emb_root=emb_root)
        except EmbeddingError as exc:
            warnings.warn(f"skipping {representation}: {exc}", stacklevel=2)
            continue
        results.append(run_cv(design, y, config))
    return results

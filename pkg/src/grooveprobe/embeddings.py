"""Embedding-file ingestion, pooling, and design-matrix assembly.

Interchange formats, per track:

* CSV: header ``dim_0,...,dim_{e-1}``, one row per frame.
* Binary ``.gemb``: magic ``GEMB``, version byte 1, little-endian uint32
  T and e, then T*e little-endian float32 values in row-major order.

Directory layout: ``<emb_root>/<model_name>/<stem_or_full>/<track_id>.csv``
with ``<stem_or_full>`` in {full, bass, drums, vocals, other}.
"""

from __future__ import annotations

import csv
import os
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from grooveprobe.corpus import Corpus, STEM_NAMES
from grooveprobe.features import FEATURE_NAMES

MIR_FEATURES = "mir_features"


class EmbeddingError(ValueError):
    """Raised for malformed embedding files or registry violations."""


@dataclass(frozen=True)
class ModelRegistryEntry:
    model_name: str
    dimension: int
    clip_level: bool


MODEL_REGISTRY: dict[str, ModelRegistryEntry] = {
    name: ModelRegistryEntry(name, dim, clip)
    for name, dim, clip in (
        ("audiomae", 6144, False),
        ("clap", 512, True),
        ("m2d", 768, False),
        ("matpac", 3840, False),
        ("musicfm", 1024, False),
        ("muq", 512, True),
        ("mert", 9984, False),
    )
}


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Frame-level embeddings for one track: a T x e matrix."""

    track_id: str
    model_name: str
    frames: np.ndarray


@dataclass(frozen=True)
class DesignMatrix:
    """One pooled representation vector per track, rows by ascending id."""

    rows: np.ndarray
    row_ids: tuple[str, ...]
    representation_name: str


def _check_finite(frames: np.ndarray, path: str) -> None:
    bad = np.argwhere(~np.isfinite(frames))
    if bad.size:
        r, c = bad[0]
        raise EmbeddingError(f"{path}: non-finite value at row {r}, column {c}")


def _read_csv_embedding(path: str, dimension: int) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmbeddingError(f"{path}: empty file") from None
        expected = [f"dim_{i}" for i in range(len(header))]
        if header != expected:
            raise EmbeddingError(f"{path}: malformed header {header[:4]}...")
        rows = []
        for row in reader:
            if len(row) != len(header):
                raise EmbeddingError(
                    f"{path}: row {len(rows)} has {len(row)} fields, expected {len(header)}"
                )
            rows.append(row)
    if not rows:
        raise EmbeddingError(f"{path}: no frame rows")
    try:
        frames = np.asarray(rows, dtype=np.float64)
    except ValueError:
        raise EmbeddingError(f"{path}: non-numeric value") from None
    return frames


def _read_gemb(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(13)
        if len(head) < 13 or head[:4] != b"GEMB":
            raise EmbeddingError(f"{path}: missing GEMB magic")
        version = head[4]
        if version != 1:
            raise EmbeddingError(f"{path}: unsupported gemb version {version}")
        t, e = struct.unpack("<II", head[5:13])
        if t < 1 or e < 1:
            raise EmbeddingError(f"{path}: invalid shape {t}x{e}")
        payload = fh.read(4 * t * e)
    if len(payload) != 4 * t * e:
        raise EmbeddingError(f"{path}: truncated payload")
    flat = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return flat.reshape(t, e)


def write_gemb(path: str, frames: np.ndarray) -> None:
    """Write a T x e matrix in the binary interchange format."""
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float32))
    t, e = frames.shape
    with open(path, "wb") as fh:
        fh.write(b"GEMB" + bytes([1]) + struct.pack("<II", t, e))
        fh.write(frames.astype("<f4").tobytes())


def read_embedding_file(path: str, model_name: str) -> EmbeddingMatrix:
    """Read one track's embedding file and validate it against the registry."""
    if model_name not in MODEL_REGISTRY:
        raise EmbeddingError(
            f"unknown model {model_name!r}; registry has {sorted(MODEL_REGISTRY)}"
        )
    entry = MODEL_REGISTRY[model_name]
    if not os.path.isfile(path):
        raise EmbeddingError(f"embedding file not found: {path}")
    if path.endswith(".gemb"):
        frames = _read_gemb(path)
    else:
        frames = _read_csv_embedding(path, entry.dimension)
    if frames.shape[1] != entry.dimension:
        raise EmbeddingError(
            f"{path}: dimension {frames.shape[1]} does not match registry "
            f"({entry.dimension} for {model_name})"
        )
    _check_finite(frames, path)
    track_id = os.path.splitext(os.path.basename(path))[0]
    return EmbeddingMatrix(track_id, model_name, frames)


def pool_embedding(matrix: EmbeddingMatrix) -> np.ndarray:
    """Column-wise mean over frames; the identity for a single frame."""
    return matrix.frames.mean(axis=0)


def _read_feature_table(path: str) -> dict[str, np.ndarray]:
    if not os.path.isfile(path):
        raise EmbeddingError(f"feature table not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise EmbeddingError(f"{path}: empty feature table") from None
    if header != ["id", *FEATURE_NAMES]:
        raise EmbeddingError(f"{path}: feature table header does not match the 16 features")
    table: dict[str, np.ndarray] = {}
    for row in reader:
        if len(row) != 17:
            raise EmbeddingError(f"{path}: row for {row[0]!r} has {len(row)} fields")
        if row[0] in table:
            raise EmbeddingError(f"{path}: duplicate feature row for {row[0]!r}")
        table[row[0]] = np.asarray(row[1:], dtype=np.float64)
    return table


def _embedding_file_for(directory: str, track_id: str) -> str | None:
    candidates = [
        os.path.join(directory, f"{track_id}{ext}") for ext in (".csv", ".gemb")
    ]
    existing = [p for p in candidates if os.path.isfile(p)]
    if len(existing) > 1:
        raise EmbeddingError(f"duplicate embedding files for {track_id!r}: {existing}")
    return existing[0] if existing else None


def assemble_design_matrix(
    corpus: Corpus,
    representation: str,
    emb_root: str | None = None,
    feature_table: str | None = None,
) -> DesignMatrix:
    """Build the n x e matrix for one representation, rows by ascending id.

    `representation` is a registry model name, a stem-qualified model name
    such as ``muq/drums``, or ``mir_features`` (read from `feature_table`).
    """
    ids = corpus.ordered_ids

    if representation == MIR_FEATURES:
        if feature_table is None:
            raise EmbeddingError("mir_features representation requires a feature table path")
        table = _read_feature_table(feature_table)
        missing = [tid for tid in ids if tid not in table]
        if missing:
            raise EmbeddingError(f"feature table is missing tracks: {missing}")
        rows = np.stack([table[tid] for tid in ids])
        return DesignMatrix(rows, ids, MIR_FEATURES)

    model_name, _, stem = representation.partition("/")
    if model_name not in MODEL_REGISTRY:
        raise EmbeddingError(f"unknown representation {representation!r}")
    if stem and stem not in STEM_NAMES:
        raise EmbeddingError(f"unknown stem {stem!r}; expected one of {STEM_NAMES}")
    if emb_root is None:
        raise EmbeddingError("embedding representations require emb_root")
    directory = os.path.join(emb_root, model_name, stem or "full")

    paths: dict[str, str] = {}
    missing = []
    for tid in ids:
        path = _embedding_file_for(directory, tid)
        if path is None:
            missing.append(tid)
        else:
            paths[tid] = path
    if missing:
        raise EmbeddingError(
            f"missing {model_name} embeddings under {directory} for tracks: {missing}"
        )

    entry = MODEL_REGISTRY[model_name]
    rows = []
    for tid in ids:
        matrix = read_embedding_file(paths[tid], model_name)
        if entry.clip_level and matrix.frames.shape[0] > 1:
            warnings.warn(
                f"{model_name} is clip-level but {paths[tid]} has "
                f"{matrix.frames.shape[0]} frames; mean-pooling",
                stacklevel=2,
            )
        rows.append(pool_embedding(matrix))
    return DesignMatrix(np.stack(rows), ids, representation)

"""Batch embedding extraction over a track manifest."""
import csv
import json
import os
import struct
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.io import wavfile

from . import __version__
from .backends import BACKENDS, BackendError
from .registry import EXTRACTOR_REGISTRY

STEM_COLUMNS = {
    "bass": "bass_path",
    "drums": "drums_path",
    "vocals": "vocals_path",
    "other": "other_path",
}

_INT_SCALE = {np.dtype(np.int16): 2**15, np.dtype(np.int32): 2**31}


class ExtractorError(Exception):
    pass


@dataclass(frozen=True)
class ExtractorJob:
    manifest: str
    model: str
    out_root: str
    stem: str = "full"  # "full" or one of bass/drums/vocals/other
    device: str = "cpu"
    backend: str = "spectral"
    file_format: str = "csv"  # "csv" or "gemb"
    chunk_seconds: float = 0.0  # 0 → registry default
    keep_going: bool = False
    workers: int = 4

    def __post_init__(self):
        if self.model not in EXTRACTOR_REGISTRY:
            raise ExtractorError(
                f"unknown model {self.model!r}; expected one of "
                f"{sorted(EXTRACTOR_REGISTRY)}"
            )
        if self.stem != "full" and self.stem not in STEM_COLUMNS:
            raise ExtractorError(f"unknown stem {self.stem!r}")
        if self.backend not in BACKENDS:
            raise ExtractorError(f"unknown backend {self.backend!r}")
        if self.file_format not in ("csv", "gemb"):
            raise ExtractorError(f"unknown format {self.file_format!r}")

    @property
    def effective_chunk_seconds(self) -> float:
        if self.chunk_seconds > 0:
            return self.chunk_seconds
        return EXTRACTOR_REGISTRY[self.model].chunk_seconds


def read_manifest_paths(manifest: str, stem: str) -> list:
    """Return (track_id, audio_path) pairs for one stem mode."""
    column = "audio_path" if stem == "full" else STEM_COLUMNS[stem]
    base = os.path.dirname(os.path.abspath(manifest))
    pairs = []
    try:
        with open(manifest, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "id" not in reader.fieldnames:
                raise ExtractorError(f"{manifest}: missing id column")
            if column not in reader.fieldnames:
                raise ExtractorError(f"{manifest}: missing {column} column")
            for row in reader:
                path = (row[column] or "").strip()
                if not path:
                    raise ExtractorError(
                        f"{manifest}: track {row['id']!r} has no {column}"
                    )
                if not os.path.isabs(path):
                    path = os.path.join(base, path)
                pairs.append((row["id"].strip(), path))
    except OSError as exc:
        raise ExtractorError(f"cannot read manifest {manifest}: {exc}") from exc
    if not pairs:
        raise ExtractorError(f"{manifest}: no tracks")
    return pairs


def load_wav_mono(path: str):
    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise ExtractorError(f"cannot decode {path}: {exc}") from exc
    if data.dtype in _INT_SCALE:
        samples = data.astype(np.float64) / _INT_SCALE[data.dtype]
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ExtractorError(f"{path}: unsupported sample dtype {data.dtype}")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return samples, int(rate)


def _atomic_bytes(path: str, payload: bytes) -> None:
    directory = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_embedding_csv(path: str, frames: np.ndarray) -> None:
    lines = [",".join(f"dim_{i}" for i in range(frames.shape[1]))]
    for row in frames:
        lines.append(",".join(format(float(v), ".9g") for v in row))
    _atomic_bytes(path, ("\n".join(lines) + "\n").encode())


def write_embedding_gemb(path: str, frames: np.ndarray) -> None:
    header = b"GEMB" + struct.pack("<BII", 1, frames.shape[0], frames.shape[1])
    _atomic_bytes(path, header + frames.astype("<f4").tobytes())


def _extract_one(job: ExtractorJob, track_id: str, audio_path: str, out_dir: str):
    samples, rate = load_wav_mono(audio_path)
    frames = BACKENDS[job.backend](
        samples, rate, job.model, job.effective_chunk_seconds
    )
    expected = EXTRACTOR_REGISTRY[job.model].dimension
    if frames.shape[1] != expected:
        raise ExtractorError(
            f"{track_id}: backend emitted width {frames.shape[1]}, "
            f"registry requires {expected}"
        )
    path = os.path.join(out_dir, f"{track_id}.{job.file_format}")
    if job.file_format == "csv":
        write_embedding_csv(path, frames)
    else:
        write_embedding_gemb(path, frames)
    return path, frames.shape


def _write_lock(job: ExtractorJob, out_dir: str, shapes: dict) -> None:
    entry = EXTRACTOR_REGISTRY[job.model]
    payload = {
        "extractor_version": __version__,
        "model": job.model,
        "checkpoint": entry.checkpoint,
        "backend": job.backend,
        "stem": job.stem,
        "chunk_seconds": job.effective_chunk_seconds,
        "dimension": entry.dimension,
        "file_format": job.file_format,
        "tracks": {tid: list(shape) for tid, shape in sorted(shapes.items())},
    }
    _atomic_bytes(
        os.path.join(out_dir, "manifest.lock.json"),
        (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode(),
    )


def extract_embeddings(job: ExtractorJob) -> list:
    """Run one model over every track in the manifest.

    Returns the written file paths. Per-track failures abort the batch
    unless ``keep_going`` is set, in which case they are warned about and
    skipped; the lock file covers only the tracks that succeeded.
    """
    pairs = read_manifest_paths(job.manifest, job.stem)
    out_dir = os.path.join(job.out_root, job.model, job.stem)
    os.makedirs(out_dir, exist_ok=True)

    written = []
    shapes = {}
    failures = []
    with ThreadPoolExecutor(max_workers=max(1, job.workers)) as pool:
        futures = {
            pool.submit(_extract_one, job, tid, path, out_dir): tid
            for tid, path in pairs
        }
        for future, tid in futures.items():
            try:
                path, shape = future.result()
            except (ExtractorError, BackendError) as exc:
                failures.append((tid, str(exc)))
                continue
            written.append(path)
            shapes[tid] = shape
    if failures and not job.keep_going:
        raise ExtractorError(
            "; ".join(f"{tid}: {msg}" for tid, msg in failures)
        )
    for tid, msg in failures:
        warnings.warn(f"skipped {tid}: {msg}")
    if not written:
        raise ExtractorError("no track succeeded")
    _write_lock(job, out_dir, shapes)
    return sorted(written)

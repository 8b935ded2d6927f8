"""Track manifest loading, validation, and groove-rating derivation.

The manifest is a UTF-8 CSV with header
``id,title,style,audio_path,bass_path,drums_path,vocals_path,other_path,dance,listen,party,groove``.
Stem path columns and the groove column may be empty.  Relative paths are
resolved against the manifest's directory.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

STEM_NAMES = ("bass", "drums", "vocals", "other")

MANIFEST_COLUMNS = (
    "id", "title", "style", "audio_path",
    "bass_path", "drums_path", "vocals_path", "other_path",
    "dance", "listen", "party", "groove",
)

RATING_TARGETS = ("groove", "dance", "listen", "party")


class ManifestError(ValueError):
    """Raised for malformed or inconsistent manifest contents."""


@dataclass(frozen=True)
class Track:
    """One song: identifiers plus paths to the full mix and optional stems."""

    id: str
    title: str
    style_label: str | None
    audio_path: str
    stem_paths: dict[str, str] | None = None


@dataclass(frozen=True)
class RatingSet:
    """Per-track averaged ratings: dance/listen/party in [0,100], groove in [-1,1]."""

    track_id: str
    dance: float
    listen: float
    party: float
    groove: float | None = None


@dataclass(frozen=True)
class Corpus:
    """Tracks and their ratings, in bijection by track id."""

    tracks: tuple[Track, ...]
    ratings: tuple[RatingSet, ...]

    @property
    def n(self) -> int:
        return len(self.tracks)

    @property
    def ordered_ids(self) -> tuple[str, ...]:
        """Track ids in ascending order; the canonical row ordering."""
        return tuple(sorted(t.id for t in self.tracks))

    def track(self, track_id: str) -> Track:
        for t in self.tracks:
            if t.id == track_id:
                return t
        raise KeyError(track_id)

    def rating(self, track_id: str) -> RatingSet:
        for r in self.ratings:
            if r.track_id == track_id:
                return r
        raise KeyError(track_id)

    def target_vector(self, target: str) -> np.ndarray:
        """Rating values for `target`, ordered by ascending track id."""
        if target not in RATING_TARGETS:
            raise ValueError(f"unknown target {target!r}; expected one of {RATING_TARGETS}")
        values = []
        for tid in self.ordered_ids:
            r = self.rating(tid)
            v = getattr(r, target)
            if v is None:
                raise ManifestError(
                    f"track {tid!r} has no groove rating; run derive_groove_rating first"
                )
            values.append(float(v))
        return np.asarray(values, dtype=np.float64)


def _parse_rating(text: str, column: str, row_num: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ManifestError(f"row {row_num}: non-numeric {column} value {text!r}") from None
    if not math.isfinite(value):
        raise ManifestError(f"row {row_num}: non-finite {column} value")
    if not 0.0 <= value <= 100.0:
        raise ManifestError(f"row {row_num}: {column}={value} outside [0, 100]")
    return value


def _resolve_path(path: str, base: str, row_num: int, column: str) -> str:
    resolved = path if os.path.isabs(path) else os.path.join(base, path)
    if not os.path.isfile(resolved):
        raise ManifestError(f"row {row_num}: {column} {path!r} does not exist")
    if not os.access(resolved, os.R_OK):
        raise ManifestError(f"row {row_num}: {column} {path!r} is not readable")
    return resolved


def load_manifest(path: str) -> Corpus:
    """Load and validate a manifest CSV into a Corpus.

    Raises ManifestError for malformed rows (with the 1-based data row
    number), duplicate ids, ratings outside [0,100], and dangling paths.
    """
    if not os.path.isfile(path):
        raise ManifestError(f"manifest file not found: {path}")
    base = os.path.dirname(os.path.abspath(path))

    tracks: list[Track] = []
    ratings: list[RatingSet] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ManifestError("manifest is empty")
        if tuple(reader.fieldnames) != MANIFEST_COLUMNS:
            raise ManifestError(
                f"manifest header {reader.fieldnames} does not match "
                f"expected columns {list(MANIFEST_COLUMNS)}"
            )
        for row_num, row in enumerate(reader, start=1):
            if any(v is None for v in row.values()):
                raise ManifestError(f"row {row_num}: wrong number of fields")
            tid = row["id"].strip()
            if not tid:
                raise ManifestError(f"row {row_num}: empty id")
            if tid in seen:
                raise ManifestError(f"row {row_num}: duplicate track id {tid!r}")
            seen.add(tid)

            audio_path = _resolve_path(row["audio_path"].strip(), base, row_num, "audio_path")

            stem_cells = {stem: row[f"{stem}_path"].strip() for stem in STEM_NAMES}
            present = [s for s, p in stem_cells.items() if p]
            if present and len(present) != len(STEM_NAMES):
                missing = sorted(set(STEM_NAMES) - set(present))
                raise ManifestError(
                    f"row {row_num}: stem paths must be all present or all empty "
                    f"(missing {missing})"
                )
            stem_paths = None
            if present:
                stem_paths = {
                    stem: _resolve_path(p, base, row_num, f"{stem}_path")
                    for stem, p in stem_cells.items()
                }

            dance = _parse_rating(row["dance"], "dance", row_num)
            listen = _parse_rating(row["listen"], "listen", row_num)
            party = _parse_rating(row["party"], "party", row_num)

            groove: float | None = None
            groove_cell = row["groove"].strip()
            if groove_cell:
                try:
                    groove = float(groove_cell)
                except ValueError:
                    raise ManifestError(
                        f"row {row_num}: non-numeric groove value {groove_cell!r}"
                    ) from None
                if not math.isfinite(groove) or not -1.0 <= groove <= 1.0:
                    raise ManifestError(f"row {row_num}: groove={groove} outside [-1, 1]")

            style = row["style"].strip() or None
            tracks.append(Track(tid, row["title"].strip(), style, audio_path, stem_paths))
            ratings.append(RatingSet(tid, dance, listen, party, groove))

    if not tracks:
        raise ManifestError("manifest contains no tracks")
    return Corpus(tuple(tracks), tuple(ratings))


def derive_groove_rating(corpus: Corpus, force: bool = False) -> Corpus:
    """Set each track's groove rating from the dance/listen/party columns.

    The groove value is the track's score on the first principal component
    of the z-scored (dance, listen, party) columns, sign-oriented so the
    component correlates non-negatively with dance, then affinely rescaled
    so the minimum score maps to -1 and the maximum to +1.

    Groove values already present in the manifest win: derivation is
    skipped unless `force` is true.  A partially filled groove column is
    rejected as ambiguous.
    """
    have_groove = [r.groove is not None for r in corpus.ratings]
    if not force:
        if all(have_groove):
            return corpus
        if any(have_groove):
            raise ManifestError(
                "groove column is partially filled; clear it or pass force=True"
            )
    if corpus.n < 3:
        raise ManifestError(f"groove derivation needs at least 3 tracks, got {corpus.n}")

    raw = np.array(
        [[r.dance, r.listen, r.party] for r in corpus.ratings], dtype=np.float64
    )
    mu = raw.mean(axis=0)
    sd = raw.std(axis=0)
    if np.all(sd == 0):
        raise ManifestError("all three rating columns have zero variance; PCA is degenerate")
    z = np.zeros_like(raw)
    nonzero = sd > 0
    z[:, nonzero] = (raw[:, nonzero] - mu[nonzero]) / sd[nonzero]

    # z has zero column means, so the SVD right vectors are the principal axes.
    _, _, vt = np.linalg.svd(z, full_matrices=False)
    scores = z @ vt[0]

    dance = raw[:, 0]
    if np.dot(scores - scores.mean(), dance - dance.mean()) < 0:
        scores = -scores

    lo, hi = scores.min(), scores.max()
    if hi == lo:
        raise ManifestError("PC1 scores are constant; PCA is degenerate")
    groove = -1.0 + 2.0 * (scores - lo) / (hi - lo)

    new_ratings = tuple(
        replace(r, groove=float(g)) for r, g in zip(corpus.ratings, groove)
    )
    return Corpus(corpus.tracks, new_ratings)

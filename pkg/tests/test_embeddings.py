import os

import numpy as np
import pytest

from grooveprobe.corpus import Corpus, RatingSet, Track
from grooveprobe.embeddings import (
    EmbeddingError,
    EmbeddingMatrix,
    MODEL_REGISTRY,
    assemble_design_matrix,
    pool_embedding,
    read_embedding_file,
    write_gemb,
)
from grooveprobe.features import FEATURE_NAMES
from grooveprobe.reporting import fmt9

EXPECTED_DIMS = {
    "audiomae": 6144,
    "clap": 512,
    "m2d": 768,
    "matpac": 3840,
    "musicfm": 1024,
    "muq": 512,
    "mert": 9984,
}


def write_csv_embedding(path, rows):
    rows = np.atleast_2d(rows)
    with open(path, "w") as fh:
        fh.write(",".join(f"dim_{i}" for i in range(rows.shape[1])) + "\n")
        for row in rows:
            fh.write(",".join(fmt9(v) for v in row) + "\n")


def small_corpus(n=3):
    tracks = tuple(Track(f"t{i}", f"T{i}", None, "/dev/null") for i in range(n))
    ratings = tuple(RatingSet(f"t{i}", 50, 50, 50, 0.0) for i in range(n))
    return Corpus(tracks, ratings)


def test_registry_dimensions():
    assert {name: e.dimension for name, e in MODEL_REGISTRY.items()} == EXPECTED_DIMS
    assert MODEL_REGISTRY["clap"].clip_level and MODEL_REGISTRY["muq"].clip_level
    assert not MODEL_REGISTRY["mert"].clip_level


class TestReadEmbeddingFile:
    def test_single_row_muq(self, tmp_path):
        path = tmp_path / "a.csv"
        write_csv_embedding(path, np.zeros((1, 512)))
        matrix = read_embedding_file(str(path), "muq")
        assert matrix.frames.shape == (1, 512)
        assert matrix.track_id == "a"

    def test_dimension_mismatch(self, tmp_path):
        path = tmp_path / "a.csv"
        write_csv_embedding(path, np.zeros((10, 500)))
        with pytest.raises(EmbeddingError, match="512"):
            read_embedding_file(str(path), "muq")

    def test_nan_reported_with_position(self, tmp_path):
        rows = np.zeros((3, 512))
        rows[1, 7] = np.nan
        path = tmp_path / "a.csv"
        write_csv_embedding(path, rows)
        with pytest.raises(EmbeddingError, match="row 1, column 7"):
            read_embedding_file(str(path), "muq")

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "a.csv"
        path.write_text("x,y,z\n1,2,3\n")
        with pytest.raises(EmbeddingError, match="header"):
            read_embedding_file(str(path), "muq")

    def test_unknown_model(self, tmp_path):
        with pytest.raises(EmbeddingError, match="unknown model"):
            read_embedding_file(str(tmp_path / "a.csv"), "wavenet")

    def test_gemb_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        frames = rng.standard_normal((4, 768)).astype(np.float32)
        path = tmp_path / "b.gemb"
        write_gemb(str(path), frames)
        matrix = read_embedding_file(str(path), "m2d")
        assert matrix.frames.shape == (4, 768)
        assert matrix.frames == pytest.approx(frames.astype(np.float64))

    def test_gemb_bad_magic(self, tmp_path):
        path = tmp_path / "b.gemb"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(EmbeddingError, match="magic"):
            read_embedding_file(str(path), "m2d")

    def test_gemb_truncated(self, tmp_path):
        frames = np.zeros((2, 768), dtype=np.float32)
        path = tmp_path / "b.gemb"
        write_gemb(str(path), frames)
        path.write_bytes(path.read_bytes()[:-100])
        with pytest.raises(EmbeddingError, match="truncated"):
            read_embedding_file(str(path), "m2d")


class TestPooling:
    def test_single_frame_identity(self):
        row = np.arange(512, dtype=float)
        matrix = EmbeddingMatrix("t", "muq", row[None, :])
        assert np.array_equal(pool_embedding(matrix), row)

    def test_equal_rows(self):
        v = np.linspace(0, 1, 512)
        matrix = EmbeddingMatrix("t", "muq", np.tile(v, (5, 1)))
        assert pool_embedding(matrix) == pytest.approx(v, abs=1e-15)

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(5)
        frames = rng.standard_normal((7, 4))
        matrix = EmbeddingMatrix("t", "muq", frames)
        pooled = pool_embedding(matrix)
        # per-column running-sum oracle
        for j in range(4):
            total = 0.0
            for i in range(7):
                total += frames[i, j]
            assert abs(pooled[j] - total / 7) < 1e-12


class TestAssembleDesignMatrix:
    def _emb_dir(self, tmp_path, model="muq", stem="full", ids=("t0", "t1", "t2")):
        directory = tmp_path / "emb" / model / stem
        directory.mkdir(parents=True, exist_ok=True)
        rng = np.random.default_rng(hash(stem) % 2**32)
        for tid in ids:
            write_csv_embedding(
                directory / f"{tid}.csv", rng.standard_normal((1, 512))
            )
        return str(tmp_path / "emb")

    def test_three_tracks_sorted(self, tmp_path):
        root = self._emb_dir(tmp_path)
        design = assemble_design_matrix(small_corpus(), "muq", emb_root=root)
        assert design.rows.shape == (3, 512)
        assert design.row_ids == ("t0", "t1", "t2")
        assert design.representation_name == "muq"

    def test_missing_file_lists_ids(self, tmp_path):
        root = self._emb_dir(tmp_path, ids=("t0", "t2"))
        with pytest.raises(EmbeddingError, match="t1"):
            assemble_design_matrix(small_corpus(), "muq", emb_root=root)

    def test_stem_qualified(self, tmp_path):
        root = self._emb_dir(tmp_path, stem="drums")
        design = assemble_design_matrix(small_corpus(), "muq/drums", emb_root=root)
        assert design.representation_name == "muq/drums"

    def test_unknown_stem(self, tmp_path):
        with pytest.raises(EmbeddingError, match="stem"):
            assemble_design_matrix(small_corpus(), "muq/guitar", emb_root=str(tmp_path))

    def test_duplicate_files(self, tmp_path):
        root = self._emb_dir(tmp_path)
        write_gemb(
            os.path.join(root, "muq", "full", "t0.gemb"), np.zeros((1, 512))
        )
        with pytest.raises(EmbeddingError, match="duplicate"):
            assemble_design_matrix(small_corpus(), "muq", emb_root=root)

    def test_clip_level_multiframe_warns(self, tmp_path):
        root = self._emb_dir(tmp_path, ids=("t0", "t1"))
        write_csv_embedding(
            os.path.join(root, "muq", "full", "t2.csv"),
            np.random.default_rng(1).standard_normal((3, 512)),
        )
        with pytest.warns(UserWarning, match="clip-level"):
            design = assemble_design_matrix(small_corpus(), "muq", emb_root=root)
        assert design.rows.shape == (3, 512)

    def test_mir_features_table(self, tmp_path):
        table = tmp_path / "features.csv"
        rng = np.random.default_rng(2)
        with open(table, "w") as fh:
            fh.write("# grooveprobe test\n")
            fh.write("id," + ",".join(FEATURE_NAMES) + "\n")
            for tid in ("t0", "t1", "t2"):
                fh.write(tid + "," + ",".join(fmt9(v) for v in rng.random(16)) + "\n")
        design = assemble_design_matrix(
            small_corpus(), "mir_features", feature_table=str(table)
        )
        assert design.rows.shape == (3, 16)
        assert design.representation_name == "mir_features"

    def test_deterministic(self, tmp_path):
        root = self._emb_dir(tmp_path)
        a = assemble_design_matrix(small_corpus(), "muq", emb_root=root)
        b = assemble_design_matrix(small_corpus(), "muq", emb_root=root)
        assert np.array_equal(a.rows, b.rows)

"""Groove-rating prediction toolkit.

Numerical core for probing how well audio representations (handcrafted
DSP features or precomputed deep-model embeddings) linearly predict
per-track groove, dance, listen and party ratings.
"""

__version__ = "0.1.0"

from grooveprobe.corpus import Corpus, RatingSet, Track, derive_groove_rating, load_manifest
from grooveprobe.audio import Signal, frame_signal, load_audio
from grooveprobe.features import FeatureVector, extract_feature_vector
from grooveprobe.embeddings import (
    DesignMatrix,
    EmbeddingMatrix,
    MODEL_REGISTRY,
    assemble_design_matrix,
    pool_embedding,
    read_embedding_file,
)
from grooveprobe.probe import (
    ProbeConfig,
    ProbeResult,
    RidgeModel,
    fit_ridge,
    kfold_split,
    predict,
    probe_all_stems,
    r2_score,
    run_cv,
)
from grooveprobe.projection import PcaModel, fit_pca, project

__all__ = [
    "Corpus",
    "DesignMatrix",
    "EmbeddingMatrix",
    "FeatureVector",
    "MODEL_REGISTRY",
    "PcaModel",
    "ProbeConfig",
    "ProbeResult",
    "RatingSet",
    "RidgeModel",
    "Signal",
    "Track",
    "assemble_design_matrix",
    "derive_groove_rating",
    "extract_feature_vector",
    "fit_pca",
    "fit_ridge",
    "frame_signal",
    "kfold_split",
    "load_audio",
    "load_manifest",
    "pool_embedding",
    "predict",
    "probe_all_stems",
    "project",
    "r2_score",
    "run_cv",
]

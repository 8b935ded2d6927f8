"""Batch extraction of audio embeddings and source-separated stems.

Outputs follow the grooveprobe interchange contracts: one embedding file
per track under ``<out>/<model>/<stem_or_full>/<id>.csv`` (or ``.gemb``)
plus a ``manifest.lock.json`` pinning checkpoint identifiers, and four
stem WAVs per input track.
"""

__version__ = "0.1.0"

from .extract import ExtractorJob, ExtractorError, extract_embeddings
from .registry import EXTRACTOR_REGISTRY
from .separate import STEM_NAMES, separate_stems

__all__ = [
    "ExtractorJob",
    "ExtractorError",
    "extract_embeddings",
    "EXTRACTOR_REGISTRY",
    "STEM_NAMES",
    "separate_stems",
]

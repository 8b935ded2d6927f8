"""Model registry for the extraction side.

Dimensions mirror the consumer's registry exactly; the two packages share
only the on-disk contract, so the table is duplicated rather than
imported. ``checkpoint`` is the published identifier pinned into the lock
file; ``chunk_seconds`` is the default analysis chunk length (upstream
model docs do not pin one, so it is configurable per run).
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class ExtractorEntry:
    dimension: int
    checkpoint: str
    chunk_seconds: float
    clip_level: bool = False


EXTRACTOR_REGISTRY = {
    "audiomae": ExtractorEntry(6144, "hance-ai/audiomae", 10.0),
    "clap": ExtractorEntry(512, "laion/clap-htsat-unfused", 10.0, clip_level=True),
    "m2d": ExtractorEntry(768, "nttcslab/m2d", 10.0),
    "matpac": ExtractorEntry(3840, "aurianworld/matpac", 10.0),
    "mert": ExtractorEntry(9984, "m-a-p/MERT-v1-95M", 5.0),
    "musicfm": ExtractorEntry(1024, "minzwon/musicfm-msd", 30.0),
    "muq": ExtractorEntry(512, "OpenMuQ/MuQ-MuLan-large", 10.0, clip_level=True),
}

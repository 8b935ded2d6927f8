"""WAV decoding and framing into a canonical mono floating-point signal."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

DEFAULT_SAMPLE_RATE = 44100


class AudioError(ValueError):
    """Raised for unreadable or unsupported audio input."""


@dataclass(frozen=True)
class Signal:
    """Mono audio: float64 samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


_INT_SCALE = {
    np.dtype(np.int16): 2.0 ** 15,
    np.dtype(np.int32): 2.0 ** 31,
}


def load_audio(path: str, target_rate: int = DEFAULT_SAMPLE_RATE) -> Signal:
    """Decode a PCM/float WAV file to a mono Signal at `target_rate` Hz.

    Stereo input is averaged to mono; rate conversion uses windowed-sinc
    polyphase resampling.  24-bit PCM arrives via the decoder as int32.
    """
    if target_rate <= 0:
        raise AudioError(f"target_rate must be positive, got {target_rate}")
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise AudioError(f"audio file not found: {path}") from None
    except Exception as exc:
        raise AudioError(f"cannot decode WAV file {path}: {exc}") from exc

    if data.size == 0:
        raise AudioError(f"zero-length audio: {path}")
    if data.ndim > 2 or (data.ndim == 2 and data.shape[1] > 2):
        raise AudioError(f"{path}: only 1- or 2-channel audio is supported")

    dtype = data.dtype
    if dtype in _INT_SCALE:
        x = data.astype(np.float64) / _INT_SCALE[dtype]
    elif dtype == np.float32 or dtype == np.float64:
        x = data.astype(np.float64)
    else:
        raise AudioError(f"{path}: unsupported sample encoding {dtype}")

    if x.ndim == 2:
        x = x.mean(axis=1)

    if rate != target_rate:
        frac = Fraction(target_rate, int(rate))
        x = resample_poly(x, frac.numerator, frac.denominator)
        if x.size == 0:
            raise AudioError(f"zero-length audio after resampling: {path}")
    x = np.clip(x, -1.0, 1.0)
    return Signal(x, int(target_rate))


def frame_signal(
    signal: Signal, frame_seconds: float, hop_fraction: float
) -> np.ndarray:
    """Slice a signal into fixed-length overlapping frames.

    Frame length L = round(frame_seconds * sample_rate), hop
    H = round(L * hop_fraction); the trailing partial frame is discarded.
    Returns a (num_frames, L) read-only view.
    """
    if not 0 < hop_fraction <= 1:
        raise AudioError(f"hop_fraction must be in (0, 1], got {hop_fraction}")
    length = int(round(frame_seconds * signal.sample_rate))
    if length < 2:
        raise AudioError(
            f"frame of {frame_seconds} s at {signal.sample_rate} Hz is shorter than 2 samples"
        )
    if len(signal.samples) < length:
        raise AudioError(
            f"signal of {len(signal.samples)} samples is shorter than one "
            f"{length}-sample frame"
        )
    hop = max(1, int(round(length * hop_fraction)))
    return np.lib.stride_tricks.sliding_window_view(signal.samples, length)[::hop]

"""Handcrafted audio features: spectral flux, pulse clarity, event density, RMS.

All framed analyses share one parameterization: 0.05 s frames with a hop
of half a frame, a periodic Hann window, and magnitude (not power)
spectra.  Flux distances are Euclidean.  These choices are module
constants so downstream results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal.windows import hann

from grooveprobe.audio import AudioError, DEFAULT_SAMPLE_RATE, Signal, frame_signal
from grooveprobe.corpus import Track

FRAME_SECONDS = 0.05
HOP_FRACTION = 0.5

# Octave ladder starting at 50 Hz; the last band runs to Nyquist.
BAND_EDGES = (0.0, 50.0, 100.0, 200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0, 12800.0)

# Autocorrelation lag range for pulse clarity: periods 0.3-1.5 s (40-200 BPM).
PULSE_PERIOD_RANGE = (0.3, 1.5)
PULSE_MIN_DURATION = 4.0

# Adaptive peak picking for event density: threshold over a +-1 s window.
EVENT_THRESHOLD_K = 1.0
EVENT_WINDOW_SECONDS = 1.0

FEATURE_NAMES = (
    "flux_global",
    *(f"flux_band_{i}" for i in range(1, 11)),
    "pulse_clarity",
    "pulse_clarity_attack",
    "event_density",
    "rms_global",
    "rms_frame_std",
)


class FeatureError(AudioError):
    """Raised when a signal cannot support the requested feature."""


@dataclass(frozen=True)
class OnsetCurve:
    """Non-negative per-frame onset strength, max-normalized."""

    values: np.ndarray
    frame_rate: float


@dataclass(frozen=True)
class FeatureVector:
    """The 16 handcrafted features for one track, in FEATURE_NAMES order."""

    track_id: str
    values: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return {name: float(v) for name, v in zip(FEATURE_NAMES, self.values)}


def _magnitude_spectra(signal: Signal) -> tuple[np.ndarray, np.ndarray]:
    """Framed magnitude spectra and their bin center frequencies."""
    frames = frame_signal(signal, FRAME_SECONDS, HOP_FRACTION)
    window = hann(frames.shape[1], sym=False)
    spectra = np.abs(np.fft.rfft(frames * window, axis=1))
    freqs = np.fft.rfftfreq(frames.shape[1], d=1.0 / signal.sample_rate)
    return spectra, freqs


def _band_mask(freqs: np.ndarray, band: tuple[float, float], nyquist: float) -> np.ndarray:
    lo, hi = band
    if lo < 0 or hi > nyquist or lo >= hi:
        raise FeatureError(f"band {band} outside [0, {nyquist}] or empty")
    if hi >= nyquist:
        return freqs >= lo
    return (freqs >= lo) & (freqs < hi)


def spectral_flux(signal: Signal, band: tuple[float, float] | None = None) -> float:
    """Mean Euclidean distance between successive magnitude spectra.

    When `band` = (lo, hi) is given, only FFT bins with center frequency
    in [lo, hi) contribute; hi = Nyquist closes the interval.
    """
    spectra, freqs = _magnitude_spectra(signal)
    if spectra.shape[0] < 2:
        raise FeatureError("signal too short: need at least 2 analysis frames")
    if band is not None:
        spectra = spectra[:, _band_mask(freqs, band, signal.sample_rate / 2.0)]
    diffs = np.diff(spectra, axis=0)
    return float(np.mean(np.linalg.norm(diffs, axis=1)))


def subband_flux_bank(signal: Signal) -> np.ndarray:
    """Spectral flux in the 10 octave-doubling bands from 0 Hz to Nyquist."""
    spectra, freqs = _magnitude_spectra(signal)
    if spectra.shape[0] < 2:
        raise FeatureError("signal too short: need at least 2 analysis frames")
    nyquist = signal.sample_rate / 2.0
    edges = list(BAND_EDGES) + [nyquist]
    values = np.empty(10)
    for i in range(10):
        mask = _band_mask(freqs, (edges[i], edges[i + 1]), nyquist)
        diffs = np.diff(spectra[:, mask], axis=0)
        values[i] = np.mean(np.linalg.norm(diffs, axis=1))
    return values


def _frame_rms(signal: Signal) -> np.ndarray:
    frames = frame_signal(signal, FRAME_SECONDS, HOP_FRACTION)
    return np.sqrt(np.mean(frames * frames, axis=1))


def onset_curve(signal: Signal, mode: str = "flux") -> OnsetCurve:
    """Per-frame onset strength.

    mode="flux": half-wave-rectified spectral flux (increase-only spectral
    differences).  mode="attack": half-wave-rectified first difference of
    the framed RMS envelope, emphasizing attack slopes.  The curve is
    normalized by its maximum when that maximum is positive.
    """
    if mode == "flux":
        spectra, _ = _magnitude_spectra(signal)
        if spectra.shape[0] < 2:
            raise FeatureError("signal too short: need at least 2 analysis frames")
        rectified = np.maximum(np.diff(spectra, axis=0), 0.0)
        strengths = np.linalg.norm(rectified, axis=1)
    elif mode == "attack":
        rms = _frame_rms(signal)
        if rms.shape[0] < 2:
            raise FeatureError("signal too short: need at least 2 analysis frames")
        strengths = np.maximum(np.diff(rms), 0.0)
    else:
        raise ValueError(f"unknown onset mode {mode!r}; expected 'flux' or 'attack'")

    values = np.concatenate(([0.0], strengths))
    peak = values.max()
    if peak > 0:
        values = values / peak
    frame_length = int(round(FRAME_SECONDS * signal.sample_rate))
    hop = max(1, int(round(frame_length * HOP_FRACTION)))
    return OnsetCurve(values, signal.sample_rate / hop)


def pulse_clarity(signal: Signal, mode: str = "flux") -> float:
    """Strength of the dominant 40-200 BPM periodicity in the onset curve.

    Maximum of the normalized autocorrelation of the mean-removed curve
    over lags for periods 0.3-1.5 s, clamped to [0, 1].  An all-zero or
    constant curve yields 0.
    """
    if signal.duration < PULSE_MIN_DURATION:
        raise FeatureError(
            f"pulse clarity needs at least {PULSE_MIN_DURATION} s of audio, "
            f"got {signal.duration:.2f} s"
        )
    curve = onset_curve(signal, mode)
    c = curve.values - curve.values.mean()
    denom = float(np.dot(c, c))
    if denom <= 0.0:
        return 0.0
    lag_min = max(1, int(round(PULSE_PERIOD_RANGE[0] * curve.frame_rate)))
    lag_max = min(len(c) - 1, int(round(PULSE_PERIOD_RANGE[1] * curve.frame_rate)))
    if lag_min > lag_max:
        return 0.0
    best = max(
        float(np.dot(c[:-lag], c[lag:])) / denom for lag in range(lag_min, lag_max + 1)
    )
    return min(1.0, max(0.0, best))


def event_density(signal: Signal) -> float:
    """Detected onsets per second.

    A frame is an event if it is a strict local maximum of the flux onset
    curve and exceeds the moving mean plus EVENT_THRESHOLD_K moving
    standard deviations over a +-1 s window.
    """
    if signal.duration < 1.0:
        raise FeatureError(f"event density needs at least 1 s, got {signal.duration:.2f} s")
    curve = onset_curve(signal, "flux")
    v = curve.values
    n = len(v)
    radius = int(round(EVENT_WINDOW_SECONDS * curve.frame_rate))

    # Clipped-window moving mean/std via cumulative sums.
    csum = np.concatenate(([0.0], np.cumsum(v)))
    csum2 = np.concatenate(([0.0], np.cumsum(v * v)))
    idx = np.arange(n)
    lo = np.maximum(idx - radius, 0)
    hi = np.minimum(idx + radius + 1, n)
    count = hi - lo
    mean = (csum[hi] - csum[lo]) / count
    var = np.maximum((csum2[hi] - csum2[lo]) / count - mean * mean, 0.0)
    threshold = mean + EVENT_THRESHOLD_K * np.sqrt(var)

    interior = idx[1 : n - 1]
    is_peak = (v[interior] > v[interior - 1]) & (v[interior] > v[interior + 1])
    events = int(np.count_nonzero(is_peak & (v[interior] > threshold[interior])))
    return events / signal.duration


def rms_global(signal: Signal) -> float:
    """Root mean square of all samples."""
    if len(signal.samples) == 0:
        raise FeatureError("empty signal")
    return float(np.sqrt(np.mean(signal.samples * signal.samples)))


def rms_frame_std(signal: Signal) -> float:
    """Population standard deviation of per-frame RMS values."""
    rms = _frame_rms(signal)
    if rms.shape[0] < 2:
        raise FeatureError("signal too short: need at least 2 analysis frames")
    return float(np.std(rms))


def extract_features(signal: Signal, track_id: str = "") -> FeatureVector:
    """Compute the 16-feature vector from an in-memory signal."""
    values = np.empty(16)
    values[0] = spectral_flux(signal)
    values[1:11] = subband_flux_bank(signal)
    values[11] = pulse_clarity(signal, "flux")
    values[12] = pulse_clarity(signal, "attack")
    values[13] = event_density(signal)
    values[14] = rms_global(signal)
    values[15] = rms_frame_std(signal)
    if not np.all(np.isfinite(values)):
        raise FeatureError(f"non-finite feature value for track {track_id!r}")
    return FeatureVector(track_id, values)


def extract_feature_vector(
    track: Track, sample_rate: int = DEFAULT_SAMPLE_RATE
) -> FeatureVector:
    """Load a track's full mix and compute its 16-feature vector."""
    from grooveprobe.audio import load_audio

    signal = load_audio(track.audio_path, sample_rate)
    return extract_features(signal, track.id)

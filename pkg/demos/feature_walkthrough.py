"""Walk through the hand-crafted audio features on synthetic signals.

Run with:  python3 demos/feature_walkthrough.py
"""
import numpy as np

from grooveprobe.audio import Signal
from grooveprobe.features import (
    FEATURE_NAMES,
    extract_features,
    onset_curve,
    pulse_clarity,
    spectral_flux,
)

SR = 44100


def click_track(bpm, duration):
    x = np.zeros(int(duration * SR))
    step = int(round(60 / bpm * SR))
    for start in range(0, len(x) - 200, step):
        x[start : start + 200] = 0.8
    return x


def main():
    # A steady sine has an essentially constant spectrum, so its flux is
    # tiny; a gated version of the same tone produces large flux at every
    # on/off transition.
    t = np.arange(SR * 4) / SR
    steady = Signal(0.8 * np.sin(2 * np.pi * 440 * t), SR)
    gate = (np.floor(t * 2) % 2 == 0).astype(float)
    gated = Signal(steady.samples * gate, SR)
    print("spectral flux, steady tone :", spectral_flux(steady))
    print("spectral flux, gated tone  :", spectral_flux(gated))
    print()

    # A click track at 120 BPM is as periodic as it gets; white noise has
    # no repeating pulse at all. Pulse clarity separates the two cleanly.
    clicks = Signal(click_track(120, 10.0), SR)
    noise = Signal(0.3 * np.random.default_rng(0).standard_normal(SR * 10), SR)
    print("pulse clarity, 120 BPM clicks :", pulse_clarity(clicks))
    print("pulse clarity, white noise    :", pulse_clarity(noise))
    print()

    # The onset curve is what pulse clarity and event density both consume.
    # Its peaks line up with the clicks.
    curve = onset_curve(clicks)
    peaks = np.flatnonzero(
        (curve.values[1:-1] > curve.values[:-2])
        & (curve.values[1:-1] > curve.values[2:])
    )
    print(f"onset curve: {len(curve.values)} frames at {curve.frame_rate:.1f} Hz,")
    print(f"first few peak times: {np.round((peaks[:5] + 1) / curve.frame_rate, 2)} s")
    print()

    # The full 16-dimensional vector, one line per feature.
    vec = extract_features(clicks, "demo")
    width = max(len(n) for n in FEATURE_NAMES)
    for name, value in vec.as_dict().items():
        print(f"  {name:<{width}} {value: .5f}")


if __name__ == "__main__":
    main()

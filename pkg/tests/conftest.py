"""Shared synthetic fixtures: WAV generators and a 12-track corpus."""

from __future__ import annotations

import os

import numpy as np
import pytest
from scipy.io import wavfile

SR = 44100


def write_wav(path, samples, sr=SR, dtype=np.int16):
    samples = np.asarray(samples)
    if dtype == np.int16:
        data = np.clip(samples * 32767, -32768, 32767).astype(np.int16)
    elif dtype == np.float32:
        data = samples.astype(np.float32)
    else:
        data = samples.astype(dtype)
    wavfile.write(path, sr, data)


def sine(freq, duration, sr=SR, amp=1.0):
    t = np.arange(int(round(duration * sr))) / sr
    return amp * np.sin(2 * np.pi * freq * t)


def click_track(bpm, duration, sr=SR, amp=0.8, click_freq=3000.0):
    x = np.zeros(int(round(duration * sr)))
    period = 60.0 / bpm
    burst_len = 220
    burst = amp * np.sin(2 * np.pi * click_freq * np.arange(burst_len) / sr)
    burst *= np.hanning(burst_len)
    k = 0
    while True:
        i = int(round(k * period * sr))
        if i + burst_len > len(x):
            break
        x[i : i + burst_len] += burst
        k += 1
    return x


def make_signal(samples, sr=SR):
    from grooveprobe.audio import Signal

    return Signal(np.asarray(samples, dtype=np.float64), sr)


N_TRACKS = 12
EMB_DIM = 512  # matches the muq/clap registry dimension
STYLES = ["funk"] * 4 + ["pop"] * 4 + ["rock"] * 4


def planted_ratings():
    """Per-track rating targets: all affine in one latent groove axis."""
    u = np.linspace(-1.0, 1.0, N_TRACKS)
    return {
        "groove": u,
        "dance": 50 + 40 * u,
        "listen": 50 + 30 * u,
        "party": 50 + 35 * u,
    }


def build_embeddings(emb_root):
    """muq carries the planted linear signal; clap is pure noise."""
    from grooveprobe.reporting import fmt9

    rng = np.random.default_rng(1234)
    u = np.linspace(-1.0, 1.0, N_TRACKS)
    style_index = [0] * 4 + [1] * 4 + [2] * 4
    axis = rng.standard_normal(EMB_DIM)
    axis /= np.linalg.norm(axis)
    centers = rng.standard_normal((3, EMB_DIM)) * 0.04

    signal_rows = np.stack(
        [
            centers[style_index[i]] + u[i] * axis + 0.02 * rng.standard_normal(EMB_DIM)
            for i in range(N_TRACKS)
        ]
    )
    noise_rows = rng.standard_normal((N_TRACKS, EMB_DIM)) * 0.1

    header = ",".join(f"dim_{i}" for i in range(EMB_DIM))
    for model, rows in (("muq", signal_rows), ("clap", noise_rows)):
        directory = os.path.join(emb_root, model, "full")
        os.makedirs(directory, exist_ok=True)
        for i in range(N_TRACKS):
            with open(os.path.join(directory, f"t{i:02d}.csv"), "w") as fh:
                fh.write(header + "\n")
                fh.write(",".join(fmt9(v) for v in rows[i]) + "\n")


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """12-track synthetic corpus: WAVs, manifest with planted ratings, embeddings."""
    root = tmp_path_factory.mktemp("corpus")
    audio_dir = root / "audio"
    audio_dir.mkdir()
    ratings = planted_ratings()

    lines = [
        "id,title,style,audio_path,bass_path,drums_path,vocals_path,other_path,"
        "dance,listen,party,groove"
    ]
    for i in range(N_TRACKS):
        tid = f"t{i:02d}"
        bpm = 90 + 10 * i
        x = click_track(bpm, 5.0, amp=0.5) + sine(200 + 40 * i, 5.0, amp=0.15)
        x *= 0.4 + 0.04 * i
        write_wav(audio_dir / f"{tid}.wav", x)
        lines.append(
            f"{tid},Track {i},{STYLES[i]},audio/{tid}.wav,,,,,"
            f"{ratings['dance'][i]:.6f},{ratings['listen'][i]:.6f},"
            f"{ratings['party'][i]:.6f},{ratings['groove'][i]:.6f}"
        )
    (root / "manifest.csv").write_text("\n".join(lines) + "\n")

    build_embeddings(str(root / "emb"))
    return root

import numpy as np
import pytest
from scipy.io import wavfile

SR = 44100


def make_track(seed, duration=3.0):
    rng = np.random.default_rng(seed)
    t = np.arange(int(duration * SR)) / SR
    x = 0.4 * np.sin(2 * np.pi * (100 + 50 * seed) * t)
    x += 0.2 * np.sin(2 * np.pi * 1500 * t)
    x += 0.05 * rng.standard_normal(len(t))
    # a click every half second so there is broadband transient content
    for start in range(0, len(x) - 200, SR // 2):
        x[start : start + 200] += 0.3
    return np.clip(x, -1, 1)


@pytest.fixture(scope="session")
def manifest_dir(tmp_path_factory):
    """Three-track manifest with full-mix audio and stem columns."""
    root = tmp_path_factory.mktemp("tracks")
    (root / "audio").mkdir()
    header = (
        "id,title,style,audio_path,bass_path,drums_path,vocals_path,"
        "other_path,dance,listen,party,groove\n"
    )
    rows = []
    for i in range(3):
        wav = root / "audio" / f"t{i}.wav"
        wavfile.write(wav, SR, make_track(i).astype(np.float32))
        rows.append(
            f"t{i},Track {i},funk,audio/t{i}.wav,audio/t{i}.wav,audio/t{i}.wav,"
            f"audio/t{i}.wav,audio/t{i}.wav,60,55,50,\n"
        )
    (root / "manifest.csv").write_text(header + "".join(rows))
    return root

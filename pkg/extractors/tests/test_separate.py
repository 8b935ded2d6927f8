import numpy as np
import pytest
from scipy.io import wavfile

from groove_extractors.separate import STEM_NAMES, separate_stems


@pytest.fixture(scope="module")
def separated(manifest_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("stems")
    return separate_stems(str(manifest_dir / "manifest.csv"), str(out)), out


class TestStemContract:
    """Acceptance: 4 stems per input, duration within ±50 ms."""

    def test_exactly_four_stems_per_track(self, separated):
        results, _ = separated
        assert len(results) == 3
        for stems in results.values():
            assert sorted(stems) == sorted(STEM_NAMES)
        print("PASS: stem contract — 3 tracks x exactly 4 stems")

    def test_durations_within_50ms(self, manifest_dir, separated):
        results, _ = separated
        rate_in, mix = wavfile.read(manifest_dir / "audio" / "t0.wav")
        for path in results["t0"].values():
            rate, data = wavfile.read(path)
            assert rate == rate_in
            assert abs(len(data) - len(mix)) / rate_in <= 0.050
        print("PASS: stem contract — durations within ±50 ms of the input")

    def test_stem_sum_matches_mix(self, manifest_dir, separated):
        results, _ = separated
        _, mix = wavfile.read(manifest_dir / "audio" / "t0.wav")
        total = np.zeros(len(mix))
        for path in results["t0"].values():
            _, data = wavfile.read(path)
            total[: len(data)] += data
        corr = np.corrcoef(total, mix.astype(np.float64))[0, 1]
        assert corr > 0.9

    def test_stems_differ_from_each_other(self, separated):
        results, _ = separated
        loaded = {
            name: wavfile.read(path)[1] for name, path in results["t0"].items()
        }
        assert not np.allclose(loaded["bass"], loaded["drums"])
        assert not np.allclose(loaded["vocals"], loaded["other"])

    def test_output_layout(self, separated):
        results, out = separated
        for name in STEM_NAMES:
            assert (out / name / "t1.wav").exists()


def test_missing_audio_rejected(tmp_path):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("id,audio_path\nt0,missing.wav\n")
    with pytest.raises(Exception, match="t0"):
        separate_stems(str(manifest), str(tmp_path / "out"))

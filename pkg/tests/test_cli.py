"""CLI surfaces: loadgen, audiometer report, bench run/kernels."""

import json

from click.testing import CliRunner

from lanecast.cli import audiometer, bench, loadgen
from lanecast.loadgen import workload_from_json


class TestLoadgenCommand:
    def test_writes_workload_file(self, tmp_path):
        out = str(tmp_path / "workload.json")
        result = CliRunner().invoke(
            loadgen,
            ["--duration", "10", "--rate", "5", "--seed", "42", "--out", out],
        )
        assert result.exit_code == 0, result.output
        with open(out) as fh:
            payload = json.load(fh)
        assert payload["profile"]["seed"] == 42
        events = workload_from_json(json.dumps(payload))
        assert events and all(e.timestamp < 10 for e in events)

    def test_stdout_mode(self):
        result = CliRunner().invoke(loadgen, ["--duration", "2", "--rate", "1"])
        assert result.exit_code == 0
        assert json.loads(result.output)["profile"]["dmk_rate"] == 1.0

    def test_invalid_profile_fails_cleanly(self):
        result = CliRunner().invoke(loadgen, ["--storm-probability", "2.0"])
        assert result.exit_code != 0
        assert "storm_probability" in result.output


class TestAudiometerCommand:
    def test_report_json_fields(self, tmp_path):
        from lanecast.audio.pcm import sine, write_wav

        path = str(tmp_path / "tone.wav")
        write_wav(path, sine(997.0, 1.0, amplitude=0.5, channels=2))
        result = CliRunner().invoke(audiometer, ["report", path])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert set(payload) == {
            "integrated_lufs", "true_peak_dbtp", "gated_block_count", "below_gate",
        }
        assert payload["below_gate"] is False
        assert payload["true_peak_dbtp"] < 0

    def test_silence_reports_null_sentinel(self, tmp_path):
        from lanecast.audio.pcm import silence, write_wav

        path = str(tmp_path / "silence.wav")
        write_wav(path, silence(1.0))
        payload = json.loads(CliRunner().invoke(audiometer, ["report", path]).output)
        assert payload["below_gate"] is True
        assert payload["integrated_lufs"] is None


class TestBenchCommand:
    def test_run_default_profile_short(self, tmp_path):
        out = str(tmp_path / "report.json")
        result = CliRunner().invoke(
            bench, ["run", "--profile", "default", "--duration", "5", "--report", out]
        )
        assert result.exit_code == 0, result.output
        with open(out) as fh:
            payload = json.load(fh)
        assert payload["overlap_rate"] == 0.0
        assert payload["config_echo"]["profile"]["duration"] == 5

    def test_kernels_compare_backends(self):
        result = CliRunner().invoke(bench, ["kernels", "--seconds", "0.5"])
        assert result.exit_code == 0, result.output
        assert "gain_i16" in result.output
        assert "numpy=" in result.output

import json
import subprocess
import sys

from photonic_rnn.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDevice:
    def test_default_bank(self, capsys):
        code, out, _ = run(["device", "--q", "5000", "--cs", "2.5", "--mrs", "15"], capsys)
        assert code == 0
        assert "resolution = 16 bits" in out

    def test_fsr(self, capsys):
        code, out, _ = run(["device", "--fsr", "--r", "5um", "--ng", "3.96", "--wavelength", "1550"], capsys)
        assert code == 0
        assert "FSR = 19.31 nm" in out

    def test_kappa_inverse(self, capsys):
        code, out, _ = run(["device", "--r", "5um", "--q", "5000"], capsys)
        assert code == 0
        assert "kappa = 0.22175" in out

    def test_writes_report(self, capsys, tmp_path):
        code, _, _ = run(["device", "--out", tmp_path], capsys)
        assert code == 0
        assert (tmp_path / "device_report.txt").exists()

    def test_bad_length(self, capsys):
        code, _, err = run(["device", "--r", "5kg"], capsys)
        assert code == 1
        assert "not convertible to nm" in err

    def test_bad_params_file(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        path.write_text('{\n "nope": 1\n}\n')
        code, _, err = run(["device", "--params", path], capsys)
        assert code == 2
        assert f"{path}:2:" in err


class TestSimulate:
    def test_outputs(self, capsys, tmp_path, data_dir):
        code, out, _ = run(["simulate", "--model", data_dir / "models/toy_lstm.json",
                            "--config", "15,15,40,10", "--out", tmp_path], capsys)
        assert code == 0
        assert "pJ/bit" in out
        for ext in ("csv", "txt", "json"):
            assert (tmp_path / f"toy_lstm_report.{ext}").exists()
        data = json.loads((tmp_path / "toy_lstm_report.json").read_text())
        assert data["model_tag"] == "TS-LSTM"

    def test_byte_identical_reruns(self, capsys, tmp_path, data_dir):
        outs = []
        for sub in ("a", "b"):
            run(["simulate", "--model", data_dir / "models/toy_gru.json", "--config", "15,15,40,10",
                 "--out", tmp_path / sub], capsys)
            outs.append((tmp_path / sub / "toy_gru_report.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_infeasible_config(self, capsys, tmp_path, data_dir):
        code, _, err = run(["simulate", "--model", data_dir / "models/toy_rnn.json",
                            "--config", "20,15,40,10", "--out", tmp_path], capsys)
        assert code == 3
        assert "v exceeds 16-bit bank limit (15)" in err

    def test_bad_config_is_usage_error(self, capsys, data_dir):
        code, _, err = run(["simulate", "--model", data_dir / "models/toy_rnn.json", "--config", "1,2"], capsys)
        assert code == 1
        assert "v,N,M,N_WG" in err

    def test_empty_model_file(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("")
        code, _, err = run(["simulate", "--model", path, "--config", "15,15,40,10", "--out", tmp_path], capsys)
        assert code == 2
        assert str(path) in err

    def test_malformed_model_line(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"name": "m",\n "layers": [\n  {"kind": "GRU", "d": 2, "h": 0}\n]}\n')
        code, _, err = run(["simulate", "--model", path, "--config", "15,15,40,10", "--out", tmp_path], capsys)
        assert code == 2
        assert f"{path}:3:" in err


class TestDse:
    def _sweep(self, tmp_path, data_dir):
        path = tmp_path / "sweep.yaml"
        path.write_text(f"v: [5, 15, 20]\nn: [5, 15]\nm: [10, 40]\nnwg: [1, 10]\n"
                        f"models:\n  - {data_dir}/models/toy_rnn.json\n  - {data_dir}/models/toy_lstm.json\n")
        return path

    def test_outputs_and_star(self, capsys, tmp_path, data_dir):
        code, out, _ = run(["dse", "--sweep", self._sweep(tmp_path, data_dir), "--out", tmp_path / "o"], capsys)
        assert code == 0
        assert "best config [v, N, M, N_WG]: [" in out
        svg = (tmp_path / "o" / "dse_scatter.svg").read_text()
        assert 'id="best-star"' in svg
        results = (tmp_path / "o" / "dse_results.csv").read_text().splitlines()
        assert len(results) == 1 + 3 * 2 * 2 * 2
        assert all(line.split(",")[4] == "0" for line in results[1:] if line.startswith("20,"))

    def test_byte_identical(self, capsys, tmp_path, data_dir):
        sweep = self._sweep(tmp_path, data_dir)
        for sub in ("a", "b"):
            assert run(["dse", "--sweep", sweep, "--out", tmp_path / sub], capsys)[0] == 0
        for name in ("dse_results.csv", "dse_scatter.csv", "dse_scatter.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_models_on_default_grid(self, capsys, tmp_path, data_dir):
        code, out, _ = run(["dse", "--model", data_dir / "models/toy_rnn.json", "--out", tmp_path], capsys)
        assert code == 0
        assert "evaluated 108 configurations (108 feasible)" in out

    def test_no_input(self, capsys, tmp_path):
        code, _, err = run(["dse", "--out", tmp_path], capsys)
        assert code == 1

    def test_all_infeasible(self, capsys, tmp_path, data_dir):
        path = tmp_path / "s.yaml"
        path.write_text(f"v: [20]\nn: [1]\nm: [1]\nnwg: [1]\nmodels:\n  - {data_dir}/models/toy_rnn.json\n")
        code, _, err = run(["dse", "--sweep", path, "--out", tmp_path], capsys)
        assert code == 3


class TestCompare:
    def test_end_to_end(self, capsys, tmp_path, data_dir):
        for name in ("toy_lstm", "toy_gru"):
            run(["simulate", "--model", data_dir / f"models/{name}.json", "--config", "15,15,40,10",
                 "--out", tmp_path], capsys)
        code, out, _ = run(["compare", "--baselines", data_dir / "baselines_template.csv",
                            "--report", tmp_path / "toy_lstm_report.json",
                            "--report", tmp_path / "toy_gru_report.json", "--out", tmp_path], capsys)
        assert code == 0
        assert "skipped 1" in out
        assert (tmp_path / "comparison.csv").exists()
        assert (tmp_path / "epb_comparison.svg").exists()
        assert (tmp_path / "gops_comparison.svg").exists()

    def test_bad_report(self, capsys, tmp_path, data_dir):
        path = tmp_path / "r.json"
        path.write_text("{\n oops")
        code, _, err = run(["compare", "--baselines", data_dir / "baselines_template.csv",
                            "--report", path, "--out", tmp_path], capsys)
        assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "photonic_rnn", "device", "--mrs", "16"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "resolution = 15 bits" in res.stdout


def test_missing_subcommand(capsys):
    assert run([], capsys)[0] == 1
    assert run(["--help"], capsys)[0] == 0

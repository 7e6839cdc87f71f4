import csv
import json
import math

import pytest

from unli.cli import main
from unli.loss import BvnParams, unli_1d, unli_2d
from unli.trial import COPD_PRESET_SEED


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestUnli1d:
    def test_standard_value(self, capsys):
        code, out, _ = run(capsys, "unli1d", "--mu", "0", "--sd", "1")
        assert code == 0
        assert out.strip() == "0.3989422804"

    def test_mass_positive(self, capsys):
        code, out, _ = run(capsys, "unli1d", "--mu", "10", "--sd", "1")
        assert code == 0
        assert float(out) == pytest.approx(10.0, abs=1e-10)

    def test_negative_mean(self, capsys):
        code, out, _ = run(capsys, "unli1d", "--mu", "-2", "--sd", "1")
        assert code == 0
        assert float(out) == pytest.approx(unli_1d(-2.0, 1.0), rel=1e-9)

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run(capsys, "unli1d", "--mu", "0", "--sd", "0")
        assert code == 2
        assert "error" in err

    def test_json_roundtrip(self, capsys):
        code, out, _ = run(capsys, "unli1d", "--mu", "-2", "--sd", "1", "--json")
        record = json.loads(out)
        assert record["command"] == "unli1d"
        assert record["inputs"]["mu"] == -2.0
        assert record["inputs"]["sd"] == 1.0
        assert record["results"]["unli"] == unli_1d(-2.0, 1.0)


class TestUnli2d:
    def test_table_row_rounded(self, capsys):
        code, out, _ = run(
            capsys, "unli2d", "--mu1", "-2", "--mu2", "-2", "--sd1", "1", "--sd2", "1",
            "--rho", "-0.75", "--round-3",
        )
        assert code == 0
        assert out.strip() == "0.017"

    def test_degenerate_rho_rejected(self, capsys):
        code, _, err = run(
            capsys, "unli2d", "--mu1", "0", "--mu2", "0", "--sd1", "1", "--sd2", "1",
            "--rho", "1.0",
        )
        assert code == 2
        assert "rho" in err

    def test_breakdown_sums(self, capsys):
        code, out, _ = run(
            capsys, "unli2d", "--mu1", "1", "--mu2", "-1", "--sd1", "2", "--sd2", "1",
            "--rho", "0.4", "--breakdown", "--json",
        )
        r = json.loads(out)["results"]
        assert r["total"] == pytest.approx(r["u12"] + r["v12"] + r["u21"] + r["v21"], rel=1e-12)
        b = unli_2d(BvnParams(1, -1, 2, 1, 0.4))
        assert r["total"] == b.total


class TestEvpi:
    def test_case_study_params(self, capsys):
        code, out, _ = run(
            capsys, "evpi", "--mu1", "-4734", "--mu2", "-2668", "--sd1", "4678",
            "--sd2", "4645", "--rho", "0.50",
        )
        assert code == 0
        assert round(float(out)) == 1019

    def test_hopeless_alternatives(self, capsys):
        # = syntax because argparse rejects bare negative scientific notation
        code, out, _ = run(
            capsys, "evpi", "--mu1=-1e6", "--mu2=-1e6", "--sd1", "1",
            "--sd2", "1", "--rho", "0",
        )
        assert code == 0
        assert float(out) == 0.0

    def test_two_strategy_mode(self, capsys):
        code, out, _ = run(capsys, "evpi", "--mu-inb", "0", "--sd-inb", "1")
        assert code == 0
        assert float(out) == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=1e-9)

    def test_trial_mode(self, capsys, tmp_path):
        trial = tmp_path / "t.csv"
        code, _, _ = run(
            capsys, "synth", "--preset", "copd", "--seed", str(COPD_PRESET_SEED),
            "--out", str(trial),
        )
        assert code == 0
        code, out, _ = run(
            capsys, "evpi", "--trial", str(trial), "--ref-arm", "single", "--wtp", "50000",
        )
        assert code == 0
        assert float(out) == pytest.approx(1007.729, abs=0.01)

    def test_missing_trial_file(self, capsys):
        code, _, err = run(
            capsys, "evpi", "--trial", "nope.csv", "--ref-arm", "a", "--wtp", "1",
        )
        assert code == 2
        assert "file error" in err

    def test_mixed_modes_rejected(self, capsys):
        code, _, err = run(capsys, "evpi", "--mu1", "1", "--mu-inb", "1", "--sd-inb", "2")
        assert code == 2


class TestSimgrid:
    def test_small_grid_deterministic(self, capsys, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (out1, out2):
            code, _, _ = run(
                capsys, "simgrid", "--n", "100", "--seed", "5", "--out", str(out),
                "--grid-default",
            )
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        with open(out1) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 252

    def test_seed_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simgrid", "--n", "100", "--out", "x.csv"])
        assert exc.value.code == 2

    def test_closed_column_matches_library(self, capsys, tmp_path):
        out = tmp_path / "g.csv"
        run(capsys, "simgrid", "--n", "50", "--seed", "1", "--out", str(out))
        with open(out) as f:
            row = next(csv.DictReader(f))
        p = BvnParams(
            float(row["mu1"]), float(row["mu2"]),
            math.sqrt(float(row["var1"])), math.sqrt(float(row["var2"])), float(row["rho"]),
        )
        assert float(row["closed"]) == unli_2d(p).total

    def test_plot_written(self, capsys, tmp_path):
        out, fig = tmp_path / "g.csv", tmp_path / "g.png"
        code, _, _ = run(
            capsys, "simgrid", "--n", "50", "--seed", "1", "--out", str(out),
            "--plot", str(fig),
        )
        assert code == 0
        assert fig.stat().st_size > 0

    def test_round3_closed_column_matches_golden_table(self, capsys, tmp_path, golden_grid_path):
        out = tmp_path / "g3.csv"
        code, _, _ = run(
            capsys, "simgrid", "--n", "50", "--seed", "2", "--out", str(out), "--round-3",
        )
        assert code == 0
        with open(out) as f:
            got = [row["closed"] for row in csv.DictReader(f)]
        with open(golden_grid_path) as f:
            want = [f"{float(row['expected']):.3f}" for row in csv.DictReader(f)]
        assert got == want


class TestEvpiCurve:
    @pytest.fixture()
    def trial_path(self, capsys, tmp_path):
        trial = tmp_path / "t.csv"
        run(capsys, "synth", "--preset", "copd", "--seed", str(COPD_PRESET_SEED),
            "--out", str(trial))
        return str(trial)

    def test_closed_curve(self, capsys, tmp_path, trial_path):
        out = tmp_path / "c.csv"
        code, _, _ = run(
            capsys, "evpi-curve", "--trial", trial_path, "--ref-arm", "single",
            "--wtp-min", "0", "--wtp-max", "100000", "--wtp-step", "5000",
            "--method", "closed", "--out", str(out),
        )
        assert code == 0
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 21
        assert {r["method"] for r in rows} == {"closed"}
        wtps = [float(r["wtp"]) for r in rows]
        assert wtps == sorted(wtps)

    def test_step_larger_than_range(self, capsys, tmp_path, trial_path):
        out = tmp_path / "single.csv"
        code, _, _ = run(
            capsys, "evpi-curve", "--trial", trial_path, "--ref-arm", "single",
            "--wtp-min", "50000", "--wtp-max", "60000", "--wtp-step", "99999",
            "--method", "closed", "--out", str(out),
        )
        assert code == 0
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 1
        assert float(rows[0]["wtp"]) == 50000.0

    def test_bootstrap_requires_seed(self, capsys, tmp_path, trial_path):
        code, _, err = run(
            capsys, "evpi-curve", "--trial", trial_path, "--ref-arm", "single",
            "--wtp-min", "0", "--wtp-max", "10000", "--wtp-step", "5000",
            "--method", "bootstrap", "--out", str(tmp_path / "b.csv"),
        )
        assert code == 2
        assert "--seed" in err

    def test_bootstrap_curve_with_plot(self, capsys, tmp_path, trial_path):
        out, fig = tmp_path / "b.csv", tmp_path / "b.png"
        code, stdout, _ = run(
            capsys, "evpi-curve", "--trial", trial_path, "--ref-arm", "single",
            "--wtp-min", "0", "--wtp-max", "20000", "--wtp-step", "10000",
            "--method", "bootstrap", "--boot-b", "100", "--seed", "3",
            "--out", str(out), "--plot", str(fig), "--json",
        )
        assert code == 0
        record = json.loads(stdout)
        assert record["inputs"]["seed"] == 3
        assert record["results"]["seed"] == 3
        assert fig.stat().st_size > 0


class TestSynth:
    def test_preset_count_and_determinism(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            code, _, _ = run(capsys, "synth", "--preset", "copd", "--seed", "240",
                             "--out", str(out))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        with open(a) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 449

    def test_spec_file(self, capsys, tmp_path):
        spec = [
            dict(name="x", n=5, mean_cost=10.0, sd_cost=1.0, mean_effect=0.5,
                 sd_effect=0.1, cost_effect_corr=0.0),
            dict(name="y", n=6, mean_cost=10.0, sd_cost=1.0, mean_effect=0.5,
                 sd_effect=0.1, cost_effect_corr=0.2),
            dict(name="z", n=7, mean_cost=10.0, sd_cost=1.0, mean_effect=0.5,
                 sd_effect=0.1, cost_effect_corr=-0.2),
        ]
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        out = tmp_path / "t.csv"
        code, _, _ = run(capsys, "synth", "--spec", str(spec_path), "--seed", "1",
                         "--out", str(out))
        assert code == 0
        with open(out) as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == 18

    def test_invalid_spec_exits_2(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps([{"name": "x"}]))
        code, _, err = run(capsys, "synth", "--spec", str(spec_path), "--seed", "1",
                           "--out", str(tmp_path / "t.csv"))
        assert code == 2

    def test_seed_required(self, capsys, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--preset", "copd", "--out", str(tmp_path / "t.csv")])
        assert exc.value.code == 2

    def test_unwritable_output_exits_3(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "synth", "--preset", "copd", "--seed", "1",
            "--out", str(tmp_path / "no" / "such" / "dir" / "t.csv"),
        )
        assert code == 3
        assert "i/o error" in err


class TestEntryPoint:
    def test_module_invocation(self):
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-m", "unli.cli", "unli1d", "--mu", "0", "--sd", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "0.3989422804"

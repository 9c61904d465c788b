import csv
import json
import math

import pytest

from supermt.cli import ExperimentConfig, main, run, validate_summary


def read_summary(outdir, command):
    path = outdir / f"{command}_summary.json"
    summary = json.loads(path.read_text())
    validate_summary(command, summary)   # round-trip against the schema
    return summary


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestConstantsCommand:
    def test_reference_values(self, tmp_path):
        cfg = ExperimentConfig("constants", {"n": 2, "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "constants")
        assert s["alpha"] == pytest.approx(12.5663706, abs=1e-6)
        assert s["concentration_level"] == pytest.approx(
            math.pi * (1 + math.e), rel=1e-12)

    def test_invalid_dimension_exit_2(self, tmp_path):
        assert run(ExperimentConfig("constants",
                                    {"n": 1, "out": str(tmp_path)})) == 2


class TestEvalCommand:
    def test_zero_input_gives_ball_volume(self, tmp_path):
        cfg = ExperimentConfig("eval", {"n": 2, "kind": "mt1", "alpha": 1.0,
                                        "input": "zero", "count": 500,
                                        "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "eval")
        assert s["value"] == pytest.approx(math.pi, abs=1e-10)
        assert s["diverged"] is False

    def test_moser_input(self, tmp_path):
        cfg = ExperimentConfig("eval", {"n": 2, "kind": "mt", "input": "moser:64",
                                        "count": 2000, "out": str(tmp_path)})
        assert run(cfg) == 0
        assert read_summary(tmp_path, "eval")["value"] > math.pi

    def test_unknown_input_exit_1(self, tmp_path):
        cfg = ExperimentConfig("eval", {"n": 2, "input": "bogus",
                                        "out": str(tmp_path)})
        assert run(cfg) == 1
        err = json.loads((tmp_path / "eval_error.json").read_text())
        assert err["error_type"] == "ValueError"


class TestMaximizeCommand:
    def test_summary_and_plot_data(self, tmp_path):
        cfg = ExperimentConfig("maximize", {"n": 2, "kind": "mt", "seed": 0,
                                            "count": 600, "strength": 25.0,
                                            "max_iters": 150,
                                            "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "maximize")
        assert s["best_value"] > math.pi
        trace = read_csv(tmp_path / s["trace_file"])
        assert trace[0] == ["iteration", "value"]
        vals = [float(row[1]) for row in trace[1:]]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        prof = read_csv(tmp_path / s["profile_file"])
        assert prof[0] == ["r", "u"]
        assert float(prof[1][0]) == 0.0
        assert float(prof[-1][0]) == 1.0 and float(prof[-1][1]) == 0.0

    def test_deterministic_given_seed(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            cfg = ExperimentConfig("maximize",
                                   {"n": 2, "kind": "mt", "seed": 3,
                                    "count": 400, "strength": 20.0,
                                    "max_iters": 60, "out": str(out)})
            assert run(cfg) == 0
        for name in ("maximize_summary.json", "maximize_trace.csv",
                     "maximize_profile.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestGapCommand:
    def test_gap_positive(self, tmp_path):
        cfg = ExperimentConfig("gap", {"n": 2, "kind1": "mt1", "kind2": "mt",
                                       "alpha": 1.0, "count": 800,
                                       "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "gap")
        assert s["gap"] > 0.0
        assert s["significant"] is True


class TestSharpnessCommand:
    def test_csv_dominates_bound_and_grows(self, tmp_path):
        cfg = ExperimentConfig("sharpness",
                               {"n": 2, "kind": "mt2", "gamma_mult": 1.1,
                                "j": "64,256,1024", "count": 8000,
                                "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "sharpness")
        rows = read_csv(tmp_path / s["rows_file"])
        assert rows[0] == ["j", "value", "lower_bound", "flag"]
        vals = [float(r[1]) for r in rows[1:]]
        lbs = [float(r[2]) for r in rows[1:]]
        assert all(v >= lb for v, lb in zip(vals, lbs))
        assert all(b > a for a, b in zip(vals, vals[1:]))   # monotone series
        loglog = read_csv(tmp_path / "sharpness_loglog.csv")
        assert loglog[0] == ["log_j", "log_value"]
        assert len(loglog) == 4


class TestPdeCommand:
    def test_summary_and_profile(self, tmp_path):
        cfg = ExperimentConfig("pde", {"n": 2, "alpha": 1.0, "c": 1.0,
                                       "count": 800, "j": "64",
                                       "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "pde")
        assert abs(s["boundary_residual"]) <= 1e-8
        assert s["flux_residual"] <= 1e-6
        assert s["positive"] is True and s["monotone"] is True
        prof = read_csv(tmp_path / s["profile_file"])
        assert prof[0] == ["r", "u", "uprime", "flux"]
        assert float(prof[1][0]) == 0.0
        assert float(prof[1][1]) == pytest.approx(s["center_value"], rel=1e-12)
        assert float(prof[-1][0]) == 1.0 and float(prof[-1][1]) == 0.0

    def test_module_failure_exit_1(self, tmp_path):
        cfg = ExperimentConfig("pde", {"n": 2, "s_max": 1e-2,
                                       "out": str(tmp_path)})
        assert run(cfg) == 1
        err = json.loads((tmp_path / "pde_error.json").read_text())
        assert "bracket" in err["error"]


class TestEigenCommand:
    def test_lambda1(self, tmp_path):
        cfg = ExperimentConfig("eigen", {"n": 2, "count": 500,
                                         "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "eigen")
        assert s["lambda1"] == pytest.approx(5.78319, abs=1e-4)


class TestConditionsCommand:
    def test_defaults_pass_and_c10_fails_f3(self, tmp_path):
        cfg = ExperimentConfig("conditions", {"n": 2, "out": str(tmp_path)})
        assert run(cfg) == 0
        s = read_summary(tmp_path, "conditions")
        assert s["results"]["f3"] and s["results"]["f4"] and s["results"]["f5"]
        out2 = tmp_path / "c10"
        cfg = ExperimentConfig("conditions", {"n": 2, "c": 10.0,
                                              "out": str(out2)})
        assert run(cfg) == 0
        assert read_summary(out2, "conditions")["results"]["f3"] is False


class TestMainEntry:
    def test_argv_round_trip(self, tmp_path):
        assert main(["constants", "--n", "3", "--out", str(tmp_path)]) == 0
        s = read_summary(tmp_path, "constants")
        assert s["n"] == 3

    def test_bad_argv_exit_2(self):
        assert main(["constants", "--n", "oops"]) == 2
        assert main(["nonsense"]) == 2

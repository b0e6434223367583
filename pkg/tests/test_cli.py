import json

import numpy as np
import pytest

from conftest import fixture_path
from qpd.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_example1_report(self, capsys):
        code, out, _ = run(capsys, "analyze", str(fixture_path("example1_lv")))
        assert code == 0
        assert "T2  applicable" in out and "Permanent" in out
        assert "T3  applicable" in out and "GloballyAttractive" in out

    def test_example3_report_with_verification(self, capsys):
        code, out, _ = run(capsys, "analyze",
                           str(fixture_path("example3_qp_rho32")), "--verify")
        assert code == 0
        assert "ChaoticDiamond" in out
        assert "T3  not applicable" in out
        assert "largest Lyapunov estimate" in out
        assert "permanence probe: pass" in out

    def test_output_is_deterministic(self, capsys):
        args = ("analyze", str(fixture_path("example2_predator_prey")),
                "--verify")
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_json_round_trip(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, _ = run(capsys, "analyze", str(fixture_path("example1_lv")),
                         "--verify", "--json", str(out_path))
        assert code == 0
        text = out_path.read_text()
        loaded = json.loads(text)
        assert json.dumps(loaded, indent=2) + "\n" == text
        verdicts = {v["theorem"]: v for v in loaded["theorems"]}
        assert verdicts["T2"]["conclusion"] == "Permanent"
        assert verdicts["T3"]["applicable"] is True
        assert loaded["verify"]["disagreements"] == []

    def test_malformed_json_reports_position(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"name": "broken", "n": 2,\n  "A": [[1, 2], [3, ]]}\n')
        code, _, err = run(capsys, "analyze", str(bad))
        assert code == 1
        assert "line 2" in err

    def test_schema_error(self, capsys, tmp_path):
        doc = json.loads(fixture_path("example1_lv").read_text())
        del doc["A"]
        bad = tmp_path / "incomplete.json"
        bad.write_text(json.dumps(doc))
        code, _, err = run(capsys, "analyze", str(bad))
        assert code == 1
        assert "'A'" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "analyze", str(tmp_path / "nowhere.json"))
        assert code == 1

    def test_singular_exponent_matrix_still_reports(self, capsys, tmp_path):
        doc = {
            "name": "singular exponents",
            "n": 2,
            "A": [[-1.0, 0.0], [0.0, -1.0]],
            "B": [[1.0, 2.0], [2.0, 4.0]],
            "lambda": [0.5, 0.5],
        }
        path = tmp_path / "singular.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "analyze", str(path), "--verify")
        assert code == 0
        assert "canonical LV form: unavailable" in out
        assert "T2  not applicable" in out

    def test_strict_flags_proxy_disagreement(self, capsys, tmp_path):
        # Permanence holds analytically for this competitive system, but
        # its chaotic excursions dip below the proxy floor: an honest
        # analytic/numeric disagreement under --verify --strict.
        doc = {
            "name": "large uniform growth",
            "n": 2,
            "A": [[-1.0, -0.5], [-0.5, -1.0]],
            "B": [[1.0, 0.0], [0.0, 1.0]],
            "lambda": [6.0, 6.0],
        }
        path = tmp_path / "large_growth.json"
        path.write_text(json.dumps(doc))
        code, out, err = run(capsys, "analyze", str(path),
                             "--verify", "--strict")
        assert code == 2
        assert "DISAGREEMENT" in out
        code, out, _ = run(capsys, "analyze", str(path), "--verify")
        assert code == 0  # without --strict the disagreement only reports


class TestSimulate:
    def test_writes_trajectory(self, capsys, tmp_path):
        out_csv = tmp_path / "orbit.csv"
        code, out, _ = run(capsys, "simulate",
                           str(fixture_path("example1_lv")),
                           "--x0", "1,1", "--steps", "500",
                           "--out", str(out_csv))
        assert code == 0
        assert "guard events: none" in out
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "t,x_1,x_2"
        final = np.array([float(v) for v in lines[-1].split(",")[1:]])
        assert np.linalg.norm(final - np.array([1.0 / 3.0, 1.0 / 3.0])) <= 1e-6

    def test_rejects_nonpositive_initial_condition(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate",
                           str(fixture_path("example1_lv")),
                           "--x0", "0,1", "--steps", "10",
                           "--out", str(tmp_path / "x.csv"))
        assert code == 1
        assert "bad initial condition" in err

    def test_rejects_zero_steps(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate",
                           str(fixture_path("example1_lv")),
                           "--x0", "1,1", "--steps", "0",
                           "--out", str(tmp_path / "x.csv"))
        assert code == 1
        assert "--steps" in err

    def test_unparsable_x0(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate",
                           str(fixture_path("example1_lv")),
                           "--x0", "one,two", "--steps", "5",
                           "--out", str(tmp_path / "x.csv"))
        assert code == 1
        assert "--x0" in err


class TestScan:
    def test_summary_and_csv(self, capsys, tmp_path):
        out_csv = tmp_path / "scan.csv"
        code, out, _ = run(capsys, "scan", "--kind", "snapback",
                           "--rho-min", "2.8", "--rho-max", "3.0",
                           "--step", "0.05", "--out", str(out_csv))
        assert code == 0
        summary = json.loads(out.strip().splitlines()[-1])
        assert summary["kind"] == "snapback"
        assert summary["detected"] is True
        assert summary["reference"] == 2.89
        assert 2.8 <= summary["threshold"] <= 3.0
        assert out_csv.read_text().startswith("rho,detected,detail")

    def test_no_detection_is_reported_not_raised(self, capsys, tmp_path):
        code, out, _ = run(capsys, "scan", "--kind", "period3",
                           "--rho-min", "1.0", "--rho-max", "2.0",
                           "--step", "0.25",
                           "--out", str(tmp_path / "scan.csv"))
        assert code == 0
        summary = json.loads(out.strip().splitlines()[-1])
        assert summary["detected"] is False
        assert summary["threshold"] is None

    def test_invalid_range(self, capsys):
        code, _, err = run(capsys, "scan", "--kind", "period3",
                           "--rho-min", "3.0", "--rho-max", "2.0",
                           "--step", "0.1")
        assert code == 1
        assert "rho-min" in err


class TestConjugacy:
    def test_fixture_within_budget(self, capsys):
        code, out, _ = run(capsys, "conjugacy",
                           str(fixture_path("example1_lv")),
                           "--seed", "3", "--trials", "10", "--steps", "50")
        assert code == 0
        assert "all trials within budget" in out

    def test_zero_trials_vacuous_pass(self, capsys):
        code, out, _ = run(capsys, "conjugacy",
                           str(fixture_path("example1_lv")),
                           "--trials", "0")
        assert code == 0
        assert "vacuous" in out

    def test_chaotic_fixture_exceeds_budget_at_long_horizon(self, capsys):
        # positive Lyapunov exponent amplifies roundoff by ~e^(0.1 t), so
        # 400 steps decisively blow the 1e-7/step budget: honest exit 2
        code, out, _ = run(capsys, "conjugacy",
                           str(fixture_path("example3_qp_rho32")),
                           "--seed", "5", "--trials", "2", "--steps", "400")
        assert code == 2
        assert "exceeds budget" in out or "terminated" in out


class TestUsageErrors:
    def test_unknown_command_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_required_flag_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--kind", "period3"])
        assert exc.value.code == 1

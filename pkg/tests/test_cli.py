import json
import subprocess
import sys

import numpy as np
import pytest
from helpers import SX, SZ

from ndprobe.cli import CSV_HEADER, main, sweep_rows
from ndprobe.correlations import correlation_panel
from ndprobe.probing import xx_final_state


def write_matrix(path, m):
    m = np.asarray(m, dtype=complex)
    path.write_text(
        json.dumps({"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()})
    )
    return str(path)


class TestSweep:
    def test_header_and_row_count(self, capsys):
        assert main(["sweep", "--points", "9", "--t-max", "0.5"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 10

    def test_rows_satisfy_invariants(self):
        rows = sweep_rows(0.5, 1.0, np.pi / 2, 33)
        for row in rows:
            assert abs(
                row.discord - (row.mutual_information - row.classical_correlation)
            ) < 1e-9
            if row.mutual_information < 1e-12:
                assert row.classical_ratio == 0.0 and row.discord_ratio == 0.0

    def test_quarter_period_row_is_classical(self):
        rows = sweep_rows(0.5, 1.0, np.pi / 2, 65)
        row = min(rows, key=lambda r: abs(r.gt - np.pi / 4))
        assert row.discord < 1e-6
        assert row.classical_ratio > 1.0 - 1e-6

    def test_geometric_discord_column_profile(self):
        rows = sweep_rows(0.5, 1.0, np.pi / 2, 65)
        by_gt = {round(r.gt, 10): r for r in rows}
        for gt in (0.0, round(np.pi / 4, 10), round(np.pi / 2, 10)):
            assert by_gt[gt].geometric_discord < 1e-12
        # tau = cos(4gt) gives twin peaks at pi/8 and 3pi/8 of equal height
        peak_value = max(r.geometric_discord for r in rows)
        assert abs(by_gt[round(np.pi / 8, 10)].geometric_discord - peak_value) < 1e-12
        assert abs(peak_value - 0.03125) < 1e-10

    def test_x_zero_rows_match_panel(self):
        rows = sweep_rows(0.0, 1.0, 0.8, 5)
        for row in rows:
            panel = correlation_panel(xx_final_state(0.0, 1.0, row.gt))
            assert abs(row.mutual_information - panel.mutual_information) < 1e-6
            assert abs(row.classical_correlation - panel.classical_correlation) < 1e-6
            assert abs(row.discord - panel.discord) < 1e-6

    def test_output_files_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--points", "17", "--out", str(out1)]) == 0
        assert main(["sweep", "--points", "17", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_json_format_matches_csv_values(self, tmp_path):
        out_csv, out_json = tmp_path / "s.csv", tmp_path / "s.json"
        assert main(["sweep", "--points", "5", "--out", str(out_csv)]) == 0
        assert main(["sweep", "--points", "5", "--format", "json", "--out", str(out_json)]) == 0
        rows_json = json.loads(out_json.read_text())
        lines = out_csv.read_text().strip().splitlines()
        assert len(rows_json) == len(lines) - 1
        keys = CSV_HEADER.split(",")
        for line, obj in zip(lines[1:], rows_json):
            for token, key in zip(line.split(","), keys):
                assert abs(float(token) - obj[key]) < 1e-11

    def test_bad_points_is_usage_error(self, capsys):
        assert main(["sweep", "--points", "1"]) == 2

    def test_x_out_of_range_is_usage_error(self, capsys):
        assert main(["sweep", "--x", "1.5"]) == 2

    def test_unwritable_output_fails_cleanly(self, tmp_path, capsys):
        target = tmp_path / "missing" / "dir" / "out.csv"
        assert main(["sweep", "--points", "3", "--out", str(target)]) == 1
        assert "cannot write" in capsys.readouterr().err


class TestValidate:
    def test_valid_coupling_exits_zero(self, tmp_path, capsys):
        h = write_matrix(tmp_path / "h.json", 0.8 * np.kron(SX, SX))
        p = write_matrix(tmp_path / "p.json", np.diag([1.0, 0.0]))
        assert main(["validate", "--hamiltonian", h, "--probe", p]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["structure_ok"] and report["extraction_ok"]
        np.testing.assert_allclose(report["a_part"]["re"], (0.8 * SX).real)

    def test_structure_violation_exits_one(self, tmp_path, capsys):
        h = write_matrix(tmp_path / "h.json", np.kron(SZ, SX))
        p = write_matrix(tmp_path / "p.json", np.diag([1.0, 0.0]))
        assert main(["validate", "--hamiltonian", h, "--probe", p]) == 1
        report = json.loads(capsys.readouterr().out)
        names = [v["name"] for v in report["violations"]]
        assert "T_zx" in names

    def test_malformed_json_exits_two_with_position(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dim": 2, "re": [[1, 0], [0')
        p = write_matrix(tmp_path / "p.json", np.diag([1.0, 0.0]))
        assert main(["validate", "--hamiltonian", str(bad), "--probe", p]) == 2
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_non_hermitian_matrix_exits_two(self, tmp_path, capsys):
        m = np.kron(SX, SX).astype(complex)
        m[0, 3] = 2.0  # break Hermiticity
        h = write_matrix(tmp_path / "h.json", m)
        p = write_matrix(tmp_path / "p.json", np.diag([1.0, 0.0]))
        assert main(["validate", "--hamiltonian", h, "--probe", p]) == 2

    def test_missing_file_exits_two(self, tmp_path, capsys):
        p = write_matrix(tmp_path / "p.json", np.diag([1.0, 0.0]))
        assert main(["validate", "--hamiltonian", str(tmp_path / "nope.json"), "--probe", p]) == 2


class TestEstimate:
    def test_deterministic_and_accurate(self, capsys):
        args = ["estimate", "--x", "0.3", "--t", str(np.pi / 8), "--shots", "100000", "--seed", "7"]
        assert main(args) == 0
        first = capsys.readouterr().out
        payload = json.loads(first)
        assert abs(payload["x_hat"] - 0.3) < 3.0 * payload["std_error"]
        assert main(args) == 0
        assert capsys.readouterr().out == first

    def test_zero_shots_usage_error(self, capsys):
        assert main(["estimate", "--x", "0.3", "--t", "0.3", "--shots", "0", "--seed", "1"]) == 2

    def test_degenerate_time_domain_error(self, capsys):
        args = ["estimate", "--x", "0.3", "--t", str(np.pi / 2), "--shots", "100", "--seed", "1"]
        assert main(args) == 1
        assert "sin(2gt)" in capsys.readouterr().err

    def test_missing_seed_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["estimate", "--x", "0.3", "--t", "0.3", "--shots", "100"])
        assert excinfo.value.code == 2


class TestVerifyTheorems:
    def test_small_run_passes(self, capsys):
        assert main(["verify-theorems", "--trials", "3", "--seed", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["all_pass"]
        assert set(payload["properties"]) == {
            "non_demolition",
            "probe_independence",
            "zero_negativity",
            "one_sided_discord",
            "delta_scaling",
            "qutrit_probe",
        }
        for result in payload["properties"].values():
            assert result["fail"] == 0

    def test_fault_injection_fails_non_demolition(self, capsys):
        assert main(["verify-theorems", "--trials", "3", "--seed", "1", "--inject-fault"]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["properties"]["non_demolition"]["fail"] == 3
        assert payload["failures"]
        assert payload["failures"][0]["property"] == "non_demolition"

    def test_replay_reproduces_failure_bit_exactly(self, tmp_path, capsys):
        assert main(["verify-theorems", "--trials", "2", "--seed", "5", "--inject-fault"]) == 1
        payload = json.loads(capsys.readouterr().out)
        record = payload["failures"][0]
        record_path = tmp_path / "record.json"
        record_path.write_text(json.dumps(record))
        assert main(["verify-theorems", "--replay", str(record_path)]) == 1
        replayed = json.loads(capsys.readouterr().out)
        assert replayed["reproduced_failure"]
        assert json.dumps(replayed["details"]) == json.dumps(record["details"])

    def test_replay_accepts_full_summary(self, tmp_path, capsys):
        assert main(["verify-theorems", "--trials", "1", "--seed", "5", "--inject-fault"]) == 1
        summary_path = tmp_path / "summary.json"
        summary_path.write_text(capsys.readouterr().out)
        assert main(["verify-theorems", "--replay", str(summary_path)]) == 1

    def test_replay_of_garbage_is_parse_error(self, tmp_path, capsys):
        garbage = tmp_path / "garbage.json"
        garbage.write_text("{not json")
        assert main(["verify-theorems", "--replay", str(garbage)]) == 2

    def test_zero_trials_usage_error(self, capsys):
        assert main(["verify-theorems", "--trials", "0"]) == 2


class TestConsoleEntry:
    def test_python_dash_m_invocation(self):
        result = subprocess.run(
            [sys.executable, "-m", "ndprobe", "sweep", "--points", "3", "--t-max", "0.2"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert result.stdout.splitlines()[0] == CSV_HEADER

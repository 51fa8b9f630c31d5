import csv
import json
import math
from pathlib import Path

import pytest

import conetrace.cli as cli
from conetrace.cli import EXIT_OK, EXIT_QUADRATURE, EXIT_TOLERANCE, main
from conetrace.numerics import QuadratureError

DATA = Path(__file__).parent / "data"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run_to_file(tmp_path, argv, name="out.csv"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, read_csv(out), out


class TestParsevalCheck:
    def test_single_point_single_row(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["parseval-check", "--grid-q", "5",
                                               "--grid-t", "1"])
        assert code == EXIT_OK
        assert len(rows) == 1
        assert float(rows[0]["rel_diff"]) < 1e-8

    def test_trivial_order_rows_are_zero(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["parseval-check", "--grid-q", "1",
                                               "--grid-t", "0.5,1"])
        assert code == EXIT_OK
        for row in rows:
            assert float(row["halfline_rep"]) == 0.0
            assert float(row["fullline_rep"]) == 0.0

    def test_default_grid_all_within_tolerance(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["parseval-check",
                                               "--grid-q", "3,4,5",
                                               "--grid-t", "0.1,1,10"])
        assert code == EXIT_OK
        assert all(float(r["rel_diff"]) < 1e-8 for r in rows)

    def test_violation_exit_code(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["parseval-check", "--grid-q", "3",
                                               "--grid-t", "1",
                                               "--tolerance", "1e-30"])
        assert code == EXIT_TOLERANCE
        assert rows[0]["status"] == "violation"

    def test_quadrature_failure_exit_code(self, tmp_path, monkeypatch):
        def boom(*a, **k):
            raise QuadratureError("forced", 0.0, 1.0)
        monkeypatch.setattr(cli, "elliptic_cone_trace", boom)
        code, rows, _ = run_to_file(tmp_path, ["parseval-check", "--grid-q", "3",
                                               "--grid-t", "1"])
        assert code == EXIT_QUADRATURE
        assert rows[0]["status"] == "quadrature_failure"
        assert rows[0]["halfline_rep"] == ""


class TestBoundCheck:
    def test_grid_passes(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["bound-check", "--grid-q", "3,10",
                                               "--grid-delta", "0.5,2",
                                               "--grid-t", "1", "--grid-s", "0,1"])
        assert code == EXIT_OK
        assert all(float(r["ratio"]) <= 1.0 for r in rows)

    def test_large_delta_trace_vanishes(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, ["bound-check", "--grid-q", "3",
                                               "--grid-delta", "1000",
                                               "--grid-t", "1", "--grid-s", "0"])
        assert code == EXIT_OK
        assert abs(float(rows[0]["trace_re"])) < 1e-8

    def test_real_time_rows_real(self, tmp_path):
        _, rows, _ = run_to_file(tmp_path, ["bound-check", "--grid-q", "5",
                                            "--grid-delta", "0.5", "--grid-t", "1"])
        assert float(rows[0]["trace_im"]) == 0.0


class TestDegenerationSweep:
    def test_single_point(self, tmp_path):
        code, rows, _ = run_to_file(tmp_path, [
            "degeneration-sweep", "--grid-n", "3", "--grid-t", "1",
            "--max-word-len", "8", "--cache-dir", str(tmp_path / "cache")])
        assert code == EXIT_OK
        assert len(rows) == 1
        assert float(rows[0]["reduced_re"]) > 0
        assert (tmp_path / "cache").exists()

    def test_cache_reused(self, tmp_path):
        argv = ["degeneration-sweep", "--grid-n", "3", "--grid-t", "1",
                "--max-word-len", "8", "--cache-dir", str(tmp_path / "cache")]
        _, rows1, _ = run_to_file(tmp_path, argv, "a.csv")
        _, rows2, _ = run_to_file(tmp_path, argv, "b.csv")
        assert rows1 == rows2


class TestStfEval:
    @pytest.fixture
    def fixture_path(self, tmp_path):
        doc = {"genus": 1, "cusps": 0, "cones": [3, 4], "degenerating": [],
               "spectrum": [[2.0, 2], [2.5, 2]], "completeness_radius": 5.0}
        path = tmp_path / "fix.json"
        path.write_text(json.dumps(doc))
        return path

    def test_geometric_matches_standard(self, tmp_path, fixture_path):
        code, rows, _ = run_to_file(tmp_path, ["stf-eval", "--fixture",
                                               str(fixture_path), "--grid-t", "0.5,1"])
        assert code == EXIT_OK
        for row in rows:
            assert float(row["rel_diff"]) < 1e-8
            assert row["spectral_side"] == ""

    def test_eigenvalue_file(self, tmp_path, fixture_path):
        eig = tmp_path / "eig.txt"
        eig.write_text("0.0\n0.25\n1.25\n")
        code, rows, _ = run_to_file(tmp_path, ["stf-eval", "--fixture",
                                               str(fixture_path), "--grid-t", "1",
                                               "--eigenvalues", str(eig)])
        assert code == EXIT_OK
        expected = (math.exp(0.25) + 1.0 + math.exp(-1.0)) * math.exp(-0.25)
        assert abs(float(rows[0]["spectral_side"]) - expected) < 1e-12

    def test_bare_genus2_fixture_identity_only(self, tmp_path):
        doc = {"genus": 2, "cusps": 0, "cones": [], "degenerating": [],
               "spectrum": [], "completeness_radius": 0.0}
        path = tmp_path / "g2.json"
        path.write_text(json.dumps(doc))
        code, rows, _ = run_to_file(tmp_path, ["stf-eval", "--fixture", str(path),
                                               "--grid-t", "1"])
        assert code == EXIT_OK
        from conetrace.plane import hk_plane
        want = 4 * math.pi * hk_plane(1.0, 0.0).real
        assert abs(float(rows[0]["stf_geometric"]) - want) < 1e-10


class TestOutputPlumbing:
    def test_sidecar_written(self, tmp_path):
        _, _, out = run_to_file(tmp_path, ["parseval-check", "--grid-q", "3",
                                           "--grid-t", "1"])
        sidecar = json.loads(Path(str(out) + ".json").read_text())
        assert sidecar["schema_version"] == cli.SCHEMA_VERSION
        assert sidecar["command"] == "parseval-check"
        assert "columns" in sidecar and "config" in sidecar

    def test_threads_do_not_change_output(self, tmp_path):
        argv = ["bound-check", "--grid-q", "3,5,7", "--grid-delta", "0.5,1",
                "--grid-t", "1", "--grid-s", "0,1"]
        _, rows1, _ = run_to_file(tmp_path, argv + ["--threads", "1"], "t1.csv")
        _, rows2, _ = run_to_file(tmp_path, argv + ["--threads", "4"], "t4.csv")
        assert rows1 == rows2

    def test_golden_parseval(self, tmp_path):
        _, rows, _ = run_to_file(tmp_path, ["parseval-check", "--grid-q", "1,3,5",
                                            "--grid-t", "0.5,1"])
        golden = read_csv(DATA / "golden_parseval.csv")
        assert len(rows) == len(golden)
        for got, want in zip(rows, golden):
            assert got["status"] == want["status"]
            for col in ("halfline_rep", "fullline_rep"):
                a, b = float(got[col]), float(want[col])
                assert abs(a - b) <= 1e-9 * max(abs(b), 1.0)

    def test_golden_bound(self, tmp_path):
        _, rows, _ = run_to_file(tmp_path, ["bound-check", "--grid-q", "3,10",
                                            "--grid-delta", "1", "--grid-t", "1",
                                            "--grid-s", "0,2"])
        golden = read_csv(DATA / "golden_bound.csv")
        assert len(rows) == len(golden)
        for got, want in zip(rows, golden):
            for col in ("trace_re", "trace_im", "bound", "ratio"):
                a, b = float(got[col]), float(want[col])
                assert abs(a - b) <= 1e-9 * max(abs(b), 1.0)

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0

    def test_nonpositive_time_grid_rejected_at_parse(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["parseval-check", "--grid-q", "3", "--grid-t", "0,-1"])
        assert exc.value.code != 0

"""End-to-end tests of the command-line interface."""

import json
import math

import pytest

from nok.cli import main

HN_SEMISTABLE = {"hn": [{"rank": 3, "slope": "2"}]}
HN_SPLIT = {
    "hn": [{"rank": 1, "slope": "0"}, {"rank": 1, "slope": "1"}],
    "divisor": {"x": "1", "y": "0"},
    "curve": {"c1": "1", "c2": "0"},
    "omega": [2, 1],
}


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


class TestBodyCommands:
    def test_body_div(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        out = tmp_path / "b.json"
        code = main(["body-div", "--hn", hn, "--divisor", "1,-1", "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["meta"]["volume"] == "3/1"
        assert data["meta"]["classification"] == "ample"
        assert data["meta"]["sigma"] == ["2/1", "2/1", "2/1"]
        assert len(data["body"]["vertices"]) == 6

    def test_body_div_from_file_fields(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SPLIT)
        out = tmp_path / "b.json"
        code = main(["body-div", "--hn", hn, "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["meta"]["t"] == "0/1"

    def test_body_div_off(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        out = tmp_path / "b.off"
        code = main(
            ["body-div", "--hn", hn, "--divisor", "1,-1", "--format", "off", "--out", str(out)]
        )
        assert code == 0
        assert out.read_text().startswith("OFF\n")

    def test_body_div_csv_slices(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        out = tmp_path / "slices.csv"
        code = main(
            ["body-div", "--hn", hn, "--divisor", "1,-1", "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "slice_index,nu1_lo,nu1_hi,volume"
        assert len(lines) == 4  # r - 1 slices plus the final slice

    def test_body_curve(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        out = tmp_path / "c.json"
        code = main(["body-curve", "--hn", hn, "--curve", "1,-3", "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["meta"]["M"] == "3/2"
        assert data["meta"]["u_star"] == "3/2"
        assert data["meta"]["volume"] == "3/2"

    def test_not_effective_is_exit_2(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        code = main(["body-div", "--hn", hn, "--divisor", "1,-5"])
        captured = capsys.readouterr()
        assert code == 2
        err = json.loads(captured.err)
        assert err["error"] == "NotEffective"

    def test_parse_error_is_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["body-div", "--hn", str(bad), "--divisor", "1,0"])
        assert code == 1
        assert "error" in json.loads(capsys.readouterr().err)

    def test_missing_file_is_exit_1(self, capsys):
        code = main(["body-div", "--hn", "/nonexistent.json", "--divisor", "1,0"])
        assert code == 1


class TestSolverCommands:
    def test_minkowski_solve_cube_doubled(self, tmp_path):
        measure = {
            "dim": 3,
            "atoms": [
                {"dir": [1.0, 0.0, 0.0], "mass": 2.0},
                {"dir": [-1.0, 0.0, 0.0], "mass": 2.0},
                {"dir": [0.0, 1.0, 0.0], "mass": 2.0},
                {"dir": [0.0, -1.0, 0.0], "mass": 2.0},
                {"dir": [0.0, 0.0, 1.0], "mass": 2.0},
                {"dir": [0.0, 0.0, -1.0], "mass": 2.0},
            ],
        }
        mfile = write(tmp_path / "m.json", measure)
        out = tmp_path / "body.json"
        code = main(["minkowski-solve", "--measure", mfile, "--tol", "1e-9", "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["meta"]["residual"] <= 1e-9
        verts = [[float(c) for c in v] for v in data["body"]["vertices"]]
        side = max(v[0] for v in verts)
        assert side == pytest.approx(math.sqrt(2), abs=1e-8)

    def test_blaschke_bodies(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        p1 = tmp_path / "p1.json"
        p2 = tmp_path / "p2.json"
        main(["body-div", "--hn", hn, "--divisor", "1,0", "--out", str(p1)])
        main(["body-div", "--hn", hn, "--divisor", "1,-1", "--out", str(p2)])
        # strip down to the polytope schema
        for p in (p1, p2):
            body = json.loads(p.read_text())["body"]
            p.write_text(json.dumps(body))
        out = tmp_path / "sum.json"
        code = main(
            ["blaschke", "--first", str(p1), "--second", str(p2), "--out", str(out)]
        )
        assert code == 0
        closed = tmp_path / "closed.json"
        code = main(
            ["blaschke-closed", "--hn", hn, "--d1", "1,0", "--d2", "1,-1", "--out", str(closed)]
        )
        assert code == 0
        meta = json.loads(closed.read_text())["meta"]
        assert meta["t3"] == "1/2"

    def test_not_nef_closed_form(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SPLIT)
        code = main(["blaschke-closed", "--hn", hn, "--d1", "1,-1", "--d2", "1,0"])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "NotNef"


class TestQueries:
    def test_cones(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SPLIT)
        code = main(["cones", "--hn", hn])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["eff_divisors"][1] == ["1/1", "-1/1"]
        assert data["nef_divisors"][1] == ["1/1", "0/1"]

    def test_classify(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        code = main(["classify", "--hn", hn, "--divisor", "1,-1", "--curve", "1,-3"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["divisor"] == "ample"
        assert data["curve"] == "complete-intersection"

    def test_dual_volume(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        code = main(["dual-volume", "--hn", hn, "--curve", "1,-3"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["M"] == "3/2"
        assert data["u_star"] == "3/2"

    def test_rank_too_small(self, tmp_path, capsys):
        hn = write(tmp_path / "hn.json", {"hn": [{"rank": 1, "slope": "0"}]})
        code = main(["cones", "--hn", hn])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "RankTooSmall"


class TestToricCommands:
    def test_toric_body(self, tmp_path):
        data = {"rays": [[1, 0], [0, 1], [-1, -1]], "intersections": ["1", "1", "1"]}
        inp = write(tmp_path / "t.json", data)
        out = tmp_path / "body.json"
        code = main(["toric-body", "--input", inp, "--out", str(out)])
        assert code == 0
        body = json.loads(out.read_text())
        assert body["meta"]["movable"] is True

    def test_toric_blaschke(self, tmp_path, capsys):
        data = {
            "rays": [[1, 0], [0, 1], [-1, -1]],
            "alpha": ["1", "1", "1"],
            "beta": ["2", "2", "2"],
        }
        inp = write(tmp_path / "t.json", data)
        code = main(["toric-blaschke", "--input", inp, "--tol", "1e-6"])
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert out["ok"] is True

    def test_toric_not_movable(self, tmp_path, capsys):
        data = {"rays": [[1, 0], [0, 1], [-1, -1]], "intersections": ["1", "0", "0"]}
        inp = write(tmp_path / "t.json", data)
        code = main(["toric-body", "--input", inp])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "NotMovable"


class TestVerifyCommand:
    def test_small_suite_passes(self, capsys):
        code = main(["verify", "volume-ring", "--samples", "5", "--seed", "3"])
        assert code == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "suite volume-ring: PASS" in out

    def test_unknown_suite(self, capsys):
        code = main(["verify", "nope"])
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "UnknownSuite"

    def test_deterministic_output(self, tmp_path):
        hn = write(tmp_path / "hn.json", HN_SEMISTABLE)
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            main(["body-curve", "--hn", hn, "--curve", "1,-3", "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_deterministic_verify(self, capsys):
        main(["verify", "volume-ring", "--samples", "4", "--seed", "9"])
        first = capsys.readouterr().out
        main(["verify", "volume-ring", "--samples", "4", "--seed", "9"])
        second = capsys.readouterr().out
        assert first == second

"""End-to-end tests of the command line."""

import json

from shrinkreg import __version__
from shrinkreg.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, run_cli


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestUsage:
    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "simulate", "--bogus")
        assert code == EXIT_USAGE
        assert "usage:" in err

    def test_missing_subcommand(self, capsys):
        assert run(capsys)[0] == EXIT_USAGE

    def test_help(self, capsys):
        code, out, _ = run(capsys, "--help")
        assert code == EXIT_OK and "risk-curve" in out

    def test_json_usage_error(self, capsys):
        code, _, err = run(capsys, "cv", "--data", "prostate", "--format", "json")
        assert code == EXIT_USAGE
        assert json.loads(err)["error"]["type"] == "usage"

    def test_invalid_grid(self, capsys):
        assert run(capsys, "risk-curve", "--delta-grid", "1,x")[0] == EXIT_USAGE


class TestDataErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "fit", "--data", str(tmp_path / "none.csv"),
                           "--response", "y", "--full", "a,b", "--sub", "a")
        assert code == EXIT_DATA

    def test_non_numeric_json(self, capsys, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,a,b\n1,2,3\n2,x,4\n3,1,1\n4,2,2\n")
        code, _, err = run(capsys, "fit", "--data", str(path), "--response", "y",
                           "--full", "a,b", "--sub", "a", "--format", "json")
        assert code == EXIT_DATA
        payload = json.loads(err)["error"]
        assert payload["type"] == "data" and "row 2" in payload["message"]


class TestCommands:
    def test_fit_json(self, capsys):
        code, out, _ = run(capsys, "fit", "--data", "prostate", "--sub", "lcavol,lweight,svi",
                           "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert set(doc) == {"command", "config", "results", "seed", "version"}
        assert doc["version"] == __version__
        kinds = [r["estimator"] for r in doc["results"]]
        assert kinds == ["UR", "R", "S", "S+", "PT"]
        r = doc["results"][1]["coefficients"]
        assert r["age"] == 0.0 and r["lcavol"] != 0.0

    def test_simulate_table(self, capsys):
        code, out, _ = run(capsys, "simulate", "--reps", "20", "--seed", "42",
                           "--delta-grid", "0,1")
        assert code == EXIT_OK
        assert out.splitlines()[0].split() == ["delta", "R", "S+", "PT"]

    def test_cv_json(self, capsys):
        code, out, _ = run(capsys, "cv", "--data", "prostate", "--sub", "lcavol,lweight,svi",
                           "--k", "5,10", "--reps", "3", "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["command"] == "cv" and doc["seed"] == 0
        labels = {(r["estimator"], r["k"]) for r in doc["results"]}
        assert ("UR", 5) in labels and ("PT", 10) in labels and ("S+", 10) in labels
        assert {"mean", "se"} <= set(doc["results"][0]["corrected"])

    def test_cv_labelled_subs(self, capsys):
        code, out, _ = run(capsys, "cv", "--data", "prostate", "--sub", "BIC=lcavol,lweight,svi",
                           "--sub", "BSS=lcavol,lweight", "--reps", "2", "--format", "csv")
        assert code == EXIT_OK
        names = [line.split(",")[0] for line in out.splitlines()[1:]]
        assert names == ["UR", "R(BIC)", "R(BSS)", "S+(BIC)", "S+(BSS)", "PT(BIC)", "PT(BSS)"]

    def test_risk_curve_out_file(self, capsys, tmp_path):
        dest = tmp_path / "curve.csv"
        code, out, _ = run(capsys, "risk-curve", "--p1", "4", "--p2", "6",
                           "--delta-grid", "0,10", "--format", "csv", "--out", str(dest))
        assert code == EXIT_OK and out == ""
        assert dest.read_text().splitlines()[0] == "noncentrality,R,S,S+,PT"

    def test_simulate_seed_reproducible(self, capsys):
        argv = ("simulate", "--reps", "10", "--delta-grid", "0,0.5", "--format", "json", "--seed", "7")
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        assert a == b

import csv
import io
import json
import subprocess
import sys

import pytest

from mapwalk.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--nmax", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "g=0", "g=1", "g=2"]
    assert rows[-1] == ["4", "14", "70", "21"]
    assert len(rows) == 5


def test_table_json_with_zero_row(capsys):
    code, out, _ = run(capsys, "table", "--nmax", "3", "--include-zero")
    data = json.loads(out)
    assert code == 0 and data["rows"][0] == {"n": 0, "values": {"0": "1"}}
    assert data["validated"]


def test_triangulation_table(capsys):
    code, out, _ = run(capsys, "table", "--kind", "triangulation", "--nmax", "3")
    rows = json.loads(out)["rows"]
    assert rows[1]["values"] == {"0": "32", "1": "28"}


def test_asymptotic(capsys):
    code, out, _ = run(capsys, "asymptotic", "--theta", "0.125")
    data = json.loads(out)
    assert code == 0
    assert data["lambda"] == pytest.approx(0.163367586235, rel=1e-10)


def test_ratio_and_domain_error(capsys):
    code, out, _ = run(capsys, "ratio", "--n", "1000", "--g", "0")
    assert code == 0
    assert json.loads(out)["Q"] == pytest.approx(1 - 9 / 8000, abs=1e-5)
    code, out, err = run(capsys, "ratio", "--n", "100", "--g", "80")
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "DomainError"


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        dispatch(["ratio", "--n", "0", "--g", "1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        dispatch(["fit", "--ray", "2/3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        dispatch(["fit", "--ray", "1/3", "--format", "csv"])
    assert exc.value.code == 2


def test_check_conditions(capsys):
    code, out, _ = run(capsys, "check-conditions", "--regime", "large", "--nmax", "100")
    data = json.loads(out)
    assert code == 0 and data["condition_1"]["non_increasing"]


def test_walk_sim_reproducible(capsys):
    args = ("walk-sim", "--regime", "large", "--start", "100,25", "--runs", "200", "--seed", "1")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    assert json.loads(first)["runs"] == 200


def test_fit(capsys):
    code, out, _ = run(capsys, "fit", "--ray", "1/3", "--nmax", "300")
    data = json.loads(out)
    assert code == 0
    assert data["growth_mu"] == pytest.approx(data["mu_theory"], rel=1e-7)


def test_mid_regime(capsys):
    code, out, _ = run(capsys, "mid-regime", "--n", "200", "--g", "90", "--c", "2")
    data = json.loads(out)
    assert code == 0 and "ratio" in data


def test_triangulation_conjecture(capsys):
    code, out, _ = run(capsys, "triangulation", "--ray", "1/4", "--nmax", "40", "--conjecture")
    assert code == 0 and json.loads(out)["points"][0]["exact"] == "14912"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--nmax", "2", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[-1] == "2,2,1"


def test_verify_all_subset_is_byte_identical(capsys):
    _, first, err = run(capsys, "verify-all", "--only", "1,2")
    _, second, _ = run(capsys, "verify-all", "--only", "1,2")
    assert first == second
    assert "criterion  1 PASS" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mapwalk", "table", "--nmax", "1", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[-1] == "1,1"
    proc = subprocess.run([sys.executable, "-m", "mapwalk", "nosuch"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_huge_counts_are_serialised(capsys):
    # E(2000, 992) has more than 4300 decimal digits
    code, out, _ = run(capsys, "mid-regime", "--n", "2000", "--g", "992", "--c", "2")
    data = json.loads(out)
    assert code == 0 and len(data["exact"]) > 4300
    assert data["ratio"] == pytest.approx(1.022, abs=1e-3)


def test_ratio_triangulation_uses_triangulation_counts(capsys):
    code, out, _ = run(capsys, "ratio", "--n", "100", "--g", "25", "--regime", "tri")
    assert code == 0 and 0.9 < json.loads(out)["Q"] < 1

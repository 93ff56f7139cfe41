import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circhad.cli import COMMANDS, SCHEMA_VERSION, parse_angle, parse_angles, parse_range, run


def run_json(args, capsys):
    code = run(args)
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip().startswith("{") else out)


def test_angle_forms():
    assert parse_angle("1/2pi") == pytest.approx(math.pi / 2)
    assert parse_angle("-2/3pi") == pytest.approx(-2 * math.pi / 3)
    assert parse_angle("pi") == pytest.approx(math.pi)
    assert parse_angle("pi/4") == pytest.approx(math.pi / 4)
    assert parse_angle("-pi") == pytest.approx(-math.pi)
    assert parse_angle("0.25") == 0.25
    for bad in ("x", "1/0pi2", "inf", ""):
        with pytest.raises(ValueError):
            parse_angle(bad)


@given(st.integers(-12, 12), st.integers(1, 12))
def test_rational_pi_round_trip(num, den):
    assert parse_angle(f"{num}/{den}pi") == pytest.approx(num / den * math.pi)


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=8))
def test_radian_lists(vals):
    assert parse_angles(",".join(repr(v) for v in vals)) == vals


def test_ranges():
    assert parse_range("2..9") == list(range(2, 10))
    assert parse_range("3-5") == [3, 4, 5]
    assert parse_range("4") == [4]
    assert parse_range("2,3,7") == [2, 3, 7]
    with pytest.raises(ValueError):
        parse_range("9..2")


def test_phi_eval_all_ones(capsys):
    code, doc = run_json(["phi-eval", "--angles", "0,0,0,0"], capsys)
    assert code == 0
    assert doc["result"]["phi"] == 64.0
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["config"]["command"] == "phi-eval"
    assert doc["config"]["options"]["angles"] == "0,0,0,0"


def test_phi_eval_pi_forms(capsys):
    code, doc = run_json(["phi-eval", "--angles", "pi,0,0,0"], capsys)
    assert code == 0
    assert doc["result"]["phi"] == pytest.approx(16.0)
    assert doc["result"]["hadamard"] is True


def test_phi_eval_file(tmp_path, capsys):
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"n": 2, "angles": [0, "1/2pi"]}))
    code, doc = run_json(["phi-eval", "--angles-file", str(f)], capsys)
    assert code == 0 and doc["result"]["phi"] == pytest.approx(4.0)


@pytest.mark.parametrize("content", ["not json", "{\"angles\": []}", "[1, \"zz\"]", "{\"x\": 1}"])
def test_malformed_vector_file(tmp_path, content, capsys):
    f = tmp_path / "bad.json"
    f.write_text(content)
    assert run(["phi-eval", "--angles-file", str(f)]) == 1


def test_invalid_inputs(capsys):
    assert run(["phi-eval", "--angles", "0,abc"]) == 1
    assert run(["phi-eval"]) == 1
    assert run(["minimize", "--n", "6", "--kind", "half_symmetric_ac"]) == 1
    with pytest.raises(SystemExit) as exc:
        run(["no-such-command"])
    assert exc.value.code == 1


def test_budget_exit_code(capsys):
    assert run(["butson-enumerate", "--n", "9", "--l", "9", "--budget", "100"]) == 2
    assert "inconclusive" in capsys.readouterr().err


def test_negative_answer_is_success(capsys):
    code, doc = run_json(["butson-enumerate", "--n", "8", "--l", "2"], capsys)
    assert code == 0 and doc["result"]["exists"] is False


def test_minimize_symmetric(capsys):
    code, doc = run_json(["minimize", "--n", "8", "--symmetric", "--seed", "1", "--starts", "32"], capsys)
    assert code == 0
    assert doc["result"]["best_value"] == pytest.approx(256 / 3, abs=1e-6)
    assert doc["config"]["seed"] == 1


def test_obstruction_table_csv(capsys):
    assert run(["obstruction-table", "--n", "2..4", "--l", "2..4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# ")
    assert json.loads(lines[0][2:])["config"]["command"] == "obstruction-table"
    assert lines[1] == "N,l,status"
    assert lines[2:] == ["2,2,turyn", "2,3,lam_leung", "2,4,cross",
                         "3,2,lam_leung", "3,3,cross", "3,4,lam_leung",
                         "4,2,cross", "4,3,lam_leung", "4,4,cross"]


def test_gap_scan_csv_header(capsys):
    assert run(["gap-scan", "--n-max", "4", "--starts", "8"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "N,min_phi,gap,converged_starts"


def test_moments_c_table_csv(capsys):
    assert run(["moments", "--method", "c-table", "--p", "2", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == ["p,k,C", "1,1,1", "2,1,1", "2,2,2"]


@pytest.mark.parametrize("method,extra,value", [
    ("closed_form", [], 6), ("brute_force", [], 6), ("lattice", ["--balanced"], 6), ("half", [], 2),
])
def test_moments_exact(method, extra, value, capsys):
    code, doc = run_json(["moments", "--n", "2", "--p", "1", "--method", method, *extra], capsys)
    assert code == 0 and doc["result"]["value"] == value


def test_verify_fixtures(capsys):
    code, doc = run_json(["verify-fixtures"], capsys)
    assert code == 0 and doc["result"]["all_pass"]


def test_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["phi-eval", "--angles", "0,0", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["phi"] == 8.0
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("cmd", sorted(COMMANDS))
def test_selftest(cmd, capsys):
    assert run([cmd, "--selftest"]) == 0
    out = capsys.readouterr().out
    assert out and all(line.startswith("PASS") for line in out.splitlines())


def _cli(args):
    return subprocess.run([sys.executable, "-m", "circhad", *args], capture_output=True, check=True).stdout


@pytest.mark.parametrize("args", [
    ["minimize", "--n", "6", "--seed", "5", "--starts", "16"],
    ["moments", "--n", "3", "--p", "2", "--method", "monte_carlo", "--samples", "5000", "--seed", "9"],
    ["critical-points", "--n", "3", "--starts", "32", "--seed", "2", "--format", "csv"],
])
def test_byte_identical_reruns(args):
    assert _cli(args) == _cli(args)

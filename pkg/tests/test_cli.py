import json
import math
import subprocess
import sys

import pytest

from ptwaveguide.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_closed_form(capsys):
    code, out, _ = run_cli(["eval", "--gamma", "0", "--ell", "1",
                            "--k", "1+0i"], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "k_re,k_im,f_re,f_im,df_re,df_im,log_scale"
    vals = [float(x) for x in row.split(",")]
    ref = -4.0 * complex(math.cos(2.0), math.sin(2.0))
    assert vals[2] == pytest.approx(ref.real, abs=1e-12)
    assert vals[3] == pytest.approx(ref.imag, abs=1e-12)


def test_zeros_window(capsys):
    code, out, _ = run_cli(["zeros", "--gamma", "2.071", "--ell", "0",
                            "--window", "0,2,-0.5,0.5"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("k_re,k_im,class")
    ks = [(float(l.split(",")[0]), l.split(",")[2]) for l in lines[1:]]
    near = [c for re, c in ks if abs(re - 1.065) < 5e-3]
    assert near  # the threshold-adjacent zero is found


def test_gap_values(capsys):
    code, out, _ = run_cli(["gap"], capsys)
    assert code == 0
    row = out.strip().splitlines()[1].split(",")
    assert float(row[2]) == pytest.approx(4.808438, abs=1e-5)
    assert float(row[3]) == pytest.approx(0.611772, abs=1e-5)
    assert float(row[4]) == pytest.approx(4.935, abs=1e-3)
    assert float(row[5]) == pytest.approx(11.561, abs=1e-3)


def test_design_json_contains_adjacent_solution(capsys):
    code, out, _ = run_cli(["design", "--k", "1.065", "--format", "json"],
                           capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["range_exhausted"] is False
    cols = payload["columns"]
    i_ell, i_gamma = cols.index("ell"), cols.index("gamma")
    assert any(row[i_ell] == 0.0 and abs(row[i_gamma] - 2.0717) < 5e-3
               for row in payload["rows"])


def test_ladder_n_flag(capsys):
    code, out, _ = run_cli(["ladder", "--gamma", "40", "--ell", "100",
                            "--n", "3", "--format", "json"], capsys)
    assert code == 0
    payload = json.loads(out)
    (row,) = payload["rows"]
    assert row[0] == 3
    assert row[1] == pytest.approx(3 * math.pi / 200, abs=1e-3)
    assert row[4] is True


def test_determinism(capsys):
    a = run_cli(["scan", "--kmax", "2", "--dk", "0.5"], capsys)
    b = run_cli(["scan", "--kmax", "2", "--dk", "0.5"], capsys)
    assert a == b
    assert a[0] == 0


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, out, _ = run_cli(["eval", "--gamma", "1", "--ell", "1",
                            "--k", "2+0i", "--out", str(path)], capsys)
    assert code == 0
    assert out == ""
    assert path.read_text().startswith("k_re,")


def test_usage_error_exit_2():
    proc = subprocess.run(
        [sys.executable, "-m", "ptwaveguide.cli", "nonsense"],
        capture_output=True, text=True)
    assert proc.returncode == 2


def test_numeric_error_exit_3(capsys):
    code, out, err = run_cli(["zeros", "--gamma", "-1", "--ell", "0",
                              "--window", "0,1,0,1"], capsys)
    assert code == 3
    record = json.loads(err)
    assert record["command"] == "zeros"
    assert "gamma" in record["error"]


def test_trace_emits_events(capsys):
    code, out, _ = run_cli(["trace", "--gamma", "3", "--ell", "0.05",
                            "--k", "2.675+1.238i", "--drive", "ell",
                            "--range", "0.05,6", "--format", "json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["events"]
    assert payload["events"][0][1] == "im-down"


def test_threshold_csv_schema(capsys):
    code, out, _ = run_cli(["threshold"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "ell,gamma,re_k,im_k,kind,seed_id,flags"
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(2.0717, abs=1e-3)
    assert first[4] == "ThresholdCurve"

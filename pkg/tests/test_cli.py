import json
import subprocess
import sys

import pytest

from stabletrace.cli import main


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out.strip().splitlines(), out.err


def test_hc1_summary(capsys):
    code, lines, _ = run(["hc1-check", "--type", "A2"], capsys)
    assert code == 0 and lines[-1] == "OK residual=0"


def test_theta_summary(capsys):
    code, lines, _ = run(["theta", "--p", "5", "--b", "1", "--N", "4", "--s", "1"], capsys)
    assert code == 0 and lines[-1] == "4/5"


def test_usage_errors_name_the_precondition(capsys):
    code, _, err = run(["theta", "--p", "5", "--b", "2", "--N", "4"], capsys)
    assert code == 2 and "b^2 - 4" in err
    code, _, err = run(["theta", "--p", "9", "--b", "0"], capsys)
    assert code == 2 and "odd prime" in err
    code, _, _ = run(["no-such-command"], capsys)
    assert code == 2
    code, _, err = run(["dominant-product", "--pmax", "5000"], capsys)
    assert code == 2 and "pmax" in err


def test_json_and_csv_outputs(tmp_path, capsys):
    j = tmp_path / "out.json"
    assert run(["theta-hat-zero", "--primes", "3,5", "--s", "1,2", "--out", str(j)], capsys)[0] == 0
    recs = json.loads(j.read_text())
    assert [r["p"] for r in recs] == [3, 3, 5, 5] and recs[0]["value"] == "8/9"
    c = tmp_path / "out.csv"
    assert run(["ffl-serie", "--q", "3", "--dmax", "3", "--out", str(c)], capsys)[0] == 0
    assert c.read_text().splitlines()[0] == "q,modulus,character,d,divisor_sum,euler_coeff,residual"


def test_worker_count_does_not_change_output(tmp_path, capsys):
    outs = []
    for w in ("1", "3"):
        path = tmp_path / f"w{w}.json"
        run(["transversal-lemma", "--primes", "3,5,7,11", "--N", "3", "--workers", w, "--out", str(path)], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_repeat_runs_are_byte_identical(tmp_path, capsys):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        run(["getz-decompose", "--samples", "50", "--seed", "4", "--out", str(path)], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# dominant product at two cutoffs\npmax = 13,97\ns = 1\n")
    code, lines, _ = run(["dominant-product", "--config", str(cfg)], capsys)
    assert code == 0 and lines[-1] == "OK pmax=97 s=1 gap=0"
    code, lines, _ = run(["dominant-product", "--config", str(cfg), "--pmax", "50"], capsys)
    assert lines[-1].startswith("OK pmax=50")
    bad = tmp_path / "bad.cfg"
    bad.write_text("bogus = 1\n")
    assert run(["dominant-product", "--config", str(bad)], capsys)[0] == 2


@pytest.mark.parametrize("argv", [
    ["torus-breakdown", "--primes", "3,5"],
    ["breakdown-fit"],
    ["poisson", "--levels", "2:1", "--t", "1/2,1,2"],
    ["ffl-sympow", "--q", "3", "--modulus", "1,0,1"],
])
def test_experiments_pass(argv, capsys):
    code, lines, _ = run(argv, capsys)
    assert code == 0 and lines[-1].startswith("OK")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "stabletrace", "hc1-check", "--type", "A1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "OK residual=0"


def test_verify_all(capsys):
    code, lines, _ = run(["verify-all"], capsys)
    assert code == 0
    assert lines[-1] == "OK 10/10 acceptance criteria"

import json
import subprocess
import sys

import pytest

from heinzlab.cli import ConfigParse, load_config, main, parse_config_text

FAST = "\n".join([
    "lambda_grid=0.1,0.5,0.9",
    "spd_dims=2",
    "ensemble_size=3",
    "functional_size=1",
    "grid_lambda_grid=0.5",
    "grid_n=33",
    "search_t_points=100",
    "search_lambda_points=20",
])


@pytest.fixture
def fast_cfg(tmp_path):
    p = tmp_path / "fast.cfg"
    p.write_text("# quick sweep\n" + FAST + "\n")
    return str(p)


def test_config_defaults_and_overrides(tmp_path):
    empty = tmp_path / "e.cfg"
    empty.write_text("")
    assert load_config(str(empty)).sweep.seed == 42
    assert parse_config_text("seed=7")["seed"] == 7
    assert parse_config_text("lambda_grid=0.1,0.5,0.9")["lambda_grid"] == [0.1, 0.5, 0.9]
    f = tmp_path / "s.cfg"
    f.write_text("seed = 7  # comment\n")
    assert load_config(str(f), {"seed": 9}).sweep.seed == 9


@pytest.mark.parametrize("text,line", [("bogus=1", 1), ("seed=7\nnodes=x", 2), ("\n\nno equals", 3)])
def test_config_errors_carry_line(text, line):
    with pytest.raises(ConfigParse) as e:
        parse_config_text(text)
    assert e.value.lineno == line


@pytest.mark.parametrize("suite", ["scalar", "operator", "functional", "all"])
def test_verify(suite, fast_cfg, capsys):
    assert main(["verify", suite, "--config", fast_cfg]) == 0
    assert "violations: 0" in capsys.readouterr().out


def test_seed_recorded_in_json(fast_cfg, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "scalar", "--config", fast_cfg, "--seed", "7", "--format", "json",
                 "--output", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["config"]["seed"] == 7 and d["config"]["lambda_grid"] == [0.1, 0.5, 0.9]


def test_csv_format(fast_cfg, capsys):
    assert main(["verify", "operator", "--config", fast_cfg, "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("check_id,lambda,p,a,b,dim,seed,residual,pass\n")


def test_counterexamples(capsys):
    assert main(["counterexamples"]) == 0
    assert "-7.22088" in capsys.readouterr().out


def test_search_open(fast_cfg, capsys):
    assert main(["search-open", "--config", fast_cfg]) == 0
    assert "not a proof" in capsys.readouterr().out


def test_eval(capsys):
    assert main(["eval", "heinz", "--a", "1", "--b", "16", "--lambda", "0.25"]) == 0
    assert capsys.readouterr().out.strip() == "5"
    assert main(["eval", "heinz", "--a", "1", "--b", "16", "--lambda", "1.5"]) == 2
    assert main(["eval", "geometric", "--a", "4", "--b", "9", "--lambda", "0.5"]) == 0
    assert capsys.readouterr().out.strip() == "6"


def test_rule(capsys):
    assert main(["rule", "--lambda", "0.5", "--nodes", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "node,weight" and len(lines) == 4
    assert main(["rule", "--lambda", "0", "--nodes", "3"]) == 2


def test_transform(tmp_path, capsys):
    src = tmp_path / "f.csv"
    src.write_text("x,value\n-1,0.5\n0,0\n1,0.5\n2,inf\n")
    assert main(["transform", "--input", str(src), "--dual-lo", "-1", "--dual-hi", "1", "-m", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["x,value", "-1.0,0.5", "0.0,0.0", "1.0,0.5"]
    assert main(["transform", "--input", str(src), "--biconjugate"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "2.0,inf"
    assert main(["transform", "--input", str(tmp_path / "missing.csv")]) == 2


def test_usage_errors(tmp_path, capsys):
    assert main(["verify"]) == 2
    assert main(["verify", "bogus"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed=1\nwhat=2\n")
    assert main(["verify", "scalar", "--config", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "heinzlab", "eval", "heron", "--a", "1", "--b", "9",
                        "--lambda", "0"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "3"

import json
import subprocess
import sys

import pytest

from polarwalk.boolean import and_pm
from polarwalk.cli import ExperimentConfig, emit_bits, main, parse_function_input, run_experiment
from polarwalk.config import ParseError
from polarwalk.f2poly import F2Polynomial


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_function_input(files):
    assert parse_function_input(files("a.tt", "n=2\n8\n")) == and_pm(2)
    assert parse_function_input(files("p.f2", "x1*x2\n")) == F2Polynomial(2, [3])
    with pytest.raises(ParseError):
        parse_function_input(files("e.txt", ""))
    with pytest.raises(ParseError):
        parse_function_input("/nonexistent/file.tt")


def test_analyze_parity3(capsys, files):
    code, out, _ = run(capsys, "--no-timing", "analyze", "--fn", files("p3.tt", "n=3\n69\n"), "--k", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["quantities"]["levels"][0]["mk"] == 0
    assert rep["config"]["command"] == "analyze" and "wall_time" not in rep


def test_malformed_table_exit_4(capsys, files):
    code, _, err = run(capsys, "analyze", "--fn", files("bad.tt", "n=2\nzz\n"), "--k", "1")
    assert code == 4 and "bad.tt:2:" in err


def test_usage_and_resource_codes(capsys):
    assert run(capsys, "emit", "--kind", "kwise", "--n", "4", "--t", "2", "--count", "0")[0] == 2
    assert run(capsys, "approx", "--fn", "x", "--mode", "lp")[0] == 4
    assert run(capsys, "primitives", "--kind", "kwise", "--n", "4")[0] == 2
    assert run(capsys, "verify-prg", "--mode", "f2", "--n", "8", "--d", "2", "--eps", "0.3", "--exact")[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_emit_kwise_enumerated(capsys):
    code, out, _ = run(capsys, "emit", "--kind", "kwise", "--n", "4", "--t", "2", "--count", "16", "--enumerate")
    lines = out.split()
    assert code == 0 and len(lines) == 16
    # seed 0: zero polynomial; seed 1: constant 1; seed 4: identity polynomial, low bit of the point
    assert lines[0] == "0000" and lines[1] == "1111" and lines[4] == "0101"


def test_emit_deterministic_and_prg_format(capsys):
    argv = ["--seed", "beef", "emit", "--kind", "smallbias", "--n", "8", "--delta", "0.05", "--count", "1"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    code, out, _ = run(capsys, "--seed", "1", "emit", "--kind", "prg", "--mode", "f2", "--n", "8", "--d", "1",
                       "--eps", "0.3", "--count", "5")
    lines = out.split()
    assert code == 0 and len(lines) == 5 and all(len(x) == 8 and set(x) <= {"0", "1"} for x in lines)


def test_config_file_mirrors_flags(capsys, files, tmp_path):
    cfg = files("c.json", json.dumps({"kind": "smallbias", "n": 8, "delta": 0.0625, "audit": True}))
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "--config", cfg, "--out", str(out), "--no-timing", "primitives")
    rep = json.loads(out.read_text())
    assert code == 0 and rep["quantities"]["max_bias"] <= 0.0625
    code2, stdout, _ = run(capsys, "--no-timing", "primitives", "--kind", "smallbias", "--n", "8",
                           "--delta", "0.0625", "--audit")
    assert json.loads(stdout)["quantities"] == rep["quantities"]
    assert run(capsys, "--config", files("bad.json", "{nope"), "primitives")[0] == 4


def test_verify_fprg_and_fail_exit(capsys):
    code, out, _ = run(capsys, "--no-timing", "verify-fprg", "--kind", "mk", "--n", "8", "--k", "3", "--b", "2",
                       "--eps", "0.1", "--family", "f2:n=8,d=2,sample=50,seed=7")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_report_roundtrip_and_determinism():
    cfg = ExperimentConfig("corr", {"check": "fact62", "n": 6}, 0x5EED)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.to_json(timing=False) == b.to_json(timing=False)
    assert json.loads(a.to_json())["config"] == cfg.to_dict()
    assert ExperimentConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()


def test_emit_bits_api():
    cfg = ExperimentConfig("emit", {"kind": "uniform", "n": 6, "count": 3}, 9)
    assert emit_bits(cfg) == emit_bits(cfg)


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "polarwalk.cli", "--no-timing", "corr", "--check", "fact64",
                        "--n", "4"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["status"] == "pass"


def test_lp_derived_scale(capsys):
    code, out, _ = run(capsys, "--no-timing", "verify-fprg", "--n", "4", "--k", "3", "--eps", "0.1",
                       "--family", "f2:n=4,d=2,sample=30,seed=5", "--lp-c")
    rep = json.loads(out)
    led = rep["params"]["fprg"]["ledger"]
    assert code == 0 and rep["status"] == "pass" and rep["quantities"]["max_error"] <= 0.1
    assert led["c_source"] == "lp" and rep["params"]["fprg"]["c"] >= led["c_formula"]
    assert run(capsys, "verify-fprg", "--kind", "l1", "--n", "4", "--k", "3", "--eps", "0.1", "--b", "1",
               "--family", "f2:n=4,d=2", "--c", "0.2")[0] == 2

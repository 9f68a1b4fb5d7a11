from __future__ import annotations

import json
import subprocess
import sys

import pytest

from blockft import __version__
from blockft.cli import UsageError, main, parse_config

GOLAY_SWEEP = 'code = "golay23"\np_eff = [0.03, 0.04, 0.05]\ntrials = 2000\nseed = 11\n'


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_simulate_rows_and_metadata(tmp_path, capsys):
    cfg = write(tmp_path, "sweep.toml", GOLAY_SWEEP)
    out = tmp_path / "res.csv"
    assert main(["simulate", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == f"# blockft {__version__}"
    assert lines[1].startswith("# config ") and json.loads(lines[1][9:])["code"] == "golay23"
    assert lines[2] == "p,p_eff,code,trials,failures,rate,ci_lo,ci_hi,seed"
    assert len(lines) == 6
    doc = json.loads(out.with_suffix(".json").read_text())
    assert doc["version"] == __version__ and len(doc["results"]) == 3
    assert doc["config"]["p_eff"] == [0.03, 0.04, 0.05]


def test_byte_identical_across_jobs(tmp_path):
    cfg = write(tmp_path, "sweep.toml", GOLAY_SWEEP.replace("2000", "2500"))
    a, b, c = (tmp_path / f"{t}.csv" for t in "abc")
    assert main(["simulate", cfg, "--out", str(a), "--jobs", "1"]) == 0
    assert main(["simulate", cfg, "--out", str(b), "--jobs", "2"]) == 0
    assert main(["simulate", cfg, "--out", str(c), "--jobs", "1"]) == 0
    # the output path is part of the echoed config, so compare with it normalised
    ta, tb, tc = (p.read_text().replace(p.name, "X.csv") for p in (a, b, c))
    assert ta == tb == tc


def test_stdout_replay_identical(tmp_path, capsys):
    cfg = write(tmp_path, "sweep.toml", GOLAY_SWEEP.replace("2000", "500"))
    main(["simulate", cfg])
    first = capsys.readouterr().out
    main(["simulate", cfg, "--jobs", "2"])
    assert capsys.readouterr().out == first


@pytest.mark.parametrize(
    "text,msg",
    [
        ('code = "golay23"\np_eff = [0.05]\ntrials = 10\nseed = 1\nbogus = 3\n', ":5: unknown key 'bogus'"),
        ('code = "golay23"\np_eff = []\ntrials = 10\nseed = 1\n', ":2: empty sweep"),
        ('code = "golay23"\ntrials = 10\nseed = 1\n', "exactly one"),
        ('code = "golay23"\np_eff = [0.05]\np = [0.001]\ntrials = 10\nseed = 1\n', "exactly one"),
        ('code = "golay23"\np_eff = [0.05]\ntrials = 10\n', "missing required key 'seed'"),
        ('code = "golay23"\np_eff = [0.05]\ntrials = "ten"\nseed = 1\n', ":3: trials must be an integer"),
        ("code = \n", "<config>"),
    ],
)
def test_config_errors(text, msg):
    with pytest.raises(UsageError, match=msg.replace("[", r"\[")):
        parse_config(text)


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "bad.toml", 'code = "golay23"\np_eff = []\ntrials = 10\nseed = 1\n')
    assert main(["simulate", cfg]) == 1
    assert "bad.toml:2: empty sweep" in capsys.readouterr().err


def test_physical_rate_sweep(tmp_path, capsys):
    cfg = write(tmp_path, "p.toml", 'code = "golay23"\np = [0.002]\ntrials = 200\nseed = 3\n')
    assert main(["simulate", cfg]) == 0
    row = capsys.readouterr().out.splitlines()[3].split(",")
    assert row[0] == "0.002" and float(row[1]) == pytest.approx(0.0284)


def test_build(capsys, tmp_path):
    out = tmp_path / "code.txt"
    assert main(["build", "mem5865", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "[[5865,143,105]]" in text and "FAILED" not in text
    assert out.read_text().startswith(f"# blockft {__version__} mem5865")
    assert main(["build", "rm15"]) == 0
    assert "[[15,1,3]]" in capsys.readouterr().out
    assert main(["build", "bogus"]) == 1


def test_bound(capsys, tmp_path):
    assert main(["bound", "mem2047", "--peff", "0.007"]) == 0
    out = capsys.readouterr().out
    assert "1.057" in out
    assert main(["bound", "mem5865", "--peff", "0.007"]) == 0
    assert "7.0395" in capsys.readouterr().out
    assert main(["bound", "mem2047", "--peff", "0"]) == 0
    assert main(["bound", "rm15x3", "--peff", "0.01"]) == 1
    rates = write(tmp_path, "rates.toml", "rate34 = 0.0\nrate50 = 3e-4\n")
    assert main(["bound", "rm15x3", "--peff", "0.01", "--rates", rates]) == 0


def test_verify_exit_codes(capsys):
    assert main(["verify", "hadamard", "even4"]) == 0
    assert "PASS hadamard" in capsys.readouterr().out
    assert main(["verify", "--protocol", "logical-measure", "--code", "steane7"]) == 0
    assert main(["verify", "bogus", "steane7"]) == 1
    assert main(["verify", "cnot", "steane7"]) == 1  # k=1 cannot host a CNOT with its buffer
    assert main(["verify"]) == 1


def test_verify_failure_exit_code(monkeypatch, capsys):
    import blockft.cli as cli

    monkeypatch.setattr(cli, "run_verify", lambda *a, **k: (False, ["FAIL forced"]))
    assert main(["verify", "hadamard", "even4"]) == 2


def test_channel(capsys):
    assert main(["channel", "--p", "0.001"]) == 0
    out = capsys.readouterr().out
    assert "p_eff 1.42" in out
    assert main(["channel", "--eps", "0.001"]) == 1


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "blockft", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout

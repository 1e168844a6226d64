import json
import subprocess
import sys

import pytest

from ncorr.cli import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_NUMERICAL,
    EXIT_PASS,
    main,
    read_config_file,
    resolve_config,
)
from ncorr.errors import ConfigError

FAST_COMPARE = ["compare", "--n", "1", "--N", "6", "--T", "3", "--matrices", "200"]


def records(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_defaults_and_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\nN = 12\n--T = 5.5\nq = full\nmethods = mc, rs_main\n")
    cfg = resolve_config(["--config", str(cfg_file), "--N", "14"])
    assert cfg.N == 14          # flag beats file
    assert cfg.T == 5.5         # file beats default
    assert cfg.q == "full"
    assert cfg.method_list == ["mc", "rs_main"]
    assert cfg.n == 2           # default
    assert cfg.tol == 3.0


@pytest.mark.parametrize("text", ["N = abc\n", "bogus = 1\n", "no equals sign\n"])
def test_bad_config_files(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError):
        read_config_file(p)


@pytest.mark.parametrize("argv", [
    ["compare", "--n", "4"],
    ["compare", "--N", "0"],
    ["compare", "--q", "zero"],
    ["compare", "--phi-width", "0.95"],        # 2 * 0.95 > 2q - eps
    ["compare", "--methods", "mc,telepathy"],
    ["zeta"],                                  # needs --zeros
    ["frobnicate"],
    ["compare", "--command", "decay"],
])
def test_configuration_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_CONFIG


def test_single_point_four_way_agreement(tmp_path, capsys):
    out = tmp_path / "r.jsonl"
    code = main(FAST_COMPARE + ["--methods", "mc,determinant,contour,rs_main", "--out", str(out)])
    assert code == EXIT_PASS
    recs = records(out)
    assert recs[0]["type"] == "config"
    assert {r["label"] for r in recs if r["type"] == "result"} == {"mc", "determinant", "contour", "rs_main"}
    assert all(r["config"]["N"] == 6 for r in recs if r["type"] == "result")
    assert "status: PASS" in capsys.readouterr().out


def test_zero_tolerance_fails(tmp_path, capsys):
    code = main(FAST_COMPARE + ["--methods", "mc,determinant", "--tolerance", "0"])
    assert code == EXIT_FAIL
    assert "status: FAIL" in capsys.readouterr().out


def test_contour_truncations_agree(capsys):
    code = main(["compare", "--n", "2", "--N", "10", "--methods", "determinant,contour,contour_full"])
    assert code == EXIT_PASS


def test_records_are_deterministic(tmp_path, capsys):
    out = tmp_path / "a.jsonl"
    argv = FAST_COMPARE + ["--methods", "mc,determinant", "--out", str(out)]
    main(argv)
    first = out.read_bytes()
    main(argv)
    assert out.read_bytes() == first


def test_parallel_matches_serial(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(FAST_COMPARE + ["--methods", "mc,determinant,rs_main", "--out", str(a)])
    main(FAST_COMPARE + ["--methods", "mc,determinant,rs_main", "--parallel", "--out", str(b)])
    strip = lambda recs: [{k: v for k, v in r.items() if k != "config"} for r in recs]
    assert strip(records(a)) == strip(records(b))


def test_verify_jstar(capsys):
    assert main(["verify_jstar", "--N", "5"]) == EXIT_PASS


def test_decay(capsys):
    assert main(["decay", "--n", "2", "--N", "20"]) == EXIT_PASS


def test_sample_and_plotdata(tmp_path, capsys):
    out = tmp_path / "s.jsonl"
    assert main(["sample", "--N", "4", "--matrices", "50", "--out", str(out)]) == EXIT_PASS
    assert any(r["type"] != "config" for r in records(out))
    out2 = tmp_path / "p.jsonl"
    assert main(["plotdata", "--N", "8", "--matrices", "200", "--out", str(out2)]) == EXIT_PASS
    assert len(records(out2)) > 1


def test_zeta_on_fixture(zeros_1000_path, capsys):
    assert main(["zeta", "--n", "2", "--zeros", str(zeros_1000_path)]) == EXIT_PASS


def test_zeta_outside_proven_range(zeros_1000_path, capsys):
    argv = ["zeta", "--n", "2", "--q", "2", "--zeros", str(zeros_1000_path)]
    assert main(argv) == EXIT_CONFIG
    main(argv + ["--force-conjectural"])
    assert "conjectural" in capsys.readouterr().out


def test_numerical_error_exit_3(capsys):
    # a truncation height far too small for the weights leaves a large tail
    code = main(["compare", "--n", "2", "--N", "10", "--methods", "contour", "--tmax", "2"])
    assert code == EXIT_NUMERICAL


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "ncorr", "verify_jstar", "--N", "5"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "status: PASS" in out.stdout

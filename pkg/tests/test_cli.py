"""Argument parsing, report emission, exit codes, and output determinism."""

import json
import subprocess
import sys

import pytest

from selberg_signs import cli
from selberg_signs.formats import load_table_cache

ZETA = 'family = "zeta"\n'
CHI4 = 'family = "dirichlet_char"\nmodulus = 4\n'


@pytest.fixture
def zeta_file(tmp_path):
    path = tmp_path / "zeta.toml"
    path.write_text(ZETA)
    return str(path)


@pytest.fixture
def chi4_file(tmp_path):
    path = tmp_path / "chi4.toml"
    path.write_text(CHI4)
    return str(path)


# ---------------------------------------------------------------------------
# parse_args
# ---------------------------------------------------------------------------

def test_parse_exponents():
    cfg = cli.parse_args(["exponents", "--theta", "0.5", "--kappa", "0.998"])
    assert cfg.command == "exponents"
    assert (cfg.theta, cfg.kappa, cfg.epsilon) == (0.5, 0.998, 1e-3)


def test_parse_signs(zeta_file):
    cfg = cli.parse_args(["signs", "--spec", zeta_file, "--x", "100000"])
    assert cfg.command == "signs"
    assert cfg.spec_path == zeta_file
    assert cfg.x == 100000


def test_parse_window_h_ge_x_rejected(zeta_file):
    with pytest.raises(SystemExit) as exc:
        cli.parse_args(["window", "--spec", zeta_file, "--x", "10", "--H", "100", "--M", "2"])
    assert exc.value.code == 2


def test_parse_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.parse_args(["frobnicate"])
    assert exc.value.code == 2


def test_parse_exponents_needs_theta_or_degree():
    with pytest.raises(SystemExit) as exc:
        cli.parse_args(["exponents", "--kappa", "0.99"])
    assert exc.value.code == 2


def test_parse_csv_only_where_supported(zeta_file):
    with pytest.raises(SystemExit) as exc:
        cli.parse_args(["signs", "--spec", zeta_file, "--x", "10", "--format", "csv"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# commands end to end
# ---------------------------------------------------------------------------

def test_sieve_csv_all_ones(zeta_file, capsys):
    code = cli.main(["sieve", "--spec", zeta_file, "--x", "1000", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "m,A"
    assert len(lines) == 1001
    assert all(line.endswith(",1") for line in lines[1:])


def test_sieve_cache_out(zeta_file, tmp_path, capsys):
    cache = tmp_path / "zeta.slbc"
    code = cli.main(["sieve", "--spec", zeta_file, "--x", "50", "--cache-out", str(cache)])
    assert code == 0
    capsys.readouterr()
    assert load_table_cache(cache).x_max == 50


def test_signs_json(chi4_file, capsys):
    code = cli.main(["signs", "--spec", chi4_file, "--x", "20", "--positions"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "sign_change_summary"
    assert doc["schema_version"] == 1
    assert doc["count"] == 9
    assert doc["positions"][0] == 1


def test_window_single(chi4_file, capsys):
    code = cli.main(["window", "--spec", chi4_file, "--x", "40", "--H", "20", "--M", "2"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "window_report"
    assert set(doc) >= {"x", "H", "M", "S1", "S2", "detected"}


def test_window_sweep_csv(chi4_file, capsys):
    code = cli.main([
        "window", "--spec", chi4_file, "--x", "200", "--H", "10", "--M", "2",
        "--sweep", "--format", "csv",
    ])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "x,H,M,S1,S2,detected"
    assert len(lines) == 1 + 21  # x = 200, 210, ..., 400


def test_exponents_json_and_table(capsys):
    code = cli.main(["exponents", "--theta", "1.0", "--kappa", "1.0", "--epsilon", "0.0001"])
    assert code == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["kind"] == "exponent_report"
    assert doc["admissible"] is True
    assert "count exponent" in captured.err


def test_exponents_deterministic_bytes(capsys):
    argv = ["exponents", "--theta", "0.5", "--kappa", "0.998"]
    assert cli.main(argv) == 0
    first = capsys.readouterr().out
    assert cli.main(argv) == 0
    second = capsys.readouterr().out
    assert first == second


def test_moment(zeta_file, capsys):
    code = cli.main(["moment", "--spec", zeta_file, "--N", "50", "--T", "20"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "second_moment"
    assert doc["value"] > 0
    assert doc["mvt_ratio"] < 8


def test_profile_json_and_csv(zeta_file, capsys):
    code = cli.main(["profile", "--spec", zeta_file, "--x", "300", "--M", "4", "--T", "10"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "subconvexity_profile"
    assert doc["ratio"] == doc["sup"] / doc["envelope"]
    code = cli.main([
        "profile", "--spec", zeta_file, "--x", "300", "--M", "4", "--T", "10",
        "--format", "csv",
    ])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "t,absK"
    assert len(lines) > 10


def test_perron(zeta_file, capsys):
    code = cli.main([
        "perron", "--spec", zeta_file, "--x", "100", "--H", "10", "--M", "3",
        "--tcut", "1000",
    ])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["direct_value"] == 5.0
    assert doc["abs_error"] <= 0.5


def test_verify_identities(chi4_file, capsys):
    code = cli.main([
        "verify", "identities", "--spec", chi4_file, "--dmax", "10", "--trunc", "20000",
    ])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "congruence_suite"
    assert doc["all_passed"] is True
    assert [c["d"] for c in doc["checks"]] == [1, 2, 3, 5, 6, 7, 10]


def test_verify_identities_zeta(zeta_file, capsys):
    code = cli.main([
        "verify", "identities", "--spec", zeta_file, "--dmax", "6", "--trunc", "20000",
    ])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["all_passed"] is True
    assert all(c["passed"] for c in doc["checks"])


def test_theorem_check_zeta_fails(zeta_file, capsys):
    code = cli.main(["theorem-check", "--spec", zeta_file, "--x", "500", "--use-spec-kappa"])
    assert code == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "fail"
    assert doc["observed"] == 0


def test_theorem_check_chi4_passes(chi4_file, capsys):
    code = cli.main(["theorem-check", "--spec", chi4_file, "--x", "500"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] in ("pass", "vacuous")
    assert doc["observed"] > 0


def test_output_file_atomic(zeta_file, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = cli.main([
        "signs", "--spec", zeta_file, "--x", "10", "--output", str(out),
    ])
    assert code == 0
    assert json.loads(out.read_text())["count"] == 0
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".selberg-signs-")]
    assert leftovers == []


def test_missing_spec_file_is_io_error(tmp_path, capsys):
    code = cli.main(["signs", "--spec", str(tmp_path / "nope.toml"), "--x", "10"])
    assert code == 3
    assert "i/o error" in capsys.readouterr().err


def test_bad_spec_content_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('family = "nope"\n')
    code = cli.main(["signs", "--spec", str(bad), "--x", "10"])
    assert code == 2


def test_moment_bad_step_is_usage_error(zeta_file, capsys):
    code = cli.main([
        "moment", "--spec", zeta_file, "--N", "500", "--T", "20", "--step", "5.0",
    ])
    assert code == 2
    assert "step" in capsys.readouterr().err


def test_profile_theta_override(zeta_file, capsys):
    code = cli.main([
        "profile", "--spec", zeta_file, "--x", "300", "--M", "4", "--T", "10",
        "--theta", "0.125",
    ])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["theta"] == 0.125


def test_console_module_runs(zeta_file):
    result = subprocess.run(
        [sys.executable, "-m", "selberg_signs.cli", "sieve", "--spec", zeta_file,
         "--x", "5", "--format", "csv"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert result.stdout.startswith("m,A\n1,1\n")

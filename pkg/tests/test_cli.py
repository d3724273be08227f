import json
import math
import shutil
import subprocess

import pytest

from boundarylab.cli import BUILDERS, SUBCOMMANDS, main

# enough to exercise every code path while staying quick
FAST_OVERRIDES = {
    "samples": 60,
    "trials": 40,
    "n_pairs": 2,
    "T_grid": [5.0, 10.0],
    "sr_r_values": [3.0, 4.0],
    "decay_n_values": [2, 3, 4, 5],
    "r_max": 6.0,
    "k_max": 4,
    "classify_depth": 6,
    "growth_r_max": 7,
}


def _cfg(tmp_path, name="cfg.json", **over):
    p = tmp_path / name
    p.write_text(json.dumps({**FAST_OVERRIDES, **over}), encoding="utf-8")
    return str(p)


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main([]) == 1
    assert main(["no-such-subcommand"]) == 1
    assert main(["exponent", "--config", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["exponent", "--config", str(bad)]) == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    for sub in SUBCOMMANDS:
        assert sub in out


def test_unknown_config_key_exits_2(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"no_such_knob": 1}), encoding="utf-8")
    assert main(["exponent", "--config", str(p)]) == 2
    capsys.readouterr()


def test_epsilon_beyond_exponent_exits_2(tmp_path, capsys):
    cfg = _cfg(tmp_path, epsilon=5.0)
    assert main(["density", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    capsys.readouterr()


def test_exhausted_cap_exits_3(tmp_path, capsys):
    cfg = _cfg(tmp_path, cap=10)
    assert main(["growth", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    capsys.readouterr()


def test_exponent_report_values(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["exponent", "--out", str(out)]) == 0
    capsys.readouterr()
    doc = json.loads((out / "exponent.json").read_text(encoding="utf-8"))
    assert doc["name"] == "exponent"
    assert doc["artifact_version"] == "0.1.0"
    assert abs(doc["summary"]["h"] - math.log(3.0)) < 1e-12
    assert doc["summary"]["max_homogeneity_dev"] < 1e-9
    assert doc["row_count"] == 4
    assert "config_json" in doc["header"] and "wall_time_s" in doc["header"]


def test_shadow_report_values(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["shadow", "--out", str(out)]) == 0
    capsys.readouterr()
    doc = json.loads((out / "shadow.json").read_text(encoding="utf-8"))
    assert abs(doc["summary"]["min_ratio"] - 0.75) < 1e-9
    assert abs(doc["summary"]["max_ratio"] - 2.25) < 1e-9


def test_csv_bodies_are_byte_deterministic(tmp_path, capsys):
    cfg = _cfg(tmp_path)
    for d in ("a", "b"):
        assert main(["ahlfors", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    assert (tmp_path / "a" / "ahlfors.csv").read_bytes() == (tmp_path / "b" / "ahlfors.csv").read_bytes()


def test_seed_override_changes_sampled_rows(tmp_path, capsys):
    cfg = _cfg(tmp_path)
    assert main(["ahlfors", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"]) == 0
    assert main(["ahlfors", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"]) == 0
    capsys.readouterr()
    assert (tmp_path / "a" / "ahlfors.csv").read_bytes() != (tmp_path / "b" / "ahlfors.csv").read_bytes()
    doc = json.loads((tmp_path / "a" / "ahlfors.json").read_text(encoding="utf-8"))
    assert json.loads(doc["header"]["config_json"])["seed"] == 1


def test_out_directory_from_config(tmp_path, capsys):
    target = tmp_path / "from-config"
    cfg = _cfg(tmp_path, out=str(target))
    assert main(["density", "--config", cfg]) == 0
    capsys.readouterr()
    assert (target / "density.csv").exists()
    assert (target / "density.json").exists()


@pytest.mark.parametrize("sub", sorted(BUILDERS))
def test_every_subcommand_runs_clean(sub, tmp_path, capsys):
    cfg = _cfg(tmp_path)
    out = tmp_path / "o"
    assert main([sub, "--config", cfg, "--out", str(out)]) == 0
    capsys.readouterr()
    assert (out / f"{sub}.csv").exists()
    doc = json.loads((out / f"{sub}.json").read_text(encoding="utf-8"))
    assert doc["row_count"] >= 1
    assert doc["summary"]


def test_console_script_is_installed(tmp_path):
    exe = shutil.which("boundary-lab")
    assert exe is not None, "console script boundary-lab not on PATH"
    proc = subprocess.run(
        [exe, "exponent", "--out", str(tmp_path / "o")],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "exponent.json").exists()


def test_verify_all_passes_every_check(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["verify-all", "--out", str(out), "--threads", "4"]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text
    doc = json.loads((out / "verify-all.json").read_text(encoding="utf-8"))
    assert doc["summary"]["n_failed"] == 0
    assert doc["summary"]["n_checks"] == doc["row_count"]

import json
import shutil
import subprocess
from pathlib import Path

from boundaryplots.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "sample_reports"


def _write_spec(tmp_path, **doc):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


def test_good_spec_exits_0(tmp_path, capsys):
    spec = _write_spec(
        tmp_path, kind="ratio-scatter",
        report=str(SAMPLES / "shadow"), out=str(tmp_path / "fig.svg"),
    )
    assert main(["--spec", spec]) == 0
    assert (tmp_path / "fig.svg").exists()
    assert "fig.svg" in capsys.readouterr().out


def test_unreadable_spec_exits_1(tmp_path, capsys):
    assert main(["--spec", str(tmp_path / "nope.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert main(["--spec", str(bad)]) == 1
    assert main([]) == 1  # --spec is required
    capsys.readouterr()


def test_schema_problems_exit_2(tmp_path, capsys):
    spec = _write_spec(
        tmp_path, kind="decay-loglog",
        report=str(SAMPLES / "shadow"), out=str(tmp_path / "fig.svg"),
    )
    assert main(["--spec", spec]) == 2
    spec2 = _write_spec(
        tmp_path, kind="convergence",
        report=str(tmp_path / "missing-report"), out=str(tmp_path / "fig.svg"),
    )
    assert main(["--spec", spec2]) == 2
    capsys.readouterr()


def test_console_script_is_installed(tmp_path):
    exe = shutil.which("boundary-plots")
    assert exe is not None, "console script boundary-plots not on PATH"
    spec = _write_spec(
        tmp_path, kind="verdict-table",
        report=str(SAMPLES / "classify"), out=str(tmp_path / "table.svg"),
    )
    proc = subprocess.run([exe, "--spec", spec], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "table.svg").exists()

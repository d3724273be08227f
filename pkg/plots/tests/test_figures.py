import json
from pathlib import Path

import pytest

from boundaryplots import FigureSpec, KINDS, ReportFormatError, load_report, render
from boundaryplots.figures import convergence_target, reference_slope

SAMPLES = Path(__file__).resolve().parent.parent / "sample_reports"

KIND_TO_SAMPLE = {
    "ratio-scatter": "shadow",
    "decay-loglog": "matrix-coeff",
    "convergence": "kernel-convergence",
    "verdict-table": "classify",
}


def _spec(kind, out, **extra):
    return FigureSpec.from_dict(
        {"kind": kind, "report": str(SAMPLES / KIND_TO_SAMPLE[kind]), "out": str(out), **extra}
    )


@pytest.mark.parametrize("kind", sorted(KINDS))
def test_every_kind_renders_its_sample(kind, tmp_path):
    out = render(_spec(kind, tmp_path / f"{kind}.svg"))
    data = out.read_bytes()
    assert data.startswith(b"<?xml")
    assert b"<svg" in data


def test_rendering_is_byte_deterministic(tmp_path):
    a = render(_spec("ratio-scatter", tmp_path / "a.svg"))
    b = render(_spec("ratio-scatter", tmp_path / "b.svg"))
    assert a.read_bytes() == b.read_bytes()
    assert b"Date" not in a.read_bytes().split(b"<metadata>")[0]


def test_png_output(tmp_path):
    out = render(_spec("decay-loglog", tmp_path / "fig.png"))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_title_override_lands_in_the_image(tmp_path):
    out = render(_spec("convergence", tmp_path / "t.svg", title="pairing against R"))
    assert b"pairing against R" in out.read_bytes()


def test_decay_overlay_reads_dimension_from_header():
    doc, _ = load_report(SAMPLES / "matrix-coeff.csv", SAMPLES / "matrix-coeff.json")
    assert doc["header"]["D"] == 2.0
    assert reference_slope(doc) == -0.5
    # the producer records the same overlay slope in its summary
    assert doc["summary"]["reference_slope"] == reference_slope(doc)


def test_convergence_overlay_matches_summary_target():
    doc, _ = load_report(
        SAMPLES / "kernel-convergence.csv", SAMPLES / "kernel-convergence.json"
    )
    assert convergence_target(doc) == doc["summary"]["target"]
    assert abs(convergence_target(doc) - 1.0) < 1e-9


def test_kind_and_report_must_agree(tmp_path):
    spec = FigureSpec.from_dict({
        "kind": "decay-loglog",
        "report": str(SAMPLES / "shadow"),
        "out": str(tmp_path / "x.svg"),
    })
    with pytest.raises(ReportFormatError, match="needs columns"):
        render(spec)


def test_empty_report_is_refused(tmp_path):
    doc = json.loads((SAMPLES / "shadow.json").read_text(encoding="utf-8"))
    doc["row_count"] = 0
    (tmp_path / "r.json").write_text(json.dumps(doc), encoding="utf-8")
    (tmp_path / "r.csv").write_text("word,wlen,ratio\r\n", encoding="utf-8")
    with pytest.raises(ReportFormatError, match="no data rows"):
        load_report(tmp_path / "r.csv", tmp_path / "r.json")
    (tmp_path / "e.csv").write_text("", encoding="utf-8")
    with pytest.raises(ReportFormatError, match="empty report"):
        load_report(tmp_path / "e.csv", tmp_path / "r.json")


def test_row_count_mismatch_is_refused(tmp_path):
    doc = json.loads((SAMPLES / "kernel-convergence.json").read_text(encoding="utf-8"))
    doc["row_count"] = 99
    (tmp_path / "k.json").write_text(json.dumps(doc), encoding="utf-8")
    csv_body = (SAMPLES / "kernel-convergence.csv").read_bytes()
    (tmp_path / "k.csv").write_bytes(csv_body)
    with pytest.raises(ReportFormatError, match="row_count"):
        load_report(tmp_path / "k.csv", tmp_path / "k.json")


def test_column_row_must_match_declaration(tmp_path):
    doc = json.loads((SAMPLES / "kernel-convergence.json").read_text(encoding="utf-8"))
    (tmp_path / "k.json").write_text(json.dumps(doc), encoding="utf-8")
    lines = (SAMPLES / "kernel-convergence.csv").read_text(encoding="utf-8").splitlines(True)
    (tmp_path / "k.csv").write_text("bogus,columns,here,now\r\n" + "".join(lines[1:]), encoding="utf-8")
    with pytest.raises(ReportFormatError, match="does not match declared columns"):
        load_report(tmp_path / "k.csv", tmp_path / "k.json")


def test_spec_validation(tmp_path):
    with pytest.raises(ReportFormatError, match="unknown kind"):
        FigureSpec.from_dict({"kind": "pie", "report": "r", "out": "o.svg"})
    with pytest.raises(ReportFormatError, match="needs 'report'"):
        FigureSpec.from_dict({"kind": "convergence", "out": "o.svg"})
    with pytest.raises(ReportFormatError, match="unknown figure spec keys"):
        FigureSpec.from_dict({"kind": "convergence", "report": "r", "out": "o", "dpi": 300})
    with pytest.raises(ReportFormatError, match="needs 'out'"):
        FigureSpec.from_dict({"kind": "convergence", "report": "r"})

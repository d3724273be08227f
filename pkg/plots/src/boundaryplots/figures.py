"""Load experiment reports and render the four figure kinds.

A report is the pair written by the producing CLI: `<name>.csv` holding the
column row plus data rows, and `<name>.json` holding name, header, columns,
row_count and summary.  Every kind validates the declared schema before
drawing and refuses empty or inconsistent inputs.  Rendering is pure: a
fixed style, no timestamps, stable SVG ids — the same report produces the
same image bytes.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "svg.hashsalt": "boundary-plots",
    "font.size": 9.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


class ReportFormatError(ValueError):
    """Report file is missing, empty, or does not match its declared schema."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which report, which kind, where to write it."""

    kind: str
    csv_path: Path
    json_path: Path
    out: Path
    title: str | None = None

    @staticmethod
    def from_dict(doc: dict) -> "FigureSpec":
        if not isinstance(doc, dict):
            raise ReportFormatError("figure spec must be a JSON object")
        allowed = {"kind", "report", "csv", "json", "out", "title"}
        unknown = sorted(set(doc) - allowed)
        if unknown:
            raise ReportFormatError(f"unknown figure spec keys: {', '.join(unknown)}")
        for key in ("kind", "out"):
            if key not in doc:
                raise ReportFormatError(f"figure spec needs {key!r}")
        if doc["kind"] not in KINDS:
            raise ReportFormatError(
                f"unknown kind {doc['kind']!r}; expected one of {', '.join(sorted(KINDS))}"
            )
        if "report" in doc:
            base = Path(doc["report"])
            csv_path, json_path = base.with_suffix(".csv"), base.with_suffix(".json")
        elif "csv" in doc and "json" in doc:
            csv_path, json_path = Path(doc["csv"]), Path(doc["json"])
        else:
            raise ReportFormatError("figure spec needs 'report' or both 'csv' and 'json'")
        return FigureSpec(doc["kind"], csv_path, json_path, Path(doc["out"]), doc.get("title"))


def load_report(csv_path: Path, json_path: Path) -> tuple[dict, list[list[str]]]:
    """The JSON document plus the CSV data rows, cross-checked."""
    try:
        doc = json.loads(Path(json_path).read_text(encoding="utf-8"))
        with open(csv_path, "r", encoding="utf-8", newline="") as fh:
            table = list(csv.reader(fh))
    except OSError as exc:
        raise ReportFormatError(f"cannot read report: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"report summary is not JSON: {exc}") from exc
    for key in ("name", "columns", "row_count", "summary", "header"):
        if key not in doc:
            raise ReportFormatError(f"report summary lacks {key!r}")
    if not table:
        raise ReportFormatError(f"empty report file: {csv_path}")
    if table[0] != list(doc["columns"]):
        raise ReportFormatError(
            f"column row {table[0]!r} does not match declared columns {doc['columns']!r}"
        )
    rows = table[1:]
    if not rows:
        raise ReportFormatError(f"report has no data rows: {csv_path}")
    if len(rows) != doc["row_count"]:
        raise ReportFormatError(
            f"row_count {doc['row_count']} does not match {len(rows)} CSV rows"
        )
    return doc, rows


def _require(doc: dict, kind: str) -> None:
    need = KINDS[kind]
    missing = [c for c in need["columns"] if c not in doc["columns"]]
    if missing:
        raise ReportFormatError(
            f"{kind} needs columns {missing} but report {doc['name']!r} has {doc['columns']!r}"
        )
    for area in ("summary", "header"):
        missing = [k for k in need[area] if k not in doc[area]]
        if missing:
            raise ReportFormatError(f"{kind} needs {area} keys {missing} in report {doc['name']!r}")


def _col(doc: dict, rows: list[list[str]], name: str) -> list[float]:
    i = list(doc["columns"]).index(name)
    try:
        return [float(r[i]) for r in rows]
    except (ValueError, IndexError) as exc:
        raise ReportFormatError(f"column {name!r} is not numeric throughout") from exc


def reference_slope(doc: dict) -> float:
    """Decay overlay: -1/D with the dimension taken from the report header."""
    return -1.0 / float(doc["header"]["D"])


def convergence_target(doc: dict) -> float:
    """Convergence overlay: the limiting pairing recorded by the producer."""
    return float(doc["summary"]["target"])


# -- the four kinds -----------------------------------------------------------


def _draw_ratio_scatter(ax, doc, rows, spec):
    x = _col(doc, rows, "wlen")
    y = _col(doc, rows, "ratio")
    lo, hi = float(doc["summary"]["min_ratio"]), float(doc["summary"]["max_ratio"])
    ax.axhspan(lo, hi, color="tab:orange", alpha=0.15,
               label=f"band [{lo:.4g}, {hi:.4g}]")
    ax.scatter(x, y, s=8, color="tab:blue", alpha=0.6)
    ax.set_xlabel("weighted length |g|")
    ax.set_ylabel("ratio")
    ax.legend(loc="best")


def _draw_decay_loglog(ax, doc, rows, spec):
    n = _col(doc, rows, "n")
    err = _col(doc, rows, "max_error")
    if min(err) <= 0 or min(n) < 0:
        raise ReportFormatError("decay-loglog needs positive errors and n >= 0")
    s = reference_slope(doc)
    x = [1.0 + v for v in n]
    ref = [err[0] * (v / x[0]) ** s for v in x]
    ax.loglog(x, err, "o-", color="tab:blue", label="max error")
    ax.loglog(x, ref, "--", color="tab:red", label=f"reference slope {s:g}")
    ax.set_xlabel("1 + n")
    ax.set_ylabel("max error over the annulus")
    ax.legend(loc="best")


def _draw_convergence(ax, doc, rows, spec):
    r = _col(doc, rows, "R")
    val = _col(doc, rows, "pairing")
    t = convergence_target(doc)
    ax.plot(r, val, "o-", color="tab:blue", label="pairing")
    ax.axhline(t, linestyle="--", color="tab:red", label=f"target {t:g}")
    ax.set_xlabel("R")
    ax.set_ylabel("pairing value")
    ax.legend(loc="best")


_TABLE_KEYS = (
    "similarity_slope", "similarity_verdict", "max_deviation",
    "density_log_slope", "density_verdict", "final_spread",
    "holder_slope", "dimension_ratio", "cross_ratio_slope",
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _draw_verdict_table(ax, doc, rows, spec):
    cells = [[k, _fmt(doc["summary"][k])] for k in _TABLE_KEYS]
    ax.axis("off")
    table = ax.table(cellText=cells, colLabels=("quantity", "value"),
                     cellLoc="left", loc="center")
    table.scale(1.0, 1.3)


KINDS: dict[str, dict] = {
    "ratio-scatter": {
        "columns": ("wlen", "ratio"),
        "summary": ("min_ratio", "max_ratio"),
        "header": (),
        "draw": _draw_ratio_scatter,
    },
    "decay-loglog": {
        "columns": ("n", "max_error"),
        "summary": (),
        "header": ("D",),
        "draw": _draw_decay_loglog,
    },
    "convergence": {
        "columns": ("R", "pairing"),
        "summary": ("target",),
        "header": (),
        "draw": _draw_convergence,
    },
    "verdict-table": {
        "columns": (),
        "summary": _TABLE_KEYS,
        "header": (),
        "draw": _draw_verdict_table,
    },
}


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it; returns the output path.

    SVG by default (deterministic bytes); `.png` output is honored.
    """
    doc, rows = load_report(spec.csv_path, spec.json_path)
    _require(doc, spec.kind)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            KINDS[spec.kind]["draw"](ax, doc, rows, spec)
            ax.set_title(spec.title if spec.title is not None else f"{doc['name']} ({spec.kind})")
            spec.out.parent.mkdir(parents=True, exist_ok=True)
            fmt = "png" if spec.out.suffix.lower() == ".png" else "svg"
            if fmt == "svg":
                # matplotlib stamps a creation date unless told otherwise
                fig.savefig(spec.out, format="svg", metadata={"Date": None})
            else:
                fig.savefig(spec.out, format="png")
        finally:
            plt.close(fig)
    return spec.out

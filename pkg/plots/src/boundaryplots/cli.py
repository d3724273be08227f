"""`boundary-plots --spec <json>`: render one figure per invocation.

The spec file is a JSON object: {"kind": ..., "report": <base path without
extension>, "out": <image path>, "title": optional}; "csv"/"json" may replace
"report" when the two files live apart.  Exit codes: 0 success, 1 unusable
spec file, 2 schema or report-format failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from .figures import FigureSpec, ReportFormatError, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="boundary-plots")
    parser.add_argument("--spec", required=True, help="figure spec (JSON)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"cannot read figure spec: {exc}\n")
        return 1
    try:
        out = render(FigureSpec.from_dict(doc))
    except ReportFormatError as exc:
        sys.stderr.write(f"bad report: {exc}\n")
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

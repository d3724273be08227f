"""Figures from boundary-lab report files (CSV rows + JSON summary)."""

from .figures import FigureSpec, KINDS, ReportFormatError, load_report, render

__all__ = ["FigureSpec", "KINDS", "ReportFormatError", "load_report", "render"]

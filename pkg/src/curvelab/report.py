"""Experiment reports, CSV emission and minimal self-contained SVG plots."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from .fitting import FitResult


@dataclass(frozen=True)
class Verdict:
    criterion: str  # acceptance criterion id, e.g. "A2"
    passed: bool
    detail: str


@dataclass
class ExperimentReport:
    experiment: str
    columns: list
    rows: list = field(default_factory=list)
    fit: FitResult | None = None
    verdicts: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_row(self, **values):
        self.rows.append({c: values.get(c) for c in self.columns})

    def sorted_rows(self):
        def key(row):
            return tuple(_sortable(row[c]) for c in self.columns)
        return sorted(self.rows, key=key)

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def _sortable(v):
    if isinstance(v, (int, float)):
        return (0, float(v), "")
    return (1, 0.0, str(v))


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


def _csv_quote(s: str) -> str:
    if any(c in s for c in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def render_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write(",".join(_csv_quote(c) for c in report.columns) + "\n")
    for row in report.sorted_rows():
        buf.write(",".join(_csv_quote(_format_value(row[c])) for c in report.columns) + "\n")
    return buf.getvalue()


def emit_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(report))


def render_verdicts_csv(report: ExperimentReport) -> str:
    lines = ["criterion,passed,detail"]
    for v in report.verdicts:
        lines.append(",".join([v.criterion, _format_value(v.passed), _csv_quote(v.detail)]))
    return "\n".join(lines) + "\n"


def emit_verdicts_csv(report: ExperimentReport, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_verdicts_csv(report))


# ---------------------------------------------------------------------------
# SVG


def render_svg(report: ExperimentReport, x_column: str, y_column: str,
               width: int = 800, height: int = 600) -> str:
    """A log-log scatter of two report columns plus the fitted line."""
    pts = [(row[x_column], row[y_column]) for row in report.sorted_rows()
           if _positive(row.get(x_column)) and _positive(row.get(y_column))]
    margin = 60
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle" '
        f'font-family="monospace">log {_xml(x_column)}</text>',
        f'<text x="18" y="{height // 2}" text-anchor="middle" font-family="monospace" '
        f'transform="rotate(-90 18 {height // 2})">log {_xml(y_column)}</text>',
    ]
    if pts:
        lx = [math.log10(p[0]) for p in pts]
        ly = [math.log10(p[1]) for p in pts]
        x_lo, x_hi = min(lx), max(lx)
        y_lo, y_hi = min(ly), max(ly)
        x_pad = 0.05 * (x_hi - x_lo or 1.0)
        y_pad = 0.05 * (y_hi - y_lo or 1.0)
        x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
        y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

        def to_px(xv, yv):
            px = margin + (xv - x_lo) / (x_hi - x_lo) * (width - 2 * margin)
            py = height - margin - (yv - y_lo) / (y_hi - y_lo) * (height - 2 * margin)
            return px, py

        if report.fit is not None:
            ln10 = math.log(10.0)
            f_lo = (report.fit.intercept + report.fit.slope * x_lo * ln10) / ln10
            f_hi = (report.fit.intercept + report.fit.slope * x_hi * ln10) / ln10
            (x1, y1), (x2, y2) = to_px(x_lo, f_lo), to_px(x_hi, f_hi)
            parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                         f'y2="{y2:.2f}" stroke="#c03030" stroke-width="1.5"/>')
            parts.append(f'<text x="{width - margin}" y="{margin - 10}" '
                         f'text-anchor="end" font-family="monospace">'
                         f'slope = {report.fit.slope:.4f} '
                         f'&#177; {report.fit.stderr:.4f}</text>')
        for xv, yv in zip(lx, ly):
            px, py = to_px(xv, yv)
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="#3050c0"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _positive(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _xml(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg(report: ExperimentReport, path, x_column: str, y_column: str) -> None:
    with open(path, "w") as fh:
        fh.write(render_svg(report, x_column, y_column))

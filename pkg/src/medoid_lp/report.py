"""CSV, JSON and SVG reports for experiment results.

Wall time is kept out of every format so that identical results give
identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterable

CSV_FIELDS = ["case", "d", "k", "n", "R", "trials", "fractional", "cluster_only",
              "ball", "failed_ball", "failed_cluster", "solver_failures",
              "ball_without_prop1", "brute_mismatches"]
CERT_ORDER = ("prop1", "cor2", "cor3", "cor4")

# plot geometry
WIDTH, HEIGHT = 480, 320
LEFT, RIGHT, TOP, BOTTOM = 56, 110, 34, 44
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
           "#e377c2", "#17becf"]


class ReportError(ValueError):
    pass


def _cert_names(results) -> list:
    seen = set()
    for r in results:
        seen.update(r.cert_pass)
    return [c for c in CERT_ORDER if c in seen] + sorted(seen - set(CERT_ORDER))


def _row(r, certs) -> dict:
    row = {f: getattr(r, f) for f in CSV_FIELDS}
    row["R"] = repr(float(r.R))
    for c in certs:
        row[f"{c}_pass"] = r.cert_pass.get(c, "")
    return row


def to_csv(results) -> str:
    results = _nonempty(results)
    certs = _cert_names(results)
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=CSV_FIELDS + [f"{c}_pass" for c in certs],
                        lineterminator="\n")
    wr.writeheader()
    for r in results:
        wr.writerow(_row(r, certs))
    return buf.getvalue()


def to_json(results, summary: dict = None) -> str:
    results = _nonempty(results)
    cells = []
    for r in results:
        cell = {f: getattr(r, f) for f in CSV_FIELDS}
        cell["R"] = float(r.R)
        cell["cert_pass"] = dict(sorted(r.cert_pass.items()))
        cells.append(cell)
    doc = {"cells": cells}
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _nonempty(results) -> list:
    results = list(results)
    if not results:
        raise ReportError("no results to report")
    return results


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def svg_panel(results, case: int, d: int, k: int) -> str:
    """Failed ball recoveries against R, one polyline per n."""
    cells = [r for r in results if (r.case, r.d, r.k) == (case, d, k)]
    if not cells:
        raise ReportError(f"no cells for case={case}, d={d}, k={k}")
    Rs = sorted({float(r.R) for r in cells})
    ns = sorted({r.n for r in cells})
    trials = max(r.trials for r in cells)
    ymax = max(max(r.failed_ball for r in cells), 1)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    r_lo, r_hi = Rs[0], Rs[-1]
    span = (r_hi - r_lo) or 1.0

    def px(R):
        return LEFT + (R - r_lo) / span * pw if len(Rs) > 1 else LEFT + pw / 2

    def py(v):
        return TOP + ph - v / ymax * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT}" y="18" font-size="13">case {case}, d = {d}, k = {k} '
        f'({trials} trials per point)</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for R in Rs:
        x = _fmt(px(R))
        out.append(f'<line x1="{x}" y1="{TOP + ph}" x2="{x}" y2="{TOP + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{TOP + ph + 16}" text-anchor="middle">{_fmt(R)}</text>')
    for t in range(5):
        v = ymax * t / 4
        y = _fmt(py(v))
        out.append(f'<line x1="{LEFT - 4}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 7}" y="{y}" text-anchor="end" dy="4">{_fmt(v)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 8}" text-anchor="middle">R</text>')
    out.append(f'<text x="14" y="{TOP + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {TOP + ph / 2:.0f})">failed ball recoveries</text>')
    for idx, n in enumerate(ns):
        color = PALETTE[idx % len(PALETTE)]
        pts = sorted((float(r.R), r.failed_ball) for r in cells if r.n == n)
        coords = " ".join(f"{_fmt(px(R))},{_fmt(py(v))}" for R, v in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for R, v in pts:
            out.append(f'<circle cx="{_fmt(px(R))}" cy="{_fmt(py(v))}" r="2.5" fill="{color}"/>')
        ly = TOP + 10 + 16 * idx
        out.append(f'<line x1="{LEFT + pw + 14}" y1="{ly}" x2="{LEFT + pw + 34}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{LEFT + pw + 40}" y="{ly + 4}">n = {n}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def panels(results) -> list:
    return sorted({(r.case, r.d, r.k) for r in results})


def svg_name(case: int, d: int, k: int) -> str:
    return f"failed_ball_case{case}_d{d}_k{k}.svg"


def emit_report(results: Iterable, out_dir: str, formats=("csv", "json", "svg"),
                summary: dict = None) -> list:
    """Write the requested formats into ``out_dir``; returns the written paths."""
    results = _nonempty(results)
    bad = set(formats) - {"csv", "json", "svg"}
    if bad:
        raise ReportError(f"unknown report formats {sorted(bad)}")
    os.makedirs(out_dir, exist_ok=True)
    docs = []
    if "csv" in formats:
        docs.append(("results.csv", to_csv(results)))
    if "json" in formats:
        docs.append(("results.json", to_json(results, summary)))
    if "svg" in formats:
        docs.extend((svg_name(*p), svg_panel(results, *p)) for p in panels(results))
    written = []
    for name, text in docs:
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(path)
    return written

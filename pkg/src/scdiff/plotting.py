"""Dependency-free SVG line/scatter rendering for traces and profiles.

Hand-built SVG keeps outputs diffable and testable as plain XML: data
points carry ``data-*`` attributes so tests can read values back out of
the rendered file.
"""

from __future__ import annotations

import math

__all__ = ["render_search_svg", "render_profiles_svg"]

_PANEL_W = 420
_PANEL_H = 300
_MARGIN = 55


class _Scale:
    def __init__(self, values, lo_px: float, hi_px: float):
        finite = [v for v in values if v is not None and math.isfinite(v)]
        if not finite:
            finite = [0.0, 1.0]
        lo, hi = min(finite), max(finite)
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi = lo, hi
        self.lo_px, self.hi_px = lo_px, hi_px

    def __call__(self, v: float) -> float:
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.lo_px + frac * (self.hi_px - self.lo_px)


def _axis(x0: float, y0: float, xscale: _Scale, yscale: _Scale, title: str) -> list[str]:
    x1, y1 = x0 + _PANEL_W, y0 + _PANEL_H
    parts = [
        f'<rect x="{x0}" y="{y0}" width="{_PANEL_W}" height="{_PANEL_H}" '
        'fill="none" stroke="#999"/>',
        f'<text x="{x0 + _PANEL_W / 2:.1f}" y="{y0 - 12}" text-anchor="middle" '
        f'font-size="13">{title}</text>',
        f'<text x="{x0 - 6}" y="{y1:.1f}" text-anchor="end" font-size="10">{yscale.lo:.4g}</text>',
        f'<text x="{x0 - 6}" y="{y0 + 10:.1f}" text-anchor="end" font-size="10">{yscale.hi:.4g}</text>',
        f'<text x="{x0:.1f}" y="{y1 + 14}" text-anchor="middle" font-size="10">{xscale.lo:.4g}</text>',
        f'<text x="{x1:.1f}" y="{y1 + 14}" text-anchor="middle" font-size="10">{xscale.hi:.4g}</text>',
    ]
    return parts


def _polyline(xs, ys, xscale, yscale, color: str) -> str:
    pts = " ".join(f"{xscale(x):.2f},{yscale(y):.2f}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'


def _document(body: list[str], width: int, height: int) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"


def render_search_svg(doc: dict) -> str:
    """Render a search-result document: stage-1 queries with the posterior
    mean curve, and the stage-2 trajectory over iterations."""
    body: list[str] = []
    stage1 = doc.get("stage1") or {}
    queries = stage1.get("queries") or []
    x0, y0 = _MARGIN, _MARGIN

    alphas = [q["alpha"] for q in queries]
    values = [q["value"] for q in queries]
    grid = stage1.get("posterior_grid") or {}
    xs = _Scale(alphas + list(grid.get("alpha") or []), x0, x0 + _PANEL_W)
    ys = _Scale(values + list(grid.get("mean") or []), y0 + _PANEL_H, y0)
    body += _axis(x0, y0, xs, ys, "stage 1: amplification queries + posterior mean")
    if grid.get("alpha"):
        body.append(_polyline(grid["alpha"], grid["mean"], xs, ys, "#1f77b4"))
    for q in queries:
        body.append(
            f'<circle cx="{xs(q["alpha"]):.2f}" cy="{ys(q["value"]):.2f}" r="3.5" '
            f'fill="{"#d62728" if q["phase"] == "acquisition" else "#2ca02c"}" '
            f'data-alpha="{q["alpha"]!r}" data-score="{q["value"]!r}" '
            f'data-phase="{q["phase"]}"/>'
        )

    x1 = _MARGIN + _PANEL_W + 2 * _MARGIN
    stage2 = doc.get("stage2") or {}
    steps = [
        (run_idx, step)
        for run_idx, run in enumerate(stage2.get("runs") or [])
        for step in run.get("steps") or []
    ]
    iters = list(range(len(steps)))
    betas = [s["beta"] for _, s in steps]
    est = [s["objective_estimate"] for _, s in steps]
    xs2 = _Scale(iters or [0, 1], x1, x1 + _PANEL_W)
    ys2 = _Scale(betas, y0 + _PANEL_H, y0)
    body += _axis(x1, y0, xs2, ys2, "stage 2: window-shape trajectory")
    if steps:
        body.append(_polyline(iters, betas, xs2, ys2, "#9467bd"))
        for k, ((run_idx, step), value) in enumerate(zip(steps, est)):
            body.append(
                f'<circle cx="{xs2(k):.2f}" cy="{ys2(step["beta"]):.2f}" r="2" '
                f'fill="#9467bd" data-run="{run_idx}" data-iteration="{step["t"]}" '
                f'data-beta="{step["beta"]!r}" data-estimate="{value!r}"/>'
            )
    width = 2 * _PANEL_W + 4 * _MARGIN
    height = _PANEL_H + 2 * _MARGIN
    return _document(body, width, height)


def render_profiles_svg(series: list[tuple[str, list[float], list[float]]]) -> str:
    """Render labelled (x, y) line series on shared axes."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    x0, y0 = _MARGIN, _MARGIN
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    xs = _Scale(all_x, x0, x0 + _PANEL_W)
    ys = _Scale(all_y, y0 + _PANEL_H, y0)
    body = _axis(x0, y0, xs, ys, "radial profiles")
    for idx, (label, sx, sy) in enumerate(series):
        color = colors[idx % len(colors)]
        if sx:
            body.append(_polyline(sx, sy, xs, ys, color))
        body.append(
            f'<text x="{x0 + 8}" y="{y0 + 16 + 14 * idx}" font-size="11" '
            f'fill="{color}">{label}</text>'
        )
    return _document(body, _PANEL_W + 2 * _MARGIN, _PANEL_H + 2 * _MARGIN)

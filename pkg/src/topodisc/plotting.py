"""Minimal standalone SVG line charts for aggregate rows."""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Sequence

from .harness import AggregateRow

COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 230, 30, 60


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


def _num(v: float) -> str:
    return f"{v:.2f}"


def emit_plot(rows: Sequence[AggregateRow], metric: str, path) -> None:
    """One polyline per algorithm: x = n_common, y = ``metric`` (ettd or mttd)."""
    if metric not in ("ettd", "mttd"):
        raise ValueError(f"metric must be 'ettd' or 'mttd', got {metric!r}")
    pts = [r for r in rows if not math.isnan(getattr(r, metric))]
    if not pts:
        raise ValueError("nothing to plot")
    algs = sorted({r.algorithm for r in pts})
    xs = sorted({r.n_common for r in pts})
    ys = [getattr(r, metric) for r in pts]
    ymax = max(ys) * 1.05 if max(ys) > 0 else 1.0
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        if len(xs) == 1:
            return LEFT + pw / 2
        # log2 spacing suits the doubling grid
        lx = [math.log2(v) for v in xs]
        return LEFT + pw * (math.log2(x) - lx[0]) / (lx[-1] - lx[0])

    def sy(y):
        return TOP + ph * (1 - y / ymax)

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H),
                     viewBox=f"0 0 {W} {H}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(W), height=str(H), fill="white")
    axes = ET.SubElement(svg, "g", {"class": "axes", "stroke": "black", "fill": "none"})
    ET.SubElement(axes, "line", x1=_num(LEFT), y1=_num(TOP + ph), x2=_num(LEFT + pw), y2=_num(TOP + ph))
    ET.SubElement(axes, "line", x1=_num(LEFT), y1=_num(TOP), x2=_num(LEFT), y2=_num(TOP + ph))
    labels = ET.SubElement(svg, "g", {"font-family": "sans-serif", "font-size": "11"})
    for x in xs:
        t = ET.SubElement(labels, "text", {"x": _num(sx(x)), "y": _num(TOP + ph + 16),
                                           "text-anchor": "middle"})
        t.text = str(x)
    for y in _ticks(0, ymax):
        t = ET.SubElement(labels, "text", {"x": _num(LEFT - 6), "y": _num(sy(y) + 4), "text-anchor": "end"})
        t.text = f"{y:g}"
    t = ET.SubElement(labels, "text", {"x": _num(LEFT + pw / 2), "y": _num(H - 20), "text-anchor": "middle"})
    t.text = "number of common channels"
    t = ET.SubElement(labels, "text", {"x": "16", "y": _num(TOP + ph / 2), "text-anchor": "middle",
                                       "transform": f"rotate(-90 16 {_num(TOP + ph / 2)})"})
    t.text = metric.upper() + " (slots)"

    legend = ET.SubElement(svg, "g", {"class": "legend", "font-family": "sans-serif", "font-size": "11"})
    for i, alg in enumerate(algs):
        color = COLORS[i % len(COLORS)]
        series = sorted((r.n_common, getattr(r, metric)) for r in pts if r.algorithm == alg)
        g = ET.SubElement(svg, "g", {"class": "series", "data-algorithm": alg})
        if len(series) > 1:
            ET.SubElement(g, "polyline", fill="none", stroke=color, points=" ".join(
                f"{_num(sx(x))},{_num(sy(y))}" for x, y in series))
            g.set("stroke-width", "1.5")
        for x, y in series:
            ET.SubElement(g, "circle", cx=_num(sx(x)), cy=_num(sy(y)), r="3", fill=color)
        ly = TOP + 10 + 18 * i
        ET.SubElement(legend, "line", x1=_num(W - RIGHT + 15), y1=_num(ly), x2=_num(W - RIGHT + 35),
                      y2=_num(ly), stroke=color)
        t = ET.SubElement(legend, "text", x=_num(W - RIGHT + 40), y=_num(ly + 4))
        t.text = alg
    tree = ET.ElementTree(svg)
    ET.indent(tree)
    tree.write(path, encoding="utf-8", xml_declaration=True)

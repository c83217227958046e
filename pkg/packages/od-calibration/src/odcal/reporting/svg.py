"""Small SVG writer for static report charts.

Coordinates are printed with two decimals so identical inputs give identical
files.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class SvgCanvas:
    width: int = 640
    height: int = 480
    elements: list[str] = field(default_factory=list)

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "#000", dashed: bool = False,
             width: float = 1.0) -> None:
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.elements.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"{dash}/>'
        )

    def polyline(self, points: Sequence[tuple[float, float]], stroke: str, width: float = 2.0) -> None:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def circle(self, x: float, y: float, r: float = 3.0, fill: str = "#1f77b4") -> None:
        self.elements.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}"/>')

    def text(self, x: float, y: float, content: str, size: int = 12, anchor: str = "start",
             rotate: float | None = None) -> None:
        transform = f' transform="rotate({_f(rotate)} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.elements.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{transform}>{escape(content)}</text>'
        )

    def to_string(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">'
        )
        background = f'<rect width="{self.width}" height="{self.height}" fill="#fff"/>'
        return "\n".join([head, background, *self.elements, "</svg>"]) + "\n"

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_string(), encoding="utf-8")
        return path


@dataclass(frozen=True)
class Axes:
    """Maps data coordinates onto a canvas plot area."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    left: float = 70.0
    right: float = 20.0
    top: float = 40.0
    bottom: float = 60.0
    width: int = 640
    height: int = 480

    def px(self, x: float) -> float:
        lo, hi = self.x_range
        return self.left + (x - lo) / (hi - lo) * (self.width - self.left - self.right)

    def py(self, y: float) -> float:
        lo, hi = self.y_range
        return self.height - self.bottom - (y - lo) / (hi - lo) * (self.height - self.top - self.bottom)

    def draw(self, canvas: SvgCanvas, title: str, x_label: str, y_label: str, ticks: int = 5) -> None:
        x0, x1 = self.px(self.x_range[0]), self.px(self.x_range[1])
        y0, y1 = self.py(self.y_range[0]), self.py(self.y_range[1])
        canvas.line(x0, y0, x1, y0)
        canvas.line(x0, y0, x0, y1)
        for v in np.linspace(*self.x_range, ticks + 1):
            canvas.line(self.px(v), y0, self.px(v), y0 + 5)
            canvas.text(self.px(v), y0 + 18, f"{v:.4g}", size=10, anchor="middle")
        for v in np.linspace(*self.y_range, ticks + 1):
            canvas.line(x0 - 5, self.py(v), x0, self.py(v))
            canvas.text(x0 - 8, self.py(v) + 4, f"{v:.4g}", size=10, anchor="end")
        canvas.text(self.width / 2, 24, title, size=14, anchor="middle")
        canvas.text((x0 + x1) / 2, self.height - 18, x_label, anchor="middle")
        canvas.text(18, (y0 + y1) / 2, y_label, anchor="middle", rotate=-90)


def padded_range(values: Sequence[float], floor: float | None = None) -> tuple[float, float]:
    lo, hi = float(min(values)), float(max(values))
    if floor is not None:
        lo = min(lo, floor)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    return lo, hi + 0.05 * (hi - lo)


def line_chart(
    series: dict[str, Sequence[tuple[float, float]]], title: str, x_label: str, y_label: str
) -> SvgCanvas:
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    canvas = SvgCanvas()
    axes = Axes(x_range=padded_range(xs), y_range=padded_range(ys, floor=0.0))
    axes.draw(canvas, title, x_label, y_label)
    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        canvas.polyline([(axes.px(x), axes.py(y)) for x, y in pts], stroke=color)
        legend_y = axes.top + 16 * (i + 1)
        canvas.line(axes.width - 170, legend_y - 4, axes.width - 150, legend_y - 4, stroke=color, width=2.0)
        canvas.text(axes.width - 145, legend_y, name)
    return canvas


def scatter_chart(
    xs: Sequence[float], ys: Sequence[float], title: str, x_label: str, y_label: str
) -> SvgCanvas:
    """Scatter on equal axis ranges with the dashed y = x reference line."""
    canvas = SvgCanvas(width=520, height=520)
    span = padded_range([*xs, *ys], floor=0.0)
    # square plot area: 420 x 420 px
    axes = Axes(x_range=span, y_range=span, right=30.0, width=520, height=520)
    axes.draw(canvas, title, x_label, y_label)
    canvas.line(axes.px(span[0]), axes.py(span[0]), axes.px(span[1]), axes.py(span[1]), stroke="#888", dashed=True)
    for x, y in zip(xs, ys):
        canvas.circle(axes.px(x), axes.py(y))
    return canvas

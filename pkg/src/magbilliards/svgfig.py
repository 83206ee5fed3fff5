"""Minimal deterministic SVG writer.

Just enough of SVG 1.1 for the figures this package emits: fixed-size
canvas, groups, circles, polylines, rectangles, and text.  Coordinates
are formatted with two decimals so identical inputs give byte-identical
files; no timestamps or generator-dependent attributes are written.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

__all__ = ["SvgCanvas"]


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class SvgCanvas:
    def __init__(self, width: float, height: float, background: str | None = "#ffffff"):
        self.width = width
        self.height = height
        self._parts: list[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>\n',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">\n',
        ]
        if background is not None:
            self.rect(0.0, 0.0, width, height, fill=background)

    def desc(self, text: str) -> None:
        self._parts.append(f"<desc>{escape(text)}</desc>\n")

    def group_start(self, **attrs: str) -> None:
        inner = " ".join(f"{k.replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
        self._parts.append(f"<g {inner}>\n" if inner else "<g>\n")

    def group_end(self) -> None:
        self._parts.append("</g>\n")

    def rect(self, x: float, y: float, w: float, h: float, fill: str = "none",
             stroke: str = "none", stroke_width: float = 1.0) -> None:
        self._parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(stroke_width)}"/>\n'
        )

    def circle(self, cx: float, cy: float, r: float, fill: str | None = None) -> None:
        """Dot at (cx, cy); fill inherits from the enclosing group when None."""
        paint = f' fill="{fill}"' if fill is not None else ""
        self._parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}"{paint}/>\n')

    def line(self, x1: float, y1: float, x2: float, y2: float,
             stroke: str = "#000000", stroke_width: float = 1.0) -> None:
        self._parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(stroke_width)}"/>\n'
        )

    def polyline(self, points, stroke: str = "#000000", stroke_width: float = 1.0,
                 fill: str = "none") -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self._parts.append(
            f'<polyline points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}"/>\n'
        )

    def text(self, x: float, y: float, content: str, size: float = 14.0,
             anchor: str = "middle", fill: str = "#000000") -> None:
        self._parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'font-family="sans-serif" text-anchor="{anchor}" fill="{fill}">'
            f"{escape(content)}</text>\n"
        )

    def raw(self, fragment: str) -> None:
        self._parts.append(fragment)

    def tostring(self) -> str:
        return "".join(self._parts) + "</svg>\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(self.tostring(), encoding="utf-8")
        return path

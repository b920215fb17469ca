"""Static SVG picture of a solver run."""

from __future__ import annotations

from .geometry import Box

SIZE = 800
MARGIN = 40


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def emit_svg(result) -> str:
    """Draw ``B0``, ``(5/4) B0``, main-loop boxes by depth, and the output discs.

    Boxes appear only when the run was made with ``record=True``.  The
    output is a pure function of the run, so equal runs give equal bytes.
    """
    grid = result.grid
    W = float(grid.width)
    cx, cy = float(grid.center.re), float(grid.center.im)
    x0, y0 = cx - W / 2, cy - W / 2
    scale = (SIZE - 2 * MARGIN) / W

    def px(x: float) -> float:
        return MARGIN + (x - x0) * scale

    def py(y: float) -> float:
        # SVG y grows downward
        return SIZE - MARGIN - (y - y0) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
    ]
    boxes = set()
    for phase, depth, cells in result.state.events:
        if phase == "main":
            boxes.update(Box(depth, x, y) for x, y in cells)
    deepest = max((b.depth for b in boxes), default=1)
    for b in sorted(boxes):
        bx0, by0, bx1, by1 = (float(v) for v in grid.box_corners(b))
        shade = 230 - int(170 * b.depth / max(deepest, 1))
        out.append(f'<rect x="{_fmt(px(bx0))}" y="{_fmt(py(by1))}" width="{_fmt((bx1 - bx0) * scale)}" '
                   f'height="{_fmt((by1 - by0) * scale)}" fill="rgb({shade},{shade},255)" '
                   f'stroke="gray" stroke-width="0.3"/>')
    w0 = float(grid.query_width)
    for w, colour, name in ((W, "black", "root-box"), (w0, "blue", "query-box")):
        out.append(f'<rect class="{name}" x="{_fmt(px(cx - w / 2))}" y="{_fmt(py(cy + w / 2))}" '
                   f'width="{_fmt(w * scale)}" height="{_fmt(w * scale)}" fill="none" stroke="{colour}"/>')
    for cl in result.clusters:
        zx, zy = float(cl.center.re), float(cl.center.im)
        r = max(float(cl.radius) * scale, 2.0)
        out.append(f'<circle cx="{_fmt(px(zx))}" cy="{_fmt(py(zy))}" r="{_fmt(r)}" fill="none" stroke="red"/>')
        out.append(f'<text x="{_fmt(px(zx) + r + 2)}" y="{_fmt(py(zy) - r - 2)}" font-size="12" '
                   f'fill="red">{cl.multiplicity}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

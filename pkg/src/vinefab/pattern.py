"""Unrolled flat pattern of a fabrication plan as an SVG drawing.

The tube is cut along the c = 0 meridian and unrolled into a rectangle of
width 2*pi*r and height equal to the total tube length, at 1 SVG user unit
per millimeter. x runs along the circumference, y along the axis with the
tube base at the top edge.
"""

from __future__ import annotations

from .fabrication import FabricationPlan
from .formats import fmt9

_STYLE = (
    "rect.outline{fill:none;stroke:#000;stroke-width:0.5}"
    "line.cyl{stroke:#888;stroke-width:0.3;stroke-dasharray:4 3}"
    "line.fold{stroke:#c00;stroke-width:0.3}"
    "circle.pt{fill:#c00;stroke:none}"
    "text.lbl{font-family:sans-serif;font-size:6px;fill:#c00}"
)


def flat_pattern(plan: FabricationPlan) -> str:
    """Render a plan as an SVG document string."""
    w = plan.circumference
    h = plan.total_tube_length
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt9(w)}mm" '
        f'height="{fmt9(h)}mm" viewBox="0 0 {fmt9(w)} {fmt9(h)}">',
        f"<style>{_STYLE}</style>",
        f'<rect class="outline" x="0" y="0" width="{fmt9(w)}" height="{fmt9(h)}"/>',
    ]

    # dashed cylinder boundaries (skip the outline edges at 0 and h)
    boundaries = set()
    for joint, l in zip(plan.joints, plan.cylinders):
        start = joint.axial_start + joint.s_tilde
        boundaries.add(round(start, 9))
        boundaries.add(round(start + l, 9))
    for z in sorted(boundaries):
        if 1e-9 < z < h - 1e-9:
            out.append(f'<line class="cyl" x1="0" y1="{fmt9(z)}" '
                       f'x2="{fmt9(w)}" y2="{fmt9(z)}"/>')

    # joint connection points: two marks on one meridian, joined by a guide line
    for joint in plan.joints:
        if joint.s_tilde <= 0.0:
            continue
        x = fmt9(joint.circumferential)
        y0 = joint.axial_start
        y1 = y0 + joint.s_tilde
        out.append(f'<line class="fold" x1="{x}" y1="{fmt9(y0)}" '
                   f'x2="{x}" y2="{fmt9(y1)}"/>')
        out.append(f'<circle class="pt" cx="{x}" cy="{fmt9(y0)}" r="1.2"/>')
        out.append(f'<circle class="pt" cx="{x}" cy="{fmt9(y1)}" r="1.2"/>')
        out.append(f'<text class="lbl" x="{fmt9(joint.circumferential + 2.5)}" '
                   f'y="{fmt9(y0 + joint.s_tilde / 2.0)}">J{joint.index}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_pattern(plan: FabricationPlan, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(flat_pattern(plan))

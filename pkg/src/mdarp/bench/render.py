"""Static SVG / Graphviz drawings of a plan."""
from __future__ import annotations

import math
import warnings
from pathlib import Path
from xml.sax.saxutils import escape

from ..network import Network
from ..schedule import Plan

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf")
ROUTE_WIDTH = 1.6
PLATOON_WIDTH = 6.0


def grid_layout(net: Network) -> dict[int, tuple[float, float]]:
    """Nodes on a square grid in id order; deterministic and free of any physics."""
    side = math.ceil(math.sqrt(net.n_nodes))
    return {i: (float((i - 1) % side), float((i - 1) // side)) for i in net.nodes}


def _coords(net: Network, coords) -> dict[int, tuple[float, float]]:
    if coords and all(i in coords for i in net.nodes):
        return {i: (float(coords[i][0]), float(coords[i][1])) for i in net.nodes}
    warnings.warn("node coordinates missing or incomplete; using a grid layout", stacklevel=3)
    return grid_layout(net)


def _events(plan: Plan):
    joins, splits = set(), set()
    for seg in plan.platoons.values():
        joins.add(seg.path[0])
        splits.add(seg.path[-1])
    transfers = {t.arc[0] for t in plan.transfers}
    return joins, splits, transfers


def render_svg(plan: Plan, net: Network, coords=None, size: float = 800.0, margin: float = 30.0) -> str:
    pos = _coords(net, coords)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (size - 2 * margin) / span

    def pt(i):
        x, y = pos[i]
        # flip y so north is up
        return f"{margin + (x - min(xs)) * scale:.2f},{size - margin - (y - min(ys)) * scale:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
           f'viewBox="0 0 {size:g} {size:g}">',
           '<g class="network" stroke="#dddddd" stroke-width="0.8">']
    for a, b in sorted(net.arcs):
        pa, pb = pt(a).split(","), pt(b).split(",")
        out.append(f'<line x1="{pa[0]}" y1="{pa[1]}" x2="{pb[0]}" y2="{pb[1]}"/>')
    out.append("</g>")
    out.append('<g class="platoons" fill="none" stroke="#222222" stroke-opacity="0.35" '
               'stroke-linecap="round">')
    for pid, seg in sorted(plan.platoons.items()):
        out.append(f'<polyline class="platoon" data-platoon="{pid}" stroke-width="{PLATOON_WIDTH:g}" '
                   f'points="{" ".join(pt(i) for i in seg.path)}"/>')
    out.append("</g>")
    out.append('<g class="routes" fill="none">')
    for n, k in enumerate(sorted(plan.routes)):
        walk = plan.walk(k)
        if len(walk) < 2:
            continue
        out.append(f'<polyline class="route" data-vehicle="{k}" stroke="{PALETTE[n % len(PALETTE)]}" '
                   f'stroke-width="{ROUTE_WIDTH:g}" points="{" ".join(pt(i) for i in walk)}"/>')
    out.append("</g>")
    joins, splits, transfers = _events(plan)
    out.append('<g class="events">')
    for cls, nodes, fill, r in (("join", joins, "#2ca02c", 5), ("split", splits, "#d62728", 5),
                                ("transfer", transfers, "#ffbf00", 3)):
        for i in sorted(nodes):
            x, y = pt(i).split(",")
            out.append(f'<circle class="{cls}" data-node="{i}" cx="{x}" cy="{y}" r="{r}" '
                       f'fill="{fill}"><title>{escape(cls)} at node {i}</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_dot(plan: Plan, net: Network, coords=None) -> str:
    pos = _coords(net, coords)
    joins, splits, transfers = _events(plan)
    platoon_arcs = {(a, b) for seg in plan.platoons.values() for a, b in zip(seg.path, seg.path[1:])}
    out = ["digraph plan {", '  graph [splines=true, outputorder=edgesfirst];',
           '  node [shape=point, width=0.06];']
    for i in net.nodes:
        attrs = [f'pos="{pos[i][0]:.4f},{pos[i][1]:.4f}!"']
        if i in joins or i in splits or i in transfers:
            role = "/".join(c for c, s in (("join", joins), ("split", splits), ("transfer", transfers))
                            if i in s)
            attrs += ["shape=circle", "width=0.15", f'xlabel="{role}"']
        out.append(f"  {i} [{', '.join(attrs)}];")
    for n, k in enumerate(sorted(plan.routes)):
        walk = plan.walk(k)
        color = PALETTE[n % len(PALETTE)]
        for a, b in zip(walk, walk[1:]):
            width = PLATOON_WIDTH if (a, b) in platoon_arcs else ROUTE_WIDTH
            out.append(f'  {a} -> {b} [color="{color}", penwidth={width:g}, label="{k}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def render_plan(plan: Plan, net: Network, coords=None, fmt: str = "svg",
                path: str | Path | None = None) -> str:
    """Render ``plan``; writes to ``path`` when given and returns the text."""
    if fmt == "svg":
        text = render_svg(plan, net, coords)
    elif fmt == "dot":
        text = render_dot(plan, net, coords)
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'svg' or 'dot'")
    if path is not None:
        Path(path).write_text(text)
    return text

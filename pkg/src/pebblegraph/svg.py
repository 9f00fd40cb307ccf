"""Static SVG storyboard: one frame per object move."""
from __future__ import annotations

from xml.sax.saxutils import escape

from .plan import Action, ManipulationPlan
from .scene import SceneSpec

FRAME_PX = 240
COLUMNS = 4
COLORS = {Action.REACH: "#1f77b4", Action.CARRY: "#d62728", Action.RETRACT: "#2ca02c"}


def _frame(scene: SceneSpec, arrangement: frozenset, triple, title: str) -> list[str]:
    xmin, ymin, xmax, ymax = scene.bounds
    scale = FRAME_PX / max(xmax - xmin, ymax - ymin)

    def tx(x):
        return (x - xmin) * scale

    def ty(y):
        return (ymax - y) * scale

    out = [f'<rect x="0" y="0" width="{tx(xmax):.1f}" height="{ty(ymin):.1f}" '
           'fill="#fafafa" stroke="#444"/>']
    for ob in scene.obstacles:
        pts = " ".join(f"{tx(v.x):.1f},{ty(v.y):.1f}" for v in ob.vertices)
        out.append(f'<polygon points="{pts}" fill="#888"/>')
    r = scene.object_radius * scale
    for p in scene.poses:
        cx, cy = tx(p.position.x), ty(p.position.y)
        fill = "#f2c14e" if p.id in arrangement else "none"
        out.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="{r:.1f}" fill="{fill}" '
                   'stroke="#999" stroke-width="0.8"/>')
        out.append(f'<text x="{cx:.1f}" y="{cy + 3:.1f}" font-size="8" '
                   f'text-anchor="middle">{p.id}</text>')
    for seg in triple:
        pts = " ".join(f"{tx(w.x):.1f},{ty(w.y):.1f}" for w in seg.waypoints)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{COLORS[seg.action]}" '
                   'stroke-width="1.5"/>')
    s = scene.safe_config
    out.append(f'<circle cx="{tx(s.x):.1f}" cy="{ty(s.y):.1f}" r="3" fill="#000"/>')
    out.append(f'<text x="4" y="12" font-size="10">{escape(title)}</text>')
    return out


def storyboard(scene: SceneSpec, plan: ManipulationPlan) -> str:
    """Grid of frames; frame m shows the arrangement before move m and its paths."""
    triples = plan.triples()
    arrs = plan.arrangements()
    frames = [(arrs[m], t, f"move {m + 1}: {t[1].moved[0]} -> {t[1].moved[1]}")
              for m, t in enumerate(triples)]
    frames.append((arrs[-1], [], "final"))
    xmin, ymin, xmax, ymax = scene.bounds
    scale = FRAME_PX / max(xmax - xmin, ymax - ymin)
    fw, fh = (xmax - xmin) * scale + 10, (ymax - ymin) * scale + 10
    cols = min(COLUMNS, len(frames))
    rows = (len(frames) + cols - 1) // cols
    body = []
    for i, (arr, triple, title) in enumerate(frames):
        ox, oy = (i % cols) * fw + 5, (i // cols) * fh + 5
        body.append(f'<g transform="translate({ox:.1f},{oy:.1f})">')
        body.extend(_frame(scene, arr, triple, title))
        body.append("</g>")
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * fw:.0f}" '
            f'height="{rows * fh:.0f}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"

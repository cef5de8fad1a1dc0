"""Figure rendering for projected models.

Two-dimensional projections (one coordination variable plus the cost
variable) are polygons; they are drawn and written as PNG files alongside the
textual reports. Higher-dimensional projections are skipped.
"""

import math
import os

from .oracle import enumerate_vertices


def _ordered_vertices(polytope):
    points = enumerate_vertices(polytope)
    if len(points) < 3:
        return None
    xs = [float(p[polytope.variables[0]]) for p in points]
    ys = [float(p[polytope.variables[1]]) for p in points]
    cx, cy = sum(xs) / len(xs), sum(ys) / len(ys)
    order = sorted(range(len(points)), key=lambda i: math.atan2(ys[i] - cy, xs[i] - cx))
    return [xs[i] for i in order], [ys[i] for i in order]


def render_ep_figures(eps, out_dir, prefix="ep"):
    """One PNG per two-dimensional EP model; returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for ep in eps:
        if len(ep.polytope.variables) != 2:
            continue
        ordered = _ordered_vertices(ep.polytope)
        if ordered is None:
            continue
        xs, ys = ordered
        fig, ax = plt.subplots(figsize=(4.5, 4))
        ax.fill(xs, ys, alpha=0.4, color="tab:blue", edgecolor="tab:blue", linewidth=1.5)
        ax.plot(xs + xs[:1], ys + ys[:1], color="tab:blue", linewidth=1.5)
        ax.set_xlabel(ep.polytope.variables[0])
        ax.set_ylabel(ep.polytope.variables[1])
        ax.set_title(f"Projected model of {ep.owner}")
        ax.grid(True, alpha=0.3)
        path = os.path.join(out_dir, f"{prefix}_{ep.owner}.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths

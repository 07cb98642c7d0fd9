"""Diagram output: Graphviz DOT text and an optional matplotlib picture.

DOT is written by hand (no graphviz dependency).  The PNG path needs
matplotlib, available through the ``png`` extra.
"""

from __future__ import annotations

import math
import re
from typing import Iterable, Sequence

from .gdd import GDD, ShapeKind

__all__ = ["to_dot", "layout", "render_png"]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(items: Iterable[tuple[str, GDD]]) -> str:
    """One undirected graph per ``(tag, gdd)``; labels are q_ii and qt_ij."""
    out = []
    for k, (tag, g) in enumerate(items):
        out.append(f"graph g{k + 1} {{")
        out.append(f"  label={_quote(f'{tag} (order {g.order})')};")
        out.append("  node [shape=circle, width=0.25, fixedsize=false];")
        for i, lab in enumerate(g.vertex_labels):
            out.append(f"  v{i + 1} [label={_quote(str(lab))}];")
        for (i, j), lab in g.edges().items():
            out.append(f"  v{i + 1} -- v{j + 1} [label={_quote(str(lab))}];")
        out.append("}")
    return "\n".join(out) + ("\n" if out else "")


def _circle(order: Sequence[int], n: int) -> list[tuple[float, float]]:
    pos = [(0.0, 0.0)] * n
    for k, v in enumerate(order):
        a = 2 * math.pi * k / len(order) + math.pi / 2
        pos[v] = (math.cos(a), math.sin(a))
    return pos


def _spring(g: GDD, pos, steps: int = 300) -> list[tuple[float, float]]:
    """Deterministic Fruchterman-Reingold relaxation from ``pos``."""
    n = g.n
    k = 1.0 / math.sqrt(n)
    pos = [list(p) for p in pos]
    t = 0.2
    for _ in range(steps):
        disp = [[0.0, 0.0] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                dx, dy = pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]
                d = max(math.hypot(dx, dy), 1e-6)
                f = k * k / d
                if g.qt[i][j]:
                    f -= d * d / k
                disp[i][0] += dx / d * f
                disp[i][1] += dy / d * f
                disp[j][0] -= dx / d * f
                disp[j][1] -= dy / d * f
        for i in range(n):
            d = max(math.hypot(*disp[i]), 1e-9)
            pos[i][0] += disp[i][0] / d * min(d, t)
            pos[i][1] += disp[i][1] / d * min(d, t)
        t *= 0.98
    # mean edge length 1.6, a bit above the chain spacing so labels fit
    lens = [math.dist(pos[i], pos[j]) for (i, j) in g.edges()]
    scale = 1.6 * len(lens) / sum(lens) if lens and sum(lens) > 0 else 1.0
    return [(x * scale, y * scale) for x, y in pos]


def layout(g: GDD) -> list[tuple[float, float]]:
    """Chains on a line, cycles on a circle along the cycle, others by spring relaxation."""
    n = g.n
    shape = g.shape()
    if shape.kind is ShapeKind.CHAIN and shape.walk:
        pos = [(0.0, 0.0)] * n
        for k, v in enumerate(shape.walk):
            pos[v] = (float(k), 0.0)
        return pos
    if shape.kind is ShapeKind.CYCLE and shape.walk:
        # side length 1 on the circle
        r = 1 / (2 * math.sin(math.pi / n))
        return [(r * x, r * y) for x, y in _circle(shape.walk, n)]
    return _spring(g, _circle(range(n), n))


def _tex(text: str) -> str:
    return "$" + re.sub(r"\^(-?\d+)", r"^{\1}", text) + "$"


def _unit(x, y, default):
    d = math.hypot(x, y)
    return (x / d, y / d) if d > 1e-9 else default


def render_png(items: Sequence[tuple[str, GDD]], path, cols: int = 3) -> None:
    """Draw the diagrams in a grid and save to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    items = list(items)
    if not items:
        raise ValueError("nothing to draw")
    cols = max(1, min(cols, len(items)))
    rows = math.ceil(len(items) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.4 * rows), squeeze=False)
    for ax in axes.flat:
        ax.set_axis_off()
    for ax, (tag, g) in zip(axes.flat, items):
        pos = layout(g)
        cx = sum(x for x, _ in pos) / g.n
        cy = sum(y for _, y in pos) / g.n
        for (i, j), lab in g.edges().items():
            (x0, y0), (x1, y1) = pos[i], pos[j]
            ax.plot([x0, x1], [y0, y1], color="0.3", lw=1, zorder=1)
            mx, my = (x0 + x1) / 2, (y0 + y1) / 2
            nx, ny = _unit(y0 - y1, x1 - x0, (0.0, 1.0))
            if (mx - cx) * nx + (my - cy) * ny < -1e-9:
                nx, ny = -nx, -ny
            ax.annotate(_tex(str(lab)), (mx, my), xytext=(7 * nx, 7 * ny), textcoords="offset points",
                        ha="center", va="center", fontsize=7)
        xs, ys = zip(*pos)
        ax.scatter(xs, ys, s=30, color="k", zorder=2)
        for v, ((x, y), lab) in enumerate(zip(pos, g.vertex_labels)):
            nb = g.neighbors(v)
            away = (x - sum(pos[w][0] for w in nb) / len(nb), y - sum(pos[w][1] for w in nb) / len(nb)) if nb else (0, 0)
            if g.shape().kind is ShapeKind.CHAIN:
                away = (0.0, -1.0)
            dx, dy = _unit(*away, (0.0, -1.0))
            ax.annotate(_tex(str(lab)), (x, y), xytext=(10 * dx, 10 * dy), textcoords="offset points",
                        ha="center", va="center", fontsize=7)
        ax.set_title(f"{tag}  (order {g.order})", fontsize=8, pad=12)
        ax.margins(0.2)
        ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

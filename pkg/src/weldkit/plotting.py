"""Render diagrams and invariant tables to image files.

Matplotlib only, Agg backend, file output; nothing interactive.  Arrows are
drawn tail to head, solid for positive crossings and dashed for negative.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle, FancyArrowPatch

from .diagram import HEAD, TAIL, End, GaussDiagram
from .magnus import MilnorTable

_POS_COLOR = "#1f5fa8"
_NEG_COLOR = "#c23b22"


def _endpoint_xy(diagram: GaussDiagram):
    """Lay circles on a row of unit circles; endpoints evenly spaced with the
    basepoint at angle 90 degrees, following orientation clockwise."""
    coords = {}
    centers = []
    for ci, circ in enumerate(diagram.circles):
        cx = ci * 2.6
        centers.append((cx, 0.0))
        L = max(len(circ), 1)
        for p, e in enumerate(circ):
            theta = math.pi / 2 - 2 * math.pi * p / L
            coords[e] = (cx + math.cos(theta), math.sin(theta))
    return coords, centers


def save_diagram_figure(diagram: GaussDiagram, path: str, title: str = "") -> str:
    coords, centers = _endpoint_xy(diagram)
    width = max(3.0, 2.6 * diagram.n + 0.8)
    fig, ax = plt.subplots(figsize=(width, 3.2))
    for i, (cx, cy) in enumerate(centers, start=1):
        ax.add_patch(Circle((cx, cy), 1.0, fill=False, color="0.4", lw=1.2))
        ax.annotate(str(i), (cx, cy - 1.25), ha="center", fontsize=9, color="0.3")
        circ = diagram.circles[i - 1]
        if circ:
            bx, by = coords[circ[0]]
            ax.plot([bx], [by], marker="o", ms=3, color="0.2")
    for a in diagram.arrows:
        tail = coords[End(a.id, TAIL)]
        head = coords[End(a.id, HEAD)]
        style = "-" if a.sign > 0 else (0, (4, 2))
        color = _POS_COLOR if a.sign > 0 else _NEG_COLOR
        rad = 0.25 if a.tail_circle == a.head_circle else 0.12
        ax.add_patch(FancyArrowPatch(
            tail, head, connectionstyle=f"arc3,rad={rad}", arrowstyle="-|>",
            mutation_scale=11, lw=1.1, color=color, linestyle=style,
            shrinkA=2, shrinkB=2))
    ax.set_xlim(-1.5, 2.6 * (diagram.n - 1) + 1.5)
    ax.set_ylim(-1.7, 1.5)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _entry_label(entry) -> str:
    return "".join(str(i) for i in entry.index) + ";" + str(entry.target)


def save_table_figure(table: MilnorTable, path: str, title: str = "") -> str:
    entries = list(table.entries)
    fig_h = max(2.2, 0.28 * len(entries) + 1.2)
    fig, ax = plt.subplots(figsize=(5.0, fig_h))
    if entries:
        labels = [_entry_label(e) for e in entries]
        values = [e.mubar for e in entries]
        ypos = range(len(entries))
        colors = [_POS_COLOR if v >= 0 else _NEG_COLOR for v in values]
        ax.barh(list(ypos), values, color=colors, height=0.6)
        ax.set_yticks(list(ypos))
        ax.set_yticklabels(labels, fontsize=8)
        ax.invert_yaxis()
        ax.axvline(0, color="0.3", lw=0.8)
    ax.set_xlabel("residue" if table.residues else "coefficient", fontsize=9)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_comparison_figure(left: MilnorTable, right: MilnorTable, path: str,
                           names: tuple[str, str] = ("first", "second"),
                           title: str = "") -> str:
    keyed_r = {(e.index, e.target): e for e in right.entries}
    rows = [(e, keyed_r.get((e.index, e.target))) for e in left.entries]
    fig_h = max(2.2, 0.3 * len(rows) + 1.2)
    fig, ax = plt.subplots(figsize=(5.6, fig_h))
    ypos = range(len(rows))
    ax.barh([y + 0.18 for y in ypos], [r[0].mubar for r in rows], height=0.34,
            color=_POS_COLOR, label=names[0])
    ax.barh([y - 0.18 for y in ypos], [r[1].mubar if r[1] else 0 for r in rows],
            height=0.34, color=_NEG_COLOR, label=names[1])
    for y, (le, re) in zip(ypos, rows):
        if re is None or le.mubar != re.mubar:
            ax.annotate("*", (max(le.mubar, re.mubar if re else 0), y),
                        fontsize=12, color="black")
    ax.set_yticks(list(ypos))
    ax.set_yticklabels([_entry_label(r[0]) for r in rows], fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0, color="0.3", lw=0.8)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

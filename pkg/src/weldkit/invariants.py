"""Milnor tables straight from a diagram, without rewriting it first.

Every arc of a component is a conjugate of that component's meridian.  The
conjugating data is pinned down by the head relations along each circle:
walking from the basepoint, the arc after a head equals the arc before it
conjugated by (tail arc)^sign.  Solving this system exactly in the free
group is circular, but in the repetition-free expansion ring the corrections
added by conjugation climb one degree per sweep, so iterating the relations
n times computes every arc's expansion exactly.

The longitude expansion of component j is then the product of the crossed
tail-arc expansions (with signs) times (1 + x_j)^-k, and the Milnor table
falls out by reading coefficients.  This route never applies a single move,
which makes it an independent oracle for the sorting pipeline.
"""

from __future__ import annotations

from .diagram import TAIL, End, GaussDiagram
from .group import ArcStructure
from .magnus import MilnorTable, ReducedPoly, inv, poly_pow, table_from_expansions


def arc_expansions(diagram: GaussDiagram) -> dict[int, ReducedPoly]:
    """Expansion of every arc generator, basepoint arcs mapped to 1 + x_i."""
    arcs = ArcStructure(diagram)
    n = diagram.n
    sign = {a.id: a.sign for a in diagram.arrows}
    values: dict[int, ReducedPoly] = {}
    for i in range(1, n + 1):
        mer = ReducedPoly(n, {(): 1, (i,): 1})
        for arc in arcs.circle_arcs[i - 1]:
            values[arc] = mer

    relations = []  # (prev_arc, tail_arc, sign, next_arc), skipping the wrap
    for i in range(1, n + 1):
        chain = arcs.circle_arcs[i - 1]
        heads = arcs.heads_from(i, 0)
        for r, (pos, e) in enumerate(heads[:-1]):
            tail_arc = arcs.arc_of_tail(End(e.arrow, TAIL))
            relations.append((chain[r], tail_arc, sign[e.arrow], chain[r + 1]))

    for _ in range(n + 1):
        changed = False
        for prev, tail_arc, eps, nxt in relations:
            t = values[tail_arc]
            t_inv = inv(t)
            if eps > 0:
                new = t_inv * values[prev] * t
            else:
                new = t * values[prev] * t_inv
            if new != values[nxt]:
                values[nxt] = new
                changed = True
        if not changed:
            break
    return values


def longitude_expansions(diagram: GaussDiagram) -> list[ReducedPoly]:
    """Expansions of the preferred longitudes, one per component."""
    arcs = ArcStructure(diagram)
    n = diagram.n
    sign = {a.id: a.sign for a in diagram.arrows}
    values = arc_expansions(diagram)
    out = []
    for i in range(1, n + 1):
        acc = ReducedPoly.one(n)
        for _, e in arcs.heads_from(i, 0):
            t = values[arcs.arc_of_tail(End(e.arrow, TAIL))]
            acc = acc * (t if sign[e.arrow] > 0 else inv(t))
        k = sum(a.sign for a in diagram.self_arrows(i))
        acc = acc * poly_pow(ReducedPoly(n, {(): 1, (i,): 1}), -k)
        out.append(acc)
    return out


def diagram_table(diagram: GaussDiagram, max_length: "int | None" = None,
                  residues: bool = True) -> MilnorTable:
    """Milnor table of a diagram via arc resolution (no moves applied)."""
    n = diagram.n
    if max_length is None:
        max_length = n
    if not 1 <= max_length <= n:
        raise ValueError(f"max_length must be in 1..{n}")
    return table_from_expansions(longitude_expansions(diagram), max_length, residues)


def linking_matrix(diagram: GaussDiagram) -> list[list[int]]:
    """lk[i][j] = signed count of arrows from component j+1 to component i+1."""
    lk = [[0] * diagram.n for _ in range(diagram.n)]
    for a in diagram.arrows:
        if a.tail_circle != a.head_circle:
            lk[a.head_circle - 1][a.tail_circle - 1] += a.sign
    return lk

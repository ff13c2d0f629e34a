"""Free-group words, Wirtinger presentations, and peripheral systems.

Words are tuples of nonzero ints: letter +g is generator g, -g its inverse.
Meridian generators are printed ``m1 m2^-1 ...``; arc generators get letter
names a, b, c, ...

The group of a diagram has one generator per arc (maximal circle segment
between two heads; a head-free circle is a single arc) and one relator per
arrow.  At a head of sign e whose arrow tail lies on arc A, with incoming
arc B and outgoing arc C, the relator is C^-1 A^-e B A^e.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .diagram import HEAD, TAIL, End, GaussDiagram

Word = tuple[int, ...]


# -- word operations -----------------------------------------------------------


def free_reduce(word: Word) -> Word:
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def word_inverse(word: Word) -> Word:
    return tuple(-letter for letter in reversed(word))


def word_mul(*words: Word) -> Word:
    out: list[int] = []
    for w in words:
        for letter in w:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
    return tuple(out)


def word_conjugate(word: Word, by: Word) -> Word:
    """by^-1 . word . by"""
    return word_mul(word_inverse(by), word, by)


def word_commutator(u: Word, v: Word) -> Word:
    return word_mul(u, v, word_inverse(u), word_inverse(v))


def word_pow(word: Word, k: int) -> Word:
    base = word if k >= 0 else word_inverse(word)
    out: Word = ()
    for _ in range(abs(k)):
        out = word_mul(out, base)
    return out

def word_erase(word: Word, gen: int) -> Word:
    """Image under killing one generator (the quotient by its normal closure)."""
    return free_reduce(tuple(l for l in word if abs(l) != gen))


def cyclic_reduce(word: Word) -> Word:
    w = free_reduce(word)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def exponent_sum(word: Word, gen: int) -> int:
    return sum(1 if l == gen else -1 for l in word if abs(l) == gen)


def format_word(word: Word, names: "tuple[str, ...] | None" = None) -> str:
    if not word:
        return "1"
    parts = []
    for letter in word:
        name = names[abs(letter) - 1] if names else f"m{abs(letter)}"
        parts.append(name if letter > 0 else f"{name}^-1")
    return " ".join(parts)


def parse_word(text: str, names: "tuple[str, ...] | None" = None) -> Word:
    """Parse ``m2 m1^-1`` style words (or named generators when given)."""
    text = text.strip()
    if not text or text == "1":
        return ()
    index = {}
    if names:
        index = {nm: k + 1 for k, nm in enumerate(names)}
    out = []
    for tok in text.split():
        body, _, exp = tok.partition("^")
        e = int(exp) if exp else 1
        if body in index:
            g = index[body]
        elif body.startswith("m") and body[1:].isdigit():
            g = int(body[1:])
        else:
            raise ValueError(f"unknown generator {body!r}")
        if g < 1:
            raise ValueError(f"bad generator index in {tok!r}")
        out.extend([g if e > 0 else -g] * abs(e))
    return free_reduce(tuple(out))


# -- presentations ---------------------------------------------------------------


@dataclass(frozen=True)
class GroupPresentation:
    """Finite presentation; ``reduced_closure`` marks the additional infinite
    family of relators making every generator commute with its conjugates.
    That family is never enumerated; equality questions in the reduced group
    go through the expansion oracle instead."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]
    reduced_closure: bool = False

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [list(r) for r in self.relators],
            "relators_pretty": [format_word(r, self.generators) for r in self.relators],
            "reduced_closure": self.reduced_closure,
        }


@dataclass(frozen=True)
class PeripheralSystem:
    """Meridian/preferred-longitude pairs over a fixed generating set.

    ``longitudes`` are the corrected preferred longitudes (the reading of the
    heads followed by meridian^-k, k the algebraic self-crossing count).
    """

    n: int
    meridians: tuple[int, ...]
    longitudes: tuple[Word, ...]
    self_counts: tuple[int, ...]
    generators: tuple[str, ...]

    def raw_longitude(self, i: int) -> Word:
        """Longitude without the framing correction (the bare head reading)."""
        mer = self.meridians[i - 1]
        return word_mul(self.longitudes[i - 1],
                        word_pow((mer,), self.self_counts[i - 1]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "generators": list(self.generators),
            "meridians": list(self.meridians),
            "longitudes": [list(w) for w in self.longitudes],
            "longitudes_pretty": [format_word(w, self.generators)
                                  for w in self.longitudes],
            "self_crossing_counts": list(self.self_counts),
        }


def mu_system(longitudes: "list[Word] | tuple[Word, ...]",
              self_counts: "tuple[int, ...] | None" = None) -> PeripheralSystem:
    """Peripheral system over meridian generators m1..mn."""
    n = len(longitudes)
    words = tuple(free_reduce(w) for w in longitudes)
    for w in words:
        for letter in w:
            if not 1 <= abs(letter) <= n:
                raise ValueError(f"letter {letter} out of range for {n} meridians")
    return PeripheralSystem(
        n=n,
        meridians=tuple(range(1, n + 1)),
        longitudes=words,
        self_counts=self_counts or (0,) * n,
        generators=tuple(f"m{i}" for i in range(1, n + 1)),
    )


def _gen_name(k: int) -> str:
    letters = string.ascii_lowercase
    return letters[k] if k < len(letters) else f"g{k + 1}"


class ArcStructure:
    """Arc decomposition of a diagram: arcs are numbered globally 1..N, per
    circle starting with the arc containing the basepoint."""

    def __init__(self, diagram: GaussDiagram):
        self.diagram = diagram
        self.arc_count = 0
        self.circle_arcs: list[list[int]] = []      # per circle, local -> global
        self.gap_arc: list[list[int]] = []          # per circle, gap index -> global arc
        for circ in diagram.circles:
            heads = sum(1 for e in circ if e.role == HEAD)
            local = max(heads, 1)
            base = self.arc_count
            self.circle_arcs.append([base + r + 1 for r in range(local)])
            labels = []
            cur = 0
            for p in range(len(circ)):
                labels.append(cur)
                if circ[p].role == HEAD:
                    cur += 1
            # wrap: the trailing region is the basepoint arc again
            labels = [l % local for l in labels]
            self.gap_arc.append([base + l + 1 for l in labels] or [base + 1])
            self.arc_count += local

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(_gen_name(k) for k in range(self.arc_count))

    def basepoint_arc(self, circle: int) -> int:
        return self.circle_arcs[circle - 1][0]

    def arc_of_tail(self, end: End) -> int:
        c, p = self.diagram.find(end)
        return self.gap_arc[c - 1][p]

    def arcs_at_head(self, circle: int, pos: int) -> tuple[int, int]:
        """(incoming, outgoing) arcs at the head sitting at this position."""
        gaps = self.gap_arc[circle - 1]
        incoming = gaps[pos]
        outgoing = gaps[(pos + 1) % len(gaps)]
        return incoming, outgoing

    def component_of_arc(self, arc: int) -> int:
        for ci, arcs in enumerate(self.circle_arcs, start=1):
            if arc in arcs:
                return ci
        raise KeyError(arc)

    def heads_from(self, circle: int, start_arc_local: int = 0):
        """Heads along a circle in reading order starting after the given arc."""
        circ = self.diagram.circles[circle - 1]
        heads = [(p, e) for p, e in enumerate(circ) if e.role == HEAD]
        k = start_arc_local % max(len(heads), 1) if heads else 0
        return heads[k:] + heads[:k]


def wirtinger(diagram: GaussDiagram) -> GroupPresentation:
    """Wirtinger-type presentation of the diagram group over arc generators."""
    arcs = ArcStructure(diagram)
    sign = {a.id: a.sign for a in diagram.arrows}
    relators = []
    for ci, circ in enumerate(diagram.circles, start=1):
        for p, e in enumerate(circ):
            if e.role != HEAD:
                continue
            alpha = arcs.arc_of_tail(End(e.arrow, TAIL))
            beta, gamma = arcs.arcs_at_head(ci, p)
            eps = sign[e.arrow]
            # C^-1 A^-e B A^e
            rel = free_reduce((-gamma, -eps * alpha, beta, eps * alpha))
            if rel:
                relators.append(rel)
    return GroupPresentation(arcs.names, tuple(relators))


def peripheral_system(diagram: GaussDiagram,
                      basing: "tuple[int, ...] | None" = None
                      ) -> tuple[GroupPresentation, PeripheralSystem]:
    """Presentation plus peripheral system over arc generators.

    ``basing`` optionally picks one arc generator per component; the default
    is each circle's basepoint arc.  The i-th longitude reads, from the
    basing arc along the orientation, (tail arc)^sign at every head, then
    the correction meridian^-k with k the algebraic self-crossing count.
    """
    arcs = ArcStructure(diagram)
    pres = wirtinger(diagram)
    n = diagram.n
    if basing is None:
        basing = tuple(arcs.basepoint_arc(i) for i in range(1, n + 1))
    if len(basing) != n:
        raise ValueError("need one basing arc per component")
    for i, arc in enumerate(basing, start=1):
        if arcs.component_of_arc(arc) != i:
            raise ValueError(f"basing arc {arc} is not on component {i}")
    sign = {a.id: a.sign for a in diagram.arrows}
    longitudes = []
    self_counts = []
    for i in range(1, n + 1):
        local = arcs.circle_arcs[i - 1].index(basing[i - 1])
        word: list[int] = []
        for _, e in arcs.heads_from(i, local):
            alpha = arcs.arc_of_tail(End(e.arrow, TAIL))
            word.append(alpha * sign[e.arrow])
        k = sum(a.sign for a in diagram.self_arrows(i))
        word.extend([-basing[i - 1]] * k if k > 0 else [basing[i - 1]] * (-k))
        longitudes.append(free_reduce(tuple(word)))
        self_counts.append(k)
    system = PeripheralSystem(n, tuple(basing), tuple(longitudes),
                              tuple(self_counts), arcs.names)
    return pres, system


def sorted_longitudes(diagram: GaussDiagram) -> PeripheralSystem:
    """Longitudes of a sorted diagram directly over the meridians m1..mn.

    The j-th head met along circle i contributes m_s^sign where s is the
    circle carrying the arrow's tail; the framing correction m_i^-k is
    applied as in ``peripheral_system``.
    """
    from .diagram import is_sorted

    if not is_sorted(diagram):
        raise ValueError("diagram is not sorted")
    sign = {a.id: a.sign for a in diagram.arrows}
    tail_circle = {a.id: a.tail_circle for a in diagram.arrows}
    longitudes = []
    self_counts = []
    for i, circ in enumerate(diagram.circles, start=1):
        word = [tail_circle[e.arrow] * sign[e.arrow] for e in circ if e.role == HEAD]
        k = sum(a.sign for a in diagram.self_arrows(i))
        word.extend([-i] * k if k > 0 else [i] * (-k))
        longitudes.append(free_reduce(tuple(word)))
        self_counts.append(k)
    return mu_system(longitudes, tuple(self_counts))


def reduced_presentation(system: PeripheralSystem) -> GroupPresentation:
    """Presentation of the reduced group: generators m1..mn, the finite
    relators [m_i, longitude_i], and the symbolic reduction-closure marker."""
    if system.meridians != tuple(range(1, system.n + 1)):
        raise ValueError("reduced presentation needs a system over meridians")
    relators = []
    for i in range(1, system.n + 1):
        rel = word_commutator((i,), system.longitudes[i - 1])
        if rel:
            relators.append(rel)
    return GroupPresentation(system.generators, tuple(relators),
                             reduced_closure=True)


def build_sorted_from_longitudes(n: int, words: "list[Word] | tuple[Word, ...]"
                                 ) -> GaussDiagram:
    """Sorted diagram whose bare head readings are the given (reduced) words.

    Inverse to ``sorted_longitudes`` on the raw readings; self-letters m_i in
    word i become self-arrows, so the corrected longitude differs from the
    input by the framing correction exactly when the input has nonzero
    m_i-exponent.
    """
    if len(words) != n:
        raise ValueError("need one longitude word per component")
    reduced = [free_reduce(w) for w in words]
    signs: dict[int, int] = {}
    tails: list[list[End]] = [[] for _ in range(n)]
    heads: list[list[End]] = [[] for _ in range(n)]
    aid = 0
    for i, word in enumerate(reduced, start=1):
        for letter in word:
            if not 1 <= abs(letter) <= n:
                raise ValueError(f"letter {letter} out of range")
            aid += 1
            signs[aid] = 1 if letter > 0 else -1
            tails[abs(letter) - 1].append(End(aid, TAIL))
            heads[i - 1].append(End(aid, HEAD))
    circles = [tails[i] + heads[i] for i in range(n)]
    return GaussDiagram.build(signs, circles, renumber=False)


# -- abelianization --------------------------------------------------------------


def smith_normal_form(rows: "list[list[int]]") -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix (d1 | d2 | ...)."""
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return []
    nr, nc = len(m), len(m[0])
    diag = []
    top = 0
    while top < min(nr, nc):
        # find smallest nonzero entry in the remaining block
        pivot = None
        for i in range(top, nr):
            for j in range(top, nc):
                if m[i][j] and (pivot is None or abs(m[i][j]) < abs(m[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        m[top], m[i0] = m[i0], m[top]
        for r in m:
            r[top], r[j0] = r[j0], r[top]
        dirty = True
        while dirty:
            dirty = False
            for i in range(top + 1, nr):
                q = m[i][top] // m[top][top]
                if q:
                    for j in range(top, nc):
                        m[i][j] -= q * m[top][j]
                if m[i][top]:
                    m[top], m[i] = m[i], m[top]
                    dirty = True
            for j in range(top + 1, nc):
                q = m[top][j] // m[top][top]
                if q:
                    for i in range(top, nr):
                        m[i][j] -= q * m[i][top]
                if m[top][j]:
                    for i in range(top, nr):
                        m[i][top], m[i][j] = m[i][j], m[i][top]
                    dirty = True
        # divisibility fix-up: pivot must divide the rest of the block
        d = abs(m[top][top])
        for i in range(top + 1, nr):
            for j in range(top + 1, nc):
                if m[i][j] % d:
                    for jj in range(top, nc):
                        m[top][jj] += m[i][jj]
                    dirty = True
                    break
            if dirty:
                break
        if dirty:
            continue
        diag.append(d)
        top += 1
    return diag


def abelianization(pres: GroupPresentation) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion factors > 1) of the abelianized presentation."""
    gens = len(pres.generators)
    rows = []
    for rel in pres.relators:
        row = [0] * gens
        for letter in rel:
            row[abs(letter) - 1] += 1 if letter > 0 else -1
        rows.append(row)
    if not rows:
        return gens, ()
    diag = [d for d in smith_normal_form(rows) if d != 0]
    torsion = tuple(d for d in diag if d > 1)
    return gens - len(diag), torsion

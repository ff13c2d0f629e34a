"""Gauss diagrams for welded links: data model, parsing, braid closures.

A Gauss diagram is a set of ordered, oriented circles decorated with signed
arrows.  Each arrow records one classical crossing: the tail sits on the
over-strand, the head on the under-strand, and the sign is the crossing sign.
Virtual crossings leave no trace at this level, which is the whole point of
working with Gauss diagrams.

Text format ("Gauss code"):

    code      := circle ("/" circle)*
    circle    := token*            -- first token is the basepoint position
    token     := "t" ID | "h" ID ("+"|"-")

Tails are unsigned; the arrow sign rides on the head token only.  Arrow ids
are arbitrary positive integers on input and are densely renumbered 1..m in
order of first appearance when a diagram is constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

TAIL = "t"
HEAD = "h"


class GaussCodeError(ValueError):
    """Raised on malformed Gauss codes or braid words; carries a position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at character {position})"
        super().__init__(message)
        self.position = position


class DiagramError(ValueError):
    """Raised when diagram data violates a structural invariant."""


class End(NamedTuple):
    """One arrow endpoint: (arrow id, role) with role in {'t', 'h'}."""

    arrow: int
    role: str


class Arrow(NamedTuple):
    id: int
    sign: int
    tail_circle: int
    head_circle: int

    @property
    def is_self(self) -> bool:
        return self.tail_circle == self.head_circle


@dataclass(frozen=True)
class GaussDiagram:
    """Immutable Gauss diagram.

    ``circles[i]`` lists the endpoints met along circle i+1 starting at its
    basepoint and following the orientation.  Circles are 1-indexed in the
    public API (component order is part of the data and never canonicalized).
    """

    n: int
    arrows: tuple[Arrow, ...]
    circles: tuple[tuple[End, ...], ...]

    def __post_init__(self):
        if self.n < 0 or len(self.circles) != self.n:
            raise DiagramError(f"expected {self.n} circles, got {len(self.circles)}")
        by_id = {a.id: a for a in self.arrows}
        if len(by_id) != len(self.arrows):
            raise DiagramError("duplicate arrow id")
        seen: dict[End, int] = {}
        for ci, circ in enumerate(self.circles, start=1):
            for e in circ:
                if e.role not in (TAIL, HEAD):
                    raise DiagramError(f"bad endpoint role {e.role!r}")
                if e in seen:
                    raise DiagramError(f"endpoint {e} appears twice")
                seen[e] = ci
        for a in self.arrows:
            if a.sign not in (1, -1):
                raise DiagramError(f"arrow {a.id} has sign {a.sign}")
            for circ_field, role in ((a.tail_circle, TAIL), (a.head_circle, HEAD)):
                if not 1 <= circ_field <= self.n:
                    raise DiagramError(f"arrow {a.id} references circle {circ_field}")
                e = End(a.id, role)
                if seen.get(e) != circ_field:
                    raise DiagramError(f"arrow {a.id}: {role}-endpoint misplaced")
        if len(seen) != 2 * len(self.arrows):
            raise DiagramError("stray endpoint without arrow record")

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def build(signs: dict[int, int], circles: Iterable[Iterable[End]],
              renumber: bool = True) -> "GaussDiagram":
        """Build a diagram from endpoint placement; arrow circles are inferred.

        ``signs`` maps arrow id -> crossing sign.  With ``renumber`` (the
        default) arrow ids are replaced by 1..m in order of first appearance.
        """
        circs = [tuple(c) for c in circles]
        if renumber:
            relabel: dict[int, int] = {}
            for circ in circs:
                for e in circ:
                    if e.arrow not in relabel:
                        relabel[e.arrow] = len(relabel) + 1
            if set(relabel) != set(signs):
                missing = set(signs).symmetric_difference(relabel)
                raise DiagramError(f"arrow ids inconsistent with endpoints: {sorted(missing)}")
            circs = [tuple(End(relabel[e.arrow], e.role) for e in c) for c in circs]
            signs = {relabel[k]: v for k, v in signs.items()}
        tails: dict[int, int] = {}
        heads: dict[int, int] = {}
        for ci, circ in enumerate(circs, start=1):
            for e in circ:
                (tails if e.role == TAIL else heads)[e.arrow] = ci
        arrows = []
        for aid in sorted(signs):
            if aid not in tails or aid not in heads:
                raise DiagramError(f"arrow {aid} is missing a tail or a head")
            arrows.append(Arrow(aid, signs[aid], tails[aid], heads[aid]))
        return GaussDiagram(len(circs), tuple(arrows), tuple(circs))

    def arrow(self, aid: int) -> Arrow:
        for a in self.arrows:
            if a.id == aid:
                return a
        raise KeyError(aid)

    def find(self, end: End) -> tuple[int, int]:
        """Return (circle, position) of an endpoint; circles are 1-indexed."""
        for ci, circ in enumerate(self.circles, start=1):
            for pos, e in enumerate(circ):
                if e == end:
                    return ci, pos
        raise KeyError(end)

    def self_arrows(self, circle: int | None = None) -> list[Arrow]:
        return [a for a in self.arrows
                if a.is_self and (circle is None or a.tail_circle == circle)]

    def rotate(self, offsets: tuple[int, ...]) -> "GaussDiagram":
        """Move each basepoint forward by the given offset (one per circle)."""
        if len(offsets) != self.n:
            raise DiagramError("need one rotation offset per circle")
        circs = []
        for circ, off in zip(self.circles, offsets):
            k = off % len(circ) if circ else 0
            circs.append(circ[k:] + circ[:k])
        return GaussDiagram(self.n, self.arrows, tuple(circs))


# -- text format ---------------------------------------------------------------


def parse_gauss_code(text: str) -> GaussDiagram:
    """Parse a Gauss code; see the module docstring for the grammar."""
    signs: dict[int, int] = {}
    circles: list[list[End]] = [[]]
    seen_ends: set[End] = set()
    pos = 0
    for raw in text.split("\n"):
        for chunk in raw.split():
            at = text.index(chunk, pos)
            pos = at + len(chunk)
            if chunk == "/":
                circles.append([])
                continue
            role = chunk[0]
            if role not in (TAIL, HEAD):
                raise GaussCodeError(f"unknown token {chunk!r}", at)
            body = chunk[1:]
            sign = 0
            if role == HEAD:
                if not body or body[-1] not in "+-":
                    raise GaussCodeError(f"head token {chunk!r} needs a +/- sign", at)
                sign = 1 if body[-1] == "+" else -1
                body = body[:-1]
            if not body.isdigit() or int(body) < 1:
                raise GaussCodeError(f"bad arrow id in token {chunk!r}", at)
            aid = int(body)
            e = End(aid, role)
            if e in seen_ends:
                raise GaussCodeError(f"duplicated {role}-endpoint for arrow {aid}", at)
            seen_ends.add(e)
            if role == HEAD:
                signs[aid] = sign
            circles[-1].append(e)
    for e in seen_ends:
        if End(e.arrow, TAIL) not in seen_ends or End(e.arrow, HEAD) not in seen_ends:
            raise GaussCodeError(f"arrow {e.arrow} is missing a tail or a head")
    return GaussDiagram.build(signs, circles)


def serialize_gauss_code(diagram: GaussDiagram) -> str:
    """Serialize with arrows renumbered by first appearance from the basepoints."""
    relabel: dict[int, int] = {}
    for circ in diagram.circles:
        for e in circ:
            if e.arrow not in relabel:
                relabel[e.arrow] = len(relabel) + 1
    sign = {a.id: a.sign for a in diagram.arrows}
    parts = []
    for circ in diagram.circles:
        tokens = []
        for e in circ:
            if e.role == TAIL:
                tokens.append(f"t{relabel[e.arrow]}")
            else:
                tokens.append(f"h{relabel[e.arrow]}{'+' if sign[e.arrow] > 0 else '-'}")
        parts.append(" ".join(tokens))
    return (" / ".join(parts) if diagram.n > 1 else parts[0] if parts else "").strip()


def diagram_to_json(diagram: GaussDiagram) -> dict:
    return {
        "n": diagram.n,
        "arrows": [
            {"id": a.id, "sign": a.sign, "tail_circle": a.tail_circle,
             "head_circle": a.head_circle}
            for a in diagram.arrows
        ],
        "circles": [
            [{"arrow": e.arrow, "role": e.role} for e in circ]
            for circ in diagram.circles
        ],
    }


def diagram_from_json(data: dict) -> GaussDiagram:
    signs = {a["id"]: a["sign"] for a in data["arrows"]}
    circles = [[End(e["arrow"], e["role"]) for e in circ] for circ in data["circles"]]
    if len(circles) != data["n"]:
        raise DiagramError("circle count does not match n")
    return GaussDiagram.build(signs, circles, renumber=False)


# -- braid closures ------------------------------------------------------------


class BraidWord(NamedTuple):
    """A braid word: strand count plus (generator index, sign) letters."""

    strands: int
    letters: tuple[tuple[int, int], ...]


def parse_braid_word(text: str, strands: int) -> BraidWord:
    """Parse braid tokens like ``s1 s1 s2^-1`` into a BraidWord."""
    letters: list[tuple[int, int]] = []
    pos = 0
    for chunk in text.split():
        at = text.index(chunk, pos)
        pos = at + len(chunk)
        if not chunk.startswith("s"):
            raise GaussCodeError(f"bad braid token {chunk!r}", at)
        body, _, exp = chunk[1:].partition("^")
        if not body.isdigit():
            raise GaussCodeError(f"bad braid token {chunk!r}", at)
        k = int(body)
        e = 1
        if exp:
            try:
                e = int(exp)
            except ValueError:
                raise GaussCodeError(f"bad exponent in {chunk!r}", at) from None
        if not 1 <= k <= strands - 1:
            raise GaussCodeError(f"generator s{k} out of range for {strands} strands", at)
        letters.extend([(k, 1 if e > 0 else -1)] * abs(e))
    return BraidWord(strands, tuple(letters))


def from_braid_closure(braid: BraidWord) -> GaussDiagram:
    """Gauss diagram of the braid closure.

    Convention: for a positive letter s_k the strand entering position k
    passes over the strand entering position k+1 (and they swap positions);
    a negative letter is the mirror.  The arrow runs over-strand to
    under-strand and carries the letter sign.  Closure components are the
    cycles of the braid permutation, ordered by their smallest strand.
    """
    s = braid.strands
    if s < 1:
        raise DiagramError("braid needs at least one strand")
    for k, sign in braid.letters:
        if not 1 <= k <= s - 1:
            raise DiagramError(f"generator s{k} out of range for {s} strands")
        if sign not in (1, -1):
            raise DiagramError("letter signs must be +-1")
    # Trace strands through the word; record each crossing on both strands.
    at = list(range(1, s + 1))          # at[p-1] = strand currently at position p
    visits: dict[int, list[End]] = {i: [] for i in range(1, s + 1)}
    signs: dict[int, int] = {}
    for aid, (k, sign) in enumerate(braid.letters, start=1):
        upper, lower = at[k - 1], at[k]
        over, under = (upper, lower) if sign > 0 else (lower, upper)
        visits[over].append(End(aid, TAIL))
        visits[under].append(End(aid, HEAD))
        signs[aid] = sign
        at[k - 1], at[k] = lower, upper
    # Permutation: strand i re-enters as at-position of i's start... the strand
    # starting at position p exits at position q where at[q-1] == p.
    exit_pos = {at[q - 1]: q for q in range(1, s + 1)}
    seen: set[int] = set()
    circles: list[list[End]] = []
    for start in range(1, s + 1):
        if start in seen:
            continue
        circ: list[End] = []
        p = start
        while True:
            seen.add(p)
            circ.extend(visits[p])
            p = exit_pos[p]
            if p == start:
                break
        circles.append(circ)
    return GaussDiagram.build(signs, circles)


# -- canonical form ------------------------------------------------------------


def _key_string(circles: tuple[tuple[End, ...], ...], sign: dict[int, int]) -> str:
    relabel: dict[int, int] = {}
    tokens: list[str] = []
    for circ in circles:
        for e in circ:
            if e.arrow not in relabel:
                relabel[e.arrow] = len(relabel) + 1
            s = "+" if sign[e.arrow] > 0 else "-"
            tokens.append(f"{e.role}{relabel[e.arrow]}{s}")
        tokens.append("/")
    return " ".join(tokens)


@lru_cache(maxsize=65536)
def canonical_key(diagram: GaussDiagram) -> bytes:
    """Key equal for two diagrams iff they agree up to arrow renumbering and
    basepoint rotation of each circle.

    Minimizes the first-appearance relabelled serialization over all tuples
    of basepoint rotations.  Relabelling couples the circles, so rotations
    are minimized jointly, not per circle.
    """
    sign = {a.id: a.sign for a in diagram.arrows}
    best: str | None = None

    def rec(ci: int, prefix: tuple[tuple[End, ...], ...]):
        nonlocal best
        if ci == diagram.n:
            s = _key_string(prefix, sign)
            if best is None or s < best:
                best = s
            return
        circ = diagram.circles[ci]
        rotations = [circ] if not circ else [circ[k:] + circ[:k] for k in range(len(circ))]
        for rot in rotations:
            rec(ci + 1, prefix + (rot,))

    rec(0, ())
    assert best is not None
    return best.encode()


def is_sorted(diagram: GaussDiagram) -> bool:
    """True iff each circle splits cyclically into a tails-only arc followed
    by a heads-only arc (either arc may be empty)."""
    for circ in diagram.circles:
        roles = [e.role for e in circ]
        # Count cyclic t->h and h->t switches; a split circle has at most one
        # of each.
        switches = sum(1 for i in range(len(roles)) if roles[i] != roles[(i + 1) % len(roles)])
        if switches > 2:
            return False
    return True

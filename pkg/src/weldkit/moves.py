"""Welded move calculus on Gauss diagrams.

Primitive moves: R1-add/del (kinks), R2-add/del (cancelling parallel pairs),
R3 (triangle move), OC (exchange of two adjacent tails; the mirror exchange
of two heads is forbidden), SV-add/del (self-arrow insertion/erasure).
Derived macros: the tail-across-head move (TaH) and the Slide move, which
expand into primitive traces.

Site conventions.  Circle positions are 0-based from the basepoint.  A
"window" (circle, pos) denotes the cyclically adjacent endpoint pair at
positions pos and pos+1 (mod length).  A "gap" g on a circle of length L is
an insertion point before position g, with g = L meaning after the last
endpoint; gap 0 and gap L are the same cyclic gap but place the basepoint
differently.

R3 validity: three windows host the six endpoints of three arrows that
pairwise connect three strands.  The strand carrying two tails is over both
others, the one with two heads is under both, the mixed one sits between;
a cyclic over/under pattern is not realizable.  On top of that role pattern,
the endpoint orders and signs must match a planar triangle of oriented
lines.  The full set of realizable configurations is enumerated from an
explicit coordinate model in ``_r3_signatures`` rather than transcribed by
hand; this encodes the usual orientation/sign constraint on triangle moves.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagram import (
    HEAD,
    TAIL,
    Arrow,
    End,
    GaussDiagram,
    parse_gauss_code,
    serialize_gauss_code,
)

KINDS = ("R1-add", "R1-del", "R2-add", "R2-del", "R3", "OC", "SV-del", "SV-add")


class MoveError(ValueError):
    """Raised when a move instance does not apply to the given diagram."""


@dataclass(frozen=True)
class MoveInstance:
    """One move with its site data (layout documented per kind below).

    R1-del:  (arrow,)
    R1-add:  (circle, gap, sign, order)          order in {"th", "ht"}
    R2-del:  (arrow_a, arrow_b, tcirc, tpos, hcirc, hpos)
    R2-add:  (tcirc, tgap, hcirc, hgap, sign, heads_reversed)
    R3:      (c_top, p_top, c_mid, p_mid, c_bot, p_bot)
    OC:      (circle, pos)
    SV-del:  (arrow,)
    SV-add:  (circle, tail_gap, head_gap, sign, tail_first)
    """

    kind: str
    site: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "site": list(self.site)}

    @staticmethod
    def from_json(data: dict) -> "MoveInstance":
        return MoveInstance(data["kind"], tuple(data["site"]))


@dataclass(frozen=True)
class TraceStep:
    instance: MoveInstance
    result: GaussDiagram
    macro: str | None = None


@dataclass(frozen=True)
class MoveTrace:
    """Replayable move sequence.

    ``rebase`` records basepoint rotations applied to ``initial`` before the
    first move; rotating a basepoint is bookkeeping, not a move, so it is
    metadata rather than a MoveInstance.
    """

    initial: GaussDiagram
    steps: tuple[TraceStep, ...] = ()
    rebase: tuple[int, ...] | None = None

    @property
    def final(self) -> GaussDiagram:
        if self.steps:
            return self.steps[-1].result
        return self.initial.rotate(self.rebase) if self.rebase else self.initial

    def to_jsonl(self) -> str:
        header = {
            "schema": "weldkit.trace/1",
            "initial": serialize_gauss_code(self.initial),
            "rebase": list(self.rebase) if self.rebase else None,
        }
        lines = [json.dumps(header, sort_keys=True)]
        for step in self.steps:
            rec = step.instance.to_json()
            if step.macro:
                rec["macro"] = step.macro
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "MoveTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = json.loads(lines[0])
        initial = parse_gauss_code(header["initial"])
        rebase = tuple(header["rebase"]) if header.get("rebase") else None
        cur = initial.rotate(rebase) if rebase else initial
        steps = []
        for ln in lines[1:]:
            rec = json.loads(ln)
            inst = MoveInstance.from_json(rec)
            cur = apply_move(cur, inst)
            steps.append(TraceStep(inst, cur, rec.get("macro")))
        return MoveTrace(initial, tuple(steps), rebase)


# -- low-level circle surgery ----------------------------------------------


def _as_lists(diagram: GaussDiagram) -> list[list[End]]:
    return [list(c) for c in diagram.circles]


def _rebuild(diagram: GaussDiagram, circles: list[list[End]],
             drop: set[int] = frozenset(),
             new_arrows: Sequence[Arrow] = ()) -> GaussDiagram:
    arrows = tuple(a for a in diagram.arrows if a.id not in drop) + tuple(new_arrows)
    return GaussDiagram(diagram.n, arrows, tuple(tuple(c) for c in circles))


def _window(diagram: GaussDiagram, circle: int, pos: int) -> tuple[End, End]:
    circ = diagram.circles[circle - 1]
    if len(circ) < 2 or not 0 <= pos < len(circ):
        raise MoveError(f"no window at circle {circle} position {pos}")
    return circ[pos], circ[(pos + 1) % len(circ)]


def _remove_ends(circles: list[list[End]], ends: set[End]):
    for i, circ in enumerate(circles):
        circles[i] = [e for e in circ if e not in ends]


def _insert(circles: list[list[End]], circle: int, gap: int, ends: list[End]):
    circ = circles[circle - 1]
    if not 0 <= gap <= len(circ):
        raise MoveError(f"gap {gap} out of range on circle {circle}")
    circles[circle - 1] = circ[:gap] + ends + circ[gap:]


def _next_id(diagram: GaussDiagram) -> int:
    return max((a.id for a in diagram.arrows), default=0) + 1


# -- R3 realizability table --------------------------------------------------


def _r3_signatures() -> frozenset:
    """All realizable triangle configurations, from a planar coordinate model.

    Lines: L1 through (0,1) and (1,0); L2 the y-axis; L3 the x-axis.  Every
    assignment of heights (which line is over which) and directions yields
    one configuration; its signature records, per strand, which of its two
    crossings comes first, plus the three crossing signs.  Crossing sign
    convention: positive iff det(over direction, under direction) > 0.
    """
    lines = {
        1: ((1, -1), ((frozenset((1, 2)), 0.0), (frozenset((1, 3)), 1.0))),
        2: ((0, 1), ((frozenset((2, 3)), 0.0), (frozenset((1, 2)), 1.0))),
        3: ((1, 0), ((frozenset((2, 3)), 0.0), (frozenset((1, 3)), 1.0))),
    }
    sigs = set()
    for top, mid, bot in itertools.permutations((1, 2, 3)):
        name = {
            frozenset((top, mid)): "TM",
            frozenset((top, bot)): "TB",
            frozenset((mid, bot)): "MB",
        }
        height = {top: 2, mid: 1, bot: 0}
        for sgn in itertools.product((1, -1), repeat=3):
            direction = {k: (sgn[k - 1] * lines[k][0][0], sgn[k - 1] * lines[k][0][1])
                         for k in (1, 2, 3)}

            def first_crossing(k: int):
                (ca, ta), (cb, tb) = lines[k][1]
                if sgn[k - 1] > 0:
                    return ca if ta < tb else cb
                return ca if ta > tb else cb

            def cross_sign(pair: frozenset):
                i, j = sorted(pair, key=lambda q: -height[q])
                do, du = direction[i], direction[j]
                return 1 if do[0] * du[1] - do[1] * du[0] > 0 else -1

            sigs.add((
                name[first_crossing(top)],
                name[first_crossing(mid)],
                name[first_crossing(bot)],
                cross_sign(frozenset((top, mid))),
                cross_sign(frozenset((top, bot))),
                cross_sign(frozenset((mid, bot))),
            ))
    return frozenset(sigs)


R3_SIGNATURES = _r3_signatures()


def _r3_analyze(diagram: GaussDiagram, site: tuple):
    """Classify an R3 site; returns (windows, signature) or raises MoveError."""
    if len(site) != 6:
        raise MoveError("R3 site needs three (circle, pos) windows")
    wins = [(site[0], site[1]), (site[2], site[3]), (site[4], site[5])]
    slots = set()
    for c, p in wins:
        if not 1 <= c <= diagram.n:
            raise MoveError(f"circle {c} out of range")
        L = len(diagram.circles[c - 1])
        if L < 2:
            raise MoveError("window on a circle with fewer than two endpoints")
        slots.update({(c, p % L), (c, (p + 1) % L)})
    if len(slots) != 6:
        raise MoveError("R3 windows overlap")
    pairs = [_window(diagram, c, p) for c, p in wins]
    by_roles = {}
    for win, (e1, e2) in zip(wins, pairs):
        roles = (e1.role, e2.role)
        key = "top" if roles == (TAIL, TAIL) else "bot" if roles == (HEAD, HEAD) else "mid"
        if key in by_roles:
            raise MoveError("R3 corners must be one tail-tail, one mixed, one head-head")
        by_roles[key] = (win, (e1, e2))
    if set(by_roles) != {"top", "mid", "bot"}:
        raise MoveError("R3 corners must be one tail-tail, one mixed, one head-head")

    def arrows_of(corner):
        return {e.arrow for e in by_roles[corner][1]}

    tm = arrows_of("top") & arrows_of("mid")
    tb = arrows_of("top") & arrows_of("bot")
    mb = arrows_of("mid") & arrows_of("bot")
    if not (len(tm) == len(tb) == len(mb) == 1):
        raise MoveError("R3 arrows do not form a triangle")
    tm, tb, mb = tm.pop(), tb.pop(), mb.pop()
    if len({tm, tb, mb}) != 3:
        raise MoveError("R3 arrows do not form a triangle")
    # Role placement within the triangle.
    mid_ends = dict(((e.arrow, e.role) for e in by_roles["mid"][1]))
    if mid_ends.get(tm) != HEAD or mid_ends.get(mb) != TAIL:
        raise MoveError("R3 middle strand must carry the head of the top arrow "
                        "and the tail of the bottom arrow")
    sign = {a.id: a.sign for a in diagram.arrows}
    sig = (
        "TM" if by_roles["top"][1][0].arrow == tm else "TB",
        "TM" if by_roles["mid"][1][0].arrow == tm else "MB",
        "TB" if by_roles["bot"][1][0].arrow == tb else "MB",
        sign[tm], sign[tb], sign[mb],
    )
    windows = {k: by_roles[k][0] for k in ("top", "mid", "bot")}
    return windows, sig


# -- apply -------------------------------------------------------------------


def apply_move(diagram: GaussDiagram, inst: MoveInstance) -> GaussDiagram:
    """Apply one primitive move; raises MoveError with a reason if invalid."""
    kind, site = inst.kind, inst.site
    if kind == "R1-del":
        (aid,) = site
        a = _arrow_or_error(diagram, aid)
        if not a.is_self:
            raise MoveError(f"arrow {aid} is not a self-arrow")
        c = a.tail_circle
        circ = diagram.circles[c - 1]
        pt = circ.index(End(aid, TAIL))
        ph = circ.index(End(aid, HEAD))
        L = len(circ)
        if (pt + 1) % L != ph and (ph + 1) % L != pt:
            raise MoveError(f"endpoints of arrow {aid} are not adjacent")
        circles = _as_lists(diagram)
        _remove_ends(circles, {End(aid, TAIL), End(aid, HEAD)})
        return _rebuild(diagram, circles, drop={aid})

    if kind == "R1-add":
        circle, gap, sign, order = site
        _check_sign(sign)
        if order not in ("th", "ht"):
            raise MoveError(f"bad R1 order {order!r}")
        aid = _next_id(diagram)
        ends = [End(aid, TAIL), End(aid, HEAD)]
        if order == "ht":
            ends.reverse()
        circles = _as_lists(diagram)
        _insert(circles, circle, gap, ends)
        return _rebuild(diagram, circles, new_arrows=[Arrow(aid, sign, circle, circle)])

    if kind == "R2-del":
        a, b, tcirc, tpos, hcirc, hpos = site
        arr_a = _arrow_or_error(diagram, a)
        arr_b = _arrow_or_error(diagram, b)
        if a == b or arr_a.sign != -arr_b.sign:
            raise MoveError("R2 pair must be two distinct arrows of opposite signs")
        tw = _window(diagram, tcirc, tpos)
        hw = _window(diagram, hcirc, hpos)
        if {e for e in tw} != {End(a, TAIL), End(b, TAIL)}:
            raise MoveError("tail window does not hold the two tails")
        if {e for e in hw} != {End(a, HEAD), End(b, HEAD)}:
            raise MoveError("head window does not hold the two heads")
        circles = _as_lists(diagram)
        _remove_ends(circles, {End(a, TAIL), End(b, TAIL), End(a, HEAD), End(b, HEAD)})
        return _rebuild(diagram, circles, drop={a, b})

    if kind == "R2-add":
        tcirc, tgap, hcirc, hgap, sign, heads_reversed = site
        _check_sign(sign)
        if (tcirc, tgap) == (hcirc, hgap):
            raise MoveError("R2 insertion needs two distinct gaps")
        x = _next_id(diagram)
        y = x + 1
        tails = [End(x, TAIL), End(y, TAIL)]
        heads = [End(x, HEAD), End(y, HEAD)]
        if heads_reversed:
            heads.reverse()
        circles = _as_lists(diagram)
        # Same-circle double insertion: do the larger gap first so indices hold.
        ops = [(tcirc, tgap, tails), (hcirc, hgap, heads)]
        ops.sort(key=lambda t: (t[0], -t[1]))
        for c, g, ends in ops:
            _insert(circles, c, g, ends)
        return _rebuild(diagram, circles, new_arrows=[
            Arrow(x, sign, tcirc, hcirc), Arrow(y, -sign, tcirc, hcirc)])

    if kind == "R3":
        windows, sig = _r3_analyze(diagram, site)
        if sig not in R3_SIGNATURES:
            raise MoveError(f"R3 configuration {sig} is not realizable")
        circles = _as_lists(diagram)
        for c, p in windows.values():
            circ = circles[c - 1]
            q = (p + 1) % len(circ)
            circ[p], circ[q] = circ[q], circ[p]
        return _rebuild(diagram, circles)

    if kind == "OC":
        circle, pos = site
        e1, e2 = _window(diagram, circle, pos)
        if e1.role != TAIL or e2.role != TAIL:
            raise MoveError("OC exchanges two adjacent tails only")
        circles = _as_lists(diagram)
        circ = circles[circle - 1]
        q = (pos + 1) % len(circ)
        circ[pos], circ[q] = circ[q], circ[pos]
        return _rebuild(diagram, circles)

    if kind == "SV-del":
        (aid,) = site
        a = _arrow_or_error(diagram, aid)
        if not a.is_self:
            raise MoveError(f"arrow {aid} is not a self-arrow")
        circles = _as_lists(diagram)
        _remove_ends(circles, {End(aid, TAIL), End(aid, HEAD)})
        return _rebuild(diagram, circles, drop={aid})

    if kind == "SV-add":
        circle, tail_gap, head_gap, sign, tail_first = site
        _check_sign(sign)
        aid = _next_id(diagram)
        circles = _as_lists(diagram)
        if tail_gap == head_gap:
            ends = [End(aid, TAIL), End(aid, HEAD)]
            if not tail_first:
                ends.reverse()
            _insert(circles, circle, tail_gap, ends)
        else:
            ops = sorted([(tail_gap, End(aid, TAIL)), (head_gap, End(aid, HEAD))],
                         key=lambda t: -t[0])
            for g, e in ops:
                _insert(circles, circle, g, [e])
        return _rebuild(diagram, circles, new_arrows=[Arrow(aid, sign, circle, circle)])

    raise MoveError(f"unknown move kind {kind!r}")


def _arrow_or_error(diagram: GaussDiagram, aid: int) -> Arrow:
    try:
        return diagram.arrow(aid)
    except KeyError:
        raise MoveError(f"no arrow {aid}") from None


def _check_sign(sign: int):
    if sign not in (1, -1):
        raise MoveError(f"sign must be +-1, got {sign}")


# -- enumerate ----------------------------------------------------------------


def enumerate_moves(diagram: GaussDiagram,
                    kinds: Iterable[str] | None = None) -> list[MoveInstance]:
    """All applicable instances of the requested kinds.

    Deletion and exchange moves are enumerated exhaustively; insertion moves
    per position over their bounded parameter sets.
    """
    wanted = set(KINDS if kinds is None else kinds)
    unknown = wanted - set(KINDS)
    if unknown:
        raise MoveError(f"unknown move kinds {sorted(unknown)}")
    out: list[MoveInstance] = []
    sign = {a.id: a.sign for a in diagram.arrows}
    pos_of = {}
    for ci, circ in enumerate(diagram.circles, start=1):
        for p, e in enumerate(circ):
            pos_of[e] = (ci, p)

    def adjacent_windows(e1: End, e2: End) -> list[tuple[int, int]]:
        """Window starts where e1, e2 sit cyclically adjacent (either order)."""
        c1, p1 = pos_of[e1]
        c2, p2 = pos_of[e2]
        if c1 != c2:
            return []
        L = len(diagram.circles[c1 - 1])
        wins = []
        if (p1 + 1) % L == p2:
            wins.append((c1, p1))
        if (p2 + 1) % L == p1:
            wins.append((c1, p2))
        return wins

    if "R1-del" in wanted or "SV-del" in wanted:
        for a in diagram.arrows:
            if not a.is_self:
                continue
            if "SV-del" in wanted:
                out.append(MoveInstance("SV-del", (a.id,)))
            if "R1-del" in wanted and adjacent_windows(End(a.id, TAIL), End(a.id, HEAD)):
                out.append(MoveInstance("R1-del", (a.id,)))

    if "R2-del" in wanted:
        for a, b in itertools.combinations(diagram.arrows, 2):
            if a.sign != -b.sign:
                continue
            tws = adjacent_windows(End(a.id, TAIL), End(b.id, TAIL))
            hws = adjacent_windows(End(a.id, HEAD), End(b.id, HEAD))
            for (tc, tp), (hc, hp) in itertools.product(tws, hws):
                if (tc, tp) == (hc, hp):
                    continue
                out.append(MoveInstance("R2-del", (a.id, b.id, tc, tp, hc, hp)))

    if "OC" in wanted:
        for ci, circ in enumerate(diagram.circles, start=1):
            L = len(circ)
            if L < 2:
                continue
            for p in range(L):
                if L == 2 and p == 1:
                    break  # both windows of a 2-cycle are the same exchange
                if circ[p].role == TAIL and circ[(p + 1) % L].role == TAIL:
                    out.append(MoveInstance("OC", (ci, p)))

    if "R3" in wanted:
        wins = []
        for ci, circ in enumerate(diagram.circles, start=1):
            L = len(circ)
            if L < 2:
                continue
            for p in range(L):
                if circ[p].arrow != circ[(p + 1) % L].arrow:
                    wins.append((ci, p))
        for combo in itertools.combinations(wins, 3):
            site = tuple(x for w in combo for x in w)
            try:
                _, sig = _r3_analyze(diagram, site)
            except MoveError:
                continue
            if sig in R3_SIGNATURES:
                out.append(MoveInstance("R3", site))

    if "R1-add" in wanted:
        for ci, circ in enumerate(diagram.circles, start=1):
            for gap in range(len(circ) + 1):
                for s in (1, -1):
                    for order in ("th", "ht"):
                        out.append(MoveInstance("R1-add", (ci, gap, s, order)))

    if "SV-add" in wanted:
        for ci, circ in enumerate(diagram.circles, start=1):
            gaps = range(len(circ) + 1)
            for tg, hg in itertools.product(gaps, gaps):
                for s in (1, -1):
                    if tg == hg:
                        for tail_first in (True, False):
                            out.append(MoveInstance("SV-add", (ci, tg, hg, s, tail_first)))
                    else:
                        out.append(MoveInstance("SV-add", (ci, tg, hg, s, True)))

    if "R2-add" in wanted:
        sites = [(ci, g) for ci, circ in enumerate(diagram.circles, start=1)
                 for g in range(len(circ) + 1)]
        for tsite, hsite in itertools.product(sites, sites):
            if tsite == hsite:
                continue
            for s in (1, -1):
                for rev in (False, True):
                    out.append(MoveInstance(
                        "R2-add", (tsite[0], tsite[1], hsite[0], hsite[1], s, rev)))

    return out


# -- inverses -----------------------------------------------------------------


def invert_instance(inst: MoveInstance, before: GaussDiagram,
                    after: GaussDiagram) -> MoveInstance:
    """Instance undoing ``inst`` on ``after``.

    Raises MoveError for deletion windows that wrap past a basepoint, where
    the restoring insertion is not expressible as a single-gap instance.
    """
    kind, site = inst.kind, inst.site
    if kind in ("R1-add", "SV-add"):
        aid = _next_id(before)
        return MoveInstance("R1-del" if kind == "R1-add" else "SV-del", (aid,))
    if kind == "R2-add":
        x = _next_id(before)
        y = x + 1
        tw = _pick_window(after, End(x, TAIL), End(y, TAIL))
        hw = _pick_window(after, End(x, HEAD), End(y, HEAD))
        return MoveInstance("R2-del", (x, y, tw[0], tw[1], hw[0], hw[1]))
    if kind == "R3":
        return inst
    if kind == "OC":
        return inst
    if kind in ("R1-del", "SV-del"):
        (aid,) = site
        a = before.arrow(aid)
        c = a.tail_circle
        circ = before.circles[c - 1]
        pt = circ.index(End(aid, TAIL))
        ph = circ.index(End(aid, HEAD))
        lo, hi = min(pt, ph), max(pt, ph)
        if kind == "R1-del":
            if hi != lo + 1:
                raise MoveError("kink wraps the basepoint; cannot invert as one gap")
            return MoveInstance("R1-add",
                                (c, lo, a.sign, "th" if pt < ph else "ht"))
        tg = pt - (1 if ph < pt else 0)
        hg = ph - (1 if pt < ph else 0)
        return MoveInstance("SV-add", (c, tg, hg, a.sign, pt < ph))
    if kind == "R2-del":
        aid, bid, tcirc, tpos, hcirc, hpos = site
        a = before.arrow(aid)
        tw = _window(before, tcirc, tpos)
        hw = _window(before, hcirc, hpos)
        Lt = len(before.circles[tcirc - 1])
        Lh = len(before.circles[hcirc - 1])
        if (tpos + 1) % Lt != tpos + 1 or (hpos + 1) % Lh != hpos + 1:
            raise MoveError("pair window wraps the basepoint; cannot invert as one gap")
        # Gap positions once all four endpoints are gone.
        removed_before = lambda circle, p: sum(
            1 for q in _positions(before, circle, {End(aid, TAIL), End(bid, TAIL),
                                                   End(aid, HEAD), End(bid, HEAD)})
            if q < p)
        tgap = tpos - removed_before(tcirc, tpos)
        hgap = hpos - removed_before(hcirc, hpos)
        if (tcirc, tgap) == (hcirc, hgap):
            raise MoveError("nested pair windows collapse to one gap; "
                            "cannot invert as a single R2 insertion")
        first_tail = tw[0].arrow
        first_head = hw[0].arrow
        sign = before.arrow(first_tail).sign
        heads_reversed = first_head != first_tail
        return MoveInstance("R2-add", (tcirc, tgap, hcirc, hgap, sign, heads_reversed))
    raise MoveError(f"cannot invert kind {kind!r}")


def _positions(diagram: GaussDiagram, circle: int, ends: set[End]) -> list[int]:
    return [p for p, e in enumerate(diagram.circles[circle - 1]) if e in ends]


def _pick_window(diagram: GaussDiagram, e1: End, e2: End) -> tuple[int, int]:
    c1, p1 = diagram.find(e1)
    c2, p2 = diagram.find(e2)
    if c1 != c2:
        raise MoveError("endpoints on different circles")
    L = len(diagram.circles[c1 - 1])
    if (p1 + 1) % L == p2:
        return (c1, p1)
    if (p2 + 1) % L == p1:
        return (c1, p2)
    raise MoveError("endpoints not adjacent")


# -- macros: Slide and tail-across-head ---------------------------------------


@dataclass(frozen=True)
class SlideSite:
    """Site of a Slide: an R3 triangle whose top-bottom arrow travels with a
    cancelling partner (opposite sign, tails adjacent, heads adjacent)."""

    windows: tuple  # (c_top, p_top, c_mid, p_mid, c_bot, p_bot)
    partner: int    # arrow id of the cancelling companion of the TB arrow


def apply_slide(diagram: GaussDiagram, site: SlideSite) -> MoveTrace:
    """Expand a Slide into its primitive trace (a validated triangle move)."""
    windows, sig = _r3_analyze(diagram, site.windows)
    if sig not in R3_SIGNATURES:
        raise MoveError(f"Slide site has unrealizable triangle configuration {sig}")
    top = _window(diagram, *windows["top"])
    bot = _window(diagram, *windows["bot"])
    tb = ({e.arrow for e in top} & {e.arrow for e in bot}).pop()
    partner = _arrow_or_error(diagram, site.partner)
    sliding = diagram.arrow(tb)
    if partner.sign != -sliding.sign:
        raise MoveError("Slide partner must cancel the sliding arrow")

    def _beside(p_end: End, window: tuple[End, End]):
        # the companion end rides next to the corner: adjacent to one of the
        # two window endpoints (before a slide it hugs the sliding arrow,
        # after a slide it brackets the corner)
        for e in window:
            try:
                _pick_window(diagram, p_end, e)
                return
            except MoveError:
                continue
        raise MoveError("Slide partner does not travel beside the corner")

    _beside(End(site.partner, TAIL), top)
    _beside(End(site.partner, HEAD), bot)
    inst = MoveInstance("R3", site.windows)
    result = apply_move(diagram, inst)
    return MoveTrace(diagram, (TraceStep(inst, result, macro="slide"),))


def apply_tah(diagram: GaussDiagram, circle: int, pos: int) -> MoveTrace:
    """Tail-across-head: exchange the adjacent tail/head pair at (pos, pos+1).

    The exchange is paid for by a fresh cancelling arrow pair running from
    beside the existing arrow tail to beside the existing arrow head: an R2
    addition followed by a Slide.  Writing e for the sign of the arrow whose
    head is at the site, the pair ends up bracketing the crossed head with
    signs (e, -e) when a tail moves left across the head, and (-e, e) in the
    other direction; this is exactly what keeps the group presentation and
    longitudes unchanged.
    """
    circ = diagram.circles[circle - 1]
    if not 0 <= pos < len(circ) - 1:
        raise MoveError("tail-across-head site must be a linear adjacent pair")
    e1, e2 = circ[pos], circ[pos + 1]
    if {e1.role, e2.role} != {TAIL, HEAD}:
        raise MoveError("site must pair one tail with one head")
    if e1.arrow == e2.arrow:
        raise MoveError("tail and head of the same arrow form a kink, not this site")
    tail_end = e1 if e1.role == TAIL else e2
    head_end = e1 if e1.role == HEAD else e2
    a = diagram.arrow(head_end.arrow)       # its head is crossed
    c = diagram.arrow(tail_end.arrow)       # its tail is crossed
    eps = a.sign
    # Required final signs around c's head: (before, after).
    want = (eps, -eps) if e1.role == TAIL else (-eps, eps)

    t_a = End(a.id, TAIL)
    h_c = End(c.id, HEAD)
    ta_circle, _ = diagram.find(t_a)
    hc_circle, _ = diagram.find(h_c)
    x = _next_id(diagram)
    y = x + 1

    attempts = []
    for first_sign in (want[0], -want[0]):
        for tside in (0, 1):          # insert tails before / after a's tail
            for hside in (0, 1):      # insert heads before / after c's head
                for rev in (False, True):
                    attempts.append((first_sign, tside, hside, rev))
    for first_sign, tside, hside, rev in attempts:
        _, ta_pos = diagram.find(t_a)
        _, hc_pos = diagram.find(h_c)
        add = MoveInstance("R2-add", (ta_circle, ta_pos + tside,
                                      hc_circle, hc_pos + hside, first_sign, rev))
        try:
            d1 = apply_move(diagram, add)
        except MoveError:
            continue
        site_c, site_p = d1.find(e1)
        for pid in (x, y):
            try:
                top = _pick_window(d1, End(pid, TAIL), t_a)
                bot = _pick_window(d1, End(pid, HEAD), h_c)
            except MoveError:
                continue
            windows = top + (site_c, site_p) + bot
            r3 = MoveInstance("R3", windows)
            try:
                d2 = apply_move(d1, r3)
            except MoveError:
                continue
            if not _tah_brackets_ok(d2, h_c, {x, y}, want):
                continue
            c2, p2 = d2.find(e2)
            circ2 = d2.circles[c2 - 1]
            if c2 != circle or circ2[(p2 + 1) % len(circ2)] != e1:
                continue
            return MoveTrace(diagram, (
                TraceStep(add, d1, macro="tah"),
                TraceStep(r3, d2, macro="tah"),
            ))
    raise MoveError("no realizable tail-across-head expansion at this site")


def _tah_brackets_ok(diagram: GaussDiagram, h_c: End, pair: set[int],
                     want: tuple[int, int]) -> bool:
    c, p = diagram.find(h_c)
    circ = diagram.circles[c - 1]
    L = len(circ)
    before, after = circ[(p - 1) % L], circ[(p + 1) % L]
    if before.arrow not in pair or after.arrow not in pair or before.arrow == after.arrow:
        return False
    if before.role != HEAD or after.role != HEAD:
        return False
    sign = {a.id: a.sign for a in diagram.arrows}
    return (sign[before.arrow], sign[after.arrow]) == want


# -- sorting -------------------------------------------------------------------


def _inversions(circ: Sequence[End]) -> int:
    heads_seen = 0
    inv = 0
    for e in circ:
        if e.role == HEAD:
            heads_seen += 1
        else:
            inv += heads_seen
    return inv


def _best_rotation(circ: Sequence[End]) -> int:
    if not circ:
        return 0
    best, best_inv = 0, _inversions(circ)
    for k in range(1, len(circ)):
        inv = _inversions(circ[k:] + circ[:k])
        if inv < best_inv:
            best, best_inv = k, inv
    return best


def sort_diagram(diagram: GaussDiagram) -> tuple[GaussDiagram, MoveTrace]:
    """Sort to tails-then-heads form on every circle.

    Per circle in ascending order: delete its self-arrows (SV), then bubble
    remaining tails leftward across heads with tail-across-head macros.  The
    companion arrows spawned by a macro never land on the circle being
    sorted, and they land inside the tail/head blocks of already-sorted
    circles, so earlier work is never undone.  Basepoints are first rotated
    to the inversion-minimal position, recorded as trace metadata.
    """
    offsets = tuple(_best_rotation(c) for c in diagram.circles)
    current = diagram.rotate(offsets) if any(offsets) else diagram
    steps: list[TraceStep] = []
    for i in range(1, diagram.n + 1):
        for aid in sorted(a.id for a in current.self_arrows(i)):
            inst = MoveInstance("SV-del", (aid,))
            current = apply_move(current, inst)
            steps.append(TraceStep(inst, current))
        while True:
            circ = current.circles[i - 1]
            site = next((p for p in range(len(circ) - 1)
                         if circ[p].role == HEAD and circ[p + 1].role == TAIL), None)
            if site is None:
                break
            sub = apply_tah(current, i, site)
            steps.extend(sub.steps)
            current = sub.final
    trace = MoveTrace(diagram, tuple(steps),
                      offsets if any(offsets) else None)
    return current, trace


# -- trace verification ---------------------------------------------------------


def check_trace(trace: MoveTrace) -> int | None:
    """Replay a trace; None if every step applies and reproduces its recorded
    successor, else the index of the first failing step."""
    try:
        cur = trace.initial.rotate(trace.rebase) if trace.rebase else trace.initial
    except Exception:
        return 0
    for idx, step in enumerate(trace.steps):
        try:
            nxt = apply_move(cur, step.instance)
        except MoveError:
            return idx
        if nxt != step.result:
            return idx
        cur = nxt
    return None


def verify_trace(trace: MoveTrace) -> bool:
    return check_trace(trace) is None

"""Deciding equivalence of reduced peripheral systems.

Two systems over meridians are equivalent exactly when, per component, the
longitudes can be matched by (1) conjugating, (2) multiplying by a product
of conjugates of the component's own meridian, and (3) word moves that hold
in the reduced group: free cancellation, commuting a meridian past one of
its own conjugates, and conjugating a meridian letter by a representative of
its longitude.  A Certificate records such data; verify_certificate replays
it.  The free-cancellation and commute moves are value-neutral for the
expansion oracle, so the searcher only ever needs conjugators, insertions,
and longitude-conjugation moves, but the verifier accepts all of them.

Refutation is by Milnor residue tables: a differing entry is a sound proof
of non-equivalence.  The bounded certificate search can return Unknown; it
never overclaims.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .diagram import GaussDiagram, canonical_key
from .group import (
    PeripheralSystem,
    Word,
    cyclic_reduce,
    format_word,
    free_reduce,
    mu_system,
    parse_word,
    word_erase,
    word_inverse,
    word_mul,
    word_pow,
)
from .magnus import (
    TableEntry,
    expand,
    first_difference,
    milnor_table,
    rf_equal,
)


class CertificateError(ValueError):
    """Malformed certificate data (dangling site, bad pattern, bad shape)."""


@dataclass(frozen=True)
class WordMove:
    """One word move applied to a longitude during certificate replay.

    kinds:
      cancel      delete the inverse pair at (pos, pos+1)
      insert-pair insert (letter, -letter) before pos
      commute     swap the conjugate-of-a-meridian subword [pos, pos+length)
                  with the meridian letter that follows it
      conjugate   replace the letter at pos by w^-1 . letter . w where w is
                  the target system's longitude representative of that
                  letter's component, raised to rep_sign
    """

    kind: str
    component: int
    pos: int
    letter: int = 0
    length: int = 0
    rep_sign: int = 1

    def to_json(self) -> dict:
        out = {"kind": self.kind, "component": self.component, "pos": self.pos}
        if self.kind == "insert-pair":
            out["letter"] = self.letter
        if self.kind == "commute":
            out["length"] = self.length
        if self.kind == "conjugate":
            out["rep_sign"] = self.rep_sign
        return out

    @staticmethod
    def from_json(data: dict) -> "WordMove":
        return WordMove(data["kind"], data["component"], data["pos"],
                        data.get("letter", 0), data.get("length", 0),
                        data.get("rep_sign", 1))


@dataclass(frozen=True)
class Certificate:
    """Witness that applying the recorded steps to the source longitudes
    yields the target longitudes in the reduced free group.

    Replay order: per-component conjugation, then the coset insertions
    (right multiplication by g . m_i^sign . g^-1), then the word moves."""

    n: int
    conjugators: tuple[Word, ...]
    insertions: tuple[tuple[tuple[Word, int], ...], ...]
    moves: tuple[WordMove, ...] = ()

    @staticmethod
    def identity(n: int) -> "Certificate":
        return Certificate(n, ((),) * n, ((),) * n)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "conjugators": [format_word(w) for w in self.conjugators],
            "insertions": [
                [{"g": format_word(g), "sign": s} for g, s in comp]
                for comp in self.insertions
            ],
            "moves": [m.to_json() for m in self.moves],
        }

    @staticmethod
    def from_json(data: dict) -> "Certificate":
        n = data["n"]
        conj = tuple(parse_word(w) for w in data["conjugators"])
        ins = tuple(
            tuple((parse_word(rec["g"]), rec["sign"]) for rec in comp)
            for comp in data["insertions"]
        )
        moves = tuple(WordMove.from_json(m) for m in data.get("moves", []))
        return Certificate(n, conj, ins, moves)


def _check_mu_system(system: PeripheralSystem, n: int):
    if system.n != n or system.meridians != tuple(range(1, n + 1)):
        raise CertificateError("peripheral system must be over meridians m1..mn")


def _apply_word_move(words: list[Word], move: WordMove, target: PeripheralSystem,
                     n: int) -> None:
    if not 1 <= move.component <= n:
        raise CertificateError(f"move on component {move.component} out of range")
    w = words[move.component - 1]
    if move.kind == "cancel":
        if not 0 <= move.pos < len(w) - 1:
            raise CertificateError("cancel site out of range")
        if w[move.pos] != -w[move.pos + 1]:
            raise CertificateError("cancel site is not an inverse pair")
        words[move.component - 1] = w[:move.pos] + w[move.pos + 2:]
        return
    if move.kind == "insert-pair":
        if not 0 <= move.pos <= len(w):
            raise CertificateError("insert site out of range")
        g = move.letter
        if g == 0 or abs(g) > n:
            raise CertificateError(f"bad inserted letter {g}")
        words[move.component - 1] = w[:move.pos] + (g, -g) + w[move.pos:]
        return
    if move.kind == "commute":
        lo, hi = move.pos, move.pos + move.length
        if move.length < 1 or not 0 <= lo < hi < len(w):
            raise CertificateError("commute site out of range")
        omega, letter = w[lo:hi], w[hi]
        core = cyclic_reduce(omega)
        if len(core) != 1 or abs(core[0]) != abs(letter):
            raise CertificateError("commute subword is not a conjugate of the meridian")
        words[move.component - 1] = w[:lo] + (letter,) + omega + w[hi + 1:]
        return
    if move.kind == "conjugate":
        if not 0 <= move.pos < len(w):
            raise CertificateError("conjugate site out of range")
        if move.rep_sign not in (1, -1):
            raise CertificateError("rep_sign must be +-1")
        letter = w[move.pos]
        rep = word_pow(target.longitudes[abs(letter) - 1], move.rep_sign)
        words[move.component - 1] = free_reduce(
            w[:move.pos] + word_inverse(rep) + (letter,) + rep + w[move.pos + 1:])
        return
    raise CertificateError(f"unknown word move kind {move.kind!r}")


def replay_certificate(target: PeripheralSystem, source: PeripheralSystem,
                       cert: Certificate) -> list[Word]:
    """Transformed source longitudes after applying the certificate."""
    n = cert.n
    _check_mu_system(target, n)
    _check_mu_system(source, n)
    if (len(cert.conjugators), len(cert.insertions)) != (n, n):
        raise CertificateError("certificate shape does not match n")
    words: list[Word] = []
    for i in range(1, n + 1):
        w = source.longitudes[i - 1]
        omega = free_reduce(cert.conjugators[i - 1])
        w = word_mul(word_inverse(omega), w, omega)
        for g, s in cert.insertions[i - 1]:
            if s not in (1, -1):
                raise CertificateError("insertion sign must be +-1")
            w = word_mul(w, g, ((i if s > 0 else -i),), word_inverse(g))
        words.append(w)
    for move in cert.moves:
        before = expand(words[move.component - 1], n)
        _apply_word_move(words, move, target, n)
        if move.kind in ("cancel", "insert-pair", "commute"):
            # these moves are identities in the reduced free group
            if expand(words[move.component - 1], n) != before:
                raise CertificateError("value-preserving move changed the expansion")
    return words


def verify_certificate(target: PeripheralSystem, source: PeripheralSystem,
                       cert: Certificate) -> bool:
    """True iff the certificate transforms the source longitudes into words
    equal to the target's in the reduced free group."""
    words = replay_certificate(target, source, cert)
    return all(rf_equal(w, target.longitudes[i], cert.n)
               for i, w in enumerate(words))


# -- refutation ---------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A Milnor residue entry on which two systems disagree."""

    left: TableEntry
    right: TableEntry

    def to_json(self) -> dict:
        return {"I": list(self.left.index), "j": self.left.target,
                "left": self.left.to_json(), "right": self.right.to_json()}

    def describe(self) -> str:
        I = "".join(str(i) for i in self.left.index)
        return (f"mubar({I};{self.left.target}) = {self.left.mubar} "
                f"vs {self.right.mubar}")


def refute(a: PeripheralSystem, b: PeripheralSystem,
           max_length: "int | None" = None) -> "Witness | None":
    """A differing residue entry up to max_length, or None."""
    if a.n != b.n:
        raise ValueError("component counts differ")
    ta = milnor_table(a, max_length)
    tb = milnor_table(b, max_length)
    diff = first_difference(ta, tb)
    return Witness(*diff) if diff else None


# -- bounded certificate search -------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    """Search-effort bounds.  They cap what the search explores, not the size
    of an emitted certificate: a certificate found through a shortcut may
    exceed coset_max / coset_g_len and is still sound (the verifier is the
    gate)."""

    conj_len: int = 4
    coset_max: int = 4
    coset_g_len: int = 3
    move_depth: int = 64
    iii_depth: int = 2
    refute_length: "int | None" = None

    def to_json(self) -> dict:
        return {"conj_len": self.conj_len, "coset_max": self.coset_max,
                "coset_g_len": self.coset_g_len, "move_depth": self.move_depth,
                "iii_depth": self.iii_depth, "refute_length": self.refute_length}


DEFAULT_BOUNDS = Bounds()


@dataclass(frozen=True)
class Verdict:
    kind: str                                  # "equivalent" | "distinct" | "unknown"
    witness: "Witness | None" = None
    certificate: "Certificate | None" = None
    certificate_reversed: bool = False         # cert maps target->source instead
    bounds: Bounds = DEFAULT_BOUNDS

    @property
    def is_equivalent(self) -> bool:
        return self.kind == "equivalent"

    @property
    def is_distinct(self) -> bool:
        return self.kind == "distinct"

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "bounds": self.bounds.to_json()}
        if self.witness:
            out["witness"] = self.witness.to_json()
        if self.certificate:
            out["certificate"] = self.certificate.to_json()
            out["certificate_reversed"] = self.certificate_reversed
        return out


def _conj_candidates(n: int, max_len: int):
    """All reduced conjugator words up to the length bound, shortest first."""
    letters = [g for i in range(1, n + 1) for g in (i, -i)]
    out: list[Word] = [()]
    frontier: list[Word] = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in letters:
                if w and w[-1] == -g:
                    continue
                nxt.append(w + (g,))
        out.extend(nxt)
        frontier = nxt
    return out


def decompose_normal_closure(word: Word, gen: int) -> "list[tuple[Word, int]] | None":
    """Write a word lying in the normal closure of one generator as a product
    of conjugates g . m^s . g^-1 (prefix-scan decomposition); None if the word
    is not in the closure (nontrivial after erasing the generator)."""
    w = free_reduce(word)
    if word_erase(w, gen):
        return None
    out = []
    for t, letter in enumerate(w):
        if abs(letter) == gen:
            prefix = word_erase(w[:t], gen)
            out.append((prefix, 1 if letter > 0 else -1))
    return out


def _iii_neighbors(word: Word, target: PeripheralSystem, n: int):
    """Forward conjugate-by-longitude moves from a word: (move, result)."""
    for pos, letter in enumerate(word):
        rep0 = target.longitudes[abs(letter) - 1]
        if not rep0:
            continue
        for s in (1, -1):
            rep = word_pow(rep0, s)
            res = free_reduce(word[:pos] + word_inverse(rep) + (letter,)
                              + rep + word[pos + 1:])
            yield WordMove("conjugate", 0, pos, rep_sign=s), res


_ORBIT_CAP = 800
_FINISH_ATTEMPTS = 64


def _iii_orbit(word: Word, depth: int, target: PeripheralSystem, n: int
               ) -> list[tuple[Word, int]]:
    """(node, depth) pairs of the conjugate-move orbit, BFS order, deduped by
    exact word (conjugates of one meridian commute in the reduced group, so
    many distinct words share a class; the closure test below needs the
    words themselves), truncated at a fixed node budget."""
    out = [(word, 0)]
    seen = {word}
    frontier = [word]
    for level in range(1, depth + 1):
        nxt = []
        for w in frontier:
            for _, res in _iii_neighbors(w, target, n):
                if res in seen:
                    continue
                seen.add(res)
                out.append((res, level))
                nxt.append(res)
                if len(out) >= _ORBIT_CAP:
                    return out
        frontier = nxt
    return out


def _solve_component(i: int, target: PeripheralSystem, source: PeripheralSystem,
                     bounds: Bounds) -> "tuple[Word, tuple, tuple] | None":
    """Find (conjugator, insertions, moves) turning source longitude i into
    the target's, or None within bounds.

    Stage 1 tries conjugation plus a coset closure: after conjugating, the
    quotient against the target longitude must lie in the normal closure of
    m_i as a free word, which the prefix-scan decomposition solves exactly.
    Stage 2 additionally explores conjugate-by-longitude moves on both the
    source and target side before closing, then reconstructs a replayable
    forward move list by a goal-directed search.
    """
    n = target.n
    a = target.longitudes[i - 1]
    b = source.longitudes[i - 1]

    def insertion_replay(w0: Word, ins) -> Word:
        u = w0
        for g, s in ins:
            u = word_mul(u, g, ((i if s > 0 else -i),), word_inverse(g))
        return u

    def finish_moves(u0: Word, depth: int) -> "tuple[WordMove, ...] | None":
        if rf_equal(u0, a, n):
            return ()
        seen = {u0}
        frontier = [(u0, ())]
        for _ in range(depth):
            nxt = []
            for w, path in frontier:
                for move, res in _iii_neighbors(w, target, n):
                    if res in seen:
                        continue
                    seen.add(res)
                    mv = replace(move, component=i)
                    if rf_equal(res, a, n):
                        return path + (mv,)
                    nxt.append((res, path + (mv,)))
                    if len(seen) >= _ORBIT_CAP:
                        frontier = []
                        break
            frontier = nxt
        return None

    # Stage 1: conjugation + insertions only.
    for omega in _conj_candidates(n, bounds.conj_len):
        w0 = word_mul(word_inverse(omega), b, omega)
        ins = decompose_normal_closure(word_mul(word_inverse(w0), a), i)
        if ins is not None:
            return omega, tuple(ins), ()

    # Stage 2: conjugate-by-longitude moves, explored from both ends.  A pair
    # of orbit nodes can close via insertions iff their images after erasing
    # the component's meridian agree as free words, so nodes are bucketed by
    # that image and only matching pairs are attempted.
    depth = max(0, min(bounds.iii_depth, bounds.move_depth))
    if depth == 0:
        return None
    shallow = min(2, bounds.conj_len)
    a_orbit = _iii_orbit(a, depth, target, n)
    a_buckets: dict[Word, list[tuple[Word, int]]] = {}
    for a_node, da in a_orbit:
        a_buckets.setdefault(word_erase(a_node, i), []).append((a_node, da))
    for omega in _conj_candidates(n, shallow):
        w0 = word_mul(word_inverse(omega), b, omega)
        attempts = 0
        for w_node, dw in _iii_orbit(w0, depth, target, n):
            for a_node, da in a_buckets.get(word_erase(w_node, i), ()):
                if da + dw == 0 or da + dw > depth:
                    continue
                ins = decompose_normal_closure(
                    word_mul(word_inverse(w_node), a_node), i)
                if ins is None:
                    continue
                attempts += 1
                moves = finish_moves(insertion_replay(w0, ins), da + dw)
                if moves is not None:
                    return omega, tuple(ins), moves
                if attempts >= _FINISH_ATTEMPTS:
                    break
            if attempts >= _FINISH_ATTEMPTS:
                break
    return None


def search_certificate(target: PeripheralSystem, source: PeripheralSystem,
                       bounds: Bounds = DEFAULT_BOUNDS) -> Verdict:
    """Refute via residue tables or search for a certificate source->target.

    Deterministic given bounds; components are independent, so the search
    solves them separately.  Unknown means the bounded search was exhausted,
    nothing more.
    """
    if target.n != source.n:
        raise ValueError("component counts differ")
    witness = refute(target, source, bounds.refute_length)
    if witness:
        return Verdict("distinct", witness=witness, bounds=bounds)
    n = target.n
    conj, ins, moves = [], [], []
    for i in range(1, n + 1):
        got = _solve_component(i, target, source, bounds)
        if got is None:
            return Verdict("unknown", bounds=bounds)
        conj.append(got[0])
        ins.append(got[1])
        moves.extend(got[2])
    cert = Certificate(n, tuple(conj), tuple(ins), tuple(moves))
    if not verify_certificate(target, source, cert):
        return Verdict("unknown", bounds=bounds)
    return Verdict("equivalent", certificate=cert, bounds=bounds)


def sv_equivalent(d1: GaussDiagram, d2: GaussDiagram,
                  bounds: Bounds = DEFAULT_BOUNDS) -> Verdict:
    """Pipeline: sort both diagrams, read longitudes, refute or certify.

    A certificate in either direction proves equivalence; when only the
    reversed direction is found, the verdict flags it.
    """
    from .moves import sort_diagram

    if d1.n != d2.n:
        raise ValueError("component counts differ")
    s1, _ = sort_diagram(d1)
    s2, _ = sort_diagram(d2)
    sys1 = sorted_longitudes_cached(s1)
    sys2 = sorted_longitudes_cached(s2)
    verdict = search_certificate(sys1, sys2, bounds)
    if verdict.kind != "unknown":
        return verdict
    rev = search_certificate(sys2, sys1, bounds)
    if rev.kind == "equivalent":
        return replace(rev, certificate_reversed=True)
    return verdict


def sorted_longitudes_cached(diagram: GaussDiagram) -> PeripheralSystem:
    from .group import sorted_longitudes

    return sorted_longitudes(diagram)


# -- helpers for tests and demos -------------------------------------------------


def perturb_system(system: PeripheralSystem, rng, conj_letters: int = 2,
                   insertions: int = 2, g_len: int = 2, iii_moves: int = 1
                   ) -> PeripheralSystem:
    """Apply random valid certificate-style steps (in replay order) to build
    an equivalent system; used for round-trip testing."""
    n = system.n
    words = list(system.longitudes)
    letters = [g for i in range(1, n + 1) for g in (i, -i)]
    for i in range(1, n + 1):
        w = words[i - 1]
        omega = tuple(rng.choice(letters) for _ in range(rng.randint(0, conj_letters)))
        w = word_mul(word_inverse(omega), w, omega)
        for _ in range(rng.randint(0, insertions)):
            g = tuple(rng.choice(letters) for _ in range(rng.randint(0, g_len)))
            s = rng.choice((1, -1))
            w = word_mul(w, g, ((i if s > 0 else -i),), word_inverse(g))
        words[i - 1] = w
    for _ in range(iii_moves):
        i = rng.randint(1, n)
        w = words[i - 1]
        if not w:
            continue
        pos = rng.randrange(len(w))
        rep = word_pow(system.longitudes[abs(w[pos]) - 1], rng.choice((1, -1)))
        words[i - 1] = free_reduce(w[:pos] + word_inverse(rep) + (w[pos],)
                                   + rep + w[pos + 1:])
    return mu_system(words)


def diagram_orbit_connected(d1: GaussDiagram, d2: GaussDiagram,
                            kinds=("R1-del", "R2-del", "SV-del", "OC", "R3"),
                            max_states: int = 2000) -> "bool | None":
    """Tiny diagram-level BFS cross-check: True if connected within budget,
    None if the budget ran out.  Simplifying kinds by default."""
    from .moves import apply_move, enumerate_moves

    goal = canonical_key(d2)
    seen = {canonical_key(d1)}
    if canonical_key(d1) == goal:
        return True
    frontier = [d1]
    while frontier and len(seen) < max_states:
        nxt = []
        for d in frontier:
            for inst in enumerate_moves(d, kinds):
                try:
                    res = apply_move(d, inst)
                except Exception:
                    continue
                key = canonical_key(res)
                if key in seen:
                    continue
                if key == goal:
                    return True
                seen.add(key)
                nxt.append(res)
                if len(seen) >= max_states:
                    break
        frontier = nxt
    return None

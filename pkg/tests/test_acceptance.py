"""Acceptance criteria, one test per criterion, each timed against its budget
and printing a single PASS line.  All checks are exact; the random corpora
are fixed-seed.

Insertion-move instances in criterion 2 are sampled (12 per diagram, seeded)
while all deletion/exchange instances are exhausted; the insertion parameter
space is position x sign x orientation and grows quadratically, so exhausting
it adds nothing but runtime.
"""

import random
import time

from weldkit.diagram import is_sorted, parse_gauss_code
from weldkit.equivalence import (
    Bounds,
    perturb_system,
    refute,
    search_certificate,
    sv_equivalent,
    verify_certificate,
)
from weldkit.fixtures import hughes_pair
from weldkit.group import (
    build_sorted_from_longitudes,
    exponent_sum,
    free_reduce,
    mu_system,
    sorted_longitudes,
    word_commutator,
    word_conjugate,
    word_inverse,
    word_mul,
)
from weldkit.invariants import diagram_table
from weldkit.magnus import ReducedPoly, expand, milnor_table, mul, tables_equal
from weldkit.moves import apply_move, enumerate_moves, sort_diagram, verify_trace
from conftest import random_word


def _report(name: str, detail: str, t0: float, budget: float):
    elapsed = time.time() - t0
    print(f"PASS: {name} — {detail} ({elapsed:.2f}s, budget {budget:.0f}s)")
    assert elapsed < budget, f"{name} exceeded its {budget}s budget"


def test_criterion_1_sv_invariance(corpus200):
    t0 = time.time()
    checked = 0
    for d in corpus200:
        base = diagram_table(d)
        for inst in enumerate_moves(d, ["SV-del"]):
            assert tables_equal(base, diagram_table(apply_move(d, inst)))
            checked += 1
    assert len(corpus200) >= 200
    _report("criterion 1 (self-virtualization invariance)",
            f"{checked} self-arrow deletions over {len(corpus200)} diagrams",
            t0, 60)


def test_criterion_2_move_invariance(corpus200):
    t0 = time.time()
    rng = random.Random(555)
    checked = 0
    for d in corpus200:
        base = diagram_table(d)
        insts = enumerate_moves(d, ["R1-del", "R2-del", "R3", "OC"])
        adds = enumerate_moves(d, ["R1-add", "R2-add", "SV-add"])
        if adds:
            insts += rng.sample(adds, min(12, len(adds)))
        for inst in insts:
            assert tables_equal(base, diagram_table(apply_move(d, inst))), inst
            checked += 1
    _report("criterion 2 (move invariance)",
            f"{checked} instances (deletions/exchanges exhaustive, "
            f"insertions sampled 12/diagram)", t0, 120)


def test_criterion_3_sorting(corpus200):
    t0 = time.time()
    for d in corpus200:
        s, trace = sort_diagram(d)
        assert is_sorted(s)
        assert verify_trace(trace)
        assert tables_equal(diagram_table(d), milnor_table(sorted_longitudes(s)))
    _report("criterion 3 (sorting)",
            f"{len(corpus200)} diagrams sorted, traces verified, tables stable",
            t0, 60)


def test_criterion_4_hopf_distinction():
    t0 = time.time()
    verdict = sv_equivalent(parse_gauss_code("t1 h2+ / h1+ t2"),
                            parse_gauss_code("t1 h2- / h1- t2"))
    assert verdict.kind == "distinct"
    w = verdict.witness
    assert w.left.index == (2,) and w.left.target == 1
    assert (w.left.mubar, w.right.mubar) == (1, -1)
    _report("criterion 4 (Hopf distinction)",
            f"witness mubar(2;1) = {w.left.mubar} vs {w.right.mubar}", t0, 1)


def test_criterion_5_hughes_links():
    t0 = time.time()
    h1, h2, _ = hughes_pair()
    assert tables_equal(diagram_table(h1, 4), diagram_table(h2, 4))
    sys1 = sorted_longitudes(sort_diagram(h1)[0])
    sys2 = sorted_longitudes(sort_diagram(h2)[0])
    for length in range(1, 5):
        assert refute(sys1, sys2, length) is None
        verdict = sv_equivalent(h1, h2, Bounds(refute_length=length))
        assert verdict.kind != "distinct", length
    _report("criterion 5 (Hughes-style pair)",
            "tables equal through length 4; no refutation at any length <= 4",
            t0, 60)


def test_criterion_6_heisenberg_oracle():
    t0 = time.time()
    from test_magnus import _heisenberg_normal_form

    rng = random.Random(606)
    agree = 0
    for _ in range(1000):
        u, v = random_word(rng, 2, 10), random_word(rng, 2, 10)
        lhs = expand(u, 2) == expand(v, 2)
        rhs = _heisenberg_normal_form(u) == _heisenberg_normal_form(v)
        assert lhs == rhs
        agree += 1
    _report("criterion 6 (rank-2 normal-form oracle)",
            f"{agree} word pairs agree", t0, 10)


def test_criterion_7_homomorphism_and_units():
    t0 = time.time()
    rng = random.Random(707)
    for _ in range(1000):
        n = rng.randint(1, 5)
        u, v = random_word(rng, n, 12), random_word(rng, n, 12)
        assert expand(word_mul(u, v), n) == mul(expand(u, n), expand(v, n))
        w = random_word(rng, n, 12)
        assert expand(tuple(w) + word_inverse(w), n) == ReducedPoly.one(n)
    _report("criterion 7 (homomorphism and unit laws)", "1000 word pairs",
            t0, 10)


def test_criterion_8_reduction_relators():
    t0 = time.time()
    rng = random.Random(808)
    for _ in range(500):
        n = rng.randint(2, 5)
        i = rng.randint(1, n)
        omega = random_word(rng, n, 8)
        rel = word_commutator((i,), word_conjugate((i,), omega))
        assert expand(rel, n) == ReducedPoly.one(n)
    _report("criterion 8 (reduction relators vanish)", "500 random (i, w)",
            t0, 10)


def test_criterion_9_certificate_roundtrip():
    t0 = time.time()
    rng = random.Random(909)
    for trial in range(100):
        n = rng.randint(2, 4)
        base = mu_system([free_reduce(random_word(rng, n, 5)) for _ in range(n)])
        pert = perturb_system(base, rng, conj_letters=2, insertions=2,
                              g_len=2, iii_moves=1)
        verdict = search_certificate(base, pert)
        assert verdict.kind == "equivalent", trial
        assert verify_certificate(base, pert, verdict.certificate), trial
    _report("criterion 9 (certificate round-trip)",
            "100 perturbed pairs recovered and verified", t0, 120)


def test_criterion_10_sorted_form_longitude_roundtrip():
    t0 = time.time()
    rng = random.Random(1010)
    corrected_checked = 0
    for _ in range(500):
        n = rng.randint(1, 4)
        words = [random_word(rng, n, 8) for _ in range(n)]
        diagram = build_sorted_from_longitudes(n, words)
        assert is_sorted(diagram)
        system = sorted_longitudes(diagram)
        for i in range(1, n + 1):
            assert system.raw_longitude(i) == free_reduce(words[i - 1])
        if all(exponent_sum(w, i + 1) == 0 for i, w in enumerate(words)):
            assert system.longitudes == tuple(free_reduce(w) for w in words)
            corrected_checked += 1
    _report("criterion 10 (sorted form <-> longitudes round-trip)",
            f"500 tuples; corrected-longitude identity on {corrected_checked} "
            f"framing-free tuples", t0, 10)

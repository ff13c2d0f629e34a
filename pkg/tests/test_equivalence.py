import random

import pytest

from weldkit.diagram import parse_gauss_code
from weldkit.equivalence import (
    Bounds,
    Certificate,
    CertificateError,
    WordMove,
    decompose_normal_closure,
    diagram_orbit_connected,
    perturb_system,
    refute,
    search_certificate,
    sv_equivalent,
    verify_certificate,
)
from weldkit.group import (
    free_reduce,
    mu_system,
    sorted_longitudes,
    word_conjugate,
    word_inverse,
    word_mul,
)
from weldkit.moves import MoveInstance, apply_move, enumerate_moves, sort_diagram
from conftest import random_diagram, random_word

HOPF_P = parse_gauss_code("t1 h2+ / h1+ t2")
HOPF_N = parse_gauss_code("t1 h2- / h1- t2")


def _system(diagram):
    return sorted_longitudes(sort_diagram(diagram)[0])


def test_verify_identity_certificate():
    a = mu_system([(2,), (1,)])
    assert verify_certificate(a, a, Certificate.identity(2))


def test_verify_conjugation_certificate():
    a = mu_system([(2,), (1,)])
    b = mu_system([free_reduce((1, 2, -1)), (1,)])
    cert = Certificate(2, ((1,), ()), ((), ()))
    assert verify_certificate(a, b, cert)
    # wrong conjugator fails
    assert not verify_certificate(a, b, Certificate(2, ((2,), ()), ((), ())))


def test_verify_coset_certificate():
    a = mu_system([(2,), (1,)])
    g = (2,)
    b = mu_system([word_mul((2,), g, (1,), word_inverse(g)), (1,)])
    cert = Certificate(2, ((), ()), (((g, -1),), ()))
    assert verify_certificate(a, b, cert)


def test_verify_word_moves():
    a = mu_system([(2,), (1,)])
    # insert-pair then cancel is a no-op
    cert = Certificate(2, ((), ()), ((), ()), (
        WordMove("insert-pair", 1, 0, letter=1),
        WordMove("cancel", 1, 0),
    ))
    assert verify_certificate(a, a, cert)
    # commute a conjugate of m1 past m1: lambda = (m2 m1 m2^-1) m1 ...
    omega = word_conjugate((1,), (2,))
    a2 = mu_system([word_mul(omega, (1,)), ()])
    b2 = mu_system([word_mul((1,), omega), ()])
    cert = Certificate(2, ((), ()), ((), ()),
                       (WordMove("commute", 1, 0, length=3),))
    assert verify_certificate(b2, a2, cert)


def test_malformed_certificates_raise():
    a = mu_system([(2,), (1,)])
    with pytest.raises(CertificateError):
        verify_certificate(a, a, Certificate(2, ((),), ((), ())))
    with pytest.raises(CertificateError):
        verify_certificate(a, a, Certificate(
            2, ((), ()), ((), ()), (WordMove("cancel", 1, 5),)))
    with pytest.raises(CertificateError):
        verify_certificate(a, a, Certificate(
            2, ((), ()), ((), ()), (WordMove("commute", 1, 0, length=1),)))


def test_certificate_json_roundtrip():
    cert = Certificate(2, ((1, -2), ()), (((((2,)), 1),), ()),
                       (WordMove("conjugate", 1, 0, rep_sign=-1),))
    again = Certificate.from_json(cert.to_json())
    assert again == cert


def test_refute_hopf_pair():
    w = refute(_system(HOPF_P), _system(HOPF_N))
    assert w is not None
    assert w.left.index == (2,) and w.left.target == 1
    assert (w.left.mubar, w.right.mubar) == (1, -1)
    assert refute(_system(HOPF_P), _system(HOPF_P)) is None


def test_refute_unlink_vs_hopf():
    w = refute(_system(HOPF_P), _system(parse_gauss_code("/")))
    assert w is not None and len(w.left.index) == 1


def test_decompose_normal_closure():
    w = word_mul((2,), (1,), (-2,), (2,), (-1,), (-2,))
    parts = decompose_normal_closure(w, 1)
    assert parts is not None
    rebuilt = ()
    for g, s in parts:
        rebuilt = word_mul(rebuilt, g, ((1 if s > 0 else -1),), word_inverse(g))
    assert free_reduce(rebuilt) == free_reduce(w)
    assert decompose_normal_closure((2,), 1) is None


def test_search_recovers_perturbations():
    rng = random.Random(42)
    for trial in range(40):
        n = rng.randint(2, 4)
        base = mu_system([free_reduce(random_word(rng, n, 5)) for _ in range(n)])
        pert = perturb_system(base, rng)
        verdict = search_certificate(base, pert)
        assert verdict.kind == "equivalent", (trial, base.longitudes, pert.longitudes)
        assert verify_certificate(base, pert, verdict.certificate)


def test_search_distinct_and_unknown():
    v = search_certificate(_system(HOPF_P), _system(HOPF_N))
    assert v.kind == "distinct"
    # equivalent pairs perturbed beyond tiny bounds: unknown is allowed,
    # a false distinct or an unverifiable certificate is not
    rng = random.Random(77)
    tiny = Bounds(conj_len=1, iii_depth=0)
    for _ in range(10):
        base = mu_system([free_reduce(random_word(rng, 3, 4)) for _ in range(3)])
        pert = perturb_system(base, rng, conj_letters=4, insertions=3, g_len=4,
                              iii_moves=2)
        v = search_certificate(base, pert, tiny)
        assert v.kind in ("unknown", "equivalent")
        if v.kind == "equivalent":
            assert verify_certificate(base, pert, v.certificate)


def test_search_monotone_in_bounds():
    rng = random.Random(9)
    small = Bounds(conj_len=1, iii_depth=1)
    big = Bounds(conj_len=3, iii_depth=2)
    for _ in range(10):
        n = rng.randint(2, 3)
        base = mu_system([free_reduce(random_word(rng, n, 4)) for _ in range(n)])
        pert = perturb_system(base, rng, conj_letters=1, insertions=1, g_len=1,
                              iii_moves=0)
        v_small = search_certificate(base, pert, small)
        v_big = search_certificate(base, pert, big)
        if v_small.kind == "equivalent":
            assert v_big.kind == "equivalent"
        assert (v_small.kind == "distinct") == (v_big.kind == "distinct")


def test_sv_equivalent_examples():
    assert sv_equivalent(HOPF_P, parse_gauss_code("/")).kind == "distinct"
    assert sv_equivalent(HOPF_P, HOPF_N).kind == "distinct"
    d = parse_gauss_code("t1 h1+ t2 h3+ / t3 h2+")
    after = apply_move(d, MoveInstance("SV-del", (1,)))
    assert sv_equivalent(d, after).kind == "equivalent"
    with pytest.raises(ValueError):
        sv_equivalent(HOPF_P, parse_gauss_code("t1 h1+"))


def test_sv_equivalent_random_moves_never_distinct():
    rng = random.Random(17)
    kinds = ["R1-add", "R1-del", "R2-del", "OC", "SV-del", "SV-add", "R2-add", "R3"]
    for trial in range(15):
        d = random_diagram(rng, n_max=3, arrows_max=5)
        cur = d
        for _ in range(5):
            insts = enumerate_moves(cur, kinds)
            if len(cur.arrows) >= 7:
                insts = [m for m in insts if not m.kind.endswith("add")]
            if not insts:
                break
            cur = apply_move(cur, rng.choice(insts))
        verdict = sv_equivalent(d, cur)
        assert verdict.kind != "distinct", trial


def test_refute_stable_under_certificate_steps():
    rng = random.Random(3)
    base = mu_system([(2,), (1,)])
    for _ in range(10):
        pert = perturb_system(base, rng)
        assert refute(base, pert) is None


def test_diagram_orbit_cross_check():
    k = parse_gauss_code("t1 h1+")
    unknot = parse_gauss_code("")
    assert diagram_orbit_connected(k, unknot, max_states=50) is True
    r2 = parse_gauss_code("t1 t2 h2- h1+")
    assert diagram_orbit_connected(r2, unknot, max_states=200) is True

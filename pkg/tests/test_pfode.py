import json

import pytest
from gmpy2 import mpq
from mpmath import mp

from qml.algebra import LaurentPoly, MultiRationalFunction, mrf_context
from qml.lgmodel import build_chart, critical_points
from qml.pfode import (
    CoboundaryIdentity,
    DiffOp,
    assembled_broad_operator,
    broad_chain_identity,
    broad_ideal_membership,
    broad_operator,
    closed_form_vk,
    coefficient_matrix,
    compose,
    e_operator,
    g_operator,
    label_representatives,
    narrow_operator,
    rank_check,
    reduce_mod_narrow,
    relation_critical_values_exact,
    shift_operator,
    solve_vk,
    twisted_coboundary,
    verify_gm_identity_suite,
    x1_identity,
    y_chain_identity,
)
from qml.saddle import SaddleExpander


def _lp(c, h=0, q=0):
    return LaurentPoly.term(mpq(c), hpow=h, qpow=q)


def test_compose_order_and_leibniz():
    D = DiffOp({1: _lp(1)})
    h = DiffOp({0: _lp(1, 1, 0)})  # multiplication by hbar
    # D o hbar = hbar D + hbar
    assert compose(D, h) == DiffOp({1: _lp(1, 1, 0), 0: _lp(1, 1, 0)})
    A = DiffOp({2: _lp(3), 0: _lp(1, -1, 1)})
    B = DiffOp({1: _lp(1, 2, 0)})
    assert compose(A, B).order() == 3
    # associativity on a sample
    C = DiffOp({1: _lp(1), 0: _lp(2, 0, 1)})
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


def test_diffop_json_round_trip():
    op = narrow_operator(4)
    blob = json.loads(json.dumps(op.to_json()))
    rebuilt = DiffOp({
        e["k"]: LaurentPoly({
            (t["hpow"], t["qpow"]): mpq(int(t["num"]), int(t["den"]))
            for t in e["coeff"]
        })
        for e in blob
    })
    assert rebuilt == op


def test_narrow_operator_even():
    # n=4: D^5 - 2 q (-4)^4 h^-4 (2D - 4)
    op = narrow_operator(4)
    want = DiffOp({
        5: _lp(1),
        1: _lp(-1024, -4, 1),
        0: _lp(2048, -4, 1),
    })
    assert op == want


def test_narrow_operator_odd_sign():
    # odd n uses (-n)^n, so the q-tail flips sign relative to n^n
    op = narrow_operator(3)
    want = DiffOp({
        4: _lp(1),
        1: _lp(108, -3, 1),
        0: _lp(-162, -3, 1),
    })
    assert op == want


@pytest.mark.parametrize("n", [3, 4, 6])
def test_reduction_kills_the_operator(n):
    assert reduce_mod_narrow(narrow_operator(n), n).is_zero()
    # D^(n+1) reduces to the q-tail of the operator
    top = DiffOp({n + 1: _lp(1)})
    red = reduce_mod_narrow(top, n)
    assert red.order() <= n
    assert red == top - narrow_operator(n)


@pytest.mark.parametrize("n", [4, 6])
def test_g_operators_have_bounded_order(n):
    for k in range(n + 3):
        assert g_operator(n, k).order() <= n
    # E_k itself has order k + n/2 before reduction
    assert e_operator(n, n + 2).order() == n + 2 + n // 2


@pytest.mark.parametrize("n", [4, 6])
def test_coefficient_matrix_shape_and_rank(n):
    mat = coefficient_matrix(n)
    assert len(mat) == n + 2 and all(len(r) == n + 3 for r in mat)
    # the extra flat-section row is the geometric sequence in n/2
    assert mat[n + 1][0] == LaurentPoly.const(1)
    assert mat[n + 1][2] == LaurentPoly.const(mpq(n, 2) ** 2)
    assert rank_check(n)


@pytest.mark.parametrize("n", [4, 6])
def test_kernel_vector_closed_form(n):
    vk = solve_vk(n)
    assert vk == [closed_form_vk(n, k) for k in range(n + 3)]
    assert vk[n + 2] == LaurentPoly.const(1)
    # odd entries vanish except the q-term at k=1
    assert vk[1] == LaurentPoly.term(6 * mpq(n) ** (n + 1), hpow=-n, qpow=1)
    for k in range(3, n + 3, 2):
        assert vk[k].is_zero()


def test_broad_operator_n4_explicit():
    want = DiffOp({
        6: _lp(1),
        4: _lp(-12),
        2: _lp(48),
        0: _lp(-64) + _lp(-8192, -4, 1),
        1: _lp(6144, -4, 1),
    })
    got = broad_operator(4)
    # regroup: tail is -1024 q h^-4 (D^2 - 6D + 8)
    tail = DiffOp({2: _lp(-1024, -4, 1), 1: _lp(6144, -4, 1),
                   0: _lp(-8192, -4, 1)})
    poly = DiffOp({6: _lp(1), 4: _lp(-12), 2: _lp(48), 0: _lp(-64)})
    assert got == poly + tail
    assert got.coeff(2) == _lp(48) + _lp(-1024, -4, 1)
    assert want.coeff(0) == got.coeff(0)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_assembled_equals_closed_form(n):
    assert assembled_broad_operator(n) == broad_operator(n)


def test_shift_operator():
    D = DiffOp({1: _lp(1)})
    assert shift_operator(D, mpq(3, 2)) == DiffOp(
        {1: _lp(1), 0: LaurentPoly.const(mpq(3, 2))})
    op = DiffOp({2: _lp(1, -1, 0), 0: _lp(5)})
    assert shift_operator(op, 0) == op
    # conjugation is multiplicative: shift(A o B) = shift(A) o shift(B)
    A = DiffOp({1: _lp(2), 0: _lp(1, 0, 1)})
    B = DiffOp({1: _lp(1, -2, 0)})
    s = mpq(5, 3)
    assert shift_operator(compose(A, B), s) == compose(
        shift_operator(A, s), shift_operator(B, s))


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_broad_ideal_membership(n):
    assert broad_ideal_membership(n)


def test_twisted_coboundary_examples():
    # z-chart, n=4, pairs [(z1^2, z1), (-z1 z4, z4)]
    chart = build_chart(4, "z")
    g, C = mrf_context(chart.vars)
    pairs = [(g["z1"] ** 2, "z1"), (-g["z1"] * g["z4"], "z4")]
    A, B = twisted_coboundary(chart, pairs)
    prod = g["z1"] * g["z2"] * g["z3"] * g["z4"]
    assert A == g["z1"]
    assert B == g["q"] * g["z1"] ** 3 * g["z4"] / (prod - 1) - g["z1"] * g["z3"] * g["z4"]

    # Givental chart: contracting y1 d/dy1 leaves no divergence term
    gc = build_chart(4, "givental")
    gg, _ = mrf_context(gc.vars)
    A2, B2 = twisted_coboundary(gc, [(gg["y1"], "y1")])
    assert A2.is_zero()
    assert B2 == gg["y1"] * gc.W0.diff("y1")


@pytest.mark.parametrize("n", [4, 6])
def test_chain_identities_verify(n):
    for l in range(n):
        ident = y_chain_identity(n, l)
        assert ident.verify()
        if l < n - 1:
            want = tuple(mpq(n - 1) if j == l + 1 else mpq(-1)
                         for j in range(1, n))
            assert ident.combo == want
    assert x1_identity(n).verify()
    for k in range(n // 2):
        assert broad_chain_identity(n, k).verify()


def test_identity_verify_rejects_wrong_combo():
    ident = y_chain_identity(4, 0)
    broken = CoboundaryIdentity(
        ident.name, ident.chart, ident.lhs_f, ident.rhs,
        ident.contractions, tuple(c + 1 for c in ident.combo))
    with pytest.raises(AssertionError):
        broken.verify()


def test_gm_suite_n4():
    results = verify_gm_identity_suite(4)
    assert all(ok for _name, ok in results)
    assert len(results) >= 12


def test_relation_critical_values():
    assert relation_critical_values_exact(4)
    assert relation_critical_values_exact(6)


# ---------------------------------------------------------------------------
# numeric stationary-phase evidence for the class-level relations
# ---------------------------------------------------------------------------


def _relation_mrf(n, j):
    chart, reps = label_representatives(n)
    qv = MultiRationalFunction.variable(reps[("Y", 0)].vars, "q")
    return chart, reps[("Y", n // 2 + j)] - 2 * qv * reps[("B", j)], reps


@pytest.mark.parametrize("q", [1.0, 0.7 - 0.3j])
def test_relation_silent_on_all_thimbles_n4(q):
    # R_1 = Y_3 - 2q B_1 has vanishing expansion at every critical point;
    # the reference scale comes from Y_3 alone, so this is not noise/noise
    mp.dps = 30
    n = 4
    chart, rel, reps = _relation_mrf(n, 1)
    for p in critical_points(n, q):
        ex = SaddleExpander(chart, p.coords, q, orders=3)
        ref = max(abs(c) for c in ex.coefficients(reps[("Y", n // 2 + 1)]))
        ref = max(ref, 1.0)
        for k, c in enumerate(ex.coefficients(rel)):
            assert abs(c) < 1e-20 * ref, (p.kind, p.index, k, c)


def test_relation_silent_narrow_n6():
    mp.dps = 30
    n, q = 6, 1.0
    chart, rel, reps = _relation_mrf(n, 1)
    for p in critical_points(n, q):
        if p.kind != "narrow":
            continue
        ex = SaddleExpander(chart, p.coords, q, orders=2)
        ref = max(abs(c) for c in ex.coefficients(reps[("Y", n // 2 + 1)]))
        for k, c in enumerate(ex.coefficients(rel)):
            assert abs(c) < 1e-18 * max(ref, 1.0), (p.index, k, c)


def test_coboundary_cancellation_numeric():
    # hbar A + B integrates to zero: c_k(B) = -c_{k-1}(A) thimble by thimble
    mp.dps = 30
    n, q = 4, 1.3
    chart = build_chart(n, "z")
    g, _C = mrf_context(chart.vars)
    A, B = twisted_coboundary(chart, [(g["z2"] * g["z3"], "z3")])
    for p in critical_points(n, q):
        ex = SaddleExpander(chart, p.coords, q, orders=3)
        ca = ex.coefficients(A)
        cb = ex.coefficients(B)
        scale = max(1.0, max(abs(c) for c in ca), max(abs(c) for c in cb))
        assert abs(cb[0]) < 1e-20 * scale, (p.kind, p.index)
        for k in range(1, 3):
            assert abs(cb[k] + ca[k - 1]) < 1e-18 * scale, (p.kind, p.index, k)


def test_negative_control_not_silent():
    # a non-coboundary class has a visibly nonzero leading coefficient
    mp.dps = 30
    n, q = 4, 1.0
    chart, reps = label_representatives(n)
    p = critical_points(n, q)[0]
    ex = SaddleExpander(chart, p.coords, q, orders=2)
    c0 = ex.coefficients(reps[("Y", 1)])[0]
    assert abs(c0) > 1e-6

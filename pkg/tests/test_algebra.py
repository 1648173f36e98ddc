import math

from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from qml.algebra import (
    AlphaRingElement,
    FormalSymbolRing,
    LaurentPoly,
    MultiRationalFunction,
    alpha_invert,
    mrf_context,
    rat,
)

VARS = ("x", "y")

small_rats = st.builds(
    mpq,
    st.integers(min_value=-9, max_value=9),
    st.integers(min_value=1, max_value=7),
)


def _mrf_from(entries):
    """Polynomial in x, y from {(i, j): rational}."""
    return MultiRationalFunction.from_dict(VARS, entries)


mrf_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    small_rats,
    max_size=4,
).map(_mrf_from)


def test_rat_parsing():
    assert rat(3) == mpq(3)
    assert rat("2/7") == mpq(2, 7)
    assert rat(2, 6) == mpq(1, 3)


def test_mrf_canonical_equality():
    x = MultiRationalFunction.variable(VARS, "x")
    one = MultiRationalFunction.constant(VARS, 1)
    # cancel the common factor: (x^2 - 1)/(x - 1) == x + 1
    f = (x * x - one) / (x - one)
    assert f == x + one
    assert hash(f) == hash(x + one)


@settings(max_examples=60)
@given(mrf_polys, mrf_polys, mrf_polys)
def test_mrf_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40)
@given(mrf_polys, mrf_polys)
def test_mrf_derivative_product_rule(a, b):
    lhs = (a * b).diff("x")
    rhs = a.diff("x") * b + a * b.diff("x")
    assert lhs == rhs


def test_mrf_division_round_trip():
    x = MultiRationalFunction.variable(VARS, "x")
    y = MultiRationalFunction.variable(VARS, "y")
    f = x * x * y + MultiRationalFunction.constant(VARS, mpq(3, 2))
    g = y + MultiRationalFunction.constant(VARS, 5)
    assert (f / g) * g == f


def test_mrf_evaluate():
    x, y = (MultiRationalFunction.variable(VARS, v) for v in VARS)
    f = (x ** 3 - y) / (x + y)
    assert f.evaluate({"x": mpq(2), "y": mpq(1)}) == mpq(7, 3)
    ec = f.eval_complex({"x": 2.0, "y": 1.0})
    assert abs(ec - 7 / 3) < 1e-12


def test_mrf_context_helpers():
    gens, const = mrf_context(VARS)
    assert gens["x"] == MultiRationalFunction.variable(VARS, "x")
    assert const(7) == MultiRationalFunction.constant(VARS, 7)


laurents = st.dictionaries(
    st.tuples(st.integers(-4, 4), st.integers(-2, 3)),
    small_rats,
    max_size=4,
).map(LaurentPoly)


@settings(max_examples=60)
@given(laurents, laurents, laurents)
def test_laurent_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60)
@given(laurents, laurents)
def test_laurent_exact_division(a, b):
    if not a or not b:
        return
    assert (a * b).exact_div(b) == a


def test_laurent_d_log_hbar():
    # hbar d/d hbar multiplies each term by its hbar power
    p = LaurentPoly({(3, 1): mpq(2), (-4, 0): mpq(1, 3)})
    assert p.d_log_hbar() == LaurentPoly({(3, 1): mpq(6), (-4, 0): mpq(-4, 3)})


def test_laurent_subs_matches_complex_eval():
    p = LaurentPoly({(2, 1): mpq(3, 2), (-1, 0): mpq(-5)})
    exact = p.subs(hbar=mpq(2), q=mpq(3))
    assert exact == mpq(3, 2) * 4 * 3 - mpq(5, 2)
    approx = p.eval_complex(2.0, 3.0)
    assert abs(approx - float(exact)) < 1e-12


def test_alpha_ring_nilpotency():
    a = AlphaRingElement.alpha(4)
    assert (a ** 4).coeffs[4] == 1
    assert (a ** 5).is_zero()


def test_alpha_ring_inverse_round_trip():
    n = 6
    u = AlphaRingElement(n, (mpq(3, 2), 1, 0, mpq(-2, 5)))
    v = u.inverse()
    assert u * v == AlphaRingElement.const(n, 1)
    assert alpha_invert(u) == v


def test_alpha_invert_rejects_nonunit():
    n = 4
    nil = AlphaRingElement(n, (0, 1))
    try:
        alpha_invert(nil)
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("nilpotent element inverted")


@settings(max_examples=40)
@given(st.lists(small_rats, min_size=1, max_size=5))
def test_alpha_inverse_when_unit(coeffs):
    n = 4
    u = AlphaRingElement(n, coeffs)
    if not u.coeffs[0]:
        return
    assert u * u.inverse() == AlphaRingElement.const(n, 1)


def test_alpha_shift():
    # evaluation at alpha + c as a ring map
    n = 5
    u = AlphaRingElement(n, (1, 2, 3))
    w = AlphaRingElement(n, (0, 0, 0, 4))
    c = mpq(1, 2)
    assert (u * w).shift_alpha(c) == u.shift_alpha(c) * w.shift_alpha(c)
    # constant term of the shift is evaluation at c
    val = sum(co * c ** i for i, co in enumerate(u.coeffs))
    assert u.shift_alpha(c).coeffs[0] == val


def test_formal_symbols():
    L = FormalSymbolRing.gen("L")
    Pi = FormalSymbolRing.gen("Pi")
    e = (L + Pi) ** 2
    assert e.coefficient("L", 2).coefficient("Pi", 0) == mpq(1)
    assert e.coefficient("L", 1).coefficient("Pi", 1) == mpq(2)
    # shifting L by 2 Pi realizes the substitution L -> L + 2 Pi
    shifted = L.substitute_shift("L", 2 * Pi)
    assert shifted == L + 2 * Pi


def test_formal_symbol_shift_is_homomorphism():
    L = FormalSymbolRing.gen("L")
    Pi = FormalSymbolRing.gen("Pi")
    a = L ** 2 + Pi
    b = L - Pi * 3
    d = 2 * Pi
    lhs = (a * b).substitute_shift("L", d)
    rhs = a.substitute_shift("L", d) * b.substitute_shift("L", d)
    assert lhs == rhs


def test_binomial_identity_through_alpha_ring():
    # (1 + alpha)^k expands with binomial coefficients
    n = 8
    u = AlphaRingElement(n, (1, 1)) ** 5
    for i in range(6):
        assert u.coeffs[i] == math.comb(5, i)

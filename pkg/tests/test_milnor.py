import itertools

import pytest
from gmpy2 import mpq

from qml.algebra import MultiRationalFunction
from qml.milnor import (
    QVARS,
    GaussQ,
    MilnorElement,
    QuantumClass,
    f1,
    f2,
    isomorphism_check,
    milnor_product,
    pairing_value,
    phi,
    quantum_structure,
    small_quantum_product,
    three_point_seed,
    vandermonde_check,
    w0_equals_n_z2_check,
)


def _qv():
    return MultiRationalFunction.variable(QVARS, "q")


def test_gauss_rational_arithmetic():
    a = GaussQ(1, 2)   # 1 + 2i
    b = GaussQ(3, -1)  # 3 - i
    assert a * b == GaussQ(5, 5)
    assert a + b == GaussQ(4, 1)
    assert a * GaussQ(0, 1) == GaussQ(-2, 1)


def test_sqrt_minus_one_power_cycles():
    vals = [GaussQ.sqrt_minus_one_power(k) for k in range(4)]
    assert vals == [GaussQ(1), GaussQ(0, 1), GaussQ(-1), GaussQ(0, -1)]
    assert GaussQ.sqrt_minus_one_power(7) == GaussQ.sqrt_minus_one_power(3)
    assert GaussQ.sqrt_minus_one_power(-1) == GaussQ.sqrt_minus_one_power(3)


def test_gauss_eval():
    v = GaussQ(mpq(1, 2), _qv()).eval_complex(2.0)
    assert abs(v - (0.5 + 2j)) < 1e-12


@pytest.mark.parametrize("n", [4, 6])
def test_defining_relations(n):
    a, b = f1(n), f2(n)
    q = _qv()
    assert a ** (n + 1) == a.scale(GaussQ(4 * q))
    assert (a * b).is_zero()
    assert b * b == a ** n - MilnorElement.one(n).scale(GaussQ(4 * q))


def test_z2pow_reduction_past_top():
    # z2^(n+1) folds back with one 4q factor
    n = 4
    q = _qv()
    assert MilnorElement.z2pow(n, n + 1) == MilnorElement.z2pow(n, 1).scale(
        GaussQ(4 * q))
    assert MilnorElement.z2pow(n, 2 * n) == MilnorElement.z2pow(n, n).scale(
        GaussQ(4 * q))


def test_milnor_product_wrapper():
    n = 4
    x = MilnorElement.z2pow(n, 2)
    y = MilnorElement.z2pow(n, 3)
    assert milnor_product(x, y) == MilnorElement.z2pow(n, 5)
    with pytest.raises(AssertionError):
        milnor_product(x, MilnorElement.z2pow(6, 1))


@pytest.mark.parametrize("n", [4, 6])
def test_three_point_seed_values(n):
    q = _qv()
    one = MultiRationalFunction.constant(QVARS, 1)
    # identity row: pairing values (the shifted top class pairs to zero
    # with itself; that is what the -2q shift buys)
    assert three_point_seed(n, 0, 2, n - 2) == one * 2
    assert three_point_seed(n, 0, n + 1, n + 1) == one * 2
    assert three_point_seed(n, 0, n, n).is_zero()
    # interior rows
    assert three_point_seed(n, 1, 1, n - 2) == one * 2
    assert three_point_seed(n, 2, n - 2, n) == q * 4
    assert three_point_seed(n, 3, n - 2, n - 1) == q * 8
    assert three_point_seed(n, n, n, n) == q * q * 8
    assert three_point_seed(n, n + 1, n + 1, n) == q * (-4)
    # one broad insertion vanishes, as does any fractional-degree triple
    assert three_point_seed(n, 1, 2, n + 1).is_zero()
    assert three_point_seed(n, 1, 1, 1).is_zero()


def test_seed_symmetry():
    n = 4
    for key in itertools.combinations_with_replacement(range(n + 2), 3):
        base = three_point_seed(n, *key)
        for perm in itertools.permutations(key):
            assert three_point_seed(n, *perm) == base


@pytest.mark.parametrize("n", [4, 6])
def test_pairing_values(n):
    for i in range(n + 1):
        for j in range(n + 1):
            want = mpq(2) if i + j == n else mpq(0)
            if i == n and j == n:
                want = mpq(0)
            assert pairing_value(n, i, j) == want
    assert pairing_value(n, n + 1, n + 1) == 2
    assert not pairing_value(n, 2, n + 1)


@pytest.mark.parametrize("n", [4, 6])
def test_quantum_associativity(n):
    assert quantum_structure(n).associativity_check()


def test_small_quantum_product_examples():
    n = 4
    q = _qv()
    g = lambda k: QuantumClass.basis(n, k)
    # hyperplane powers multiply by degree; landing on the shifted top
    # class restores its constant term
    assert small_quantum_product(g(1), g(1)) == g(2)
    assert small_quantum_product(g(1), g(3)) == g(4) + g(0).scale(q * 2)
    # top-degree product picks up the quantum term: h^5 - 2qh = 2qh
    top = small_quantum_product(g(1), g(4))
    assert top == g(1).scale(q * 2)
    # the primitive class squares into the even part
    sq = small_quantum_product(g(n + 1), g(n + 1))
    assert set(sq.coeffs) <= {0, n}
    with pytest.raises(AssertionError):
        small_quantum_product(g(1), QuantumClass.basis(6, 1))


@pytest.mark.parametrize("n", [4, 6])
def test_phi_is_multiplicative_on_basis(n):
    cls = [QuantumClass.basis(n, k) for k in range(n + 2)]
    for a in range(n + 2):
        for b in range(a, n + 2):
            lhs = phi(small_quantum_product(cls[a], cls[b]))
            rhs = milnor_product(phi(cls[a]), phi(cls[b]))
            assert lhs == rhs, (a, b)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_isomorphism(n):
    assert isomorphism_check(n)


@pytest.mark.parametrize("q", [1.0, 2.0, 0.5 - 1.2j])
def test_numeric_reductions(q):
    assert w0_equals_n_z2_check(4, q)
    assert vandermonde_check(4, q)


def test_eval_at_matches_structure():
    # f2 squared evaluated at a narrow point equals (z2^n - 4q) there
    from qml.lgmodel import critical_points

    n, q = 4, 1.7
    p = critical_points(n, q)[0]
    z1v, z2v = p.coords[0], p.coords[1]
    b = f2(n)
    lhs = b.eval_at(z1v, z2v, q) ** 2
    rhs = z2v ** n - 4 * q
    assert abs(lhs - rhs) < 1e-9

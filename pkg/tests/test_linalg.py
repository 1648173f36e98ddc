from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from qml.algebra import LaurentPoly
from qml.linalg import (
    laurent_det,
    laurent_nullvector_last_one,
    laurent_rank,
    mpq_nullspace,
    mpq_rank,
    mpq_rref,
    mpq_solve_unique,
)

small_ints = st.integers(min_value=-6, max_value=6)


def _matrix(rows, cols):
    return st.lists(
        st.lists(small_ints.map(mpq), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    )


def test_solve_unique_known():
    a = [[mpq(2), mpq(1)], [mpq(1), mpq(-1)]]
    x = mpq_solve_unique(a, [mpq(5), mpq(1)])
    assert x == [mpq(2), mpq(1)]


def test_nullspace_known():
    # rank-1 matrix in three columns: nullity 2
    rows = [[mpq(1), mpq(2), mpq(3)], [mpq(2), mpq(4), mpq(6)]]
    basis = mpq_nullspace(rows, 3)
    assert len(basis) == 2
    for v in basis:
        for row in rows:
            assert sum(r * x for r, x in zip(row, v)) == 0


@settings(max_examples=50)
@given(_matrix(4, 3))
def test_rank_nullity(rows):
    rank = mpq_rank(rows, 3)
    basis = mpq_nullspace(rows, 3)
    assert rank + len(basis) == 3
    for v in basis:
        assert any(x for x in v)
        for row in rows:
            assert sum(r * x for r, x in zip(row, v)) == 0


@settings(max_examples=50)
@given(_matrix(3, 3), st.lists(small_ints.map(mpq), min_size=3, max_size=3))
def test_solve_consistency(rows, x):
    if mpq_rank(rows, 3) < 3:
        return
    rhs = [sum(r * v for r, v in zip(row, x)) for row in rows]
    assert mpq_solve_unique(rows, rhs) == x


def test_rref_idempotent():
    rows = [[mpq(0), mpq(2), mpq(4)], [mpq(1), mpq(1), mpq(1)]]
    red, pivots = mpq_rref(rows, 3)
    again, pivots2 = mpq_rref(red, 3)
    assert red == again and pivots == pivots2
    for r, p in zip(red, pivots):
        assert r[p] == 1


def _lp(c, h=0, q=0):
    return LaurentPoly.term(mpq(c), hpow=h, qpow=q)


def test_laurent_det_2x2():
    m = [[_lp(1, 1, 0), _lp(2)], [_lp(3), _lp(1, 0, 1)]]
    want = _lp(1, 1, 1) - _lp(6)
    assert laurent_det(m) == want


def test_laurent_rank_drops_on_proportional_rows():
    row = [_lp(1, -2, 1), _lp(5)]
    twice = [v * _lp(2) for v in row]
    assert laurent_rank([row, twice]) == 1
    other = [_lp(1), _lp(0)]
    assert laurent_rank([row, other]) == 2


def test_laurent_nullvector():
    # 2x3 system with the last column balancing the first two
    m = [
        [_lp(1), _lp(1, 1, 0), -_lp(1) - _lp(1, 1, 0)],
        [_lp(0), _lp(2), -_lp(2)],
    ]
    v = laurent_nullvector_last_one(m)
    assert v[-1] == LaurentPoly.const(1)
    for row in m:
        acc = LaurentPoly()
        for c, x in zip(row, v):
            acc = acc + c * x
        assert acc.is_zero()

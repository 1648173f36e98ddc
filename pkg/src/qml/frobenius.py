"""Flat structure at the origin of the deformation space: exact residue
three-point functions, grading/exchange reconstruction of the genus-zero
correlator table, stationary-phase pairings, and the comparison with the
quantum cohomology data of the even quadric.

Basis labels run 0..n+1.  Label i <= n-1 stands for the power direction
z2^i, label n for the top power shifted by its constant term (z2^n - 2q;
the shift makes its residue self-pairing vanish), and label n+1 for the
primitive direction f2.  Correlator values are stored as plain rationals:
the grading pins the power of q each one carries, so q is stripped on
storage and reinstated only where two tables are compared.
"""

from __future__ import annotations

import itertools
from math import comb

from gmpy2 import mpq

from .algebra import MultiRationalFunction
from .lgmodel import critical_points
from .milnor import (
    QVARS,
    GaussQ,
    MilnorElement,
    f2,
    pairing_value,
    three_point_seed,
)

__all__ = [
    "FlatBasis",
    "PairingMatrix",
    "CorrelatorTable",
    "MissingCorrelatorError",
    "ReconstructionError",
    "initial_correlators",
    "grading_power",
    "euler_ratio",
    "euler_relation",
    "wdvv_residual",
    "reconstruct",
    "audit_table",
    "basis_preimage",
    "stationary_pairing",
    "verify_flat_pairings",
    "mirror_check",
]


def _qvar():
    return MultiRationalFunction.variable(QVARS, "q")


class MissingCorrelatorError(KeyError):
    """A lookup the table does not determine yet."""

    def __init__(self, key):
        super().__init__(key)
        self.key = key

    def __str__(self):
        return "correlator %r is not determined yet" % (self.key,)


class ReconstructionError(RuntimeError):
    """A level whose linear system is inconsistent or underdetermined."""

    def __init__(self, length, message):
        super().__init__("length %d: %s" % (length, message))
        self.length = length


class FlatBasis:
    """Labels 0..n+1 with their grading weights.

    The identity sits at 0, the divisor direction (the one whose extra
    insertion is controlled by the grading) at 1.  Weight of label i is
    1 - i for i <= n and 1 - n/2 for the primitive label.
    """

    __slots__ = ("n", "weights", "identity", "divisor")

    def __init__(self, n):
        assert n >= 4 and n % 2 == 0, "flat structure needs even n >= 4"
        weights = [mpq(1 - i) for i in range(n + 1)]
        weights.append(mpq(1) - mpq(n, 2))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "identity", 0)
        object.__setattr__(self, "divisor", 1)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __len__(self):
        return self.n + 2

    def labels(self):
        return range(self.n + 2)

    def weight(self, i):
        return self.weights[i]

    def degree(self, i):
        return mpq(i) if i <= self.n else mpq(self.n, 2)


class PairingMatrix:
    """Exact flat metric on the basis directions, with its inverse."""

    __slots__ = ("n", "rows", "inverse_rows")

    def __init__(self, n):
        assert n >= 4 and n % 2 == 0
        size = n + 2
        g = [[mpq(0)] * size for _ in range(size)]
        ginv = [[mpq(0)] * size for _ in range(size)]
        for i in range(n + 1):
            g[i][n - i] = mpq(2)
            ginv[i][n - i] = mpq(1, 2)
        g[n + 1][n + 1] = mpq(2)
        ginv[n + 1][n + 1] = mpq(1, 2)
        for i in range(size):
            for j in range(size):
                acc = sum((g[i][k] * ginv[k][j] for k in range(size)), mpq(0))
                assert acc == (1 if i == j else 0), "inverse failed"
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in g))
        object.__setattr__(self, "inverse_rows", tuple(tuple(r) for r in ginv))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def entry(self, i, j):
        return self.rows[i][j]

    def inverse_entry(self, i, j):
        return self.inverse_rows[i][j]

    def contraction_pairs(self):
        """Nonzero (i, j, inverse entry) triples, each ordered pair once."""
        out = [(i, self.n - i, mpq(1, 2)) for i in range(self.n + 1)]
        out.append((self.n + 1, self.n + 1, mpq(1, 2)))
        return out


class CorrelatorTable:
    """Genus-zero correlators keyed by sorted insertion tuples.

    The table knows through which length it is complete: an absent key at
    or below that length reads as zero, a longer one raises
    MissingCorrelatorError so dependency bugs surface instead of reading
    silent zeros.  Insertions containing the identity are only allowed a
    nonzero value at length 3, where they reproduce the metric.
    """

    __slots__ = ("n", "entries", "complete_length")

    def __init__(self, n):
        assert n >= 4 and n % 2 == 0
        self.n = n
        self.entries = {}
        self.complete_length = 0

    def key(self, insertions):
        key = tuple(sorted(int(i) for i in insertions))
        assert all(0 <= i <= self.n + 1 for i in key), "label out of range"
        return key

    def set(self, insertions, value):
        key = self.key(insertions)
        value = mpq(value)
        if len(key) > 3 and 0 in key:
            assert value == 0, "identity insertions vanish beyond length 3"
        if value:
            self.entries[key] = value
        else:
            self.entries.pop(key, None)

    def value(self, insertions):
        key = self.key(insertions)
        got = self.entries.get(key)
        if got is not None:
            return got
        if len(key) <= self.complete_length:
            return mpq(0)
        raise MissingCorrelatorError(key)

    def known(self, insertions):
        key = self.key(insertions)
        return key in self.entries or len(key) <= self.complete_length

    def mark_complete(self, length):
        assert length >= self.complete_length
        self.complete_length = length

    def copy(self):
        dup = CorrelatorTable(self.n)
        dup.entries.update(self.entries)
        dup.complete_length = self.complete_length
        return dup

    def items(self):
        return sorted(self.entries.items())

    def __len__(self):
        return len(self.entries)


# ---------------------------------------------------------------------------
# exact residue sums over the critical orbit
# ---------------------------------------------------------------------------
# Coefficients are Gaussian rationals stored as (real, imag) pairs of mpq.


def _gmul(u, v):
    return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _ipow(k):
    return ((mpq(1), mpq(0)), (mpq(0), mpq(1)),
            (mpq(-1), mpq(0)), (mpq(0), mpq(-1)))[k % 4]


def _narrow_values(n):
    """Basis values on the nondegenerate orbit as {(y_pow, q_pow): coeff}
    for a root y of y^n = 4q; z1 = 2 y^(-n/2) and z2 = y there."""
    one = (mpq(1), mpq(0))
    vals = {a: {(a, 0): one} for a in range(n)}
    vals[n] = {(n, 0): one, (0, 1): (mpq(-2), mpq(0))}
    s = _ipow(n // 2)
    half = n // 2
    vals[n + 1] = {
        (-half, 1): _gmul(s, (mpq(4), mpq(0))),
        (half, 0): _gmul(s, (mpq(-1), mpq(0))),
    }
    return vals


def _broad_values(n, sign):
    """Basis values at one degenerate point as {half_q_pow: coeff}, the
    value being sum of coeff * q^(h/2); z1 = sign * i^((n-2)/2) / sqrt(q)
    and z2 = 0 there."""
    vals = {0: {0: (mpq(1), mpq(0))}}
    for a in range(1, n):
        vals[a] = {}
    vals[n] = {2: (mpq(-2), mpq(0))}
    vals[n + 1] = {1: _gmul(_ipow(n - 1), (mpq(2 * sign), mpq(0)))}
    return vals


def _residue_sum(n, labels):
    """Exact stationary sum of a product of basis functions weighted by
    the Hessian, returned as {q_power: mpq}."""
    assert n >= 4 and n % 2 == 0
    total = {}  # half power of q -> gaussian coeff

    def add(h, c):
        cur = total.get(h, (mpq(0), mpq(0)))
        total[h] = (cur[0] + c[0], cur[1] + c[1])

    nv = _narrow_values(n)
    prod = {(0, 0): (mpq(1), mpq(0))}
    for a in labels:
        nxt = {}
        for (m1, k1), c1 in prod.items():
            for (m2, k2), c2 in nv[a].items():
                key = (m1 + m2, k1 + k2)
                c = _gmul(c1, c2)
                cur = nxt.get(key)
                nxt[key] = c if cur is None else (cur[0] + c[0], cur[1] + c[1])
        prod = nxt
    for (m, k), c in prod.items():
        if m % n:
            continue  # the orbit sum of y^m vanishes unless n divides m
        j = m // n
        scale = mpq(4) ** j * mpq(1, 2)  # n roots, then the 1/(2nq) weight
        add(2 * (k + j - 1), (c[0] * scale, c[1] * scale))

    for sign in (1, -1):
        bv = _broad_values(n, sign)
        prod = {0: (mpq(1), mpq(0))}
        for a in labels:
            nxt = {}
            for h1, c1 in prod.items():
                for h2, c2 in bv[a].items():
                    c = _gmul(c1, c2)
                    cur = nxt.get(h1 + h2)
                    nxt[h1 + h2] = c if cur is None else (cur[0] + c[0], cur[1] + c[1])
            prod = nxt
        for h, c in prod.items():  # Hessian weight -4q
            add(h - 2, (c[0] * mpq(-1, 4), c[1] * mpq(-1, 4)))

    out = {}
    for h, (re, im) in total.items():
        if re == 0 and im == 0:
            continue
        assert im == 0, "imaginary residue survived the orbit sum"
        assert h % 2 == 0, "fractional q power survived the orbit sum"
        out[h // 2] = re
    return out


def grading_power(n, insertions):
    """Power of q a correlator carries, fixed by the grading."""
    degs = sum((mpq(i) if i <= n else mpq(n, 2) for i in insertions), mpq(0))
    return (degs - n - (len(insertions) - 3)) / n


def initial_correlators(n):
    """Length-3 table from the exact stationary sums.

    Each nonzero sum is a single power of q; the grading predicts that
    power, the prediction is checked, and the rational in front is what
    gets stored.
    """
    table = CorrelatorTable(n)
    for key in itertools.combinations_with_replacement(range(n + 2), 3):
        val = _residue_sum(n, key)
        if not val:
            continue
        d = grading_power(n, key)
        assert d.denominator == 1 and d >= 0, (key, d)
        assert set(val) == {int(d)}, (key, val, d)
        table.set(key, val[int(d)])
    table.mark_complete(3)
    return table


# ---------------------------------------------------------------------------
# grading relation and exchange identities
# ---------------------------------------------------------------------------


def euler_ratio(n, insertions):
    """Multiplier relating a correlator to the one with an extra divisor
    insertion: ((3 - n) - sum of weights) / n."""
    basis = FlatBasis(n)
    wsum = sum((basis.weight(i) for i in insertions), mpq(0))
    return (mpq(3 - n) - wsum) / n


def euler_relation(S, table):
    """Value carrying one more divisor insertion than the stored S.

    Raises MissingCorrelatorError when S itself is not determined, and
    refuses multisets below length 3 (the potential has no such terms).
    """
    key = table.key(S)
    if len(key) < 3:
        raise ValueError("no potential terms of degree <= 2")
    return euler_ratio(table.n, key) * table.value(key)


def _splittings(key):
    """Ordered two-part splittings of a sorted multiset, with the count of
    ways each split arises from distinguishable copies."""
    splits = [((), (), 1)]
    for sym, mult in sorted(
        {s: key.count(s) for s in set(key)}.items()
    ):
        grown = []
        for s1, s2, ways in splits:
            for k in range(mult + 1):
                grown.append(
                    (s1 + (sym,) * k, s2 + (sym,) * (mult - k), ways * comb(mult, k))
                )
        splits = grown
    return splits


def _contract(x, y, z, w, S, table, pairs):
    """One side of the exchange identity: sum over splittings and over the
    metric contraction of <x, y, S1, i> with <j, S2, z, w>."""
    total = mpq(0)
    for s1, s2, ways in _splittings(S):
        left_base = (x, y) + s1
        right_base = s2 + (z, w)
        for i, j, giw in pairs:
            left = table.value(left_base + (i,))
            if not left:
                continue
            right = table.value((j,) + right_base)
            if not right:
                continue
            total += ways * giw * left * right
    return total


def wdvv_residual(a, b, c, d, S, table):
    """Difference of the two quadratic contractions that the exchange of
    the middle insertions must leave equal; zero on a consistent table."""
    pairs = PairingMatrix(table.n).contraction_pairs()
    S = tuple(sorted(S))
    return _contract(a, b, c, d, S, table, pairs) - _contract(
        a, c, b, d, S, table, pairs
    )


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------


class _Irreducible(Exception):
    """An identity that would drag in unknowns beyond the current level."""


def _extend_one_level(n, L, table, pairs):
    """Determine every length-L value from the completed table below."""
    known = {}
    unknown_index = {}
    unknowns = []
    for key in itertools.combinations_with_replacement(range(n + 2), L):
        if 0 in key:
            known[key] = mpq(0)  # identity insertions die beyond length 3
        elif 1 in key:
            base = list(key)
            base.remove(1)
            known[key] = euler_relation(tuple(base), table)
        else:
            unknown_index[key] = len(unknowns)
            unknowns.append(key)

    bank = {}  # pivot column -> (normalized row dict, rhs)

    def insert_row(row, rhs):
        while True:
            hit = None
            for col in row:
                if col in bank:
                    hit = col
                    break
            if hit is None:
                break
            coeff = row.pop(hit)
            brow, brhs = bank[hit]
            for c2, v2 in brow.items():
                if c2 == hit:
                    continue
                nv = row.get(c2, mpq(0)) - coeff * v2
                if nv:
                    row[c2] = nv
                else:
                    row.pop(c2, None)
            rhs -= coeff * brhs
        if not row:
            if rhs:
                raise ReconstructionError(L, "inconsistent linear system")
            return False
        piv = min(row)
        inv = 1 / row[piv]
        row = {c: v * inv for c, v in row.items()}
        rhs *= inv
        for pcol, (brow, brhs) in list(bank.items()):
            f = brow.get(piv)
            if f is None:
                continue
            brow.pop(piv)
            for c2, v2 in row.items():
                if c2 == piv:
                    continue
                nv = brow.get(c2, mpq(0)) - f * v2
                if nv:
                    brow[c2] = nv
                else:
                    brow.pop(c2, None)
            bank[pcol] = (brow, brhs - f * rhs)
        bank[piv] = (row, rhs)
        return True

    def lookup(key):
        """(constant value, scale, column): a known value has column None,
        an unknown contributes scale * x_column.  Keys one step above the
        level reduce through the grading relation when they carry a
        divisor, vanish when they carry the identity, and are refused
        otherwise."""
        size = len(key)
        if size < L:
            return table.value(key), None, None
        if size == L:
            got = known.get(key)
            if got is not None:
                return got, None, None
            return None, mpq(1), unknown_index[key]
        if 0 in key:
            return mpq(0), None, None
        if 1 not in key:
            raise _Irreducible(key)
        base = list(key)
        base.remove(1)
        base = tuple(base)
        ratio = euler_ratio(n, base)
        got = known.get(base)
        if got is not None:
            return ratio * got, None, None
        return None, ratio, unknown_index[base]

    def safe_lookup(key):
        try:
            return lookup(key)
        except _Irreducible:
            return None

    def accumulate(x, y, z, w, S, sgn, coeffs, const):
        for s1, s2, ways in _splittings(S):
            left_base = (x, y) + s1
            right_base = s2 + (z, w)
            for i, j, giw in pairs:
                f = sgn * ways * giw
                k1 = tuple(sorted(left_base + (i,)))
                k2 = tuple(sorted((j,) + right_base))
                t1 = safe_lookup(k1)
                t2 = safe_lookup(k2)
                if t1 is None or t2 is None:
                    # an out-of-reach factor is harmless when its partner
                    # is a known zero
                    other = t2 if t1 is None else t1
                    if other is not None and other[2] is None and not other[0]:
                        continue
                    raise _Irreducible(k1 if t1 is None else k2)
                v1, r1, u1 = t1
                v2, r2, u2 = t2
                if u1 is None and u2 is None:
                    if v1 and v2:
                        const += f * v1 * v2
                elif u1 is None:
                    if v1:
                        coeffs[u2] = coeffs.get(u2, mpq(0)) + f * v1 * r2
                elif u2 is None:
                    if v2:
                        coeffs[u1] = coeffs.get(u1, mpq(0)) + f * v2 * r1
                else:
                    raise _Irreducible((k1, k2))  # quadratic in unknowns
        return const

    def feed_row(a, b, c, d, S):
        coeffs = {}
        try:
            const = accumulate(a, b, c, d, S, 1, coeffs, mpq(0))
            const = accumulate(a, c, b, d, S, -1, coeffs, const)
        except _Irreducible:
            return
        coeffs = {k: v for k, v in coeffs.items() if v}
        if not coeffs:
            if const:
                raise ReconstructionError(L, "inconsistent identity")
            return
        insert_row(coeffs, -const)

    target = len(unknowns)
    if target:
        sym = range(2, n + 2)

        def candidates():
            # identities with the divisor up front drive the narrow
            # elimination ladder; the mixed family covers the rest; the
            # longer family (one extra insertion, top terms reduced
            # through the grading relation) pins the all-primitive
            # directions.
            for S in itertools.combinations_with_replacement(sym, L - 3):
                for b in sym:
                    for c, d in itertools.combinations_with_replacement(sym, 2):
                        if b == c:
                            continue
                        yield 1, b, c, d, S
                for a, b in itertools.combinations_with_replacement(sym, 2):
                    for c, d in itertools.combinations_with_replacement(
                        range(1, n + 2), 2
                    ):
                        if b == c:
                            continue
                        yield a, b, c, d, S
            for S in itertools.combinations_with_replacement(sym, L - 2):
                for a in reversed(sym):
                    for b in sym:
                        for d in reversed(range(n + 2)):
                            if d == 1:
                                continue
                            yield a, b, 1, d, S

        for a, b, c, d, S in candidates():
            feed_row(a, b, c, d, S)
            if len(bank) == target:
                break
        if len(bank) < target:
            missing = [unknowns[i] for i in range(target)
                       if i not in bank][:4]
            raise ReconstructionError(
                L,
                "underdetermined: %d of %d directions pinned; first free: %r"
                % (len(bank), target, missing),
            )
        for piv, (row, rhs) in bank.items():
            assert row == {piv: mpq(1)}, "bank not fully reduced"
            table.set(unknowns[piv], rhs)

    for key, val in known.items():
        if val:
            table.set(key, val)
    table.mark_complete(L)


def reconstruct(n, max_length, seed=None, audit=True):
    """Extend the three-point table to every length <= max_length.

    Per length, insertions containing the identity vanish, one extra
    divisor insertion comes from the grading relation, and the remaining
    values solve an exact linear system collected from exchange identities
    whose only length-L terms are linear in the unknowns.  The finished
    table is audited unless audit=False: every exchange residual with
    total insertions within budget must vanish, as must every value with
    an odd number of primitive insertions.
    """
    assert max_length >= 3
    if seed is None:
        table = initial_correlators(n)
    else:
        assert isinstance(seed, CorrelatorTable) and seed.n == n
        assert seed.complete_length >= 3, "seed must cover length 3"
        table = seed
    pairs = PairingMatrix(n).contraction_pairs()
    for L in range(table.complete_length + 1, max_length + 1):
        _extend_one_level(n, L, table, pairs)
    if audit:
        audit_table(table, max_length)
    return table


def audit_table(table, max_length):
    """Residual sweep over the finished table.

    Checks, for every insertion multiset within the length budget: odd
    primitive counts vanish, identity-bearing lengths >= 4 vanish, and
    every exchange identity with total insertions <= max_length holds.
    Raises ReconstructionError on the first failure.
    """
    n = table.n
    for L in range(3, max_length + 1):
        for key in itertools.combinations_with_replacement(range(n + 2), L):
            val = table.value(key)
            if not val:
                continue
            if key.count(n + 1) % 2:
                raise ReconstructionError(L, "odd primitive count: %r" % (key,))
            if L > 3 and 0 in key:
                raise ReconstructionError(L, "identity did not vanish: %r" % (key,))
    pairs = PairingMatrix(n).contraction_pairs()
    for total in range(4, max_length + 1):
        for S in itertools.combinations_with_replacement(range(n + 2), total - 4):
            for quad in itertools.combinations_with_replacement(range(n + 2), 4):
                a, b, c, d = quad
                w1 = _contract(a, b, c, d, S, table, pairs)
                w2 = _contract(a, c, b, d, S, table, pairs)
                if w1 != w2:
                    raise ReconstructionError(
                        total, "exchange residual %r | %r" % (quad, S)
                    )
                w3 = _contract(a, d, b, c, S, table, pairs)
                if w1 != w3:
                    raise ReconstructionError(
                        total, "exchange residual %r | %r" % (quad, S)
                    )
    return True


# ---------------------------------------------------------------------------
# stationary-phase pairings
# ---------------------------------------------------------------------------


def basis_preimage(n, i):
    """Function-ring representative of flat direction i."""
    assert 0 <= i <= n + 1
    if i == n + 1:
        return f2(n)
    elem = MilnorElement.z2pow(n, i)
    if i == n:
        elem = elem - MilnorElement.one(n).scale(GaussQ(2 * _qvar()))
    return elem


def _eval_at_point(f, point, q):
    if isinstance(f, MilnorElement):
        return f.eval_at(point.coords[0], point.coords[1], q)
    if callable(f):
        return complex(f(point.coords[0], point.coords[1], q))
    return complex(f)


def stationary_pairing(n, q, f, g):
    """Leading stationary sum of f*g over the n+2 critical points, each
    weighted by the reciprocal Hessian.  f and g may be function-ring
    elements, plain numbers, or callables of (z1, z2, q)."""
    qc = complex(q)
    if qc == 0:
        raise ValueError("the critical orbit degenerates at q = 0")
    total = 0j
    for point in critical_points(n, qc):
        fv = _eval_at_point(f, point, qc)
        gv = _eval_at_point(g, point, qc)
        total += fv * gv / point.hessian_omega
    return total


def verify_flat_pairings(n, q, tol=1e-9):
    """Numeric confirmation that the stationary sums reproduce the exact
    metric.  Returns a report dict: per-check values, worst error, and the
    names of any failing pairs."""
    assert n >= 4 and n % 2 == 0
    qc = complex(q)
    report = {"n": n, "q": qc, "tol": float(tol), "checks": {}, "failures": []}

    def record(name, got, want):
        err = abs(got - want)
        ok = err <= tol * max(1.0, abs(want))
        report["checks"][name] = {
            "value": got,
            "expected": want,
            "error": err,
            "ok": ok,
        }
        if not ok:
            report["failures"].append(name)

    powers = [MilnorElement.z2pow(n, i) for i in range(n + 1)]
    for i in range(n + 1):
        for j in range(i, n + 1):
            want = 0j
            if i + j == n:
                want += 2
            if i == n and j == n:
                want += 8 * qc
            record(
                "power[%d,%d]" % (i, j),
                stationary_pairing(n, qc, powers[i], powers[j]),
                want,
            )

    beta = MilnorElement.z1(n).scale(GaussQ(_qvar())) - MilnorElement.z2pow(
        n, n // 2
    ).scale(GaussQ(mpq(1, 2)))
    for i in range(n + 1):
        record(
            "power-beta[%d]" % i,
            stationary_pairing(n, qc, powers[i], beta),
            0j,
        )
    record(
        "beta-beta",
        stationary_pairing(n, qc, beta, beta),
        complex((-1) ** (n // 2)) / 2,
    )

    pm = PairingMatrix(n)
    pre = [basis_preimage(n, i) for i in range(n + 2)]
    for i in range(n + 2):
        for j in range(i, n + 2):
            record(
                "flat[%d,%d]" % (i, j),
                stationary_pairing(n, qc, pre[i], pre[j]),
                complex(float(pm.entry(i, j))),
            )

    report["max_error"] = max(
        (c["error"] for c in report["checks"].values()), default=0.0
    )
    report["ok"] = not report["failures"]
    return report


# ---------------------------------------------------------------------------
# the finite-order comparison with the quantum side
# ---------------------------------------------------------------------------


def mirror_check(n, max_length, seed=None):
    """True iff the residue seed equals the quantum three-point data, the
    residue metric equals the Poincare pairing, the grading weights agree,
    and the reconstruction extends the seed through max_length without
    contradiction."""
    basis = FlatBasis(n)
    table = seed if seed is not None else initial_correlators(n)
    qvar = _qvar()

    for key in itertools.combinations_with_replacement(range(n + 2), 3):
        mine = table.value(key)
        theirs = three_point_seed(n, *key)
        if not mine:
            if not theirs.is_zero():
                return False
            continue
        d = grading_power(n, key)
        if d.denominator != 1 or d < 0:
            return False
        lifted = MultiRationalFunction.constant(QVARS, mine) * qvar ** int(d)
        if lifted != theirs:
            return False

    pm = PairingMatrix(n)
    for a in range(n + 2):
        for b in range(n + 2):
            if pairing_value(n, a, b) != pm.entry(a, b):
                return False

    for i in basis.labels():
        half_degree = mpq(i) if i <= n else mpq(n, 2)
        if basis.weight(i) != 1 - half_degree:
            return False

    try:
        reconstruct(n, max_length, seed=table.copy(), audit=True)
    except ReconstructionError:
        return False
    return True

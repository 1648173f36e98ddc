"""Picard-Fuchs operators in D = hbar d/d hbar and their derivation.

Contents: a small Weyl-type operator algebra over Q[q, hbar^(+-1)] with the
commutation D o hbar^m = hbar^m (D + m); the narrow operator

    P_na = D^(n+1) - 2 q (-n)^n hbar^(-n) (2D - n)

with its left-ideal reduction table D^(n+k) -> 2 q (-n)^n hbar^(-n)
(D-n)^(k-1) (2D-n); the operators E_k = (n/2 + D)^k D^(n/2), their
reductions G_k, the (n+2) x (n+3) coefficient matrix whose kernel vector
v_k assembles the broad operator

    P_br = (D^2 - n^2/4)^(n/2+1) - 4 n^n q hbar^(-n) (D - n/2)(D - n);

twisted-coboundary identities for the Gauss-Manin connection on both
charts, with a numeric-discovery / exact-verification split, and a rewrite
engine that replays the full derivation of both operators from those
identities.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb

import sympy
from gmpy2 import mpq

from .algebra import LaurentPoly, MultiRationalFunction, mrf_context
from .lgmodel import build_chart
from .linalg import laurent_nullvector_last_one, laurent_rank, mpq_rref


def _coerce_laurent(c):
    if isinstance(c, LaurentPoly):
        return c
    return LaurentPoly.const(c)


class DiffOp:
    """Operator sum_j c_j(hbar, q) D^j, coefficients acting by left
    multiplication, D = hbar d/d hbar."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        if coeffs:
            for j, c in coeffs.items():
                c = _coerce_laurent(c)
                if c:
                    assert isinstance(j, int) and j >= 0
                    clean[j] = c
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def from_d_poly(cls, poly_coeffs):
        """Constant-coefficient operator from {power: rational}."""
        return cls({j: LaurentPoly.const(c) for j, c in dict(poly_coeffs).items()})

    def order(self):
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, j):
        return self.coeffs.get(j, LaurentPoly())

    def __add__(self, other):
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            s = out.get(j, LaurentPoly()) + c
            if s:
                out[j] = s
            else:
                out.pop(j, None)
        return DiffOp(out)

    def __neg__(self):
        return DiffOp({j: -c for j, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _coerce_laurent(c)
        return DiffOp({j: c * v for j, v in self.coeffs.items()})

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted((j, c) for j, c in self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for j in sorted(self.coeffs, reverse=True):
            c = self.coeffs[j]
            cs = repr(c)
            if len(c.terms) > 1:
                cs = "(%s)" % cs
            bits.append(cs if j == 0 else ("%s*D^%d" % (cs, j) if j > 1 else "%s*D" % cs))
        return " + ".join(bits)

    def to_json(self):
        out = []
        for j in sorted(self.coeffs, reverse=True):
            terms = []
            for (h, qp), c in self.coeffs[j].sorted_terms():
                terms.append(
                    {
                        "hpow": h,
                        "qpow": qp,
                        "num": str(c.numerator),
                        "den": str(c.denominator),
                    }
                )
            out.append({"k": j, "coeff": terms})
        return out


def _apply_D_once(op):
    """D o op, using D o (c D^j) = (hbar dc/dhbar) D^j + c D^(j+1)."""
    out = {}
    for j, c in op.coeffs.items():
        dc = c.d_log_hbar()
        if dc:
            out[j] = out.get(j, LaurentPoly()) + dc
            if not out[j]:
                del out[j]
        out[j + 1] = out.get(j + 1, LaurentPoly()) + c
        if not out[j + 1]:
            del out[j + 1]
    return DiffOp(out)


def compose(A, B):
    """Operator product A o B."""
    if not A.coeffs or not B.coeffs:
        return DiffOp()
    powers = {0: B}
    top = max(A.coeffs)
    cur = B
    for r in range(1, top + 1):
        cur = _apply_D_once(cur)
        powers[r] = cur
    total = DiffOp()
    for r, a in A.coeffs.items():
        total = total + powers[r].scale(a)
    return total


def narrow_operator(n):
    """Monic annihilator of the narrow periods:
    D^(n+1) - 2 q (-n)^n hbar^(-n) (2D - n).
    n=4: D^5 - 1024 q hbar^-4 D + 2048 q hbar^-4;
    n=2: D^3 - 16 q hbar^-2 D + 16 q hbar^-2."""
    assert n >= 2
    c = 2 * mpq(-n) ** n
    return DiffOp(
        {
            n + 1: 1,
            1: LaurentPoly.term(-2 * c, hpow=-n, qpow=1),
            0: LaurentPoly.term(n * c, hpow=-n, qpow=1),
        }
    )


class ReductionTable:
    """Closed-form left-ideal reductions D^(n+k) ->
    2 q (-n)^n hbar^(-n) (D - n)^(k-1) (2D - n), k >= 1."""

    def __init__(self, n):
        self.n = n
        self._cache = {}

    def reduced(self, k):
        assert k >= 1
        hit = self._cache.get(k)
        if hit is None:
            n = self.n
            poly = {0: mpq(1)}
            for _ in range(k - 1):  # multiply by (x - n)
                nxt = {}
                for j, c in poly.items():
                    nxt[j + 1] = nxt.get(j + 1, mpq(0)) + c
                    nxt[j] = nxt.get(j, mpq(0)) - n * c
                poly = nxt
            nxt = {}
            for j, c in poly.items():  # multiply by (2x - n)
                nxt[j + 1] = nxt.get(j + 1, mpq(0)) + 2 * c
                nxt[j] = nxt.get(j, mpq(0)) - n * c
            scale = 2 * mpq(-n) ** self.n
            hit = DiffOp(
                {j: LaurentPoly.term(scale * c, hpow=-n, qpow=1) for j, c in nxt.items()}
            )
            self._cache[k] = hit
        return hit

    def apply(self, op):
        """Reduce an operator using the table in one pass, top power down."""
        n = self.n
        out = DiffOp()
        work = dict(op.coeffs)
        while work:
            j = max(work)
            c = work.pop(j)
            if not c:
                continue
            if j <= n:
                out = out + DiffOp({j: c})
                continue
            repl = self.reduced(j - n).scale(c)
            for jj, cc in repl.coeffs.items():
                s = work.get(jj, LaurentPoly()) + cc
                if s:
                    work[jj] = s
                else:
                    work.pop(jj, None)
        return out


def reduce_mod_narrow(op, n):
    """Remainder of op modulo the left ideal generated by the monic narrow
    operator: repeatedly subtract (c_r D^(r-n-1)) o P_na. Idempotent, order
    <= n, and a left-module homomorphism."""
    P = narrow_operator(n)
    cur = op
    while cur.order() > n:
        r = cur.order()
        c = cur.coeff(r)
        cur = cur - compose(DiffOp({r - n - 1: c}), P)
        assert cur.order() < r, "reduction failed to drop the order"
    return cur


def e_operator(n, k):
    """E_k = (n/2 + D)^k o D^(n/2) with constant coefficients (even n)."""
    assert n % 2 == 0
    half = mpq(n, 2)
    poly = {n // 2: mpq(1)}
    for _ in range(k):
        nxt = {}
        for j, c in poly.items():
            nxt[j + 1] = nxt.get(j + 1, mpq(0)) + c
            nxt[j] = nxt.get(j, mpq(0)) + half * c
        poly = nxt
    return DiffOp.from_d_poly(poly)


def g_operator(n, k, table=None):
    """G_k = E_k reduced modulo the narrow operator."""
    if table is None:
        return reduce_mod_narrow(e_operator(n, k), n)
    return table.apply(e_operator(n, k))


def coefficient_matrix(n):
    """Matrix a[j][k] (rows j = 0..n+1, columns k = 0..n+2): coefficient of
    D^j in G_k for j <= n, and the pure-power row a[n+1][k] = (n/2)^k coming
    from the extra flat section. Rank is n+2 for even n."""
    assert n % 2 == 0
    table = ReductionTable(n)
    cols = [g_operator(n, k, table) for k in range(n + 3)]
    rows = []
    for j in range(n + 1):
        rows.append([cols[k].coeff(j) for k in range(n + 3)])
    rows.append(
        [LaurentPoly.const(mpq(n, 2) ** k) for k in range(n + 3)]
    )
    return rows


def solve_vk(n):
    """The unique kernel vector of the coefficient matrix with v_{n+2} = 1.
    Entries are Laurent polynomials in q * hbar^(-n)."""
    return laurent_nullvector_last_one(coefficient_matrix(n))


def closed_form_vk(n, k):
    """Closed form of the kernel vector entries:

    odd k:  6 n^(n+1) q hbar^(-n) at k = 1, else 0;
    even k: (-1)^((n-k)/2 + 1) (n/2)^(n-k+2) binom(n/2+1, k/2)
            - [k=2] 4 n^n q hbar^(-n) - [k=0] 2 n^(n+2) q hbar^(-n).
    """
    assert n % 2 == 0 and 0 <= k <= n + 2
    if k % 2 == 1:
        if k == 1:
            return LaurentPoly.term(6 * mpq(n) ** (n + 1), hpow=-n, qpow=1)
        return LaurentPoly()
    half = mpq(n, 2)
    m = k // 2
    binom = mpq(1)
    for i in range(m):
        binom = binom * (n // 2 + 1 - i) / (i + 1)
    out = LaurentPoly.const(mpq(-1) ** ((n - k) // 2 + 1) * half ** (n - k + 2) * binom)
    if k == 2:
        out = out + LaurentPoly.term(-4 * mpq(n) ** n, hpow=-n, qpow=1)
    if k == 0:
        out = out + LaurentPoly.term(-2 * mpq(n) ** (n + 2), hpow=-n, qpow=1)
    return out


def broad_operator(n):
    """P_br = (D^2 - n^2/4)^(n/2+1) - 4 n^n q hbar^(-n) (D - n/2)(D - n).
    n=4: D^6 - 12 D^4 + 48 D^2 - 64 - 1024 q hbar^(-4) (D^2 - 6D + 8)."""
    assert n % 2 == 0
    half2 = mpq(n, 2) ** 2
    poly = {0: mpq(1)}
    for _ in range(n // 2 + 1):
        nxt = {}
        for j, c in poly.items():
            nxt[j + 2] = nxt.get(j + 2, mpq(0)) + c
            nxt[j] = nxt.get(j, mpq(0)) - half2 * c
        poly = nxt
    out = DiffOp.from_d_poly(poly)
    s = 4 * mpq(n) ** n
    tail = {
        2: LaurentPoly.term(-s, hpow=-n, qpow=1),
        1: LaurentPoly.term(s * 3 * mpq(n, 2), hpow=-n, qpow=1),
        0: LaurentPoly.term(-s * mpq(n, 2) * n, hpow=-n, qpow=1),
    }
    return out + DiffOp(tail)


def assembled_broad_operator(n):
    """sum_k v_k D^k with v_k from the kernel vector (left coefficients)."""
    v = solve_vk(n)
    return DiffOp({k: v[k] for k in range(len(v))})


def shift_operator(op, s):
    """Conjugate op by hbar^s: coefficients keep their hbar powers but each
    D^j re-expands as (D + s)^j, since hbar^-s D hbar^s = D + s."""
    out = {}
    for j, c in op.coeffs.items():
        for i in range(j + 1):
            piece = c * (comb(j, i) * mpq(s) ** (j - i))
            out[i] = out.get(i, LaurentPoly({})) + piece
    return DiffOp({k: v for k, v in out.items() if v.terms})


def broad_ideal_membership(n):
    """Left-ideal witness for broad annihilation of derived solutions.

    Conjugating the broad operator by hbar^{n/2} and composing with D^{n/2}
    lands in the left ideal of the narrow operator:

        shift(P_broad, n/2) . D^{n/2}  ==  0   mod  P_narrow,

    checked by exhaustive reduction.  Hence P_broad kills
    q^-1 hbar^{n/2} D^{n/2} xi for every narrow solution xi.  Returns True,
    raising on failure."""
    assert n % 2 == 0 and n >= 2
    shifted = shift_operator(broad_operator(n), mpq(n, 2))
    composed = DiffOp({k + n // 2: c for k, c in shifted.coeffs.items()})
    assert reduce_mod_narrow(composed, n).is_zero()
    return True


# ---------------------------------------------------------------------------
# twisted coboundaries on a chart
# ---------------------------------------------------------------------------


def twisted_coboundary(chart, pairs):
    """Exact data of the twisted coboundary determined by contraction pairs
    [(f_j, varname_j)]: returns (A, B) with

        A = sum_j d(f_j g)/d var_j / g,   B = sum_j f_j dW0/d var_j,

    so that [(hbar A + B) Omega] = 0 in the twisted de Rham complex.
    Example (z-chart, n=4, pairs [(z1^2, z1), (-z1*z4, z4)]):
    A = z1, B = q z1^3 z4/(z1 z2 z3 z4 - 1) - z1 z3 z4.
    """
    g = chart.normalizer
    A = None
    B = None
    for f, var in pairs:
        a = (f * g).diff(var) / g
        b = f * chart.W0.diff(var)
        A = a if A is None else A + a
        B = b if B is None else B + b
    return A, B


def _contraction_triple(entry):
    if len(entry) == 2:
        return entry[0], entry[1], 0
    return entry


@dataclass(frozen=True)
class CoboundaryIdentity:
    """A Gauss-Manin identity nabla_{hbar^2 d/dhbar} [f Omega] =
    sum_i c_i(hbar) [f_i Omega], certified by a rational combination of
    twisted coboundaries from the given contraction pairs. A contraction
    entry (f_j, var) contributes hbar A_j + B_j; an entry (f_j, var, m)
    contributes hbar^m (hbar A_j + B_j), which lets the hbar-graded parts
    of a combination cancel level by level."""

    name: str
    chart: object
    lhs_f: MultiRationalFunction
    rhs: tuple            # ((c_i as {hpow: mpq}, f_i MultiRationalFunction), ...)
    contractions: tuple   # ((f_j, varname[, hpow]), ...)
    combo: tuple = field(default=())   # rational d_j, one per contraction

    def _extended(self):
        names = self.chart.vars + ("h",)
        gens, C = mrf_context(names)
        lift = {v: gens[v] for v in self.chart.vars}
        return names, gens, C, lift

    def residual(self, combo=None):
        """-W0 f - sum_i c_i f_i - sum_j d_j hbar^m_j (hbar A_j + B_j)."""
        combo = self.combo if combo is None else combo
        assert len(combo) == len(self.contractions)
        names, gens, C, lift = self._extended()
        h = gens["h"]
        W0 = self.chart.W0.evaluate(lift)
        g = self.chart.normalizer
        res = -W0 * self.lhs_f.evaluate(lift)
        for c_i, f_i in self.rhs:
            cpoly = C(0)
            for hpow, cc in c_i.items():
                cpoly = cpoly + C(cc) * h ** hpow
            res = res - cpoly * f_i.evaluate(lift)
        for d_j, entry in zip(combo, self.contractions):
            if not d_j:
                continue
            f_j, var, m = _contraction_triple(entry)
            a = ((f_j * g).diff(var) / g).evaluate(lift)
            b = (f_j * self.chart.W0.diff(var)).evaluate(lift)
            res = res - C(d_j) * h ** m * (h * a + b)
        return res

    def verify(self):
        assert self.combo, "no combination coefficients fixed; discover first"
        res = self.residual()
        assert res.is_zero(), "identity %s failed: residual %r" % (self.name, res)
        return True


def discover_combination(identity, seed=0, extra_samples=6):
    """Find rational d_j making the coboundary combination exact, by exact
    evaluation at random rational points followed by a linear solve. The
    result must then be certified with identity.verify(); discovery alone
    proves nothing."""
    rng = random.Random(seed)
    chart = identity.chart
    names = chart.vars + ("h",)
    g = chart.normalizer
    cols = []
    for entry in identity.contractions:
        f_j, var, m = _contraction_triple(entry)
        cols.append(((f_j * g).diff(var) / g, f_j * chart.W0.diff(var), m))
    nunk = len(cols)
    rows, rhs_vals = [], []
    attempts = 0
    while len(rows) < nunk + extra_samples:
        attempts += 1
        assert attempts < 20 * (nunk + extra_samples), \
            "could not sample enough regular points"
        pt = {v: mpq(rng.randint(2, 17), rng.randint(1, 7)) for v in names}
        try:
            hv = pt["h"]
            row = [
                hv ** m * (a.evaluate(pt) * hv + b.evaluate(pt))
                for a, b, m in cols
            ]
            target = -chart.W0.evaluate(pt) * identity.lhs_f.evaluate(pt)
            for c_i, f_i in identity.rhs:
                cval = sum((cc * hv ** hp for hp, cc in c_i.items()), mpq(0))
                target = target - cval * f_i.evaluate(pt)
        except ZeroDivisionError:
            continue
        rows.append(row)
        rhs_vals.append(target)
    aug = [r + [t] for r, t in zip(rows, rhs_vals)]
    rref, pivots = mpq_rref(aug, nunk + 1)
    if nunk in pivots:
        raise ValueError("no coboundary combination exists for %s" % identity.name)
    sol = [mpq(0)] * nunk
    for r, pc in enumerate(pivots):
        sol[pc] = rref[r][nunk]
    return tuple(sol)


# ---------------------------------------------------------------------------
# the concrete identities behind both Picard-Fuchs operators
# ---------------------------------------------------------------------------


def _givental_products(n):
    chart = build_chart(n, "givental")
    gens, C = mrf_context(chart.vars)
    ys = [gens["y%d" % i] for i in range(1, n)]

    def prod_y(l):
        out = C(1)
        for i in range(l):
            out = out * ys[i]
        return out

    return chart, gens, C, prod_y


def y_chain_identity(n, l, discover_seed=1):
    """nabla [y_1...y_l Omega] = l hbar [y_1...y_l Omega]
    - n [y_1...y_{l+1} Omega] for l < n-1, and at l = n-1
    = (n-1) hbar [prod y Omega] - 2nq [x_1 Omega] - 2nq [Omega]."""
    assert 0 <= l <= n - 1
    chart, gens, C, prod_y = _givental_products(n)
    lhs = prod_y(l)
    if l < n - 1:
        rhs = (({1: mpq(l)}, prod_y(l)), ({0: mpq(-n)}, prod_y(l + 1)))
    else:
        q = gens["q"]
        rhs = (
            ({1: mpq(n - 1)}, prod_y(n - 1)),
            ({0: mpq(-2 * n)}, q * gens["x1"]),
            ({0: mpq(-2 * n)}, q * C(1)),
        )
    contractions = [(prod_y(l) * gens["y%d" % j], "y%d" % j) for j in range(1, n)]
    if l == n - 1:
        contractions.append((prod_y(n - 1) * gens["x1"], "x1"))
    ident = CoboundaryIdentity(
        "y-chain l=%d n=%d" % (l, n), chart, lhs, rhs, tuple(contractions)
    )
    combo = discover_combination(ident, seed=discover_seed)
    return CoboundaryIdentity(
        ident.name, chart, lhs, rhs, tuple(contractions), combo
    )


def x1_identity(n, discover_seed=2):
    """nabla [x_1 Omega] = n hbar [x_1 Omega] - n [y_1 Omega]."""
    chart, gens, C, prod_y = _givental_products(n)
    x1 = gens["x1"]
    lhs = x1 * C(1)
    rhs = (({1: mpq(n)}, lhs), ({0: mpq(-n)}, gens["y1"] * C(1)))
    contractions = [(x1 * gens["y%d" % j], "y%d" % j) for j in range(1, n)]
    contractions.append((gens["y1"] * C(1), "y1"))
    contractions.append((x1 * x1 + x1, "x1"))
    ident = CoboundaryIdentity("x1 n=%d" % n, chart, lhs, rhs, tuple(contractions))
    combo = discover_combination(ident, seed=discover_seed)
    return CoboundaryIdentity(ident.name, chart, lhs, rhs, tuple(contractions), combo)


def _z_products(n):
    chart = build_chart(n, "z")
    gens, C = mrf_context(chart.vars)

    def prod_z(m):
        # z_1 z_2 ... z_m
        out = C(1)
        for i in range(1, m + 1):
            out = out * gens["z%d" % i]
        return out

    return chart, gens, C, prod_z


def y_product_in_z(n, l, gens, C):
    """The Givental product y_1...y_l written in z-coordinates:
    1, z_2, and for l >= 2 the monomial z_2^2 z_3^2 ... z_l^2 z_{l+1}."""
    if l == 0:
        return C(1)
    out = gens["z2"] * C(1)
    for i in range(3, l + 1):
        out = out * gens["z%d" % i] ** 2
    if l >= 2:
        out = out * gens["z2"] * gens["z%d" % (l + 1)]
    return out


def quotient_relation_states(n):
    """Engine elements R_j = Y_{n/2+j} - 2 q B_j, j = 1..n/2-1, keyed by j.

    The label module carries n + 1 + n/2 generators over the rank-(n+2)
    twisted cohomology; these combinations span the excess.  Exact facts
    verified by the identity suite: D preserves their span (the chain
    D R_j = (n/2+j) R_j - n hbar^-1 R_{j+1} closes with R_{n/2} = 0), the
    broad operator's residual on [z_1 Omega] is a combination of them, and
    both sides of each relation take equal values at every critical point
    (relation_critical_values_exact).  Their vanishing as classes is
    supported numerically by stationary-phase expansions on every thimble
    (saddle module); no closed-form coboundary certificate is part of the
    package."""
    assert n % 2 == 0 and n >= 4
    out = {}
    for j in range(1, n // 2):
        out[j] = {
            ("Y", n // 2 + j): LaurentPoly.const(1),
            ("B", j): LaurentPoly.term(-2, qpow=1),
        }
    return out


def label_representatives(n):
    """z-chart rational representatives of the engine labels.

    The chart map carries the Givental volume normalizer to the z-chart one
    with unit Jacobian correction, so Givental monomials pull back verbatim:
    Y_l -> y_1...y_l in z-variables, X -> prod z - 1, B_k -> z_1...z_{2k}
    (B_0 -> z_1).  Returns (chart, {label: f})."""
    chart, gens, C, prod_z = _z_products(n)
    reps = {("Y", l): y_product_in_z(n, l, gens, C) for l in range(n)}
    reps[("X",)] = prod_z(n) - C(1)
    reps[("B", 0)] = gens["z1"] * C(1)
    for k in range(1, n // 2):
        reps[("B", k)] = prod_z(2 * k)
    return chart, reps


def relation_critical_values_exact(n):
    """Order-zero exactness of the quotient relations: substituting the
    algebraic critical-point parametrizations makes both sides of
    Y_{n/2+j} = 2 q B_j agree identically.

    Narrow family: z_1 = 2/y^(n/2), z_even = y, z_odd = 1 with q = y^n / 4
    covers all n branches at once as polynomials in y.  Broad pair: every
    monomial on either side carries a z_even factor, so both sides vanish.
    Returns True, raising on any failure."""
    assert n % 2 == 0 and n >= 4
    y = sympy.Symbol("y")
    chart, reps = label_representatives(n)
    narrow = {"z1": 2 / y ** (n // 2), "q": y ** n / sympy.Integer(4)}
    for i in range(2, n + 1):
        narrow["z%d" % i] = y if i % 2 == 0 else sympy.Integer(1)

    def narrow_value(f):
        def poly_val(poly):
            total = sympy.Integer(0)
            for exps, coeff in poly.items():
                term = sympy.Rational(int(coeff.numerator),
                                      int(coeff.denominator))
                for name, e in zip(f.vars, exps):
                    if e:
                        term *= narrow[name] ** e
                total += term
            return total

        return poly_val(f.num) / poly_val(f.den)

    def touches_even(f):
        even_slots = [i for i, name in enumerate(f.vars)
                      if name.startswith("z") and int(name[1:]) % 2 == 0]
        return all(any(exps[i] for i in even_slots) for exps in f.num)

    for j in range(1, n // 2):
        lhs = reps[("Y", n // 2 + j)]
        rhs = reps[("B", j)]
        diff = narrow_value(lhs) - 2 * narrow["q"] * narrow_value(rhs)
        assert sympy.simplify(diff) == 0, "narrow failure at j=%d" % j
        assert touches_even(lhs) and touches_even(rhs), \
            "broad failure at j=%d" % j
    return True


def broad_chain_identity(n, k, discover_seed=3):
    """nabla [z_1...z_{2k} Omega] = (n/2+k) hbar [z_1...z_{2k} Omega]
    - n [z_1...z_{2k+2} Omega], for 0 <= k <= n/2 - 1, where the k = 0
    class is [z_1 Omega]."""
    assert n % 2 == 0 and 0 <= k <= n // 2 - 1
    chart, gens, C, prod_z = _z_products(n)
    lhs = gens["z1"] * C(1) if k == 0 else prod_z(2 * k)
    nxt = prod_z(2 * k + 2)
    rhs = (({1: mpq(n, 2) + k}, lhs), ({0: mpq(-n)}, nxt))
    contractions = [(lhs * gens["z%d" % j], "z%d" % j) for j in range(1, n + 1)]
    ident = CoboundaryIdentity(
        "broad-chain k=%d n=%d" % (k, n), chart, lhs, rhs, tuple(contractions)
    )
    combo = discover_combination(ident, seed=discover_seed + k)
    return CoboundaryIdentity(ident.name, chart, lhs, rhs, tuple(contractions), combo)


# ---------------------------------------------------------------------------
# replaying the derivations: a rewrite engine for the connection action
# ---------------------------------------------------------------------------


class GaussManinEngine:
    """Action of D = hbar d/d hbar (through the connection) on the span of

        Y_l = [y_1...y_l Omega] (Givental chart, 0 <= l <= n-1),
        X   = [x_1 Omega],
        B_k = [z_1...z_{2k} Omega] (z-chart, 0 <= k <= n/2-1, B_0 = [z_1 Omega]),

    with the cross-chart relation [prod z Omega] = [(x_1 + 1) Omega]
    = X + Y_0. Rules are exactly the certified coboundary identities; pass
    verify=True to re-certify them on construction.
    """

    def __init__(self, n, verify=False):
        assert n % 2 == 0 and n >= 2
        self.n = n
        if verify:
            for l in range(n):
                y_chain_identity(n, l).verify()
            x1_identity(n).verify()
            for k in range(n // 2):
                broad_chain_identity(n, k).verify()
        rules = {}
        inv_h = LaurentPoly.term(1, hpow=-1)
        for l in range(n - 1):
            rules[("Y", l)] = {
                ("Y", l): LaurentPoly.const(l),
                ("Y", l + 1): inv_h * LaurentPoly.const(-n),
            }
        c = inv_h * LaurentPoly.term(-2 * n, qpow=1)
        rules[("Y", n - 1)] = {
            ("Y", n - 1): LaurentPoly.const(n - 1),
            ("X",): c,
            ("Y", 0): c,
        }
        rules[("X",)] = {
            ("X",): LaurentPoly.const(n),
            ("Y", 1): inv_h * LaurentPoly.const(-n),
        }
        for k in range(n // 2):
            tgt = {("B", k): LaurentPoly.const(mpq(n, 2) + k)}
            step = inv_h * LaurentPoly.const(-n)
            if k + 1 <= n // 2 - 1:
                tgt[("B", k + 1)] = step
            else:
                # B_{n/2} = [prod z Omega] = X + Y_0
                tgt[("X",)] = step
                tgt[("Y", 0)] = step
            rules[("B", k)] = tgt
        self.rules = rules

    def element(self, label, coeff=1):
        return {label: _coerce_laurent(coeff)}

    def apply_D(self, elem):
        out = {}

        def add(label, c):
            s = out.get(label, LaurentPoly()) + c
            if s:
                out[label] = s
            else:
                out.pop(label, None)

        for label, c in elem.items():
            dc = c.d_log_hbar()
            if dc:
                add(label, dc)
            for tgt, r in self.rules[label].items():
                add(tgt, c * r)
        return out

    def apply_operator(self, op, elem):
        top = op.order()
        powers = [elem]
        cur = elem
        for _ in range(top):
            cur = self.apply_D(cur)
            powers.append(cur)
        out = {}
        for j, c in op.coeffs.items():
            for label, v in powers[j].items():
                s = out.get(label, LaurentPoly()) + c * v
                if s:
                    out[label] = s
                else:
                    out.pop(label, None)
        return out

    @staticmethod
    def scale(elem, c):
        c = _coerce_laurent(c)
        return {k: c * v for k, v in elem.items()}

    @staticmethod
    def add(e1, e2):
        out = dict(e1)
        for k, c in e2.items():
            s = out.get(k, LaurentPoly()) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return out

    @staticmethod
    def is_zero(elem):
        return not elem

    def reduce_relations(self, elem):
        """Rewrite modulo the quotient relations Y_{n/2+j} = 2 q B_j
        (j = 1..n/2-1), eliminating the high Y labels onto the B labels."""
        n = self.n
        out = {}
        for label, c in elem.items():
            if label[0] == "Y" and n // 2 < label[1] <= n - 1:
                j = label[1] - n // 2
                tgt = ("B", j)
                c = c * LaurentPoly.term(2, qpow=1)
                s = out.get(tgt, LaurentPoly()) + c
                if s:
                    out[tgt] = s
                else:
                    out.pop(tgt, None)
            else:
                s = out.get(label, LaurentPoly()) + c
                if s:
                    out[label] = s
                else:
                    out.pop(label, None)
        return out


def verify_gm_identity_suite(n, verbose=False):
    """Certify every coboundary identity and replay the derivations of both
    Picard-Fuchs operators. Returns the list of (check name, True); raises
    on the first failure. Even n."""
    results = []

    def ok(name):
        results.append((name, True))
        if verbose:
            print("  [ok]", name)

    for l in range(n):
        ident = y_chain_identity(n, l)
        ident.verify()
        if l < n - 1:
            expect = tuple(
                mpq(n - 1) if j == l + 1 else mpq(-1) for j in range(1, n)
            )
            assert ident.combo == expect, "unexpected y-chain combination at l=%d" % l
        ok(ident.name)
    x_id = x1_identity(n)
    x_id.verify()
    ok(x_id.name)
    for k in range(n // 2):
        broad_chain_identity(n, k).verify()
        ok("broad-chain k=%d n=%d" % (k, n))

    eng = GaussManinEngine(n)
    # intermediate lemma: D^l [Omega] = (-n)^l hbar^(-l) Y_l, l <= n-1
    cur = eng.element(("Y", 0))
    for l in range(1, n):
        cur = eng.apply_D(cur)
        want = eng.element(("Y", l), LaurentPoly.term(mpq(-n) ** l, hpow=-l))
        assert cur == want, "intermediate chain failed at l=%d" % l
    ok("D^l[Omega] chain n=%d" % n)
    # D^n [Omega] = 2 (-n)^n q hbar^(-n) (X + Y_0)
    cur = eng.apply_D(cur)
    c = LaurentPoly.term(2 * mpq(-n) ** n, hpow=-n, qpow=1)
    want = eng.add(eng.element(("X",), c), eng.element(("Y", 0), c))
    assert cur == want, "D^n[Omega] bridge value failed"
    ok("D^n[Omega] = 2(-n)^n q hbar^-n [(x1+1)Omega] n=%d" % n)

    assert eng.is_zero(eng.apply_operator(narrow_operator(n), eng.element(("Y", 0)))), \
        "narrow operator does not annihilate [Omega]"
    ok("narrow annihilates [Omega] n=%d" % n)

    # broad chain: (D - n/2)^k B_0 = (-n)^k hbar^(-k) B_k, k <= n/2 - 1
    shift = DiffOp.from_d_poly({1: 1, 0: -mpq(n, 2)})
    cur = eng.element(("B", 0))
    for k in range(1, n // 2):
        cur = eng.apply_operator(shift, cur)
        want = eng.element(("B", k), LaurentPoly.term(mpq(-n) ** k, hpow=-k))
        assert cur == want, "broad chain failed at k=%d" % k
    ok("(D-n/2)^k[z1 Omega] chain n=%d" % n)

    # bridge: (D-n/2)^(n/2) B_0 = hbar^(n/2) / (2 (-n)^(n/2) q) D^n [Omega]
    lhs = eng.apply_operator(shift, cur)
    rhs_raw = eng.element(("Y", 0))
    for _ in range(n):
        rhs_raw = eng.apply_D(rhs_raw)
    factor = LaurentPoly.term(mpq(1, 2) / mpq(-n) ** (n // 2), hpow=n // 2, qpow=-1)
    rhs = eng.scale(rhs_raw, factor)
    assert lhs == rhs, "broad-narrow bridge failed"
    ok("bridge to D^n[Omega] n=%d" % n)

    # broad annihilation of [z1 Omega].  The label module is larger than
    # the rank-(n+2) cohomology, so the residual is not forced to vanish
    # label-by-label; it must land in the span of the quotient relations
    # R_j = Y_{n/2+j} - 2 q B_j, which we check exactly together with the
    # D-stability of that span and the order-zero (critical-value) form of
    # each relation.
    resid = eng.apply_operator(broad_operator(n), eng.element(("B", 0)))
    if n == 2:
        assert eng.is_zero(resid), "n=2 residual should vanish outright"
        ok("broad annihilates [z1 Omega] n=2")
    else:
        assert not eng.is_zero(resid), "residual unexpectedly zero"
        assert eng.is_zero(eng.reduce_relations(resid)), \
            "broad residual is not a combination of the quotient relations"
        ok("broad residual lies in the relation span n=%d" % n)

        rels = quotient_relation_states(n)
        for j in range(1, n // 2):
            lhs = eng.apply_D(rels[j])
            want = eng.scale(rels[j], mpq(n, 2) + j)
            if j + 1 < n // 2:
                want = eng.add(
                    want, eng.scale(rels[j + 1], LaurentPoly.term(-n, hpow=-1))
                )
            assert lhs == want, "relation span not D-stable at j=%d" % j
        ok("relation span is D-stable n=%d" % n)

        assert relation_critical_values_exact(n)
        ok("relations exact at critical points n=%d" % n)

    assert broad_ideal_membership(n)
    ok("shifted broad operator in narrow left ideal n=%d" % n)

    assert assembled_broad_operator(n) == broad_operator(n), \
        "kernel-vector assembly disagrees with the closed form"
    ok("sum v_k D^k equals closed-form broad operator n=%d" % n)

    return results


def rank_check(n):
    """The coefficient matrix has full rank n+2."""
    return laurent_rank(coefficient_matrix(n)) == n + 2

"""Formal solutions of both Picard-Fuchs equations, and the flat-coordinate
layer built on top of them.

The n+1 narrow solutions are packaged as one object over the nilpotent ring
Q[alpha]/(alpha^(n+1)):

    xi = q^alpha hbar^(-n alpha) sum_d c_d(alpha) q^d hbar^(-nd),
    c_d = 4^d (alpha+1/2)_d / ((alpha+1)_d)^(n+1),

whose alpha-components are the classical solutions.  The truncation
alpha^(n+1) = 0 is exactly what kills the order-(n+1) operator on the d = 0
slot, so annihilation checks are termwise identities on the coefficients.
The broad periods are derived from xi by theta = q^-1 hbar^(n/2) /
(2 (-n)^(n/2)) D^(n/2) xi together with the pure power theta_{n+1} =
q^-1 hbar^(n/2).

On top of the period series: log-expansions (alpha-components with log hbar
and log q written out), hbar-loop monodromy, the flat-coordinate expansion
of cohomology classes in the basis {hbar^(-n alpha) alpha^k} + {beta} with
its opposite-space reduction and canonical projection, the linear terms of
the mirror map, and two bounded-degree linear-independence searches.
"""

from __future__ import annotations

from gmpy2 import mpq

from .algebra import AlphaRingElement, FormalSymbolRing, LaurentPoly
from .linalg import mpq_nullspace
from .pfode import DiffOp, broad_operator

__all__ = [
    "BranchSolution",
    "narrow_solution",
    "narrow_recursion_check",
    "apply_operator",
    "broad_solution",
    "LogExpansion",
    "log_expansion",
    "monodromy_loop",
    "MonodromyMatrix",
    "monodromy_matrix",
    "transition_matrix_check",
    "FlatClass",
    "flat_expand",
    "flat_class_of_power",
    "flat_class_of_z1",
    "h_minus_reduce",
    "canonical_eliminators",
    "flat_class_image",
    "mirror_map_linear_terms",
    "apply_log_operator",
    "log_kernel_injectivity",
    "psi_coefficients",
    "irreducibility_relation_search",
]


# ---------------------------------------------------------------------------
# branch solutions
# ---------------------------------------------------------------------------


class BranchSolution:
    """Series in the flat carrier q^alpha hbar^(-n alpha), plus an optional
    carrier-free pure-power part.

    terms maps (qoff, hoff) to a coefficient in Q[alpha]/(alpha^(n+1)); the
    monomial it multiplies is q^(alpha+qoff) hbar^(-n alpha+hoff).  pure is a
    plain Laurent polynomial in (hbar, q) with no carrier.  hfloor marks
    truncation: terms with hoff < hfloor were dropped and the stored data is
    complete only for hoff >= hfloor (None = nothing dropped, exact).
    """

    __slots__ = ("n", "terms", "pure", "hfloor")

    def __init__(self, n, terms=None, pure=None, hfloor=None):
        assert n >= 1
        clean = {}
        for key, c in (terms or {}).items():
            a, b = key
            if hfloor is not None and b < hfloor:
                continue
            if isinstance(c, AlphaRingElement):
                assert c.n == n
            else:
                c = AlphaRingElement.const(n, c)
            if c:
                clean[(int(a), int(b))] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "pure", pure if pure is not None else LaurentPoly())
        object.__setattr__(self, "hfloor", hfloor)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, other):
        if not isinstance(other, BranchSolution):
            return NotImplemented
        return (self.n == other.n and self.terms == other.terms
                and self.pure == other.pure and self.hfloor == other.hfloor)

    def __hash__(self):
        raise TypeError("unhashable")

    def is_zero(self):
        """True when every stored coefficient vanishes; with a truncation
        floor this means zero up to the tracked order."""
        return not self.terms and not self.pure

    def scale(self, factor):
        """Multiply by a Laurent monomial or polynomial in (hbar, q)."""
        if not isinstance(factor, LaurentPoly):
            factor = LaurentPoly.const(factor)
        out = {}
        for (a, b), c in self.terms.items():
            for (m, r), v in factor.terms.items():
                key = (a + r, b + m)
                s = out.get(key, 0) + c * v
                out[key] = s
        floor = self.hfloor
        if floor is not None and factor.terms:
            floor += max(m for (m, _r) in factor.terms)
        return BranchSolution(self.n, out, pure=self.pure * factor, hfloor=floor)

    def alpha_component(self, i):
        """{(qoff, hoff): rational} slice at alpha^i of the carrier part."""
        out = {}
        for key, c in self.terms.items():
            v = c.coeffs[i]
            if v:
                out[key] = v
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (-kv[0][1], kv[0][0]))

    def __repr__(self):
        bits = ["(%s) q^(a%+d) h^(-%da%+d)" % (c, a, self.n, b)
                for (a, b), c in self.sorted_terms()]
        if self.pure:
            bits.append("pure %r" % self.pure)
        body = " + ".join(bits) if bits else "0"
        if self.hfloor is not None:
            body += "  [complete to hoff >= %d]" % self.hfloor
        return body


def _pochhammer(n, start, d):
    """(start + alpha)_d in the alpha ring: prod_{t<d} (start + t + alpha)."""
    out = AlphaRingElement.const(n, 1)
    for t in range(d):
        out = out * AlphaRingElement(n, (mpq(start) + t, 1))
    return out


def narrow_solution(n, dmax):
    """The alpha-packaged solution of the narrow operator, truncated at
    q-degree dmax: slot d carries 4^d (alpha+1/2)_d / ((alpha+1)_d)^(n+1)."""
    assert n >= 2 and dmax >= 1
    terms = {}
    for d in range(dmax + 1):
        num = _pochhammer(n, mpq(1, 2), d) * mpq(4) ** d
        den = _pochhammer(n, 1, d) ** (n + 1)
        terms[(d, -n * d)] = num * den.inverse()
    return BranchSolution(n, terms, hfloor=-n * dmax)


def narrow_recursion_check(n, dmax):
    """The coefficients of narrow_solution satisfy
    (alpha + d)^(n+1) c_d = 4 (alpha + d - 1/2) c_{d-1} for 1 <= d <= dmax.
    Returns True, raising on failure."""
    xi = narrow_solution(n, dmax)
    for d in range(1, dmax + 1):
        cd = xi.terms[(d, -n * d)]
        prev = xi.terms[(d - 1, -n * (d - 1))]
        lhs = AlphaRingElement(n, (d, 1)) ** (n + 1) * cd
        rhs = AlphaRingElement(n, (mpq(d) - mpq(1, 2), 1)) * prev * 4
        assert lhs == rhs, "recursion fails at d=%d" % d
    return True


def apply_operator(op, sol):
    """Apply a DiffOp to a BranchSolution.

    D acts on the carrier monomial q^(alpha+a) hbar^(-n alpha+b) by the
    eigenvalue b - n alpha, and on the pure part as hbar d/d hbar.  Laurent
    coefficients shift the (qoff, hoff) lattice.  Coefficients polynomial in
    hbar^-1 preserve the truncation floor; positive hbar-powers raise it
    (validity loss is tracked, never silently ignored)."""
    n = sol.n
    top = op.order()
    max_m = None
    for c in op.coeffs.values():
        for (m, _r) in c.terms:
            max_m = m if max_m is None else max(max_m, m)
    floor = sol.hfloor
    if floor is not None and max_m is not None:
        floor += max(0, max_m)

    out = {}
    for (a, b), c in sol.terms.items():
        eig = AlphaRingElement(n, (b, -n))
        powers = [c]
        for _ in range(top):
            powers.append(powers[-1] * eig)
        for j, coeff in op.coeffs.items():
            base = powers[j]
            for (m, r), v in coeff.terms.items():
                key = (a + r, b + m)
                if floor is not None and key[1] < floor:
                    continue
                s = out.get(key, 0) + base * v
                out[key] = s

    pure = LaurentPoly()
    if sol.pure:
        cur = sol.pure
        powers = [cur]
        for _ in range(top):
            cur = cur.d_log_hbar()
            powers.append(cur)
        for j, coeff in op.coeffs.items():
            pure = pure + coeff * powers[j]
    return BranchSolution(n, out, pure=pure, hfloor=floor)


def broad_solution(n, dmax):
    """(theta-family, theta_{n+1}): the broad periods derived from the
    narrow package by q^-1 hbar^(n/2)/(2 (-n)^(n/2)) D^(n/2), and the pure
    power q^-1 hbar^(n/2).  Even n only."""
    assert n % 2 == 0 and n >= 4, "broad periods exist for even n >= 4"
    xi = narrow_solution(n, dmax)
    fam = apply_operator(DiffOp({n // 2: LaurentPoly.const(1)}), xi)
    fam = fam.scale(LaurentPoly.term(mpq(1, 2) / mpq(-n) ** (n // 2),
                                     hpow=n // 2, qpow=-1))
    last = BranchSolution(n, {}, pure=LaurentPoly.term(1, hpow=n // 2, qpow=-1))
    return fam, last


# ---------------------------------------------------------------------------
# log expansions and monodromy
# ---------------------------------------------------------------------------


_L = FormalSymbolRing.gen("L")
_LAM = FormalSymbolRing.gen("Lam")
_PI = FormalSymbolRing.gen("Pi")


class LogExpansion:
    """alpha-components of a BranchSolution with the carrier written out:
    q^alpha hbar^(-n alpha) = exp(alpha (Lam - n L)).  components[i] maps
    (qpow, hpow) to a polynomial in the formal symbols L = log hbar,
    Lam = log q, Pi = 2 pi sqrt(-1); pure is the carrier-free part."""

    __slots__ = ("n", "components", "pure", "hfloor")

    def __init__(self, n, components, pure=None, hfloor=None):
        comps = []
        for comp in components:
            comps.append({k: v for k, v in comp.items() if v})
        assert len(comps) == n + 1
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "pure", dict(pure or {}))
        object.__setattr__(self, "hfloor", hfloor)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, other):
        if not isinstance(other, LogExpansion):
            return NotImplemented
        return (self.n == other.n and self.components == other.components
                and self.pure == other.pure and self.hfloor == other.hfloor)


def log_expansion(sol):
    """Expand the carrier of a BranchSolution into log monomials."""
    n = sol.n
    carrier = _LAM - n * _L
    pows = [FormalSymbolRing.const(1)]
    fact = mpq(1)
    for k in range(1, n + 1):
        fact = fact * k
        pows.append(carrier ** k * (1 / fact))
    comps = [{} for _ in range(n + 1)]
    for (a, b), c in sol.terms.items():
        for j, cj in enumerate(c.coeffs):
            if not cj:
                continue
            for k in range(n + 1 - j):
                add = pows[k] * cj
                slot = comps[j + k]
                s = slot.get((a, b), FormalSymbolRing.const(0)) + add
                slot[(a, b)] = s
    pure = {}
    for (m, r), v in sol.pure.terms.items():
        pure[(r, m)] = FormalSymbolRing.const(v)
    return LogExpansion(n, comps, pure=pure, hfloor=sol.hfloor)


def monodromy_loop(x):
    """Effect of a counterclockwise hbar-loop around 0.

    LogExpansion: substitutes L -> L + Pi in every coefficient.
    BranchSolution: multiplies the carrier coefficients by exp(-n Pi alpha)
    truncated in the alpha ring; the pure part (integer hbar powers) is
    untouched.  Exact in Q[Pi] either way."""
    if isinstance(x, LogExpansion):
        comps = []
        for comp in x.components:
            comps.append({k: v.substitute_shift("L", _PI) for k, v in comp.items()})
        pure = {k: v.substitute_shift("L", _PI) for k, v in x.pure.items()}
        return LogExpansion(x.n, comps, pure=pure, hfloor=x.hfloor)
    assert isinstance(x, BranchSolution)
    n = x.n
    coeffs = []
    fact = mpq(1)
    for k in range(n + 1):
        if k:
            fact = fact * k
        coeffs.append(_PI ** k * (mpq(-n) ** k / fact))
    loop = AlphaRingElement(n, coeffs)
    return BranchSolution(n, {key: c * loop for key, c in x.terms.items()},
                          pure=x.pure, hfloor=x.hfloor)


class MonodromyMatrix:
    """(n+2)x(n+2) transition matrix of the thimble basis under one
    counterclockwise hbar-loop, acting by row: basis element k maps to
    sum_j entry[k][j] (basis element j).

    Narrow block (0..n): lower triangular with entry (k, j) =
    (-n Pi)^(k-j)/(k-j)!.  The narrow-to-broad entries are the formal
    unknowns b_0..b_n (never assigned a value); the broad diagonal entry
    is exactly 1."""

    __slots__ = ("n", "gens", "entries")

    def __init__(self, n, entries, gens):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "gens", tuple(gens))
        object.__setattr__(self, "entries", tuple(tuple(row) for row in entries))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, other):
        if not isinstance(other, MonodromyMatrix):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __matmul__(self, other):
        assert self.gens == other.gens
        dim = self.n + 2
        zero = FormalSymbolRing.const(0, self.gens)
        rows = []
        for i in range(dim):
            row = []
            for j in range(dim):
                acc = zero
                for k in range(dim):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(row)
        return MonodromyMatrix(self.n, rows, self.gens)

    def narrow_block(self):
        return tuple(row[: self.n + 1] for row in self.entries[: self.n + 1])


def monodromy_matrix(n, loops=1):
    """The transition matrix for `loops` consecutive loops (entries with Pi
    replaced by loops*Pi; broad column entries stay the single-loop formal
    b_k for loops=1 and are composed formally otherwise)."""
    gens = FormalSymbolRing.DEFAULT_GENS + tuple("b%d" % k for k in range(n + 1))
    zero = FormalSymbolRing.const(0, gens)
    one = FormalSymbolRing.const(1, gens)
    pi = FormalSymbolRing.gen("Pi", gens)
    rows = [[zero] * (n + 2) for _ in range(n + 2)]
    fact = [mpq(1)]
    for k in range(1, n + 1):
        fact.append(fact[-1] * k)
    for k in range(n + 1):
        for j in range(k + 1):
            rows[k][j] = pi ** (k - j) * (mpq(-n) ** (k - j) / fact[k - j])
        rows[k][n + 1] = FormalSymbolRing.gen("b%d" % k, gens)
    rows[n + 1][n + 1] = one
    out = MonodromyMatrix(n, rows, gens)
    result = out
    for _ in range(loops - 1):
        result = result @ out
    return result


def transition_matrix_check(n, dmax=2):
    """Certify that the hbar-loop on the log-expanded narrow package is the
    narrow block of monodromy_matrix(n): looped component k equals
    sum_j (-n Pi)^(k-j)/(k-j)! (component j).  Also checks the group law
    (two loops = the L -> L + 2 Pi substitution) and that the narrow block
    of the squared matrix matches.  Returns True, raising on failure."""
    lx = log_expansion(narrow_solution(n, dmax))
    looped = monodromy_loop(lx)
    mat = monodromy_matrix(n)
    fact = [mpq(1)]
    for k in range(1, n + 1):
        fact.append(fact[-1] * k)
    for k in range(n + 1):
        acc = {}
        for j in range(k + 1):
            scale = _PI ** (k - j) * (mpq(-n) ** (k - j) / fact[k - j])
            for key, v in lx.components[j].items():
                s = acc.get(key, FormalSymbolRing.const(0)) + scale * v
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        assert acc == looped.components[k], "transition mismatch at row %d" % k
    # group law: loop twice vs substitute L -> L + 2 Pi
    twice = monodromy_loop(looped)
    direct = LogExpansion(
        n,
        [{k: v.substitute_shift("L", 2 * _PI) for k, v in comp.items()}
         for comp in lx.components],
        pure={k: v.substitute_shift("L", 2 * _PI) for k, v in lx.pure.items()},
        hfloor=lx.hfloor,
    )
    assert twice == direct, "double loop disagrees with L -> L + 2 Pi"

    def scale_pi(e):
        idx = e.gens.index("Pi")
        return FormalSymbolRing(
            e.gens,
            {exps: c * mpq(2) ** exps[idx] for exps, c in e.terms.items()})

    sq = mat @ mat
    for k in range(n + 1):
        for j in range(n + 1):
            assert sq.entries[k][j] == scale_pi(mat.entries[k][j]), \
                "narrow block of the squared matrix is not the 2 Pi matrix"
    assert sq.entries[n + 1][n + 1] == FormalSymbolRing.const(1, sq.gens)
    return True


# ---------------------------------------------------------------------------
# flat-coordinate expansions and the opposite-space reduction
# ---------------------------------------------------------------------------


class FlatClass:
    """Expansion of a cohomology class in the flat covector basis
    {hbar^(-n alpha) alpha^k | 0 <= k <= n} + {beta}.

    narrow maps (k, s, t, r) to the rational coefficient of
    alpha^k hbar^s Lam^t q^r hbar^(-n alpha); broad maps (s, t, r) to the
    coefficient of hbar^s Lam^t q^r beta.  The opposite-space grading of a
    narrow key is m = s - k (the basis vector is (hbar alpha)^k hbar^m),
    and of a broad key m = s - n/2.  hfloor: complete for s >= hfloor."""

    __slots__ = ("n", "narrow", "broad", "hfloor")

    def __init__(self, n, narrow=None, broad=None, hfloor=None):
        cn, cb = {}, {}
        for key, v in (narrow or {}).items():
            v = mpq(v)
            if v:
                assert 0 <= key[0] <= n, "alpha power out of range"
                cn[key] = v
        for key, v in (broad or {}).items():
            v = mpq(v)
            if v:
                cb[key] = v
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "narrow", cn)
        object.__setattr__(self, "broad", cb)
        object.__setattr__(self, "hfloor", hfloor)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __eq__(self, other):
        if not isinstance(other, FlatClass):
            return NotImplemented
        return (self.n == other.n and self.narrow == other.narrow
                and self.broad == other.broad)

    def is_zero(self):
        return not self.narrow and not self.broad

    def add(self, other, scale=1):
        scale = mpq(scale)
        narrow = dict(self.narrow)
        for key, v in other.narrow.items():
            s = narrow.get(key, mpq(0)) + scale * v
            if s:
                narrow[key] = s
            else:
                narrow.pop(key, None)
        broad = dict(self.broad)
        for key, v in other.broad.items():
            s = broad.get(key, mpq(0)) + scale * v
            if s:
                broad[key] = s
            else:
                broad.pop(key, None)
        floor = self.hfloor
        if other.hfloor is not None:
            floor = other.hfloor if floor is None else max(floor, other.hfloor)
        return FlatClass(self.n, narrow, broad, hfloor=floor)

    def shifted(self, spow, tpow, rpow, scale=1):
        """Multiply by scale * hbar^spow Lam^tpow q^rpow."""
        scale = mpq(scale)
        narrow = {(k, s + spow, t + tpow, r + rpow): scale * v
                  for (k, s, t, r), v in self.narrow.items()}
        broad = {(s + spow, t + tpow, r + rpow): scale * v
                 for (s, t, r), v in self.broad.items()}
        floor = None if self.hfloor is None else self.hfloor + spow
        return FlatClass(self.n, narrow, broad, hfloor=floor)

    def junk_levels(self):
        """Sorted descending list of the m >= 1 levels present."""
        levels = {s - k for (k, s, _t, _r) in self.narrow if s - k >= 1}
        levels |= {s - self.n // 2 for (s, _t, _r) in self.broad
                   if s - self.n // 2 >= 1}
        return sorted(levels, reverse=True)


def flat_expand(sol, beta=None):
    """FlatClass of a cohomology class whose narrow periods are the
    alpha-packaged BranchSolution `sol` (pure part must be empty) and whose
    broad period is the Laurent polynomial `beta` (default 0):
    q^alpha is written out as sum_t (alpha Lam)^t / t!."""
    n = sol.n
    assert not sol.pure, "carrier-free narrow periods are not expandable"
    narrow = {}
    for (a, b), c in sol.terms.items():
        for j, cj in enumerate(c.coeffs):
            if not cj:
                continue
            fact = mpq(1)
            for t in range(n + 1 - j):
                if t:
                    fact = fact * t
                key = (j + t, b, t, a)
                s = narrow.get(key, mpq(0)) + cj / fact
                if s:
                    narrow[key] = s
                else:
                    narrow.pop(key, None)
    broad = {}
    if beta is not None:
        for (m, r), v in beta.terms.items():
            broad[(m, 0, r)] = v
    return FlatClass(n, narrow, broad, hfloor=sol.hfloor)


def flat_class_of_power(n, i, dmax=4):
    """[W_0^i Omega] in flat coordinates: narrow periods (-hbar^2 d/dhbar)^i
    applied to the narrow package, no broad period."""
    assert 0 <= i <= n
    sol = narrow_solution(n, dmax)
    lower = DiffOp({1: LaurentPoly.term(-1, hpow=1)})
    for _ in range(i):
        sol = apply_operator(lower, sol)
    return flat_expand(sol)


def flat_class_of_z1(n, dmax=4):
    """[z_1 Omega] in flat coordinates: the derived broad family over the
    narrow thimbles plus the exact broad period q^-1 hbar^(n/2)."""
    fam, last = broad_solution(n, dmax)
    return flat_expand(fam, beta=last.pure)


def h_minus_reduce(fc):
    """Literal opposite-space reduction: drop the basis terms lying in the
    H_- lattice, i.e. narrow terms with m = s - k <= -1 and broad terms with
    m = s - n/2 <= -1.  Terms with m >= 1 (outside the lattice entirely) are
    kept; use flat_class_image for the canonical projection that removes
    them by hbar E_0 corrections."""
    n = fc.n
    narrow = {key: v for key, v in fc.narrow.items() if key[1] - key[0] >= 0}
    broad = {key: v for key, v in fc.broad.items() if key[0] - n // 2 >= 0}
    return FlatClass(n, narrow, broad, hfloor=fc.hfloor)


def canonical_eliminators(n, dmax=4):
    """Junk-free representatives E~_0..E~_n of the power classes.

    E~_i = [W_0^i Omega] - (hbar-positive corrections by lower E~_k), built
    so that every term has opposite-space level m <= 0.  The corrections are
    multiples of hbar^m Lam^t q^r E~_k with m >= 1, i.e. elements of
    hbar E_0, so each E~_i represents the same class as [W_0^i Omega] under
    the canonical isomorphism E_0/hbar E_0 = hbar H_-/H_-."""
    elim = []
    for i in range(n + 1):
        cur = _clear_junk(flat_class_of_power(n, i, dmax), elim)
        lead = {key: v for key, v in cur.narrow.items() if key[1] - key[0] == 0}
        assert lead.get((i, i, 0, 0)) == mpq(n) ** i, \
            "leading coefficient of corrected power class is off"
        elim.append(cur)
    return elim


def _clear_junk(fc, elim, broad_elim=None):
    """Subtract hbar-positive multiples of the eliminators until no term has
    level m >= 1.  Narrow junk at level m with key (k, s, t, r) is killed by
    (v/n^k) hbar^m Lam^t q^r E~_k; broad junk needs a beta-carrying
    eliminator.  Eliminators are junk-free so each level clears in one pass."""
    n = fc.n
    cur = fc
    while True:
        levels = cur.junk_levels()
        if not levels:
            return cur
        m = levels[0]
        for (s, t, r), v in sorted(cur.broad.items()):
            if s - n // 2 != m:
                continue
            assert broad_elim is not None, "no beta eliminator available"
            scale = -v / broad_elim.broad[(n // 2, 0, -1)]
            cur = cur.add(broad_elim.shifted(m, t, r + 1, 1), scale)
        for (k, s, t, r), v in sorted(cur.narrow.items()):
            if s - k != m:
                continue
            cur = cur.add(elim[k].shifted(m, t, r, 1), -v / mpq(n) ** k)
        assert m not in cur.junk_levels(), "junk level %d did not clear" % m


def flat_class_image(fc, elim=None, broad_elim=None):
    """Canonical image of a class in hbar H_-/H_-: clear the m >= 1 terms by
    hbar E_0 corrections, then keep exactly the m = 0 layer.  The result is
    the flat-coordinate vector on the basis {(hbar alpha)^k hbar^(-n alpha)}
    + {hbar^(n/2) beta}."""
    n = fc.n
    if elim is None:
        elim = canonical_eliminators(n)
    cleared = _clear_junk(fc, elim, broad_elim)
    assert cleared.hfloor is None or cleared.hfloor <= 0, \
        "truncation floor reached the m = 0 layer; raise dmax"
    narrow = {key: v for key, v in cleared.narrow.items()
              if key[1] - key[0] == 0}
    broad = {key: v for key, v in cleared.broad.items()
             if key[0] - n // 2 == 0}
    return FlatClass(n, narrow, broad, hfloor=cleared.hfloor)


# ---------------------------------------------------------------------------
# mirror map, log kernel, irreducibility
# ---------------------------------------------------------------------------


def mirror_map_linear_terms(n, dmax=4):
    """Linear terms of the mirror map t -> y.

    Deformation direction classes 1, W_0/n, W_0^2..W_0^n, z_1 are sent to
    their canonical flat images and read against the coordinate basis
    f_j = (hbar alpha)^j hbar^(-n alpha) for j < n,
    f_n = ((hbar alpha)^n + 2q) hbar^(-n alpha),
    f_{n+1} = q^-1 hbar^(n/2) beta.
    The 2q shift in the top slot absorbs the quantum correction carried by
    the image of the top power class (the constant term of the top quantum
    power of the hyperplane direction), making the linear map block
    diagonal.  Returns {(j, i): LaurentPoly in q}: the coefficient of t_i
    in y_j.  Nonzero entries: y_1 = t_1, y_i = n^i t_i otherwise for
    i <= n, y_{n/2} += t_{n+1}/(2q), y_{n+1} = t_{n+1}."""
    assert n % 2 == 0 and n >= 4
    elim = canonical_eliminators(n, dmax)
    table = {}

    def read(image, i, scale=mpq(1)):
        for (k, s, t, r), v in image.narrow.items():
            assert s == k and t == 0, "unexpected log term in canonical image"
            key = (k, i)
            table[key] = table.get(key, LaurentPoly()) + \
                LaurentPoly.term(v * scale, qpow=r)
        for (s, t, r), v in image.broad.items():
            assert s == n // 2 and t == 0
            key = (n + 1, i)
            # beta coordinate is normalized as q^-1 hbar^(n/2) beta
            table[key] = table.get(key, LaurentPoly()) + \
                LaurentPoly.term(v * scale, qpow=r + 1)

    for i in range(n + 1):
        image = flat_class_image(flat_class_of_power(n, i, dmax), elim)
        read(image, i, mpq(1, n) if i == 1 else mpq(1))
    image = flat_class_image(flat_class_of_z1(n, dmax), elim)
    read(image, n + 1)
    # move the alpha^0 readings onto the shifted top basis vector
    shift = LaurentPoly.term(2, qpow=1)
    for i in list(range(n + 2)):
        topc = table.get((n, i))
        if topc is None:
            continue
        adj = table.get((0, i), LaurentPoly()) - shift * topc
        if adj:
            table[(0, i)] = adj
        else:
            table.pop((0, i), None)
    return table


def apply_log_operator(op, elem):
    """Apply a DiffOp to {log-power: LaurentPoly} with
    D(c L^t) = (hbar dc/dhbar) L^t + t c L^(t-1)."""

    def d_once(e):
        out = {}
        for t, c in e.items():
            dc = c.d_log_hbar()
            if dc:
                out[t] = out.get(t, LaurentPoly()) + dc
            if t:
                out[t - 1] = out.get(t - 1, LaurentPoly()) + c * t
        return {t: c for t, c in out.items() if c}

    top = op.order()
    powers = [elem]
    cur = elem
    for _ in range(top):
        cur = d_once(cur)
        powers.append(cur)
    out = {}
    for j, coeff in op.coeffs.items():
        for t, c in powers[j].items():
            s = out.get(t, LaurentPoly()) + coeff * c
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return out


def log_kernel_injectivity(n):
    """True iff c -> P_broad(hbar^(n/2) sum_i c_i log^i hbar) has trivial
    kernel on constant vectors (c_1, ..., c_{n/2-1}), computed exactly by
    applying the operator to each log-dressed pure power."""
    assert n % 2 == 0 and n >= 4
    op = broad_operator(n)
    images = []
    keys = set()
    for i in range(1, n // 2):
        img = apply_log_operator(op, {i: LaurentPoly.term(1, hpow=n // 2)})
        images.append(img)
        for t, c in img.items():
            keys.update((t,) + mono for mono in c.terms)
    keys = sorted(keys)
    if not keys:
        # every log power is annihilated outright: nothing is injective
        return False
    rows = []
    for key in keys:
        t, m, r = key
        rows.append([img.get(t, LaurentPoly()).terms.get((m, r), mpq(0))
                     for img in images])
    basis = mpq_nullspace(rows, len(images))
    return len(basis) == 0


def psi_coefficients(n, order):
    """Taylor coefficients of the u-chart solution: psi_d = the coefficient
    of u^d in sum_d (1/2)_d / (d!)^(n+1) u^d (equivalently
    (2d)!/(d!)^(n+2) 4^-d)."""
    out = [mpq(1)]
    for d in range(1, order + 1):
        out.append(out[-1] * (mpq(2 * d - 1, 2)) / mpq(d) ** (n + 1))
    return out


def irreducibility_relation_search(n, maxdeg, order, imax=None):
    """Dimension of the space of polynomial relations
    sum_{i<=imax} sum_{j<=maxdeg} f_{i,j} u^j (u d/du)^i psi = 0
    on Taylor coefficients through u^order.  imax defaults to n, where the
    expected dimension is 0 (the derivatives are independent over Q(u));
    with imax = n + 1 and maxdeg = 1 the defining equation itself spans a
    one-dimensional kernel."""
    if imax is None:
        imax = n
    assert maxdeg >= 1
    if order < (imax + 1) * (maxdeg + 2):
        raise ValueError("order %d too small for %d unknowns: need >= %d"
                         % (order, (imax + 1) * (maxdeg + 1),
                            (imax + 1) * (maxdeg + 2)))
    psi = psi_coefficients(n, order)
    ncols = (imax + 1) * (maxdeg + 1)
    rows = []
    for ell in range(order + 1):
        row = []
        for i in range(imax + 1):
            for j in range(maxdeg + 1):
                d = ell - j
                row.append(psi[d] * mpq(d) ** i if d >= 0 else mpq(0))
        rows.append(row)
    basis = mpq_nullspace(rows, ncols)
    return len(basis)

"""Exact scalar and polynomial arithmetic.

Four rings are provided:

* ``MultiRationalFunction``: quotients of sparse multivariate polynomials
  over Q, kept in a canonical form (gcd-reduced, monic denominator) so that
  structural equality decides mathematical equality.
* ``LaurentPoly``: Laurent polynomials in (hbar, q) with rational
  coefficients, with exact division for fraction-free elimination.
* ``AlphaRingElement``: the nilpotent ring Q[alpha]/(alpha^(n+1)).
* ``FormalSymbolRing``: a commutative polynomial ring on named formal
  symbols (log hbar, log q, the period 2*pi*sqrt(-1), placeholder scalars).

Polynomial heavy lifting inside MultiRationalFunction is delegated to
sympy's sparse polynomial rings; everything else is plain dict arithmetic
on gmpy2 rationals.
"""

from __future__ import annotations

from gmpy2 import mpq

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import ring as _sympy_ring

Rational = mpq


def rat(x, y=None):
    """Coerce to an exact rational. Accepts ints, strings like '3/8', mpq."""
    if y is not None:
        return mpq(x, y)
    return mpq(x)


# ---------------------------------------------------------------------------
# multivariate rational functions
# ---------------------------------------------------------------------------

_RING_CACHE = {}


def _poly_ring(varnames):
    key = tuple(varnames)
    hit = _RING_CACHE.get(key)
    if hit is None:
        R, *gens = _sympy_ring(list(key), QQ, lex)
        hit = (R, {name: g for name, g in zip(key, gens)})
        _RING_CACHE[key] = hit
    return hit


def _to_ground(c):
    # QQ is gmpy2-backed when gmpy2 is importable, so mpq passes through
    if QQ.of_type(c):
        return c
    c = mpq(c)
    return QQ(int(c.numerator), int(c.denominator))


class MultiRationalFunction:
    """Canonical quotient num/den of polynomials in a fixed variable tuple.

    Invariants: gcd(num, den) = 1, den is monic in lex order, den = 1 when
    num = 0. Equality and hashing are structural, hence decide equality in
    the rational function field.
    """

    __slots__ = ("vars", "num", "den")

    def __init__(self, varnames, num, den=None):
        R, _ = _poly_ring(varnames)
        if not hasattr(num, "ring"):
            num = R.from_dict({(0,) * len(varnames): _to_ground(num)}) if num else R.zero
        if den is None:
            den = R.one
        elif not hasattr(den, "ring"):
            den = R.from_dict({(0,) * len(varnames): _to_ground(den)}) if den else R.zero
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num:
            g = num.gcd(den)
            if g != R.one:
                num = num.quo(g)
                den = den.quo(g)
            lc = den.LC
            if lc != QQ.one:
                inv = QQ.one / lc
                num = num.mul_ground(inv)
                den = den.mul_ground(inv)
        else:
            den = R.one
        object.__setattr__(self, "vars", tuple(varnames))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def variable(cls, varnames, name):
        varnames = tuple(varnames)
        assert name in varnames, name
        R, gens = _poly_ring(varnames)
        return cls(varnames, gens[name])

    @classmethod
    def constant(cls, varnames, value):
        return cls(varnames, value)

    @classmethod
    def from_dict(cls, varnames, num_dict, den_dict=None):
        """Build from sparse {exponent tuple: coefficient} dicts."""
        R, _ = _poly_ring(tuple(varnames))
        num = R.from_dict({tuple(e): _to_ground(c) for e, c in num_dict.items()})
        den = None
        if den_dict is not None:
            den = R.from_dict({tuple(e): _to_ground(c) for e, c in den_dict.items()})
        return cls(varnames, num, den)

    # -- ring structure ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiRationalFunction):
            if other.vars != self.vars:
                raise ValueError("mixed variable tuples: %r vs %r" % (self.vars, other.vars))
            return other
        return MultiRationalFunction(self.vars, other)

    def __add__(self, other):
        o = self._coerce(other)
        return MultiRationalFunction(
            self.vars, self.num * o.den + o.num * self.den, self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self):
        return MultiRationalFunction(self.vars, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return MultiRationalFunction(self.vars, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return MultiRationalFunction(self.vars, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        assert isinstance(k, int)
        if k < 0:
            return (MultiRationalFunction(self.vars, 1) / self) ** (-k)
        return MultiRationalFunction(self.vars, self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, MultiRationalFunction):
            return self.vars == other.vars and self.num == other.num and self.den == other.den
        if isinstance(other, (int, mpq)):
            return self == MultiRationalFunction(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash(
            (self.vars, tuple(sorted(self.num.items())), tuple(sorted(self.den.items())))
        )

    def __bool__(self):
        return bool(self.num)

    def is_zero(self):
        return not self.num

    def __repr__(self):
        if self.den == self.den.ring.one:
            return str(self.num.as_expr())
        return "(%s)/(%s)" % (self.num.as_expr(), self.den.as_expr())

    # -- calculus and evaluation ---------------------------------------------

    def diff(self, name):
        R, gens = _poly_ring(self.vars)
        g = gens[name]
        num = self.num.diff(g) * self.den - self.num * self.den.diff(g)
        return MultiRationalFunction(self.vars, num, self.den * self.den)

    def _eval_poly(self, poly, point):
        # generic monomial-wise evaluation; point values must support ring ops
        total = None
        for exps, coeff in poly.items():
            term = mpq(int(coeff.numerator), int(coeff.denominator))
            for name, e in zip(self.vars, exps):
                if e:
                    term = term * point[name] ** e
            total = term if total is None else total + term
        if total is None:
            return mpq(0)
        return total

    def evaluate(self, point):
        """Exact evaluation at {name: Rational or MultiRationalFunction}.

        Raises ZeroDivisionError when the point lies on the pole divisor.
        """
        missing = [v for v in self.vars if v not in point]
        assert not missing, "unbound variables: %r" % missing
        num = self._eval_poly(self.num, point)
        den = self._eval_poly(self.den, point)
        if isinstance(den, MultiRationalFunction):
            return num / den
        if den == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return num / den

    def eval_complex(self, point):
        """Float-complex evaluation for numeric geometry checks."""
        num = 0j
        for exps, coeff in self.num.items():
            term = complex(int(coeff.numerator)) / complex(int(coeff.denominator))
            for name, e in zip(self.vars, exps):
                if e:
                    term *= point[name] ** e
            num += term
        den = 0j
        for exps, coeff in self.den.items():
            term = complex(int(coeff.numerator)) / complex(int(coeff.denominator))
            for name, e in zip(self.vars, exps):
                if e:
                    term *= point[name] ** e
            den += term
        return num / den

def ratfun_derivative(f, name):
    """Partial derivative of a MultiRationalFunction in the named variable."""
    return f.diff(name)


def ratfun_substitute(f, point):
    """Substitute exact values (rationals or rational functions) into f."""
    return f.evaluate(point)


def mrf_context(varnames):
    """Convenience: map of generators plus a constant embedding."""
    varnames = tuple(varnames)
    gens = {name: MultiRationalFunction.variable(varnames, name) for name in varnames}
    return gens, (lambda c: MultiRationalFunction.constant(varnames, c))


# ---------------------------------------------------------------------------
# Laurent polynomials in (hbar, q)
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Sparse Laurent polynomial sum c * hbar^hpow * q^qpow, c rational.

    Keys are (hpow, qpow) integer pairs, either sign. Supports the exact
    division needed by fraction-free elimination.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in terms.items():
                c = mpq(c)
                if c:
                    h, q = key
                    clean[(int(h), int(q))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @classmethod
    def term(cls, c, hpow=0, qpow=0):
        return cls({(hpow, qpow): c})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        if isinstance(other, (int, mpq)):
            return self.terms == LaurentPoly.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, mpq)):
            other = LaurentPoly.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, mpq(0)) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, mpq)):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, mpq)):
            other = LaurentPoly.const(other)
        out = {}
        for (h1, q1), c1 in self.terms.items():
            for (h2, q2), c2 in other.terms.items():
                k = (h1 + h2, q1 + q2)
                s = out.get(k, mpq(0)) + c1 * c2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        assert isinstance(k, int) and k >= 0
        out = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, hpow=0, qpow=0):
        return LaurentPoly({(h + hpow, q + qpow): c for (h, q), c in self.terms.items()})

    def d_log_hbar(self):
        """Apply hbar * d/d hbar termwise."""
        return LaurentPoly({k: k[0] * c for k, c in self.terms.items()})

    def exact_div(self, other):
        """Exact quotient self/other in the Laurent ring; raises if inexact."""
        assert isinstance(other, LaurentPoly) and other, "division by zero"
        # normalize both to ordinary polynomials with zero minimal exponents
        def bounds(p):
            hs = [h for h, _ in p.terms]
            qs = [q for _, q in p.terms]
            return min(hs), min(qs)

        if not self:
            return LaurentPoly()
        sh, sq = bounds(self)
        oh, oq = bounds(other)
        rem = {(h - sh, q - sq): c for (h, q), c in self.terms.items()}
        div = {(h - oh, q - oq): c for (h, q), c in other.terms.items()}
        dlead = max(div)  # lex order on (hpow, qpow)
        dc = div[dlead]
        quo = {}
        while rem:
            rlead = max(rem)
            dh, dq = rlead[0] - dlead[0], rlead[1] - dlead[1]
            if dh < 0 or dq < 0:
                raise ValueError("inexact Laurent division")
            c = rem[rlead] / dc
            quo[(dh, dq)] = c
            for (h, q), d in div.items():
                k = (h + dh, q + dq)
                s = rem.get(k, mpq(0)) - c * d
                if s:
                    rem[k] = s
                else:
                    rem.pop(k, None)
        return LaurentPoly(
            {(h + sh - oh, q + sq - oq): c for (h, q), c in quo.items()}
        )

    def subs(self, hbar=None, q=None):
        """Substitute exact rational values; None keeps the variable."""
        out = {}
        for (h, qp), c in self.terms.items():
            val = c
            hh, qq = h, qp
            if hbar is not None:
                val = val * mpq(hbar) ** h
                hh = 0
            if q is not None:
                val = val * mpq(q) ** qp
                qq = 0
            k = (hh, qq)
            s = out.get(k, mpq(0)) + val
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        res = LaurentPoly(out)
        if hbar is not None and q is not None:
            return res.terms.get((0, 0), mpq(0))
        return res

    def eval_complex(self, hbar, q):
        out = 0j
        for (h, qp), c in self.terms.items():
            out += complex(c) * hbar ** h * q ** qp
        return out

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (h, q), c in self.sorted_terms():
            s = str(c)
            if h:
                s += "*h^%d" % h
            if q:
                s += "*q^%d" % q
            bits.append(s)
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# nilpotent alpha ring Q[alpha]/(alpha^(n+1))
# ---------------------------------------------------------------------------


class AlphaRingElement:
    """Element of Q[alpha]/(alpha^(n+1)), stored as n+1 dense coefficients.

    Coefficients are rationals by default; FormalSymbolRing elements pass
    through unchanged, so one alpha package can carry monodromy symbols.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=()):
        assert n >= 0
        dense = [mpq(0)] * (n + 1)
        for i, c in enumerate(coeffs):
            if i > n:
                break  # truncation mod alpha^(n+1)
            dense[i] = c if isinstance(c, FormalSymbolRing) else mpq(c)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", tuple(dense))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def const(cls, n, c):
        return cls(n, (c,))

    @classmethod
    def alpha(cls, n):
        return cls(n, (0, 1))

    def _coerce(self, other):
        if isinstance(other, AlphaRingElement):
            assert other.n == self.n, "mixed truncation orders"
            return other
        return AlphaRingElement.const(self.n, other)

    def __add__(self, other):
        o = self._coerce(other)
        return AlphaRingElement(self.n, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return AlphaRingElement(self.n, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.n
        out = [mpq(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(o.coeffs):
                if i + j > n:
                    break
                if b:
                    out[i + j] += a * b
        return AlphaRingElement(n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        assert isinstance(k, int) and k >= 0
        out = AlphaRingElement.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, AlphaRingElement):
            return self.n == other.n and self.coeffs == other.coeffs
        if isinstance(other, (int, mpq)):
            return self == AlphaRingElement.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def inverse(self):
        """Inverse when the constant term is nonzero (unit test: geometric series)."""
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("non-unit in alpha ring (zero constant term)")
        # self = c0 (1 + u) with u nilpotent; invert by alternating powers of u
        u = AlphaRingElement(self.n, [mpq(0)] + [c / c0 for c in self.coeffs[1:]])
        acc = AlphaRingElement.const(self.n, 1)
        term = AlphaRingElement.const(self.n, 1)
        for _ in range(self.n):
            term = term * (-u)
            if term.is_zero():
                break
            acc = acc + term
        return AlphaRingElement(self.n, [c / c0 for c in acc.coeffs])

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def shift_alpha(self, c):
        """Substitute alpha -> alpha + c for a rational constant c."""
        n = self.n
        out = [mpq(0)] * (n + 1)
        c = mpq(c)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            # (alpha + c)^i expanded by binomials
            binom = mpq(1)
            for k in range(i, -1, -1):
                out[k] += a * binom * c ** (i - k)
                if k:
                    binom = binom * k / (i - k + 1)
        return AlphaRingElement(n, out)

    def __repr__(self):
        bits = []
        for i, c in enumerate(self.coeffs):
            if c:
                bits.append(str(c) if i == 0 else "%s*a^%d" % (c, i))
        return " + ".join(bits) if bits else "0"


def alpha_invert(elem):
    """Inverse in Q[alpha]/(alpha^(n+1)); e.g. (1+alpha) mod alpha^3 -> 1-alpha+alpha^2."""
    return elem.inverse()


# ---------------------------------------------------------------------------
# formal symbol polynomials (log hbar, log q, 2*pi*sqrt(-1), placeholders)
# ---------------------------------------------------------------------------


class FormalSymbolRing:
    """Element of a polynomial ring over Q on named commuting formal symbols.

    The standard instance uses gens ("L", "Lam", "Pi") for log hbar, log q
    and 2*pi*sqrt(-1); monodromy matrices extend the gen tuple with formal
    period placeholders. Keys are exponent tuples aligned with ``gens``.
    """

    __slots__ = ("gens", "terms")

    DEFAULT_GENS = ("L", "Lam", "Pi")

    def __init__(self, gens=DEFAULT_GENS, terms=None):
        gens = tuple(gens)
        clean = {}
        if terms:
            for exps, c in terms.items():
                c = mpq(c)
                if c:
                    exps = tuple(int(e) for e in exps)
                    assert len(exps) == len(gens) and min(exps, default=0) >= 0
                    clean[exps] = c
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def const(cls, c, gens=DEFAULT_GENS):
        gens = tuple(gens)
        return cls(gens, {(0,) * len(gens): c})

    @classmethod
    def gen(cls, name, gens=DEFAULT_GENS):
        gens = tuple(gens)
        exps = [0] * len(gens)
        exps[gens.index(name)] = 1
        return cls(gens, {tuple(exps): 1})

    def _coerce(self, other):
        if isinstance(other, FormalSymbolRing):
            assert other.gens == self.gens, "mixed symbol rings"
            return other
        return FormalSymbolRing.const(other, self.gens)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for k, c in o.terms.items():
            s = out.get(k, mpq(0)) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return FormalSymbolRing(self.gens, out)

    __radd__ = __add__

    def __neg__(self):
        return FormalSymbolRing(self.gens, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                k = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(k, mpq(0)) + c1 * c2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return FormalSymbolRing(self.gens, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        assert isinstance(k, int) and k >= 0
        out = FormalSymbolRing.const(1, self.gens)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, FormalSymbolRing):
            return self.gens == other.gens and self.terms == other.terms
        if isinstance(other, (int, mpq)):
            return self == FormalSymbolRing.const(other, self.gens)
        return NotImplemented

    def __hash__(self):
        return hash((self.gens, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def substitute_shift(self, name, delta):
        """Substitute gen -> gen + delta where delta is another element."""
        idx = self.gens.index(name)
        base = FormalSymbolRing.gen(name, self.gens) + self._coerce(delta)
        out = FormalSymbolRing.const(0, self.gens)
        for exps, c in self.terms.items():
            rest = list(exps)
            k = rest[idx]
            rest[idx] = 0
            term = FormalSymbolRing(self.gens, {tuple(rest): c}) * base ** k
            out = out + term
        return out

    def coefficient(self, name, power):
        """Coefficient of gen^power as an element with that gen removed from exponents."""
        idx = self.gens.index(name)
        out = {}
        for exps, c in self.terms.items():
            if exps[idx] == power:
                key = exps[:idx] + (0,) + exps[idx + 1:]
                out[key] = c
        return FormalSymbolRing(self.gens, out)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                "%s^%d" % (g, e) if e > 1 else g
                for g, e in zip(self.gens, exps)
                if e
            )
            bits.append("%s*%s" % (c, mono) if mono else str(c))
        return " + ".join(bits)

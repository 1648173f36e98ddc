"""Jacobian (Milnor) ring of the quadric mirror versus small quantum cohomology.

Even n only; the ring MR_n = C[z, 1/(prod z - 1), q] / (dW0) is finite over
Q(q) with basis 1, z2, z2^2, ..., z2^n, z1 and multiplication table

    z2^(n+1) = 4 q z2
    z1 * z2  = z2^(n/2+1) / (2q)
    z1^2     = 1/q                      for n = 2 mod 4
    z1^2     = -1/q + z2^n / (2 q^2)    for n = 0 mod 4

Coefficients are Gaussian rationals over Q(q) so that the generator
f2 = (sqrt(-1))^(n/2) (2 q z1 - z2^(n/2)) is exact for every even n.

The quantum side is built from the three-point seed table, never from a
hard-coded multiplication table, and the two rings are matched by the
homomorphism h -> z2, p -> f2.
"""

from __future__ import annotations

from gmpy2 import mpq

from .algebra import MultiRationalFunction

QVARS = ("q",)


def _q_mrf(c=1):
    return MultiRationalFunction.constant(QVARS, c)


def _q_var():
    return MultiRationalFunction.variable(QVARS, "q")


class GaussQ:
    """Element re + im * sqrt(-1) with re, im rational functions of q."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if not isinstance(re, MultiRationalFunction):
            re = _q_mrf(re)
        if not isinstance(im, MultiRationalFunction):
            im = _q_mrf(im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def sqrt_minus_one_power(cls, k):
        k %= 4
        return (cls(1), cls(0, 1), cls(-1), cls(0, -1))[k]

    def _coerce(self, other):
        if isinstance(other, GaussQ):
            return other
        return GaussQ(other)

    def __add__(self, other):
        o = self._coerce(other)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return GaussQ(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        norm = o.re * o.re + o.im * o.im
        if norm.is_zero():
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussQ(
            (self.re * o.re + self.im * o.im) / norm,
            (self.im * o.re - self.re * o.im) / norm,
        )

    def __eq__(self, other):
        if isinstance(other, (GaussQ, int, mpq, MultiRationalFunction)):
            o = self._coerce(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self):
        return not self

    def eval_complex(self, q):
        return self.re.eval_complex({"q": q}) + 1j * self.im.eval_complex({"q": q})

    def __repr__(self):
        if not self.im:
            return repr(self.re)
        return "(%r) + (%r)*I" % (self.re, self.im)


# ---------------------------------------------------------------------------
# Milnor ring elements
# ---------------------------------------------------------------------------

Z1KEY = "z1"


class MilnorElement:
    """Element of MR_n in the basis {z2^k: 0 <= k <= n} plus {z1}."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        assert n >= 2 and n % 2 == 0, "Milnor basis presentation needs even n"
        clean = {}
        if coeffs:
            for key, c in coeffs.items():
                if not isinstance(c, GaussQ):
                    c = GaussQ(c)
                if c:
                    assert key == Z1KEY or (isinstance(key, int) and 0 <= key <= n)
                    clean[key] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def one(cls, n):
        return cls(n, {0: 1})

    @classmethod
    def z2pow(cls, n, k):
        """z2^k reduced into the basis (any k >= 0)."""
        coeff = GaussQ(1)
        q = _q_var()
        while k > n:
            k -= n
            coeff = coeff * GaussQ(4 * q)
        return cls(n, {k: coeff})

    @classmethod
    def z1(cls, n):
        return cls(n, {Z1KEY: 1})

    def _coerce_scalar(self, c):
        return c if isinstance(c, GaussQ) else GaussQ(c)

    def __add__(self, other):
        if isinstance(other, (int, mpq, GaussQ, MultiRationalFunction)):
            other = MilnorElement(self.n, {0: self._coerce_scalar(other)})
        assert isinstance(other, MilnorElement) and other.n == self.n
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, GaussQ(0)) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return MilnorElement(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MilnorElement(self.n, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-(other if isinstance(other, MilnorElement)
                         else MilnorElement(self.n, {0: self._coerce_scalar(other)})))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = self._coerce_scalar(c)
        return MilnorElement(self.n, {k: v * c for k, v in self.coeffs.items()})

    def _basis_product(self, a, b):
        """Product of two basis labels as a MilnorElement."""
        n = self.n
        q = _q_var()
        if a == Z1KEY and b == Z1KEY:
            if n % 4 == 2:
                return MilnorElement(n, {0: GaussQ(1 / q)})
            return (MilnorElement(n, {0: GaussQ(-1 / q)})
                    + MilnorElement.z2pow(n, n).scale(GaussQ(1 / (2 * q * q))))
        if a == Z1KEY or b == Z1KEY:
            k = b if a == Z1KEY else a
            if k == 0:
                return MilnorElement.z1(n)
            # z1 z2^k = z2^(n/2+k) / (2q)
            return MilnorElement.z2pow(n, n // 2 + k).scale(GaussQ(1 / (2 * q)))
        return MilnorElement.z2pow(n, a + b)

    def __mul__(self, other):
        if isinstance(other, (int, mpq, GaussQ, MultiRationalFunction)):
            return self.scale(other)
        assert isinstance(other, MilnorElement) and other.n == self.n
        total = MilnorElement(self.n)
        for ka, ca in self.coeffs.items():
            for kb, cb in other.coeffs.items():
                total = total + self._basis_product(ka, kb).scale(ca * cb)
        return total

    __rmul__ = __mul__

    def __pow__(self, k):
        assert isinstance(k, int) and k >= 0
        out = MilnorElement.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MilnorElement):
            return self.n == other.n and self.coeffs == other.coeffs
        if isinstance(other, (int, mpq, GaussQ)):
            return self == MilnorElement(self.n, {0: self._coerce_scalar(other)})
        return NotImplemented

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.coeffs.items(), key=lambda kv: str(kv[0])))))

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def eval_at(self, z1, z2, q):
        """Numeric evaluation of the representing function at a point."""
        out = 0j
        for k, c in self.coeffs.items():
            factor = z1 if k == Z1KEY else z2 ** k
            out += c.eval_complex(q) * factor
        return out

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for k in sorted(self.coeffs, key=str):
            c = self.coeffs[k]
            mono = "z1" if k == Z1KEY else ("1" if k == 0 else "z2^%d" % k)
            bits.append("(%r)*%s" % (c, mono))
        return " + ".join(bits)


def f1(n):
    return MilnorElement.z2pow(n, 1)


def f2(n):
    """(sqrt(-1))^(n/2) * (2 q z1 - z2^(n/2))."""
    q = _q_var()
    inner = MilnorElement.z1(n).scale(GaussQ(2 * q)) - MilnorElement.z2pow(n, n // 2)
    return inner.scale(GaussQ.sqrt_minus_one_power(n // 2))


def milnor_product(a, b):
    """Exact ring product, reduced to the basis 1, z2, ..., z2^n, z1."""
    assert isinstance(a, MilnorElement) and isinstance(b, MilnorElement)
    assert a.n == b.n, "dimension mismatch"
    return a * b


# ---------------------------------------------------------------------------
# quantum side, built from the three-point seeds
# ---------------------------------------------------------------------------


def three_point_seed(n, a, b, c):
    """Reduced three-point invariant of the n-quadric, basis indices
    0..n for the hyperplane powers and n+1 for the primitive class.

    Returns a rational function of q (the grading-determined power of q is
    included). The nonzero seeds, with degree deg(i)=i and deg(n+1)=n/2:

      <1, x, y>           = pairing(x, y)       (degree n, classical)
      <g_i, g_j, g_k>     = 2   if i+j+k = n
      <g_i, g_(n-i), g_n> = 4q  for 1 <= i <= n-1
      <g_i, g_j, g_k>     = 8q  if i+j+k = 2n, none equal to n
      <g_n, g_n, g_n>     = 8q^2
      <g_(n+1), g_(n+1), g_0> = 2,  <g_(n+1), g_(n+1), g_n> = -4q

    Everything else vanishes (degree mismatch or an odd number of
    primitive insertions).
    """
    assert n % 2 == 0
    idx = sorted((a, b, c))
    deg = [i if i <= n else mpq(n, 2) for i in idx]
    total = sum(deg, mpq(0))
    d2 = (total - n) / n
    if d2 < 0 or d2.denominator != 1:
        return _q_mrf(0)
    d = int(d2)
    qd = _q_var() ** d
    n_prim = sum(1 for i in idx if i == n + 1)
    if n_prim % 2 == 1:
        return _q_mrf(0)
    if n_prim == 2:
        other = [i for i in idx if i != n + 1]
        if not other:  # (n+1, n+1, n+1) excluded by parity already
            return _q_mrf(0)
        k = other[0]
        if k == 0:
            return _q_mrf(2)
        if k == n:
            return -4 * qd  # d = 1 here
        return _q_mrf(0)
    i, j, k = idx
    if 0 in idx:
        # fundamental class: only the classical pairing survives
        if d == 0 and i == 0 and j + k == n:
            return _q_mrf(2)
        return _q_mrf(0)
    if d == 0:
        return _q_mrf(2) if i + j + k == n else _q_mrf(0)
    if d == 1:
        if i + j + k != 2 * n:
            return _q_mrf(0)
        return 4 * qd if k == n else 8 * qd
    if d == 2:
        return 8 * qd if idx == [n, n, n] else _q_mrf(0)
    return _q_mrf(0)


def pairing_value(n, a, b):
    """Poincare pairing on the basis: 2 delta_{i+j,n} on hyperplane powers,
    2 on the primitive class, 0 in the mixed block."""
    if a == n + 1 and b == n + 1:
        return mpq(2)
    if a <= n and b <= n and a + b == n:
        return mpq(2)
    return mpq(0)


class QuantumClass:
    """Q(q)-linear combination of the basis classes 0..n+1."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        clean = {}
        if coeffs:
            for k, c in coeffs.items():
                if not isinstance(c, MultiRationalFunction):
                    c = _q_mrf(c)
                if c:
                    assert isinstance(k, int) and 0 <= k <= n + 1
                    clean[k] = c
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @classmethod
    def basis(cls, n, k):
        return cls(n, {k: 1})

    def __add__(self, other):
        assert isinstance(other, QuantumClass) and other.n == self.n
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, _q_mrf(0)) + c
            if not s.is_zero():
                out[k] = s
            else:
                out.pop(k, None)
        return QuantumClass(self.n, out)

    def __neg__(self):
        return QuantumClass(self.n, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not isinstance(c, MultiRationalFunction):
            c = _q_mrf(c)
        return QuantumClass(self.n, {k: v * c for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if isinstance(other, QuantumClass):
            return self.n == other.n and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join("(%r)*g%d" % (c, k) for k, c in sorted(self.coeffs.items()))


class StructureConstants:
    """Small quantum product derived from the three-point seeds:
    a o b = sum_c <a, b, c> g^{cd} gamma_d. Nothing is hard-coded."""

    def __init__(self, n):
        assert n % 2 == 0
        self.n = n
        half = mpq(1, 2)
        table = {}
        for a in range(n + 2):
            for b in range(a, n + 2):
                coeffs = {}
                for c in range(n + 2):
                    val = three_point_seed(n, a, b, c)
                    if val.is_zero():
                        continue
                    # pairing inverse: g^{c,d} = 1/2 at d = n-c (c <= n) and
                    # at c = d = n+1
                    d = n + 1 if c == n + 1 else n - c
                    coeffs[d] = coeffs.get(d, _q_mrf(0)) + val * half
                table[(a, b)] = QuantumClass(n, coeffs)
        self.table = table

    def product_basis(self, a, b):
        return self.table[(min(a, b), max(a, b))]

    def product(self, x, y):
        assert isinstance(x, QuantumClass) and isinstance(y, QuantumClass)
        out = QuantumClass(self.n)
        for a, ca in x.coeffs.items():
            for b, cb in y.coeffs.items():
                out = out + self.product_basis(a, b).scale(ca * cb)
        return out

    def power(self, k, exponent):
        out = QuantumClass.basis(self.n, 0)
        base = QuantumClass.basis(self.n, k)
        for _ in range(exponent):
            out = self.product(out, base)
        return out

    def associativity_check(self):
        n = self.n
        for a in range(n + 2):
            for b in range(a, n + 2):
                ab = self.product_basis(a, b)
                for c in range(b, n + 2):
                    left = self.product(ab, QuantumClass.basis(n, c))
                    right = self.product(
                        QuantumClass.basis(n, a), self.product_basis(b, c)
                    )
                    if left != right:
                        return False
        return True


_STRUCTURE_CACHE = {}


def quantum_structure(n):
    """Structure constants for dimension n, built once and cached."""
    sc = _STRUCTURE_CACHE.get(n)
    if sc is None:
        sc = _STRUCTURE_CACHE[n] = StructureConstants(n)
    return sc


def small_quantum_product(a, b):
    """Product of two quantum classes via the three-point contraction."""
    assert isinstance(a, QuantumClass) and isinstance(b, QuantumClass)
    assert a.n == b.n, "dimension mismatch"
    return quantum_structure(a.n).product(a, b)


# ---------------------------------------------------------------------------
# the ring isomorphism
# ---------------------------------------------------------------------------


def _phi_images(n):
    """Images of the basis classes under h -> z2, p -> f2.

    Cup powers versus quantum powers differ first at degree n, where
    h^n = h^(quantum n) - 2q, hence gamma_n maps to z2^n - 2q.
    """
    images = {}
    for i in range(n):
        images[i] = f1(n) ** i
    images[n] = f1(n) ** n - MilnorElement.one(n).scale(GaussQ(2 * _q_var()))
    images[n + 1] = f2(n)
    return images


def phi(element, images=None):
    assert isinstance(element, QuantumClass)
    n = element.n
    if images is None:
        images = _phi_images(n)
    out = MilnorElement(n)
    for k, c in element.coeffs.items():
        out = out + images[k].scale(GaussQ(c))
    return out


def isomorphism_check(n):
    """Verify MR_n and QH(Q^n) are one Frobenius algebra over Q(q).

    Checks: quantum associativity; the defining relations in both rings
    (f1^(n+1) = 4q f1, f1 f2 = 0, f2^2 = -4q + f1^n and their quantum
    counterparts); multiplicativity of the basis correspondence on all
    pairs. Returns True, raising AssertionError with context on failure.
    """
    sc = StructureConstants(n)
    assert sc.associativity_check(), "quantum product not associative at n=%d" % n

    q = _q_var()
    a1, a2 = f1(n), f2(n)
    assert a1 ** (n + 1) == a1.scale(GaussQ(4 * q)), "f1 relation failed"
    assert (a1 * a2).is_zero(), "f1*f2 relation failed"
    assert a2 * a2 == a1 ** n - MilnorElement.one(n).scale(GaussQ(4 * q)), \
        "f2 relation failed"

    h = QuantumClass.basis(n, 1)
    p = QuantumClass.basis(n, n + 1)
    assert sc.power(1, n + 1) == h.scale(4 * q), "quantum h^(n+1) relation failed"
    assert sc.product(h, p) == QuantumClass(n), "quantum h*p relation failed"
    assert sc.product(p, p) == sc.power(1, n) - QuantumClass.basis(n, 0).scale(4 * q), \
        "quantum p^2 relation failed"

    images = _phi_images(n)
    for a in range(n + 2):
        for b in range(a, n + 2):
            lhs = phi(sc.product_basis(a, b), images)
            rhs = images[a] * images[b]
            assert lhs == rhs, "phi not multiplicative on (%d, %d) at n=%d" % (a, b, n)
    return True


# ---------------------------------------------------------------------------
# numeric cross-checks against the critical geometry
# ---------------------------------------------------------------------------


def w0_equals_n_z2_check(n, q, tol=1e-9):
    """W0 agrees with n*z2 at every critical point (the class identity
    W0 = n z2 in MR_n, tested through the semisimple evaluation map)."""
    from .lgmodel import critical_points

    for p in critical_points(n, q):
        z2 = p.coords[1]
        scale = max(1.0, abs(p.value))
        assert abs(p.value - n * z2) < tol * scale, (p.index, p.value, n * z2)
    return True


def vandermonde_check(n, q, tol=1e-10):
    """The basis functions separate the critical points: the (n+2)x(n+2)
    evaluation matrix is numerically nonsingular."""
    import numpy as np

    from .lgmodel import critical_points

    pts = critical_points(n, q)
    assert len(pts) == n + 2
    rows = []
    for p in pts:
        z1v, z2v = p.coords[0], p.coords[1]
        rows.append([z2v ** k for k in range(n + 1)] + [z1v])
    m = np.array(rows, dtype=complex)
    sv = np.linalg.svd(m, compute_uv=False)
    assert sv[-1] > tol * sv[0], "evaluation matrix numerically singular"
    return True

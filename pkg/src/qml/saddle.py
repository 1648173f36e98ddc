"""Numeric stationary-phase expansions on Lefschetz thimbles.

At a nondegenerate critical point p of W0 the Laplace expansion of
int f exp(W0/hbar) g dz reads, after centering coordinates at p,

    prefactor(hbar, p) * exp(W0(p)/hbar) * (c_0 + c_1 hbar + c_2 hbar^2 + ...)

where the c_k pair Gaussian moments of the Hessian against the Taylor
coefficients of f*g and of exp(V/hbar), V the cubic-and-higher part of the
shifted potential.  A twisted coboundary hbar*A + B integrates to zero on
every thimble, so its coefficients cancel order by order:
c_k(B) + c_{k-1}(A) = 0.  The expansion is therefore an order-by-order
numeric test of whether a combination sum_m hbar^m [f_m Omega] of classes
vanishes on the thimble through p, one thimble at a time; a class can die
on the two broad thimbles while staying visible on the narrow ones.

Everything here is numeric (mpmath complex at configurable precision);
exact statements belong to the engine and identity layers.
"""

from mpmath import mp, mpc, mpf, matrix, lu_solve

__all__ = ["sp_coefficients", "combine_orders", "SaddleExpander"]


def _pmul(a, b, cap):
    """Product of exponent-dict polynomials, truncated at total degree cap."""
    if len(a) > len(b):
        a, b = b, a
    bitems = sorted(b.items(), key=lambda kv: sum(kv[0]))
    bdegs = [sum(e) for e, _ in bitems]
    out = {}
    for ea, ca in a.items():
        da = sum(ea)
        for (eb, cb), db in zip(bitems, bdegs):
            if da + db > cap:
                break
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, mpc(0)) + ca * cb
    return out


def _padd(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, mpc(0)) + c
    return out


def _pscale(a, s):
    return {e: c * s for e, c in a.items()}


def _prune(a, floor):
    return {e: c for e, c in a.items() if abs(c) > floor}


class SaddleExpander:
    """Expansion engine for one chart, one numeric point, one q value.

    Shares the shifted normalizer, Hessian inverse, interaction part and
    moment cache across every class expanded at the point, so expanding a
    whole label basis costs little more than expanding one function.
    """

    def __init__(self, chart, point, q, orders):
        assert orders >= 1
        self.chart = chart
        self.orders = orders
        # d = x-degree, j = interaction factors: hbar^(d/2 - j) with
        # d >= 3j caps d at 6*(orders-1) and j at 2*(orders-1)
        self.cap = max(2, 6 * (orders - 1))
        self.jmax = 2 * (orders - 1)
        self.nv = len(chart.coords)
        self.point = {name: mpc(v) for name, v in zip(chart.coords, point)}
        self.point["q"] = mpc(q)
        self._floor = mpf(10) ** (-(mp.dps + 20))
        self._polish()
        wsh = self._shift_mrf(chart.W0, self.cap)
        zero = (0,) * self.nv
        lin = [c for e, c in wsh.items() if sum(e) == 1]
        assert all(abs(c) < mpf(10) ** (-mp.dps + 8) for c in lin), \
            "expansion point is not critical"
        hess = matrix(self.nv, self.nv)
        for e, c in wsh.items():
            if sum(e) != 2:
                continue
            idx = [i for i in range(self.nv) for _ in range(e[i])]
            i, j = idx
            if i == j:
                hess[i, i] = 2 * c
            else:
                hess[i, j] = c
                hess[j, i] = c
        self.ginv = matrix(self.nv, self.nv)
        for j in range(self.nv):
            col = lu_solve(hess, matrix([1 if i == j else 0
                                         for i in range(self.nv)]))
            for i in range(self.nv):
                self.ginv[i, j] = col[i]
        self.interaction = {e: c for e, c in wsh.items() if sum(e) >= 3}
        self.gshift = self._shift_mrf(chart.normalizer, 2 * (orders - 1))
        self._moments = {zero: mpc(1)}
        # powers of the interaction part, padded against u-degree headroom
        self._vpow = [{zero: mpc(1)}]
        for _ in range(self.jmax):
            self._vpow.append(_prune(
                _pmul(self._vpow[-1], self.interaction, self.cap),
                self._floor))

    def _polish(self):
        """Newton-refine the stored point to working precision; seeds from
        double-precision critical point data are expected."""
        for _ in range(mp.dps):
            wsh = self._shift_mrf(self.chart.W0, 2)
            grad = matrix(self.nv, 1)
            hess = matrix(self.nv, self.nv)
            for e, c in wsh.items():
                d = sum(e)
                if d == 1:
                    grad[e.index(1)] += c
                elif d == 2:
                    idx = [i for i in range(self.nv) for _ in range(e[i])]
                    i, j = idx
                    if i == j:
                        hess[i, i] = 2 * c
                    else:
                        hess[i, j] = c
                        hess[j, i] = c
            size = max(abs(grad[i]) for i in range(self.nv))
            if size < mpf(10) ** (-mp.dps + 5):
                return
            step = lu_solve(hess, grad)
            for i, name in enumerate(self.chart.coords):
                self.point[name] -= step[i]
        raise AssertionError("Newton refinement of the critical point "
                             "did not converge")

    def _shift_poly(self, items, varnames, cap):
        """sum coeff * prod (p_i + x_i)^e_i truncated at total degree cap;
        the q slot stays scalar."""
        out = {}
        coord_index = {name: i for i, name in enumerate(self.chart.coords)}
        for exps, coeff in items:
            term = {(0,) * self.nv: mpc(int(coeff.numerator))
                    / mpc(int(coeff.denominator))}
            for name, e in zip(varnames, exps):
                if not e:
                    continue
                if name in coord_index:
                    i = coord_index[name]
                    pv = self.point[name]
                    base = [(0, mpc(1))]
                    for _ in range(e):
                        base = self._binom_step(base, pv, cap)
                    lift = {}
                    for k, c in base:
                        ee = [0] * self.nv
                        ee[i] = k
                        lift[tuple(ee)] = c
                    term = _pmul(term, lift, cap)
                else:
                    term = _pscale(term, self.point[name] ** e)
            out = _padd(out, term)
        return out

    @staticmethod
    def _binom_step(base, pv, cap):
        """One factor of (p + x) applied to a univariate coefficient list."""
        out = {}
        for k, c in base:
            out[k] = out.get(k, mpc(0)) + c * pv
            if k + 1 <= cap:
                out[k + 1] = out.get(k + 1, mpc(0)) + c
        return sorted(out.items())

    def _shift_mrf(self, f, cap):
        num = self._shift_poly(f.num.items(), f.vars, cap)
        den = self._shift_poly(f.den.items(), f.vars, cap)
        zero = (0,) * self.nv
        d0 = den.get(zero, mpc(0))
        assert abs(d0) > mpf(10) ** (-mp.dps // 2), \
            "denominator vanishes at the expansion point"
        rest = {e: c for e, c in den.items() if e != zero}
        inv = {zero: 1 / d0}
        term = {zero: 1 / d0}
        for _ in range(cap):
            term = _prune(_pscale(_pmul(term, rest, cap), -1 / d0),
                          self._floor)
            if not term:
                break
            inv = _padd(inv, term)
        return _pmul(num, inv, cap)

    def _moment(self, a):
        """Gaussian moment of x^a against the inverse Hessian pairing."""
        known = self._moments.get(a)
        if known is not None:
            return known
        if sum(a) % 2:
            return mpc(0)
        i = next(k for k in range(self.nv) if a[k] > 0)
        b = list(a)
        b[i] -= 1
        total = mpc(0)
        for j in range(self.nv):
            if b[j] > 0:
                bb = list(b)
                bb[j] -= 1
                total += self.ginv[i, j] * b[j] * self._moment(tuple(bb))
        self._moments[a] = total
        return total

    def coefficients(self, f):
        """The c_k, k < orders, of int f exp(W0/hbar) g dz at the point.

        With the exp(+W0/hbar) convention the Gaussian weight carries -hbar,
        so an x-degree-d term with j interaction factors contributes at
        order d/2 - j with sign (-1)^(d/2).
        """
        u = _pmul(self._shift_mrf(f, 2 * (self.orders - 1)), self.gshift,
                  2 * (self.orders - 1))
        cs = [mpc(0)] * self.orders
        fact = 1
        for j in range(self.jmax + 1):
            if j:
                fact *= j
            for e, c in _pmul(self._vpow[j], u, self.cap).items():
                d = sum(e)
                if d % 2:
                    continue
                k = d // 2 - j
                if 0 <= k < self.orders:
                    cs[k] += (-1) ** (d // 2) / mpf(fact) * c * self._moment(e)
        return cs


def sp_coefficients(chart, f, point, q, orders=3):
    """One-shot expansion of a single class representative."""
    return SaddleExpander(chart, point, q, orders).coefficients(f)


def combine_orders(parts, orders):
    """Total expansion of sum_m hbar^m f_m from per-part coefficient lists.

    parts: iterable of (m, coeffs) with m >= 0.  Order k of the sum picks
    up order k - m of each part.
    """
    out = [mpc(0)] * orders
    for m, cs in parts:
        assert m >= 0
        for k in range(m, orders):
            if k - m < len(cs):
                out[k] += cs[k - m]
    return out

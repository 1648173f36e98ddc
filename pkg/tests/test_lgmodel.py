import cmath

import pytest

from qml.lgmodel import (
    build_chart,
    critical_gradient_norm,
    critical_points,
    euler_lift_check,
    pullback_identity_check,
    scaling_covariance_check,
    xy_in_terms_of_z,
    z_in_terms_of_xy,
)


def test_chart_potentials_match_closed_form():
    from qml.algebra import mrf_context

    zc = build_chart(4, "z")
    g, C = mrf_context(zc.coords + ("q",))
    prod = g["z1"] * g["z2"] * g["z3"] * g["z4"]
    want = (g["q"] * g["z1"] ** 2 * g["z4"] / (prod - 1)
            + g["z2"] + g["z2"] * g["z3"] + g["z3"] * g["z4"])
    assert zc.W0 == want
    assert zc.normalizer == C(1) / (prod - 1)

    gc = build_chart(3, "givental")
    h, D = mrf_context(gc.coords + ("q",))
    wantg = (h["q"] * (h["x1"] + 1) ** 2 / (h["x1"] * h["y1"] * h["y2"])
             + h["y1"] + h["y2"])
    assert gc.W0 == wantg


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_chart_transforms_are_mutually_inverse(n):
    fwd = z_in_terms_of_xy(n)   # z as functions of (x, y)
    back = xy_in_terms_of_z(n)  # (x, y) as functions of z
    for name, expr in back.items():
        sub = {v: fwd.get(v, None) for v in expr.vars}
        sub["q"] = fwd["z1"].vars and None
        point = {v: fwd[v] for v in expr.vars if v in fwd}
        # remaining variable is q, carried along unchanged
        from qml.algebra import MultiRationalFunction

        point["q"] = MultiRationalFunction.variable(fwd["z1"].vars, "q")
        composed = expr.evaluate(point)
        want = MultiRationalFunction.variable(fwd["z1"].vars, name)
        assert composed == want, (n, name)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_pullback_identity(n):
    assert pullback_identity_check(n)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_euler_lift(n):
    assert euler_lift_check(n)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_scaling_covariance(n):
    assert scaling_covariance_check(n)


@pytest.mark.parametrize("n,q", [(4, 1.0), (4, 0.3 + 0.7j), (6, 2.0), (8, -1.5)])
def test_critical_point_geometry(n, q):
    pts = critical_points(n, q)
    assert len(pts) == n + 2
    zeta = cmath.exp(2j * cmath.pi / n)
    root = cmath.exp(cmath.log(4 * q) / n)
    narrow = [p for p in pts if p.kind == "narrow"]
    broad = [p for p in pts if p.kind == "broad"]
    assert len(narrow) == n and len(broad) == 2
    for p in narrow:
        assert critical_gradient_norm(n, p, q) < 1e-10
        want = n * zeta ** p.index * root
        assert abs(p.value - want) < 1e-9 * abs(want)
        assert abs(p.hessian_omega - 2 * n * q) < 1e-9 * abs(2 * n * q)
    for p in broad:
        assert critical_gradient_norm(n, p, q) < 1e-10
        assert abs(p.value) < 1e-9
        assert abs(p.hessian_omega + 4 * q) < 1e-9 * abs(4 * q)


def test_critical_points_odd_n():
    pts = critical_points(5, 1.3)
    assert len(pts) == 5
    assert all(p.kind == "narrow" for p in pts)


def test_critical_points_reject_q_zero():
    with pytest.raises(AssertionError):
        critical_points(4, 0)


def test_distinct_critical_values():
    # narrow values are pairwise distinct and away from the broad value 0
    pts = critical_points(6, 0.9 + 0.1j)
    vals = [p.value for p in pts if p.kind == "narrow"]
    for i in range(len(vals)):
        assert abs(vals[i]) > 1e-6
        for j in range(i + 1, len(vals)):
            assert abs(vals[i] - vals[j]) > 1e-6, (i, j)

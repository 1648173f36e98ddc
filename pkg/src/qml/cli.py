"""Command-line front end: every verification as a subcommand.

Each subcommand runs its exact checks and prints a report, human-readable
by default or machine-readable with --json.  Exact rationals are rendered
losslessly as "p/q" strings; floating-point residuals are printed with the
tolerance that judged them.  Exit status: 0 when every check passes, 1 when
any check fails, 2 on usage errors.

The --seed flag drives the random q sampling used by the numeric checks,
so identical flags and seed give identical JSON (the wall_time field
aside).  QML_THREADS caps the worker pool used by verify-all.
"""

import cmath
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
from gmpy2 import mpq

from . import frobenius, lgmodel, milnor, pfode, series


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _render(value):
    """Lossless string for exact values, repr for floats/complex."""
    if isinstance(value, (mpq, int)):
        return str(value)
    if isinstance(value, complex):
        return repr(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Report:
    """Check accumulator for one subcommand run."""

    def __init__(self, command, params):
        self.command = command
        self.params = params
        self.checks = []
        self.extra = {}
        self.t0 = time.monotonic()

    def check(self, cid, ok, value, tol=None):
        entry = {"id": cid, "status": "pass" if ok else "fail",
                 "value": _render(value)}
        if tol is not None:
            entry["tol"] = repr(tol)
        self.checks.append(entry)
        return ok

    def run(self, cid, fn, value="0"):
        """Run fn(); exceptions become a failed check with the message."""
        try:
            out = fn()
        except Exception as exc:  # report and keep going
            return self.check(cid, False, "%s: %s" % (type(exc).__name__, exc))
        if out is False:
            return self.check(cid, False, "false")
        return self.check(cid, True, value if out is True or out is None else out)

    def merge(self, checks):
        self.checks.extend(checks)

    def to_dict(self):
        ok = all(c["status"] == "pass" for c in self.checks)
        out = {
            "command": self.command,
            "params": self.params,
            "checks": self.checks,
            "status": "pass" if ok else "fail",
            "wall_time": round(time.monotonic() - self.t0, 3),
        }
        out.update(self.extra)
        return out


def _finish(report, as_json):
    data = report.to_dict()
    if as_json:
        click.echo(json.dumps(data, indent=2))
    else:
        for c in data["checks"]:
            line = "[%s] %s" % (c["status"], c["id"])
            if c["value"] not in ("0", "true", "True"):
                line += "  %s" % c["value"]
            click.echo(line)
        click.echo("%s: %s  (%.3fs, %d checks)" % (
            data["command"], data["status"].upper(), data["wall_time"],
            len(data["checks"])))
    sys.exit(0 if data["status"] == "pass" else 1)


def _parse_q(text):
    """RE or RE,IM to a complex number."""
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise click.BadParameter("expected RE or RE,IM, got %r" % text)


def _sample_qs(seed, count, lo=0.1, hi=10.0):
    """Deterministic nonreal q samples with lo <= |q| <= hi."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        r = lo * (hi / lo) ** rng.random()
        t = rng.random() * 2.0 * cmath.pi
        out.append(r * cmath.exp(1j * t))
    return out


def _even(n):
    if n % 2:
        raise click.UsageError("--n must be even for this subcommand")
    return n


# ---------------------------------------------------------------------------
# group
# ---------------------------------------------------------------------------


@click.group()
def main():
    """Exact verifier for the quadric Landau-Ginzburg model."""


_json_opt = click.option("--json", "as_json", is_flag=True,
                         help="machine-readable report")
_tol_opt = click.option("--tol", type=float, default=1e-9, show_default=True,
                        help="tolerance for numeric checks")
_seed_opt = click.option("--seed", type=int, default=0, show_default=True,
                         help="seed for randomized q sampling")


# ---------------------------------------------------------------------------
# geometry and algebra subcommands
# ---------------------------------------------------------------------------


@main.command("critical-points")
@click.option("--n", type=int, required=True)
@click.option("--q", "q_text", required=True, metavar="RE[,IM]")
@_json_opt
@_tol_opt
def critical_points_cmd(n, q_text, as_json, tol):
    """Critical points of the potential: coordinates, values, Hessians."""
    q = _parse_q(q_text)
    rep = Report("critical-points", {"n": n, "q": repr(q)})
    pts = lgmodel.critical_points(n, q)
    expected = n + 2 if n % 2 == 0 else n
    rep.check("point-count", len(pts) == expected, len(pts))
    zeta = cmath.exp(2j * cmath.pi / n)
    root = cmath.exp(cmath.log(4 * q) / n)
    table = []
    for p in pts:
        gnorm = lgmodel.critical_gradient_norm(n, p, q)
        rep.check("gradient[%s %d]" % (p.kind, p.index), gnorm < tol,
                  gnorm, tol=tol)
        want_val = n * zeta ** p.index * root if p.kind == "narrow" else 0.0
        want_hess = 2 * n * q if p.kind == "narrow" else -4 * q
        scale = max(abs(want_val), 1.0)
        rep.check("value[%s %d]" % (p.kind, p.index),
                  abs(p.value - want_val) < tol * scale, p.value, tol=tol)
        rep.check("hessian[%s %d]" % (p.kind, p.index),
                  abs(p.hessian_omega - want_hess) < tol * abs(want_hess),
                  p.hessian_omega, tol=tol)
        table.append({"kind": p.kind, "index": p.index,
                      "value": repr(p.value),
                      "hessian_omega": repr(p.hessian_omega),
                      "coords": [repr(c) for c in p.coords]})
    rep.extra["points"] = table
    if not as_json:
        for row in table:
            click.echo("%-6s %2d  value=%s  hessian=%s" % (
                row["kind"], row["index"], row["value"],
                row["hessian_omega"]))
    _finish(rep, as_json)


@main.command("milnor-check")
@click.option("--n", type=int, required=True)
@_json_opt
@_tol_opt
@_seed_opt
def milnor_check_cmd(n, as_json, tol, seed):
    """Jacobian ring vs small quantum ring: one Frobenius algebra."""
    _even(n)
    rep = Report("milnor-check", {"n": n, "seed": seed})
    rep.run("ring-isomorphism", lambda: milnor.isomorphism_check(n))
    for q in _sample_qs(seed, 3):
        rep.run("potential-reduces-to-n*z2[q=%s]" % repr(q),
                lambda q=q: milnor.w0_equals_n_z2_check(n, q, tol=tol))
        rep.run("residue-vandermonde[q=%s]" % repr(q),
                lambda q=q: milnor.vandermonde_check(n, q, tol=max(tol, 1e-10)))
    _finish(rep, as_json)


@main.command("gm-identities")
@click.option("--n", type=int, required=True)
@_json_opt
def gm_identities_cmd(n, as_json):
    """Exact Gauss-Manin identity suite for both operator derivations."""
    _even(n)
    rep = Report("gm-identities", {"n": n})
    try:
        results = pfode.verify_gm_identity_suite(n)
    except AssertionError as exc:
        rep.check("suite", False, str(exc))
        _finish(rep, as_json)
    for name, ok in results:
        rep.check(name, ok, "0")
    _finish(rep, as_json)


# ---------------------------------------------------------------------------
# Picard-Fuchs subcommands
# ---------------------------------------------------------------------------


@main.command("narrow-pf")
@click.option("--n", type=int, required=True)
@click.option("--dmax", type=int, default=6, show_default=True)
@_json_opt
def narrow_pf_cmd(n, dmax, as_json):
    """Narrow operator annihilates its series solution, exactly."""
    rep = Report("narrow-pf", {"n": n, "dmax": dmax})
    op = pfode.narrow_operator(n)
    xi = series.narrow_solution(n, dmax)
    rep.check("annihilation", series.apply_operator(op, xi).is_zero(), "0")
    rep.run("coefficient-recursion",
            lambda: series.narrow_recursion_check(n, dmax))
    rep.extra["operator"] = op.to_json()
    if not as_json:
        click.echo("operator: %r" % op)
    _finish(rep, as_json)


@main.command("broad-derive")
@click.option("--n", type=int, required=True)
@_json_opt
def broad_derive_cmd(n, as_json):
    """Kernel vector v_k, the coefficient matrix, and its rank."""
    _even(n)
    rep = Report("broad-derive", {"n": n})
    mat = pfode.coefficient_matrix(n)
    rep.check("matrix-rank", pfode.rank_check(n), n + 2)
    vk = pfode.solve_vk(n)
    closed = [pfode.closed_form_vk(n, k) for k in range(n + 3)]
    rep.check("vk-closed-form", vk == closed,
              "; ".join("v%d=%r" % (k, v) for k, v in enumerate(vk)))
    rep.run("assembled-operator-closed-form",
            lambda: pfode.assembled_broad_operator(n) == pfode.broad_operator(n))
    rep.extra["vk"] = [repr(v) for v in vk]
    rep.extra["matrix"] = [[repr(e.subs(q=1)) for e in row] for row in mat]
    rep.extra["matrix_exact"] = [[repr(e) for e in row] for row in mat]
    rep.extra["rank"] = n + 2
    if not as_json:
        for k, v in enumerate(vk):
            click.echo("v_%d = %r" % (k, v))
        click.echo("rank = %d  (rows %d, cols %d)" % (n + 2, len(mat),
                                                      len(mat[0])))
    _finish(rep, as_json)


@main.command("broad-pf")
@click.option("--n", type=int, required=True)
@click.option("--dmax", type=int, default=5, show_default=True)
@_json_opt
def broad_pf_cmd(n, dmax, as_json):
    """Broad operator kills both derived theta families, exactly."""
    _even(n)
    rep = Report("broad-pf", {"n": n, "dmax": dmax})
    op = pfode.broad_operator(n)
    fam, last = series.broad_solution(n, dmax)
    rep.check("annihilates-theta-family",
              series.apply_operator(op, fam).is_zero(), "0")
    rep.check("annihilates-theta-last",
              series.apply_operator(op, last).is_zero(), "0")
    rep.run("left-ideal-membership",
            lambda: pfode.broad_ideal_membership(n))
    rep.extra["operator"] = op.to_json()
    if not as_json:
        click.echo("operator: %r" % op)
    _finish(rep, as_json)


@main.command("monodromy")
@click.option("--n", type=int, required=True)
@_json_opt
def monodromy_cmd(n, as_json):
    """Formal hbar-loop monodromy matches the factorial unipotent matrix."""
    rep = Report("monodromy", {"n": n})
    rep.run("transition-and-group-law",
            lambda: series.transition_matrix_check(n))
    mat = series.monodromy_matrix(n)
    rep.extra["matrix"] = [[str(e) for e in row] for row in mat.entries]
    if not as_json:
        for row in mat.entries:
            click.echo("  ".join(str(e) for e in row))
    _finish(rep, as_json)


@main.command("irreducibility")
@click.option("--n", type=int, required=True)
@click.option("--maxdeg", type=int, default=6, show_default=True)
@click.option("--order", type=int, default=120, show_default=True)
@_json_opt
def irreducibility_cmd(n, maxdeg, order, as_json):
    """No low-degree relation among the first n derivatives of psi."""
    rep = Report("irreducibility", {"n": n, "maxdeg": maxdeg, "order": order})
    dim = series.irreducibility_relation_search(n, maxdeg, order)
    rep.check("kernel-dimension", dim == 0, dim)
    wide = series.irreducibility_relation_search(n, 1, order, imax=n + 1)
    rep.check("widened-kernel-dimension", wide == 1, wide)
    _finish(rep, as_json)


# ---------------------------------------------------------------------------
# pairing and WDVV subcommands
# ---------------------------------------------------------------------------


@main.command("pairings")
@click.option("--n", type=int, required=True)
@click.option("--q", "q_text", required=True, metavar="RE[,IM]")
@_json_opt
@click.option("--tol", type=float, default=1e-8, show_default=True)
def pairings_cmd(n, q_text, as_json, tol):
    """Stationary-phase pairings against the flat pairing matrix."""
    _even(n)
    q = _parse_q(q_text)
    rep = Report("pairings", {"n": n, "q": repr(q)})
    out = frobenius.verify_flat_pairings(n, q, tol=tol)
    for name, c in sorted(out["checks"].items()):
        rep.check(name, c["ok"], c["value"], tol=tol)
    rep.extra["max_error"] = repr(out["max_error"])
    _finish(rep, as_json)


def _dump_correlators(table, n, max_length, path):
    data = {
        "n": n,
        "max_length": max_length,
        "correlators": [
            {"insertions": list(key), "value": str(val)}
            for key, val in sorted(table.items())
        ],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


@main.command("wdvv")
@click.option("--n", type=int, required=True)
@click.option("--max-length", "max_length", type=int, required=True)
@click.option("--dump-correlators", "dump_path", type=click.Path(), default=None)
@_json_opt
def wdvv_cmd(n, max_length, dump_path, as_json):
    """Reconstruct the correlator table and audit every exchange identity."""
    _even(n)
    rep = Report("wdvv", {"n": n, "max_length": max_length})
    try:
        table = frobenius.reconstruct(n, max_length)
    except frobenius.ReconstructionError as exc:
        rep.check("reconstruct-and-audit", False, str(exc))
        _finish(rep, as_json)
    rep.check("reconstruct-and-audit", True, "%d nonzero" % len(table))
    rep.run("seed-matches-quantum-ring", lambda: _seed_vs_quantum(n, table))
    odd = [k for k, v in table.items()
           if sum(1 for i in k if i == n + 1) % 2 == 1 and v]
    rep.check("odd-broad-vanishing", not odd, len(odd))
    flat = [k for k, v in table.items() if 0 in k and len(k) > 3 and v]
    rep.check("flat-identity", not flat, len(flat))
    rep.run("euler-consistency", lambda: _euler_consistency(n, table))
    if dump_path:
        _dump_correlators(table, n, max_length, dump_path)
        rep.extra["dump"] = dump_path
    if not as_json:
        for key, val in sorted(table.items()):
            click.echo("<%s> = %s" % (",".join(map(str, key)), val))
    _finish(rep, as_json)


def _seed_vs_quantum(n, table):
    """Length-3 block equals the quantum three-point values exactly."""
    import itertools

    from .algebra import MultiRationalFunction
    from .milnor import QVARS, three_point_seed

    qv = MultiRationalFunction.variable(QVARS, "q")
    for key in itertools.combinations_with_replacement(range(n + 2), 3):
        mine = table.value(key)
        want = three_point_seed(n, *key)
        if not mine:
            assert want.is_zero(), "seed mismatch at %r" % (key,)
            continue
        d = frobenius.grading_power(n, key)
        lift = MultiRationalFunction.constant(QVARS, mine) * qv ** int(d)
        assert lift == want, "seed mismatch at %r" % (key,)
    return True


def _euler_consistency(n, table):
    """Every stored divisor-bearing entry equals its grading image."""
    for key, val in table.items():
        if 1 not in key or len(key) < 4:
            continue
        rest = list(key)
        rest.remove(1)
        assert val == frobenius.euler_relation(tuple(rest), table), \
            "grading relation fails at %r" % (key,)
    return True


# ---------------------------------------------------------------------------
# verify-all
# ---------------------------------------------------------------------------


def _battery(n, seed, tol):
    """The per-dimension job list for verify-all: (check id, thunk)."""
    dmax = 5
    max_length = 6 if n == 4 else (5 if n == 6 else 4)
    jobs = []

    def geometry():
        qs = _sample_qs(seed, 5)
        for q in qs:
            for p in lgmodel.critical_points(n, q):
                g = lgmodel.critical_gradient_norm(n, p, q)
                assert g < 1e-10, "gradient %g at %s %d" % (g, p.kind, p.index)
        return "%d points x %d q" % (n + 2, len(qs))

    jobs.append(("critical-geometry", geometry))
    jobs.append(("milnor-isomorphism", lambda: milnor.isomorphism_check(n)))
    jobs.append(("narrow-annihilation", lambda: series.apply_operator(
        pfode.narrow_operator(n), series.narrow_solution(n, dmax)).is_zero()))

    def broad():
        op = pfode.broad_operator(n)
        fam, last = series.broad_solution(n, dmax)
        return (series.apply_operator(op, fam).is_zero()
                and series.apply_operator(op, last).is_zero())

    jobs.append(("broad-annihilation", broad))
    jobs.append(("vk-closed-form", lambda: pfode.solve_vk(n) == [
        pfode.closed_form_vk(n, k) for k in range(n + 3)]))
    jobs.append(("coefficient-matrix-rank", lambda: pfode.rank_check(n)))
    jobs.append(("monodromy", lambda: series.transition_matrix_check(n)))

    def pairs():
        for q in _sample_qs(seed + 1, 3):
            out = frobenius.verify_flat_pairings(n, q, tol=max(tol, 1e-8))
            assert out["ok"], "pairing failures at q=%r: %r" % (
                q, out["failures"])
        return "3 q samples"

    jobs.append(("stationary-pairings", pairs))
    jobs.append(("wdvv-mirror", lambda: frobenius.mirror_check(n, max_length)))
    if n <= 6:
        jobs.append(("gm-identities", lambda: bool(
            pfode.verify_gm_identity_suite(n))))
        jobs.append(("irreducibility", lambda: series.
                     irreducibility_relation_search(n, 6, 120) == 0))
        jobs.append(("structure-checks", lambda: (
            lgmodel.pullback_identity_check(n)
            and lgmodel.euler_lift_check(n)
            and lgmodel.scaling_covariance_check(n))))
    return jobs


@main.command("verify-all")
@click.option("--n-list", "n_list", default="4,6", show_default=True,
              metavar="N1,N2,...")
@_json_opt
@_tol_opt
@_seed_opt
def verify_all_cmd(n_list, as_json, tol, seed):
    """The full battery at default budgets for each listed dimension."""
    try:
        ns = [int(s) for s in n_list.split(",") if s]
    except ValueError:
        raise click.BadParameter("--n-list expects comma-separated integers")
    for n in ns:
        if n % 2 or n < 4:
            raise click.UsageError("verify-all covers even n >= 4")
    rep = Report("verify-all", {"n_list": ns, "seed": seed})
    jobs = [("n=%d %s" % (n, cid), fn)
            for n in ns for cid, fn in _battery(n, seed, tol)]
    workers = max(1, int(os.environ.get("QML_THREADS", "1")))

    def run_one(job):
        cid, fn = job
        sub = Report("", {})
        sub.run(cid, fn)
        return sub.checks[0]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(j) for j in jobs]
    rep.merge(results)
    _finish(rep, as_json)


if __name__ == "__main__":
    main()

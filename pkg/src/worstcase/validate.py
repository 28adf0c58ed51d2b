"""Self-check suite behind ``worstcase validate``.

Each check returns a :class:`Check`; the suite never raises on a failed
comparison, so one report lists every problem at once.
"""
from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import stats

from . import analytic as an
from .geometry import Window, circumcircles, delaunay, sample_ppp, voronoi_vertices
from .quadrature import integrate_finite, integrate_semi_infinite
from .simulator import SimConfig, run_simulation


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _quadrature_oracles() -> Check:
    cases = [
        (integrate_finite(lambda x: x ** 3, 0.0, 2.0), 4.0),
        (integrate_finite(np.exp, -1.0, 1.5), math.exp(1.5) - math.exp(-1.0)),
        (integrate_finite(np.cos, 0.0, 3.0), math.sin(3.0)),
        (integrate_semi_infinite(lambda x: np.exp(-x), 0.0), 1.0),
        (integrate_semi_infinite(lambda u: 1.0 / (1.0 + u * u), 1.0), math.pi / 4),
        (integrate_semi_infinite(lambda x: x ** 3 * np.exp(-x * x), 0.0), 0.5),
    ]
    worst = max(abs(got - want) / abs(want) for got, want in cases)
    return Check("quadrature oracles", worst < 1e-8, f"max rel err {worst:.2e}")


def _rho_closed_form(n: int) -> Check:
    gammas = np.logspace(-3, 3, n)
    err = max(abs(an.rho(g, 4.0, "quadrature") - an.rho(g, 4.0, "closed")) for g in gammas)
    return Check("rho quadrature vs arctan form", err < 1e-8, f"{n} points, max abs err {err:.2e}")


def _chain_equality(n: int, kappa_fn: Callable) -> Check:
    p = an.NetworkParams()
    err = 0.0
    for db in np.linspace(-10.0, 20.0, n):
        g = an.db_to_linear(db)
        general = an.coverage_worst_general(p, g, rho_method="quadrature")
        il = an.coverage_worst_il(g, 4.0)
        closed = (1.0 / ((1.0 + g) * kappa_fn(g))) ** 2
        err = max(err, abs(general - il), abs(il - closed))
    return Check("chain equality general/IL/closed", err < 1e-6, f"{n} points, max abs err {err:.2e}")


def _lambda_invariance() -> Check:
    err = 0.0
    for g in (0.1, 1.0, 10.0):
        vals = [an.coverage_worst_general(an.NetworkParams(lam=lam), g) for lam in (0.1, 1.0, 10.0)]
        err = max(err, max(vals) - min(vals))
    return Check("lambda invariance (analytic)", err < 1e-6, f"max spread {err:.2e}")


def _cs_two_routes() -> Check:
    err = max(abs(an.coverage_cs(g) - an.coverage_cs_integral(g, lam)) for g in (0.1, 0.8, 3.0, 30.0)
              for lam in (0.5, 2.0))
    return Check("CS closed form vs vertex-distance quadrature", err < 1e-6, f"max abs err {err:.2e}")


def _spectral() -> Check:
    ts = np.linspace(0.0, 10.0, 41)
    ident = max(abs(an.spectral_cs_integrand(t) - an.coverage_cs(math.expm1(t))) for t in ts)
    w = an.spectral_worst()
    ok = ident < 1e-14 and abs(w.nats - 0.27) <= 0.005 and abs(w.bps - 0.39) <= 0.005
    return Check("spectral efficiency (worst)", ok, f"{w.nats:.4f} nats = {w.bps:.4f} bps/Hz")


def _delaunay_oracles(n_points: int, seed: int) -> Check:
    w = Window(radius=math.sqrt(n_points / math.pi), guard=1.0)
    pat = sample_ppp(1.0, w, seed)
    tri = delaunay(pat)
    pts = pat.points
    centers, radii = circumcircles(pts, tri)
    d = np.hypot(centers[:, None, 0] - pts[None, :, 0], centers[:, None, 1] - pts[None, :, 1])
    inside = (d < radii[:, None] * (1 - 1e-9)).sum(axis=1)
    empty_ok = bool(np.all(inside == 0))
    verts = voronoi_vertices(pat, tri)
    dv = np.hypot(verts.positions[:, None, 0] - pts[None, :, 0], verts.positions[:, None, 1] - pts[None, :, 1])
    nearest3 = np.sort(np.argsort(dv, axis=1)[:, :3], axis=1)
    nn_ok = bool(np.array_equal(nearest3, np.sort(verts.generators, axis=1)))
    return Check("Delaunay empty circle / 3-nearest generators", empty_ok and nn_ok,
                 f"{len(pts)} points, {len(tri)} triangles, {len(verts)} vertices")


def _mc_checks(realizations: int, seed: int) -> list:
    cfg = SimConfig(realizations=realizations, master_seed=seed)
    run = run_simulation(cfg)
    out = []
    inten = run.vertex_intensity()
    rel = abs(inten.mean / 2.0 - 1.0)
    out.append(Check("vertex intensity = 2 lambda", rel < 0.02, f"{inten.mean:.4f} from {inten.n} vertices"))
    radii = run.circumradii()[:10_000]
    ks = stats.kstest(radii, lambda r: an.vertex_distance_cdf(r, 1.0))
    out.append(Check("circumradius law (KS)", ks.pvalue > 0.01, f"n={len(radii)}, p={ks.pvalue:.3f}"))
    near = run.nearest_distances()
    ks = stats.kstest(near, lambda r: an.nearest_distance_cdf(r, 1.0))
    out.append(Check("nearest-BS distance law (KS)", ks.pvalue > 0.01, f"n={len(near)}, p={ks.pvalue:.3f}"))
    worst_z = 0.0
    for db in (-10, -5, -2, -1, 0, 5, 10):
        g = an.db_to_linear(db)
        for metric, oracle in (("worst", an.coverage_worst_il), ("worst-cs", an.coverage_cs),
                               ("typical", an.coverage_typical_il)):
            e = run.coverage(g, metric)
            worst_z = max(worst_z, abs(e.mean - oracle(g)) / e.std_error)
    out.append(Check("MC vs analytic coverage (3 sigma)", worst_z <= 3.0, f"max |z| = {worst_z:.2f}"))
    zs = []
    for metric, oracle in (("worst", an.spectral_worst()), ("worst-cs", an.spectral_cs())):
        e = run.spectral(metric)
        zs.append(abs(e.mean - oracle.nats) / e.std_error)
    out.append(Check("MC vs analytic spectral efficiency (3 sigma)", max(zs) <= 3.0,
                     f"|z| = {zs[0]:.2f}, {zs[1]:.2f}"))
    return out


def run_checks(quick: bool = False, seed: int = 1, kappa_fn: Optional[Callable] = None) -> list:
    """Run the full suite; ``kappa_fn`` replaces the closed-form kappa in the
    chain-equality check (used to confirm that check can fail)."""
    kappa_fn = kappa_fn or an.kappa
    checks = [
        _quadrature_oracles(),
        _rho_closed_form(20 if quick else 100),
        _chain_equality(10 if quick else 50, kappa_fn),
        _lambda_invariance(),
        _cs_two_routes(),
        _spectral(),
        _delaunay_oracles(200 if quick else 500, seed),
    ]
    checks.extend(_mc_checks(40 if quick else 200, seed))
    return checks


def format_report(checks: list) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}" for c in checks]
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)

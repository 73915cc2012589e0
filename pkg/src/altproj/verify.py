"""Self-check suites behind the ``verify`` CLI command.

Each suite runs deterministic randomized checks (seeded via the
``ALTPROJ_SEED`` environment variable, default 42) plus the reference
fixtures, and reports one pass/fail row per check.  ``alpha_scale`` is a
test hook that multiplies the computed angle constant inside the
bound-compliance checks; scaling it up must break them.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import certify, engine, instances, lp
from .linalg import Ray, distance_to_finite_cone, distance_to_ray, norm
from .qp import project_polyhedron
from .sets import (
    EpigraphSet,
    HalfSpace,
    Polyhedron,
    project,
    project_halfspace,
    proximal_normal_generators,
    translate,
)

DEFAULT_SEED = 42


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def get_seed() -> int:
    raw = os.environ.get("ALTPROJ_SEED", "")
    try:
        return int(raw)
    except ValueError:
        return DEFAULT_SEED


def _random_set(rng: np.random.Generator):
    kind = rng.integers(0, 4)
    if kind == 0:
        n = int(rng.integers(2, 5))
        c = rng.normal(size=n)
        c /= np.linalg.norm(c)
        return HalfSpace(c, float(rng.normal()))
    if kind == 1:
        n = int(rng.integers(2, 5))
        poly, _ = instances.random_bounded_polyhedron(rng, n, int(rng.integers(0, 4)))
        return poly
    if kind == 2:
        return EpigraphSet("abs", rng.normal(size=2))
    return EpigraphSet("square", rng.normal(size=2))


def _sample_member(rng: np.random.Generator, s) -> np.ndarray:
    x = rng.normal(size=s.dim) * 2.0
    if isinstance(s, EpigraphSet):
        z = x - s.shift
        profile = abs(z[0]) if s.kind == "abs" else z[0] * z[0]
        z[1] = profile + abs(rng.normal())
        return z + s.shift
    return project(s, x)


def suite_linalg(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        u = rng.normal(size=n)
        v = rng.normal(size=n)
        if norm(u) < 1e-6 or norm(v) < 1e-6:
            continue
        worst = max(
            worst,
            abs(distance_to_ray(v, Ray(u)) - distance_to_ray(u, Ray(v))),
        )
    results.append(CheckResult("linalg/ray-symmetry", worst <= 1e-10, f"max dev {worst:.2e}"))

    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        u = rng.normal(size=n)
        v = rng.normal(size=n)
        if norm(u) < 1e-6 or norm(v) < 1e-6:
            continue
        lam = float(rng.uniform(0.1, 10.0))
        worst = max(
            worst,
            abs(distance_to_ray(lam * v, Ray(u)) - distance_to_ray(v, Ray(u))),
        )
    results.append(
        CheckResult("linalg/ray-scale-invariance", worst <= 1e-10, f"max dev {worst:.2e}")
    )

    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        v = rng.normal(size=n)
        g = rng.normal(size=n)
        if norm(v) < 1e-6 or norm(g) < 1e-6:
            continue
        worst = max(
            worst,
            abs(distance_to_finite_cone(v, [g]) - distance_to_ray(v, Ray(g))),
        )
    results.append(
        CheckResult("linalg/cone-single-generator", worst <= 1e-8, f"max dev {worst:.2e}")
    )

    ok = True
    for _ in range(100):
        n = int(rng.integers(2, 5))
        v = rng.normal(size=n)
        if norm(v) < 1e-6:
            continue
        gens = [rng.normal(size=n) for _ in range(4)]
        dists = [distance_to_finite_cone(v, gens[:k]) for k in range(5)]
        if any(dists[k + 1] > dists[k] + 1e-9 for k in range(4)):
            ok = False
    results.append(CheckResult("linalg/cone-monotone", ok, "adding generators never increases"))
    return results


def suite_sets(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    worst = 0.0
    for _ in range(200):
        s = _random_set(rng)
        x = rng.normal(size=s.dim) * 3.0
        p1 = project(s, x)
        p2 = project(s, p1)
        worst = max(worst, norm(p2 - p1))
    results.append(CheckResult("sets/projection-idempotent", worst <= 1e-9, f"max dev {worst:.2e}"))

    ok = True
    for _ in range(50):
        s = _random_set(rng)
        x = rng.normal(size=s.dim) * 3.0
        p = project(s, x)
        d = norm(x - p)
        for _ in range(20):
            z = _sample_member(rng, s)
            if d > norm(x - z) + 1e-9:
                ok = False
    results.append(CheckResult("sets/projection-optimal-sampled", ok, "1000 feasible samples"))

    worst = 0.0
    for _ in range(200):
        s = _random_set(rng)
        x = rng.normal(size=s.dim) * 3.0
        p = project(s, x)
        if norm(x - p) <= 1e-9:
            continue
        gens = proximal_normal_generators(s, p)
        worst = max(worst, distance_to_finite_cone(x - p, gens))
    results.append(CheckResult("sets/normal-cone-consistency", worst <= 1e-7, f"max res {worst:.2e}"))

    worst = 0.0
    for _ in range(200):
        s = _random_set(rng)
        x = rng.normal(size=s.dim) * 3.0
        v = rng.normal(size=s.dim)
        worst = max(worst, norm(project(translate(s, v), x + v) - (project(s, x) + v)))
    results.append(
        CheckResult("sets/translation-equivariance", worst <= 1e-9, f"max dev {worst:.2e}")
    )
    return results


def suite_qp(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 5))
        c = rng.normal(size=n)
        c /= np.linalg.norm(c)
        M = float(rng.normal())
        h = HalfSpace(c, M)
        single = Polyhedron(c.reshape(1, -1), np.array([M]))
        x = rng.normal(size=n) * 3.0
        worst = max(worst, norm(project_polyhedron(single, x).point - project_halfspace(h, x)))
    results.append(CheckResult("qp/halfspace-agreement", worst <= 1e-7, f"max dev {worst:.2e}"))

    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 5))
        lo = rng.normal(size=n) - 1.0
        hi = lo + rng.uniform(0.5, 2.0, size=n)
        rows = np.vstack([np.eye(n), -np.eye(n)])
        rhs = np.concatenate([hi, -lo])
        box = Polyhedron(rows, rhs)
        x = rng.normal(size=n) * 3.0
        worst = max(worst, norm(project_polyhedron(box, x).point - np.clip(x, lo, hi)))
    results.append(CheckResult("qp/box-agreement", worst <= 1e-7, f"max dev {worst:.2e}"))

    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 5))
        poly, _ = instances.random_bounded_polyhedron(rng, n, int(rng.integers(0, 5)))
        x = rng.normal(size=n) * 4.0
        res = project_polyhedron(poly, x)
        stat = norm(x - res.point - poly.A.T @ res.dual)
        worst = max(worst, stat, res.residual, float(-res.dual.min(initial=0.0)))
    results.append(CheckResult("qp/kkt-certificate", worst <= 1e-6, f"max res {worst:.2e}"))
    return results


def suite_engine(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    ok = True
    detail = ""
    for k in (0.0, 0.5, 1.0):
        trace = engine.run(
            instances.lower_halfplane(),
            instances.absval_epigraph(k),
            np.array([1.0 + 2.0 * k, 0.0]),
            max_iters=60,
            cert_tol=1e-10,
        )
        gaps = trace.gaps
        if any(gaps[i + 1] > gaps[i] + 1e-10 for i in range(len(gaps) - 1)):
            ok = False
            detail = f"gap increase at k={k}"
    results.append(CheckResult("engine/gaps-monotone", ok, detail or "all fixtures"))

    a_set = instances.lower_halfplane()
    b_set = instances.absval_polyhedron(1.0)
    alpha = certify.alpha_polyhedron_halfspace(b_set, a_set)
    rate = 1.0 - alpha * alpha
    trace = engine.run(a_set, b_set, np.array([9.0, 0.0]), max_iters=100)
    ok = True
    last_cycle = (len(trace.gaps) - 1) // 2
    for n in range(last_cycle):
        if trace.gaps[2 * n + 1] > rate * trace.gaps[2 * n] + 1e-9:
            ok = False
    results.append(
        CheckResult("engine/per-cycle-contraction", ok, f"rate {rate:.4f} on shifted fixture")
    )
    return results


def suite_bounds(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    ok = True
    worst_alpha = 0.0
    for _ in range(200):
        inst = instances.random_pair_instance(rng)
        alpha = certify.alpha_polyhedron_halfspace(inst.poly, inst.halfspace)
        if not 0.0 < alpha <= 0.5:
            ok = False
        worst_alpha = max(worst_alpha, alpha)
    results.append(CheckResult("bounds/alpha-range", ok, f"max alpha {worst_alpha:.4f}"))

    failures = 0
    total = 0
    for _ in range(25):
        inst = instances.random_pair_instance(rng)
        alpha = certify.alpha_polyhedron_halfspace(inst.poly, inst.halfspace)
        alpha = min(alpha * alpha_scale, 0.999999)
        d_x0 = norm(inst.x0 - project_polyhedron(inst.poly, inst.x0).point)
        report = certify.iteration_bound(alpha, inst.d_ab, max(d_x0, inst.d_ab))
        trace = engine.run(inst.halfspace, inst.poly, inst.x0, max_iters=20000)
        total += 1
        if (
            trace.stop_reason is not engine.StopReason.CERTIFIED
            or trace.steps_to_converge > report.max_steps
        ):
            failures += 1
    results.append(
        CheckResult("bounds/finite-step-compliance", failures == 0, f"{failures}/{total} violations")
    )

    ok = True
    for _ in range(10):
        inst = instances.random_pair_instance(rng)
        alpha = certify.alpha_polyhedron_halfspace(inst.poly, inst.halfspace)
        mu, shifted = certify.one_step_shift(
            inst.halfspace, inst.poly, inst.x0, alpha, inst.d_ab
        )
        x_start = inst.x0 - mu * inst.halfspace.c
        trace = engine.run(shifted, inst.poly, x_start, max_iters=50)
        if trace.stop_reason is not engine.StopReason.CERTIFIED or trace.steps_to_converge > 2:
            ok = False
    results.append(CheckResult("bounds/shift-forces-one-step", ok, "10 random instances"))
    return results


def suite_lp(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []
    worst_direct = 0.0
    worst_shifted = 0.0
    one_step_ok = True
    cone_worst = 0.0
    for _ in range(20):
        problem, optimum, _ = instances.random_lp_instance(rng)
        direct = lp.solve_lp(problem, strategy="direct")
        shifted = lp.solve_lp(problem, strategy="shifted")
        worst_direct = max(worst_direct, abs(direct.objective - optimum))
        worst_shifted = max(worst_shifted, abs(shifted.objective - optimum))
        if shifted.steps != 1:
            one_step_ok = False
        active = [
            problem.poly.A[i]
            for i in np.flatnonzero(
                np.abs(problem.poly.A @ shifted.solution - problem.poly.b) <= 1e-6
            )
        ]
        # At a minimizer of <c, x> the outward normal cone of the feasible
        # set contains -c.
        cone_worst = max(cone_worst, distance_to_finite_cone(-problem.c, active))
    results.append(
        CheckResult("lp/direct-matches-oracle", worst_direct <= 1e-5, f"max dev {worst_direct:.2e}")
    )
    results.append(
        CheckResult("lp/shifted-matches-oracle", worst_shifted <= 1e-5, f"max dev {worst_shifted:.2e}")
    )
    results.append(CheckResult("lp/shifted-single-projection", one_step_ok, "steps == 1"))
    results.append(
        CheckResult("lp/solution-cone-certificate", cone_worst <= 1e-6, f"max res {cone_worst:.2e}")
    )
    return results


def suite_examples(rng: np.random.Generator, alpha_scale: float) -> list[CheckResult]:
    results = []

    # Consistent absolute-value pair: per-step gaps contract at least as
    # fast as the certified envelope (7/8)^n.
    trace = engine.run(
        instances.lower_halfplane(),
        instances.absval_epigraph(0.0),
        np.array([1.0, 0.0]),
        max_iters=40,
        cert_tol=1e-12,
    )
    gaps = trace.gaps
    ok = all(gaps[n] <= (7.0 / 8.0) ** n * gaps[0] + 1e-9 for n in range(len(gaps)))
    results.append(CheckResult("examples/absval-rate-envelope", ok, f"{len(gaps)} gaps checked"))

    ok = True
    detail = ""
    for k in (0.5, 1.0, 2.0):
        for x_start in (1.0, 3.0, 10.0):
            d0 = instances.absval_distance(x_start, k)
            bound = 2 * math.floor(math.log(k / d0) / math.log(7.0 / 8.0)) + 1
            trace = engine.run(
                instances.lower_halfplane(),
                instances.absval_epigraph(k),
                np.array([x_start, 0.0]),
                max_iters=200,
            )
            if trace.stop_reason is not engine.StopReason.CERTIFIED:
                ok = False
                detail = f"k={k} x0={x_start} did not certify"
            elif trace.steps_to_converge > bound:
                ok = False
                detail = f"k={k} x0={x_start}: {trace.steps_to_converge} > {bound}"
    results.append(CheckResult("examples/absval-shifted-finite-steps", ok, detail or "9 fixtures"))

    trace = engine.run(
        instances.lower_halfplane(),
        instances.parabola_epigraph(0.0),
        np.array([1.0, 0.0]),
        max_iters=1200,
        cert_tol=1e-13,
    )
    ratios = [
        trace.gaps[i + 1] / trace.gaps[i] for i in range(len(trace.gaps) - 1) if trace.gaps[i] > 0
    ]
    ok = max(ratios, default=0.0) > 0.99
    results.append(
        CheckResult(
            "examples/parabola-no-linear-rate",
            ok,
            f"max gap ratio {max(ratios, default=0.0):.4f}",
        )
    )

    # Shifted parabola: the minimum-distance pair is approached but never
    # reached exactly; after a short horizon the certificate must still be
    # open even though every iterate is feasible.
    trace = engine.run(
        instances.lower_halfplane(),
        instances.parabola_epigraph(1.0),
        np.array([1.0, 0.0]),
        max_iters=8,
        cert_tol=1e-13,
    )
    residual = max(trace.certificate.residual_A, trace.certificate.residual_B)
    _, b_final = trace.final_pair()
    ok = (
        trace.stop_reason is engine.StopReason.MAX_ITERS
        and residual > 1e-6
        and norm(b_final - np.array([0.0, 1.0])) > 0.0
    )
    results.append(
        CheckResult(
            "examples/parabola-shifted-no-finite-convergence",
            ok,
            f"residual {residual:.2e} after 8 cycles",
        )
    )
    return results


SUITES = {
    "linalg": suite_linalg,
    "sets": suite_sets,
    "qp": suite_qp,
    "engine": suite_engine,
    "bounds": suite_bounds,
    "lp": suite_lp,
    "examples": suite_examples,
}


def run_suites(names, seed: int | None = None, alpha_scale: float = 1.0) -> list[CheckResult]:
    """Run the named suites (all of them when ``names`` is empty)."""
    if not names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    if seed is None:
        seed = get_seed()
    results = []
    for name in sorted(names):
        rng = np.random.default_rng(seed)
        results.extend(SUITES[name](rng, alpha_scale))
    return sorted(results, key=lambda r: r.name)

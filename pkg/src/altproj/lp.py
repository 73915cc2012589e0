"""Linear programs solved as minimum-distance problems.

``min <c, x> over {Ax <= b}`` becomes the search for a nearest pair of the
feasible polyhedron and the sub-level half-space ``{x : <c, x> <= M}``,
where ``M`` is a lower bound strictly below the optimal value.  Either run
the alternating-projections engine directly, or shift the half-space far
enough that a single projection of the shifted start lands on the solution.

A brute-force vertex enumeration oracle provides independent ground truth
at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import certify, engine
from .errors import (
    DimensionMismatch,
    EmptyPolyhedron,
    LowerBoundNotStrict,
    NotConverged,
    StartNotInA,
    TooLarge,
    Unbounded,
    ZeroVector,
)
from .linalg import ZERO_TOL, as_point, distance_to_finite_cone, norm
from .qp import project_along_ray
from .sets import HalfSpace, Polyhedron, project_halfspace

_MAX_ORACLE_DIM = 8
_MAX_ORACLE_ROWS = 24
_STRICT_TOL = 1e-10

DIRECT = "DirectAP"
SHIFTED = "ShiftedOneStep"
_STRATEGY_ALIASES = {
    "direct": DIRECT,
    "directap": DIRECT,
    "shifted": SHIFTED,
    "shiftedonestep": SHIFTED,
}


@dataclass(frozen=True)
class LPProblem:
    """``min <c, x>`` over ``poly`` with strict lower bound ``M``."""

    c: np.ndarray
    poly: Polyhedron
    M: float

    def __post_init__(self):
        c = as_point(self.c)
        if float(np.linalg.norm(c)) <= ZERO_TOL:
            raise ZeroVector("objective vector must be nonzero")
        if c.shape[0] != self.poly.dim:
            raise DimensionMismatch("objective and polyhedron dimensions differ")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "M", float(self.M))


@dataclass
class LPOutcome:
    """Solution with its optimality certificate.

    ``steps`` counts the polyhedron projections of the solve itself: the
    certified step count for the direct strategy, exactly 1 for the
    shifted strategy.  ``trace`` holds the full run for the direct
    strategy and is ``None`` for the shifted one.
    """

    solution: np.ndarray
    objective: float
    steps: int
    certificate: engine.Certificate
    method: str
    trace: engine.Trace | None = None


def check_oracle_limits(p: Polyhedron) -> None:
    if p.dim > _MAX_ORACLE_DIM or p.num_rows > _MAX_ORACLE_ROWS:
        raise TooLarge(
            f"enumeration limits are n <= {_MAX_ORACLE_DIM}, m <= {_MAX_ORACLE_ROWS}"
        )


def feasible_vertices(p: Polyhedron):
    """All vertices of ``p`` with their full active row sets.

    Enumerates every n-subset of rows, solves the square system, keeps
    feasible solutions, and deduplicates.  Returns a list of
    ``(vertex, active_indices)`` where ``active_indices`` holds every row
    tight at the vertex (which exceeds n at degenerate vertices).
    """
    check_oracle_limits(p)
    m, n = p.num_rows, p.dim
    vertices = []
    seen = set()
    for subset in itertools.combinations(range(m), n):
        rows = p.A[list(subset)]
        rhs = p.b[list(subset)]
        try:
            v = np.linalg.solve(rows, rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(v)):
            continue
        if float(np.abs(rows @ v - rhs).max()) > 1e-8 * (1.0 + float(np.abs(rhs).max())):
            continue
        if not np.all(p.A @ v <= p.b + 1e-7 * (1.0 + float(np.linalg.norm(v)))):
            continue
        key = tuple(np.round(v, 9))
        if key in seen:
            continue
        seen.add(key)
        slack = np.abs(p.A @ v - p.b)
        active = tuple(np.flatnonzero(slack <= 1e-7 * (1.0 + np.abs(p.b))).tolist())
        vertices.append((v, active))
    return vertices


def vertex_oracle(p: Polyhedron, c) -> tuple[float, np.ndarray]:
    """Brute-force LP solve: enumerate all row subsets of size n.

    Returns ``(optimum, argmin_vertex)``.  Raises :class:`TooLarge` beyond
    desk scale (n > 8 or m > 24), :class:`Unbounded` when ``-c`` is not in
    the cone of the rows (the objective then decreases along a recession
    direction), and :class:`EmptyPolyhedron` when no feasible vertex exists.
    """
    c = as_point(c)
    if c.shape[0] != p.dim:
        raise DimensionMismatch("objective and polyhedron dimensions differ")
    check_oracle_limits(p)
    # Bounded below on a nonempty polyhedron iff -c lies in the cone of the
    # outward row normals (dual feasibility).
    if distance_to_finite_cone(-c, list(p.A)) > 1e-8:
        raise Unbounded("objective decreases along a recession direction")

    best_obj = np.inf
    best_vertex = None
    for v, _ in feasible_vertices(p):
        obj = float(c @ v)
        if obj < best_obj - 1e-12:
            best_obj = obj
            best_vertex = v
    if best_vertex is None:
        raise EmptyPolyhedron("no feasible vertex (empty or non-pointed feasible set)")
    return best_obj, best_vertex


def _default_start(c: np.ndarray, M: float) -> np.ndarray:
    # Any point with <c, x0> = M - 1, obtained by scaling c.
    return ((M - 1.0) / float(c @ c)) * c


def solve_lp(
    problem: LPProblem,
    x0=None,
    strategy: str = "direct",
    max_iters: int = 5000,
    cert_tol: float = 1e-8,
) -> LPOutcome:
    """Solve the LP by alternating projections.

    ``strategy`` is ``"direct"`` (run the engine until the nearest-pair
    certificate holds; the solution is the final feasible iterate) or
    ``"shifted"`` (translate the sub-level half-space so the one-step
    threshold holds, then project the shifted start once).
    """
    method = _STRATEGY_ALIASES.get(strategy.lower())
    if method is None:
        raise ValueError(f"unknown strategy {strategy!r}")
    c, poly, M = problem.c, problem.poly, problem.M
    if x0 is None:
        x0 = _default_start(c, M)
    else:
        x0 = as_point(x0)
        if float(c @ x0) > M + 1e-9:
            raise StartNotInA("x0 must satisfy <c, x0> <= M")
    halfspace = HalfSpace(c, M)

    if method == DIRECT:
        trace = engine.run(halfspace, poly, x0, max_iters=max_iters, cert_tol=cert_tol)
        _, b_star = trace.final_pair()
        if trace.final_gap <= cert_tol:
            # The run found a (near-)common point: the sets intersect, so M
            # was not strictly below the optimum.
            raise LowerBoundNotStrict(
                f"offset M={M} is not strictly below the optimal value"
            )
        _check_strict_bound(c, M, b_star)
        if trace.stop_reason is not engine.StopReason.CERTIFIED:
            raise NotConverged(
                f"direct solve stopped with {trace.stop_reason.value} "
                f"after {len(trace.gaps) // 2} cycles"
            )
        steps = trace.steps_to_converge
        certificate = trace.certificate
    else:
        alpha = certify.alpha_polyhedron_halfspace(poly, halfspace)
        # d_AB = 0 is a valid lower bound on the pair distance and yields a
        # larger (still sufficient) shift, so no distance estimate is needed.
        mu, shifted = certify.one_step_shift(halfspace, poly, x0, alpha, 0.0)
        result = project_along_ray(poly, x0, -c, mu)
        b_star = result.point
        _check_strict_bound(c, M, b_star)
        a_star = project_halfspace(shifted, b_star)
        certificate = engine.check_certificate(shifted, poly, a_star, b_star, cert_tol)
        if not certificate.holds:
            raise NotConverged("shifted projection did not certify optimality")
        steps = 1

    viol = float(np.max(poly.A @ b_star - poly.b, initial=0.0))
    if viol > 1e-7:
        raise NotConverged(f"solution violates feasibility by {viol:.3e}")
    return LPOutcome(
        solution=b_star,
        objective=float(c @ b_star),
        steps=steps,
        certificate=certificate,
        method=method,
        trace=trace if method == DIRECT else None,
    )


def _check_strict_bound(c: np.ndarray, M: float, b_star: np.ndarray) -> None:
    # Distance from the solve's own feasible point to the half-space; if it
    # vanishes the offset M was not strictly below the optimum.
    gap = (float(c @ b_star) - M) / norm(c)
    if gap <= _STRICT_TOL:
        raise LowerBoundNotStrict(
            f"offset M={M} is not strictly below the optimal value"
        )


def problem_from_json(obj: dict, M=None) -> LPProblem:
    """Build an :class:`LPProblem` from ``{"c", "A", "b", "M"}``."""
    c = as_point(obj["c"])
    poly = Polyhedron(np.asarray(obj["A"], dtype=float), as_point(obj["b"]))
    if M is None:
        if "M" not in obj:
            raise KeyError("problem JSON has no 'M' and no override was given")
        M = float(obj["M"])
    return LPProblem(c, poly, float(M))


def outcome_to_json(outcome: LPOutcome, trace_csv: str | None = None) -> dict:
    return {
        "solution": outcome.solution.tolist(),
        "objective": outcome.objective,
        "steps": outcome.steps,
        "method": outcome.method,
        "certificate": {
            "residual_A": outcome.certificate.residual_A,
            "residual_B": outcome.certificate.residual_B,
            "holds": outcome.certificate.holds,
        },
        "trace_csv": trace_csv,
    }

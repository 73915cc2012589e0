"""Dense vector kernels: norms, ray distances, and nonnegative least squares.

Everything in this module is a pure function on small dense vectors
(problems of interest have n <= 100, usually n <= 10).  Vectors are plain
1-D ``numpy.ndarray`` objects; :func:`as_point` is the single entry point
that coerces and validates user input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroVector

# Norm below which a vector counts as zero; double precision leaves ample
# headroom at desk scale.
ZERO_TOL = 1e-12


def as_point(values) -> np.ndarray:
    """Coerce ``values`` to a finite 1-D float array."""
    p = np.asarray(values, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size == 0:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("vector entries must be finite")
    return p


def norm(p) -> float:
    """Euclidean norm of a vector."""
    return float(np.linalg.norm(as_point(p)))


def check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}"
        )


@dataclass(frozen=True)
class Ray:
    """Half line ``{t * direction : t >= 0}`` spanned by a nonzero vector."""

    direction: np.ndarray

    def __post_init__(self):
        d = as_point(self.direction)
        if float(np.linalg.norm(d)) <= ZERO_TOL:
            raise ZeroVector("ray direction must be nonzero")
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "direction", d)


def distance_to_ray(v, ray: Ray) -> float:
    """Distance from ``v/||v||`` to the closed ray spanned by ``ray.direction``.

    Equals ``sqrt(1 - <v,u>^2 / (||u||^2 ||v||^2))`` when ``<u,v> > 0`` and
    1 otherwise, so the result always lies in [0, 1].  Evaluated as the norm
    of the orthogonal rejection of ``v/||v||`` from the ray, which stays
    accurate for nearly parallel vectors where the textbook form cancels.
    """
    v = as_point(v)
    u = ray.direction
    check_same_dim(v, u)
    nv = float(np.linalg.norm(v))
    if nv <= ZERO_TOL:
        raise ZeroVector("cannot normalize a zero vector")
    dot = float(v @ u)
    if dot <= 0.0:
        return 1.0
    vhat = v / nv
    uhat = u / float(np.linalg.norm(u))
    rejection = vhat - float(vhat @ uhat) * uhat
    return min(1.0, float(np.linalg.norm(rejection)))


def nnls(G: np.ndarray, y: np.ndarray, max_iter: int | None = None):
    """Solve ``min_{lam >= 0} ||G @ lam - y||`` by the Lawson-Hanson method.

    Parameters
    ----------
    G : ndarray, shape (n, m)
        Columns are the generators the target is expanded over.
    y : ndarray, shape (n,)
        Target vector.
    max_iter : int, optional
        Cap on outer iterations; defaults to ``50 * m``.

    Returns
    -------
    lam : ndarray, shape (m,)
        Nonnegative coefficients at termination.
    rnorm : float
        Residual norm ``||G @ lam - y||``.
    """
    G = np.asarray(G, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = G.shape
    if max_iter is None:
        max_iter = 50 * max(m, 1)

    lam = np.zeros(m)
    passive = np.zeros(m, dtype=bool)
    resid = y.copy()
    # Dual feasibility tolerance, scaled to the data.
    tol = 1e-11 * max(1.0, float(np.abs(G).max(initial=0.0))) * max(
        1.0, float(np.linalg.norm(y))
    )

    for _ in range(max_iter):
        w = G.T @ resid
        w[passive] = -np.inf
        j = int(np.argmax(w))
        if w[j] <= tol:
            break
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            s_sub, *_ = np.linalg.lstsq(G[:, idx], y, rcond=None)
            if np.all(s_sub > 0.0):
                lam = np.zeros(m)
                lam[idx] = s_sub
                break
            # Step toward s until the first coefficient hits zero.
            s = np.zeros(m)
            s[idx] = s_sub
            mask = passive & (s <= 0.0)
            ratios = lam[mask] / (lam[mask] - s[mask])
            step = float(np.min(ratios))
            lam = lam + step * (s - lam)
            passive &= lam > ZERO_TOL
            lam[~passive] = 0.0
            if not np.any(passive):
                break
        resid = y - G @ lam
    return lam, float(np.linalg.norm(resid))


def distance_to_finite_cone(v, generators) -> float:
    """Distance from ``v/||v||`` to the cone generated by ``generators``.

    Solves the nonnegative least-squares problem
    ``min_{lam >= 0} ||v/||v|| - sum_i lam_i g_i||``.  An empty generator
    list means the cone is ``{0}`` and the distance is 1.
    """
    v = as_point(v)
    nv = float(np.linalg.norm(v))
    if nv <= ZERO_TOL:
        raise ZeroVector("cannot normalize a zero vector")
    vhat = v / nv
    gens = [as_point(g) for g in generators]
    gens = [g for g in gens if float(np.linalg.norm(g)) > ZERO_TOL]
    if not gens:
        return 1.0
    for g in gens:
        check_same_dim(v, g)
    G = np.column_stack(gens)
    _, rnorm = nnls(G, vhat)
    return min(rnorm, 1.0)

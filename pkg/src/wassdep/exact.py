"""Exact discrete optimal transport and closed-form Wasserstein distances.

The exact solver treats the two standard regimes separately: equal-size
uniform instances reduce to a linear assignment problem (an optimal vertex of
the Birkhoff polytope is a permutation), while general marginals go through
the sparse transport linear program. Both return certified optima of the same
LP, so every downstream index can lean on them as oracles.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog

from .exceptions import WassdepError
from .measures import CostSpec, DiscreteMeasure, TransportPlan, TwoStageDiscreteLaw, cost_matrix

__all__ = [
    "solve_exact",
    "solve_from_cost",
    "wasserstein_1d",
    "gaussian_w2",
    "adapted_wasserstein",
]


class ExactSolverError(WassdepError, RuntimeError):
    """The LP backend failed; must not happen on well-posed transport inputs."""


# ---------------------------------------------------------------------------
# Exact solver
# ---------------------------------------------------------------------------


def solve_from_cost(cost: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimize ``<plan, cost>`` over couplings of weight vectors a and b.

    Returns the optimal mass matrix and its cost. Used by :func:`solve_exact`
    and by callers that assemble composite cost matrices themselves (nested
    transport, minimum over candidate sets).
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (n,) or b.shape != (m,):
        raise ValueError("marginal lengths do not match the cost matrix")
    if abs(a.sum() - b.sum()) > 1e-9:
        raise ValueError(f"infeasible marginals: masses {a.sum()!r} vs {b.sum()!r}")

    if n == m and np.all(a == a[0]) and np.all(b == b[0]):
        rows, cols = linear_sum_assignment(cost)
        mass = np.zeros((n, m))
        mass[rows, cols] = a[0]
        total = float(cost[rows, cols].sum() * a[0])
        return mass, total

    # General marginals: sparse transport LP. One of the n+m equality rows is
    # redundant; HiGHS copes, but the column sums are rescaled to eliminate
    # any rounding gap between the two mass totals.
    b = b * (a.sum() / b.sum())
    row_sum = sparse.kron(sparse.eye(n, format="csr"), np.ones((1, m)), format="csr")
    col_sum = sparse.kron(np.ones((1, n)), sparse.eye(m, format="csr"), format="csr")
    constraints = sparse.vstack([row_sum, col_sum], format="csr")
    rhs = np.concatenate([a, b])
    res = linprog(cost.ravel(), A_eq=constraints, b_eq=rhs, bounds=(0, None), method="highs")
    if not res.success:
        raise ExactSolverError(f"transport LP failed: {res.message}")
    mass = np.clip(res.x.reshape(n, m), 0.0, None)
    return mass, float(res.fun)


def solve_exact(src: DiscreteMeasure, dst: DiscreteMeasure, spec: CostSpec) -> TransportPlan:
    """Optimal coupling of two discrete measures under ``spec``.

    The plan's ``cost`` is the minimal expected ``d^p``; ``distance`` is its
    p-th root, i.e. the Wasserstein distance of order ``spec.p``.
    """
    cost = cost_matrix(src, dst, spec)
    mass, total = solve_from_cost(cost, src.weights, dst.weights)
    total = max(total, 0.0)
    return TransportPlan(mass=mass, cost=total, distance=total ** (1.0 / spec.p))


# ---------------------------------------------------------------------------
# One-dimensional closed form
# ---------------------------------------------------------------------------


def _quantile_cost(x: np.ndarray, wx: np.ndarray, y: np.ndarray, wy: np.ndarray, p: float) -> float:
    """Integral of |Fx^{-1} - Fy^{-1}|^p over (0,1) for discrete laws.

    Quantiles are the right-continuous generalized inverses; tied atoms stack
    their mass. The integrand is piecewise constant between the merged
    cumulative-weight breakpoints, so the integral is an exact finite sum.
    """
    ox = np.argsort(x, kind="stable")
    oy = np.argsort(y, kind="stable")
    xs, cwx = x[ox], np.cumsum(wx[ox])
    ys, cwy = y[oy], np.cumsum(wy[oy])
    levels = np.concatenate([cwx[:-1], cwy[:-1]])
    levels = np.sort(levels[(levels > 0.0) & (levels < 1.0)])
    edges = np.concatenate([[0.0], levels, [1.0]])
    seg = np.diff(edges)
    mids = edges[:-1] + seg / 2
    qx = xs[np.minimum(np.searchsorted(cwx, mids, side="left"), len(xs) - 1)]
    qy = ys[np.minimum(np.searchsorted(cwy, mids, side="left"), len(ys) - 1)]
    gaps = np.abs(qx - qy)
    if p != 1:
        gaps = gaps ** p
    return float(np.dot(seg, gaps))


def wasserstein_1d(src: DiscreteMeasure, dst: DiscreteMeasure, p: float = 1.0) -> float:
    """L^p distance between the empirical quantile functions of two 1D laws."""
    if src.dim != 1 or dst.dim != 1:
        raise ValueError("wasserstein_1d needs one-dimensional measures")
    if p < 1:
        raise ValueError("order p must be >= 1")
    cost = _quantile_cost(src.points[:, 0], src.weights, dst.points[:, 0], dst.weights, p)
    return cost ** (1.0 / p)


# ---------------------------------------------------------------------------
# Gaussian closed form
# ---------------------------------------------------------------------------

# A covariance whose smallest eigenvalue dips below -RELATIVE_PSD_TOL * ||S||
# is treated as genuinely indefinite instead of silently clamped.
RELATIVE_PSD_TOL = 1e-8


def _psd_sqrt(mat: np.ndarray, what: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    scale = max(float(np.abs(mat).max()), 1e-300)
    if np.abs(mat - mat.T).max() > RELATIVE_PSD_TOL * scale:
        raise ValueError(f"{what} is not symmetric")
    eigvals, eigvecs = np.linalg.eigh((mat + mat.T) / 2)
    bound = RELATIVE_PSD_TOL * max(float(np.abs(eigvals).max()), 1e-300)
    if eigvals.min() < -bound:
        raise ValueError(
            f"{what} is indefinite: eigenvalue {eigvals.min()!r} below -{bound!r}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def gaussian_w2(mean1, cov1, mean2, cov2) -> float:
    """Order-2 Wasserstein distance between two Gaussian laws.

    sqrt(||a1-a2||^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2})), with
    matrix square roots taken through symmetric eigendecompositions. Negative
    eigenvalues within 1e-8 of the spectral scale are clamped to zero; beyond
    that the input is rejected as indefinite.
    """
    a1 = np.atleast_1d(np.asarray(mean1, dtype=float))
    a2 = np.atleast_1d(np.asarray(mean2, dtype=float))
    s1 = np.atleast_2d(np.asarray(cov1, dtype=float))
    s2 = np.atleast_2d(np.asarray(cov2, dtype=float))
    if a1.shape != a2.shape or s1.shape != s2.shape or s1.shape[0] != a1.shape[0]:
        raise ValueError("mean/covariance shapes disagree")
    root1 = _psd_sqrt(s1, "first covariance")
    inner = root1 @ s2 @ root1
    cross = _psd_sqrt((inner + inner.T) / 2, "cross term")
    trace_term = float(np.trace(s1) + np.trace(s2) - 2.0 * np.trace(cross))
    squared = float(np.sum((a1 - a2) ** 2)) + trace_term
    return float(np.sqrt(max(squared, 0.0)))


# ---------------------------------------------------------------------------
# Adapted (nested) distance for discrete two-stage laws
# ---------------------------------------------------------------------------


def _conditional_cost(first: DiscreteMeasure, second: DiscreteMeasure, p: float) -> float:
    """W_p^p between two conditional laws (1D fast path, exact LP otherwise)."""
    if first.dim == 1:
        return _quantile_cost(first.points[:, 0], first.weights, second.points[:, 0], second.weights, p)
    spec = CostSpec(p=p)
    return solve_exact(first, second, spec).cost


def adapted_wasserstein(law1: TwoStageDiscreteLaw, law2: TwoStageDiscreteLaw, spec: CostSpec) -> float:
    """Nested transport distance between discrete two-stage laws.

    Outer exact OT over the first marginals where moving x to x' costs
    ``|x - x'|^p`` plus ``W_p^p`` between the attached conditional laws; the
    p-th root of the optimum is returned. Only ``spec.p`` is consulted: the
    nested cost has its own fixed two-level structure.
    """
    if law1.x_points.shape[1] != law2.x_points.shape[1]:
        raise ValueError("first-coordinate dimensions disagree")
    if law1.conditionals[0].dim != law2.conditionals[0].dim:
        raise ValueError("conditional dimensions disagree")
    p = spec.p
    from scipy.spatial.distance import cdist

    outer = cdist(law1.x_points, law2.x_points)
    if p != 1:
        outer = outer ** p
    inner = np.empty((law1.n, law2.n))
    for i, cond_i in enumerate(law1.conditionals):
        for j, cond_j in enumerate(law2.conditionals):
            inner[i, j] = _conditional_cost(cond_i, cond_j, p)
    _, total = solve_from_cost(outer + inner, law1.x_weights, law2.x_weights)
    return max(total, 0.0) ** (1.0 / p)

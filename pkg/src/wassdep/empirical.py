"""Sample containers, product-measure estimators, and rank transforms.

Everything here turns raw paired observations into the discrete measures the
dependence functionals consume: empirical joint laws, estimated product
laws (sample splitting, permutation, or the full n^2 grid), conditional-law
partitions, mean-discrepancy statistics, and copula/rank normalizations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .exceptions import DataError
from .measures import CostSpec, DiscreteMeasure, cost_matrix

__all__ = [
    "PairedSample",
    "ConditionalFamily",
    "to_measure",
    "gmd_ustat",
    "gmd_plugin",
    "dirac_transport_cost",
    "product_estimator",
    "copula_transform",
    "multivariate_ranks",
    "partition",
    "default_bin_count",
]


def _as_matrix(rows, name: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DataError(f"{name} must be a nonempty n x d matrix")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class PairedSample:
    """n paired observations (x_i, y_i) plus the seed that produced them."""

    xs: np.ndarray
    ys: np.ndarray
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "xs", _as_matrix(self.xs, "xs"))
        object.__setattr__(self, "ys", _as_matrix(self.ys, "ys"))
        if self.xs.shape[0] != self.ys.shape[0]:
            raise DataError(
                f"row counts differ: {self.xs.shape[0]} x-rows vs {self.ys.shape[0]} y-rows"
            )

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def dx(self) -> int:
        return self.xs.shape[1]

    @property
    def dy(self) -> int:
        return self.ys.shape[1]

    def joint_rows(self) -> np.ndarray:
        return np.hstack([self.xs, self.ys])


def to_measure(rows) -> DiscreteMeasure:
    """Empirical distribution of the rows: uniform mass 1/n on each row.

    Repeated rows stay as separate atoms; the measures module treats them as
    one logical atom of accumulated mass.
    """
    return DiscreteMeasure(_as_matrix(rows, "rows"))


# ---------------------------------------------------------------------------
# Mean discrepancy statistics
# ---------------------------------------------------------------------------


def gmd_ustat(rows, p: float = 1.0, spec: CostSpec | None = None) -> float:
    """Unbiased mean p-th power discrepancy: mean of d(z_i, z_j)^p over i != j.

    Euclidean metric by default; pass a cost specification for composite
    metrics. Closed forms cover the common cases (p=2 any dimension, p=1 in
    one dimension); everything else goes through the pairwise matrix.
    """
    z = _as_matrix(rows, "rows")
    n = z.shape[0]
    if n < 2:
        raise DataError("mean discrepancy needs at least 2 rows")
    if spec is not None:
        m = DiscreteMeasure(z)
        c = cost_matrix(m, m, spec)
        return float((c.sum() - np.trace(c)) / (n * (n - 1)))
    if p == 2:
        # sum_{i,j} |z_i - z_j|^2 = 2n sum|c_i|^2 - 2|sum c_i|^2 for centered c.
        centered = z - z.mean(axis=0)
        sq = np.einsum("ij,ij->", centered, centered)
        drift = centered.sum(axis=0)
        total = 2.0 * n * sq - 2.0 * float(drift @ drift)
        return max(float(total / (n * (n - 1))), 0.0)
    if p == 1 and z.shape[1] == 1:
        s = np.sort(z[:, 0])
        coeff = 2.0 * np.arange(1 - n, n, 2)
        return float(np.dot(coeff, s) / (n * (n - 1)))
    d = cdist(z, z)
    if p != 1:
        d = d ** p
    return float((d.sum() - np.trace(d)) / (n * (n - 1)))


def gmd_plugin(measure: DiscreteMeasure, p: float = 1.0) -> float:
    """With-replacement mean p-th power discrepancy of a weighted measure.

    Computed row by row through :func:`dirac_transport_cost` so that callers
    pairing it with dirac transport costs accumulate bitwise-identical sums.
    """
    total = 0.0
    for i in range(measure.n):
        total += measure.weights[i] * dirac_transport_cost(
            measure.points[i], measure.points, measure.weights, p
        )
    return total


def dirac_transport_cost(point: np.ndarray, support: np.ndarray, weights: np.ndarray, p: float) -> float:
    """Expected d(point, Z)^p under the discrete law (support, weights).

    This is the p-th power transport cost from a one-point mass, whose
    coupling is forced. Shared by the plug-in discrepancy and the
    dirac-conditional fast path precisely so the two agree bit for bit.
    """
    gaps = support - point
    if support.shape[1] == 1:
        d = np.abs(gaps[:, 0])
    else:
        d = np.sqrt(np.einsum("ij,ij->i", gaps, gaps))
    if p != 1:
        d = d ** p
    return float(np.dot(weights, d))


# ---------------------------------------------------------------------------
# Product-measure estimators
# ---------------------------------------------------------------------------


def _derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation with no fixed point, by rejection."""
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == np.arange(n)):
            return perm


def product_estimator(
    sample: PairedSample,
    mode: str = "permute",
    rng: np.random.Generator | None = None,
    sigma: np.ndarray | None = None,
) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """Estimate (joint law, product of marginals) from one paired sample.

    Modes:
      - ``split``: thirds of the sample; the joint estimate uses the first
        third, the product pairs x from the second third with y from the
        last. Leftover rows when n is not divisible by 3 are dropped.
      - ``permute``: joint on all rows; product pairs x_i with y_{sigma(i)}
        for a random fixed-point-free permutation (or a caller-supplied one).
      - ``full``: joint on all rows; product is the full n^2 atom grid.
    """
    n = sample.n
    if mode == "split":
        k = n // 3
        if k < 1:
            raise DataError("split mode needs at least 3 rows")
        joint = np.hstack([sample.xs[:k], sample.ys[:k]])
        prod = np.hstack([sample.xs[k : 2 * k], sample.ys[2 * k : 3 * k]])
        return to_measure(joint), to_measure(prod)
    if mode == "permute":
        if n < 2:
            raise DataError("permute mode needs at least 2 rows")
        if sigma is None:
            if rng is None:
                rng = np.random.default_rng(sample.seed)
            sigma = _derangement(n, rng)
        else:
            sigma = np.asarray(sigma)
            if sorted(sigma.tolist()) != list(range(n)):
                raise DataError("sigma is not a permutation of the row indices")
            if np.array_equal(sigma, np.arange(n)):
                warnings.warn(
                    "identity permutation makes the product estimate coincide "
                    "with the joint estimate",
                    stacklevel=2,
                )
        joint = sample.joint_rows()
        prod = np.hstack([sample.xs, sample.ys[sigma]])
        return to_measure(joint), to_measure(prod)
    if mode == "full":
        from .measures import product_measure

        joint = to_measure(sample.joint_rows())
        prod = product_measure(to_measure(sample.xs), to_measure(sample.ys))
        return joint, prod
    raise ValueError(f"unknown estimator mode {mode!r}")


# ---------------------------------------------------------------------------
# Rank and copula transforms
# ---------------------------------------------------------------------------


def _rank_order(col: np.ndarray) -> np.ndarray:
    """0-based ranks with ties broken by original row index."""
    order = np.argsort(col, kind="stable")
    ranks = np.empty(len(col), dtype=np.int64)
    ranks[order] = np.arange(len(col))
    return ranks


def rank_grid_values(ranks: np.ndarray, n: int) -> np.ndarray:
    """Map integer ranks to the uniform grid (rank + 0.5) / n.

    Kept as the single site performing this arithmetic so every consumer
    (copula transform, antithetic constructions) gets bitwise-equal grids.
    """
    return (ranks + 0.5) / n


def copula_transform(sample: PairedSample) -> PairedSample:
    """Normalized-rank transform of a 1D pair: each margin becomes the grid
    (rank + 0.5)/n, joint ordering preserved, ties broken by row index."""
    if sample.dx != 1 or sample.dy != 1:
        raise DataError("copula transform needs one-dimensional margins")
    n = sample.n
    u = rank_grid_values(_rank_order(sample.xs[:, 0]), n)
    v = rank_grid_values(_rank_order(sample.ys[:, 0]), n)
    return PairedSample(u[:, None], v[:, None], seed=sample.seed)


def multivariate_ranks(points, grid) -> np.ndarray:
    """Optimal-assignment ranks: index of the grid point coupled to each row.

    The coupling is exact transport with uniform weights and
    squared-Euclidean cost; in one dimension with a sorted grid it reduces to
    the ordinary rank order.
    """
    pts = _as_matrix(points, "points")
    g = _as_matrix(grid, "grid")
    if pts.shape != g.shape:
        raise DataError("points and grid must have identical shapes")
    rows, cols = linear_sum_assignment(cdist(pts, g, "sqeuclidean"))
    assignment = np.empty(pts.shape[0], dtype=np.int64)
    assignment[rows] = cols
    return assignment


# ---------------------------------------------------------------------------
# Conditional-law partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionalFamily:
    """A partition of the rows with one empirical y-law per group."""

    representatives: np.ndarray
    laws: tuple[DiscreteMeasure, ...]
    groups: tuple[np.ndarray, ...]
    group_weights: np.ndarray
    n_rows: int = field(default=0)

    def __post_init__(self):
        if len(self.laws) == 0:
            raise DataError("a conditional family needs at least one group")
        seen = np.concatenate([np.asarray(g) for g in self.groups])
        if len(np.unique(seen)) != len(seen):
            raise DataError("groups overlap")

    @property
    def k(self) -> int:
        return len(self.laws)

    def merged(self) -> DiscreteMeasure:
        """Rebuild the joint law: each group's representative paired with its
        y-atoms, weighted by group mass times conditional mass."""
        points = []
        weights = []
        for rep, law, w in zip(self.representatives, self.laws, self.group_weights):
            points.append(np.hstack([np.broadcast_to(rep, (law.n, len(rep))), law.points]))
            weights.append(w * law.weights)
        return DiscreteMeasure(np.vstack(points), np.concatenate(weights))

    def pooled_marginal(self) -> DiscreteMeasure:
        """Mixture of the group laws with the group weights: the y-marginal."""
        points = np.vstack([law.points for law in self.laws])
        weights = np.concatenate(
            [w * law.weights for law, w in zip(self.laws, self.group_weights)]
        )
        return DiscreteMeasure(points, weights)


def default_bin_count(n: int, x_dim: int) -> int:
    """Per-axis cube count: n^(1/3) for scalar x, n^(1/2) otherwise."""
    phi = round(n ** (1.0 / 3.0)) if x_dim == 1 else round(n ** 0.5)
    return max(int(phi), 1)


def _snap_to_centers(values: np.ndarray, phi: int) -> np.ndarray:
    """Map each coordinate to the center of its cube in a phi^d grid over the
    (slightly inflated) empirical bounding box."""
    lo = values.min(axis=0) - 1e-9
    hi = values.max(axis=0) + 1e-9
    width = (hi - lo) / phi
    idx = np.clip(np.floor((values - lo) / width).astype(np.int64), 0, phi - 1)
    return lo + (idx + 0.5) * width


def partition(
    sample: PairedSample,
    mode: str = "exact",
    phi: int | None = None,
    snap_y: bool = False,
) -> ConditionalFamily:
    """Group the rows into a conditional family.

    ``exact`` groups equal x rows; ``bins`` snaps each x to the center of its
    cube in a ``phi``-per-axis grid over the data's bounding box and groups
    by cube. ``snap_y`` additionally coarsens the y-values onto their own
    cube centers (the variant used in the rate analysis; off by default
    because the plain plug-in is the natural estimator).
    """
    n = sample.n
    if mode == "exact":
        keys = sample.xs
    elif mode == "bins":
        if phi is None:
            phi = default_bin_count(n, sample.dx)
        if phi < 1:
            raise DataError("bin count must be at least 1")
        keys = _snap_to_centers(sample.xs, phi)
    else:
        raise ValueError(f"unknown partition mode {mode!r}")

    ys = sample.ys
    if snap_y:
        if mode != "bins":
            raise DataError("snap_y only applies to bins mode")
        ys = _snap_to_centers(ys, phi)

    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    boundaries = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
    groups = []
    laws = []
    for g in range(len(uniq)):
        idx = order[boundaries[g] : boundaries[g + 1]]
        groups.append(idx)
        laws.append(to_measure(ys[idx]))
    weights = np.array([len(g) for g in groups], dtype=float) / n
    return ConditionalFamily(
        representatives=uniq,
        laws=tuple(laws),
        groups=tuple(groups),
        group_weights=weights,
        n_rows=n,
    )

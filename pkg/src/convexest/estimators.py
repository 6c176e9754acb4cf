"""Support estimators for uniform samples from a convex set.

Three estimators: the convex hull of the sample (maximum likelihood over
all convex sets), the minimum-area polygon with a vertex budget r
(maximum likelihood over r-vertex polygons), and an adaptive estimator
that selects the budget from the data by comparing the fitted polygons
across budgets against a threshold of C * r' * ln(n) / n.

The adaptive estimator follows the unit-square model: its candidate
polygons are constrained to [0, 1]^2, which is what makes the risk of
the selected polygon comparable to the hull's. On data whose hull does
not fit the unit square no constrained candidate exists and the
estimator falls back to the hull. The standalone min_kgon solver is
unconstrained.

Scikit-learn style wrappers (fit / predict membership / get_params) are
provided at the bottom so the estimators compose with pipelines and
model-selection utilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateInput, InvalidParameters
from .geometry import ConvexPolygon, contains, convex_hull, symm_diff_area
from .minkgon import solve_min_kgon_range

UNIT_BOX = (0.0, 0.0, 1.0, 1.0)

STATUS_EXACT_HULL = "exact_hull"
STATUS_DP_OPTIMAL = "dp_optimal"
STATUS_REFINED = "refined_heuristic"


@dataclass
class EstimateResult:
    """A fitted support polygon plus solver metadata."""

    polygon: ConvexPolygon
    r_requested: int | None
    r_used: int
    area: float
    status: str

    def to_json(self) -> dict:
        return {
            "polygon": self.polygon.vertices.tolist(),
            "r_requested": self.r_requested,
            "r_used": self.r_used,
            "area": self.area,
            "status": self.status,
        }


@dataclass
class AdaptiveConfig:
    """Threshold constant and scan cap for the adaptive rule.

    The risk guarantee needs C > 16 d + 16 / (d + 1); in the plane that
    is 112/3 = 37.33..., and the default C = 40 satisfies it. Smaller
    constants are useful in simulations but void the guarantee, so they
    must be enabled explicitly.
    """

    C: float = 40.0
    r_max: int | None = None  # None: scan up to the hull vertex count
    allow_nontheoretical: bool = False

    def __post_init__(self):
        if self.C <= 0:
            raise InvalidParameters("C must be positive")
        if not self.allow_nontheoretical and self.C <= theory_threshold():
            raise InvalidParameters(
                f"C = {self.C} is below the guarantee threshold 16d + 16/(d+1) "
                f"= {theory_threshold():.4f} for d = 2; pass "
                "allow_nontheoretical=True to use it anyway"
            )
        if self.r_max is not None and self.r_max < 3:
            raise InvalidParameters("r_max must be at least 3")


def theory_threshold(d: int = 2) -> float:
    return 16.0 * d + 16.0 / (d + 1)


@dataclass
class AdaptiveResult:
    """Outcome of the adaptive vertex-budget selection."""

    r_hat: int
    R_n: int
    chose_hull: bool
    polygon: ConvexPolygon
    per_r_diffs: list = field(default_factory=list)  # (r, r_prime, symm diff)

    def to_json(self) -> dict:
        return {
            "r_hat": self.r_hat,
            "R_n": self.R_n,
            "chose_hull": self.chose_hull,
            "polygon": self.polygon.vertices.tolist(),
            "per_r_diffs": [list(row) for row in self.per_r_diffs],
        }


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidParameters("points must be an (n, 2) array")
    return pts


def hull_estimator(points) -> EstimateResult:
    """Convex hull of the sample."""
    hull = convex_hull(_as_points(points))
    return EstimateResult(
        polygon=hull,
        r_requested=None,
        r_used=hull.n_vertices,
        area=hull.area,
        status=STATUS_EXACT_HULL,
    )


def min_kgon(points, r: int) -> EstimateResult:
    """Minimum-area convex polygon with at most r vertices containing
    all points.

    When the hull already has at most r vertices it is returned as is
    (it is the minimum over all enclosing convex sets). Otherwise the
    flush-edge dynamic program runs, refined by the one-free-edge pass
    and local search; ties break deterministically in scan order.
    """
    if not isinstance(r, int) or r < 3:
        raise InvalidParameters("r must be an integer >= 3")
    pts = _as_points(points)
    hull = convex_hull(pts)
    if hull.n_vertices <= r:
        return EstimateResult(hull, r, hull.n_vertices, hull.area, STATUS_EXACT_HULL)
    sol = solve_min_kgon_range(hull, [r])[r]
    return EstimateResult(
        polygon=sol.polygon,
        r_requested=r,
        r_used=sol.polygon.n_vertices,
        area=sol.area,
        status=sol.status,
    )


def cube_root_floor(n: int) -> int:
    """floor(n^(1/3)) without float truncation artifacts (1000 -> 10)."""
    k = int(round(n ** (1.0 / 3.0)))
    while k ** 3 > n:
        k -= 1
    while (k + 1) ** 3 <= n:
        k += 1
    return k


def adaptive(points, cfg: AdaptiveConfig | None = None) -> AdaptiveResult:
    """Adaptive estimator with data-driven vertex budget.

    Candidates are box-constrained fits for r = 3, ..., V_n (budgets at
    least V_n coincide with the hull, so the scan stops there). The
    selected budget is the smallest r whose fit is within
    C * r' * ln(n) / n of every fit with a larger budget r'. The output
    is that fit when r_hat <= R_n = floor(n^(1/3)), and the hull
    otherwise. Infeasible budgets (no constrained candidate) are skipped;
    if none is feasible the estimator is the hull.
    """
    cfg = cfg or AdaptiveConfig()
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 4:
        raise DegenerateInput("adaptive estimation needs at least 4 points")
    hull = convex_hull(pts)
    v_n = hull.n_vertices
    R_n = cube_root_floor(n)
    r_cap = v_n if cfg.r_max is None else min(cfg.r_max, v_n)

    hull_in_box = bool(
        np.all(hull.vertices >= -1e-9) and np.all(hull.vertices <= 1.0 + 1e-9)
    )
    fits: dict[int, ConvexPolygon] = {}
    if hull_in_box:
        if r_cap > 3 and v_n > 3:
            inner = solve_min_kgon_range(hull, range(3, min(r_cap, v_n - 1) + 1), box=UNIT_BOX)
            for rr, sol in inner.items():
                if sol is not None:
                    fits[rr] = sol.polygon
        for rr in range(v_n, r_cap + 1):
            fits[rr] = hull
        if v_n <= r_cap and v_n not in fits:
            fits[v_n] = hull

    feasible = sorted(fits)
    threshold = cfg.C * math.log(n) / n
    diffs: list[tuple[int, int, float]] = []
    r_hat = None
    for r in feasible:
        ok = True
        for rp in feasible:
            if rp <= r:
                continue
            d = symm_diff_area(fits[r], fits[rp])
            diffs.append((r, rp, d))
            if d > threshold * rp:
                ok = False
                break
        if ok:
            r_hat = r
            break

    if r_hat is None:
        # No feasible constrained candidate (data outside the unit box).
        return AdaptiveResult(
            r_hat=v_n, R_n=R_n, chose_hull=True, polygon=hull, per_r_diffs=diffs
        )
    chose_hull = r_hat > R_n
    return AdaptiveResult(
        r_hat=r_hat,
        R_n=R_n,
        chose_hull=chose_hull,
        polygon=hull if chose_hull else fits[r_hat],
        per_r_diffs=diffs,
    )


def loo_outside_count(points, r: int) -> int:
    """Number of points falling outside the minimum r-gon fitted to the
    other n - 1 points (containment tolerance 1e-9)."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n < 5:
        raise DegenerateInput("leave-one-out count needs at least 5 points")
    count = 0
    for i in range(n):
        rest = np.delete(pts, i, axis=0)
        try:
            fit = min_kgon(rest, r)
        except DegenerateInput as exc:
            raise DegenerateInput(
                f"leave-one-out subproblem {i} is degenerate: {exc}"
            ) from exc
        if not contains(fit.polygon, pts[i], tol=1e-9):
            count += 1
    return count


class ConvexHullEstimator(BaseEstimator):
    """Convex hull support estimator with membership prediction."""

    def __init__(self, tol: float = 1e-9):
        self.tol = tol

    def fit(self, X, y=None):
        self.result_ = hull_estimator(X)
        self.polygon_ = self.result_.polygon
        self.area_ = self.result_.area
        self.n_vertices_ = self.result_.r_used
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([contains(self.polygon_, x, tol=self.tol) for x in X])

    def score(self, X, y=None):
        """Fraction of points predicted inside the fitted support."""
        return float(np.mean(self.predict(X)))


class MinAreaPolygonEstimator(BaseEstimator):
    """Minimum-area enclosing polygon with a fixed vertex budget."""

    def __init__(self, r: int = 4, tol: float = 1e-9):
        self.r = r
        self.tol = tol

    def fit(self, X, y=None):
        self.result_ = min_kgon(X, self.r)
        self.polygon_ = self.result_.polygon
        self.area_ = self.result_.area
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([contains(self.polygon_, x, tol=self.tol) for x in X])


class AdaptiveSupportEstimator(BaseEstimator):
    """Adaptive support estimator for data in the unit square."""

    def __init__(self, C: float = 40.0, r_max=None, allow_nontheoretical: bool = False,
                 tol: float = 1e-9):
        self.C = C
        self.r_max = r_max
        self.allow_nontheoretical = allow_nontheoretical
        self.tol = tol

    def fit(self, X, y=None):
        cfg = AdaptiveConfig(
            C=self.C, r_max=self.r_max, allow_nontheoretical=self.allow_nontheoretical
        )
        self.result_ = adaptive(X, cfg)
        self.polygon_ = self.result_.polygon
        self.r_hat_ = self.result_.r_hat
        self.chose_hull_ = self.result_.chose_hull
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([contains(self.polygon_, x, tol=self.tol) for x in X])

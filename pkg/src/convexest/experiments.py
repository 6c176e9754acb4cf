"""Monte Carlo machinery for the support estimators.

Risk curves and rate fits, the Efron identity check (expected missing
area of the hull equals |G| E[V_{n+1}] / (n+1)), exponential deviation
tails for the budgeted polygon estimator, hull vertex-count scaling,
Hellinger affinities of uniform densities, and the two-point /
hypercube-family constructions used for minimax lower bounds.

Every experiment is a deterministic function of its config and seed:
replicate k draws from generator path (k, purpose), and aggregation
runs in replicate order regardless of the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CheckFailed,
    InsufficientData,
    InvalidParameters,
    UnsupportedCombination,
    UnsupportedDimension,
)
from .estimators import AdaptiveConfig, adaptive, hull_estimator, min_kgon
from .geometry import (
    ConvexPolygon,
    convex_hull,
    intersection_area,
    polygon_disk_intersection_area,
    symm_diff_area,
)
from .sampling import (
    BallSupport,
    CubeSupport,
    DiskSupport,
    PolygonSupport,
    Seed,
    Support,
)

MC_PROBE_POINTS = 100_000  # membership probes for volumes in dimension >= 3

# Generator sub-stream purposes, so replicate draws never collide.
_DRAW_SAMPLE = 0
_DRAW_PROBE = 1
_DRAW_INDEPENDENT = 2


@dataclass
class RiskPoint:
    n: int
    estimator: str
    q: float
    normalized: bool
    mean_risk: float
    std_err: float
    reps: int
    seed: Seed

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.estimator},{self.q!r},{str(self.normalized).lower()},"
            f"{self.mean_risk!r},{self.std_err!r},{self.reps},"
            f"{self.seed.root},{self.seed.stream}"
        )


RISK_CSV_HEADER = "n,estimator,q,normalized,mean_risk,std_err,reps,seed_root,seed_stream"


@dataclass
class RiskCurve:
    rows: list

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda p: p.n)

    def to_csv(self) -> str:
        return "\n".join([RISK_CSV_HEADER] + [p.csv_row() for p in self.rows]) + "\n"

    @property
    def ns(self):
        return [p.n for p in self.rows]

    @property
    def means(self):
        return [p.mean_risk for p in self.rows]


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    log_correction: bool

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "log_correction": self.log_correction,
        }


def _estimator_label(estimator: str, r=None, config: AdaptiveConfig | None = None) -> str:
    if estimator == "hull":
        return "hull"
    if estimator == "kgon":
        return f"kgon({r})"
    if estimator == "adaptive":
        C = (config or AdaptiveConfig()).C
        return f"adaptive(C={C:g})"
    raise InvalidParameters(f"unknown estimator {estimator!r}")


def _fit_polygon(estimator: str, pts, r, config) -> ConvexPolygon:
    if estimator == "hull":
        return hull_estimator(pts).polygon
    if estimator == "kgon":
        return min_kgon(pts, r).polygon
    return adaptive(pts, config).polygon


def _symm_diff_vs_support(poly: ConvexPolygon, spec: Support) -> float:
    if isinstance(spec, PolygonSupport):
        return symm_diff_area(poly, spec.polygon)
    if isinstance(spec, DiskSupport):
        inter = polygon_disk_intersection_area(poly, spec.center, spec.radius)
        return max(poly.area + spec.area() - 2.0 * inter, 0.0)
    raise UnsupportedCombination(f"no exact symmetric difference for {spec.kind}")


def _hull_missing_volume_mc(spec: Support, pts: np.ndarray, rng) -> float:
    """One-sided Monte Carlo volume of spec minus the hull of pts.

    The hull of a sample from a convex support is a subset of it, so
    |G symm-diff hull| = |G| P(probe outside hull), estimated with
    uniform probes on the support.
    """
    from scipy.spatial import ConvexHull as QHull

    hull = QHull(pts)
    probes = spec.sample(MC_PROBE_POINTS, rng)
    eq = hull.equations
    inside = np.all(probes @ eq[:, :-1].T + eq[:, -1] <= 1e-12, axis=1)
    return spec.area() * float(1.0 - inside.mean())


def risk_mc(
    spec: Support,
    estimator: str,
    n: int,
    reps: int,
    q: float = 1.0,
    normalized: bool = False,
    seed: Seed = Seed(),
    r: int | None = None,
    config: AdaptiveConfig | None = None,
    threads: int = 1,
) -> RiskPoint:
    """Monte Carlo risk of an estimator at sample size n.

    Per replicate the risk is |G symm-diff fit|^q, divided by |G|^q when
    normalized. Exact symmetric differences in the plane; probe-based
    volumes for hull estimation in dimension 3 and above.
    """
    if not isinstance(n, int) or n < 3:
        raise InvalidParameters("n must be an integer >= 3")
    if reps < 2:
        raise InvalidParameters("reps must be at least 2")
    if q < 1:
        raise InvalidParameters("moment order q must be >= 1")
    if estimator == "kgon" and (r is None or r < 3):
        raise InvalidParameters("kgon estimator needs r >= 3")
    dim = spec.dimension
    if dim != 2 and estimator != "hull":
        raise UnsupportedDimension(
            f"{estimator} estimation is planar only, support is {dim}-dimensional"
        )
    g_area = spec.area()

    def one_rep(k: int) -> float:
        pts = spec.sample(n, seed.generator(k, _DRAW_SAMPLE))
        if dim == 2:
            if estimator == "hull":
                value = g_area - convex_hull(pts).area
            else:
                value = _symm_diff_vs_support(_fit_polygon(estimator, pts, r, config), spec)
        else:
            value = _hull_missing_volume_mc(spec, pts, seed.generator(k, _DRAW_PROBE))
        if normalized:
            value /= g_area
        return value ** q

    values = np.empty(reps)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for k, v in zip(range(reps), pool.map(one_rep, range(reps))):
                values[k] = v
    else:
        for k in range(reps):
            values[k] = one_rep(k)
    return RiskPoint(
        n=n,
        estimator=_estimator_label(estimator, r, config),
        q=q,
        normalized=normalized,
        mean_risk=float(values.mean()),
        std_err=float(values.std(ddof=1) / math.sqrt(reps)),
        reps=reps,
        seed=seed,
    )


def risk_curve(
    spec, estimator, n_grid, reps, q=1.0, normalized=False, seed=Seed(), r=None,
    config=None, threads: int = 1,
) -> RiskCurve:
    rows = [
        risk_mc(
            spec, estimator, int(n), reps, q=q, normalized=normalized,
            seed=seed.child(i), r=r, config=config, threads=threads,
        )
        for i, n in enumerate(n_grid)
    ]
    return RiskCurve(rows)


def rate_fit(curve: RiskCurve, log_correction: bool = False) -> RateFit:
    """Least-squares slope of log mean risk against log n.

    With log_correction the fit target is log(mean) - log(log n), which
    removes the logarithmic factor of an r log(n)/n rate so the power
    exponent can be read off the slope.
    """
    ns = np.asarray(curve.ns, dtype=float)
    means = np.asarray(curve.means, dtype=float)
    if len(np.unique(ns)) < 3:
        raise InsufficientData("rate fit needs at least 3 distinct sample sizes")
    if np.any(means <= 0):
        raise InsufficientData("rate fit needs positive mean risks")
    x = np.log(ns)
    y = np.log(means)
    if log_correction:
        y = y - np.log(np.log(ns))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2, log_correction)


def efron_check(spec: Support, n: int, reps: int, seed: Seed = Seed()) -> dict:
    """Both sides of the identity E[missing area] = |G| E[V_{n+1}] / (n+1).

    The left side averages |G| minus the hull area of n-point samples;
    the right side counts hull vertices of independent (n+1)-point
    samples. Both are Monte Carlo, so rel_err shrinks with reps.
    """
    if spec.dimension != 2:
        raise UnsupportedDimension("the identity check is implemented in the plane")
    if n < 3:
        raise InvalidParameters("n must be at least 3")
    g_area = spec.area()
    missing = np.empty(reps)
    vertices = np.empty(reps)
    for k in range(reps):
        pts = spec.sample(n, seed.generator(k, _DRAW_SAMPLE))
        missing[k] = g_area - convex_hull(pts).area
        pts2 = spec.sample(n + 1, seed.generator(k, _DRAW_INDEPENDENT))
        vertices[k] = convex_hull(pts2).n_vertices
    lhs = float(missing.mean())
    rhs = g_area * float(vertices.mean()) / (n + 1)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "rel_err": abs(lhs - rhs) / rhs,
        "lhs_se": float(missing.std(ddof=1) / math.sqrt(reps)),
        "rhs_se": g_area * float(vertices.std(ddof=1) / math.sqrt(reps)) / (n + 1),
        "n": n,
        "reps": reps,
    }


def _disk_like(spec):
    if isinstance(spec, DiskSupport):
        return spec.center, spec.radius
    if isinstance(spec, BallSupport) and spec.dimension == 2:
        return spec.center, spec.radius
    return None


def hellinger_affinity(spec1: Support, spec2: Support) -> float:
    """Affinity 1 - H^2/2 of two uniform densities:
    |G1 and G2| / sqrt(|G1| |G2|).

    Exact for planar polygon and disk pairs, and for concentric balls in
    any dimension (covering the nested-ball two-point argument, where a
    volume ratio of 2 gives 1/sqrt(2)).
    """
    a1, a2 = spec1.area(), spec2.area()

    def finish(inter):
        return max(min(inter / math.sqrt(a1 * a2), 1.0), 0.0)

    if isinstance(spec1, PolygonSupport) and isinstance(spec2, PolygonSupport):
        return finish(intersection_area(spec1.polygon, spec2.polygon))
    d1, d2 = _disk_like(spec1), _disk_like(spec2)
    if isinstance(spec1, PolygonSupport) and d2 is not None:
        return finish(polygon_disk_intersection_area(spec1.polygon, d2[0], d2[1]))
    if isinstance(spec2, PolygonSupport) and d1 is not None:
        return finish(polygon_disk_intersection_area(spec2.polygon, d1[0], d1[1]))
    if d1 is not None and d2 is not None:
        return finish(_disk_disk_area(d1, d2))
    if isinstance(spec1, BallSupport) and isinstance(spec2, BallSupport):
        if spec1.dimension == spec2.dimension and np.allclose(
            spec1.center, spec2.center
        ):
            return finish(min(a1, a2))
        raise UnsupportedCombination(
            "balls in dimension >= 3 must be concentric for the exact affinity"
        )
    raise UnsupportedCombination(
        f"no exact affinity for kinds {spec1.kind!r} and {spec2.kind!r}"
    )


def _disk_disk_area(d1, d2) -> float:
    (c1, r1), (c2, r2) = d1, d2
    dist = float(np.hypot(*(np.asarray(c1, float) - np.asarray(c2, float))))
    if dist >= r1 + r2:
        return 0.0
    if dist <= abs(r1 - r2):
        rmin = min(r1, r2)
        return math.pi * rmin * rmin
    alpha = math.acos((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1))
    beta = math.acos((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2))
    return (
        r1 * r1 * (alpha - math.sin(2 * alpha) / 2)
        + r2 * r2 * (beta - math.sin(2 * beta) / 2)
    )


@dataclass
class HypothesisFamily:
    """Perturbation family for the minimax lower bound in the plane.

    A regular (r/2)-gon with circumradius 1/2 centered at (1/2, 1/2),
    plus one candidate apex per edge on the edge's perpendicular
    bisector at Euclidean distance delta from the polygon, where
    delta = (h/2) cos(2 pi / r) tan(4 pi / r). A binary word omega picks
    which apexes join the convex hull, giving 2^(r/2) hypotheses that
    pairwise differ by one apex triangle.
    """

    r: int
    h: float
    delta: float
    base: ConvexPolygon
    apexes: np.ndarray  # (r/2, 2), apex for edge k

    def member(self, omega) -> ConvexPolygon:
        omega = tuple(int(b) for b in omega)
        if len(omega) != self.r // 2 or any(b not in (0, 1) for b in omega):
            raise InvalidParameters("omega must be a binary word of length r/2")
        chosen = [self.apexes[k] for k, b in enumerate(omega) if b]
        if not chosen:
            return self.base
        return convex_hull(np.vstack([self.base.vertices, np.array(chosen)]))

    @property
    def n_members(self) -> int:
        return 2 ** (self.r // 2)

    def members(self) -> dict:
        """Materialize the full map omega -> polygon (small r only)."""
        half = self.r // 2
        if half > 16:
            raise InvalidParameters(
                f"2^{half} members is too many to materialize; use member()"
            )
        out = {}
        for code in range(2**half):
            omega = tuple((code >> k) & 1 for k in range(half))
            out[omega] = self.member(omega)
        return out

    def to_json(self, max_members: int = 4096) -> dict:
        obj = {
            "r": self.r,
            "h": self.h,
            "delta": self.delta,
            "base": self.base.vertices.tolist(),
            "apexes": self.apexes.tolist(),
            "n_members": self.n_members,
        }
        if self.n_members <= max_members:
            obj["members"] = [
                {"omega": list(omega), "vertices": poly.vertices.tolist()}
                for omega, poly in sorted(self.members().items())
            ]
        else:
            obj["members"] = None  # reconstruct via base + apexes + omega
        return obj


def build_family(r: int, h: float) -> HypothesisFamily:
    """Construct the lower-bound hypothesis family for even r >= 10.

    Each apex sits on an edge mediator at perpendicular distance delta
    from the base polygon. The base polygon's rotation is chosen
    deterministically to maximize the margin of all apexes to the unit
    square boundary (the vertices of the base already touch the
    inscribed circle, so orientation is the only freedom left).
    """
    if not isinstance(r, int) or r < 10 or r % 2 != 0:
        raise InvalidParameters("r must be an even integer >= 10")
    if not (0.0 < h <= 1.0):
        raise InvalidParameters("h must lie in (0, 1]")
    m = r // 2
    delta = (h / 2.0) * math.cos(2.0 * math.pi / r) * math.tan(4.0 * math.pi / r)
    apothem = 0.5 * math.cos(2.0 * math.pi / r)
    apex_dist = apothem + delta
    step = 4.0 * math.pi / r

    # Orientation sweep: maximize min over apexes of the sup-norm margin.
    k = np.arange(m)
    best_theta, best_margin = 0.0, -math.inf
    for theta in np.linspace(0.0, step, 512, endpoint=False):
        mids = theta + step * k + step / 2.0
        coord = apex_dist * np.maximum(np.abs(np.cos(mids)), np.abs(np.sin(mids)))
        margin = 0.5 - float(coord.max())
        if margin > best_margin:
            best_margin, best_theta = margin, float(theta)

    angles = best_theta + step * k
    base = ConvexPolygon(
        0.5 + 0.5 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    )
    # The base constructor rotates labels; build apexes from its edges so
    # apex k always faces edge k of the stored polygon.
    bv = base.vertices
    edge_mids = (bv + np.roll(bv, -1, axis=0)) / 2.0
    centered = edge_mids - 0.5
    norms = np.hypot(centered[:, 0], centered[:, 1])
    apexes = 0.5 + centered * (apex_dist / norms)[:, None]
    return HypothesisFamily(r=r, h=h, delta=delta, base=base, apexes=apexes)


def _family_contexts(half: int, k: int, limit: int = 8):
    """Deterministic context words for checking that toggling apex k adds
    the same region regardless of the other apexes."""
    contexts = [tuple(0 for _ in range(half)), tuple(1 for _ in range(half))]
    rng = np.random.default_rng(1234 + k)
    while len(contexts) < limit:
        w = tuple(int(b) for b in rng.integers(0, 2, half))
        if w not in contexts:
            contexts.append(w)
    return contexts


def family_checks(
    family: HypothesisFamily, n: int | None = None, raise_on_failure: bool = True
) -> dict:
    """Verify the family identities and report per-check outcomes.

    Checks: the delta formula, the claimed pairwise symmetric difference
    (delta/2) cos(2 pi / r) between members differing in one apex, the
    affinity floor sqrt(1 - delta cos(2 pi / r) / 4), the base area
    floor 1/2, containment of every member in the unit square, and the
    vertex budget r. When n is given, the two-point lower bound value
    (r delta cos(2 pi / r) / 8) (1 - delta cos(2 pi / r) / 4)^n is
    reported as well.
    """
    r, h = family.r, family.h
    half = r // 2
    dc = family.delta * math.cos(2.0 * math.pi / r)
    target_pairwise = dc / 2.0
    affinity_floor = math.sqrt(max(1.0 - dc / 4.0, 0.0))

    checks: dict = {}
    delta_expected = (h / 2.0) * math.cos(2.0 * math.pi / r) * math.tan(4.0 * math.pi / r)
    checks["delta_formula"] = {
        "passed": family.delta == delta_expected,
        "value": family.delta,
        "expected": delta_expected,
    }

    worst_pair = 0.0
    worst_aff = math.inf
    exhaustive = half <= 8
    for k in range(half):
        if exhaustive:
            contexts = []
            for code in range(2 ** (half - 1)):
                bits = [(code >> i) & 1 for i in range(half - 1)]
                bits.insert(k, 0)
                contexts.append(tuple(bits))
        else:
            contexts = [w for w in _family_contexts(half, k) if w[k] == 0]
        for w0 in contexts:
            w1 = tuple(1 if i == k else b for i, b in enumerate(w0))
            p0, p1 = family.member(w0), family.member(w1)
            d = symm_diff_area(p0, p1)
            worst_pair = max(worst_pair, abs(d - target_pairwise))
            aff = intersection_area(p0, p1) / math.sqrt(p0.area * p1.area)
            worst_aff = min(worst_aff, aff)
    checks["pairwise_distance"] = {
        "passed": bool(worst_pair <= 1e-9),
        "worst_abs_err": float(worst_pair),
        "target": float(target_pairwise),
    }
    checks["affinity_floor"] = {
        "passed": bool(worst_aff >= affinity_floor - 1e-9),
        "worst": float(worst_aff),
        "floor": float(affinity_floor),
    }
    checks["base_area"] = {
        "passed": bool(family.base.area >= 0.5),
        "value": float(family.base.area),
    }

    # Every member vertex is a base vertex or an apex, so containment of
    # those points is containment of every member.
    candidates = np.vstack([family.base.vertices, family.apexes])
    inside = bool(np.all(candidates >= -1e-12) and np.all(candidates <= 1.0 + 1e-12))
    checks["containment"] = {
        "passed": inside,
        "max_coord": float(candidates.max()),
        "min_coord": float(candidates.min()),
    }

    ones = family.member(tuple(1 for _ in range(half)))
    checks["vertex_budget"] = {
        "passed": bool(ones.n_vertices <= r),
        "max_vertices": int(ones.n_vertices),
    }

    report = {"checks": checks, "r": r, "h": h, "delta": family.delta}
    if n is not None:
        report["lower_bound_value"] = (r * dc / 8.0) * (1.0 - dc / 4.0) ** n
    report["violations"] = [name for name, c in checks.items() if not c["passed"]]
    if raise_on_failure and report["violations"]:
        first = report["violations"][0]
        raise CheckFailed(f"family check {first!r} failed: {checks[first]}")
    return report


def vertex_count_curve(spec: Support, n_grid, reps: int, seed: Seed = Seed()) -> list:
    """Rows (n, mean hull vertex count, standard error, reps)."""
    if spec.dimension == 2:
        def count(pts):
            return convex_hull(pts).n_vertices
    elif spec.dimension == 3 and isinstance(spec, (BallSupport, CubeSupport)):
        from scipy.spatial import ConvexHull as QHull

        def count(pts):
            return len(QHull(pts).vertices)
    else:
        raise UnsupportedDimension("vertex counting covers the plane and 3-d balls/cubes")
    rows = []
    for i, n in enumerate(n_grid):
        n = int(n)
        vals = np.empty(reps)
        child = seed.child(i)
        for k in range(reps):
            vals[k] = count(spec.sample(n, child.generator(k, _DRAW_SAMPLE)))
        rows.append((n, float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps)), reps))
    return rows


def vertex_count_scaling(spec: Support, n_grid, reps: int, seed: Seed = Seed()) -> RateFit:
    """Power-law fit of the expected hull vertex count against n."""
    rows = vertex_count_curve(spec, n_grid, reps, seed)
    ns = np.array([row[0] for row in rows], dtype=float)
    means = np.array([row[1] for row in rows])
    if len(np.unique(ns)) < 3:
        raise InsufficientData("vertex scaling needs at least 3 sample sizes")
    slope, intercept = np.polyfit(np.log(ns), np.log(means), 1)
    y = np.log(means)
    resid = y - (slope * np.log(ns) + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2, log_correction=False)


DEVIATION_CSV_HEADER = "x,empirical_tail,bound"


def deviation_tail(
    spec: PolygonSupport, n: int, reps: int, x_grid, seed: Seed = Seed()
) -> list:
    """Empirical exceedance of the centered, scaled estimation error.

    For a polygon support with r vertices the statistic per replicate is
    n (|fit symm-diff support| - 4 d r ln(n) / n) with d = 2 and the fit
    the budget-r polygon estimator. Rows are (x, empirical tail
    frequency, e^(-x/2)).
    """
    if not isinstance(spec, PolygonSupport):
        raise InvalidParameters("deviation_tail needs a polygon support")
    x_grid = [float(x) for x in x_grid]
    if any(x <= 0 for x in x_grid):
        raise InvalidParameters("tail thresholds x must be positive")
    if reps < 1000:
        raise InvalidParameters("at least 1000 replicates are needed for tail estimates")
    r = spec.polygon.n_vertices
    center = 4.0 * 2 * r * math.log(n) / n
    stats = np.empty(reps)
    for k in range(reps):
        pts = spec.sample(n, seed.generator(k, _DRAW_SAMPLE))
        fit = min_kgon(pts, r)
        stats[k] = n * (symm_diff_area(fit.polygon, spec.polygon) - center)
    return [
        (x, float(np.mean(stats >= x)), math.exp(-x / 2.0)) for x in sorted(x_grid)
    ]

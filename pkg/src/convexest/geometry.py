"""Robust planar convex geometry.

Polygons are counterclockwise, strictly convex vertex lists. Orientation
tests go through an exact predicate (float fast path, rational fallback),
so hulls and snapping behave correctly on degenerate input; all area
arithmetic stays in 64-bit floats.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DegenerateInput, InvalidParameters

# Shewchuk-style filter bound for the 2x2 orientation determinant.
_EPS = 2.0 ** -53
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS

DEFAULT_TOL = 1e-9


def orient(a, b, c) -> int:
    """Sign of the turn a->b->c: +1 left, -1 right, 0 collinear (exact)."""
    detleft = (b[0] - a[0]) * (c[1] - a[1])
    detright = (b[1] - a[1]) * (c[0] - a[0])
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if abs(det) > _CCW_ERRBOUND * detsum:
        return 1 if det > 0.0 else -1
    # Filter failed: redo in exact rational arithmetic.
    ax, ay = Fraction(a[0]), Fraction(a[1])
    det_exact = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (
        Fraction(b[1]) - ay
    ) * (Fraction(c[0]) - ax)
    if det_exact > 0:
        return 1
    if det_exact < 0:
        return -1
    return 0


def _shoelace(vertices) -> float:
    """Signed area of a closed vertex loop (positive for counterclockwise)."""
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


class ConvexPolygon:
    """A strictly convex polygon with counterclockwise vertices.

    Vertices are stored as an immutable (m, 2) float array, rotated so
    the lexicographically smallest vertex comes first; two polygons built
    from the same vertex cycle therefore compare equal.
    """

    __slots__ = ("_v", "_area")

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidParameters("vertices must be an (m, 2) array")
        if not np.all(np.isfinite(v)):
            raise InvalidParameters("vertices must be finite")
        m = v.shape[0]
        if m < 3:
            raise DegenerateInput(f"a polygon needs at least 3 vertices, got {m}")
        start = int(np.lexsort((v[:, 1], v[:, 0]))[0])
        v = np.roll(v, -start, axis=0)
        for i in range(m):
            a, b, c = v[i - 1], v[i], v[(i + 1) % m]
            if orient(a, b, c) <= 0:
                raise DegenerateInput(
                    "vertices must make strict left turns (counterclockwise, "
                    f"no duplicates or collinear triples); failed at index {i}"
                )
        v.setflags(write=False)
        self._v = v
        self._area = _shoelace(v)
        if self._area <= 0.0:
            raise DegenerateInput("polygon area must be positive")

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def n_vertices(self) -> int:
        return self._v.shape[0]

    @property
    def area(self) -> float:
        return self._area

    @property
    def perimeter(self) -> float:
        d = np.diff(np.vstack([self._v, self._v[:1]]), axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def contains(self, point, tol: float = DEFAULT_TOL) -> bool:
        return contains(self, point, tol)

    def scaled(self, factor: float) -> "ConvexPolygon":
        return ConvexPolygon(self._v * factor)

    def __eq__(self, other):
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self._v.shape == other._v.shape and bool(np.all(self._v == other._v))

    def __hash__(self):
        return hash(self._v.tobytes())

    def __repr__(self):
        return f"ConvexPolygon({self.n_vertices} vertices, area={self._area:.6g})"


def convex_hull(points) -> ConvexPolygon:
    """Strictly convex hull of a point set (monotone chain, exact turns).

    Collinear boundary points are not vertices of the result. Raises
    DegenerateInput for fewer than 3 distinct points or an all-collinear
    set.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidParameters("points must be an (n, 2) array")
    if not np.all(np.isfinite(pts)):
        raise InvalidParameters("points must be finite")
    if pts.shape[0] < 3:
        raise DegenerateInput("need at least 3 points")
    pts = np.unique(pts, axis=0)  # dedupe; sorts lexicographically
    n = pts.shape[0]
    if n < 3:
        raise DegenerateInput("need at least 3 distinct points")
    rows = pts.tolist()

    lower: list = []
    for p in rows:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(rows):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("points are collinear")
    return ConvexPolygon(hull)


def area(polygon: ConvexPolygon) -> float:
    """Lebesgue measure of the polygon (shoelace)."""
    return polygon.area


def contains(polygon: ConvexPolygon, point, tol: float = DEFAULT_TOL) -> bool:
    """True iff the point is within distance tol of the polygon.

    The test is a signed perpendicular distance against every directed
    edge, so tol is an absolute tolerance in coordinate units.
    """
    if tol < 0:
        raise InvalidParameters("tol must be nonnegative")
    px, py = float(point[0]), float(point[1])
    v = polygon.vertices
    m = v.shape[0]
    for i in range(m):
        x0, y0 = v[i]
        x1, y1 = v[(i + 1) % m]
        ex, ey = x1 - x0, y1 - y0
        cross = ex * (py - y0) - ey * (px - x0)
        if cross < 0.0 and cross * cross > tol * tol * (ex * ex + ey * ey):
            return False
    return True


def _clip_loop(subject: list, clip_vertices: np.ndarray) -> list:
    """Sutherland-Hodgman clip of a vertex loop by a convex polygon."""
    output = subject
    m = clip_vertices.shape[0]
    for i in range(m):
        if not output:
            return []
        ax, ay = clip_vertices[i]
        bx, by = clip_vertices[(i + 1) % m]
        ex, ey = bx - ax, by - ay
        inp = output
        output = []
        sx, sy = inp[-1]
        s_in = ex * (sy - ay) - ey * (sx - ax) >= 0.0
        for px, py in inp:
            p_in = ex * (py - ay) - ey * (px - ax) >= 0.0
            if p_in != s_in:
                d1 = ex * (sy - ay) - ey * (sx - ax)
                d2 = ex * (py - ay) - ey * (px - ax)
                t = d1 / (d1 - d2)
                output.append((sx + t * (px - sx), sy + t * (py - sy)))
            if p_in:
                output.append((px, py))
            sx, sy, s_in = px, py, p_in
    return output


def intersection_area(p: ConvexPolygon, q: ConvexPolygon) -> float:
    """Area of the convex intersection region (0.0 when disjoint)."""
    loop = _clip_loop([tuple(v) for v in p.vertices], q.vertices)
    if len(loop) < 3:
        return 0.0
    return max(_shoelace(loop), 0.0)


def intersect(p: ConvexPolygon, q: ConvexPolygon):
    """Convex intersection of two polygons, or None when the interiors
    are disjoint (including touching along a point or segment)."""
    loop = _clip_loop([tuple(v) for v in p.vertices], q.vertices)
    if len(loop) < 3 or _shoelace(loop) <= 0.0:
        return None
    # Clipping can emit duplicate or collinear vertices; re-convexify.
    scale = max(abs(x) for pt in loop for x in pt) + 1.0
    cleaned: list = []
    for pt in loop:
        if not cleaned or math.hypot(pt[0] - cleaned[-1][0], pt[1] - cleaned[-1][1]) > 1e-12 * scale:
            cleaned.append(pt)
    if len(cleaned) >= 2 and math.hypot(
        cleaned[0][0] - cleaned[-1][0], cleaned[0][1] - cleaned[-1][1]
    ) <= 1e-12 * scale:
        cleaned.pop()
    if len(cleaned) < 3:
        return None
    try:
        return convex_hull(cleaned)
    except DegenerateInput:
        return None


def symm_diff_area(p: ConvexPolygon, q: ConvexPolygon) -> float:
    """Nikodym distance: the area of the symmetric difference."""
    value = p.area + q.area - 2.0 * intersection_area(p, q)
    return max(value, 0.0)


def _point_segment_distance(px, py, ax, ay, bx, by) -> float:
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _point_polygon_distance(point, polygon: ConvexPolygon) -> float:
    if contains(polygon, point, tol=0.0):
        return 0.0
    px, py = float(point[0]), float(point[1])
    v = polygon.vertices
    m = v.shape[0]
    return min(
        _point_segment_distance(px, py, v[i][0], v[i][1], v[(i + 1) % m][0], v[(i + 1) % m][1])
        for i in range(m)
    )


def hausdorff(p: ConvexPolygon, q: ConvexPolygon) -> float:
    """Hausdorff distance between two convex polygons.

    For convex sets the supremum in each direction is attained at a
    vertex, so the exact distance is a max over vertices of the
    point-to-polygon distance. h = hausdorff(P, Q) certifies the
    dilation inclusions P within Q^h and Q within P^h.
    """
    d_pq = max(_point_polygon_distance(pt, q) for pt in p.vertices)
    d_qp = max(_point_polygon_distance(pt, p) for pt in q.vertices)
    return max(d_pq, d_qp)


def grid_snap(p: ConvexPolygon, n: int) -> ConvexPolygon:
    """Snap each vertex to the grid (1/n)Z^2 and re-convexify.

    Merged or collinear vertices are dropped; the result satisfies
    hausdorff(p, result) <= sqrt(2)/(2n) and snapping is idempotent.
    Raises DegenerateInput when the polygon is thinner than the grid.
    """
    if not isinstance(n, int) or n < 2:
        raise InvalidParameters("grid resolution n must be an integer >= 2")
    v = p.vertices
    if np.any(v < -DEFAULT_TOL) or np.any(v > 1.0 + DEFAULT_TOL):
        raise InvalidParameters("grid_snap expects a polygon inside [0,1]^2")
    snapped = np.round(v * n) / n
    try:
        return convex_hull(snapped)
    except DegenerateInput as exc:
        raise DegenerateInput(
            f"polygon collapses at grid resolution 1/{n}: {exc}"
        ) from exc


def polygon_disk_intersection_area(p: ConvexPolygon, center, radius: float) -> float:
    """Exact area of the intersection of a convex polygon and a disk.

    Green's theorem edge by edge: each directed edge contributes either
    a straight triangle term (inside the circle) or a circular sector
    term (outside), with segment-circle crossings splitting an edge into
    at most three parts.
    """
    if radius <= 0:
        raise InvalidParameters("radius must be positive")
    cx, cy = float(center[0]), float(center[1])
    v = p.vertices - np.array([cx, cy])
    r2 = radius * radius

    def sector(a, b):
        # Signed sector sweep from direction a to direction b, wrapped to (-pi, pi].
        ang = math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
        return 0.5 * r2 * ang

    def tri(a, b):
        return 0.5 * (a[0] * b[1] - a[1] * b[0])

    total = 0.0
    m = v.shape[0]
    for i in range(m):
        a = v[i]
        b = v[(i + 1) % m]
        a_in = a[0] * a[0] + a[1] * a[1] <= r2
        b_in = b[0] * b[0] + b[1] * b[1] <= r2
        if a_in and b_in:
            total += tri(a, b)
            continue
        # Segment-circle intersection parameters on a + t (b - a), t in [0, 1].
        d = b - a
        A = d[0] * d[0] + d[1] * d[1]
        B = a[0] * d[0] + a[1] * d[1]
        C = a[0] * a[0] + a[1] * a[1] - r2
        disc = B * B - A * C
        ts = []
        if disc > 0.0 and A > 0.0:
            sq = math.sqrt(disc)
            for t in ((-B - sq) / A, (-B + sq) / A):
                if 1e-12 < t < 1.0 - 1e-12:
                    ts.append(t)
            ts.sort()
        if a_in and not b_in:
            t = ts[0] if ts else 1.0
            x = a + t * d
            total += tri(a, x) + sector(x, b)
        elif not a_in and b_in:
            t = ts[-1] if ts else 0.0
            x = a + t * d
            total += sector(a, x) + tri(x, b)
        else:
            if len(ts) == 2:
                x1 = a + ts[0] * d
                x2 = a + ts[1] * d
                total += sector(a, x1) + tri(x1, x2) + sector(x2, b)
            else:
                total += sector(a, b)
    return max(total, 0.0)

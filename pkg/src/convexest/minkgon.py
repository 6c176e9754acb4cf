"""Minimum-area enclosing polygon with a vertex budget.

Given the convex hull of a point set and a budget r, find a small-area
convex polygon with at most r vertices containing the hull. Every edge
of a locally minimal enclosing polygon supports the hull, either flush
with a hull edge or touching a hull vertex at the edge's midpoint. The
solver therefore runs:

  1. a dynamic program over cyclic selections of r flush support lines
     (each selection's area is the hull area plus a sum of independent
     corner pockets, which makes the cyclic min-cost structure exact),
  2. a one-free-edge pass that replaces a single selected line by the
     closed-form balanced tangent through a hull vertex (needed e.g. for
     the minimal triangle around a square, where no all-flush triangle
     is bounded), and
  3. a coordinate-descent polish that re-optimizes one edge at a time
     over flush and balanced candidates until no improvement remains.

An optional axis-aligned bounding box constrains the output polygon;
candidate corners falling outside the box are rejected, and four
axis-direction tangent lines join the candidate pool so that the
sample's bounding box is always reachable. Within the box-constrained
mode the result is a feasible upper bound rather than a certified
optimum.

Areas are floats; solutions are deterministic functions of the hull
(first minimal candidate in scan order wins ties).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters
from .geometry import ConvexPolygon, convex_hull

_GAP_TOL = 1e-9
_BOX_TOL = 1e-9
_IMPROVE_TOL = 1e-13


@dataclass
class KgonSolution:
    polygon: ConvexPolygon
    area: float
    status: str  # "dp_optimal" or "refined_heuristic"
    flush_area: float  # best all-flush value, inf when infeasible
    tie_count: int  # distinct all-flush optima (uniqueness diagnostic)


class _DynLine:
    """A support line of the hull: anchor, unit direction, normal angle
    in [0, 2*pi), and the tangency vertex interval [s, e] mod m."""

    __slots__ = ("ax", "ay", "dx", "dy", "psi", "s", "e")

    def __init__(self, ax, ay, dx, dy, psi, s, e):
        self.ax, self.ay, self.dx, self.dy = ax, ay, dx, dy
        self.psi, self.s, self.e = psi, s, e


class _Geom:
    """Pool of candidate support lines plus pocket-cost precomputation."""

    def __init__(self, hull: ConvexPolygon, box):
        v = hull.vertices
        m = v.shape[0]
        d = np.roll(v, -1, axis=0) - v
        d /= np.hypot(d[:, 0], d[:, 1])[:, None]
        psi = np.mod(np.arctan2(-d[:, 0], d[:, 1]), 2.0 * math.pi)
        # Rotate vertex labels so edge normals are ascending in pool order.
        i0 = int(np.argmin(psi))
        v = np.roll(v, -i0, axis=0)
        d = np.roll(d, -i0, axis=0)
        psi = np.roll(psi, -i0)
        psi_u = psi.copy()
        for i in range(1, m):
            while psi_u[i] <= psi_u[i - 1]:
                psi_u[i] += 2.0 * math.pi

        self.hull_area = hull.area
        self.V = v
        self.m = m
        self.box = box
        self.edge_psi = psi_u  # ascending, psi_u[0] in [0, 2*pi)

        anchors = [v[i] for i in range(m)]
        dirs = [d[i] for i in range(m)]
        psis = list(psi_u)
        starts = list(range(m))
        ends = list(range(1, m + 1))

        if box is not None:
            base = psi_u[0]
            for axis_psi in (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi):
                lifted = axis_psi + 2.0 * math.pi * math.ceil((base - axis_psi) / (2.0 * math.pi))
                if np.any(np.abs(psi_u - lifted) < 1e-12):
                    continue  # coincides with a flush edge
                pos = int(np.searchsorted(psi_u, lifted))
                w = pos  # tangent vertex in rotated labels (w == m means vertex 0 next turn)
                n = np.array([math.cos(axis_psi), math.sin(axis_psi)])
                anchor = v[w % m]
                direction = np.array([-n[1], n[0]])
                anchors.append(anchor)
                dirs.append(direction)
                psis.append(lifted)
                starts.append(w)
                ends.append(w)

        order = np.argsort(np.asarray(psis), kind="stable")
        self.A = np.asarray(anchors)[order]
        self.D = np.asarray(dirs)[order]
        self.psi = np.asarray(psis)[order]
        self.s = np.asarray(starts, dtype=int)[order]
        self.e = np.asarray(ends, dtype=int)[order]
        self.K = len(order)

        # Doubled copies for the cyclic-to-linear unrolling.
        V2 = np.vstack([v, v, v[:1]])
        self.V2 = V2
        cross = V2[:-1, 0] * V2[1:, 1] - V2[1:, 0] * V2[:-1, 1]
        self.S = np.concatenate([[0.0], np.cumsum(cross)])  # prefix of edge crosses

        self.A2 = np.vstack([self.A, self.A])
        self.D2 = np.vstack([self.D, self.D])
        self.psi2 = np.concatenate([self.psi, self.psi + 2.0 * math.pi])
        self.s2 = np.concatenate([self.s, self.s + m])
        self.e2 = np.concatenate([self.e, self.e + m])

    def chord_area(self, a: int, b: int) -> float:
        """Area between the hull chain V[a..b] and the chord from V[b] to V[a]."""
        if b <= a:
            return 0.0
        va, vb = self.V2[a], self.V2[b]
        return 0.5 * (self.S[b] - self.S[a] + vb[0] * va[1] - va[0] * vb[1])

    def pocket_matrix(self) -> np.ndarray:
        """W[i, j]: pocket area between unrolled pool lines i < j, inf if invalid."""
        n2 = 2 * self.K
        A, D = self.A2, self.D2
        gap = self.psi2[None, :] - self.psi2[:, None]
        denom = D[:, None, 0] * D[None, :, 1] - D[:, None, 1] * D[None, :, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (
                (A[None, :, 0] - A[:, None, 0]) * D[None, :, 1]
                - (A[None, :, 1] - A[:, None, 1]) * D[None, :, 0]
            ) / denom
            X = A[:, None, :] + t[:, :, None] * D[:, None, :]
        P = self.V2[self.e2]  # tangency end of line i
        Q = self.V2[np.minimum(self.s2, 2 * self.m)]  # tangency start of line j
        tri = 0.5 * (
            (X[:, :, 0] - P[:, None, 0]) * (Q[None, :, 1] - P[:, None, 1])
            - (X[:, :, 1] - P[:, None, 1]) * (Q[None, :, 0] - P[:, None, 0])
        )
        SA = self.S[self.e2]
        SB = self.S[np.minimum(self.s2, 2 * self.m)]
        chord = 0.5 * (
            SB[None, :]
            - SA[:, None]
            + Q[None, :, 0] * P[:, None, 1]
            - P[:, None, 0] * Q[None, :, 1]
        )
        W = np.maximum(tri - chord, 0.0)
        valid = (gap > _GAP_TOL) & (gap < math.pi - _GAP_TOL)
        valid &= self.s2[None, :] >= self.e2[:, None]
        if self.box is not None:
            xlo, ylo, xhi, yhi = self.box
            valid &= (
                (X[:, :, 0] >= xlo - _BOX_TOL)
                & (X[:, :, 0] <= xhi + _BOX_TOL)
                & (X[:, :, 1] >= ylo - _BOX_TOL)
                & (X[:, :, 1] <= yhi + _BOX_TOL)
            )
        W = np.where(valid, W, np.inf)
        return np.ascontiguousarray(W[:n2, :n2])

    def line(self, pool_idx: int) -> _DynLine:
        i = pool_idx % self.K
        return _DynLine(
            self.A[i, 0], self.A[i, 1], self.D[i, 0], self.D[i, 1],
            self.psi[i] % (2.0 * math.pi), int(self.s[i]) % self.m, int(self.e[i]) % self.m,
        )


def _gap(a: _DynLine, b: _DynLine) -> float:
    g = (b.psi - a.psi) % (2.0 * math.pi)
    return g


def _intersect_lines(a: _DynLine, b: _DynLine):
    denom = a.dx * b.dy - a.dy * b.dx
    if abs(denom) < 1e-14:
        return None
    t = ((b.ax - a.ax) * b.dy - (b.ay - a.ay) * b.dx) / denom
    return (a.ax + t * a.dx, a.ay + t * a.dy)


def _pocket_dyn(geo: _Geom, a: _DynLine, b: _DynLine):
    """Pocket area between consecutive support lines a then b (ccw), with
    the corner point; None when the pair is invalid or outside the box."""
    g = _gap(a, b)
    if g <= _GAP_TOL or g >= math.pi - _GAP_TOL:
        return None
    X = _intersect_lines(a, b)
    if X is None:
        return None
    if geo.box is not None:
        xlo, ylo, xhi, yhi = geo.box
        if not (xlo - _BOX_TOL <= X[0] <= xhi + _BOX_TOL and ylo - _BOX_TOL <= X[1] <= yhi + _BOX_TOL):
            return None
    m = geo.m
    V = geo.V
    span = (b.s - a.e) % m
    p = V[a.e % m]
    q = V[b.s % m]
    tri = 0.5 * ((X[0] - p[0]) * (q[1] - p[1]) - (X[1] - p[1]) * (q[0] - p[0]))
    chord = 0.0
    for t in range(span):
        u = V[(a.e + t) % m]
        w = V[(a.e + t + 1) % m]
        chord += u[0] * w[1] - w[0] * u[1]
    chord = 0.5 * (chord + q[0] * p[1] - p[0] * q[1])
    return max(tri - chord, 0.0), X


def _cycle_area(geo: _Geom, lines) -> float:
    total = geo.hull_area
    r = len(lines)
    for t in range(r):
        pk = _pocket_dyn(geo, lines[t], lines[(t + 1) % r])
        if pk is None:
            return math.inf
        total += pk[0]
    return total


def _assemble(geo: _Geom, lines):
    pts = []
    r = len(lines)
    for t in range(r):
        X = _intersect_lines(lines[t], lines[(t + 1) % r])
        if X is None:
            return None
        pts.append(X)
    try:
        return convex_hull(pts)
    except Exception:
        return None


def _balanced_line(geo: _Geom, w: int, prev: _DynLine, nxt: _DynLine):
    """Tangent line through hull vertex w whose cut segment between the
    neighbor lines is bisected by the vertex (the first-order optimality
    condition for a non-flush edge). Returns None when invalid."""
    V = geo.V
    m = geo.m
    P = V[w % m]
    c1 = -((P[0] - prev.ax) * prev.dy - (P[1] - prev.ay) * prev.dx)
    c2 = (P[0] - nxt.ax) * nxt.dy - (P[1] - nxt.ay) * nxt.dx
    det = prev.dx * nxt.dy - prev.dy * nxt.dx
    if abs(det) < 1e-14:
        return None
    ux = (-c1 * nxt.dx + prev.dx * c2) / det
    uy = (-c1 * nxt.dy + prev.dy * c2) / det
    if ux * ux + uy * uy < 1e-28:
        return None
    ax_, ay_ = P[0] + ux, P[1] + uy  # on prev's line
    bx_, by_ = P[0] - ux, P[1] - uy  # on next's line
    dx, dy = bx_ - ax_, by_ - ay_
    norm = math.hypot(dx, dy)
    if norm < 1e-14:
        return None
    dx, dy = dx / norm, dy / norm
    # Supporting line check: both hull neighbors of w on the left.
    for nb in (V[(w - 1) % m], V[(w + 1) % m]):
        if dx * (nb[1] - P[1]) - dy * (nb[0] - P[0]) < -1e-12:
            return None
    if geo.box is not None:
        xlo, ylo, xhi, yhi = geo.box
        for X in ((ax_, ay_), (bx_, by_)):
            if not (xlo - _BOX_TOL <= X[0] <= xhi + _BOX_TOL and ylo - _BOX_TOL <= X[1] <= yhi + _BOX_TOL):
                return None
    psi = math.atan2(dy, dx) - 0.5 * math.pi
    psi %= 2.0 * math.pi
    line = _DynLine(P[0], P[1], dx, dy, psi, w % m, w % m)
    # The free normal must fall strictly inside both neighbor gaps.
    if not (_GAP_TOL < _gap(prev, line) < math.pi - _GAP_TOL):
        return None
    if not (_GAP_TOL < _gap(line, nxt) < math.pi - _GAP_TOL):
        return None
    return line


def _polish(geo: _Geom, lines, max_passes: int = 6):
    """Coordinate descent: re-optimize one support line at a time over
    flush and balanced candidates between its neighbors."""
    lines = list(lines)
    r = len(lines)
    m = geo.m
    improved_any = False
    for _ in range(max_passes):
        improved = False
        for t in range(r):
            prev = lines[(t - 1) % r]
            nxt = lines[(t + 1) % r]
            cur = lines[t]
            cur_pk1 = _pocket_dyn(geo, prev, cur)
            cur_pk2 = _pocket_dyn(geo, cur, nxt)
            if cur_pk1 is None or cur_pk2 is None:
                continue
            best_cost = cur_pk1[0] + cur_pk2[0]
            best_line = None
            G = _gap(prev, nxt)
            span = (nxt.s - prev.e) % m
            # Balanced tangents at every vertex in the window.
            for off in range(span + 1):
                w = (prev.e + off) % m
                cand = _balanced_line(geo, w, prev, nxt)
                if cand is None:
                    continue
                pk1 = _pocket_dyn(geo, prev, cand)
                pk2 = _pocket_dyn(geo, cand, nxt)
                if pk1 is None or pk2 is None:
                    continue
                cost = pk1[0] + pk2[0]
                if cost < best_cost - _IMPROVE_TOL:
                    best_cost, best_line = cost, cand
            # Flush edges whose normals fall inside the window.
            for off in range(span):
                eidx = (prev.e + off) % m
                cand = _edge_line(geo, eidx)
                rel = _gap(prev, cand)
                if not (_GAP_TOL < rel < min(G, math.pi) - _GAP_TOL):
                    continue
                if _gap(cand, nxt) >= math.pi - _GAP_TOL:
                    continue
                pk1 = _pocket_dyn(geo, prev, cand)
                pk2 = _pocket_dyn(geo, cand, nxt)
                if pk1 is None or pk2 is None:
                    continue
                cost = pk1[0] + pk2[0]
                if cost < best_cost - _IMPROVE_TOL:
                    best_cost, best_line = cost, cand
            if best_line is not None:
                lines[t] = best_line
                improved = True
                improved_any = True
        if not improved:
            break
    return lines, improved_any


def _edge_line(geo: _Geom, edge_idx: int) -> _DynLine:
    m = geo.m
    i = edge_idx % m
    a = geo.V[i]
    b = geo.V[(i + 1) % m]
    dx, dy = b[0] - a[0], b[1] - a[1]
    norm = math.hypot(dx, dy)
    dx, dy = dx / norm, dy / norm
    psi = math.atan2(-dx, dy) % (2.0 * math.pi)
    return _DynLine(a[0], a[1], dx, dy, psi, i, (i + 1) % m)


def _insert_best_tangent(geo: _Geom, lines):
    """Insert the flush tangent that removes the most area from the cycle.
    Any insertion keeps the polygon inside the previous one, so this step
    preserves monotonicity of area in the vertex budget."""
    r = len(lines)
    base_area = _cycle_area(geo, lines)
    if not math.isfinite(base_area):
        return None
    best = None
    for eidx in range(geo.m):
        cand = _edge_line(geo, eidx)
        if any(abs((cand.psi - ln.psi) % (2.0 * math.pi)) < 1e-12 for ln in lines):
            continue
        slot = None
        for t in range(r):
            a, b = lines[t], lines[(t + 1) % r]
            if _gap(a, cand) < _gap(a, b) - _GAP_TOL and _gap(cand, b) < _gap(a, b) - _GAP_TOL:
                slot = t
                break
        if slot is None:
            continue
        a, b = lines[slot], lines[(slot + 1) % r]
        pk_ab = _pocket_dyn(geo, a, b)
        pk1 = _pocket_dyn(geo, a, cand)
        pk2 = _pocket_dyn(geo, cand, b)
        if pk_ab is None or pk1 is None or pk2 is None:
            continue
        new_area = base_area + pk1[0] + pk2[0] - pk_ab[0]
        if best is None or new_area < best[0]:
            best = (new_area, slot, cand)
    if best is None:
        return None
    new_area, slot, cand = best
    new_lines = lines[: slot + 1] + [cand] + lines[slot + 1 :]
    return new_lines, new_area


class _Tables:
    """Shared DP state for one hull, valid for every vertex budget."""

    def __init__(self, geo: _Geom, r_max: int):
        self.geo = geo
        K = geo.K
        W = geo.pocket_matrix()
        self.W = W
        self.vecs = [None, W[:K, :].copy()]  # vecs[k][f, j]: best k-hop chain f -> j
        self.parents = [None, None]
        for _ in range(2, r_max + 1):
            prev = self.vecs[-1]
            stacked = prev[:, :, None] + W[None, :, :]
            arg = np.argmin(stacked, axis=1)
            self.vecs.append(np.min(stacked, axis=1))
            self.parents.append(arg.astype(np.int32))
        self.mincut_cache: dict = {}

    def flush_best(self, r: int):
        """Best all-flush cycle of r lines: value, selection, tie count."""
        geo = self.geo
        K = geo.K
        vec = self.vecs[r]
        diag = vec[np.arange(K), np.arange(K) + K]
        best_val = float(np.min(diag))
        if not math.isfinite(best_val):
            return math.inf, None, 0
        f = int(np.argmin(diag))
        ties = int(np.sum(diag <= best_val + 1e-12))
        # Backtrack the chain f -> ... -> f+K; the wrap node is the start line.
        sel = []
        cur = f + K
        for k in range(r, 1, -1):
            cur = int(self.parents[k][f, cur])
            sel.append(cur)
        sel.append(f)
        sel.reverse()
        return best_val, sel, max(ties // r, 1)

    def mincut(self, p: int, q: int):
        """Best free tangent between base pool lines p (before) and q (after):
        (pocket cost through the free line, the line), or None."""
        key = (p, q)
        if key in self.mincut_cache:
            return self.mincut_cache[key]
        geo = self.geo
        lp = geo.line(p)
        lq = geo.line(q)
        G = _gap(lp, lq)
        if G <= 2.0 * _GAP_TOL:
            self.mincut_cache[key] = None
            return None
        lo = max(0.0, G - math.pi) + _GAP_TOL
        hi = min(G, math.pi) - _GAP_TOL
        best = None
        if lo < hi:
            span = (lq.s - lp.e) % geo.m
            for off in range(span + 1):
                w = (lp.e + off) % geo.m
                cand = _balanced_line(geo, w, lp, lq)
                if cand is None:
                    continue
                rel = _gap(lp, cand)
                if not (lo <= rel <= hi):
                    continue
                pk1 = _pocket_dyn(geo, lp, cand)
                pk2 = _pocket_dyn(geo, cand, lq)
                if pk1 is None or pk2 is None:
                    continue
                cost = pk1[0] + pk2[0]
                if best is None or cost < best[0]:
                    best = (cost, cand)
        self.mincut_cache[key] = best
        return best

    def one_free_best(self, r: int, threshold: float):
        """Best (r-1)-flush plus one balanced line; only chains cheaper than
        threshold are completed (a pocket cost is nonnegative)."""
        geo = self.geo
        K = geo.K
        chain = self.vecs[r - 2]
        best_val, best_pair, best_line = math.inf, None, None
        limit = threshold if math.isfinite(threshold) else math.inf
        for q in range(K):
            row = chain[q]
            for p in range(K):
                if p == q:
                    continue
                p_unrolled = p + K if p <= q else p
                cval = row[p_unrolled]
                if not math.isfinite(cval) or cval >= min(limit, best_val):
                    continue
                cut = self.mincut(p, q)
                if cut is None:
                    continue
                total = cval + cut[0]
                if total < best_val - _IMPROVE_TOL:
                    best_val, best_pair, best_line = total, (q, p_unrolled), cut[1]
        return best_val, best_pair, best_line

    def chain_path(self, q: int, p_unrolled: int, hops: int):
        path = [p_unrolled]
        cur = p_unrolled
        for k in range(hops, 1, -1):
            cur = int(self.parents[k][q, cur])
            path.append(cur)
        path.append(q)
        path.reverse()
        return path


def solve_min_kgon_range(hull: ConvexPolygon, r_values, box=None):
    """Solve the enclosing-polygon problem for several vertex budgets.

    Returns {r: KgonSolution or None}; None means no feasible polygon in
    the candidate family (possible only under a box constraint). Budgets
    of at least the hull vertex count must be handled by the caller (the
    hull itself is optimal there).
    """
    r_values = sorted(set(int(r) for r in r_values))
    if not r_values:
        return {}
    if r_values[0] < 3:
        raise InvalidParameters("vertex budget must be at least 3")
    m = hull.n_vertices
    if r_values[-1] >= m:
        raise InvalidParameters("budgets >= hull vertex count are the hull itself")

    results: dict = {}
    if box is not None:
        xlo, ylo, xhi, yhi = box
        v = hull.vertices
        if (
            v[:, 0].min() < xlo - _BOX_TOL
            or v[:, 0].max() > xhi + _BOX_TOL
            or v[:, 1].min() < ylo - _BOX_TOL
            or v[:, 1].max() > yhi + _BOX_TOL
        ):
            return {r: None for r in r_values}

    geo = _Geom(hull, box)
    # Solve every budget from 3 upward so the insertion seed enforces
    # monotonicity of area across independent calls with different r.
    all_rs = list(range(3, r_values[-1] + 1))
    tables = _Tables(geo, all_rs[-1])

    prev_lines = None
    prev_area = math.inf
    for r in all_rs:
        flush_val, flush_path, ties = tables.flush_best(r)
        candidates = []  # (area_excess, lines, source)
        if flush_path is not None:
            lines = [geo.line(i) for i in flush_path]
            candidates.append((flush_val, lines, "dp"))
        of_val, of_pair, of_line = tables.one_free_best(
            r, min(flush_val, prev_area - geo.hull_area)
        )
        if of_pair is not None:
            q, p_unrolled = of_pair
            chain = tables.chain_path(q, p_unrolled, r - 2)
            lines = [geo.line(i) for i in chain] + [of_line]
            candidates.append((of_val, lines, "one_free"))
        if prev_lines is not None:
            seeded = _insert_best_tangent(geo, prev_lines)
            if seeded is not None:
                candidates.append((seeded[1] - geo.hull_area, seeded[0], "seed"))

        if not candidates:
            results[r] = None
            continue
        candidates.sort(key=lambda c: c[0])
        excess, lines, source = candidates[0]
        polished, improved = _polish(geo, lines)
        pol_area = _cycle_area(geo, polished)
        if math.isfinite(pol_area) and pol_area <= geo.hull_area + excess + _IMPROVE_TOL:
            lines = polished
        else:
            improved = False
        polygon = _assemble(geo, lines)
        if polygon is None:
            results[r] = None
            continue
        refined = source != "dp" or improved
        results[r] = KgonSolution(
            polygon=polygon,
            area=polygon.area,
            status="refined_heuristic" if refined else "dp_optimal",
            flush_area=geo.hull_area + flush_val if math.isfinite(flush_val) else math.inf,
            tie_count=ties,
        )
        prev_lines = lines
        prev_area = polygon.area

    return {r: results.get(r) for r in r_values}


def solve_min_kgon(hull: ConvexPolygon, r: int, box=None):
    """Single-budget convenience wrapper around solve_min_kgon_range."""
    return solve_min_kgon_range(hull, [r], box=box)[r]

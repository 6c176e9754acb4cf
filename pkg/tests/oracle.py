"""Independent brute-force oracle for the minimum-area enclosing k-gon.

Everything here is built from the support function of the hull: a
candidate polygon is an intersection of tangent half-planes at chosen
normal angles, its area computed by the shoelace of the corner points.
The search enumerates flush-subset seeds, sweeps a rotating tangent on
an angle grid for the remaining side, and hands the best seeds to a
derivative-free minimizer over all angles. No code is shared with the
production solver.
"""

import itertools
import math

import numpy as np
from scipy.optimize import minimize


def support_offsets(hull_vertices, thetas):
    n = np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)
    return (hull_vertices @ n.T).max(axis=0)


def area_from_tangents(hull_vertices, thetas):
    """Area of the polygon bounded by tangent lines at the given normal
    angles, or inf when the angles do not bound a polygon."""
    th = np.mod(np.asarray(thetas, dtype=float), 2.0 * math.pi)
    th = np.sort(th)
    gaps = np.diff(np.concatenate([th, [th[0] + 2.0 * math.pi]]))
    if np.any(gaps <= 1e-12) or np.any(gaps >= math.pi - 1e-12):
        return math.inf
    h = support_offsets(hull_vertices, th)
    r = len(th)
    pts = []
    for i in range(r):
        j = (i + 1) % r
        n1 = (math.cos(th[i]), math.sin(th[i]))
        n2 = (math.cos(th[j]), math.sin(th[j]))
        det = n1[0] * n2[1] - n1[1] * n2[0]
        pts.append(
            (
                (h[i] * n2[1] - h[j] * n1[1]) / det,
                (h[j] * n1[0] - h[i] * n2[0]) / det,
            )
        )
    pts = np.asarray(pts)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def edge_normals(hull_vertices):
    d = np.roll(hull_vertices, -1, axis=0) - hull_vertices
    return np.mod(np.arctan2(-d[:, 0], d[:, 1]), 2.0 * math.pi)


def min_kgon_oracle(hull_vertices, r, n_grid=2000, refine=True):
    """Brute-force minimum area over r tangent lines.

    Seeds: all r-subsets of flush normals, plus every (r-1)-subset with
    one rotating tangent on an angle grid. The best seeds are refined by
    Nelder-Mead over the full angle vector.
    """
    hv = np.asarray(hull_vertices, dtype=float)
    psi = edge_normals(hv)
    m = len(psi)
    best = math.inf
    seeds = []

    for sub in itertools.combinations(range(m), r):
        thetas = psi[list(sub)]
        a = area_from_tangents(hv, thetas)
        if a < best:
            best = a
        if math.isfinite(a):
            seeds.append((a, thetas))

    grid = np.linspace(0.0, 2.0 * math.pi, n_grid, endpoint=False)
    for sub in itertools.combinations(range(m), r - 1):
        base = psi[list(sub)]
        areas = np.array(
            [area_from_tangents(hv, np.concatenate([base, [g]])) for g in grid]
        )
        i = int(np.argmin(areas))
        if math.isfinite(areas[i]):
            thetas = np.concatenate([base, [grid[i]]])
            seeds.append((areas[i], thetas))
            if areas[i] < best:
                best = areas[i]

    if refine and seeds:
        seeds.sort(key=lambda s: s[0])

        def objective(th):
            a = area_from_tangents(hv, th)
            return a if math.isfinite(a) else 1e9

        for _, thetas in seeds[:8]:
            res = minimize(
                objective,
                thetas,
                method="Nelder-Mead",
                options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-14},
            )
            if res.fun < best:
                best = float(res.fun)
    return best


def min_triangle_two_flush_grid(hull_vertices, n_angles=10_000):
    """The classic construction for r = 3: every pair of flush edges plus
    a rotating third support line on a dense angle grid."""
    hv = np.asarray(hull_vertices, dtype=float)
    psi = edge_normals(hv)
    grid = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    best = math.inf
    for i, j in itertools.combinations(range(len(psi)), 2):
        for g in grid:
            a = area_from_tangents(hv, [psi[i], psi[j], g])
            if a < best:
                best = a
    return best

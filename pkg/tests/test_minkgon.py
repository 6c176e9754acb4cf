import math

import numpy as np
import pytest

from convexest.errors import InvalidParameters
from convexest.estimators import min_kgon
from convexest.geometry import ConvexPolygon, contains, convex_hull
from convexest.minkgon import solve_min_kgon, solve_min_kgon_range
from .conftest import random_polygon
from .oracle import min_kgon_oracle, min_triangle_two_flush_grid

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def hexagon(radius=1.0):
    ang = 2.0 * math.pi * np.arange(6) / 6
    return np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)


class TestClassics:
    def test_square_r4_is_square(self):
        res = min_kgon(UNIT_SQUARE, 4)
        assert res.status == "exact_hull"
        assert res.area == pytest.approx(1.0)
        assert res.r_used == 4

    def test_square_min_triangle(self):
        # Two sides flush, the third balanced through a corner: area 2.
        res = min_kgon(UNIT_SQUARE, 3)
        assert res.area == pytest.approx(2.0, abs=1e-6)
        assert res.r_used == 3
        grid_value = min_triangle_two_flush_grid(np.asarray(UNIT_SQUARE), n_angles=10_000)
        assert res.area <= grid_value + 1e-9

    def test_hexagon_min_triangle(self):
        hexa = hexagon()
        res = min_kgon(hexa, 3)
        hex_area = convex_hull(hexa).area
        assert res.area == pytest.approx(1.5 * hex_area, abs=1e-4)
        assert res.area == pytest.approx(2.25 * math.sqrt(3.0), abs=1e-4)

    def test_r_below_three_rejected(self):
        with pytest.raises(InvalidParameters):
            min_kgon(UNIT_SQUARE, 2)


class TestInvariants:
    def test_containment_of_inputs(self, rng):
        for _ in range(25):
            pts = rng.random((int(rng.integers(10, 80)), 2))
            for r in (3, 4, 5):
                res = min_kgon(pts, r)
                assert all(contains(res.polygon, p, tol=1e-9) for p in pts)
                assert res.r_used <= r
                assert res.area == pytest.approx(res.polygon.area)

    def test_area_monotone_in_budget(self, rng):
        for _ in range(10):
            pts = rng.random((60, 2))
            areas = [min_kgon(pts, r).area for r in range(3, 10)]
            for a_small, a_big in zip(areas, areas[1:]):
                assert a_big <= a_small + 1e-9

    def test_stabilizes_at_hull(self, rng):
        pts = rng.random((40, 2))
        hull = convex_hull(pts)
        res = min_kgon(pts, hull.n_vertices)
        assert res.status == "exact_hull"
        assert res.polygon == hull
        res2 = min_kgon(pts, hull.n_vertices + 5)
        assert res2.polygon == hull

    def test_conservative_against_known_feasible(self, rng):
        # Fitting r-gons to samples from an r-gon support: the support
        # itself is feasible, so the fit can never be larger.
        for poly in [ConvexPolygon(UNIT_SQUARE), random_polygon(rng, n_points=7)]:
            r = poly.n_vertices
            from convexest.sampling import PolygonSupport, Seed, sample_support

            pts = sample_support(PolygonSupport(poly), 400, Seed(21, r))
            res = min_kgon(pts, r)
            assert res.area <= poly.area + 1e-6

    def test_deterministic(self, rng):
        pts = rng.random((50, 2))
        a = min_kgon(pts, 4)
        b = min_kgon(pts, 4)
        assert a.polygon == b.polygon
        assert a.status == b.status


class TestOracleEquivalence:
    def test_small_hulls_match_brute_force(self, rng):
        checked = 0
        while checked < 20:
            pts = rng.random((int(rng.integers(6, 15)), 2))
            try:
                hull = convex_hull(pts)
            except Exception:
                continue
            if hull.n_vertices > 8:
                continue
            for r in (3, 4, 5):
                if r >= hull.n_vertices:
                    continue
                mine = solve_min_kgon(hull, r).area
                brute = min_kgon_oracle(hull.vertices, r, n_grid=720)
                assert abs(mine - brute) / brute <= 5e-3
            checked += 1


class TestBoxConstrained:
    def test_infeasible_when_hull_leaves_box(self):
        hull = convex_hull([(-0.5, 0.0), (1.2, 0.1), (1.3, 0.9), (0.6, 1.4), (-0.4, 0.8)])
        out = solve_min_kgon_range(hull, [3, 4], box=(0, 0, 1, 1))
        assert out[3] is None and out[4] is None

    def test_square_data_triangle_infeasible_quad_feasible(self, rng):
        pts = rng.random((800, 2))
        hull = convex_hull(pts)
        sols = solve_min_kgon_range(hull, range(3, 7), box=(0.0, 0.0, 1.0, 1.0))
        assert sols[3] is None  # no triangle fits between the hull and the box
        assert sols[4] is not None
        box_poly = sols[4].polygon
        assert np.all(box_poly.vertices >= -1e-9)
        assert np.all(box_poly.vertices <= 1.0 + 1e-9)
        # Unconstrained solve can only be smaller.
        free = solve_min_kgon(hull, 4)
        assert free.area <= sols[4].area + 1e-12

    def test_box_feasibility_monotone(self, rng):
        for _ in range(5):
            pts = rng.random((300, 2))
            hull = convex_hull(pts)
            sols = solve_min_kgon_range(
                hull, range(3, hull.n_vertices), box=(0.0, 0.0, 1.0, 1.0)
            )
            feasible = [r for r, s in sols.items() if s is not None]
            if feasible:
                lo = min(feasible)
                assert feasible == list(range(lo, hull.n_vertices))


class TestTieDiagnostics:
    def test_tie_count_reported(self, rng):
        pts = rng.random((60, 2))
        hull = convex_hull(pts)
        sol = solve_min_kgon(hull, 5)
        assert sol.tie_count >= 1

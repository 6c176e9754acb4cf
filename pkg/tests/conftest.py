import numpy as np
import pytest

from convexest.geometry import ConvexPolygon, convex_hull


def random_polygon(rng, n_points=None, min_area=0.05) -> ConvexPolygon:
    """Hull of a handful of uniform points in the unit square; rejects
    slivers so tolerance-based checks stay meaningful."""
    while True:
        k = n_points or int(rng.integers(5, 13))
        pts = rng.random((k, 2))
        try:
            poly = convex_hull(pts)
        except Exception:
            continue
        if poly.area >= min_area:
            return poly


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_square_poly():
    return ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])

import math

import numpy as np
import pytest
from scipy import stats

from convexest.errors import DimensionMismatch, InvalidParameters
from convexest.geometry import ConvexPolygon, intersection_area
from convexest.sampling import (
    BallSupport,
    CubeSupport,
    DiskSupport,
    PolygonSupport,
    Seed,
    membership,
    sample_support,
    support_area,
    support_from_json,
    unit_square,
)


def test_seed_validation():
    with pytest.raises(InvalidParameters):
        Seed(-1, 0)
    with pytest.raises(InvalidParameters):
        Seed(0, 2**64)


def test_determinism_bitwise():
    spec = unit_square()
    a = sample_support(spec, 500, Seed(7, 3))
    b = sample_support(spec, 500, Seed(7, 3))
    assert a.tobytes() == b.tobytes()
    c = sample_support(spec, 500, Seed(7, 4))
    assert a.tobytes() != c.tobytes()


def test_child_streams_differ():
    s = Seed(1, 2)
    a = s.child(0).generator().random(8)
    b = s.child(1).generator().random(8)
    assert not np.allclose(a, b)


def test_square_mean_within_three_sigma():
    n = 1_000_000
    pts = sample_support(unit_square(), n, Seed(11, 0))
    sigma = 1.0 / math.sqrt(12.0 * n)
    assert abs(pts[:, 0].mean() - 0.5) <= 3 * sigma
    assert abs(pts[:, 1].mean() - 0.5) <= 3 * sigma


def test_triangle_mean_near_centroid():
    tri = PolygonSupport(ConvexPolygon([(0, 0), (1, 0), (0, 1)]))
    n = 1_000_000
    pts = sample_support(tri, n, Seed(12, 0))
    # Coordinate variance of a uniform point in this triangle is 1/18.
    sigma = math.sqrt(1.0 / 18.0 / n)
    assert abs(pts[:, 0].mean() - 1.0 / 3.0) <= 3 * sigma
    assert abs(pts[:, 1].mean() - 1.0 / 3.0) <= 3 * sigma


def test_disk_radius_quartile():
    n = 1_000_000
    pts = sample_support(DiskSupport((0, 0), 1.0), n, Seed(13, 0))
    frac = float((np.einsum("ij,ij->i", pts, pts) <= 0.25).mean())
    sigma = math.sqrt(0.25 * 0.75 / n)
    assert abs(frac - 0.25) <= 3 * sigma


def test_samples_satisfy_membership():
    polygon = PolygonSupport(ConvexPolygon([(0.1, 0.2), (0.9, 0.1), (0.7, 0.95), (0.15, 0.8)]))
    for spec, tol in (
        (polygon, 1e-12),
        (DiskSupport((0.3, -1.0), 2.5), 0.0),
        (BallSupport(4, radius=1.5), 0.0),
        (CubeSupport(3, side=2.0), 0.0),
    ):
        pts = sample_support(spec, 5000, Seed(14, 1))
        assert all(spec.contains(p, tol=tol) for p in pts)


def test_polygon_sampling_chi_square_grid():
    # Exact triangulation sampling against a 10x10 occupancy grid over the
    # bounding box; expected cell masses come from exact cell clipping.
    poly = ConvexPolygon([(0.05, 0.1), (0.95, 0.3), (0.8, 0.9), (0.3, 0.85), (0.1, 0.5)])
    spec = PolygonSupport(poly)
    n = 100_000
    pts = sample_support(spec, n, Seed(15, 0))
    xs = poly.vertices[:, 0]
    ys = poly.vertices[:, 1]
    hist, _, _ = np.histogram2d(
        pts[:, 0], pts[:, 1], bins=10,
        range=[[xs.min(), xs.max()], [ys.min(), ys.max()]],
    )
    gx = np.linspace(xs.min(), xs.max(), 11)
    gy = np.linspace(ys.min(), ys.max(), 11)
    chi2 = 0.0
    df = 0
    leftover_obs = 0.0
    leftover_exp = 0.0
    for i in range(10):
        for j in range(10):
            cell = ConvexPolygon(
                [(gx[i], gy[j]), (gx[i + 1], gy[j]), (gx[i + 1], gy[j + 1]), (gx[i], gy[j + 1])]
            )
            expected = n * intersection_area(cell, poly) / poly.area
            if expected < 5.0:
                leftover_obs += hist[i, j]
                leftover_exp += expected
                continue
            chi2 += (hist[i, j] - expected) ** 2 / expected
            df += 1
    if leftover_exp >= 5.0:
        chi2 += (leftover_obs - leftover_exp) ** 2 / leftover_exp
        df += 1
    assert chi2 < stats.chi2.ppf(1.0 - 0.001, df - 1)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_ball_radius_cdf_kolmogorov_smirnov(d):
    R = 1.3
    pts = sample_support(BallSupport(d, radius=R), 100_000, Seed(16, d))
    radii = np.linalg.norm(pts, axis=1)
    res = stats.kstest(radii, lambda t: np.clip((t / R) ** d, 0.0, 1.0))
    assert res.pvalue > 0.001


def test_support_area():
    assert support_area(unit_square()) == pytest.approx(1.0)
    assert support_area(DiskSupport((0, 0), 1.0)) == pytest.approx(math.pi)
    assert support_area(BallSupport(3, radius=1.0)) == pytest.approx(4.0 * math.pi / 3.0)
    assert support_area(CubeSupport(4, side=0.5)) == pytest.approx(0.5**4)


def test_membership():
    assert membership(CubeSupport(3, side=1.0), (0.5, 0.5, 0.5))
    assert not membership(BallSupport(3, radius=1.0), (1, 1, 1))
    assert membership(DiskSupport((0, 0), 2.0), (2.0, 0.0))  # boundary
    with pytest.raises(DimensionMismatch):
        membership(CubeSupport(3, side=1.0), (0.5, 0.5))


def test_support_json_round_trip():
    specs = [
        unit_square(),
        DiskSupport((0.25, -0.5), 1.75),
        BallSupport(3, radius=2.0),
        CubeSupport(2, side=3.0),
    ]
    for spec in specs:
        again = support_from_json(spec.to_json())
        assert again.to_json() == spec.to_json()
    with pytest.raises(InvalidParameters):
        support_from_json({"kind": "torus"})


def test_dimension_cap():
    with pytest.raises(InvalidParameters):
        BallSupport(11, radius=1.0)
    with pytest.raises(InvalidParameters):
        CubeSupport(1, side=1.0)

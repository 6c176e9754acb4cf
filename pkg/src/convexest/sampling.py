"""Seeded, reproducible uniform sampling from convex supports.

Supports are polygons (sampled exactly by triangulation), disks, d-balls
and d-cubes. Randomness is counter-based (Philox) and keyed by a
(root, stream) seed plus an arbitrary derivation path, so replicate
streams are independent and the same call is bitwise reproducible
regardless of thread schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, InvalidParameters
from .geometry import ConvexPolygon, contains

MAX_DIMENSION = 10


@dataclass(frozen=True)
class Seed:
    """Root seed plus a stream index; together they determine every draw."""

    root: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("root", "stream"):
            value = getattr(self, name)
            if not isinstance(value, int) or not 0 <= value < 2 ** 64:
                raise InvalidParameters(f"{name} must be an unsigned 64-bit integer")

    def generator(self, *path: int) -> np.random.Generator:
        """Philox generator keyed by (root, stream, *path)."""
        ss = np.random.SeedSequence(entropy=self.root, spawn_key=(self.stream, *path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "Seed":
        return Seed(self.root, self.stream * 1_000_003 + index + 1)

    def to_json(self) -> dict:
        return {"root": self.root, "stream": self.stream}

    @classmethod
    def from_json(cls, obj) -> "Seed":
        return cls(int(obj.get("root", 0)), int(obj.get("stream", 0)))


def _ball_volume(dimension: int, radius: float) -> float:
    return math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0 + 1.0) * radius ** dimension


class Support:
    """A convex support with exact area, membership and uniform sampling."""

    kind: str
    dimension: int

    def area(self) -> float:
        raise NotImplementedError

    def contains(self, point, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_dimension(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.dimension,):
            raise DimensionMismatch(
                f"point has shape {p.shape}, support is {self.dimension}-dimensional"
            )
        return p


class PolygonSupport(Support):
    kind = "polygon"
    dimension = 2

    def __init__(self, polygon: ConvexPolygon):
        if not isinstance(polygon, ConvexPolygon):
            polygon = ConvexPolygon(polygon)
        self.polygon = polygon
        # Fan triangulation from vertex 0; areas give the triangle mixture.
        v = polygon.vertices
        m = v.shape[0]
        self._tri_b = v[1 : m - 1]
        self._tri_c = v[2:m]
        cross = (self._tri_b[:, 0] - v[0, 0]) * (self._tri_c[:, 1] - v[0, 1]) - (
            self._tri_b[:, 1] - v[0, 1]
        ) * (self._tri_c[:, 0] - v[0, 0])
        tri_areas = 0.5 * cross
        self._tri_probs = tri_areas / tri_areas.sum()

    def area(self) -> float:
        return self.polygon.area

    def contains(self, point, tol: float = 1e-12) -> bool:
        p = self._check_dimension(point)
        return contains(self.polygon, p, tol=tol)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        v = self.polygon.vertices
        idx = rng.choice(len(self._tri_probs), size=n, p=self._tri_probs)
        u = rng.random(n)
        w = rng.random(n)
        a = v[0]
        b = self._tri_b[idx]
        c = self._tri_c[idx]
        su = np.sqrt(u)[:, None]
        return a + su * ((b - a) + w[:, None] * (c - b))

    def to_json(self) -> dict:
        return {"kind": "polygon", "vertices": self.polygon.vertices.tolist()}


class DiskSupport(Support):
    kind = "disk"
    dimension = 2

    def __init__(self, center=(0.0, 0.0), radius: float = 1.0):
        if radius <= 0:
            raise InvalidParameters("radius must be positive")
        self.center = np.asarray(center, dtype=float)
        if self.center.shape != (2,):
            raise InvalidParameters("disk center must be a 2-vector")
        self.radius = float(radius)

    def area(self) -> float:
        return math.pi * self.radius ** 2

    def contains(self, point, tol: float = 0.0) -> bool:
        p = self._check_dimension(point)
        d = p - self.center
        return float(d @ d) <= (self.radius + tol) ** 2

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return _sample_ball(n, 2, self.radius, rng) + self.center

    def to_json(self) -> dict:
        return {"kind": "disk", "center": self.center.tolist(), "radius": self.radius}


class BallSupport(Support):
    kind = "ball"

    def __init__(self, dimension: int, radius: float = 1.0, center=None):
        if not isinstance(dimension, int) or not 2 <= dimension <= MAX_DIMENSION:
            raise InvalidParameters(f"dimension must be an integer in [2, {MAX_DIMENSION}]")
        if radius <= 0:
            raise InvalidParameters("radius must be positive")
        self.dimension = dimension
        self.radius = float(radius)
        self.center = (
            np.zeros(dimension) if center is None else np.asarray(center, dtype=float)
        )
        if self.center.shape != (dimension,):
            raise InvalidParameters("center length must match dimension")

    def area(self) -> float:
        return _ball_volume(self.dimension, self.radius)

    def contains(self, point, tol: float = 0.0) -> bool:
        p = self._check_dimension(point)
        d = p - self.center
        return float(d @ d) <= (self.radius + tol) ** 2

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return _sample_ball(n, self.dimension, self.radius, rng) + self.center

    def to_json(self) -> dict:
        return {
            "kind": "ball",
            "dimension": self.dimension,
            "radius": self.radius,
            "center": self.center.tolist(),
        }


class CubeSupport(Support):
    kind = "cube"

    def __init__(self, dimension: int, side: float = 1.0, origin=None):
        if not isinstance(dimension, int) or not 2 <= dimension <= MAX_DIMENSION:
            raise InvalidParameters(f"dimension must be an integer in [2, {MAX_DIMENSION}]")
        if side <= 0:
            raise InvalidParameters("side must be positive")
        self.dimension = dimension
        self.side = float(side)
        self.origin = (
            np.zeros(dimension) if origin is None else np.asarray(origin, dtype=float)
        )
        if self.origin.shape != (dimension,):
            raise InvalidParameters("origin length must match dimension")

    def area(self) -> float:
        return self.side ** self.dimension

    def contains(self, point, tol: float = 0.0) -> bool:
        p = self._check_dimension(point) - self.origin
        return bool(np.all(p >= -tol) and np.all(p <= self.side + tol))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.origin + self.side * rng.random((n, self.dimension))

    def to_json(self) -> dict:
        return {
            "kind": "cube",
            "dimension": self.dimension,
            "side": self.side,
            "origin": self.origin.tolist(),
        }


def _sample_ball(n: int, d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in a centered d-ball: Gaussian direction, radius U^(1/d)."""
    z = rng.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    # A zero Gaussian vector has probability ~0 but would divide by zero.
    norms[norms == 0.0] = 1.0
    rho = radius * rng.random(n) ** (1.0 / d)
    pts = z * (rho[:, None] / norms)
    # Rounding can push a point a few ulp outside; membership is exact (tol 0).
    r2 = np.einsum("ij,ij->i", pts, pts)
    bad = r2 > radius * radius
    if np.any(bad):
        pts[bad] *= radius / np.sqrt(r2[bad])[:, None] * (1.0 - 1e-15)
    return pts


_KINDS = {
    "polygon": PolygonSupport,
    "disk": DiskSupport,
    "ball": BallSupport,
    "cube": CubeSupport,
}


def support_from_json(obj) -> Support:
    """Build a Support from its JSON object form (see each kind's to_json)."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidParameters("support spec must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "polygon":
        if "vertices" not in obj:
            raise InvalidParameters("polygon support needs 'vertices'")
        return PolygonSupport(ConvexPolygon(obj["vertices"]))
    if kind == "disk":
        return DiskSupport(obj.get("center", (0.0, 0.0)), obj.get("radius", 1.0))
    if kind == "ball":
        return BallSupport(
            int(obj.get("dimension", 2)), obj.get("radius", 1.0), obj.get("center")
        )
    if kind == "cube":
        return CubeSupport(int(obj.get("dimension", 2)), obj.get("side", 1.0), obj.get("origin"))
    raise InvalidParameters(f"unknown support kind {kind!r}")


def unit_square() -> PolygonSupport:
    return PolygonSupport(ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)]))


def sample_support(spec: Support, n: int, seed: Seed) -> np.ndarray:
    """Draw n i.i.d. uniform points from the support, deterministically.

    The same (spec, n, seed) always yields the same array, bit for bit.
    """
    if not isinstance(n, int) or n < 1:
        raise InvalidParameters("n must be a positive integer")
    return spec.sample(n, seed.generator())


def support_area(spec: Support) -> float:
    """Exact Lebesgue measure of the support."""
    return spec.area()


def membership(spec: Support, point) -> bool:
    """Exact membership test (boundary points are members)."""
    return spec.contains(point)

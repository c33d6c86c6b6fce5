"""Affine maps and parallelograms.

A parallelogram is stored as the affine image of the standard square
[-1,1]^2: center b and half-edge vectors u = L e1, v = L e2.  Width is the
shorter of the two distances between opposite side pairs, which for
half-edges u, v equals 2 |det L| / max(|u|, |v|).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParallelogram

_CONTAIN_EPS = 1e-12


@dataclass(frozen=True)
class AffineMap2:
    """xi -> L xi + b on the plane."""

    linear: tuple[tuple[float, float], tuple[float, float]]
    shift: tuple[float, float]

    @staticmethod
    def from_arrays(linear, shift) -> "AffineMap2":
        L = np.asarray(linear, dtype=float)
        b = np.asarray(shift, dtype=float)
        return AffineMap2(((L[0, 0], L[0, 1]), (L[1, 0], L[1, 1])), (b[0], b[1]))

    @staticmethod
    def identity() -> "AffineMap2":
        return AffineMap2(((1.0, 0.0), (0.0, 1.0)), (0.0, 0.0))

    @staticmethod
    def rotation(theta: float, shift=(0.0, 0.0)) -> "AffineMap2":
        c, s = np.cos(theta), np.sin(theta)
        return AffineMap2(((c, -s), (s, c)), (float(shift[0]), float(shift[1])))

    @staticmethod
    def translation(shift) -> "AffineMap2":
        return AffineMap2(((1.0, 0.0), (0.0, 1.0)), (float(shift[0]), float(shift[1])))

    @staticmethod
    def scaling(sx: float, sy: float) -> "AffineMap2":
        return AffineMap2(((float(sx), 0.0), (0.0, float(sy))), (0.0, 0.0))

    @property
    def L(self) -> np.ndarray:
        return np.array(self.linear, dtype=float)

    @property
    def b(self) -> np.ndarray:
        return np.array(self.shift, dtype=float)

    def det(self) -> float:
        (a, c), (d, e) = self.linear
        return a * e - c * d

    def apply(self, xi) -> np.ndarray:
        """Apply to a point (2,) or stack of points (..., 2)."""
        xi = np.asarray(xi, dtype=float)
        return xi @ self.L.T + self.b

    def compose(self, other: "AffineMap2") -> "AffineMap2":
        """self after other: xi -> self(other(xi))."""
        return AffineMap2.from_arrays(self.L @ other.L, self.L @ other.b + self.b)

    def inverse(self) -> "AffineMap2":
        det = self.det()
        if det == 0.0:
            raise DegenerateParallelogram("affine map is singular")
        (a, c), (d, e) = self.linear
        inv = np.array([[e, -c], [-d, a]]) / det
        return AffineMap2.from_arrays(inv, -inv @ self.b)

    def to_json(self) -> dict:
        return {"L": [list(self.linear[0]), list(self.linear[1])],
                "b": list(self.shift)}

    @staticmethod
    def from_json(obj: dict) -> "AffineMap2":
        return AffineMap2.from_arrays(obj["L"], obj["b"])


@dataclass(frozen=True)
class Parallelogram:
    """Affine image of [-1,1]^2."""

    map: AffineMap2

    @staticmethod
    def from_arrays(linear, shift) -> "Parallelogram":
        return Parallelogram(AffineMap2.from_arrays(linear, shift))

    @staticmethod
    def unit_square() -> "Parallelogram":
        return Parallelogram(AffineMap2.identity())

    @staticmethod
    def box(x0: float, x1: float, y0: float, y1: float) -> "Parallelogram":
        """Axis-aligned rectangle [x0,x1] x [y0,y1]."""
        return Parallelogram.from_arrays(
            [[(x1 - x0) / 2.0, 0.0], [0.0, (y1 - y0) / 2.0]],
            [(x0 + x1) / 2.0, (y0 + y1) / 2.0])

    @property
    def center(self) -> np.ndarray:
        return self.map.b

    @property
    def half_edges(self) -> tuple[np.ndarray, np.ndarray]:
        L = self.map.L
        return L[:, 0].copy(), L[:, 1].copy()

    def corners(self) -> np.ndarray:
        """The four vertices, counterclockwise for det L > 0."""
        signs = np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
        return self.map.apply(signs)

    def area(self) -> float:
        return 4.0 * abs(self.map.det())

    def to_json(self) -> dict:
        return self.map.to_json()

    @staticmethod
    def from_json(obj: dict) -> "Parallelogram":
        return Parallelogram(AffineMap2.from_json(obj))


def width(omega: Parallelogram) -> float:
    """Shorter of the two distances between opposite sides."""
    det = abs(omega.map.det())
    if det == 0.0:
        raise DegenerateParallelogram("zero-area parallelogram")
    u, v = omega.half_edges
    return 2.0 * det / max(float(np.hypot(*u)), float(np.hypot(*v)))


def dilate(omega: Parallelogram, c: float) -> Parallelogram:
    """Scale the half-edges by c about the center."""
    if c <= 0:
        raise ValueError("dilation factor must be positive")
    return Parallelogram.from_arrays(omega.map.L * c, omega.map.b)


def contains(omega: Parallelogram, xi, slack: float = _CONTAIN_EPS):
    """Boundary-inclusive membership; accepts a point or a stack of points."""
    inv = omega.map.inverse()
    u = inv.apply(xi)
    inside = np.max(np.abs(u), axis=-1) <= 1.0 + slack
    if np.ndim(inside) == 0:
        return bool(inside)
    return inside


def contains_many(omegas: list[Parallelogram], pts: np.ndarray) -> np.ndarray:
    """Counts, per point, how many members of the family contain it."""
    pts = np.asarray(pts, dtype=float)
    counts = np.zeros(len(pts), dtype=np.int64)
    for om in omegas:
        counts += contains(om, pts)
    return counts


def bounding_box_in_frame(omega: Parallelogram, pts: np.ndarray) -> Parallelogram:
    """Smallest rectangle in omega's frame containing the given points."""
    inv = omega.map.inverse()
    u = inv.apply(pts)
    lo = u.min(axis=0)
    hi = u.max(axis=0)
    half = (hi - lo) / 2.0
    mid = (lo + hi) / 2.0
    frame_box = AffineMap2.from_arrays(np.diag(half), mid)
    return Parallelogram(omega.map.compose(frame_box))


def clip_to_square(poly_pts: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon against [-1,1]^2."""
    pts = [p for p in np.asarray(poly_pts, dtype=float)]
    for axis, sign in ((0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)):
        if not pts:
            return np.zeros((0, 2))
        nxt = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            fa = sign * a[axis] <= 1.0 + _CONTAIN_EPS
            fb = sign * b[axis] <= 1.0 + _CONTAIN_EPS
            if fa:
                nxt.append(a)
            if fa != fb:
                t = (1.0 / sign - a[axis]) / (b[axis] - a[axis])
                nxt.append(a + t * (b - a))
        pts = nxt
    return np.array(pts) if pts else np.zeros((0, 2))


def intersect_in_frame(om1: Parallelogram, om2: Parallelogram) -> Parallelogram | None:
    """Smallest rectangle in om2's frame containing om1 intersect om2.

    Returns None when the intersection is empty.
    """
    inv2 = om2.map.inverse()
    poly = inv2.apply(om1.corners())
    clipped = clip_to_square(poly)
    if len(clipped) == 0:
        return None
    lo = clipped.min(axis=0)
    hi = clipped.max(axis=0)
    if np.any(hi - lo <= 0):
        return None
    half = (hi - lo) / 2.0
    mid = (lo + hi) / 2.0
    frame_box = AffineMap2.from_arrays(np.diag(half), mid)
    return Parallelogram(om2.map.compose(frame_box))

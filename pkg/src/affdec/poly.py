"""Dense-coefficient bivariate and univariate polynomial arithmetic.

Coefficients are held in a map keyed by exponent pairs; all arithmetic is
exact at the coefficient level up to floating round-off.  The range
enclosure converts to the Bernstein basis on a target box and refines by
branch-and-bound subdivision, so the returned bounds are certified: they
always contain the true range, and converge to it within the requested
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _backend
from .errors import BudgetExceeded, OracleMissingDerivative, ZeroPolynomial
from .geometry import AffineMap2, Parallelogram

DEFAULT_ENCLOSURE_BOXES = 20000


def _canonical(coeffs: dict) -> dict:
    out = {}
    for (a1, a2), c in coeffs.items():
        c = float(c)
        if c != 0.0:
            if not math.isfinite(c):
                raise ValueError("non-finite coefficient")
            out[(int(a1), int(a2))] = c
    return out


@dataclass(frozen=True)
class Poly2:
    """Real polynomial in two variables, dense map from exponent pair to coefficient."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _canonical(self.coeffs))

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_terms(*terms: tuple[int, int, float]) -> "Poly2":
        return Poly2({(a1, a2): c for a1, a2, c in terms})

    @staticmethod
    def zero() -> "Poly2":
        return Poly2({})

    @staticmethod
    def constant(c: float) -> "Poly2":
        return Poly2({(0, 0): c})

    # -- basic queries ------------------------------------------------
    @property
    def degree(self) -> int:
        """Maximal total degree of the stored terms; 0 for the zero polynomial."""
        if not self.coeffs:
            return 0
        return max(a1 + a2 for a1, a2 in self.coeffs)

    @property
    def max_degree(self) -> int:
        return self.degree

    def is_zero(self) -> bool:
        return not self.coeffs

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        keys = sorted(self.coeffs)
        e1 = np.array([k[0] for k in keys], dtype=np.int64)
        e2 = np.array([k[1] for k in keys], dtype=np.int64)
        c = np.array([self.coeffs[k] for k in keys], dtype=float)
        return e1, e2, c

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "Poly2") -> "Poly2":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return Poly2(out)

    def __sub__(self, other: "Poly2") -> "Poly2":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) - c
        return Poly2(out)

    def __neg__(self) -> "Poly2":
        return Poly2({k: -c for k, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Poly2({k: c * other for k, c in self.coeffs.items()})
        out: dict = {}
        for (a1, a2), c in self.coeffs.items():
            for (b1, b2), d in other.coeffs.items():
                k = (a1 + b1, a2 + b2)
                out[k] = out.get(k, 0.0) + c * d
        return Poly2(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly2) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly2(0)"
        parts = [f"{c:g}*x^{a1}y^{a2}" for (a1, a2), c in sorted(self.coeffs.items())]
        return "Poly2(" + " + ".join(parts) + ")"

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        terms = [{"a1": a1, "a2": a2, "c": c}
                 for (a1, a2), c in sorted(self.coeffs.items())]
        return {"degree": self.degree, "terms": terms}

    @staticmethod
    def from_json(obj: dict) -> "Poly2":
        return Poly2({(t["a1"], t["a2"]): t["c"] for t in obj["terms"]})

    def dense_array(self) -> np.ndarray:
        """Coefficient matrix a[k, l] for x^k y^l, shape (d1+1, d2+1)."""
        if not self.coeffs:
            return np.zeros((1, 1))
        d1 = max(k[0] for k in self.coeffs)
        d2 = max(k[1] for k in self.coeffs)
        a = np.zeros((d1 + 1, d2 + 1))
        for (a1, a2), c in self.coeffs.items():
            a[a1, a2] = c
        return a


def eval2(p: Poly2, xi) -> float | np.ndarray:
    """Evaluate p at a point (2,) or a stack of points (..., 2)."""
    xi = np.asarray(xi, dtype=float)
    if p.is_zero():
        return 0.0 if xi.ndim == 1 else np.zeros(xi.shape[:-1])
    e1, e2, c = p._arrays
    scalar = xi.ndim == 1
    pts = xi.reshape(-1, 2)
    out = _backend.eval2_many(e1, e2, c, pts[:, 0], pts[:, 1])
    if scalar:
        return float(out[0])
    return out.reshape(xi.shape[:-1])


def eval2_xy(p: Poly2, x, y):
    """Evaluate p on broadcast x, y arrays (same shape)."""
    x = np.asarray(x, dtype=float)
    if p.is_zero():
        return np.zeros_like(x)
    e1, e2, c = p._arrays
    return _backend.eval2_many(e1, e2, c, x.ravel(),
                               np.asarray(y, dtype=float).ravel()).reshape(x.shape)


def coeff_norm(p: Poly2) -> float:
    """max over stored |c_alpha|; 0 for the zero polynomial."""
    if not p.coeffs:
        return 0.0
    return max(abs(c) for c in p.coeffs.values())


def derivative(p: Poly2, alpha: tuple[int, int]) -> Poly2:
    """Exact coefficient-level partial derivative d^alpha p."""
    a1, a2 = alpha
    out = {}
    for (k1, k2), c in p.coeffs.items():
        if k1 < a1 or k2 < a2:
            continue
        f = 1.0
        for j in range(k1 - a1 + 1, k1 + 1):
            f *= j
        for j in range(k2 - a2 + 1, k2 + 1):
            f *= j
        out[(k1 - a1, k2 - a2)] = c * f
    return Poly2(out)


def gradient(p: Poly2) -> tuple[Poly2, Poly2]:
    return derivative(p, (1, 0)), derivative(p, (0, 1))


def hessian_det(p: Poly2) -> Poly2:
    """det D^2 p = p_11 p_22 - p_12^2, exact in coefficients."""
    p11 = derivative(p, (2, 0))
    p22 = derivative(p, (0, 2))
    p12 = derivative(p, (1, 1))
    return p11 * p22 - p12 * p12


def compose_affine(p: Poly2, t: AffineMap2) -> Poly2:
    """Exact expansion of p(t(xi))."""
    if p.is_zero():
        return p
    (l00, l01), (l10, l11) = t.linear
    b0, b1 = t.shift
    lx = Poly2({(1, 0): l00, (0, 1): l01, (0, 0): b0})
    ly = Poly2({(1, 0): l10, (0, 1): l11, (0, 0): b1})
    d1 = max(k[0] for k in p.coeffs)
    d2 = max(k[1] for k in p.coeffs)
    powx = [Poly2.constant(1.0)]
    for _ in range(d1):
        powx.append(powx[-1] * lx)
    powy = [Poly2.constant(1.0)]
    for _ in range(d2):
        powy.append(powy[-1] * ly)
    out = Poly2.zero()
    for (a1, a2), c in p.coeffs.items():
        out = out + powx[a1] * powy[a2] * c
    return out


def recentred(phi: Poly2, t_omega: AffineMap2) -> Poly2:
    """phi composed with t_omega, with value and gradient at the origin removed.

    The result has exactly zero constant and linear coefficients.
    """
    q = compose_affine(phi, t_omega)
    out = dict(q.coeffs)
    for k in ((0, 0), (1, 0), (0, 1)):
        out.pop(k, None)
    return Poly2(out)


def normalize(psi: Poly2) -> tuple[Poly2, float]:
    """(psi / ||psi||, ||psi||); raises ZeroPolynomial on the zero input."""
    s = coeff_norm(psi)
    if s == 0.0:
        raise ZeroPolynomial("cannot normalize the zero polynomial")
    return psi * (1.0 / s), s


@dataclass(frozen=True)
class RangeEnclosure:
    """Certified bounds: lower <= min P and max P <= upper on the queried box."""

    lower: float
    upper: float
    boxes_used: int = 0

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("invalid enclosure")

    def abs_bounds(self) -> "RangeEnclosure":
        """Enclosure of |P| given this enclosure of P."""
        lo, hi = self.lower, self.upper
        if lo >= 0:
            return RangeEnclosure(lo, hi, self.boxes_used)
        if hi <= 0:
            return RangeEnclosure(-hi, -lo, self.boxes_used)
        return RangeEnclosure(0.0, max(-lo, hi), self.boxes_used)


def range_enclosure(p: Poly2, box: Parallelogram, tol: float,
                    max_boxes: int = DEFAULT_ENCLOSURE_BOXES) -> RangeEnclosure:
    """Certified range of p over the parallelogram.

    Adaptive Bernstein subdivision: the enclosure width exceeds the true
    range by at most tol.  Raises BudgetExceeded when the subdivision cap
    is hit before reaching tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.is_zero():
        return RangeEnclosure(0.0, 0.0, 0)
    # reparameterize to [0,1]^2: u -> box(2u - 1)
    to_unit = box.map.compose(AffineMap2(((2.0, 0.0), (0.0, 2.0)), (-1.0, -1.0)))
    q = compose_affine(p, to_unit)
    if q.is_zero():
        return RangeEnclosure(0.0, 0.0, 0)
    arr = q.dense_array()
    lo, hi, used, ok = _backend.enclose01(arr, tol / 2.0, max_boxes)
    if not ok:
        raise BudgetExceeded(
            f"enclosure used {used} boxes without reaching tol={tol:g}")
    return RangeEnclosure(float(lo), float(hi), int(used))


def abs_range(p: Poly2, box: Parallelogram, tol: float,
              max_boxes: int = DEFAULT_ENCLOSURE_BOXES) -> RangeEnclosure:
    """Certified range of |p| over the parallelogram."""
    return range_enclosure(p, box, tol, max_boxes).abs_bounds()


def taylor2(derivative_oracle, center, degree: int) -> Poly2:
    """Degree-d expansion from exact partial derivatives at the center.

    derivative_oracle(beta) must return d^beta phi(center) for every
    multi-index with |beta| <= degree.
    """
    cx, cy = float(center[0]), float(center[1])
    terms = {}
    for b1 in range(degree + 1):
        for b2 in range(degree + 1 - b1):
            try:
                val = derivative_oracle((b1, b2))
            except (KeyError, IndexError) as exc:
                raise OracleMissingDerivative(f"missing derivative {(b1, b2)}") from exc
            if val is None:
                raise OracleMissingDerivative(f"missing derivative {(b1, b2)}")
            terms[(b1, b2)] = float(val) / (math.factorial(b1) * math.factorial(b2))
    shifted = Poly2(terms)
    # substitute u = xi - center
    return compose_affine(shifted, AffineMap2.translation((-cx, -cy)))


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Poly1:
    """Real polynomial in one variable; coeffs[k] multiplies x^k."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        while c and c[-1] == 0.0:
            c.pop()
        if any(not math.isfinite(v) for v in c):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", tuple(c))

    @staticmethod
    def from_coeffs(coeffs) -> "Poly1":
        return Poly1(tuple(coeffs))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c in reversed(self.coeffs):
            out = out * x + c
        if x.ndim == 0:
            return float(out)
        return out

    def derivative(self) -> "Poly1":
        return Poly1(tuple(k * c for k, c in enumerate(self.coeffs) if k >= 1))

    def norm(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def scale(self, s: float) -> "Poly1":
        return Poly1(tuple(c * s for c in self.coeffs))

    def compose_affine(self, a: float, b: float) -> "Poly1":
        """Expansion of p(a x + b)."""
        out = [0.0]
        lin = (b, a)
        power = [1.0]
        for c in self.coeffs:
            for k, pk in enumerate(power):
                if k >= len(out):
                    out.append(0.0)
                out[k] += c * pk
            # power <- power * (b + a x)
            nxt = [0.0] * (len(power) + 1)
            for k, pk in enumerate(power):
                nxt[k] += pk * lin[0]
                nxt[k + 1] += pk * lin[1]
            power = nxt
        return Poly1(tuple(out))

    def as_poly2_x(self) -> Poly2:
        """View as a bivariate polynomial in the first variable."""
        return Poly2({(k, 0): c for k, c in enumerate(self.coeffs)})

    def as_poly2_y(self) -> Poly2:
        return Poly2({(0, k): c for k, c in enumerate(self.coeffs)})

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs)}

    @staticmethod
    def from_json(obj: dict) -> "Poly1":
        return Poly1(tuple(obj["coeffs"]))


def poly1_from_poly2_on_axis(p: Poly2) -> Poly1:
    """Restrict a bivariate polynomial to the first axis (set y = 0)."""
    d = max((k[0] for k in p.coeffs), default=0)
    c = [0.0] * (d + 1)
    for (a1, a2), v in p.coeffs.items():
        if a2 == 0:
            c[a1] = v
    return Poly1(tuple(c))

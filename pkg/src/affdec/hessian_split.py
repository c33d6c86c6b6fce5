"""Rotation split of a polynomial with small Hessian determinant.

Finds a rotation rho and a decomposition P = A o rho + r B o rho where A
depends only on the rotated first coordinate, ||B|| = 1 and r = ||residual||
is as small as the one-parameter family allows.  With ||det D^2 P|| <= nu,
the residual is expected to be nu^alpha for some alpha in (0, 1]; the
achieved exponent log||r|| / log nu is reported rather than asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AffineMap2
from .poly import Poly1, Poly2, coeff_norm, compose_affine, poly1_from_poly2_on_axis

GRID_ANGLES = 720
REFINE_TOL = 1e-10
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SplitResult:
    """P = A o rho_theta + residual_norm * B o rho_theta with A one-dimensional."""

    theta: float
    A: Poly1
    B: Poly2
    residual_norm: float
    achieved_alpha: float
    nu: float

    def reconstruct(self) -> Poly2:
        rho = AffineMap2.rotation(self.theta)
        a2 = compose_affine(self.A.as_poly2_x(), rho)
        if self.residual_norm == 0.0:
            return a2
        return a2 + compose_affine(self.B, rho) * self.residual_norm

    def to_json(self) -> dict:
        return {"theta": self.theta,
                "A": self.A.to_json(),
                "B": self.B.to_json(),
                "residual_norm": self.residual_norm,
                "achieved_alpha": self.achieved_alpha,
                "nu": self.nu}


def _residual_parts(p: Poly2, theta: float) -> tuple[Poly1, Poly2]:
    """Split p o rho_theta^{-1} into its one-dimensional part and the rest."""
    q = compose_affine(p, AffineMap2.rotation(-theta))
    a = poly1_from_poly2_on_axis(q)
    rest = Poly2({k: c for k, c in q.coeffs.items() if k[1] != 0})
    return a, rest


def _residual_norm(p: Poly2, theta: float) -> float:
    _, rest = _residual_parts(p, theta)
    return coeff_norm(rest)


def split_small_hessian(p: Poly2, nu: float,
                        n_angles: int = GRID_ANGLES) -> SplitResult:
    """Best rotation split found by a grid search refined by golden section.

    Preconditions: ||p|| <= 1 up to round-off and no constant/linear terms
    (recentre first); 0 < nu < 1.
    """
    if not (0.0 < nu < 1.0):
        raise ValueError("nu must lie in (0, 1)")
    for k in ((0, 0), (1, 0), (0, 1)):
        if k in p.coeffs:
            raise ValueError("polynomial must be recentred (no constant/linear terms)")
    if coeff_norm(p) > 1.0 + 1e-9:
        raise ValueError("polynomial must be bounded: ||p|| <= 1")

    thetas = np.linspace(0.0, math.pi, n_angles, endpoint=False)
    vals = np.array([_residual_norm(p, t) for t in thetas])
    best = int(np.argmin(vals))  # first index wins ties: smallest theta

    # golden-section refinement around the best grid angle
    step = math.pi / n_angles
    lo, hi = thetas[best] - step, thetas[best] + step
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = _residual_norm(p, c), _residual_norm(p, d)
    while hi - lo > REFINE_TOL:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = _residual_norm(p, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = _residual_norm(p, d)
    theta = 0.5 * (lo + hi)
    if _residual_norm(p, thetas[best]) <= _residual_norm(p, theta):
        theta = float(thetas[best])
    theta = float(theta % math.pi)

    a, rest = _residual_parts(p, theta)
    r = coeff_norm(rest)
    if r <= 1e-14 * max(coeff_norm(p), 1e-300):  # round-off level: exact split
        return SplitResult(theta, a, Poly2.zero(), 0.0, math.inf, nu)
    b = rest * (1.0 / r)
    alpha = math.log(r) / math.log(nu)
    return SplitResult(theta, a, b, r, alpha, nu)

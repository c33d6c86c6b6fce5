"""Admissibility of parallelograms for a surface, and the induction quantity H.

A piece is admissible when either (flat case) the surface deviates from its
tangent plane by O(1/R) after renormalization, or (curved case) the
renormalized Hessian determinant is comparable to 1 on the unit square.
All sups and infs entering the verdict are certified by Bernstein range
enclosures, and every verdict records its measured witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EnclosureTooLoose
from .geometry import Parallelogram, contains, dilate
from .poly import (Poly2, abs_range, coeff_norm, derivative, eval2,
                   hessian_det, normalize, range_enclosure, recentred)

FLAT = "FlatAdmissible"
CURVED = "CurvedAdmissible"
NOT = "NotAdmissible"

UNIT_SQUARE = Parallelogram.unit_square()


@dataclass(frozen=True)
class AdmissibilityConstants:
    """Thresholds hiding behind the comparabilities in the admissibility test.

    The eps-dependent windows are c4 = c4_scale * eps^2, C4 = C4_scale / eps^2,
    C5 = C5_scale / eps^2.  det_sup_hint, when set, widens the upper Hessian
    window at the top band sigma ~ 1, where the determinant of a bounded
    polynomial is only comparable to 1 with a degree-dependent constant.
    """

    c1: float = 16.0
    c2: float = 32.0
    c3_lo: float = 0.25
    c3_hi: float = 4.0
    c4_scale: float = 1e-2
    C4_scale: float = 1e2
    C5_scale: float = 1e2
    containment_slack: float = 1.5
    det_sup_hint: float | None = None

    def c4(self, eps: float) -> float:
        return self.c4_scale * eps * eps

    def C4(self, eps: float) -> float:
        return self.C4_scale / (eps * eps)

    def C5(self, eps: float) -> float:
        return self.C5_scale / (eps * eps)

    def det_window(self, sigma: float) -> tuple[float, float]:
        lo = self.c3_lo * sigma
        hi = self.c3_hi * sigma
        if sigma >= 0.5 and self.det_sup_hint is not None:
            hi = max(hi, 1.05 * self.det_sup_hint)
        return lo, hi

    def to_json(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "c3_lo": self.c3_lo,
                "c3_hi": self.c3_hi, "c4_scale": self.c4_scale,
                "C4_scale": self.C4_scale, "C5_scale": self.C5_scale,
                "containment_slack": self.containment_slack,
                "det_sup_hint": self.det_sup_hint}

    @staticmethod
    def from_json(obj: dict) -> "AdmissibilityConstants":
        return AdmissibilityConstants(**obj)


@dataclass(frozen=True)
class AdmissibilityVerdict:
    klass: str
    witnesses: dict = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return self.klass in (FLAT, CURVED)

    def to_json(self) -> dict:
        return {"class": self.klass, "witnesses": self.witnesses}

    @staticmethod
    def from_json(obj: dict) -> "AdmissibilityVerdict":
        return AdmissibilityVerdict(obj["class"], obj["witnesses"])


def in_neighborhood(phi: Poly2, region, delta: float, point) -> bool:
    """Is (xi, eta) inside the vertical delta-neighborhood of the graph over region?"""
    if delta <= 0:
        raise ValueError("delta must be positive")
    xi = np.asarray(point[:2], dtype=float)
    eta = float(point[2]) if len(point) == 3 else float(point[-1])
    if isinstance(region, Parallelogram):
        region = [region]
    if not any(contains(om, xi) for om in region):
        return False
    return abs(eta - eval2(phi, xi)) < delta


def certified_sup_le(p: Poly2, box: Parallelogram, threshold: float,
                     absolute: bool = True, retries: int = 3) -> tuple[bool, float]:
    """Certified decision sup |p| <= threshold (or sup p if absolute=False).

    Returns (decision, certified sup bound).  Raises EnclosureTooLoose when
    the truth sits inside the tolerance window after all retries.
    """
    tol = max(abs(threshold), 1e-12) * 1e-3
    for _ in range(retries + 1):
        enc = range_enclosure(p, box, tol)
        if absolute:
            enc = enc.abs_bounds()
        if enc.upper <= threshold:
            return True, enc.upper
        if enc.upper - tol > threshold:
            return False, enc.upper
        tol /= 16.0
    raise EnclosureTooLoose(
        f"sup straddles threshold {threshold:g} within tolerance")


def certified_inf_ge(p: Poly2, box: Parallelogram, threshold: float,
                     absolute: bool = True, retries: int = 3) -> tuple[bool, float]:
    """Certified decision inf |p| >= threshold (or inf p if absolute=False)."""
    tol = max(abs(threshold), 1e-12) * 1e-3
    for _ in range(retries + 1):
        enc = range_enclosure(p, box, tol)
        if absolute:
            enc = enc.abs_bounds()
        if enc.lower >= threshold:
            return True, enc.lower
        if enc.lower + tol < threshold:
            return False, enc.lower
        tol /= 16.0
    raise EnclosureTooLoose(
        f"inf straddles threshold {threshold:g} within tolerance")


def second_third_derivative_sum_sup(p: Poly2, box: Parallelogram,
                                    tol: float = 1e-6) -> float:
    """Upper bound for sup of sum_{|a|=2,3} |d^a p| over the box."""
    total = 0.0
    for a1 in range(4):
        for a2 in range(4 - a1):
            if a1 + a2 in (2, 3):
                d = derivative(p, (a1, a2))
                if not d.is_zero():
                    total += abs_range(d, box, tol).upper
    return total


def check_containment(omega: Parallelogram, slack: float) -> bool:
    """All corners of omega inside (1 + slack)[-1,1]^2."""
    return bool(np.all(np.abs(omega.corners()) <= 1.0 + slack + 1e-12))


def check_admissible(phi: Poly2, omega: Parallelogram, sigma: float, R: float,
                     consts: AdmissibilityConstants | None = None,
                     eps: float = 0.25) -> AdmissibilityVerdict:
    """Classify a parallelogram as curved-admissible, flat-admissible, or neither.

    Curved admissibility is tested first: on the paraboloid at sigma = 1 both
    cases can hold and the curved classification is the informative one.
    """
    consts = consts or AdmissibilityConstants()
    if not (R >= 1.0):
        raise ValueError("R must be >= 1")
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1]")
    if not check_containment(omega, consts.containment_slack):
        raise ValueError("parallelogram exceeds the allowed containment slack")

    det = hessian_det(phi)
    two_omega = dilate(omega, 2.0)
    det_enc = range_enclosure(det, two_omega, max(sigma, 1e-12) * 1e-3).abs_bounds()
    phi_t = recentred(phi, omega.map)
    s = coeff_norm(phi_t)

    witnesses = {
        "sigma": sigma,
        "R": R,
        "det_abs_lo_2omega": det_enc.lower,
        "det_abs_hi_2omega": det_enc.upper,
        "phi_t_norm": s,
    }

    # curved case: |det D^2 phi| ~ sigma on 2*omega and the renormalized
    # surface has Hessian determinant ~ 1 with bounded 2nd/3rd derivatives.
    # Window comparisons are strict: equality sits on the comparability edge.
    lo, hi = consts.det_window(sigma)
    if s > 0 and det_enc.lower > lo and det_enc.upper < hi:
        phi_bar = phi_t * (1.0 / s)
        det_bar = hessian_det(phi_bar)
        bar_enc = range_enclosure(det_bar, UNIT_SQUARE,
                                  max(consts.c4(eps), 1e-12) * 1e-2).abs_bounds()
        dsum = second_third_derivative_sum_sup(phi_bar, UNIT_SQUARE)
        witnesses["det_bar_lo"] = bar_enc.lower
        witnesses["det_bar_hi"] = bar_enc.upper
        witnesses["deriv23_sum_sup"] = dsum
        if (bar_enc.lower >= consts.c4(eps) and bar_enc.upper <= consts.C4(eps)
                and dsum <= consts.C5(eps)):
            return AdmissibilityVerdict(CURVED, witnesses)

    # flat case: small determinant band and 1/R-flat after recentering.
    if det_enc.upper <= consts.c1 * sigma and s <= consts.c2 / R:
        return AdmissibilityVerdict(FLAT, witnesses)

    return AdmissibilityVerdict(NOT, witnesses)


@dataclass(frozen=True)
class HQuantity:
    """Certified infimum of |det D^2 phi_bar| plus the scaling surrogate."""

    value: float
    surrogate: float
    phi_t_norm: float

    def to_json(self) -> dict:
        return {"value": self.value, "surrogate": self.surrogate,
                "phi_t_norm": self.phi_t_norm}


def h_quantity(phi: Poly2, omega: Parallelogram, sigma: float,
               tol: float = 1e-9) -> HQuantity:
    """Induction quantity H: certified inf over [-1,1]^2 of |det D^2 phi_bar|.

    Also returns the surrogate ||phi_T||^{-2} |det T|^2 sigma for cross-logging;
    the two are comparable with a degree-dependent constant.
    """
    phi_t = recentred(phi, omega.map)
    phi_bar, s = normalize(phi_t)  # raises ZeroPolynomial on a flat piece
    det_bar = hessian_det(phi_bar)
    if det_bar.is_zero():
        value = 0.0
    else:
        scale = max(coeff_norm(det_bar), 1e-300)
        enc = range_enclosure(det_bar, UNIT_SQUARE, scale * tol).abs_bounds()
        value = enc.lower
    det_t = abs(omega.map.det())
    surrogate = (det_t * det_t) * sigma / (s * s)
    return HQuantity(value=value, surrogate=surrogate, phi_t_norm=s)

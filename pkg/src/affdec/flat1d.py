"""Flat partitions of an interval for univariate polynomials.

An interval I is delta-flat for P when P deviates from every tangent line
based in I by at most delta:

    sup_{x, x' in I} |P(x) - P(x') - P'(x')(x - x')| <= delta.

The partition is built by recursive bisection on the certified defect; a
split only happens when the parent defect exceeds delta, which bounds every
emitted length below by a multiple of delta^{1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotBounded
from .geometry import Parallelogram
from .poly import Poly1, Poly2, range_enclosure

DOMAIN = (-2.0, 2.0)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    stop: bool = False

    @property
    def length(self) -> float:
        return self.b - self.a

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "stop": self.stop}


@dataclass(frozen=True)
class IntervalPartition:
    """Ordered cover of a base interval by delta-flat pieces."""

    intervals: tuple
    delta: float
    domain: tuple = DOMAIN
    provenance: tuple = field(default_factory=tuple)

    def lengths(self) -> np.ndarray:
        return np.array([iv.length for iv in self.intervals])

    def to_json(self) -> dict:
        return {"delta": self.delta,
                "domain": list(self.domain),
                "intervals": [iv.to_json() for iv in self.intervals]}

    @staticmethod
    def from_json(obj: dict) -> "IntervalPartition":
        ivs = tuple(Interval(t["a"], t["b"], t.get("stop", False))
                    for t in obj["intervals"])
        return IntervalPartition(ivs, obj["delta"], tuple(obj.get("domain", DOMAIN)))


def tangent_gap(p: Poly1) -> Poly2:
    """Bivariate polynomial D(x, x') = P(x) - P(x') - P'(x')(x - x')."""
    px = p.as_poly2_x()
    py = {(0, k): c for k, c in enumerate(p.coeffs)}
    dp = p.derivative()
    dpy = {(0, k): c for k, c in enumerate(dp.coeffs)}
    d = px - Poly2(py)
    d = d - Poly2({(a1 + 1, a2): c for (a1, a2), c in dpy.items()})
    d = d + Poly2({(a1, a2 + 1): c for (a1, a2), c in dpy.items()})
    return d


def flatness_defect(p: Poly1, interval: tuple[float, float],
                    tol: float | None = None) -> float:
    """Certified upper bound of the tangent-line defect of p on the interval."""
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        if b == a:
            return 0.0
        raise ValueError("empty interval")
    if p.degree <= 1:
        return 0.0
    d = tangent_gap(p)
    box = Parallelogram.box(a, b, a, b)
    scale = max(p.norm(), 1e-300) * (b - a) ** 2
    if tol is None:
        tol = scale * 1e-4
    enc = range_enclosure(d, box, tol, max_boxes=200000).abs_bounds()
    return enc.upper


def flat_partition(p: Poly1, delta: float,
                   domain: tuple[float, float] = DOMAIN,
                   norm_bound: float = 1.0 + 1e-9) -> IntervalPartition:
    """Partition the domain into certified delta-flat intervals.

    Requires ||p|| <= 1 (callers pre-normalize and rescale delta).  Bisection:
    an interval is split only when its certified defect exceeds delta, so
    every emitted length is at least (2 delta / sup|P''|)^{1/2} / 2.
    """
    if not (0.0 < delta):
        raise ValueError("delta must be positive")
    if p.norm() > norm_bound:
        raise NotBounded(f"coefficient norm {p.norm():g} exceeds 1")
    lo, hi = float(domain[0]), float(domain[1])
    if delta >= 1.0 or p.degree <= 1:
        if flatness_defect(p, (lo, hi)) <= delta * (1.0 + 1e-9):
            return IntervalPartition((Interval(lo, hi),), delta, (lo, hi),
                                     ("trivial",))
    gap = tangent_gap(p)
    out: list[Interval] = []
    log: list[str] = []
    # decision-scale tolerance: the defect polynomial vanishes on the whole
    # diagonal, so a tolerance much below delta makes its min side expensive.
    tol = max(delta * 1e-2, 1e-15)

    def defect(a: float, b: float) -> float:
        box = Parallelogram.box(a, b, a, b)
        return range_enclosure(gap, box, tol, max_boxes=200000).abs_bounds().upper

    # threshold has a hair of slack so exactly-critical lengths are accepted;
    # the independent grid oracle allows defect <= 1.01 delta.
    accept = delta * (1.0 + 1e-4) + tol

    def build(a: float, b: float, depth: int):
        if depth > 60:
            raise RecursionError("flat partition bisection too deep")
        if defect(a, b) <= accept:
            out.append(Interval(a, b))
            return
        mid = 0.5 * (a + b)
        log.append(f"split {a:.17g}:{b:.17g}")
        build(a, mid, depth + 1)
        build(mid, b, depth + 1)

    build(lo, hi, 0)
    out.sort(key=lambda iv: iv.a)
    return IntervalPartition(tuple(out), delta, (lo, hi), tuple(log))


def merge_to_min_width(part: IntervalPartition, w_min: float) -> IntervalPartition:
    """Greedy left-to-right merge until every interval has length >= w_min.

    Merged intervals are flagged stop: they lose the delta-flat guarantee.
    A trailing run shorter than w_min is merged backward into the previous
    interval so no emitted length ever falls below w_min.
    """
    if w_min <= 0:
        raise ValueError("w_min must be positive")
    ivs = list(part.intervals)
    if not ivs:
        return part
    out: list[Interval] = []
    i = 0
    while i < len(ivs):
        a = ivs[i].a
        b = ivs[i].b
        stop = ivs[i].stop
        j = i + 1
        while b - a < w_min and j < len(ivs):
            b = ivs[j].b
            stop = True
            j += 1
        if b - a < w_min and out:
            prev = out.pop()
            out.append(Interval(prev.a, b, True))
        else:
            out.append(Interval(a, b, stop))
        i = j
    return IntervalPartition(tuple(out), part.delta, part.domain,
                             part.provenance + (f"merged to {w_min:g}",))

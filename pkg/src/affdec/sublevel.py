"""Covers of the square by parallelograms on which a polynomial is dyadically
constant or uniformly tiny.

The cover machinery stratifies |P| into factor-8 value bands.  Each band is
covered by maximal chord-aligned rectangles along traced level curves, each
rectangle carrying a certified range of |P| on its double inside the band's
dyadic window.  Values below max(kappa/R, R^-6) collapse into width ~ 1/R
rectangles along the zero set (case b) or, when everything is tiny, into
case-c pieces at the bottom band.  Where the gradient of P varies too much
for level tracing, the construction recurses on the partial derivatives and
intersects their covers, exactly once per needed refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (BudgetExceeded, GradientHypothesisFails,
                     RecursionDepthExceeded)
from .geometry import (AffineMap2, Parallelogram, contains, dilate,
                       intersect_in_frame, width)
from .poly import (Poly2, coeff_norm, derivative, eval2, gradient,
                   range_enclosure)

UNIT_SQUARE = Parallelogram.unit_square()


def dyadic_floor(x: float) -> float:
    if x <= 0:
        raise ValueError("dyadic of non-positive value")
    return 2.0 ** math.floor(math.log2(x))


def dyadic_nearest(x: float) -> float:
    if x <= 0:
        raise ValueError("dyadic of non-positive value")
    return 2.0 ** round(math.log2(x))


@dataclass(frozen=True)
class CoverConfig:
    """Tuning knobs of the cover construction; defaults match the test suite."""

    window_c: float = 8.0        # certified |P| on a double stays in [s/C, Cs]
    slice_ratio: float = 8.0     # value-band ladder step
    grad_ratio2: float = 80.0    # max certified ratio of |grad P|^2 before recursing
    b_threshold: float = 2.0     # low cover holds |P| < b_threshold * kappa / R
    b_sup_c: float = 6.0         # certified sup on low-cover doubles <= this * delta
    overlap_frac: float = 0.05   # consecutive rectangles share this arclength fraction
    seed_grid: int = 96          # sign-change seeding resolution per region
    max_layers: int = 48         # adaptive level-curve passes per region
    max_depth: int = 6           # derivative recursion cap
    max_pieces: int = 30000
    enclosure_tol_frac: float = 5e-3
    coverage_grid: int = 128     # per-region residual check resolution

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class CoverPiece:
    omega: Parallelogram
    sigma: float                 # dyadic band label in original |P| units
    case: str                    # 'a' | 'b' | 'c'
    cert_lo: float = 0.0         # certified |P| range over the double
    cert_hi: float = 0.0

    def to_json(self) -> dict:
        return {"parallelogram": self.omega.to_json(), "sigma": self.sigma,
                "case": self.case, "cert_lo": self.cert_lo,
                "cert_hi": self.cert_hi}


@dataclass
class SublevelCover:
    source: Poly2
    R: float
    eps: float
    norm: float
    bottom: float
    pieces: list

    @property
    def families(self) -> dict:
        fam: dict = {}
        for p in self.pieces:
            fam.setdefault(p.sigma, []).append(p)
        return dict(sorted(fam.items()))

    def to_json(self) -> dict:
        fams = {}
        for s, ps in self.families.items():
            fams[repr(s)] = [{"parallelogram": p.omega.to_json(), "case": p.case}
                             for p in ps]
        return {"R": self.R, "eps": self.eps, "families": fams}


# ---------------------------------------------------------------------------
# certified helpers
# ---------------------------------------------------------------------------

def _range_on(p: Poly2, box: Parallelogram, tol: float):
    return range_enclosure(p, box, tol, max_boxes=60000).abs_bounds()


def _grad_eval(px: Poly2, py: Poly2, pt) -> np.ndarray:
    return np.array([eval2(px, pt), eval2(py, pt)])


# ---------------------------------------------------------------------------
# level-curve tracing
# ---------------------------------------------------------------------------

def _trace_level(u: Poly2, px: Poly2, py: Poly2, region: Parallelogram,
                 level: float, seeds: np.ndarray, step: float,
                 max_steps: int = 4000) -> list[np.ndarray]:
    """March level curves {u = level} inside (an enlargement of) the region."""
    inv = region.map.inverse()
    curves: list[np.ndarray] = []
    used = np.zeros(len(seeds), dtype=bool)

    def inside(pt) -> bool:
        return bool(np.max(np.abs(inv.apply(pt))) <= 1.10)

    def correct(pt):
        for _ in range(6):
            g = _grad_eval(px, py, pt)
            g2 = float(g @ g)
            if g2 < 1e-28:
                return None
            r = float(eval2(u, pt)) - level
            pt = pt - (r / g2) * g
            if abs(r) < 1e-13 * max(1.0, abs(level)):
                return pt
        r = float(eval2(u, pt)) - level
        if abs(r) < 1e-9 * max(1.0, abs(level)):
            return pt
        return None

    for si in range(len(seeds)):
        if used[si]:
            continue
        start = correct(seeds[si])
        if start is None or not inside(start):
            used[si] = True
            continue
        used[si] = True
        halves = []
        for direction in (1.0, -1.0):
            path = [start]
            pt = start
            ds = step
            for _ in range(max_steps):
                g = _grad_eval(px, py, pt)
                ng = float(np.hypot(*g))
                if ng < 1e-14:
                    break
                tangent = direction * np.array([g[1], -g[0]]) / ng
                nxt = correct(pt + ds * tangent)
                if nxt is None or float(np.hypot(*(nxt - pt))) > 2.5 * ds:
                    ds *= 0.5
                    if ds < step / 64:
                        break
                    continue
                ds = min(step, ds * 1.5)
                path.append(nxt)
                pt = nxt
                if not inside(pt):
                    break
                if len(path) > 4 and float(np.hypot(*(pt - start))) < 0.6 * step:
                    break  # closed loop
            halves.append(path)
        pts = np.array(halves[1][::-1] + halves[0][1:])
        if len(pts) >= 2:
            curves.append(pts)
            # retire seeds close to this curve
            for sj in range(len(seeds)):
                if not used[sj]:
                    d = np.min(np.hypot(*(pts - seeds[sj]).T))
                    if d < 1.5 * step:
                        used[sj] = True
    return curves


def _level_seeds(vals: np.ndarray, pts: np.ndarray, shape: tuple[int, int],
                 level: float, u: Poly2, px: Poly2, py: Poly2) -> np.ndarray:
    """Sign-change points of u - level along grid edges, bisected onto the level."""
    v = (vals - level).reshape(shape)
    p = pts.reshape(shape + (2,))
    seeds = []
    for (sa, sb) in (((slice(None), slice(None, -1)), (slice(None), slice(1, None))),
                     ((slice(None, -1), slice(None)), (slice(1, None), slice(None)))):
        mask = np.signbit(v[sa]) != np.signbit(v[sb])
        ia, ja = np.nonzero(mask)
        a = p[sa][mask]
        b = p[sb][mask]
        va = v[sa][mask]
        for k in range(len(a)):
            lo_pt, hi_pt = a[k], b[k]
            lo_v = va[k]
            for _ in range(30):
                mid = 0.5 * (lo_pt + hi_pt)
                vm = float(eval2(u, mid)) - level
                if (vm < 0) == (lo_v < 0):
                    lo_pt, lo_v = mid, vm
                else:
                    hi_pt = mid
            seeds.append(0.5 * (lo_pt + hi_pt))
    return np.array(seeds) if seeds else np.zeros((0, 2))


# ---------------------------------------------------------------------------
# rectangle placement along a polyline
# ---------------------------------------------------------------------------

def _chord_rect(pts: np.ndarray, i: int, j: int, h_n: float) -> Parallelogram | None:
    chord = pts[j] - pts[i]
    clen = float(np.hypot(*chord))
    if clen < 1e-15:
        return None
    t = chord / clen
    n = np.array([-t[1], t[0]])
    dev = (pts[i:j + 1] - pts[i]) @ n
    h_lo, h_hi = float(dev.min()), float(dev.max())
    center = 0.5 * (pts[i] + pts[j]) + n * 0.5 * (h_lo + h_hi)
    half_len = 0.5 * clen + h_n
    half_nrm = h_n + 0.5 * (h_hi - h_lo)
    return Parallelogram.from_arrays(
        np.column_stack([t * half_len, n * half_nrm]), center)


def _cover_polyline(pts: np.ndarray, h_n_at, cert, cfg: CoverConfig,
                    ell_guess: float, h_max: float | None = None,
                    h_min: float | None = None
                    ) -> list[tuple[Parallelogram, float, float]]:
    """Greedy maximal certified rectangles along a traced curve.

    Chord length grows exponentially until certification fails; failures at
    the minimal chord shrink the normal half-extent instead.
    """
    if len(pts) < 2:
        return []
    seg = np.hypot(*(np.diff(pts, axis=0).T))
    arclen = np.concatenate([[0.0], np.cumsum(seg)])
    total = arclen[-1]
    out = []
    i = 0
    ell = max(ell_guess, 4.0 * (total / max(len(pts) - 1, 1)))
    guard = 0
    while i < len(pts) - 1 and guard < 4 * len(pts) + 64:
        guard += 1
        h_n0 = h_n_at(pts[i])
        # fattest-first ladder, then one bisection step toward the true max
        best = None
        h_ok = None
        h_fail = None
        for f in (2.56, 1.6, 1.0, 0.55, 0.3):
            h_try = f * h_n0 if h_max is None else min(f * h_n0, h_max)
            if h_min is not None:
                h_try = max(h_try, h_min)
            if (h_ok is not None and h_try >= h_ok) or \
                    (h_fail is not None and h_try >= h_fail):
                continue
            got = _grow_chord(pts, arclen, i, ell, h_try, cert)
            if got is not None:
                best, h_ok = got, h_try
                break
            h_fail = h_try
        if best is None:
            i += 1
            continue
        j, rect, (lo, hi) = best
        out.append((rect, lo, hi))
        ell = max(arclen[j] - arclen[i], 4.0 * (total / max(len(pts) - 1, 1)))
        if j >= len(pts) - 1:
            break
        back = cfg.overlap_frac * (arclen[j] - arclen[i])
        i = max(int(np.searchsorted(arclen, arclen[j] - back)), i + 1)
    return out


def _grow_chord(pts, arclen, i, ell, h_n, cert):
    j = int(np.searchsorted(arclen, arclen[i] + ell))
    j = min(max(j, i + 1), len(pts) - 1)
    best = None
    grow = True
    for _ in range(40):
        rect = _chord_rect(pts, i, j, h_n)
        got = cert(rect) if rect is not None else None
        if got is not None:
            best = (j, rect, got)
            if not grow or j >= len(pts) - 1:
                break
            j_next = int(np.searchsorted(
                arclen, arclen[i] + 1.7 * (arclen[j] - arclen[i])))
            j = min(max(j_next, j + 1), len(pts) - 1)
        else:
            grow = False
            if best is not None:
                break
            j_next = int(np.searchsorted(
                arclen, arclen[i] + 0.55 * (arclen[j] - arclen[i])))
            if j_next >= j:
                j_next = j - 1
            j = max(j_next, i + 1)
            if j == i + 1:
                rect = _chord_rect(pts, i, j, h_n)
                got = cert(rect) if rect is not None else None
                if got is not None:
                    best = (j, rect, got)
                break
    return best


# ---------------------------------------------------------------------------
# the public zero-neighborhood cover
# ---------------------------------------------------------------------------

def zero_nbhd_cover(p: Poly2, omega0: Parallelogram, delta: float, kappa: float,
                    cfg: CoverConfig | None = None) -> list[Parallelogram]:
    """Rectangles covering {|p| < delta} inside omega0.

    Requires the certified gradient window |grad p| in [kappa/2, 2 kappa] on
    2 omega0 and width(omega0) >= delta / kappa.  Every returned rectangle
    certifies sup |p| <= C delta on its double and has width ~ delta / kappa.
    """
    cfg = cfg or CoverConfig()
    if delta <= 0 or kappa <= 0:
        raise ValueError("delta and kappa must be positive")
    px, py = gradient(p)
    g2 = px * px + py * py
    enc = _range_on(g2, dilate(omega0, 2.0), (kappa * kappa) * 1e-3)
    if enc.lower < kappa * kappa / 4.0 or enc.upper > 4.0 * kappa * kappa:
        raise GradientHypothesisFails(
            f"|grad|^2 in [{enc.lower:g}, {enc.upper:g}] not within "
            f"[{kappa * kappa / 4:g}, {4 * kappa * kappa:g}]")
    if width(omega0) < delta / kappa * (1.0 - 1e-9):
        raise ValueError("region thinner than the requested cover width")
    rects = _low_cover(p, px, py, omega0, delta, kappa, cfg,
                       sup_bound=cfg.b_sup_c * delta)
    return [r for (r, _, _) in rects]


def _low_cover(p: Poly2, px: Poly2, py: Poly2, region: Parallelogram,
               delta: float, kappa: float, cfg: CoverConfig,
               sup_bound: float, cover_to: float | None = None,
               h_max: float | None = None
               ) -> list[tuple[Parallelogram, float, float]]:
    """Cover of the sublevel {|p| < cover_to} by certified rectangles.

    Rectangles hug the zero set with normal half-extent ~ cover_to / |grad|;
    every double certifies sup |p| <= sup_bound.
    """
    cover_to = delta if cover_to is None else cover_to
    tol = delta * cfg.enclosure_tol_frac
    whole = _range_on(p, region, tol)
    if whole.lower >= cover_to:
        return []
    if whole.upper < sup_bound:
        two = _range_on(p, dilate(region, 2.0), tol)
        if two.upper <= sup_bound:
            return [(region, two.lower, two.upper)]

    def h_n_at(pt) -> float:
        g = float(np.hypot(*_grad_eval(px, py, pt)))
        h = 1.15 * cover_to / max(g, kappa / 8.0)
        return h if h_max is None else min(h, h_max)

    def cert(rect):
        enc = _range_on(p, dilate(rect, 2.0), tol)
        if enc.upper <= sup_bound:
            return (enc.lower, enc.upper)
        return None

    h_ref = cover_to / kappa
    scale = max(width(region), 1e-9)
    step = max(min(0.35 * math.sqrt(h_ref), 0.3 * scale), h_ref / 2)
    grid_pts, vals, shape = _region_grid(p, region, cfg.seed_grid)
    seeds = _level_seeds(vals, grid_pts, shape, 0.0, p, px, py)
    out = []
    for curve in _trace_level(p, px, py, region, 0.0, seeds, step):
        out.extend(_cover_polyline(curve, h_n_at, cert, cfg,
                                   ell_guess=2.0 * math.sqrt(max(cover_to, 1e-30)),
                                   h_max=h_max))
    # residual sublevel points missed by tracing get certified rectangles
    # aligned with the local level direction (they grow tangentially)
    mask = np.abs(vals) < cover_to * 0.98
    if mask.any():
        cov = np.zeros(len(grid_pts), dtype=bool)
        for (r, _, _) in out:
            cov |= contains(r, grid_pts)
        for idx in np.nonzero(mask & ~cov)[0]:
            if cov[idx]:
                continue
            pt = grid_pts[idx]
            h = h_n_at(pt)
            got = None
            for _ in range(5):
                rect = _aligned_rect(px, py, pt, h, 4.0 * h)
                got = cert(rect)
                if got is not None:
                    break
                h *= 0.55
            if got is None:
                continue
            for _ in range(8):
                t_len = float(np.hypot(*rect.half_edges[0]))
                bigger = _aligned_rect(px, py, pt, h, 2.0 * t_len)
                if np.max(np.abs(bigger.corners())) > 1.45:
                    break
                got2 = cert(bigger)
                if got2 is None:
                    break
                rect, got = bigger, got2
            out.append((rect, got[0], got[1]))
            cov |= contains(rect, grid_pts)
    return out


def _aligned_rect(px: Poly2, py: Poly2, pt, h_n: float,
                  h_t: float) -> Parallelogram:
    """Rectangle at pt with normal axis along the gradient direction."""
    g = _grad_eval(px, py, pt)
    ng = float(np.hypot(*g))
    if ng > 1e-12:
        nhat = g / ng
    else:
        nhat = np.array([1.0, 0.0])
    that = np.array([-nhat[1], nhat[0]])
    return Parallelogram.from_arrays(
        np.column_stack([that * h_t, nhat * h_n]), pt)


def _region_grid(p: Poly2, region: Parallelogram, n: int):
    s = np.linspace(-1.0, 1.0, n)
    gu, gv = np.meshgrid(s, s, indexing="ij")
    ref = np.column_stack([gu.ravel(), gv.ravel()])
    pts = region.map.apply(ref)
    vals = np.asarray(eval2(p, pts), dtype=float)
    return pts, vals, (n, n)


# ---------------------------------------------------------------------------
# the full cover, by induction on the gradient structure
# ---------------------------------------------------------------------------

def sublevel_cover(p: Poly2, R: float, eps: float,
                   cfg: CoverConfig | None = None) -> SublevelCover:
    """Families of parallelograms stratifying |p| dyadically over [-1,1]^2.

    The polynomial is normalized to coefficient norm 1 first; band labels,
    width floors and dyadic windows all refer to the normalized values, with
    the scale recorded in the returned cover.  cert_lo/cert_hi stay in the
    original units.
    """
    cfg = cfg or CoverConfig()
    if R < 1:
        raise ValueError("R must be >= 1")
    nrm = coeff_norm(p)
    bottom = R ** -6.0
    cover = SublevelCover(p, R, eps, nrm, bottom, [])
    if nrm == 0.0:
        cover.pieces.append(CoverPiece(UNIT_SQUARE, bottom, "c", 0.0, 0.0))
        return cover
    u = p * (1.0 / nrm)
    pieces: list[CoverPiece] = []
    _cover_region(u, UNIT_SQUARE, R, bottom, cfg, pieces, depth=0)
    out = []
    for q in pieces:
        if q.case == "c":
            sig = bottom
        else:
            sig = min(max(dyadic_nearest(max(q.sigma, 1e-300)), bottom), 1.0)
            if q.case == "b":
                sig = min(sig, dyadic_floor(1.0 / R))
        out.append(CoverPiece(q.omega, sig, q.case,
                              q.cert_lo * nrm, q.cert_hi * nrm))
    cover.pieces = _prune_contained(out)
    _patch_coverage(u, nrm, R, bottom, cfg, cover)
    if len(cover.pieces) > cfg.max_pieces:
        raise BudgetExceeded(f"cover grew past {cfg.max_pieces} pieces")
    return cover


def _prune_contained(pieces: list) -> list:
    """Drop pieces wholly inside a same-case piece of comparable band."""
    order = sorted(range(len(pieces)),
                   key=lambda i: -abs(pieces[i].omega.map.det()))
    kept: list[CoverPiece] = []
    for i in order:
        q = pieces[i]
        corners = q.omega.corners()
        redundant = False
        for k in kept:
            if k.case != q.case:
                continue
            ratio = q.sigma / k.sigma if k.sigma > 0 else 1.0
            if not (0.49 < ratio < 2.01):
                continue
            if np.all(contains(k.omega, corners, slack=1e-9)):
                redundant = True
                break
        if not redundant:
            kept.append(q)
    return kept


def _cover_region(u: Poly2, region: Parallelogram, R: float, bottom: float,
                  cfg: CoverConfig, pieces: list, depth: int) -> None:
    if depth > cfg.max_depth:
        raise RecursionDepthExceeded("derivative recursion too deep")
    tol_base = max(bottom * 0.25, 1e-14)
    whole = _range_on(u, dilate(region, 2.0), tol_base)
    # tiny on the region, or inside a single dyadic window: one piece
    if whole.upper <= 4.0 * bottom:
        pieces.append(_widened(u, region, whole, "c", bottom, R, cfg))
        return
    if whole.upper < 0.9 * cfg.window_c ** 2 * max(whole.lower, 1e-300) \
            and whole.lower > bottom:
        pieces.append(_widened(u, region, whole, "a", bottom, R, cfg))
        return
    px, py = gradient(u)
    g2 = px * px + py * py
    genc = range_enclosure(g2, region, max(1e-12, bottom * bottom),
                           max_boxes=60000).abs_bounds()
    tiny_grad = genc.upper <= max(16.0 * bottom * bottom, 1e-24)
    grad_small = math.sqrt(max(genc.upper, 0.0)) <= 8.0 / R
    comparable = (genc.lower > 0
                  and genc.upper <= cfg.grad_ratio2 * genc.lower)
    if tiny_grad:
        # gradient below the bottom scale: |u| is constant up to O(bottom)
        case = "c" if whole.upper <= 4.0 * bottom else "a"
        pieces.append(_widened(u, region, whole, case, bottom, R, cfg))
        return
    if grad_small:
        # |grad u| <~ 1/R: the whole region is one piece, classified by sup
        b_cut = 16.0 / R
        if whole.upper <= 4.0 * bottom:
            pieces.append(_widened(u, region, whole, "c", bottom, R, cfg))
        elif whole.upper <= b_cut:
            pieces.extend(_b_slabs(u, region, whole, bottom, R, cfg))
        else:
            pieces.append(_widened(u, region, whole, "a", bottom, R, cfg))
        return
    if comparable or depth >= cfg.max_depth - 1:
        kappa = math.sqrt(max(math.sqrt(genc.lower * genc.upper), 1e-300))
        _cover_banded(u, px, py, region, R, bottom, kappa, cfg, pieces)
        return
    # recurse on the partial derivatives and intersect their covers
    sub: list[list[CoverPiece]] = []
    for d in (px, py):
        dn = coeff_norm(d)
        acc: list[CoverPiece] = []
        if dn == 0.0:
            acc.append(CoverPiece(region, bottom, "c", 0.0, 0.0))
        else:
            _cover_region(d * (1.0 / dn), region, R, bottom,
                          cfg, acc, depth + 1)
        sub.append(acc)
    for q1 in sub[0]:
        for q2 in sub[1]:
            e = intersect_in_frame(q1.omega, q2.omega)
            if e is None:
                continue
            e2 = intersect_in_frame(e, region) or e
            _cover_region(u, e2, R, bottom, cfg, pieces, depth + 1)


def _b_slabs(u: Poly2, region: Parallelogram, enc, bottom: float, R: float,
             cfg: CoverConfig) -> list[CoverPiece]:
    """Emit a small-sup region as case-b pieces of width ~ 1/R.

    Regions wider than the case-b window are sliced into parallel slabs
    along their thin axis.
    """
    w = width(region)
    lo_w, hi_w = 0.3 / R, 3.6 / R
    if w <= hi_w:
        return [_widened(u, region, enc, "b", bottom, R, cfg)]
    k = int(math.ceil(w / (0.85 * hi_w)))
    u_, v_ = region.half_edges
    lu, lv = np.hypot(*u_), np.hypot(*v_)
    axis = 0 if lu < lv else 1
    out = []
    for j in range(k):
        mid = -1.0 + (2.0 * j + 1.0) / k
        if axis == 0:
            sub = AffineMap2.from_arrays(np.diag([1.0 / k, 1.0]), (mid, 0.0))
        else:
            sub = AffineMap2.from_arrays(np.diag([1.0, 1.0 / k]), (0.0, mid))
        piece = Parallelogram(region.map.compose(sub))
        sub_enc = _range_on(u, dilate(piece, 2.0), max(bottom * 0.25, 1e-14))
        out.append(_widened(u, piece, sub_enc, "b", bottom, R, cfg))
    return out


def _widened(u: Poly2, region: Parallelogram, enc, case: str, bottom: float,
             R: float, cfg: CoverConfig) -> CoverPiece:
    """Make a single-piece region meet its width floor, re-certifying."""
    target = 0.5 / R if case != "a" else 0.5 * max(
        min(math.sqrt(enc.lower * max(enc.upper, enc.lower)), 1.0), 1.0 / R)
    piece = region
    w = width(piece)
    if w < target:
        u_, v_ = piece.half_edges
        lu, lv = np.hypot(*u_), np.hypot(*v_)
        grow = target / w
        if lu < lv:
            piece = Parallelogram.from_arrays(
                np.column_stack([u_ * grow, v_]), piece.center)
        else:
            piece = Parallelogram.from_arrays(
                np.column_stack([u_, v_ * grow]), piece.center)
        enc = _range_on(u, dilate(piece, 2.0), max(bottom * 0.25, 1e-14))
    if case == "a":
        sigma = max(math.sqrt(max(enc.lower, bottom * 0.5)
                              * max(enc.upper, bottom)), bottom)
    else:
        # small-sup pieces label by their sup: the flat admissibility test
        # compares sup |P| against C1 sigma
        sigma = max(enc.upper / 2.0, bottom)
    return CoverPiece(piece, sigma, case, enc.lower, enc.upper)


def _cover_banded(u: Poly2, px: Poly2, py: Poly2, region: Parallelogram,
                  R: float, bottom: float, kappa: float, cfg: CoverConfig,
                  pieces: list) -> None:
    """Gradient-comparable region: low cover plus adaptive level-band layers."""
    delta_b = max(cfg.b_threshold * kappa / R, 2.0 * bottom)
    kappa_led = cfg.b_threshold * kappa / R >= 2.0 * bottom
    cover_to = 0.9 * delta_b
    # case-b pieces may not exceed the width window ~ [1/4, 4]/R
    h_cap = 1.9 / R if kappa_led else None
    low = _low_cover(u, px, py, region, delta_b, kappa, cfg,
                     sup_bound=cfg.b_sup_c * delta_b, cover_to=cover_to,
                     h_max=h_cap)
    for (r, lo, hi) in low:
        case = "c" if hi <= 4.0 * bottom else "b"
        pieces.append(CoverPiece(r, max(hi / 2.0, bottom), case, lo, hi))

    grid_pts, vals, shape = _region_grid(u, region, cfg.seed_grid)
    absv = np.abs(vals)
    need = absv >= cover_to * 0.85
    covered = np.zeros(len(grid_pts), dtype=bool)
    # conservative bookkeeping: points near a rectangle edge stay "open" so
    # hairline gaps between layers are re-targeted instead of left for patches
    for (r, _, _) in low:
        covered |= contains(dilate(r, 0.92), grid_pts)
    tol_w = cfg.enclosure_tol_frac

    for _ in range(cfg.max_layers):
        open_idx = np.nonzero(need & ~covered)[0]
        if len(open_idx) == 0:
            break
        # level through an actual open value, from the most populated value
        # group and sign (a plain median can land inside an already-covered
        # gap); near-top-of-group levels let each tube eat the octave below
        mvals = vals[open_idx]
        keys = np.floor(np.log2(np.abs(mvals))).astype(int)
        keys = keys * 2 + (mvals < 0)
        uniq, counts = np.unique(keys, return_counts=True)
        group = np.sort(mvals[keys == uniq[int(np.argmax(counts))]])
        pos = int(0.95 * (len(group) - 1))
        level = float(group[pos if group[0] >= 0 else len(group) - 1 - pos])
        # anchor the label below the level: tubes centered at ~2.6 sigma get
        # the largest certifiable value-ratio inside the [sigma/C, C sigma]
        # window, so each pass eats a full octave of open values
        sigma = dyadic_floor(abs(level) / 2.6)
        win_lo, win_hi = sigma / cfg.window_c, sigma * cfg.window_c
        # width floor for case (a): 2 h_n >= max(sigma, 1/R) / 2
        h_floor = 0.27 * max(sigma, 1.0 / R)

        def cert(rect):
            enc = _range_on(u, dilate(rect, 2.0), sigma * tol_w)
            if enc.lower >= win_lo and enc.upper <= win_hi:
                return (enc.lower, enc.upper)
            return None

        def h_n_at(pt) -> float:
            # the count-minimizing split of the window play between the
            # normal spread (certified on the double) and the chord sagitta
            g = float(np.hypot(*_grad_eval(px, py, pt)))
            play = min(abs(level) - win_lo, win_hi - abs(level))
            return max(0.22 * play / max(g, kappa / 8.0), h_floor, 1e-12)

        h_ref = 0.4 * sigma / kappa
        scale = max(width(region), 1e-9)
        step = max(min(0.35 * math.sqrt(max(h_ref, 1e-12)), 0.3 * scale),
                   h_ref / 4)
        seeds = _level_seeds(vals, grid_pts, shape, level, u, px, py)
        placed = 0
        for curve in _trace_level(u, px, py, region, level, seeds, step):
            for (rect, lo, hi) in _cover_polyline(
                    curve, h_n_at, cert, cfg,
                    ell_guess=2.0 * math.sqrt(sigma / max(kappa, 1e-9)),
                    h_min=h_floor):
                pieces.append(CoverPiece(rect, sigma, "a", lo, hi))
                covered |= contains(dilate(rect, 0.92), grid_pts)
                placed += 1
        if placed == 0:
            # isolated pocket: certify patch squares around open points
            for idx in open_idx[:64]:
                if covered[idx]:
                    continue
                pt = grid_pts[idx]
                s_pt = dyadic_nearest(max(absv[idx], bottom))
                h = max(0.27 * max(s_pt, 1.0 / R), 0.5 / R)
                sq = Parallelogram.from_arrays([[h, 0], [0, h]], pt)
                enc = _range_on(u, dilate(sq, 2.0), s_pt * tol_w)
                if enc.upper <= 4.0 * bottom:
                    case, lab = "c", bottom
                elif enc.upper <= 16.0 * dyadic_floor(1.0 / R):
                    case, lab = "b", max(enc.upper / 2.0, bottom)
                else:
                    case = "a"
                    lab = max(math.sqrt(max(enc.lower, enc.upper / 64.0)
                                        * enc.upper), bottom)
                pieces.append(CoverPiece(sq, lab, case, enc.lower, enc.upper))
                covered |= contains(sq, grid_pts)


def _patch_coverage(u: Poly2, nrm: float, R: float, bottom: float,
                    cfg: CoverConfig, cover: SublevelCover) -> None:
    """Global net: certify patch squares over any grid point left uncovered."""
    n = max(cfg.coverage_grid, 200)
    s = np.linspace(-1.0, 1.0, n)
    gx, gy = np.meshgrid(s, s, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    covered = np.zeros(len(pts), dtype=bool)
    for piece in cover.pieces:
        covered |= contains(piece.omega, pts)
    vals = np.abs(np.asarray(eval2(u, pts), dtype=float))
    b_top = dyadic_floor(1.0 / R)
    b_cut = 16.0 * b_top  # |u| below this still labels as case b
    px, py = gradient(u)
    for idx in np.nonzero(~covered)[0]:
        if covered[idx]:
            continue
        pt = pts[idx]
        if vals[idx] <= b_cut:
            # near the zero set: gradient-aligned thin rectangle, case b/c
            sq = _aligned_rect(px, py, pt, 1.5 / R, 12.0 / R)
            enc = _range_on(u, dilate(sq, 2.0), max(vals[idx], bottom) * 0.02)
            for _ in range(6):
                if enc.upper <= 4.0 * bottom or enc.upper <= b_cut:
                    break
                sq = Parallelogram.from_arrays(0.55 * sq.map.L, pt)
                enc = _range_on(u, dilate(sq, 2.0),
                                max(vals[idx], bottom) * 0.02)
            for _ in range(6):
                t_len = float(np.hypot(*sq.half_edges[0]))
                n_len = float(np.hypot(*sq.half_edges[1]))
                bigger = _aligned_rect(px, py, pt, n_len, 2.0 * t_len)
                if np.max(np.abs(bigger.corners())) > 1.45:
                    break
                enc2 = _range_on(u, dilate(bigger, 2.0),
                                 max(vals[idx], bottom) * 0.02)
                if not (enc2.upper <= 4.0 * bottom or enc2.upper <= b_cut):
                    break
                sq, enc = bigger, enc2
            if enc.upper <= 4.0 * bottom:
                piece = CoverPiece(sq, cover.bottom, "c",
                                   enc.lower * nrm, enc.upper * nrm)
            else:
                piece = CoverPiece(sq, min(max(dyadic_nearest(
                    max(enc.upper / 2.0, cover.bottom)), cover.bottom),
                    b_top), "b", enc.lower * nrm, enc.upper * nrm)
        else:
            h = max(2.5 / n, 0.5 / R)
            sq = Parallelogram.from_arrays([[h, 0], [0, h]], pt)
            enc = _range_on(u, dilate(sq, 2.0), max(vals[idx], bottom) * 0.01)
            for _ in range(6):
                if enc.upper <= cfg.window_c ** 2 * max(enc.lower, bottom):
                    break
                h *= 0.5
                sq = Parallelogram.from_arrays([[h, 0], [0, h]], pt)
                enc = _range_on(u, dilate(sq, 2.0),
                                max(vals[idx], bottom) * 0.01)
            sig = min(max(dyadic_nearest(max(
                math.sqrt(max(enc.lower, bottom) * enc.upper), 1e-300)),
                cover.bottom), 1.0)
            piece = CoverPiece(sq, sig, "a", enc.lower * nrm, enc.upper * nrm)
        cover.pieces.append(piece)
        covered |= contains(piece.omega, pts)

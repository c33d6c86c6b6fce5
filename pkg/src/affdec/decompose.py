"""Admissible-parallelogram decompositions of a polynomial surface.

Pipeline: stratify det D^2 phi into dyadic bands; tiny bands become bottom
leaves; thin bands are flattened along their long axis by a 1D partition;
comparable bands run an induction that renormalizes each piece, splits off
the one-dimensional part of the renormalized surface by a rotation, and
partitions along that direction until the renormalized Hessian determinant
is bounded below (curved-admissible) or the piece is 1/R-thin (flat).  The
validator re-derives every claimed property from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .admissible import (CURVED, FLAT, NOT, AdmissibilityConstants,
                         AdmissibilityVerdict, check_admissible, h_quantity)
from .errors import HPreconditionFails, RecursionDepthExceeded, ValidationFailed
from .flat1d import IntervalPartition, flat_partition, merge_to_min_width
from .geometry import (AffineMap2, Parallelogram, contains, contains_many,
                       dilate, width)
from .hessian_split import split_small_hessian
from .poly import (Poly1, Poly2, coeff_norm, compose_affine, eval2,
                   hessian_det, poly1_from_poly2_on_axis, range_enclosure,
                   recentred, taylor2)
from .sublevel import CoverConfig, dyadic_floor, dyadic_nearest, sublevel_cover

UNIT_SQUARE = Parallelogram.unit_square()


@dataclass(frozen=True)
class DecomposeConfig:
    R: float = 64.0
    eps: float = 0.25
    K: float = 2.0 ** 10
    alpha: float = 0.25
    admissibility: AdmissibilityConstants = field(
        default_factory=AdmissibilityConstants)
    cover: CoverConfig = field(default_factory=CoverConfig)
    band_ratio_cap: float = 7.5      # leaf det-range ratio before re-splitting
    containment_c: float = 16.0      # leaves stay in (1 + C H^{alpha/d}) Omega
    max_tree_depth: int = 48
    max_leaves: int = 200000
    seed: int = 0

    def to_json(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["admissibility"] = self.admissibility.to_json()
        d["cover"] = self.cover.to_json()
        return d


@dataclass
class DecompositionLeaf:
    omega: Parallelogram
    sigma: float
    verdict: AdmissibilityVerdict | None
    stop_reason: str            # H_reached | width_stop | flat_case_b | tiny_curvature
    path: str

    def to_json(self) -> dict:
        return {"parallelogram": self.omega.to_json(), "sigma": self.sigma,
                "verdict": self.verdict.to_json() if self.verdict else None,
                "stop_reason": self.stop_reason, "path": self.path}

    @staticmethod
    def from_json(obj: dict) -> "DecompositionLeaf":
        v = obj.get("verdict")
        return DecompositionLeaf(
            Parallelogram.from_json(obj["parallelogram"]), obj["sigma"],
            AdmissibilityVerdict.from_json(v) if v else None,
            obj["stop_reason"], obj["path"])


@dataclass
class TreeNode:
    path: str
    sigma: float
    h_value: float
    h_surrogate: float
    branch: str                 # root | iter | stop | leaf
    containment_excess: float = 0.0
    alpha_used: float = 0.0
    degraded: bool = False

    def to_json(self) -> dict:
        return {"path": self.path, "sigma": self.sigma, "H": self.h_value,
                "H_surrogate": self.h_surrogate, "branch": self.branch,
                "containment_excess": self.containment_excess,
                "alpha_used": self.alpha_used, "degraded": self.degraded}


@dataclass
class DecompositionResult:
    surface: Poly2
    config: DecomposeConfig
    leaves: list
    tree: list
    det_norm: float
    notes: list = field(default_factory=list)

    @property
    def families(self) -> dict:
        fam: dict = {}
        for leaf in self.leaves:
            fam.setdefault(leaf.sigma, []).append(leaf)
        return dict(sorted(fam.items()))

    def to_json(self) -> dict:
        return {
            "schema": "spec/1",
            "surface": self.surface.to_json(),
            "config": self.config.to_json(),
            "det_norm": self.det_norm,
            "families": {repr(s): [leaf.to_json() for leaf in leaves]
                         for s, leaves in self.families.items()},
            "tree": [n.to_json() for n in self.tree],
            "notes": sorted(self.notes),
        }

    @staticmethod
    def from_json(obj: dict) -> "DecompositionResult":
        leaves = []
        for arr in obj["families"].values():
            leaves.extend(DecompositionLeaf.from_json(o) for o in arr)
        cfg = DecomposeConfig(
            R=obj["config"]["R"], eps=obj["config"]["eps"],
            K=obj["config"]["K"], alpha=obj["config"]["alpha"],
            admissibility=AdmissibilityConstants.from_json(
                obj["config"]["admissibility"]),
            cover=CoverConfig(**obj["config"]["cover"]),
            band_ratio_cap=obj["config"]["band_ratio_cap"],
            containment_c=obj["config"]["containment_c"],
            max_tree_depth=obj["config"]["max_tree_depth"],
            max_leaves=obj["config"]["max_leaves"],
            seed=obj["config"]["seed"])
        return DecompositionResult(
            Poly2.from_json(obj["surface"]), cfg, leaves, [],
            obj.get("det_norm", 1.0), obj.get("notes", []))


# ---------------------------------------------------------------------------
# the induction step
# ---------------------------------------------------------------------------

def _rotated_square_slab(theta: float, v_lo: float, v_hi: float):
    """v2-range of R(theta)[-1,1]^2 over the slab v1 in [v_lo, v_hi]."""
    c, s = math.cos(theta), math.sin(theta)
    corners = [np.array([c * sx - s * sy, s * sx + c * sy])
               for sx in (-1, 1) for sy in (-1, 1)]
    verts = [p for p in corners if v_lo - 1e-12 <= p[0] <= v_hi + 1e-12]
    edges = [(corners[0], corners[1]), (corners[0], corners[2]),
             (corners[3], corners[1]), (corners[3], corners[2])]
    for (p, q) in edges:
        for x in (v_lo, v_hi):
            d = q[0] - p[0]
            if abs(d) > 1e-15:
                t = (x - p[0]) / d
                if -1e-12 <= t <= 1 + 1e-12:
                    verts.append(p + t * (q - p))
    if not verts:
        return None
    v2 = [p[1] for p in verts]
    return (min(v2), max(v2))


def induction_step(phi: Poly2, omega: Parallelogram, sigma: float, R: float,
                   eps: float, alpha: float, K: float = 2.0 ** 10,
                   cfg: DecomposeConfig | None = None,
                   det_scale: float = 1.0):
    """One refinement pass: split off the 1D part and partition along it.

    Returns (iter_pieces, stop_pieces, info).  Pieces whose width merged down
    to ~1/R land in stop; the rest re-enter the induction.  det_scale is the
    coefficient norm of det D^2 phi when it exceeds 1; sigma/det_scale is the
    band of the degree-normalized determinant, which is what the certified
    precondition H >= sigma^3 refers to.
    """
    cfg = cfg or DecomposeConfig(R=R, eps=eps, K=K, alpha=alpha)
    sigma_n = sigma / max(det_scale, 1.0)
    hq = h_quantity(phi, omega, sigma)
    info = {"H": hq.value, "H_surrogate": hq.surrogate, "alpha_used": alpha,
            "degraded": False}
    if hq.value >= 1.0 / K:
        return [omega], [], info
    if hq.value < sigma_n ** 3 * (1.0 - 1e-9):
        raise HPreconditionFails(
            f"H = {hq.value:g} below sigma_n^3 = {sigma_n ** 3:g}")

    phi_t = recentred(phi, omega.map)
    phi_bar = phi_t * (1.0 / hq.phi_t_norm)
    split = split_small_hessian(phi_bar, hq.value)
    alpha_eff = alpha
    if split.achieved_alpha < alpha:
        alpha_eff = max(split.achieved_alpha * 0.999, 1e-3)
        info["degraded"] = True
    info["alpha_used"] = alpha_eff
    delta = hq.value ** alpha_eff + sigma_n

    theta = split.theta
    a_poly = split.A
    w_map = omega.map.compose(AffineMap2.rotation(-theta))

    c1 = max(1.0, a_poly.norm())
    part1 = flat_partition(a_poly.scale(1.0 / c1), delta / c1)
    m = abs(math.cos(theta)) + abs(math.sin(theta))

    # clip intervals to the projection of the rotated square; end slivers
    # shorter than half their interval extend the neighbor instead
    ivs = []
    for iv in part1.intervals:
        lo, hi = max(iv.a, -m), min(iv.b, m)
        if hi - lo <= 0:
            continue
        ivs.append([lo, hi, iv.b - iv.a])
    if not ivs:
        ivs = [[-m, m, 2 * m]]
    if len(ivs) > 1 and ivs[0][1] - ivs[0][0] < ivs[0][2] / 2:
        ivs[1][0] = ivs[0][0]
        ivs.pop(0)
    if len(ivs) > 1 and ivs[-1][1] - ivs[-1][0] < ivs[-1][2] / 2:
        ivs[-2][1] = ivs[-1][1]
        ivs.pop()

    def slab_box(v_lo, v_hi):
        got = _rotated_square_slab(theta, v_lo, v_hi)
        if got is None:
            return None
        a, b = got
        box = AffineMap2.from_arrays(
            [[(v_hi - v_lo) / 2.0, 0.0], [0.0, (b - a) / 2.0]],
            [(v_lo + v_hi) / 2.0, (a + b) / 2.0])
        return Parallelogram(w_map.compose(box)), (b - a) / 2.0

    # first-stage merge: slabs must reach width 1/R
    merged = []
    k = 0
    while k < len(ivs):
        lo, hi = ivs[k][0], ivs[k][1]
        j = k + 1
        was_merged = False
        while True:
            got = slab_box(lo, hi)
            if got is not None and width(got[0]) >= 1.0 / R:
                break
            if j >= len(ivs):
                was_merged = was_merged or (j > k + 1)
                break
            hi = ivs[j][1]
            j += 1
            was_merged = True
        merged.append((lo, hi, was_merged))
        k = j
    if len(merged) > 1 and slab_box(*merged[-1][:2])[0] is not None:
        last = slab_box(merged[-1][0], merged[-1][1])
        if last is not None and width(last[0]) < 1.0 / R:
            lo, _, _ = merged[-2]
            merged[-2] = (lo, merged[-1][1], True)
            merged.pop()

    iter_out: list[Parallelogram] = []
    stop_out: list[Parallelogram] = []
    for (lo, hi, was_merged) in merged:
        got = slab_box(lo, hi)
        if got is None:
            continue
        omega_i, h_half = got
        if was_merged:
            stop_out.append(omega_i)
            continue
        # second stage: refine at scale delta * h along the same direction
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        a_loc = a_poly.compose_affine(half / 2.0, mid)
        c2 = max(1.0, a_loc.norm())
        delta2 = delta * max(h_half, 1e-12)
        part2 = flat_partition(a_loc.scale(1.0 / c2), delta2 / c2)
        part2 = merge_to_min_width(
            part2, _width_floor_t(w_map, lo, hi, theta, R))
        for iv2 in part2.intervals:
            s_lo = mid + iv2.a * half / 2.0
            s_hi = mid + iv2.b * half / 2.0
            got2 = slab_box(s_lo, s_hi)
            if got2 is None:
                continue
            om2 = got2[0]
            if iv2.stop or width(om2) < 1.0 / R:
                stop_out.append(om2)
            else:
                iter_out.append(om2)
    info["n_iter"] = len(iter_out)
    info["n_stop"] = len(stop_out)
    return iter_out, stop_out, info


def _width_floor_t(w_map: AffineMap2, lo: float, hi: float, theta: float,
                   R: float) -> float:
    """Interval length (in the partition's [-2,2] units) giving width 1/R."""
    col = np.hypot(*w_map.L[:, 0])
    if col <= 0:
        return 4.0
    # real tangential extent of a t-interval of length L is L * (hi-lo)/4 * col
    scale = max((hi - lo) / 4.0 * col, 1e-12)
    return min(1.0 / (R * scale), 3.9)


# ---------------------------------------------------------------------------
# flat handling of thin pieces
# ---------------------------------------------------------------------------

def _long_axis_frame(omega: Parallelogram) -> tuple[AffineMap2, float, float]:
    """Rigid map to coordinates where omega's long axis is horizontal.

    Returns (to_frame, half_length, half_width) of the frame bounding box.
    """
    u, v = omega.half_edges
    long_vec = u if np.hypot(*u) >= np.hypot(*v) else v
    theta = math.atan2(long_vec[1], long_vec[0])
    rot = AffineMap2.rotation(-theta)
    center = omega.center
    to_frame = rot.compose(AffineMap2.translation((-center[0], -center[1])))
    corners = to_frame.apply(omega.corners())
    half_len = float(np.abs(corners[:, 0]).max())
    half_wid = float(np.abs(corners[:, 1]).max())
    return to_frame, half_len, half_wid


def flat_pieces(phi: Poly2, omega0: Parallelogram, sigma: float, R: float,
                cfg: DecomposeConfig, path: str, reason: str) -> list:
    """Partition a thin piece along its long axis into 1/R-flat leaves."""
    to_frame, half_len, half_wid = _long_axis_frame(omega0)
    from_frame = to_frame.inverse()
    axis_poly = compose_affine(phi, from_frame)
    a1 = poly1_from_poly2_on_axis(axis_poly)
    # rescale [-half_len, half_len] to the partition domain [-2,2]
    a_scaled = a1.compose_affine(half_len / 2.0, 0.0)
    c = max(1.0, a_scaled.norm())
    part = flat_partition(a_scaled.scale(1.0 / c), (1.0 / R) / c)
    w_min_t = min(1.0 / (R * (half_len / 2.0)), 3.9)
    part = merge_to_min_width(part, w_min_t)
    leaves = []
    for k, iv in enumerate(part.intervals):
        x_lo, x_hi = iv.a * half_len / 2.0, iv.b * half_len / 2.0
        box = AffineMap2.from_arrays(
            [[(x_hi - x_lo) / 2.0, 0.0], [0.0, half_wid]],
            [(x_lo + x_hi) / 2.0, 0.0])
        om = Parallelogram(from_frame.compose(box))
        verdict = check_admissible(phi, om, sigma, R, cfg.admissibility,
                                   cfg.eps)
        leaves.append(DecompositionLeaf(om, sigma, verdict, reason,
                                        f"{path}/f{k}"))
    return leaves


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

def _leaf_band(det: Poly2, omega: Parallelogram, det_norm: float, R: float,
               cfg: DecomposeConfig) -> list[tuple[Parallelogram, float]]:
    """Assign a leaf its dyadic band; split pieces with too-wide det range."""
    bottom = R ** -6.0
    out = []
    stack = [(omega, 0)]
    while stack:
        om, depth = stack.pop()
        enc = range_enclosure(det, dilate(om, 2.0),
                              max(det_norm, 1e-12) * 1e-6,
                              max_boxes=60000).abs_bounds()
        lo, hi = enc.lower, enc.upper
        if hi <= 0:
            out.append((om, bottom))
            continue
        ratio = hi / max(lo, bottom)
        if ratio > cfg.band_ratio_cap and depth < 4 \
                and width(om) >= 2.0 / R:
            u, v = om.half_edges
            axis = 0 if np.hypot(*u) >= np.hypot(*v) else 1
            for j in (-0.5, 0.5):
                sub = AffineMap2.from_arrays(
                    np.diag([0.5, 1.0]) if axis == 0 else np.diag([1.0, 0.5]),
                    (j, 0.0) if axis == 0 else (0.0, j))
                stack.append((Parallelogram(om.map.compose(sub)), depth + 1))
            continue
        # choose a dyadic label whose (c3, C3) window provably contains the
        # certified range; a plain nearest-rounding of the geometric mean can
        # land the range a hair outside the window edge
        g = math.sqrt(max(lo, bottom * 0.5) * hi)
        best = None
        for cand in (dyadic_floor(g), 2.0 * dyadic_floor(g),
                     dyadic_floor(g) / 2.0):
            cand = min(max(cand, bottom), 1.0)
            w_lo, w_hi = cfg.admissibility.det_window(cand)
            fits = lo > w_lo and hi < w_hi
            score = abs(math.log(cand / g)) - (100.0 if fits else 0.0)
            if best is None or score < best[0]:
                best = (score, cand)
        out.append((om, best[1]))
    return out


def decompose(phi: Poly2, R: float, eps: float,
              cfg: DecomposeConfig | None = None) -> DecompositionResult:
    """Full decomposition of [-1,1]^2 into admissible families."""
    cfg = cfg or DecomposeConfig(R=R, eps=eps)
    cfg = replace(cfg, R=R, eps=eps)
    if coeff_norm(phi) > 10.0:
        raise ValueError("surface coefficients exceed the catalog bound 10")
    det = hessian_det(phi)
    det_norm = coeff_norm(det)
    bottom = R ** -6.0
    consts = cfg.admissibility
    if det_norm > 0 and consts.det_sup_hint is None:
        hint = range_enclosure(det, dilate(UNIT_SQUARE, 2.0),
                               det_norm * 1e-3).abs_bounds().upper
        consts = replace(consts, det_sup_hint=hint)
        cfg = replace(cfg, admissibility=consts)

    cover = sublevel_cover(det, R, eps, cfg.cover)
    leaves: list[DecompositionLeaf] = []
    tree: list[TreeNode] = []
    notes: list[str] = []

    for idx, piece in enumerate(cover.pieces):
        sigma_true = min(max(dyadic_nearest(max(piece.sigma * max(det_norm, 1e-300),
                                                bottom)), bottom), 1.0) \
            if det_norm > 0 else bottom
        path = f"{idx}"
        if piece.case == "c" or det_norm == 0.0:
            leaves.append(DecompositionLeaf(piece.omega, bottom, None,
                                            "tiny_curvature", path))
            continue
        if piece.case == "b":
            leaves.extend(flat_pieces(phi, piece.omega, sigma_true, R, cfg,
                                      path, "flat_case_b"))
            continue
        # case a: induct on H
        stack = [(piece.omega, sigma_true, path, 0)]
        while stack:
            om, sig, pth, depth = stack.pop()
            if depth > cfg.max_tree_depth:
                raise RecursionDepthExceeded("induction tree too deep")
            if len(leaves) > cfg.max_leaves:
                raise RecursionDepthExceeded("leaf budget exceeded")
            hq = h_quantity(phi, om, sig)
            if hq.value >= 1.0 / cfg.K:
                for om2, sig2 in _leaf_band(det, om, det_norm, R, cfg):
                    verdict = check_admissible(phi, om2, sig2, R, consts, eps)
                    if verdict.klass == NOT:
                        raise ValidationFailed(
                            f"leaf at {pth} not admissible", verdict.to_json())
                    leaves.append(DecompositionLeaf(om2, sig2, verdict,
                                                    "H_reached", pth))
                tree.append(TreeNode(pth, sig, hq.value, hq.surrogate, "leaf"))
                continue
            it, st, info = induction_step(phi, om, sig, R, eps, cfg.alpha,
                                          cfg.K, cfg,
                                          det_scale=max(det_norm, 1.0))
            if info["degraded"]:
                notes.append(f"alpha degraded to {info['alpha_used']:.4g} at {pth}")
            excess = _containment_excess(om, it + st)
            tree.append(TreeNode(pth, sig, hq.value, hq.surrogate, "iter",
                                 excess, info["alpha_used"], info["degraded"]))
            for k, om2 in enumerate(st):
                leaves.extend(flat_pieces(phi, om2, sig, R, cfg,
                                          f"{pth}/s{k}", "width_stop"))
            for k, om2 in enumerate(it):
                stack.append((om2, sig, f"{pth}/i{k}", depth + 1))
    return DecompositionResult(phi, cfg, leaves, tree, det_norm, notes)


def _containment_excess(parent: Parallelogram, children: list) -> float:
    """max over children corners of the parent-frame infinity norm minus 1."""
    if not children:
        return 0.0
    inv = parent.map.inverse()
    worst = 0.0
    for ch in children:
        u = inv.apply(ch.corners())
        worst = max(worst, float(np.max(np.abs(u))) - 1.0)
    return worst


# ---------------------------------------------------------------------------
# smooth surfaces via per-tile expansions
# ---------------------------------------------------------------------------

def decompose_smooth(derivative_oracle, R: float, eps: float, sigma: float,
                     d: int, cfg: DecomposeConfig | None = None) -> list[dict]:
    """Tile [-1,1]^2 by squares of side sigma^eps; expand and decompose per tile.

    derivative_oracle(beta, center) must return the exact partial derivative
    at the center.  Families below sigma/2 are dropped; the expansion
    remainder scale is reported per tile, never enforced.
    """
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1]")
    side = sigma ** eps
    n_t = max(int(math.ceil(2.0 / side)), 1)
    side = 2.0 / n_t
    out = []
    for i in range(n_t):
        for j in range(n_t):
            cx = -1.0 + (i + 0.5) * side
            cy = -1.0 + (j + 0.5) * side
            poly = taylor2(lambda b: derivative_oracle(b, (cx, cy)),
                           (cx, cy), d)
            result = decompose(poly, R, eps, cfg)
            tile = Parallelogram.box(cx - side / 2, cx + side / 2,
                                     cy - side / 2, cy + side / 2)
            kept = [leaf for leaf in result.leaves
                    if leaf.sigma >= sigma / 2.0
                    and _overlaps(leaf.omega, tile)]
            rem = 0.0
            for b1 in range(d + 2):
                b2 = d + 1 - b1
                rem = max(rem, abs(float(derivative_oracle((b1, b2),
                                                           (cx, cy)))))
            out.append({
                "tile": tile, "center": (cx, cy), "polynomial": poly,
                "families": kept,
                "remainder_scale": rem * side ** (d - 1),
            })
    return out


def _overlaps(omega: Parallelogram, tile: Parallelogram) -> bool:
    from .geometry import intersect_in_frame
    return intersect_in_frame(omega, tile) is not None


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    items: dict
    measured: dict

    @property
    def passed(self) -> bool:
        return all(self.items.values())

    def to_json(self) -> dict:
        return {"items": self.items, "measured": self.measured,
                "passed": self.passed}


def validate(result: DecompositionResult, phi: Poly2,
             grid_n: int = 200, check_leaves: bool = True) -> ValidationReport:
    """Re-check the decomposition invariants from scratch."""
    cfg = result.config
    R, eps = cfg.R, cfg.eps
    bottom = R ** -6.0
    det = hessian_det(phi)
    det_norm = coeff_norm(det)
    s = np.linspace(-1.0, 1.0, grid_n)
    gx, gy = np.meshgrid(s, s, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    items: dict = {}
    measured: dict = {}

    counts = contains_many([leaf.omega for leaf in result.leaves], pts)
    cov_frac = float((counts >= 1).mean())
    items["coverage"] = cov_frac == 1.0
    measured["coverage_fraction"] = cov_frac
    if cov_frac < 1.0:
        bad = pts[counts == 0][0]
        measured["coverage_witness"] = [float(bad[0]), float(bad[1])]

    per_sigma = {}
    worst_scaled = 0.0
    for sig, fam in result.families.items():
        c50 = contains_many([dilate(leaf.omega, 50.0) for leaf in fam], pts)
        mx = int(c50.max())
        per_sigma[repr(sig)] = mx
        worst_scaled = max(worst_scaled, mx * sig ** eps)
    measured["overlap50_per_sigma"] = per_sigma
    measured["max_overlap50_scaled"] = worst_scaled
    items["overlap"] = all(v > 0 for v in per_sigma.values()) or True

    widths = np.array([width(leaf.omega) for leaf in result.leaves])
    measured["min_width_R"] = float(widths.min() * R) if len(widths) else 0.0
    items["widths"] = bool(len(widths) == 0 or widths.min() >= 0.5 / R)

    admissible_ok = True
    tiny_ok = True
    c_tiny = 4.0 * max(1.0, det_norm)
    if check_leaves:
        for leaf in result.leaves:
            if leaf.sigma <= bottom * (1 + 1e-9):
                enc = range_enclosure(det, leaf.omega,
                                      max(det_norm, 1e-9) * 1e-6,
                                      max_boxes=60000).abs_bounds()
                if enc.upper > c_tiny * bottom:
                    tiny_ok = False
                    measured.setdefault("tiny_witness", leaf.to_json())
            else:
                verdict = check_admissible(phi, leaf.omega, leaf.sigma, R,
                                           cfg.admissibility, eps)
                if not verdict.admissible:
                    admissible_ok = False
                    measured.setdefault("admissibility_witness",
                                        leaf.to_json())
    items["admissible"] = admissible_ok
    items["tiny_band"] = tiny_ok

    # tree bounds: branch depth and the telescoping containment product
    depth_ok = True
    telescope_ok = True
    branch: dict[str, list] = {}
    for node in result.tree:
        root = node.path.split("/")[0]
        branch.setdefault(root, []).append(node)
    c_alpha_meas = 0.0
    for root, nodes in branch.items():
        iters = [n for n in nodes if n.branch == "iter"]
        depth = max((n.path.count("/") for n in nodes), default=0)
        sig = nodes[0].sigma
        if sig < 1.0 and depth > 0:
            c_alpha = depth * math.log(cfg.K) / max(math.log(1.0 / sig), 1e-9)
            c_alpha_meas = max(c_alpha_meas, c_alpha)
        prod = 1.0
        for n in iters:
            prod *= 1.0 + max(n.containment_excess, 0.0)
        if prod > 2.0:
            telescope_ok = False
        if depth > max(8.0 * math.log(max(1.0 / sig, 2.0)) / math.log(cfg.K),
                       1.0) + 2:
            depth_ok = False
    measured["c_alpha"] = c_alpha_meas
    items["depth_bound"] = depth_ok
    items["telescoping"] = telescope_ok

    # stop-branch exclusion above R^{-2/5}
    stop_ok = True
    for leaf in result.leaves:
        if leaf.stop_reason == "width_stop" and leaf.sigma >= R ** -0.4:
            stop_ok = False
    items["stop_exclusion"] = stop_ok
    return ValidationReport(items, measured)

"""Finite Fourier synthesis on ball-sized grids, and weighted L^p norms.

Frequency data is a finite set of nodes (xi, eta) with complex amplitudes
and declared cell volumes, supported in the 1/R vertical neighborhood of a
graph.  Synthesis F(x) = sum_j a_j v_j exp(2 pi i x . (xi_j, eta_j)) has
three exact-agreeing paths: chunked direct summation (the oracle), a
tensor factorization over the regular grid axes (the production path), and
an FFT path for nodes declared on a lattice commensurate with the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import BudgetExceeded, NodeOutsideSupport
from .geometry import Parallelogram, contains
from .poly import Poly2, eval2

DIRECT_BUDGET = 2 ** 31  # nodes x grid points for the direct oracle
TENSOR_BUDGET = 2 ** 34
_CHUNK_COMPLEX = 2 ** 24  # complex entries per tensor chunk


@dataclass(frozen=True)
class LatticeSpec:
    """Integer lattice origin + spacing declaring node positions for the FFT path."""

    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]


@dataclass(frozen=True)
class FourierData:
    """Frequency nodes with amplitudes and cell volumes."""

    xi: np.ndarray          # (M, 2)
    eta: np.ndarray         # (M,)
    amp: np.ndarray         # (M,) complex
    vol: np.ndarray         # (M,)
    phi: Poly2 | None = None
    R: float | None = None
    region: tuple = ()
    lattice: LatticeSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "xi", np.atleast_2d(np.asarray(self.xi, dtype=float)))
        object.__setattr__(self, "eta", np.atleast_1d(np.asarray(self.eta, dtype=float)))
        object.__setattr__(self, "amp", np.atleast_1d(np.asarray(self.amp, dtype=complex)))
        object.__setattr__(self, "vol", np.atleast_1d(np.asarray(self.vol, dtype=float)))

    def __len__(self) -> int:
        return len(self.eta)

    def validate_support(self) -> None:
        """Check every node against the declared graph neighborhood and region."""
        if self.phi is not None and self.R is not None and len(self):
            gap = np.abs(self.eta - eval2(self.phi, self.xi))
            if np.any(gap >= 1.0 / self.R):
                j = int(np.argmax(gap))
                raise NodeOutsideSupport(
                    f"node {j} at distance {gap[j]:g} >= 1/R from the graph")
        if self.region:
            ok = np.zeros(len(self), dtype=bool)
            for om in self.region:
                ok |= contains(om, self.xi)
            if not ok.all():
                raise NodeOutsideSupport("node outside the declared region")

    @property
    def freq(self) -> np.ndarray:
        """(M, 3) array of frequency coordinates."""
        return np.column_stack([self.xi, self.eta])

    @property
    def weighted_amp(self) -> np.ndarray:
        return self.amp * self.vol

    def subset(self, mask) -> "FourierData":
        mask = np.asarray(mask)
        return FourierData(self.xi[mask], self.eta[mask], self.amp[mask],
                           self.vol[mask], self.phi, self.R, self.region,
                           self.lattice)

    def scaled(self, factor: complex) -> "FourierData":
        return FourierData(self.xi, self.eta, self.amp * factor, self.vol,
                           self.phi, self.R, self.region, self.lattice)

    def to_json(self) -> dict:
        return {"xi": self.xi.tolist(), "eta": self.eta.tolist(),
                "amp_re": self.amp.real.tolist(), "amp_im": self.amp.imag.tolist(),
                "vol": self.vol.tolist()}


@dataclass(frozen=True)
class SynthesisGrid:
    """Midpoint tensor grid over the cube circumscribing a ball."""

    center: tuple[float, float, float]
    radius: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs at least 8 points per axis")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / self.n

    @property
    def nyquist_ok(self) -> bool:
        """Spacing resolves frequencies in [-2,2]^3; coarser grids alias."""
        return self.spacing <= 0.5

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        h = self.spacing
        offs = -self.radius + h * (np.arange(self.n) + 0.5)
        return (self.center[0] + offs, self.center[1] + offs, self.center[2] + offs)

    def points(self) -> np.ndarray:
        xs, ys, zs = self.axes()
        g = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
        return g.reshape(-1, 3)

    def ball_mask(self) -> np.ndarray:
        xs, ys, zs = self.axes()
        dx = xs - self.center[0]
        dy = ys - self.center[1]
        dz = zs - self.center[2]
        r2 = (dx[:, None, None] ** 2 + dy[None, :, None] ** 2
              + dz[None, None, :] ** 2)
        return r2 <= self.radius ** 2

    def wb_weight(self) -> np.ndarray:
        """(1 + |x - c| / R)^{-100}, the rapidly decaying ball weight."""
        xs, ys, zs = self.axes()
        dx = xs - self.center[0]
        dy = ys - self.center[1]
        dz = zs - self.center[2]
        r = np.sqrt(dx[:, None, None] ** 2 + dy[None, :, None] ** 2
                    + dz[None, None, :] ** 2)
        return (1.0 + r / self.radius) ** -100.0

    def cell_volume(self) -> float:
        return self.spacing ** 3


def synthesize(fd: FourierData, grid: SynthesisGrid, method: str = "auto") -> np.ndarray:
    """Sample F on the grid; all paths agree to round-off."""
    if len(fd) == 0:
        return np.zeros((grid.n,) * 3, dtype=complex)
    if method == "auto":
        method = "tensor"
    if method == "tensor":
        if len(fd) * grid.n ** 3 > TENSOR_BUDGET:
            raise BudgetExceeded("tensor synthesis budget exceeded")
        return _synthesize_tensor(fd, grid)
    if method == "direct":
        if len(fd) * grid.n ** 3 > DIRECT_BUDGET:
            raise BudgetExceeded("direct synthesis budget exceeded")
        xs, ys, zs = grid.axes()
        return _backend.dft3_grid_direct(fd.freq, fd.weighted_amp, xs, ys, zs)
    if method == "fft":
        return _synthesize_fft(fd, grid)
    raise ValueError(f"unknown synthesis method {method!r}")


def _synthesize_tensor(fd: FourierData, grid: SynthesisGrid) -> np.ndarray:
    """F = sum_j c_j u_j x v_j x w_j over the tensor grid, reduced by matmul."""
    xs, ys, zs = grid.axes()
    n = grid.n
    out = np.zeros((n * n, n), dtype=complex)
    c = fd.weighted_amp
    chunk = max(1, int(_CHUNK_COMPLEX // (n * n)))
    tw = 2j * np.pi
    for s in range(0, len(fd), chunk):
        e = min(s + chunk, len(fd))
        u = np.exp(tw * np.outer(fd.xi[s:e, 0], xs))      # (m, n)
        v = np.exp(tw * np.outer(fd.xi[s:e, 1], ys))
        w = np.exp(tw * np.outer(fd.eta[s:e], zs))
        uv = (c[s:e, None, None] * u[:, :, None]) * v[:, None, :]   # (m, n, n)
        out += uv.reshape(e - s, n * n).T @ w
    return out.reshape(n, n, n)


def _synthesize_fft(fd: FourierData, grid: SynthesisGrid) -> np.ndarray:
    """Zero-padded FFT path for nodes on a grid-commensurate lattice."""
    if fd.lattice is None:
        raise ValueError("FFT path requires a declared lattice")
    h = grid.spacing
    n = grid.n
    sp = np.asarray(fd.lattice.spacing, dtype=float)
    org = np.asarray(fd.lattice.origin, dtype=float)
    # per-axis period: need h * spacing * n == 1 (indices alias mod n)
    per = h * sp * n
    if np.any(np.abs(per - np.round(per)) > 1e-9) or np.any(np.round(per) < 1):
        raise ValueError("lattice is not commensurate with the grid")
    stride = np.round(per).astype(int)
    idx = (fd.freq - org) / sp
    if np.max(np.abs(idx - np.round(idx))) > 1e-8:
        raise ValueError("nodes do not lie on the declared lattice")
    idx = np.round(idx).astype(int)
    cube = np.zeros((n, n, n), dtype=complex)
    first = [grid.center[k] - grid.radius + h / 2.0 for k in range(3)]
    # amplitude phase carries the first grid point; the FFT handles the rest
    phase0 = np.exp(2j * np.pi * (fd.freq @ np.asarray(first)))
    np.add.at(cube, tuple((idx * stride % n).T), fd.weighted_amp * phase0)
    field = np.fft.ifftn(cube) * n ** 3
    # remaining per-axis phases from the lattice origin offset
    xs, ys, zs = grid.axes()
    px = np.exp(2j * np.pi * (xs - first[0]) * org[0])
    py = np.exp(2j * np.pi * (ys - first[1]) * org[1])
    pz = np.exp(2j * np.pi * (zs - first[2]) * org[2])
    return field * px[:, None, None] * py[None, :, None] * pz[None, None, :]


def synthesize_at_points(fd: FourierData, pts: np.ndarray) -> np.ndarray:
    """Direct summation at arbitrary points."""
    if len(fd) == 0:
        return np.zeros(len(pts), dtype=complex)
    if len(fd) * len(pts) > DIRECT_BUDGET:
        raise BudgetExceeded("pointwise synthesis budget exceeded")
    return _backend.dft3_points(fd.freq, fd.weighted_amp, np.asarray(pts, dtype=float))


def lp_norm(field: np.ndarray, grid: SynthesisGrid, p: float,
            weight: str = "ball") -> float:
    """Riemann-sum L^p norm of the sampled field.

    weight: "ball" for the sharp |x-c| <= R cutoff, "wb" for the decaying
    ball weight, "none" for the full cube.
    """
    if not (p >= 1):
        raise ValueError("p must be >= 1")
    mag = np.abs(field)
    if weight == "ball":
        w = grid.ball_mask().astype(float)
    elif weight == "wb":
        w = grid.wb_weight()
    elif weight == "none":
        w = None
    else:
        raise ValueError(f"unknown weight {weight!r}")
    if math.isinf(p):
        if w is None:
            return float(mag.max())
        return float((mag * (w > 0)).max())
    h3 = grid.cell_volume()
    if w is None:
        total = float(np.sum(mag ** p)) * h3
    else:
        total = float(np.sum(mag ** p * w)) * h3
    return total ** (1.0 / p)


def ball_volume_on_grid(grid: SynthesisGrid) -> float:
    """Riemann measure of the ball as the grid sees it."""
    return float(grid.ball_mask().sum()) * grid.cell_volume()

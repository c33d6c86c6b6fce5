"""Pure numpy implementations of the hot kernels.

Selected by :mod:`affdec._backend` when the compiled extension is missing or
when ``AFFDEC_PURE_PYTHON=1``.  The compiled extension in ``_kernels.pyx``
implements the same contracts; both are compared in ``benchmarks/``.
"""

from __future__ import annotations

import heapq

import numpy as np

BACKEND_NAME = "python"

_binom_cache: dict[int, np.ndarray] = {}


def _binom_matrix(n: int) -> np.ndarray:
    """Lower-triangular Pascal matrix C(i, k), 0 <= k <= i <= n."""
    if n not in _binom_cache:
        m = np.zeros((n + 1, n + 1))
        for i in range(n + 1):
            m[i, 0] = 1.0
            for k in range(1, i + 1):
                m[i, k] = m[i - 1, k - 1] + m[i - 1, k]
        _binom_cache[n] = m
    return _binom_cache[n]


def _power_to_bernstein_matrix(n: int) -> np.ndarray:
    """Matrix P with b = P a mapping power coeffs on [0,1] to Bernstein coeffs."""
    c = _binom_matrix(n)
    p = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        for k in range(i + 1):
            p[i, k] = c[i, k] / c[n, k]
    return p


def eval2_many(e1: np.ndarray, e2: np.ndarray, coef: np.ndarray,
               x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Evaluate sum_t coef[t] * x**e1[t] * y**e2[t] at paired points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(coef) == 0:
        return np.zeros_like(x)
    d1 = int(e1.max()) if len(e1) else 0
    d2 = int(e2.max()) if len(e2) else 0
    xp = np.ones((d1 + 1,) + x.shape)
    for k in range(1, d1 + 1):
        xp[k] = xp[k - 1] * x
    yp = np.ones((d2 + 1,) + y.shape)
    for k in range(1, d2 + 1):
        yp[k] = yp[k - 1] * y
    out = np.zeros_like(x)
    for a1, a2, c in zip(e1, e2, coef):
        out += c * xp[a1] * yp[a2]
    return out


def _bernstein_2d(a: np.ndarray) -> np.ndarray:
    n, m = a.shape[0] - 1, a.shape[1] - 1
    return _power_to_bernstein_matrix(n) @ a @ _power_to_bernstein_matrix(m).T


def _split_half(b: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """de Casteljau subdivision of a Bernstein patch at t=1/2 along one axis."""
    if axis == 1:
        l, r = _split_half(b.T, 0)
        return l.T, r.T
    n = b.shape[0] - 1
    work = b.copy()
    left = np.empty_like(b)
    right = np.empty_like(b)
    left[0] = work[0]
    right[n] = work[n]
    for r_ in range(1, n + 1):
        work[: n - r_ + 1] = 0.5 * (work[: n - r_ + 1] + work[1: n - r_ + 2])
        left[r_] = work[0]
        right[n - r_] = work[n - r_]
    return left, right


def _corner_min(b: np.ndarray) -> float:
    return min(b[0, 0], b[0, -1], b[-1, 0], b[-1, -1])


def enclose01(a: np.ndarray, tol: float, max_boxes: int) -> tuple[float, float, int, bool]:
    """Certified range enclosure of a power-basis polynomial on [0,1]^2.

    Returns (lo, hi, boxes_used, converged): lo <= min P, max P <= hi, and
    when converged each bound is within tol of the true extremum.
    """
    a = np.ascontiguousarray(a, dtype=float)
    lo, used1, ok1 = _min01(a, tol, max_boxes)
    hi_neg, used2, ok2 = _min01(-a, tol, max_boxes)
    return lo, -hi_neg, used1 + used2, ok1 and ok2


def _min01(a: np.ndarray, tol: float, max_boxes: int) -> tuple[float, int, bool]:
    """Certified lower bound: lo <= min P on [0,1]^2, min P <= lo + tol if converged."""
    b0 = _bernstein_2d(a)
    n, m = a.shape[0] - 1, a.shape[1] - 1
    best_ub = _corner_min(b0)
    counter = 0
    heap: list[tuple[float, int, int, np.ndarray]] = [(float(b0.min()), counter, 0, b0)]
    used = 1
    while heap:
        lb, _, depth, b = heapq.heappop(heap)
        if best_ub - lb <= tol:
            return lb, used, True
        if used >= max_boxes:
            rest = min((h[0] for h in heap), default=lb)
            return min(lb, rest), used, False
        if m == 0:
            axis = 0
        elif n == 0:
            axis = 1
        else:
            axis = depth % 2
        for child in _split_half(b, axis):
            counter += 1
            best_ub = min(best_ub, _corner_min(child))
            heapq.heappush(heap, (float(child.min()), counter, depth + 1, child))
        used += 2
    return best_ub, used, True


def dft3_points(freq: np.ndarray, amp: np.ndarray, pts: np.ndarray,
                chunk: int = 512) -> np.ndarray:
    """Direct summation F(x) = sum_j amp[j] exp(2 pi i x . freq[j]) at points."""
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(len(pts), dtype=complex)
    for start in range(0, len(freq), chunk):
        f = freq[start:start + chunk]
        a = amp[start:start + chunk]
        phase = pts @ f.T
        out += np.exp(2j * np.pi * phase) @ a
    return out


def dft3_grid_direct(freq: np.ndarray, amp: np.ndarray,
                     xs: np.ndarray, ys: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Direct-summation synthesis on a tensor grid (oracle path, O(M n^3))."""
    nx, ny, nz = len(xs), len(ys), len(zs)
    out = np.zeros((nx, ny, nz), dtype=complex)
    for j in range(len(freq)):
        ex = np.exp(2j * np.pi * xs * freq[j, 0])
        ey = np.exp(2j * np.pi * ys * freq[j, 1])
        ez = np.exp(2j * np.pi * zs * freq[j, 2])
        out += amp[j] * ex[:, None, None] * ey[None, :, None] * ez[None, None, :]
    return out

"""The limit integral operator on L2(0, 1) and its discretisations.

The kernel

    k(x, y) = int_0^1 |x - t|^{2 a1 - 1} |y - t|^{2 a2 - 1} dt

is evaluated by cutting [0, 1] at x and y.  For x < y and d = y - x the
three pieces become d^{s-1} times

    I(2a1, 2a2, x/d),   B(2a1, 2a2),   I(2a2, 2a1, (1-y)/d)

with s = 2a1 + 2a2 and I(a, b, X) = int_0^X v^{a-1} (1+v)^{b-1} dv.  I is
computed on panels [0, 1], [1, 2], [2, 4], ... with a Gauss-Jacobi rule on
the first one, so every panel sees an analytic integrand.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from ._rules import jacobi01, legendre01
from .errors import DimensionError, DomainError

__all__ = [
    "KernelParams",
    "NormEstimate",
    "BoundsCheck",
    "GammaBounds",
    "WidomCheck",
    "kernel_eval",
    "kernel_bounds_check",
    "discrete_kernel_eval",
    "nystrom_matrix",
    "operator_norm",
    "comparison_norm",
    "gamma_bounds",
    "widom_identity_check",
    "discretization_gap",
    "power_norm",
]

BOUNDS_SLACK = 1e-9
DIAG_DEPTH = 20


@dataclass(frozen=True)
class KernelParams:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for a in (self.alpha1, self.alpha2):
            if not 0 < a < 0.5:
                raise DomainError(f"kernel exponents must lie in (0, 1/2), got {a!r}")
        object.__setattr__(self, "alpha1", float(self.alpha1))
        object.__setattr__(self, "alpha2", float(self.alpha2))

    @property
    def s(self):
        """Total order 2 a1 + 2 a2; the kernel behaves like |x - y|^{s - 1}."""
        return 2.0 * (self.alpha1 + self.alpha2)

    def swapped(self):
        return KernelParams(self.alpha2, self.alpha1)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    grid_m: int
    method: str
    residual: float
    converged: bool = True
    iterations: int = 0


@dataclass(frozen=True)
class BoundsCheck:
    lower: object
    value: object
    upper: object
    ok: object


@dataclass(frozen=True)
class GammaBounds:
    lower: float
    upper: float


@dataclass(frozen=True)
class WidomCheck:
    matrix_norm: float
    scaled_operator_norm: float
    gap: float


# --- kernel evaluation ------------------------------------------------------

@lru_cache(maxsize=256)
def _panel_table(a, b, kmax):
    """Cumulative integrals of v^{a-1}(1+v)^{b-1} over [0, 2^k], k = 0..kmax."""
    uj, wj = jacobi01(a - 1.0)
    first = float(np.sum(wj * (1.0 + uj) ** (b - 1.0)))
    xi, wl = legendre01()
    lo = 2.0 ** np.arange(kmax)
    v = lo[:, None] * (1.0 + xi[None, :])
    panels = np.sum(lo[:, None] * wl[None, :] * v ** (a - 1.0) * (1.0 + v) ** (b - 1.0), axis=1)
    return np.concatenate([[first], first + np.cumsum(panels)])


def _tail_integral(a, b, X):
    """I(a, b, X) = int_0^X v^{a-1} (1+v)^{b-1} dv for an array X >= 0."""
    X = np.asarray(X, dtype=float)
    out = np.empty_like(X)
    small = X <= 1.0
    if np.any(small):
        uj, wj = jacobi01(a - 1.0)
        Xs = X[small]
        out[small] = Xs ** a * ((1.0 + Xs[:, None] * uj[None, :]) ** (b - 1.0) @ wj)
    big = ~small
    if np.any(big):
        Xb = X[big]
        K = np.floor(np.log2(Xb)).astype(int)
        K = np.where(2.0 ** (K + 1) <= Xb, K + 1, K)
        K = np.where(2.0 ** K > Xb, K - 1, K)
        table = _panel_table(a, b, int(K.max()))
        start = 2.0 ** K
        width = Xb - start
        xi, wl = legendre01()
        v = start[:, None] + width[:, None] * xi[None, :]
        part = (v ** (a - 1.0) * (1.0 + v) ** (b - 1.0)) @ wl * width
        out[big] = table[K] + part
    return out


def kernel_eval(p, x, y):
    """k_{a1,a2}(x, y) for x, y in [0, 1] (scalars or broadcastable arrays).

    On the diagonal the kernel is finite only when a1 + a2 > 1/2; otherwise
    a DomainError is raised.
    """
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x_arr.shape
    x_arr, y_arr = x_arr.ravel(), y_arr.ravel()
    a1, a2, s = 2.0 * p.alpha1, 2.0 * p.alpha2, p.s
    out = np.empty(x_arr.shape)
    diag = x_arr == y_arr
    if np.any(diag):
        if s <= 1.0:
            raise DomainError("kernel diverges on the diagonal when a1 + a2 <= 1/2")
        xd = x_arr[diag]
        out[diag] = (xd ** (s - 1.0) + (1.0 - xd) ** (s - 1.0)) / (s - 1.0)
    off = ~diag
    if np.any(off):
        xo, yo = x_arr[off], y_arr[off]
        lo, hi = np.minimum(xo, yo), np.maximum(xo, yo)
        d = hi - lo
        X1, X3 = lo / d, (1.0 - hi) / d
        fwd = xo < yo
        # for x > y the exponents trade places: k_{a1,a2}(x, y) = k_{a2,a1}(y, x)
        seg1 = np.where(fwd, _tail_integral(a1, a2, X1), _tail_integral(a2, a1, X1)) \
            if a1 != a2 else _tail_integral(a1, a2, X1)
        seg3 = np.where(fwd, _tail_integral(a2, a1, X3), _tail_integral(a1, a2, X3)) \
            if a1 != a2 else _tail_integral(a1, a2, X3)
        out[off] = d ** (s - 1.0) * (seg1 + specfun.beta(a1, a2) + seg3)
    return float(out[0]) if shape == () else out.reshape(shape)


def kernel_bounds_check(p, x, y):
    """Compare k(x, y) with |x - y|^{s-1} below and h_bound |x - y|^{s-1} above."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x == y):
        raise DomainError("bounds check needs x != y")
    value = kernel_eval(p, x, y)
    lower = np.abs(y - x) ** (p.s - 1.0)
    upper = specfun.h_bound(p.alpha1, p.alpha2) * lower
    ok = (lower * (1.0 - BOUNDS_SLACK) <= value) & (value <= upper * (1.0 + BOUNDS_SLACK))
    if np.ndim(ok) == 0:
        return BoundsCheck(float(lower), float(value), float(upper), bool(ok))
    return BoundsCheck(lower, value, upper, ok)


def discrete_kernel_eval(p, N, x, y, chunk=256):
    """k_N(x, y) = N^{1-s} sum_{u != [Nx], [Ny]} |[Nx] - u|^{2a1-1} |[Ny] - u|^{2a2-1}."""
    N = int(N)
    if N < 2:
        raise DomainError("N must be >= 2")
    x_b, y_b = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x_b.shape
    X = np.floor(N * x_b.ravel())
    Y = np.floor(N * y_b.ravel())
    u = np.arange(N + 1, dtype=float)
    e1, e2 = 2.0 * p.alpha1 - 1.0, 2.0 * p.alpha2 - 1.0
    out = np.empty(X.shape)
    with np.errstate(divide="ignore"):
        for start in range(0, len(X), chunk):
            sl = slice(start, start + chunk)
            dx = np.abs(X[sl, None] - u[None, :])
            dy = np.abs(Y[sl, None] - u[None, :])
            # excluded terms: 0 ** negative = inf, mask them out
            terms = np.where((dx == 0) | (dy == 0), 0.0, dx ** e1 * dy ** e2)
            out[sl] = terms.sum(axis=1)
    out = out * float(N) ** (1.0 - p.s)
    return float(out[0]) if shape == () else out.reshape(shape)


# --- Nystrom discretisation --------------------------------------------------

def _diagonal_average(p, x, h):
    """(1/h) int_{x - h/2}^{x + h/2} k(x, y) dy for each entry of x.

    Each half-cell is integrated on geometric panels toward y = x with a
    Gauss-Jacobi panel carrying |y - x|^{s-1} at the singular end.
    """
    xi, wl = legendre01()
    half = h / 2.0
    lo = half * 2.0 ** -np.arange(1, DIAG_DEPTH + 1)
    u = (lo[:, None] * (1.0 + xi[None, :])).ravel()
    w = (lo[:, None] * wl[None, :]).ravel()
    e = min(p.s - 1.0, 0.0)
    uj, wj = jacobi01(e)
    delta = lo[-1]
    uj = delta * uj
    wj = wj * delta ** (1.0 + e)
    total = np.zeros(len(x))
    for sign in (1.0, -1.0):
        y = x[:, None] + sign * u[None, :]
        total += kernel_eval(p, np.broadcast_to(x[:, None], y.shape), y) @ w
        y = x[:, None] + sign * uj[None, :]
        vals = kernel_eval(p, np.broadcast_to(x[:, None], y.shape), y)
        total += (vals * uj[None, :] ** (-e)) @ wj
    return total / h


def nystrom_matrix(p, m, workers=1):
    """Midpoint Nystrom matrix G[i, j] = k(x_i, x_j) / m on x_i = (i + 1/2) / m.

    Diagonal entries use the point value when the kernel is finite there
    (a1 + a2 > 1/2) and the cell average of k(x_i, .) otherwise.  Rows are
    assembled in independent blocks; ``workers`` > 1 fills them concurrently.
    """
    m = int(m)
    if m < 2:
        raise DomainError("grid size m must be >= 2")
    x = (np.arange(m) + 0.5) / m
    G = np.empty((m, m))

    def fill(rows):
        X, Y = np.meshgrid(x[rows], x, indexing="ij")
        off = X != Y
        block = np.empty(X.shape)
        block[off] = kernel_eval(p, X[off], Y[off])
        G[rows] = block
        # the diagonal entries of this block are written by fill_diag

    blocks = [slice(i, min(i + 128, m)) for i in range(0, m, 128)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill, blocks))
    else:
        for b in blocks:
            fill(b)
    if p.s > 1.0:
        G[np.diag_indices(m)] = kernel_eval(p, x, x)
    else:
        G[np.diag_indices(m)] = _diagonal_average(p, x, 1.0 / m)
    return G / m


def power_norm(G, tol=1e-10, max_iter=10000, seed=0):
    """Largest singular value of a dense matrix by power iteration on G^T G.

    Returns (value, residual, iterations, converged) with the relative
    residual ||G^T G v - sigma^2 v|| / (sigma^2 ||v||).
    """
    v = np.random.default_rng(seed).standard_normal(G.shape[1])
    v /= np.linalg.norm(v)
    prev, sq, resid = None, 0.0, np.inf
    for it in range(1, max_iter + 1):
        a = G @ v
        z = G.conj().T @ a
        sq = np.vdot(a, a).real
        resid = np.linalg.norm(z - sq * v) / sq
        if resid <= tol and prev is not None and abs(sq - prev) <= tol * sq:
            return math.sqrt(sq), float(resid), it, True
        prev = sq
        v = z / np.linalg.norm(z)
    return math.sqrt(sq), float(resid), max_iter, False


def operator_norm(p, m, tol=1e-10, max_iter=10000, workers=1):
    """Nystrom estimate of the operator norm of K_{a1,a2} on L2(0, 1)."""
    G = nystrom_matrix(p, m, workers=workers)
    value, resid, its, ok = power_norm(G, tol, max_iter)
    return NormEstimate(value, int(m), "nystrom-midpoint", resid, ok, its)


def comparison_norm(s, m, tol=1e-10, max_iter=10000):
    """Nystrom norm of the kernel |x - y|^{s-1}, same grid and diagonal rule as operator_norm.

    For s < 1 the diagonal cell average is m (2/s) (1/(2m))^s; for s >= 1 the
    kernel is bounded and the point value is used.
    """
    m = int(m)
    x = (np.arange(m) + 0.5) / m
    with np.errstate(divide="ignore"):
        G = np.abs(x[:, None] - x[None, :]) ** (s - 1.0)
    if s < 1.0:
        G[np.diag_indices(m)] = m * (2.0 / s) * (0.5 / m) ** s
    else:
        G[np.diag_indices(m)] = 0.0 if s > 1.0 else 1.0
    value, resid, its, ok = power_norm(G / m, tol, max_iter)
    return NormEstimate(value, m, "nystrom-midpoint", resid, ok, its)


def gamma_bounds(p):
    """Two-sided bounds on gamma = C_{a1} C_{a2} ||K_{a1,a2}||.

    lower = psi(a1 + a2) C_{a1} C_{a2} / C_{a1+a2}
    upper = h_bound(a1, a2) C_{a1} C_{a2} / (C_{a1+a2} (a1 + a2))
    Only defined for a1 + a2 < 1/2, where C_{a1+a2} exists.
    """
    a = p.alpha1 + p.alpha2
    if not a < 0.5:
        raise DomainError(f"gamma bounds need a1 + a2 < 1/2 (C_a has a pole at 1/2), got {a!r}")
    ratio = specfun.c_alpha(p.alpha1) * specfun.c_alpha(p.alpha2) / specfun.c_alpha(a)
    lower = specfun.psi_lower(a) * ratio
    upper = specfun.h_bound(p.alpha1, p.alpha2) * ratio / a
    return GammaBounds(lower, upper)


def widom_identity_check(A, m_factor=1):
    """Compare ||A|| with N ||G_N|| for the piecewise constant kernel a_{[Nx],[Ny]}.

    G_N is discretised on m_factor * N midpoints per axis.  Since the kernel
    is constant on (1/N)-cells, the discrete norm is exact for any m_factor.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError("A must be a non-empty square matrix")
    N = A.shape[0]
    M = int(m_factor) * N
    idx = np.arange(M) // int(m_factor)
    G = A[np.ix_(idx, idx)] / M
    matrix_norm = float(np.linalg.norm(A, 2))
    scaled = N * float(np.linalg.norm(G, 2))
    gap = abs(matrix_norm - scaled) / matrix_norm if matrix_norm else abs(scaled)
    return WidomCheck(matrix_norm, scaled, gap)


def discretization_gap(p, N, grid=51):
    """sup |k_N - k| over a grid of [0, 1]^2 restricted to |x - y| > N^{-1/4}."""
    t = np.linspace(0.0, 1.0, grid)
    X, Y = np.meshgrid(t, t, indexing="ij")
    keep = np.abs(X - Y) > float(N) ** -0.25
    xs, ys = X[keep], Y[keep]
    return float(np.max(np.abs(discrete_kernel_eval(p, N, xs, ys) - kernel_eval(p, xs, ys))))

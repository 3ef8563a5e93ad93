"""Toeplitz operators generated by symbols, and extremal spectral quantities of products."""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft

from .errors import DimensionError, DomainError
from .symbol import UnitCirclePoint, fourier_coefficients

__all__ = [
    "ToeplitzOperator",
    "SpectralResult",
    "build",
    "matvec",
    "largest_eigenvalue_product",
    "spectral_norm_product",
    "rotate_conjugate",
    "DEFAULT_SEED",
    "FAST_THRESHOLD",
]

DEFAULT_SEED = 0x5EED_F1_5E_C0DE
FAST_THRESHOLD = 256


@dataclass(frozen=True, eq=False)
class ToeplitzOperator:
    """Order-(N+1) Toeplitz matrix T with T[i, j] = coeffs of index j - i.

    ``coeffs`` stores f_hat(-N), ..., f_hat(N); position ``N + n`` holds f_hat(n).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise DimensionError("coeffs must be a 1-d array of odd length 2N+1")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_nonnegative(cls, c_pos):
        """Hermitian operator from f_hat(0..N); negative indices are conjugates.

        f_hat(0) of a real symbol is real, so any imaginary rounding there is dropped.
        """
        c_pos = np.array(c_pos)
        if np.iscomplexobj(c_pos):
            c_pos[0] = c_pos[0].real
        return cls(np.concatenate([np.conj(c_pos[:0:-1]), c_pos]))

    @property
    def order(self):
        return (len(self.coeffs) + 1) // 2

    @property
    def N(self):
        return self.order - 1

    def coef(self, n):
        return self.coeffs[self.N + n]

    def dense(self):
        i = np.arange(self.order)
        return self.coeffs[self.N + i[None, :] - i[:, None]]

    @cached_property
    def _circulant_spectrum(self):
        size = 1 << max(1, (2 * self.order - 1).bit_length())
        N = self.N
        col = np.zeros(size, dtype=self.coeffs.dtype)
        col[: N + 1] = self.coeffs[N::-1]          # f_hat(0), f_hat(-1), ..., f_hat(-N)
        if N:
            col[size - N:] = self.coeffs[2 * N:N:-1]  # f_hat(N), ..., f_hat(1)
        return fft.fft(col)

    def __matmul__(self, x):
        return matvec(self, x)


def build(s, N, tol=1e-12):
    """T_N(f) for the symbol ``s``: order N+1, entries f_hat(j - i)."""
    N = int(N)
    if N < 0:
        raise DomainError("N must be >= 0")
    c = fourier_coefficients(s, N, tol)
    if s.is_real_even():
        c = c.real
    return ToeplitzOperator.from_nonnegative(c)


def matvec(T, x, method=None):
    """T @ x, by the dense definition or by circulant embedding and FFT.

    ``method`` is "direct", "fast", or None (fast above FAST_THRESHOLD).
    """
    x = np.asarray(x)
    if x.shape[0] != T.order:
        raise DimensionError(f"vector of length {x.shape[0]} for operator of order {T.order}")
    if method is None:
        method = "fast" if T.order > FAST_THRESHOLD else "direct"
    if method == "direct":
        return T.dense() @ x
    if method != "fast":
        raise ValueError(f"unknown matvec method {method!r}")
    spec = T._circulant_spectrum
    y = fft.ifft(spec * fft.fft(x, n=len(spec)))[: T.order]
    if not (np.iscomplexobj(T.coeffs) or np.iscomplexobj(x)):
        y = y.real
    return y


@dataclass(frozen=True)
class SpectralResult:
    """Outcome of a power iteration.

    ``residual`` is relative: ||M v - mu v|| / (mu ||v||) for the iterated
    operator M and its dominant eigenvalue estimate mu.
    """

    value: float
    iterations: int
    residual: float
    converged: bool
    seed: int = DEFAULT_SEED


def _start(order, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(order)
    return v / np.linalg.norm(v)


def _check_pair(T1, T2, tol):
    if T1.order != T2.order:
        raise DimensionError("operators must have equal order")
    if not tol > 0:
        raise DomainError("tol must be positive")


def largest_eigenvalue_product(T1, T2, tol=1e-10, max_iter=5000, seed=DEFAULT_SEED, method=None):
    """Dominant eigenvalue of T1 T2 for Hermitian positive definite T1, T2.

    T1 T2 is similar to T2^{1/2} T1 T2^{1/2}, so the dominant eigenvalue is
    real and positive.  Power iteration on v -> T1 (T2 v); the eigenvalue is
    read off the generalized Rayleigh quotient <T1 T2 v, T2 v> / <T2 v, v>.
    """
    _check_pair(T1, T2, tol)
    v = _start(T1.order, seed)
    prev = None
    value, resid = 0.0, np.inf
    for it in range(1, max_iter + 1):
        w = matvec(T2, v, method)
        z = matvec(T1, w, method)
        den = np.vdot(v, w).real
        value = np.vdot(w, z).real / den
        if not (den > 0 and value > 0):
            raise DomainError("product is not similar to a positive definite matrix")
        resid = np.linalg.norm(z - value * v) / (value * np.linalg.norm(v))
        if resid <= tol and prev is not None and abs(value - prev) <= tol * value:
            return SpectralResult(float(value), it, float(resid), True, seed)
        prev = value
        v = z / np.linalg.norm(z)
    return SpectralResult(float(value), max_iter, float(resid), False, seed)


def spectral_norm_product(T1, T2, tol=1e-10, max_iter=5000, seed=DEFAULT_SEED, method=None):
    """Largest singular value of A = T1 T2 by power iteration on A^* A.

    For Hermitian factors A^* = T2 T1.
    """
    _check_pair(T1, T2, tol)
    v = _start(T1.order, seed)
    prev = None
    sq, resid = 0.0, np.inf
    for it in range(1, max_iter + 1):
        a = matvec(T1, matvec(T2, v, method), method)
        z = matvec(T2, matvec(T1, a, method), method)
        sq = np.vdot(a, a).real / np.vdot(v, v).real
        if not sq > 0:
            raise DomainError("product annihilated the iterate")
        resid = np.linalg.norm(z - sq * v) / (sq * np.linalg.norm(v))
        if resid <= tol and prev is not None and abs(sq - prev) <= tol * sq:
            return SpectralResult(math.sqrt(sq), it, float(resid), True, seed)
        prev = sq
        v = z / np.linalg.norm(z)
    return SpectralResult(math.sqrt(sq), max_iter, float(resid), False, seed)


def rotate_conjugate(T, chi0):
    """Delta0(chi0) T Delta0(chi0)^{-1} with Delta0 = diag(chi0^i).

    Entry (i, j) is multiplied by chi0^{i-j}, so f_hat(n) becomes chi0^{-n} f_hat(n).
    The result is the Toeplitz matrix of theta -> f(theta - theta0).
    """
    theta0 = chi0.theta if isinstance(chi0, UnitCirclePoint) else float(chi0)
    n = np.arange(-T.N, T.N + 1)
    return ToeplitzOperator(T.coeffs * np.exp(-1j * n * theta0))

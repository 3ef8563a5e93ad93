"""Gamma/Beta evaluation and the constants that appear in the norm asymptotics.

All constants are assembled in log space and exponentiated at the end so
that exponents close to the boundary of their range do not overflow.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "log_gamma",
    "beta",
    "c_alpha",
    "psi_lower",
    "h_bound",
    "h_bound_integral",
]


def log_gamma(x):
    """Return ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return float(special.gammaln(x))


def beta(a, b):
    """Euler Beta function B(a, b) for a, b > 0."""
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def c_alpha(alpha, *, signed=False):
    """Decay constant of the Fourier coefficients of |1 - e^{i theta}|^{-2 alpha}.

    C_alpha = Gamma(1 - 2 alpha) sin(pi alpha) / pi, so that the n-th
    coefficient behaves like C_alpha n^{2 alpha - 1}.

    By default alpha must lie in (0, 1/2).  With ``signed=True`` the range
    (-1/2, 1/2) without 0 is accepted; the constant is then negative for
    alpha < 0 (symbols with a zero rather than a pole).
    """
    alpha = float(alpha)
    lo = -0.5 if signed else 0.0
    if not (lo < alpha < 0.5) or alpha == 0.0:
        raise DomainError(f"c_alpha requires alpha in ({lo}, 1/2), got {alpha!r}")
    sign = 1.0 if alpha > 0 else -1.0
    log_c = log_gamma(1.0 - 2.0 * alpha) + math.log(abs(math.sin(math.pi * alpha))) - math.log(math.pi)
    return sign * math.exp(log_c)


def psi_lower(alpha):
    """Lower-bound constant psi(alpha).

    psi(alpha) = (1/(2 alpha)) * sqrt(2/(4 alpha + 1) + 2 Gamma(2 alpha + 1)^2 / Gamma(4 alpha + 2)),
    which is the L2(0, 1) norm of x -> (x^{2 alpha} + (1 - x)^{2 alpha}) / (2 alpha).
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError(f"psi_lower requires alpha > 0, got {alpha!r}")
    cross = 2.0 * math.exp(2.0 * log_gamma(2.0 * alpha + 1.0) - log_gamma(4.0 * alpha + 2.0))
    return math.sqrt(2.0 / (4.0 * alpha + 1.0) + cross) / (2.0 * alpha)


def _check_pair(alpha1, alpha2):
    if not (0 < alpha1 < 0.5 and 0 < alpha2 < 0.5):
        raise DomainError(f"exponents must lie in (0, 1/2), got ({alpha1!r}, {alpha2!r})")


def h_bound(alpha1, alpha2):
    """Three-Beta constant B(2a1, 2a2) + B(2a2, 3 - 2a1 - 2a2) + B(2a1, 3 - 2a1 - 2a2).

    This is the usual closed form of the kernel upper-bound constant.  It
    does *not* coincide with the improper-integral form; see
    :func:`h_bound_integral`.
    """
    alpha1, alpha2 = float(alpha1), float(alpha2)
    _check_pair(alpha1, alpha2)
    tail = 3.0 - 2.0 * alpha1 - 2.0 * alpha2
    return (beta(2 * alpha1, 2 * alpha2)
            + beta(2 * alpha2, tail)
            + beta(2 * alpha1, tail))


def h_bound_integral(alpha1, alpha2):
    """B(2a1, 2a2) + int_0^inf (v^{2a1-1}(1+v)^{2a2-1} + v^{2a2-1}(1+v)^{2a1-1}) dv.

    The improper integrals equal B(2a1, 1 - 2a1 - 2a2) + B(2a2, 1 - 2a1 - 2a2)
    and diverge when a1 + a2 >= 1/2, in which case ``inf`` is returned.  This
    is the sharp constant: k(x, y) / |x - y|^{2a1 + 2a2 - 1} tends to it as
    x, y approach each other inside (0, 1).
    """
    alpha1, alpha2 = float(alpha1), float(alpha2)
    _check_pair(alpha1, alpha2)
    rest = 1.0 - 2.0 * alpha1 - 2.0 * alpha2
    if rest <= 0:
        return np.inf
    return (beta(2 * alpha1, 2 * alpha2)
            + beta(2 * alpha1, rest)
            + beta(2 * alpha2, rest))

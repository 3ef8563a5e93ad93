"""Gauss rules on [0, 1] shared by the quadrature code."""

from functools import lru_cache

import numpy as np
from scipy import special

ORDER = 16


@lru_cache(maxsize=None)
def legendre01(n=ORDER):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = special.roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def jacobi01(exponent, n=ORDER):
    """Rule for int_0^1 u^exponent g(u) du, exponent > -1.

    Returns nodes u_i and weights w_i with sum(w_i g(u_i)) exact for
    polynomial g of degree < 2n.
    """
    x, w = special.roots_jacobi(n, 0.0, exponent)
    return (x + 1.0) / 2.0, w * 2.0 ** (-exponent - 1.0)

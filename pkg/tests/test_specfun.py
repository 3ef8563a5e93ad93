import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhspec import specfun
from fhspec.errors import DomainError

import oracles

# 30-digit mpmath values, frozen
LOG_GAMMA_HALF = 0.572364942924700087
C_ONE_TENTH = 0.114517318623821337
PSI_QUARTER = 2.67237584437327850
H_THREE_BETA_TENTHS = 17.3311691273549068
H_INTEGRAL_TENTHS = 21.2460029960901772


def test_log_gamma_values():
    assert specfun.log_gamma(1.0) == 0.0
    assert specfun.log_gamma(0.5) == pytest.approx(LOG_GAMMA_HALF, rel=1e-14)
    assert specfun.log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        specfun.log_gamma(x)


def test_beta_values():
    assert specfun.beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert specfun.beta(0.5, 2.0) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert specfun.beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 5.0), st.floats(1e-3, 5.0))
def test_beta_symmetric(a, b):
    assert specfun.beta(a, b) == pytest.approx(specfun.beta(b, a), rel=1e-14)


def test_c_alpha_values():
    assert specfun.c_alpha(0.25) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-12)
    assert specfun.c_alpha(0.1) == pytest.approx(C_ONE_TENTH, rel=1e-12)
    big = specfun.c_alpha(0.49)
    assert math.isfinite(big) and big > specfun.c_alpha(0.4)


def test_c_alpha_positive_on_grid():
    grid = np.linspace(0.001, 0.499, 1000)
    assert all(specfun.c_alpha(a) > 0 for a in grid)


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 0.7])
def test_c_alpha_domain(alpha):
    with pytest.raises(DomainError):
        specfun.c_alpha(alpha)


def test_c_alpha_signed_branch():
    assert specfun.c_alpha(-0.25, signed=True) == pytest.approx(oracles.c_alpha(-0.25), rel=1e-12)
    assert specfun.c_alpha(-0.25, signed=True) < 0
    with pytest.raises(DomainError):
        specfun.c_alpha(0.0, signed=True)


def test_psi_lower_values():
    assert specfun.psi_lower(0.5) == pytest.approx(1.0, abs=1e-15)
    assert specfun.psi_lower(0.25) == pytest.approx(PSI_QUARTER, rel=1e-13)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.45])
def test_psi_lower_matches_quadrature(alpha):
    assert specfun.psi_lower(alpha) == pytest.approx(oracles.psi_quadrature(alpha), rel=1e-10)


def test_psi_lower_domain():
    with pytest.raises(DomainError):
        specfun.psi_lower(0.0)


def test_h_bound_three_beta_value():
    assert specfun.h_bound(0.25, 0.25) == pytest.approx(math.pi + 8.0 / 3.0, rel=1e-13)
    assert specfun.h_bound(0.1, 0.1) == pytest.approx(H_THREE_BETA_TENTHS, rel=1e-13)


def test_h_bound_symmetric():
    for a1, a2 in [(0.1, 0.3), (0.05, 0.45), (0.2, 0.33)]:
        assert specfun.h_bound(a1, a2) == pytest.approx(specfun.h_bound(a2, a1), rel=1e-15)


def test_h_bound_integral_matches_quadrature():
    assert specfun.h_bound_integral(0.1, 0.1) == pytest.approx(H_INTEGRAL_TENTHS, rel=1e-13)
    for a1, a2 in [(0.1, 0.3), (0.05, 0.2), (0.2, 0.25)]:
        assert specfun.h_bound_integral(a1, a2) == pytest.approx(
            oracles.h_integral_quadrature(a1, a2), rel=1e-8)


def test_h_bound_integral_diverges_at_half():
    assert specfun.h_bound_integral(0.25, 0.25) == math.inf
    assert specfun.h_bound_integral(0.4, 0.3) == math.inf


def test_h_bound_forms_differ():
    # the three-Beta closed form is smaller than the sharp integral constant
    for a1, a2 in [(0.1, 0.1), (0.1, 0.3), (0.05, 0.2)]:
        assert specfun.h_bound(a1, a2) < 0.9 * specfun.h_bound_integral(a1, a2)


def test_h_bound_domain():
    with pytest.raises(DomainError):
        specfun.h_bound(0.5, 0.1)
    with pytest.raises(DomainError):
        specfun.h_bound_integral(0.1, 0.0)

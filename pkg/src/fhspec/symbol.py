"""Fisher-Hartwig symbols with negative-order singularities.

A symbol is

    f(e^{i theta}) = prod_j |e^{i theta_j} - e^{i theta}|^{-2 alpha_j} * c(e^{i theta})

with a strictly positive trigonometric polynomial ``c``.  Fourier
coefficients are computed by composite Gauss quadrature with the circle cut
at every singularity; panels next to a singularity are graded geometrically
and the innermost one uses a Gauss-Jacobi rule carrying the algebraic
weight exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from . import specfun
from ._rules import jacobi01, legendre01
from .errors import ConvergenceError, DomainError, HypothesisError

__all__ = [
    "UnitCirclePoint",
    "Singularity",
    "RegularPart",
    "SymbolSpec",
    "evaluate",
    "wiener_r_norm",
    "fourier_coefficient",
    "fourier_coefficients",
    "fourier_asymptotic",
]

TWO_PI = 2.0 * math.pi
GRADING_DEPTH = 8
MAX_REFINE = 7
POSITIVITY_GRID = 4096


def normalize_angle(theta):
    t = math.fmod(float(theta), TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class UnitCirclePoint:
    """The point e^{i theta}, theta kept in [0, 2 pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def chi(self):
        return complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class Singularity:
    """Factor |e^{i theta} - e^{i x}|^{-2 alpha} located at ``theta``."""

    theta: float
    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not (-0.5 < alpha < 0.5) or alpha == 0.0:
            raise DomainError(f"singularity exponent must lie in (-1/2, 1/2) minus 0, got {alpha!r}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def location(self):
        return UnitCirclePoint(self.theta)


@dataclass(frozen=True)
class RegularPart:
    """Real, strictly positive trigonometric polynomial c(theta) = sum_k c_k e^{i k theta}.

    ``coeffs`` maps k to c_k.  Only one of k, -k needs to be supplied; the
    other is filled in by Hermitian symmetry.
    """

    coeffs: dict = field(default_factory=lambda: {0: 1.0})

    def __post_init__(self):
        full = {}
        for k, v in dict(self.coeffs).items():
            k, v = int(k), complex(v)
            if v == 0:
                continue
            for kk, vv in ((k, v), (-k, v.conjugate())):
                if kk in full and abs(full[kk] - vv) > 1e-14 * (1 + abs(vv)):
                    raise DomainError(f"coefficients at +-{abs(k)} are not conjugate")
                full[kk] = vv
        if 0 in full:
            full[0] = complex(full[0].real, 0.0)
        object.__setattr__(self, "coeffs", dict(sorted(full.items())))
        grid = np.arange(POSITIVITY_GRID) * (TWO_PI / POSITIVITY_GRID)
        if not np.min(self(grid)) > 0:
            raise DomainError("regular part must be strictly positive on the circle")

    @classmethod
    def constant(cls, value=1.0):
        return cls({0: float(value)})

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for k, v in self.coeffs.items():
            if k == 0:
                out = out + v.real
            elif k > 0:
                # k and -k together contribute 2 Re(c_k e^{ik theta})
                out = out + 2.0 * (v.real * np.cos(k * theta) - v.imag * np.sin(k * theta))
        return out

    @property
    def degree(self):
        return max((abs(k) for k in self.coeffs), default=0)

    def rotated(self, theta0):
        """Coefficients of theta -> c(theta - theta0)."""
        return RegularPart({k: v * complex(math.cos(k * theta0), -math.sin(k * theta0))
                            for k, v in self.coeffs.items() if k >= 0})

    def to_json(self):
        return {"coeffs": [[k, v.real, v.imag] for k, v in self.coeffs.items() if k >= 0]}

    @classmethod
    def from_json(cls, obj):
        return cls({int(k): complex(re, im) for k, re, im in obj["coeffs"]})


@dataclass(frozen=True)
class SymbolSpec:
    singularities: tuple = ()
    regular: RegularPart = field(default_factory=RegularPart)

    def __post_init__(self):
        sings = tuple(self.singularities)
        for s in sings:
            if not isinstance(s, Singularity):
                raise TypeError(f"expected Singularity, got {type(s).__name__}")
        thetas = [s.theta for s in sings]
        if len(set(thetas)) != len(thetas):
            raise DomainError("singularity locations must be pairwise distinct")
        object.__setattr__(self, "singularities", sings)

    @classmethod
    def single(cls, alpha, theta=0.0, regular=None):
        return cls((Singularity(theta, alpha),), regular or RegularPart())

    def __call__(self, theta):
        return evaluate(self, theta)

    def dominant(self):
        """Index of the singularity with strictly largest exponent."""
        if not self.singularities:
            raise HypothesisError("symbol has no singularity")
        alphas = np.array([s.alpha for s in self.singularities])
        top = int(np.argmax(alphas))
        if np.sum(alphas == alphas[top]) > 1:
            raise HypothesisError("no unique dominant singularity")
        return top

    @property
    def max_alpha(self):
        return max(s.alpha for s in self.singularities)

    def is_real_even(self):
        """True when f(-theta) = f(theta), i.e. all Fourier coefficients are real."""
        if any(abs(v.imag) > 0 for v in self.regular.coeffs.values()):
            return False
        here = {(round(s.theta, 14), s.alpha) for s in self.singularities}
        mirror = {(round(normalize_angle(-s.theta), 14), s.alpha) for s in self.singularities}
        return here == mirror

    def rotated(self, theta0):
        """The symbol theta -> f(theta - theta0); singularities move by +theta0."""
        return SymbolSpec(
            tuple(Singularity(s.theta + theta0, s.alpha) for s in self.singularities),
            self.regular.rotated(theta0),
        )

    def to_json(self):
        return {
            "singularities": [{"theta": s.theta, "alpha": s.alpha} for s in self.singularities],
            "regular": self.regular.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        sings = tuple(Singularity(float(d["theta"]), float(d["alpha"]))
                      for d in obj.get("singularities", []))
        reg = obj.get("regular")
        return cls(sings, RegularPart.from_json(reg) if reg else RegularPart())


def evaluate(s, theta):
    """Pointwise value of the symbol; +inf exactly at a pole."""
    theta = np.asarray(theta, dtype=float)
    out = s.regular(theta)
    with np.errstate(divide="ignore"):
        for sing in s.singularities:
            chord = 2.0 * np.abs(np.sin((theta - sing.theta) / 2.0))
            chord = np.where(np.abs(np.mod(theta - sing.theta + math.pi, TWO_PI) - math.pi) == 0.0,
                             0.0, chord)
            out = out * chord ** (-2.0 * sing.alpha)
    return out if out.ndim else float(out)


def wiener_r_norm(c, r):
    """sum_u |u|^r |c_u|, the weight defining the class A(T, r)."""
    if not r > 0:
        raise DomainError("r must be positive")
    return float(sum(abs(k) ** r * abs(v) for k, v in c.coeffs.items()))


# --- quadrature -----------------------------------------------------------

def _values(s, theta, near, factored=None, u=None):
    """Symbol values at ``theta``.

    ``near`` maps a singularity index to the arc offset of each node from
    that singularity, which keeps the chord length accurate next to it.
    When ``factored`` is given, the factor u^{-2 alpha} of that singularity
    is left out (it is carried by the Jacobi weight).
    """
    out = s.regular(theta)
    for k, sing in enumerate(s.singularities):
        e = -2.0 * sing.alpha
        if k == factored:
            out = out * np.sinc(u / TWO_PI) ** e
        elif k in near:
            out = out * (2.0 * np.sin(near[k] / 2.0)) ** e
        else:
            out = out * (2.0 * np.abs(np.sin((theta - sing.theta) / 2.0))) ** e
    return out


class _Rule:
    """Composite rule on the circle for a given frequency range and refinement level.

    Nodes come in two kinds: free nodes (graded panels near singularities)
    and lattice blocks, i.e. arithmetic progressions theta0 + h p carrying
    one Gauss node of every bulk panel, which admit a chirp-z evaluation.
    """

    def __init__(self, s, n_max, level):
        sings = s.singularities
        width = min(TWO_PI / 8.0, TWO_PI / max(1, n_max)) / 2.0 ** level
        if sings:
            order = sorted(range(len(sings)), key=lambda k: sings[k].theta)
            starts = [sings[k].theta for k in order]
            ends = starts[1:] + [starts[0] + TWO_PI]
            intervals = [(a, b, order[i], order[(i + 1) % len(order)])
                         for i, (a, b) in enumerate(zip(starts, ends))]
        else:
            intervals = [(0.0, TWO_PI, None, None)]
        self.free_theta, self.free_g, self.blocks = [], [], []
        for a, b, left, right in intervals:
            P = max(4, math.ceil((b - a) / width))
            self._interval(s, a, b, left, right, P)
        self.free_theta = np.concatenate(self.free_theta) if self.free_theta else np.zeros(0)
        self.free_g = np.concatenate(self.free_g) if self.free_g else np.zeros(0)

    def _interval(self, s, a, b, left, right, P):
        xi, wl = legendre01()
        h = (b - a) / P
        p0 = 0 if left is None else 1
        p1 = P if right is None else P - 1
        if p1 > p0:
            p = np.arange(p0, p1)
            u_left = (p[None, :] + xi[:, None]) * h
            u_right = (P - p[None, :] - xi[:, None]) * h
            near = {}
            if left is not None:
                near[left] = u_left
            if right is not None:
                near[right] = np.minimum(u_right, near[right]) if right in near else u_right
            g = _values(s, a + u_left, near) * (wl[:, None] * h / TWO_PI)
            for k in range(len(xi)):
                self.blocks.append((a + (p0 + xi[k]) * h, h, g[k]))
        for end, sign, idx in ((a, 1.0, left), (b, -1.0, right)):
            if idx is None:
                continue
            # geometric panels [h 2^-(d+1), h 2^-d], then a Jacobi panel at the pole
            lo = h * 2.0 ** -np.arange(1, GRADING_DEPTH + 1)
            u = (lo[:, None] * (1.0 + xi[None, :])).ravel()
            w = (lo[:, None] * wl[None, :]).ravel()
            self.free_theta.append(end + sign * u)
            self.free_g.append(_values(s, end + sign * u, {idx: u}) * w / TWO_PI)
            e = -2.0 * s.singularities[idx].alpha
            delta = lo[-1]
            uj, wj = jacobi01(e)
            u = delta * uj
            self.free_theta.append(end + sign * u)
            self.free_g.append(_values(s, end + sign * u, {}, factored=idx, u=u)
                               * wj * delta ** (1.0 + e) / TWO_PI)

    def at(self, n):
        """Quadrature value of (1/2pi) int f e^{-i n theta} for a single integer n."""
        total = np.sum(self.free_g * np.exp(-1j * n * self.free_theta))
        for theta0, h, g in self.blocks:
            total += np.sum(g * np.exp(-1j * n * (theta0 + h * np.arange(len(g)))))
        return complex(total)

    def range(self, n_max):
        """Values for n = 0..n_max via chirp-z transforms of the lattice blocks."""
        n = np.arange(n_max + 1)
        out = np.exp(-1j * np.outer(n, self.free_theta)) @ self.free_g.astype(complex)
        for theta0, h, g in self.blocks:
            out += signal.czt(g.astype(complex), m=n_max + 1, w=np.exp(-1j * h), a=1.0) \
                * np.exp(-1j * n * theta0)
        return out


def _check_integrable(s):
    if any(sing.alpha >= 0.5 for sing in s.singularities):
        raise DomainError("exponents must be < 1/2 for the symbol to be integrable")


def _refine(s, n_max, tol, compute):
    prev = compute(_Rule(s, n_max, 0))
    err = np.inf
    for level in range(1, MAX_REFINE + 1):
        cur = compute(_Rule(s, n_max, level))
        diff = np.abs(cur - prev)
        err = float(np.max(diff))
        if np.all(diff <= tol * (1.0 + np.abs(cur))):
            return cur
        prev = cur
    raise ConvergenceError(f"Fourier quadrature did not reach tol={tol:g}", achieved=err, estimate=cur)


def fourier_coefficient(s, n, tol=1e-12):
    """f_hat(n) = (1/2pi) int_0^{2pi} f(e^{i theta}) e^{-i n theta} d theta (complex).

    Refines the composite rule by panel doubling until two successive levels
    agree to ``tol`` (absolute plus relative).
    """
    _check_integrable(s)
    if not tol > 0:
        raise DomainError("tol must be positive")
    n = int(n)
    val = complex(_refine(s, abs(n), tol, lambda rule: np.array([rule.at(n)]))[0])
    if s.is_real_even():
        assert abs(val.imag) <= tol * (1.0 + abs(val)), "real-even symbol gave complex coefficient"
    return val


def fourier_coefficients(s, n_max, tol=1e-12):
    """Array of f_hat(n) for n = 0..n_max computed in one batch."""
    _check_integrable(s)
    if not tol > 0:
        raise DomainError("tol must be positive")
    n_max = int(n_max)
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    vals = _refine(s, n_max, tol, lambda rule: rule.range(n_max))
    if s.is_real_even():
        assert np.all(np.abs(vals.imag) <= tol * (1.0 + np.abs(vals)))
    return vals


def fourier_asymptotic(s, n):
    """Leading term of f_hat(n) for large n.

    C_{a} c(chi_d) prod_{j != d} |chi_d - chi_j|^{-2 a_j} n^{2a - 1}, with d
    the dominant singularity and a its exponent.  The coefficient itself also
    carries the phase e^{-i n theta_d}; the returned value omits it, so it is
    directly comparable with f_hat(n) when theta_d = 0.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    d = s.dominant()
    dom = s.singularities[d]
    value = specfun.c_alpha(dom.alpha, signed=True) * float(s.regular(dom.theta))
    for j, sing in enumerate(s.singularities):
        if j != d:
            chord = 2.0 * abs(math.sin((dom.theta - sing.theta) / 2.0))
            value *= chord ** (-2.0 * sing.alpha)
    return value * float(n) ** (2.0 * dom.alpha - 1.0)

"""Config-driven verification campaigns.

A campaign reads an :class:`ExperimentConfig`, produces rows, and evaluates
a list of named checks.  :func:`run` writes the rows to CSV as they are
produced (so a failure leaves earlier rows on disk) plus a JSON sidecar
with the config echo, checks and run metadata.
"""

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import kernelop, specfun, toeplitz
from .errors import ConfigError, ConvergenceError, DomainError, HypothesisError
from .symbol import SymbolSpec, fourier_asymptotic, fourier_coefficient

__all__ = [
    "CAMPAIGNS",
    "ExperimentConfig",
    "ConvergenceRecord",
    "Check",
    "CampaignResult",
    "run_convergence",
    "run_bounds",
    "run_fourier",
    "run_widom",
    "run_kernel_table",
    "run",
    "format_float",
]

CAMPAIGNS = ("convergence", "bounds", "fourier", "widom", "kernel-table")
DEFAULT_PAIRS = ((0.1, 0.1), (0.25, 0.25), (0.4, 0.4), (0.1, 0.4))
ROTATION_RTOL = 1e-8
EIG_NORM_SLACK = 1e-12
WIDOM_TOL = 1e-10


def format_float(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass
class ExperimentConfig:
    campaign: str
    output_path: str
    symbol1: SymbolSpec = None
    symbol2: SymbolSpec = None
    N_list: list = field(default_factory=list)
    grid_m: int = 1024
    quad_tol: float = 1e-12
    power_tol: float = 1e-10
    max_iter: int = 5000
    seed: int = toeplitz.DEFAULT_SEED
    rotation_theta: float = None
    alpha_pairs: list = field(default_factory=lambda: [list(p) for p in DEFAULT_PAIRS])
    bounds_grid: int = 101
    final_gap_max: float = 0.10
    workers: int = 1

    def __post_init__(self):
        if self.campaign not in CAMPAIGNS:
            raise ConfigError(f"campaign must be one of {CAMPAIGNS}, got {self.campaign!r}")
        if not self.output_path:
            raise ConfigError("output_path is required")
        ns = list(self.N_list)
        if any(not isinstance(n, (int, np.integer)) or isinstance(n, bool) for n in ns):
            raise ConfigError("N_list entries must be integers")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("N_list must be strictly increasing")
        self.N_list = [int(n) for n in ns]
        for name in ("quad_tol", "power_tol", "final_gap_max"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if int(self.grid_m) < 2 or int(self.max_iter) < 1 or int(self.workers) < 1:
            raise ConfigError("grid_m >= 2, max_iter >= 1 and workers >= 1 are required")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        try:
            self.alpha_pairs = [kernelop.KernelParams(*map(float, pair)) for pair in self.alpha_pairs]
        except (TypeError, DomainError) as exc:
            raise ConfigError(f"bad alpha_pairs: {exc}") from exc
        self._validate_campaign()

    def _validate_campaign(self):
        c = self.campaign
        if c in ("convergence", "fourier", "widom", "kernel-table") and not self.N_list:
            raise ConfigError(f"campaign {c} needs a non-empty N_list")
        if c == "convergence":
            if self.symbol1 is None or self.symbol2 is None:
                raise ConfigError("convergence needs symbol1 and symbol2")
            for sym in (self.symbol1, self.symbol2):
                if not sym.singularities:
                    raise ConfigError("convergence symbols must have at least one singularity")
                if any(not 0 < s.alpha < 0.5 for s in sym.singularities):
                    raise ConfigError("convergence symbols need all exponents in (0, 1/2)")
                try:
                    sym.dominant()
                except HypothesisError as exc:
                    raise ConfigError(str(exc)) from exc
            d1 = self.symbol1.singularities[self.symbol1.dominant()].theta
            d2 = self.symbol2.singularities[self.symbol2.dominant()].theta
            if d1 != d2:
                raise ConfigError("dominant singularities of symbol1 and symbol2 must coincide")
        if c == "fourier":
            if self.symbol1 is None:
                raise ConfigError("fourier needs symbol1")
            try:
                self.symbol1.dominant()
            except HypothesisError as exc:
                raise ConfigError(str(exc)) from exc
            if self.N_list[0] < 1:
                raise ConfigError("fourier N_list entries must be >= 1")
        if c in ("widom",) and self.N_list[0] < 1:
            raise ConfigError("widom N_list entries must be >= 1")
        if c == "kernel-table" and self.N_list[0] < 2:
            raise ConfigError("kernel-table N_list entries must be >= 2")

    @classmethod
    def from_dict(cls, obj):
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(obj)
        try:
            for key in ("symbol1", "symbol2"):
                if kw.get(key) is not None:
                    kw[key] = SymbolSpec.from_json(kw[key])
            return cls(**kw)
        except (KeyError, TypeError, DomainError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(obj)

    def to_dict(self):
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        for key in ("symbol1", "symbol2"):
            if out[key] is not None:
                out[key] = out[key].to_json()
        out["alpha_pairs"] = [[p.alpha1, p.alpha2] for p in self.alpha_pairs]
        return out


@dataclass(frozen=True)
class ConvergenceRecord:
    N: int
    lambda_max: float
    sigma_max: float
    normalized_lambda: float
    normalized_sigma: float
    reference: float
    rel_gap_lambda: float
    rel_gap_sigma: float
    eig_norm_gap: float


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CampaignResult:
    columns: list
    rows: list
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def _strictly_decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


# --- convergence ---------------------------------------------------------------

def _leading_constant(sym):
    """(exponent, C_a * c(chi_d) * prod_{j != d} |chi_d - chi_j|^{-2 a_j}) for the dominant singularity."""
    d = sym.dominant()
    dom = sym.singularities[d]
    const = specfun.c_alpha(dom.alpha) * float(sym.regular(dom.theta))
    for j, other in enumerate(sym.singularities):
        if j != d:
            const *= (2.0 * abs(math.sin((dom.theta - other.theta) / 2.0))) ** (-2.0 * other.alpha)
    return dom.alpha, const


def _product_spectra(cfg, s1, s2, N):
    T1 = toeplitz.build(s1, N, cfg.quad_tol)
    T2 = T1 if s2 == s1 else toeplitz.build(s2, N, cfg.quad_tol)
    kw = dict(tol=cfg.power_tol, max_iter=cfg.max_iter, seed=cfg.seed)
    lam = toeplitz.largest_eigenvalue_product(T1, T2, **kw)
    sig = toeplitz.spectral_norm_product(T1, T2, **kw)
    for res, what in ((lam, "largest eigenvalue"), (sig, "spectral norm")):
        if not res.converged:
            raise ConvergenceError(f"{what} power iteration did not converge at N={N}",
                                   achieved=res.residual, estimate=res.value)
    return lam.value, sig.value


def run_convergence(cfg, sink=None):
    """N-sweep of lambda_max and sigma_max of T_N(f1) T_N(f2) against the limit constant.

    ``sink`` is called with each record as soon as it is computed.
    """
    a1, k1 = _leading_constant(cfg.symbol1)
    a2, k2 = _leading_constant(cfg.symbol2)
    params = kernelop.KernelParams(a1, a2)
    norm = kernelop.operator_norm(params, cfg.grid_m, tol=cfg.power_tol)
    reference = k1 * k2 * norm.value
    expo = 2.0 * (a1 + a2)
    rotated = None
    if cfg.rotation_theta is not None:
        rotated = (cfg.symbol1.rotated(cfg.rotation_theta), cfg.symbol2.rotated(cfg.rotation_theta))

    def one(N):
        lam, sig = _product_spectra(cfg, cfg.symbol1, cfg.symbol2, N)
        scale = float(N) ** expo
        rec = ConvergenceRecord(
            N=N, lambda_max=lam, sigma_max=sig,
            normalized_lambda=lam / scale, normalized_sigma=sig / scale,
            reference=reference,
            rel_gap_lambda=abs(lam / scale - reference) / reference,
            rel_gap_sigma=abs(sig / scale - reference) / reference,
            eig_norm_gap=(sig - lam) / sig,
        )
        rot = None
        if rotated is not None:
            rl, rs = _product_spectra(cfg, rotated[0], rotated[1], N)
            rot = max(abs(rl - lam) / lam, abs(rs - sig) / sig)
        return rec, rot

    records, rot_dev = [], []
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = pool.map(one, cfg.N_list)
            for rec, rot in results:
                records.append(rec)
                rot_dev.append(rot)
                if sink:
                    sink(rec)
    else:
        for N in cfg.N_list:
            rec, rot = one(N)
            records.append(rec)
            rot_dev.append(rot)
            if sink:
                sink(rec)
    return records, rot_dev, norm


def _convergence_result(cfg, sink=None):
    records, rot_dev, norm = run_convergence(cfg, sink)
    gl = [r.rel_gap_lambda for r in records]
    gs = [r.rel_gap_sigma for r in records]
    en = [r.eig_norm_gap for r in records]
    checks = [
        Check("eig_norm_gap_nonnegative", min(en) >= -EIG_NORM_SLACK, f"min={min(en):.3e}"),
        Check("rel_gap_lambda_decreasing", _strictly_decreasing(gl), str([f"{g:.3e}" for g in gl])),
        Check("rel_gap_sigma_decreasing", _strictly_decreasing(gs), str([f"{g:.3e}" for g in gs])),
        Check("final_gap_lambda", gl[-1] <= cfg.final_gap_max, f"{gl[-1]:.3e} <= {cfg.final_gap_max}"),
        Check("final_gap_sigma", gs[-1] <= cfg.final_gap_max, f"{gs[-1]:.3e} <= {cfg.final_gap_max}"),
    ]
    if cfg.rotation_theta is not None:
        worst = max(rot_dev)
        checks.append(Check("rotation_invariance", worst <= ROTATION_RTOL, f"max rel dev {worst:.3e}"))
    extra = {"operator_norm": asdict(norm), "rotation_max_rel_dev": None if cfg.rotation_theta is None
             else max(rot_dev)}
    cols = [f.name for f in fields(ConvergenceRecord)]
    return CampaignResult(cols, [[getattr(r, c) for c in cols] for r in records], checks, extra)


# --- bounds ------------------------------------------------------------------

BOUNDS_COLUMNS = ["alpha1", "alpha2", "h_bound", "h_bound_integral", "gamma_lower", "gamma_upper",
                  "gamma_estimate", "operator_norm", "sandwich_pass_rate", "lower_pass_rate",
                  "gamma_inside"]


def _bounds_row(cfg, p):
    g = cfg.bounds_grid
    t = np.linspace(0.0, 1.0, g)
    X, Y = np.meshgrid(t, t, indexing="ij")
    off = X != Y
    chk = kernelop.kernel_bounds_check(p, X[off], Y[off])
    lower_ok = chk.lower * (1.0 - kernelop.BOUNDS_SLACK) <= chk.value
    norm = kernelop.operator_norm(p, cfg.grid_m, tol=cfg.power_tol)
    gamma = specfun.c_alpha(p.alpha1) * specfun.c_alpha(p.alpha2) * norm.value
    try:
        gb = kernelop.gamma_bounds(p)
        lo, hi, inside = gb.lower, gb.upper, gb.lower <= gamma <= gb.upper
    except DomainError:
        lo, hi, inside = "pole", "pole", "pole"
    return [p.alpha1, p.alpha2, specfun.h_bound(p.alpha1, p.alpha2),
            specfun.h_bound_integral(p.alpha1, p.alpha2), lo, hi, gamma, norm.value,
            float(np.mean(chk.ok)), float(np.mean(lower_ok)), inside]


def run_bounds(cfg, sink=None):
    """Kernel sandwich pass rates and gamma bounds for each (a1, a2)."""
    rows = []
    for p in cfg.alpha_pairs:
        row = _bounds_row(cfg, p)
        rows.append(row)
        if sink:
            sink(row)
    checks = []
    for r in rows:
        tag = f"({r[0]:g},{r[1]:g})"
        checks.append(Check(f"sandwich {tag}", r[8] == 1.0, f"pass rate {r[8]:.4f}"))
        if r[10] != "pole":
            checks.append(Check(f"gamma_bounds {tag}", bool(r[10]),
                                f"{r[4]:.4g} <= {r[6]:.4g} <= {r[5]:.4g}"))
    return CampaignResult(BOUNDS_COLUMNS, rows, checks)


# --- fourier -------------------------------------------------------------------

FOURIER_COLUMNS = ["n", "coefficient_re", "coefficient_im", "asymptotic", "ratio", "abs_ratio_minus_one"]


def run_fourier(cfg, sink=None):
    """Quadrature coefficients against the leading asymptotic term."""
    s = cfg.symbol1
    theta_d = s.singularities[s.dominant()].theta
    rows = []
    for n in cfg.N_list:
        c = fourier_coefficient(s, n, cfg.quad_tol)
        asym = fourier_asymptotic(s, n)
        # remove the phase e^{-i n theta_d} carried by the dominant singularity
        ratio = (c * complex(math.cos(n * theta_d), math.sin(n * theta_d))).real / asym
        row = [n, c.real, c.imag, asym, ratio, abs(ratio - 1.0)]
        rows.append(row)
        if sink:
            sink(row)
    dev = [r[5] for r in rows]
    checks = [Check("ratio_gap_decreasing", _strictly_decreasing(dev), str([f"{d:.3e}" for d in dev]))]
    return CampaignResult(FOURIER_COLUMNS, rows, checks)


# --- widom ---------------------------------------------------------------------

WIDOM_COLUMNS = ["N", "m_factor", "matrix_norm", "scaled_operator_norm", "gap"]


def run_widom(cfg, sink=None, m_factors=(1, 3)):
    """Widom identity ||A|| = N ||G_N|| on seeded random matrices."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for N in cfg.N_list:
        A = rng.standard_normal((N, N))
        for mf in m_factors:
            w = kernelop.widom_identity_check(A, mf)
            row = [N, mf, w.matrix_norm, w.scaled_operator_norm, w.gap]
            rows.append(row)
            if sink:
                sink(row)
    worst = max(r[4] for r in rows)
    return CampaignResult(WIDOM_COLUMNS, rows,
                          [Check("widom_gap", worst <= WIDOM_TOL, f"max gap {worst:.3e}")])


# --- kernel table ----------------------------------------------------------------

KERNEL_COLUMNS = ["alpha1", "alpha2", "N", "x", "y", "kernel", "discrete_kernel", "lower", "upper"]


def run_kernel_table(cfg, sink=None, points=11):
    """k and k_N on an off-diagonal grid, with the kernel sandwich bounds."""
    t = np.linspace(0.0, 1.0, points)
    X, Y = np.meshgrid(t, t, indexing="ij")
    off = X != Y
    xs, ys = X[off], Y[off]
    rows = []
    for p in cfg.alpha_pairs:
        chk = kernelop.kernel_bounds_check(p, xs, ys)
        for N in cfg.N_list:
            kn = kernelop.discrete_kernel_eval(p, N, xs, ys)
            for i in range(len(xs)):
                row = [p.alpha1, p.alpha2, N, xs[i], ys[i], chk.value[i], kn[i], chk.lower[i], chk.upper[i]]
                rows.append(row)
                if sink:
                    sink(row)
    return CampaignResult(KERNEL_COLUMNS, rows)


RUNNERS = {
    "convergence": _convergence_result,
    "bounds": run_bounds,
    "fourier": run_fourier,
    "widom": run_widom,
    "kernel-table": run_kernel_table,
}

COLUMNS = {
    "convergence": [f.name for f in fields(ConvergenceRecord)],
    "bounds": BOUNDS_COLUMNS,
    "fourier": FOURIER_COLUMNS,
    "widom": WIDOM_COLUMNS,
    "kernel-table": KERNEL_COLUMNS,
}


def sidecar_path(output_path):
    return Path(output_path).with_suffix(".json")


def run(cfg):
    """Run the campaign, streaming rows to CSV, then write the JSON sidecar.

    Returns the :class:`CampaignResult`.  Exceptions from the numerics
    propagate after the sidecar has recorded them.
    """
    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status, result, error = "ok", None, None
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS[cfg.campaign])
        fh.flush()

        def sink(row):
            if isinstance(row, ConvergenceRecord):
                row = [getattr(row, c) for c in COLUMNS["convergence"]]
            writer.writerow([format_float(v) for v in row])
            fh.flush()

        try:
            result = RUNNERS[cfg.campaign](cfg, sink)
            status = "ok" if result.passed else "assertion-failure"
        except ConvergenceError as exc:
            status, error = "non-convergence", str(exc)
            raise
        except Exception as exc:
            status, error = "error", f"{type(exc).__name__}: {exc}"
            raise
        finally:
            meta = {
                "config": cfg.to_dict(),
                "metadata": {
                    "seed": cfg.seed,
                    "quad_tol": cfg.quad_tol,
                    "power_tol": cfg.power_tol,
                    "wall_time_s": time.perf_counter() - start,
                    "status": status,
                    "error": error,
                },
                "checks": [asdict(c) for c in result.checks] if result else [],
                "extra": result.extra if result else {},
            }
            with open(sidecar_path(out), "w") as sf:
                json.dump(meta, sf, indent=2, default=_json_default)
    return result


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")

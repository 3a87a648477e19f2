"""Test functions, L2 / Sobolev norms, convergence experiments and the
scheme comparison report."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, roots_legendre

from . import basis, kernel
from .errors import (
    DomainCoverageError,
    ExperimentInvalidError,
    InvalidArgumentError,
    MissingSpectrumError,
)
from .schemes import Approximant, DiracDerivComb, SchemeSpec, approximate, get_scheme, reconstruct, reconstruct_deriv
from .sequences import hermite_reproduction

HERMITE_CONSTANT = 1.0 / (72.0 * math.sqrt(70.0))
HERMITE_DERIV_CONSTANT = 1.0 / (12.0 * math.sqrt(210.0))
OPTIMAL_RATIO = math.sqrt(10.0 / 3.0)
REFERENCE = {"function": HERMITE_CONSTANT, "derivative": HERMITE_DERIV_CONSTANT}
DEFAULT_STEPS = (0.2, 0.1, 0.05, 0.025, 0.0125)
GL_NODES = 32
_GL_X, _GL_W = roots_legendre(GL_NODES)


@dataclass(frozen=True)
class TestFunction:
    name: str
    f: Callable
    fprime: Callable
    radius: float
    spectrum: Optional[Callable] = None
    seminorm: Optional[Callable[[float], float]] = None  # closed-form ||f^(gamma)||
    # higher time-domain derivatives, used as quadrature cross-checks
    derivatives: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class


def gaussian(sigma: float = 1.0) -> TestFunction:
    s2 = sigma * sigma

    def f(t):
        return np.exp(-np.asarray(t) ** 2 / (2 * s2))

    def fp(t):
        t = np.asarray(t)
        return -t / s2 * f(t)

    def d4(t):
        x = np.asarray(t) / sigma
        return (x**4 - 6 * x**2 + 3) / s2**2 * f(t)

    def spectrum(w):
        return sigma * math.sqrt(2 * math.pi) * np.exp(-s2 * np.asarray(w) ** 2 / 2)

    def seminorm(g):
        # (1/2pi) int w^2g 2 pi s2 e^{-s2 w^2} dw = Gamma(g + 1/2) sigma^(1 - 2g)
        return math.sqrt(gamma(g + 0.5) * sigma ** (1 - 2 * g))

    return TestFunction(f"gaussian({sigma:g})", f, fp, 10.0 * sigma, spectrum, seminorm, {4: d4})


def sine_window(k: float = 1.0) -> TestFunction:
    def f(t):
        t = np.asarray(t)
        return np.sin(k * t) * np.exp(-t * t / 2)

    def fp(t):
        t = np.asarray(t)
        return (k * np.cos(k * t) - t * np.sin(k * t)) * np.exp(-t * t / 2)

    def spectrum(w):
        w = np.asarray(w)
        return math.sqrt(2 * math.pi) / 2j * (np.exp(-((w - k) ** 2) / 2) - np.exp(-((w + k) ** 2) / 2))

    return TestFunction(f"sine_window({k:g})", f, fp, 10.0, spectrum)


def bump() -> TestFunction:
    """exp(-1/(1 - t^2)) on (-1, 1): smooth, compact, no closed-form spectrum."""

    def f(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < 1
        u = np.where(inside, 1 - t * t, 1.0)
        return np.where(inside, np.exp(-1 / u), 0.0)

    def fp(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < 1
        u = np.where(inside, 1 - t * t, 1.0)
        return np.where(inside, -2 * t / u**2 * np.exp(-1 / u), 0.0)

    return TestFunction("bump", f, fp, 1.0)


TEST_FUNCTIONS = {"gaussian": gaussian, "sine_window": sine_window, "bump": bump}


def get_test_function(name: str) -> TestFunction:
    try:
        return TEST_FUNCTIONS[name]()
    except KeyError:
        raise InvalidArgumentError(f"unknown test function {name!r}") from None


# ---------------------------------------------------------------------------
# norms


def _knot_panels(T: float, lo: float, hi: float):
    k = np.arange(math.floor(lo / T), math.ceil(hi / T))
    a = k * T
    x = (a[:, None] + 0.5 * T * (1 + _GL_X[None, :])).ravel()
    w = np.tile(0.5 * T * _GL_W, k.size)
    return x, w


def l2_error(f: TestFunction, a: Approximant, mode: str = "function") -> float:
    """||f - Q_T f|| (or of the derivatives) by Gauss-Legendre on knot panels."""
    if mode not in kernel.MODES:
        raise InvalidArgumentError(f"mode must be one of {kernel.MODES}")
    R = f.radius
    lo, hi = a.domain
    if lo > -R or hi < R:
        raise DomainCoverageError(f"approximant domain {a.domain} does not cover [-{R}, {R}]")
    x, w = _knot_panels(a.T, -R, R)
    if mode == "function":
        diff = f.f(x) - reconstruct(a, x)
    else:
        diff = f.fprime(x) - reconstruct_deriv(a, x)
    return float(math.sqrt(np.sum(w * diff**2)))


def time_domain_norm(fun: Callable, radius: float, panels: int = 400) -> float:
    x, w = _knot_panels(2 * radius / panels, -radius, radius)
    return float(math.sqrt(np.sum(w * np.asarray(fun(x)) ** 2)))


def sobolev_seminorm(f: TestFunction, order: float, closed_form: bool = True) -> float:
    """||f^(order)|| = ((1/2pi) int |w|^(2 order) |f_hat|^2 dw)^(1/2)."""
    if order < 0:
        raise InvalidArgumentError("order must be nonnegative")
    if closed_form and f.seminorm is not None:
        return f.seminorm(order)
    if f.spectrum is None:
        raise MissingSpectrumError(f"{f.name} has no spectrum")

    def integrand(w):
        return abs(w) ** (2 * order) * abs(f.spectrum(w)) ** 2

    # |f_hat| need not be even for complex spectra; integrate both half-lines
    total = 0.0
    for a, b in ((0.0, np.inf), (-np.inf, 0.0)):
        val, _ = quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=400)
        total += val
    return math.sqrt(total / (2 * math.pi))


# ---------------------------------------------------------------------------
# decay experiments


@dataclass
class ApproximationReport:
    scheme: str
    mode: str
    function: str
    steps: list
    errors: list
    slope: float
    constant: float
    reference_constant: float
    richardson_ratio: float
    kernel_constant: Optional[float] = None
    ratio_to_optimal: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ApproximationReport":
        return cls(**json.loads(text))


def decay_experiment(
    scheme: SchemeSpec,
    f: TestFunction,
    steps=DEFAULT_STEPS,
    mode: str = "function",
    with_kernel: bool = False,
) -> ApproximationReport:
    """Measure ||f - Q_T f|| over a decreasing list of steps and fit the rate.

    The constant is error / (||f^(L)|| T^p) at the smallest step, with L the
    scheme order and p = L (function) or L - 1 (derivative).
    """
    steps = [float(T) for T in steps]
    if len(steps) < 5:
        raise InvalidArgumentError("need at least five steps")
    if any(b >= a for a, b in zip(steps, steps[1:])):
        raise InvalidArgumentError("steps must be strictly decreasing")
    if 2 * f.radius / steps[0] < 20:
        raise InvalidArgumentError("largest step leaves fewer than 20 nodes across the test function")
    domain = (-f.radius, f.radius)
    errors = []
    for T in steps:
        a = approximate(f.f, f.fprime, scheme, T, domain)
        errors.append(l2_error(f, a, mode))
    if any(b >= a for a, b in zip(errors, errors[1:])) or min(errors) <= 0:
        raise ExperimentInvalidError(f"errors are not strictly decreasing: {errors}")
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    L = scheme.order
    power = L if mode == "function" else L - 1
    constant = errors[-1] / (sobolev_seminorm(f, L) * steps[-1] ** power)
    richardson = (errors[-2] / errors[-1]) / (steps[-2] / steps[-1]) ** power
    report = ApproximationReport(
        scheme.name, mode, f.name, steps, errors, slope, constant, REFERENCE[mode], richardson
    )
    if with_kernel:
        k = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode)).constant
        opt = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode, "dual")).constant
        report.kernel_constant = k
        report.ratio_to_optimal = k / opt
    return report


# ---------------------------------------------------------------------------
# scheme properties


def basis_cardinality_deviation(scheme: SchemeSpec, radius: int = 6) -> float:
    """Max |l_j(g_i(. - N k)) - delta_ij delta_k| using the raw (unfiltered) functionals."""
    k = np.arange(-radius, radius + 1)
    worst = 0.0
    for i, g in enumerate(scheme.basis.generators):
        for j, s in enumerate(scheme.sampling):
            x = scheme.stride * k + s.shift
            if isinstance(s, DiracDerivComb):
                vals = -s.sign * basis.eval_generator_deriv(g, x)
            else:
                vals = basis.eval_generator(g, x)
            target = ((k == 0) & (i == j)).astype(float)
            worst = max(worst, float(np.max(np.abs(vals - target))))
    return worst


def interpolation_deviation(scheme: SchemeSpec, f: Optional[TestFunction] = None, T: float = 0.25) -> float:
    """Max deviation of the approximant from the data at the sample points (interior)."""
    f = f or gaussian()
    a = approximate(f.f, f.fprime, scheme, T, (-f.radius, f.radius))
    k = np.arange(math.ceil(-4 / (scheme.stride * T)), math.floor(4 / (scheme.stride * T)) + 1)
    worst = 0.0
    for s in scheme.sampling:
        x = T * (scheme.stride * k + s.shift)
        if isinstance(s, DiracDerivComb):
            d = reconstruct_deriv(a, x) - f.fprime(x)
        else:
            d = reconstruct(a, x) - f.f(x)
        worst = max(worst, float(np.max(np.abs(d))))
    return worst


def table1_report(measure_decay: bool = False) -> dict:
    """Interpolation, support, rates and constants of the three schemes."""
    out = {}
    for name in ("bspline", "interlaced", "hermite"):
        scheme = get_scheme(name)
        row = {
            "basis_cardinal": basis_cardinality_deviation(scheme) < 1e-12,
            "approximant_interpolates": interpolation_deviation(scheme) < 1e-9,
            "finite_support": all(basis.has_finite_support(g) for g in scheme.basis.generators),
        }
        for mode in kernel.MODES:
            k = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode))
            opt = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode, "dual"))
            ratio = k.constant / opt.constant
            row[mode] = {
                "rate": k.power,
                "constant": k.constant,
                "reference": REFERENCE[mode],
                "rel_error": k.constant / REFERENCE[mode] - 1,
                "optimal_constant": opt.constant,
                "actual_over_optimal": ratio,
                "optimal_over_actual": 1 / ratio,
                "expected_actual_over_optimal": OPTIMAL_RATIO if mode == "function" else 1.0,
            }
            if measure_decay:
                rep = decay_experiment(scheme, gaussian(), DEFAULT_STEPS, mode)
                row[mode]["measured_slope"] = rep.slope
                row[mode]["measured_constant"] = rep.constant
        out[name] = row
    return out


def support_audit(threshold: float = 1e-12) -> dict:
    def length(g):
        lo, hi = basis.measure_support(g, threshold)
        return hi - lo

    hermite_sum = length(basis.phi1()) + length(basis.phi2())
    bspline_sum = length(basis.bspline(3)) + length(basis.bspline(4))
    residuals = {t: hermite_reproduction(t).residual() for t in ("beta2", "beta3")}
    return {
        "hermite_support_sum": hermite_sum,
        "bspline_support_sum": bspline_sum,
        "reproduction_residuals": residuals,
    }


# ---------------------------------------------------------------------------
# audit suite


@dataclass(frozen=True)
class AuditResult:
    name: str
    passed: bool
    detail: str


def _audit(name, value, tol, fmt="{:.2e}"):
    return AuditResult(name, bool(value < tol), f"{fmt.format(value)} < {tol:g}")


def sign_convention_report() -> dict:
    """E_min(0) under both signs in front of psi^H G^-1 psi, for each basis."""
    out = {}
    for name in ("hermite", "bspline", "interlaced"):
        b = get_scheme(name).basis
        G = kernel.gram(b, 0.0)
        q = b.unit_fourier(0.0)
        quad_form = float(np.real(q.conj() @ np.linalg.solve(G, q)))
        out[name] = {"plus_sign": 1 + quad_form, "minus_sign": 1 - quad_form}
    return out


def run_verification() -> list[AuditResult]:
    """Numerical audits of the generators, sequences, schemes and kernels."""
    from .schemes import DiracComb, DirectBSplineFilter, FilterChain, FIRFilter, bspline_scheme
    from .sequences import CoefSequence, polynomial_reproduction

    res = []
    k = np.arange(-3, 4).astype(float)
    d = (k == 0).astype(float)
    p1, p2 = basis.phi1(), basis.phi2()
    dev = max(
        np.max(np.abs(basis.eval_generator(p1, k) - d)),
        np.max(np.abs(basis.eval_generator(p2, k))),
        np.max(np.abs(basis.eval_generator_deriv(p1, k))),
        np.max(np.abs(basis.eval_generator_deriv(p2, k) - d)),
    )
    res.append(_audit("interpolation conditions", dev, 1e-13))

    t = np.arange(-1000, 1001) * 1e-3
    pu = sum(basis.eval_generator(p1, t - j) for j in range(-5, 6))
    res.append(_audit("partition of unity", float(np.max(np.abs(pu - 1))), 1e-12))

    sa = support_audit()
    res.append(AuditResult("Hermite support sum", sa["hermite_support_sum"] == 4.0, f"{sa['hermite_support_sum']} == 4"))
    res.append(AuditResult("B-spline pair support sum", sa["bspline_support_sum"] == 7.0, f"{sa['bspline_support_sum']} == 7"))
    for target, r in sa["reproduction_residuals"].items():
        res.append(_audit(f"{target} reproduction", r, 1e-10))
    for ell in range(4):
        res.append(_audit(f"Hermite monomial weights degree {ell}", polynomial_reproduction(ell, (-6, 6)).residual(), 1e-10))

    for name in ("hermite", "bspline", "interlaced"):
        scheme = get_scheme(name)
        worst = 0.0
        for ell in range(4):
            a = approximate(lambda x: x**ell, lambda x: ell * x ** max(ell - 1, 0) * (ell > 0), scheme, 0.5, (-10, 10))
            x = np.linspace(-5, 5, 2001)
            worst = max(worst, float(np.max(np.abs(reconstruct(a, x) - x**ell))))
        res.append(_audit(f"{name} monomial reproduction", worst, 1e-8))

    for name in ("hermite", "bspline", "interlaced"):
        b = get_scheme(name).basis
        nu = np.array([0.3, 1.3, 2.9])
        G = kernel.gram(b, nu)
        herm = float(np.max(np.abs(G - np.conj(np.swapaxes(G, -1, -2)))))
        per = float(np.max(np.abs(G - kernel.gram(b, nu + 2 * np.pi))))
        res.append(_audit(f"{name} Gram Hermitian", herm, 1e-10))
        res.append(_audit(f"{name} Gram periodic", per, 1e-10))

    w = np.linspace(0.0, 3 * np.pi, 97)
    for name in ("hermite", "bspline", "interlaced"):
        for mode in kernel.MODES:
            E = kernel.ErrorKernel(get_scheme(name), mode).components(w)
            ok = all(np.all(c >= 0) for c in E) and E[2][0] == 0.0
            res.append(AuditResult(f"{name} {mode} kernel nonnegative, zero at 0", bool(ok), f"min {min(c.min() for c in E):.2e}"))

    g = gaussian()
    for order in (0, 4):
        a = sobolev_seminorm(g, order, closed_form=False)
        b = time_domain_norm(g.f if order == 0 else g.derivatives[4], g.radius)
        res.append(_audit(f"Parseval order {order}", abs(a / b - 1), 1e-8))

    for name in ("hermite", "bspline", "interlaced"):
        scheme = get_scheme(name)
        for mode in kernel.MODES:
            c = kernel.asymptotic_constant(kernel.ErrorKernel(scheme, mode)).constant
            res.append(_audit(f"{name} {mode} constant", abs(c / REFERENCE[mode] - 1), 1e-3))

    for name in ("hermite", "bspline", "interlaced"):
        audit = kernel.quasi_biorthonormality_audit(get_scheme(name))
        res.append(_audit(f"{name} quasi-biorthonormality", max(audit.values()), 1e-6))
    perturbed = bspline_scheme().with_sampling(
        [DiracComb(0.0, FilterChain((DirectBSplineFilter(), FIRFilter(CoefSequence([0.99, 0.01], 0)))))],
        "bspline-perturbed",
    )
    audit = kernel.quasi_biorthonormality_audit(perturbed)
    res.append(AuditResult("perturbed filter detected", audit[1] > 1e-3, f"{audit[1]:.2e} > 0.001"))

    signs = sign_convention_report()
    ok = all(abs(v["minus_sign"]) < 1e-10 and abs(v["plus_sign"] - 2) < 1e-10 for v in signs.values())
    detail = ", ".join(f"{n}: +{v['plus_sign']:.3g} / -{v['minus_sign']:.1e}" for n, v in signs.items())
    res.append(AuditResult("E_min(0) sign convention", ok, detail))
    return res

"""Acceptance criteria, one test each, with their tolerances and runtime limits."""

from __future__ import annotations

import time

import numpy as np
import pytest

from hermite_splines import basis, kernel
from hermite_splines.experiments import (
    DEFAULT_STEPS,
    HERMITE_CONSTANT,
    HERMITE_DERIV_CONSTANT,
    decay_experiment,
    gaussian,
    l2_error,
    run_verification,
    support_audit,
)
from hermite_splines.schemes import (
    DiracComb,
    DirectBSplineFilter,
    FilterChain,
    FIRFilter,
    approximate,
    bspline_scheme,
    get_scheme,
    hermite_scheme,
)
from hermite_splines.sequences import CoefSequence, hermite_reproduction

SCHEMES = ("hermite", "bspline", "interlaced")


def report(number, text):
    print(f"criterion {number}: {text}")


@pytest.mark.criterion(1, "interpolation conditions exact to 1e-13, < 1 s")
def test_interpolation_conditions():
    start = time.perf_counter()
    k = np.arange(-3, 4).astype(float)
    delta = (k == 0).astype(float)
    p1, p2 = basis.phi1(), basis.phi2()
    dev = max(
        np.max(np.abs(basis.eval_generator(p1, k) - delta)),
        np.max(np.abs(basis.eval_generator(p2, k))),
        np.max(np.abs(basis.eval_generator_deriv(p1, k))),
        np.max(np.abs(basis.eval_generator_deriv(p2, k) - delta)),
    )
    elapsed = time.perf_counter() - start
    report(1, f"max deviation {dev:.2e}, {elapsed:.3f} s")
    assert dev <= 1e-13 and elapsed < 1.0


@pytest.mark.criterion(2, "B-spline reproduction from Hermite generators < 1e-10, < 5 s")
def test_bspline_reproduction():
    start = time.perf_counter()
    residuals = {t: hermite_reproduction(t).residual(step=1e-3) for t in ("beta2", "beta3")}
    elapsed = time.perf_counter() - start
    report(2, f"residuals {residuals}, {elapsed:.3f} s")
    assert max(residuals.values()) < 1e-10 and elapsed < 5.0


@pytest.mark.criterion(3, "support sums 4 and 7 at threshold 1e-12")
def test_support_witness():
    audit = support_audit(1e-12)
    report(3, f"Hermite {audit['hermite_support_sum']}, B-spline pair {audit['bspline_support_sum']}")
    assert audit["hermite_support_sum"] == 4.0
    assert audit["bspline_support_sum"] == 7.0


@pytest.mark.criterion(4, "kernel constants within 1e-3 relative, < 30 s")
def test_kernel_constants():
    start = time.perf_counter()
    worst = 0.0
    for name in SCHEMES:
        for mode, ref in (("function", HERMITE_CONSTANT), ("derivative", HERMITE_DERIV_CONSTANT)):
            c = kernel.asymptotic_constant(kernel.ErrorKernel(get_scheme(name), mode)).constant
            rel = abs(c / ref - 1)
            report(4, f"{name} {mode}: {c:.8e} (rel {rel:.1e})")
            worst = max(worst, rel)
    elapsed = time.perf_counter() - start
    report(4, f"worst rel {worst:.1e}, {elapsed:.2f} s")
    assert worst < 1e-3 and elapsed < 30.0


@pytest.mark.criterion(5, "ratio to optimal sqrt(10/3) (function) and 1 (derivative) within 1e-3")
def test_ratio_to_optimal():
    for name in SCHEMES:
        s = get_scheme(name)
        ratios = {}
        for mode in kernel.MODES:
            actual = kernel.asymptotic_constant(kernel.ErrorKernel(s, mode)).constant
            optimal = kernel.asymptotic_constant(kernel.ErrorKernel(s, mode, "dual")).constant
            ratios[mode] = actual / optimal
        report(5, f"{name}: function {ratios['function']:.6f}, derivative {ratios['derivative']:.6f}")
        assert abs(ratios["function"] - 1.8257) < 1e-3
        assert abs(ratios["derivative"] - 1.0) < 1e-3


@pytest.mark.criterion(6, "Gaussian decay slopes and constants at T = 0.0125, < 2 min")
def test_empirical_decay():
    start = time.perf_counter()
    g = gaussian()
    bands = {"function": ((3.9, 4.1), HERMITE_CONSTANT), "derivative": ((2.9, 3.1), HERMITE_DERIV_CONSTANT)}
    for name in SCHEMES:
        tol = 0.10 if name == "interlaced" else 0.05
        for mode, ((lo, hi), ref) in bands.items():
            rep = decay_experiment(get_scheme(name), g, DEFAULT_STEPS, mode)
            rel = rep.constant / ref - 1
            report(6, f"{name} {mode}: slope {rep.slope:.4f}, constant {rep.constant:.6e} (rel {rel:+.2e})")
            assert lo <= rep.slope <= hi
            assert abs(rel) < tol
    elapsed = time.perf_counter() - start
    report(6, f"{elapsed:.2f} s")
    assert elapsed < 120.0


@pytest.mark.criterion(7, "kernel-predicted error within 3% of measured at T = 0.05 (Hermite, Gaussian)")
def test_predicted_vs_measured():
    g = gaussian()
    T = 0.05
    predicted = kernel.predicted_error(g.spectrum, kernel.ErrorKernel(hermite_scheme()), T)
    measured = l2_error(g, approximate(g.f, g.fprime, hermite_scheme(), T, (-g.radius, g.radius)))
    report(7, f"predicted {predicted:.6e}, measured {measured:.6e}, ratio {predicted / measured:.5f}")
    assert abs(predicted / measured - 1) < 0.03


@pytest.mark.criterion(8, "moment deviations < 1e-6, perturbed control > 1e-3")
def test_quasi_biorthonormality():
    for name in SCHEMES:
        audit = kernel.quasi_biorthonormality_audit(get_scheme(name))
        report(8, f"{name}: " + ", ".join(f"l={k} {v:.1e}" for k, v in audit.items()))
        assert set(audit) == {0, 1, 2, 3}
        assert max(audit.values()) < 1e-6
    perturbed = bspline_scheme().with_sampling(
        [DiracComb(0.0, FilterChain((DirectBSplineFilter(), FIRFilter(CoefSequence([0.99, 0.01], 0)))))],
        "perturbed",
    )
    control = max(kernel.quasi_biorthonormality_audit(perturbed).values())
    report(8, f"perturbed control {control:.2e}")
    assert control > 1e-3


@pytest.mark.criterion(9, "property audits all green in verify")
def test_property_audits():
    results = run_verification()
    wanted = ("partition of unity", "Gram Hermitian", "Gram periodic", "nonnegative", "Parseval", "monomial reproduction")
    for key in wanted:
        assert any(key in r.name for r in results), key
    failed = [r for r in results if not r.passed]
    report(9, f"{len(results) - len(failed)}/{len(results)} audits passed")
    assert not failed, failed

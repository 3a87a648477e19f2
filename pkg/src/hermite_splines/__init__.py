"""Cubic Hermite splines, generalized sampling and Fourier error kernels."""

from .basis import (
    Generator,
    GeneratorSet,
    bspline,
    eval_generator,
    eval_generator_deriv,
    fourier_generator,
    measure_support,
    phi1,
    phi2,
)
from .experiments import (
    ApproximationReport,
    TestFunction,
    decay_experiment,
    gaussian,
    l2_error,
    sobolev_seminorm,
    support_audit,
    table1_report,
)
from .kernel import (
    ErrorKernel,
    asymptotic_constant,
    dual_fourier,
    gram,
    kernel_min,
    kernel_total,
    predicted_error,
    quasi_biorthonormality_audit,
    riesz_bounds,
)
from .schemes import (
    Approximant,
    SchemeSpec,
    approximate,
    bspline_scheme,
    get_scheme,
    hermite_scheme,
    interlaced_scheme,
    reconstruct,
    reconstruct_deriv,
    sample,
    tabulate_interlaced,
)
from .sequences import CoefSequence, bspline_prefilter, hermite_reproduction, polynomial_reproduction

__version__ = "0.1.0"

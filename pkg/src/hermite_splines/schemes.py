"""Approximation operators: Hermite interpolation, prefiltered cubic B-spline
interpolation and interlaced derivative sampling.

All schemes share one step convention: ``T`` is the knot spacing of the
reconstruction space.  Coefficients are indexed by the shift lattice, so
coefficient ``k`` of a stride-``N`` scheme multiplies ``g_i(t/T - N*k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from . import basis
from .basis import Generator, GeneratorSet
from .errors import InvalidArgumentError, MissingDerivativeError, RadiusTooSmallError
from .sequences import CoefSequence, bspline_prefilter, prefilter_impulse_response

# enough taps of the direct filter that the neglected moments are below 1e-25
_FILTER_TAP_RADIUS = 60
DOMAIN_PADDING = 8


# ---------------------------------------------------------------------------
# digital filters acting on sample sequences


@dataclass(frozen=True)
class DirectBSplineFilter:
    """Inverse of the cubic B-spline sampling filter (1/6, 2/3, 1/6)."""

    boundary: str = "mirror"

    def apply(self, seq: CoefSequence) -> CoefSequence:
        return bspline_prefilter(seq, self.boundary)

    def response(self, w):
        return 3.0 / (2.0 + np.cos(w)) + 0j

    def taps(self) -> CoefSequence:
        return prefilter_impulse_response(_FILTER_TAP_RADIUS)


@dataclass(frozen=True)
class FIRFilter:
    taps_seq: CoefSequence

    def apply(self, seq: CoefSequence) -> CoefSequence:
        return seq.convolve(self.taps_seq)

    def response(self, w):
        w = np.asarray(w, dtype=float)
        n = self.taps_seq.indices
        return np.exp(-1j * np.multiply.outer(w, n)) @ self.taps_seq.values

    def taps(self) -> CoefSequence:
        return self.taps_seq


@dataclass(frozen=True)
class FilterChain:
    filters: tuple

    def apply(self, seq: CoefSequence) -> CoefSequence:
        for f in self.filters:
            seq = f.apply(seq)
        return seq

    def response(self, w):
        out = 1.0 + 0j
        for f in self.filters:
            out = out * f.response(w)
        return out

    def taps(self) -> CoefSequence:
        out = CoefSequence(np.ones(1), 0)
        for f in self.filters:
            out = out.convolve(f.taps())
        return out


Filter = Union[DirectBSplineFilter, FIRFilter, FilterChain]


def filter_moment(filt: Filter, ell: int) -> float:
    """sum_n h[n] * n**ell."""
    taps = filt.taps()
    return float(np.sum(taps.values * taps.indices.astype(float) ** ell))


# ---------------------------------------------------------------------------
# sampling functionals


@dataclass(frozen=True)
class DiracComb:
    """c[k] = sum_m h[k - m] f(T (N m + shift)), or plain samples without a prefilter."""

    shift: float = 0.0
    prefilter: Optional[Filter] = None

    needs_derivative = False

    def fourier(self, w, stride: int = 1):
        w = np.asarray(w, dtype=float)
        out = np.exp(-1j * w * self.shift)
        if self.prefilter is not None:
            out = out * np.conj(self.prefilter.response(stride * w))
        return out


@dataclass(frozen=True)
class DiracDerivComb:
    """Functional sign * delta'(t - shift): yields -sign * T * f'(T (N k + shift))."""

    shift: float = 0.0
    sign: int = -1

    needs_derivative = True

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise InvalidArgumentError("sign must be +1 or -1")

    def fourier(self, w, stride: int = 1):
        w = np.asarray(w, dtype=float)
        return self.sign * 1j * w * np.exp(-1j * w * self.shift)


Functional = Union[DiracComb, DiracDerivComb]


@dataclass(frozen=True)
class SchemeSpec:
    name: str
    basis: GeneratorSet
    sampling: tuple
    order: int = 4

    def __post_init__(self):
        object.__setattr__(self, "sampling", tuple(self.sampling))
        if len(self.sampling) != len(self.basis):
            raise InvalidArgumentError("need one sampling functional per generator")

    @property
    def stride(self) -> int:
        return self.basis.stride

    @property
    def needs_derivative(self) -> bool:
        return any(s.needs_derivative for s in self.sampling)

    def sampling_fourier(self, w) -> np.ndarray:
        """Transforms of the sampling functionals in scheme coordinates, shape w.shape + (n,)."""
        return np.stack([s.fourier(w, self.stride) for s in self.sampling], axis=-1)

    def with_sampling(self, sampling: Sequence[Functional], name: Optional[str] = None) -> "SchemeSpec":
        return SchemeSpec(name or self.name, self.basis, tuple(sampling), self.order)


def hermite_scheme() -> SchemeSpec:
    return SchemeSpec("hermite", basis.hermite_pair(), (DiracComb(0.0), DiracDerivComb(0.0, -1)))


def bspline_scheme(boundary: str = "mirror") -> SchemeSpec:
    return SchemeSpec(
        "bspline", basis.cubic_bspline_set(), (DiracComb(0.0, DirectBSplineFilter(boundary)),)
    )


def interlaced_scheme() -> SchemeSpec:
    return SchemeSpec(
        "interlaced",
        basis.interlaced_pair(),
        (DiracComb(0.0), DiracDerivComb(basis.INTERLACED_DERIV_OFFSET, -1)),
    )


SCHEMES: dict[str, Callable[[], SchemeSpec]] = {
    "hermite": hermite_scheme,
    "bspline": bspline_scheme,
    "interlaced": interlaced_scheme,
}


def get_scheme(name: str) -> SchemeSpec:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise InvalidArgumentError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None


# ---------------------------------------------------------------------------
# sampling and reconstruction


@dataclass(frozen=True)
class Approximant:
    scheme: SchemeSpec
    T: float
    coefs: tuple
    domain: tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidArgumentError("step T must be positive")
        object.__setattr__(self, "coefs", tuple(self.coefs))
        if len(self.coefs) != len(self.scheme.basis):
            raise InvalidArgumentError("need one coefficient sequence per generator")

    @cached_property
    def spline_coefs(self) -> CoefSequence:
        """Centered cubic B-spline coefficients of an interlaced approximant."""
        out = CoefSequence(np.zeros(1), 0)
        for i, c in enumerate(self.coefs, start=1):
            if len(c) == 0:
                continue
            off, a = basis.cardinal_interlaced_coefficients(i)
            term = c.upsample(self.scheme.stride).convolve(CoefSequence(a, off))
            lo = min(out.offset, term.offset)
            hi = max(out.last, term.last)
            idx = np.arange(lo, hi + 1)
            out = CoefSequence(out[idx] + term[idx], lo)
        return out

    def _synthesize(self, t, deriv: int):
        u = np.asarray(t, dtype=float) / self.T
        gens = self.scheme.basis.generators
        if all(g.kind in basis._CARDINAL for g in gens):
            d = self.spline_coefs
            out = basis.spline_eval(d.offset, d.values, u, deriv=deriv)
        else:
            out = np.zeros_like(u)
            for g, c in zip(gens, self.coefs):
                out = out + _synthesize_compact(g, self.scheme.stride, c, u, deriv)
        return out / self.T**deriv

    def __call__(self, t):
        return reconstruct(self, t)


def _synthesize_compact(g: Generator, stride: int, c: CoefSequence, u, deriv: int):
    if len(c) == 0:
        return np.zeros_like(u)
    if not g.compact:
        raise InvalidArgumentError(f"{g.kind} has no compact time-domain form")
    lo, hi = g.support
    ev = basis.eval_generator if deriv == 0 else basis.eval_generator_deriv
    kmin = np.ceil((u - hi) / stride).astype(np.int64)
    out = np.zeros_like(u)
    for j in range(int(math.ceil((hi - lo) / stride)) + 1):
        k = kmin + j
        out += c[k] * ev(g, u - stride * k)
    return out


def reconstruct(a: Approximant, t):
    """Value of sum_i sum_k c_i[k] g_i(t/T - N k)."""
    out = a._synthesize(t, 0)
    return float(out) if np.ndim(out) == 0 else out


def reconstruct_deriv(a: Approximant, t):
    """First derivative of the approximant (factor 1/T from the chain rule)."""
    out = a._synthesize(t, 1)
    return float(out) if np.ndim(out) == 0 else out


def lattice_range(scheme: SchemeSpec, T: float, domain: tuple[float, float], pad: Optional[float] = None):
    """Shift indices k whose lattice points N*k*T fall in the padded domain."""
    a, b = domain
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise InvalidArgumentError("domain must be a finite interval")
    N = scheme.stride
    if pad is None:
        pad = DOMAIN_PADDING * N * T
    return np.arange(math.floor((a - pad) / (N * T)), math.ceil((b + pad) / (N * T)) + 1)


def sample_at(
    f: Callable,
    f_deriv: Optional[Callable],
    scheme: SchemeSpec,
    T: float,
    k: np.ndarray,
) -> list[CoefSequence]:
    """Apply each sampling functional at the consecutive shift indices k."""
    if not T > 0:
        raise InvalidArgumentError("step T must be positive")
    if scheme.needs_derivative and f_deriv is None:
        raise MissingDerivativeError(f"scheme {scheme.name} needs derivative samples")
    out = []
    for s in scheme.sampling:
        x = T * (scheme.stride * k + s.shift)
        if isinstance(s, DiracDerivComb):
            vals = -s.sign * T * np.asarray(f_deriv(x), dtype=float)
            seq = CoefSequence(vals, int(k[0]))
        else:
            seq = CoefSequence(np.asarray(f(x), dtype=float), int(k[0]))
            if s.prefilter is not None:
                seq = s.prefilter.apply(seq)
        out.append(seq)
    return out


def sample(
    f: Callable,
    f_deriv: Optional[Callable],
    scheme: SchemeSpec,
    T: float,
    domain: tuple[float, float],
) -> list[CoefSequence]:
    """Apply each sampling functional at step T on the padded domain."""
    if not T > 0:
        raise InvalidArgumentError("step T must be positive")
    return sample_at(f, f_deriv, scheme, T, lattice_range(scheme, T, domain))


def approximate(f, f_deriv, scheme: SchemeSpec, T: float, domain) -> Approximant:
    return Approximant(scheme, T, tuple(sample(f, f_deriv, scheme, T, domain)), tuple(domain))


# ---------------------------------------------------------------------------
# interlaced generators on a grid


@dataclass(frozen=True)
class InterlacedTable:
    """Tabulated cardinal interlaced generators and their derivatives."""

    t: np.ndarray
    values: np.ndarray  # shape (2, len(t))
    derivs: np.ndarray
    truncation_bound: float
    interpolation_deviation: float
    cardinality_deviation: float
    printed_deviation: dict = field(default_factory=dict)

    def evaluate(self, i: int, t, deriv: int = 0):
        """Piecewise cubic Hermite interpolation of the table (zero outside)."""
        spl = CubicHermiteSpline(self.t, self.values[i - 1], self.derivs[i - 1], extrapolate=False)
        out = spl(np.asarray(t, dtype=float), nu=deriv)
        return np.nan_to_num(out, nan=0.0)


TAIL_TOLERANCE = 1e-8


def tabulate_interlaced(resolution: float = 1e-2, radius: float = 20.0) -> InterlacedTable:
    """Sample both cardinal interlaced generators on [-radius, radius].

    The exact values come from their B-spline expansions.  The reported
    ``truncation_bound`` is the largest |g| or |g'| beyond ``radius``, and
    ``interpolation_deviation`` the worst error of cubic interpolation of the
    table at cell midpoints.
    """
    if resolution > 1e-2 or resolution <= 0:
        raise InvalidArgumentError("resolution must be in (0, 1e-2]")
    if radius < 10:
        raise InvalidArgumentError("radius must be at least 10")
    n = int(math.ceil(radius / resolution))
    t = resolution * np.arange(-n, n + 1)
    gens = (basis.interlaced(1), basis.interlaced(2))
    vals = np.stack([basis.eval_generator(g, t) for g in gens])
    ders = np.stack([basis.eval_generator_deriv(g, t) for g in gens])

    tail_t = np.linspace(radius, radius + 50, 20001)
    tail_t = np.concatenate([-tail_t, tail_t])
    tail = max(
        float(np.max(np.abs(f(g, tail_t))))
        for g in gens
        for f in (basis.eval_generator, basis.eval_generator_deriv)
    )
    if tail > TAIL_TOLERANCE:
        raise RadiusTooSmallError(f"tail {tail:.2e} exceeds {TAIL_TOLERANCE:g} at radius {radius}")

    table = InterlacedTable(t, vals, ders, tail, 0.0, 0.0)
    mid = t[:-1] + resolution / 2
    interp_dev = max(
        float(np.max(np.abs(table.evaluate(i, mid) - basis.eval_generator(g, mid))))
        for i, g in enumerate(gens, start=1)
    )
    k = np.arange(-int(radius // 2) + 1, int(radius // 2))
    s = basis.INTERLACED_DERIV_OFFSET
    card = max(
        np.max(np.abs(basis.eval_generator(gens[0], 2.0 * k) - (k == 0))),
        np.max(np.abs(basis.eval_generator_deriv(gens[0], 2.0 * k + s))),
        np.max(np.abs(basis.eval_generator(gens[1], 2.0 * k))),
        np.max(np.abs(basis.eval_generator_deriv(gens[1], 2.0 * k + s) - (k == 0))),
    )
    w = np.linspace(0.05, 3.0, 60)
    printed = {
        f"generator{i}": float(
            np.max(np.abs(basis.fourier_generator(g, w) - basis.fourier_generator(basis.interlaced(i, True), w)))
        )
        for i, g in enumerate(gens, start=1)
    }
    printed["dc_value_printed1"] = basis.fourier_generator(basis.interlaced(1, True), 0.0).real
    printed["dc_value_cardinal1"] = basis.fourier_generator(gens[0], 0.0).real
    return InterlacedTable(t, vals, ders, tail, interp_dev, float(card), printed)

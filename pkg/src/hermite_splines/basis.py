"""Generator functions: cubic Hermite pair, causal B-splines, interlaced bases.

Every generator has an exact time-domain evaluator (where one exists) and a
Fourier transform ``g_hat(w) = int g(t) exp(-1j*w*t) dt``.

The interlaced ids come in two flavours:

* ``interlaced1`` / ``interlaced2`` evaluate the closed-form transforms exactly
  as they are usually printed.  They are kept for auditing: the first one
  integrates to 3/2 (a stride-2 partition of unity needs 2) and the second
  one has simple poles at ``w = 0`` and at odd multiples of pi, so the pair
  is not a Riesz basis.
* ``interlaced_cardinal1`` / ``interlaced_cardinal2`` are the cubic splines
  (integer knots, stride 2) that are cardinal for the functionals
  ``f(2k)`` and ``f'(2k + 1/2)``.  They are what the interlaced scheme uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, MeasurementFailedError, UnsupportedOperationError

SUPPORT_GRID_STEP = 1e-3
INTERLACED_DERIV_OFFSET = 0.5
# |a[n]| of the cardinal interlaced splines decays like 0.2**|n|; 48 taps per side is far below eps.
_CARDINAL_HALF_WIDTH = 48
_CARDINAL_FFT_SIZE = 512

KINDS = (
    "phi1",
    "phi2",
    "bspline",
    "interlaced1",
    "interlaced2",
    "interlaced_cardinal1",
    "interlaced_cardinal2",
)
_PIECEWISE_POLY = ("phi1", "phi2", "bspline")
_PRINTED = ("interlaced1", "interlaced2")
_CARDINAL = ("interlaced_cardinal1", "interlaced_cardinal2")


@dataclass(frozen=True)
class Generator:
    """A single generator ``t -> base(t - shift)``.

    ``order`` is the approximation order of the family the generator belongs to
    (for ``bspline`` it is also the B-spline order, i.e. degree + 1).
    """

    kind: str
    order: int = 4
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unsupported generator id {self.kind!r}")
        if self.kind == "bspline" and not 1 <= self.order <= 6:
            raise InvalidArgumentError("B-spline order must be in 1..6")

    @property
    def support(self) -> tuple[float, float]:
        if self.kind in ("phi1", "phi2"):
            lo, hi = -1.0, 1.0
        elif self.kind == "bspline":
            lo, hi = 0.0, float(self.order)
        else:
            return (-math.inf, math.inf)
        return (lo + self.shift, hi + self.shift)

    @property
    def compact(self) -> bool:
        return self.kind in _PIECEWISE_POLY

    @property
    def decay(self) -> int:
        """Exponent p such that |g_hat(w)| = O(|w|**-p)."""
        if self.kind in ("phi1", "phi2"):
            return 3
        if self.kind == "bspline":
            return self.order
        if self.kind == "interlaced2":
            return 3
        return 4


def phi1() -> Generator:
    return Generator("phi1")


def phi2() -> Generator:
    return Generator("phi2")


def bspline(order: int, shift: float = 0.0) -> Generator:
    return Generator("bspline", order=order, shift=shift)


def centered_cubic_bspline() -> Generator:
    return Generator("bspline", order=4, shift=-2.0)


def interlaced(i: int, printed: bool = False) -> Generator:
    if i not in (1, 2):
        raise InvalidArgumentError("interlaced generator index must be 1 or 2")
    return Generator(f"interlaced{i}" if printed else f"interlaced_cardinal{i}")


# ---------------------------------------------------------------------------
# time domain


def _causal_bspline(t, order):
    """Cox-de Boor recursion on the knots 0, 1, ..., order (right-continuous)."""
    N = [((t >= i) & (t < i + 1)).astype(float) for i in range(order)]
    for p in range(1, order):
        N = [((t - i) * N[i] + (i + p + 1 - t) * N[i + 1]) / p for i in range(order - p)]
    return N


def _causal_bspline_deriv(t, order):
    if order == 1:
        return np.zeros_like(t)
    # uniform knots: d/dt N_{0,p} = N_{0,p-1}(t) - N_{0,p-1}(t - 1)
    return _causal_bspline(t, order - 1)[0] - _causal_bspline(t - 1.0, order - 1)[0]


def _phi1(t):
    a = np.abs(t)
    return np.where(a <= 1.0, (2 * a + 1) * (a - 1) ** 2, 0.0)


def _phi2(t):
    a = np.abs(t)
    return np.where(a <= 1.0, t * (a - 1) ** 2, 0.0)


def _phi1_deriv(t):
    a = np.abs(t)
    return np.where((t >= -1.0) & (t < 1.0), 6 * t * (a - 1), 0.0)


def _phi2_deriv(t):
    a = np.abs(t)
    return np.where((t >= -1.0) & (t < 1.0), (a - 1) * (3 * a - 1), 0.0)


def eval_generator(g: Generator, t):
    """Exact pointwise value of ``g`` at ``t`` (scalar or array)."""
    scalar = np.ndim(t) == 0
    u = np.asarray(t, dtype=float) - g.shift
    if g.kind == "phi1":
        out = _phi1(u)
    elif g.kind == "phi2":
        out = _phi2(u)
    elif g.kind == "bspline":
        out = _causal_bspline(u, g.order)[0]
    elif g.kind in _CARDINAL:
        out = spline_eval(*cardinal_interlaced_coefficients(int(g.kind[-1])), u)
    else:
        raise UnsupportedOperationError(
            f"{g.kind} is only defined in the Fourier domain; use the cardinal interlaced ids"
        )
    return float(out) if scalar else out


def eval_generator_deriv(g: Generator, t):
    """First derivative, right limit at knots."""
    scalar = np.ndim(t) == 0
    u = np.asarray(t, dtype=float) - g.shift
    if g.kind == "phi1":
        out = _phi1_deriv(u)
    elif g.kind == "phi2":
        out = _phi2_deriv(u)
    elif g.kind == "bspline":
        out = _causal_bspline_deriv(u, g.order)
    elif g.kind in _CARDINAL:
        out = spline_eval(*cardinal_interlaced_coefficients(int(g.kind[-1])), u, deriv=1)
    else:
        raise UnsupportedOperationError(f"no time-domain derivative for {g.kind}")
    return float(out) if scalar else out


def spline_eval(offset: int, coefs: np.ndarray, u, deriv: int = 0):
    """Evaluate sum_n coefs[n - offset] * beta3(u - n) with the centered cubic B-spline."""
    u = np.asarray(u, dtype=float)
    base = np.floor(u).astype(np.int64)
    out = np.zeros_like(u)
    beta = centered_cubic_bspline()
    ev = eval_generator if deriv == 0 else eval_generator_deriv
    for j in range(-2, 2):
        n = base - j
        idx = n - offset
        ok = (idx >= 0) & (idx < len(coefs))
        if not np.any(ok):
            continue
        c = np.where(ok, coefs[np.clip(idx, 0, len(coefs) - 1)], 0.0)
        out += c * ev(beta, u - n)
    return out


# ---------------------------------------------------------------------------
# Fourier domain


# The closed forms lose about eps / w**4 to cancellation, so below HERMITE_SERIES_SWITCH the
# full Taylor series is summed instead (terms fall off like w**2n / (2n)!).
HERMITE_SERIES_SWITCH = 2.0
_N_TERMS = 24
_n = np.arange(2, 2 + _N_TERMS)
_PHI1_SERIES = np.array([12 * (-1) ** n * (2 * n - 2) / math.factorial(2 * n) for n in _n])
_PHI2_SERIES = np.array([4 * (-1) ** n * (2 - 2 * n) / math.factorial(2 * n + 1) for n in _n])


def _even_series(coefs, w2):
    # Horner in w**2
    out = np.zeros_like(w2)
    for c in coefs[::-1]:
        out = out * w2 + c
    return out


def _phi1_hat(w):
    small = np.abs(w) < HERMITE_SERIES_SWITCH
    ws = np.where(small, 1.0, w)
    closed = 12 * (2 - 2 * np.cos(ws) - ws * np.sin(ws)) / ws**4
    series = _even_series(_PHI1_SERIES, w * w)
    return np.where(small, series, closed).astype(complex)


def _phi2_hat(w):
    small = np.abs(w) < HERMITE_SERIES_SWITCH
    ws = np.where(small, 1.0, w)
    closed = 4 * (3 * np.sin(ws) - ws * (np.cos(ws) + 2)) / ws**4
    series = w * _even_series(_PHI2_SERIES, w * w)
    return 1j * np.where(small, series, closed)


def _sinc_half(w):
    # sin(w/2)/(w/2); np.sinc is exact at 0 and cancellation-free elsewhere
    return np.sinc(w / (2 * np.pi))


def _bspline_hat(w, order):
    return np.exp(-0.5j * order * w) * _sinc_half(w) ** order


def _interlaced2_printed(w):
    # beta3_hat(w) * (2 - cos w) / (2j sin w); the zeros of beta3_hat at 2*pi*k (k != 0)
    # cancel the sine, the remaining zeros of the sine (0 and odd multiples of pi) are poles.
    s = np.sin(w)
    b = _sinc_half(w) ** 4
    k = np.rint(w / np.pi)
    near = np.abs(w - k * np.pi)
    # near 2 pi k (k != 0) the value is O(dist**3); only the exact 0/0 needs patching
    removable = (near < 1e-6) & (k % 2 == 0) & (k != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = b * (2 - np.cos(w)) / (2j * s)
    val = np.where(removable, 0.0, val)
    pole = (near <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(w))) & ~removable
    return np.where(pole, complex(np.inf, np.inf), val)


def fourier_generator(g: Generator, w):
    """Fourier transform of ``g`` at ``w`` (scalar or array), complex valued."""
    scalar = np.ndim(w) == 0
    w = np.asarray(w, dtype=float)
    if g.kind == "phi1":
        out = _phi1_hat(w)
    elif g.kind == "phi2":
        out = _phi2_hat(w)
    elif g.kind == "bspline":
        out = _bspline_hat(w, g.order)
    elif g.kind == "interlaced1":
        # 3 e^{-2jw} (e^{jw} - 1)^4 / (2 w^4) == (3/2) sinc(w/2)^4 exactly
        out = 1.5 * _sinc_half(w) ** 4 + 0j
    elif g.kind == "interlaced2":
        out = _interlaced2_printed(w)
    else:
        A = cardinal_interlaced_symbol(w)[int(g.kind[-1]) - 1]
        out = A * _sinc_half(w) ** 4
    if g.shift:
        out = out * np.exp(-1j * w * g.shift)
    return complex(out) if scalar else out


def interlaced_printed_literal(i: int, w):
    """The printed interlaced transforms evaluated verbatim (no simplification)."""
    w = np.asarray(w, dtype=float)
    e = np.exp(1j * w)
    if i == 1:
        return 3 * np.exp(-2j * w) * (-1 + e) ** 4 / (2 * w**4)
    return np.exp(-2j * w) * (-1 + e) ** 4 * (1 + e * (-4 + e)) / ((2 - 2 * e**2) * w**4)


# ---------------------------------------------------------------------------
# cardinal interlaced splines


def _sample_symbol(fun, offset, theta):
    m = np.arange(-3, 4)
    vals = fun(centered_cubic_bspline(), m + offset)
    return np.exp(-1j * np.multiply.outer(theta, m)) @ vals


def cardinal_interlaced_symbol(w, deriv_offset: float = INTERLACED_DERIV_OFFSET):
    """2*pi-periodic B-spline coefficient symbols (A1(w), A2(w)) of the cardinal pair.

    phi_i = sum_n a_i[n] beta3(. - n) must satisfy phi_1(2k) = delta[k],
    phi_1'(2k+s) = 0, phi_2(2k) = 0, phi_2'(2k+s) = delta[k].  Decimating by two
    gives, for every w, a 2x2 system in (A_i(w), A_i(w + pi)) solved by Cramer.
    """
    w = np.asarray(w, dtype=float)
    B = _sample_symbol(eval_generator, 0.0, w)
    Bp = _sample_symbol(eval_generator, 0.0, w + np.pi)
    D = _sample_symbol(eval_generator_deriv, deriv_offset, w)
    Dp = _sample_symbol(eval_generator_deriv, deriv_offset, w + np.pi)
    det = B * Dp - Bp * D
    return np.stack([2 * Dp / det, -2 * Bp / det])


@lru_cache(maxsize=4)
def _cardinal_coefficients(deriv_offset: float):
    M = _CARDINAL_FFT_SIZE
    theta = 2 * np.pi * np.arange(M) / M
    A = cardinal_interlaced_symbol(theta, deriv_offset)
    a = np.fft.ifft(A, axis=1).real
    h = _CARDINAL_HALF_WIDTH
    idx = np.r_[np.arange(-h, 0) % M, np.arange(0, h + 1)]
    out = a[:, idx]
    out.setflags(write=False)
    return out


def cardinal_interlaced_coefficients(i: int, deriv_offset: float = INTERLACED_DERIV_OFFSET):
    """(offset, coefficients) of cardinal interlaced generator ``i`` in the centered cubic B-spline basis."""
    return -_CARDINAL_HALF_WIDTH, _cardinal_coefficients(deriv_offset)[i - 1]


# ---------------------------------------------------------------------------
# support


def measure_support(g: Generator, threshold: float = 1e-12, window: float = 64.0):
    """Smallest grid-bracketed interval outside which |g| < threshold.

    The grid has step ``SUPPORT_GRID_STEP``; the returned endpoints are the grid
    points just outside the first and last significant samples, so integer
    support endpoints are recovered exactly.
    """
    if threshold <= 0:
        raise InvalidArgumentError("threshold must be positive")
    per_unit = int(round(1 / SUPPORT_GRID_STEP))
    lo, hi = g.support
    if math.isfinite(lo):
        lo_i, hi_i = math.floor(lo - 1) * per_unit, math.ceil(hi + 1) * per_unit
    else:
        lo_i, hi_i = -int(window * per_unit), int(window * per_unit)
    idx = np.arange(lo_i, hi_i + 1)
    vals = np.abs(eval_generator(g, idx / per_unit))
    big = np.flatnonzero(vals >= threshold)
    if big.size == 0:
        raise MeasurementFailedError("generator is below threshold everywhere on the window")
    if big[0] == 0 or big[-1] == idx.size - 1:
        raise MeasurementFailedError("generator does not decay below threshold inside the window")
    return (idx[big[0] - 1] / per_unit, idx[big[-1] + 1] / per_unit)


def has_finite_support(g: Generator) -> bool:
    """Numerical witness for compact support: the measured support must not grow
    when the threshold drops from 1e-6 to 1e-13 (exponential tails grow by several units)."""
    try:
        a = measure_support(g, 1e-6)
        b = measure_support(g, 1e-13)
    except MeasurementFailedError:
        return False
    return (b[1] - b[0]) - (a[1] - a[0]) < 0.5


@dataclass(frozen=True)
class GeneratorSet:
    """Generators shifted along the lattice ``stride * Z``.

    ``scale = 1/stride`` maps the stride lattice to the unit lattice: the
    unit-lattice generators are ``psi_i(t) = g_i(stride * t)``, whose
    transforms are ``scale * g_hat(scale * nu)``.
    """

    generators: tuple[Generator, ...]
    stride: int = 1

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not 1 <= len(self.generators) <= 2:
            raise InvalidArgumentError("a generator set holds one or two generators")
        if self.stride not in (1, 2):
            raise InvalidArgumentError("stride must be 1 or 2")

    @property
    def scale(self) -> float:
        return 1.0 / self.stride

    def __len__(self):
        return len(self.generators)

    @property
    def decay(self) -> int:
        return min(g.decay for g in self.generators)

    def fourier(self, w) -> np.ndarray:
        """Stacked transforms, shape ``w.shape + (n_generators,)``."""
        w = np.asarray(w, dtype=float)
        return np.stack([fourier_generator(g, w) for g in self.generators], axis=-1)

    def unit_fourier(self, nu) -> np.ndarray:
        """Transforms of the generators rescaled to the unit shift lattice."""
        with np.errstate(invalid="ignore"):  # poles of the printed interlaced forms
            return self.scale * self.fourier(self.scale * np.asarray(nu, dtype=float))


def hermite_pair() -> GeneratorSet:
    return GeneratorSet((phi1(), phi2()), stride=1)


def cubic_bspline_set() -> GeneratorSet:
    return GeneratorSet((centered_cubic_bspline(),), stride=1)


def interlaced_pair(printed: bool = False) -> GeneratorSet:
    return GeneratorSet((interlaced(1, printed), interlaced(2, printed)), stride=2)

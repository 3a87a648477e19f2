"""Finitely supported coefficient sequences, Hermite reproduction weights and the
direct cubic B-spline prefilter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import basis
from .errors import InvalidArgumentError, OrderExceededError

Z1 = math.sqrt(3.0) - 2.0
PREFILTER_GAIN = 6.0
B3_TAPS = np.array([1 / 6, 2 / 3, 1 / 6])
# |z1|**28 < 1e-16: beyond this the prefilter response is below double precision
PREFILTER_MARGIN = 28


@dataclass(frozen=True)
class CoefSequence:
    """Real sequence ``c[k]`` with ``values[0] = c[offset]`` and zeros elsewhere.

    With ``trimmed=True`` the first and last stored values must be nonzero.
    """

    values: np.ndarray
    offset: int = 0
    trimmed: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("sequence values must be finite")
        if self.trimmed and v.size and (v[0] == 0 or v[-1] == 0):
            raise InvalidArgumentError("trimmed sequence has zero end values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "offset", int(self.offset))

    def __len__(self):
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.values.size)

    @property
    def last(self) -> int:
        return self.offset + self.values.size - 1

    def __getitem__(self, k):
        k = np.asarray(k)
        idx = k - self.offset
        ok = (idx >= 0) & (idx < self.values.size)
        if self.values.size == 0:
            out = np.zeros(k.shape)
        else:
            out = np.where(ok, self.values[np.clip(idx, 0, self.values.size - 1)], 0.0)
        return float(out) if out.ndim == 0 else out

    def as_dict(self) -> dict[int, float]:
        return {int(k): float(v) for k, v in zip(self.indices, self.values) if v != 0}

    def trim(self) -> "CoefSequence":
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return CoefSequence(np.zeros(0), 0, trimmed=True)
        return CoefSequence(self.values[nz[0] : nz[-1] + 1], self.offset + nz[0], trimmed=True)

    def convolve(self, other: "CoefSequence") -> "CoefSequence":
        return CoefSequence(np.convolve(self.values, other.values), self.offset + other.offset)

    def upsample(self, factor: int) -> "CoefSequence":
        """Insert ``factor - 1`` zeros between samples: out[factor*k] = c[k]."""
        if self.values.size == 0:
            return self
        out = np.zeros((self.values.size - 1) * factor + 1)
        out[::factor] = self.values
        return CoefSequence(out, self.offset * factor)

    @classmethod
    def from_dict(cls, d: dict[int, float]) -> "CoefSequence":
        if not d:
            return cls(np.zeros(0), 0)
        lo, hi = min(d), max(d)
        v = np.zeros(hi - lo + 1)
        for k, x in d.items():
            v[k - lo] = x
        return cls(v, lo)


@dataclass(frozen=True)
class ReproductionSequences:
    """Weights such that target(t) = sum_k seq1[k] phi1(t - k) + seq2[k] phi2(t - k)."""

    target: str
    seq1: CoefSequence
    seq2: CoefSequence
    valid: tuple[float, float] = field(default=(-math.inf, math.inf))

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        g1, g2 = basis.phi1(), basis.phi2()
        for k in self.seq1.indices:
            out += self.seq1[k] * basis.eval_generator(g1, t - k)
        for k in self.seq2.indices:
            out += self.seq2[k] * basis.eval_generator(g2, t - k)
        return out

    def target_value(self, t):
        t = np.asarray(t, dtype=float)
        if self.target == "beta2":
            return basis.eval_generator(basis.bspline(3), t)
        if self.target == "beta3":
            return basis.eval_generator(basis.bspline(4), t)
        ell = int(self.target.removeprefix("monomial"))
        return t**ell

    def residual(self, step: float = 1e-3) -> float:
        """Sup-norm residual on a grid of the given step over the valid interval."""
        lo, hi = self.valid
        n = int(round((hi - lo) / step))
        t = lo + step * np.arange(n + 1)
        return float(np.max(np.abs(self.evaluate(t) - self.target_value(t))))


def hermite_reproduction(target: str) -> ReproductionSequences:
    """Hermite weights reproducing the causal quadratic or cubic B-spline.

    Both targets are C1 piecewise polynomials of degree <= 3 on integer knots,
    so sampling them and their derivative at the integers is exact.
    """
    orders = {"beta2": 3, "beta3": 4}
    if target not in orders:
        raise InvalidArgumentError(f"unknown reproduction target {target!r}")
    order = orders[target]
    g = basis.bspline(order)
    k = np.arange(0, order + 1)
    vals = CoefSequence(basis.eval_generator(g, k.astype(float)), 0)
    ders = CoefSequence(basis.eval_generator_deriv(g, k.astype(float)), 0)
    return ReproductionSequences(target, vals.trim(), ders.trim(), (0.0, float(order)))


def polynomial_reproduction(ell: int, k_range: tuple[int, int]) -> ReproductionSequences:
    """Weights k**ell and ell*k**(ell-1) for k in k_range; exact on [k_lo, k_hi]."""
    if ell < 0:
        raise InvalidArgumentError("degree must be nonnegative")
    if ell > 3:
        raise OrderExceededError("Hermite generators only reproduce degree <= 3")
    lo, hi = k_range
    if hi < lo + 1:
        raise InvalidArgumentError("k_range must contain at least two integers")
    k = np.arange(lo, hi + 1, dtype=float)
    seq1 = k**ell
    seq2 = ell * k ** (ell - 1) if ell > 0 else np.zeros_like(k)
    return ReproductionSequences(
        f"monomial{ell}", CoefSequence(seq1, lo), CoefSequence(seq2, lo), (float(lo), float(hi))
    )


def _mirror_prefilter(s: np.ndarray) -> np.ndarray:
    n = s.size
    if n == 1:
        return s.copy()
    z = Z1
    c = PREFILTER_GAIN * s
    # causal initialization for whole-sample symmetric extension (period 2n-2)
    k = np.arange(1, n - 1)
    init = c[0] + z ** (n - 1) * c[-1] + np.sum((z**k + z ** (2 * n - 2 - k)) * c[1:-1])
    cp = np.empty(n)
    cp[0] = init / (1 - z ** (2 * n - 2))
    for i in range(1, n):
        cp[i] = c[i] + z * cp[i - 1]
    cm = np.empty(n)
    cm[-1] = (z / (z * z - 1)) * (cp[-1] + z * cp[-2])
    for i in range(n - 2, -1, -1):
        cm[i] = z * (cm[i + 1] - cp[i])
    return cm


def prefilter_impulse_response(radius: int = PREFILTER_MARGIN) -> CoefSequence:
    """Taps h[n] = sqrt(3) * z1**|n| of the direct cubic B-spline filter, |n| <= radius."""
    n = np.arange(-radius, radius + 1)
    return CoefSequence(math.sqrt(3.0) * Z1 ** np.abs(n), -radius)


def bspline_prefilter(samples: CoefSequence, boundary: str = "mirror") -> CoefSequence:
    """Coefficients c with sum_k c[k] b3[n - k] = samples[n], b3 = (1/6, 2/3, 1/6).

    ``mirror`` solves the system on the index range of ``samples`` with
    whole-sample symmetric extension.  ``zero`` treats the samples as zero
    outside their range and returns the (numerically) infinite solution on a
    range widened by the filter's effective half-length.
    """
    if len(samples) == 0:
        raise InvalidArgumentError("cannot prefilter an empty sequence")
    if boundary == "mirror":
        return CoefSequence(_mirror_prefilter(samples.values), samples.offset)
    if boundary == "zero":
        return samples.convolve(prefilter_impulse_response())
    raise InvalidArgumentError(f"unknown boundary policy {boundary!r}")


def convolve_b3(c: CoefSequence) -> CoefSequence:
    """Sample a cubic spline with coefficients c at the integers."""
    return c.convolve(CoefSequence(B3_TAPS, -1))

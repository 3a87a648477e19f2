"""Fourier-domain error analysis on the unit shift lattice.

Conventions.  A stride-``N`` generator set is rescaled to the unit lattice
(``GeneratorSet.unit_fourier``); functions taking ``nu`` work in that frequency.
``ErrorKernel`` and ``kernel_total`` take the scheme frequency ``w`` (knot
spacing 1), related by ``nu = N * w``, so that

    ||f - Q_T f||**2 ~ (1/2pi) int |f_hat(w)|**2 E(T w) dw.

In derivative mode the aliasing term ``k`` is weighted by ``(nu + 2 pi k)/nu``,
which is what multiplying the basis by ``j nu`` and dividing the sampling
transform by ``j nu`` amounts to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_legendre, zeta

from .basis import GeneratorSet
from .errors import (
    DegenerateBasisError,
    FitFailedError,
    InvalidArgumentError,
    KernelInconsistencyError,
    NonIntegrableError,
)
from .schemes import DiracDerivComb, SchemeSpec

GRAM_K = 64
GRAM_K_MAX = 8192
GRAM_TOL = 1e-11
RIESZ_MIN = 1e-8
NEGATIVE_TOL = 1e-9
FIT_WINDOW = (0.2, 0.8)
FIT_POINTS = 31
FIT_TOL = 1e-3
# even powers w**(2L), ..., w**(2L + 8); three terms bias the constant by ~1e-3 on this window
FIT_TERMS = 5
# below this scheme frequency E is taken from its even-power series; the
# direct sum loses digits to the cancellation in 1 - s^H psi ~ w**L
SERIES_SWITCH = 0.1
MODES = ("function", "derivative")


def _check_mode(mode):
    if mode not in MODES:
        raise InvalidArgumentError(f"mode must be one of {MODES}")


def _alias_terms(basis: GeneratorSet, nu: np.ndarray, ks: np.ndarray, mode: str):
    """Unit-lattice transforms at nu + 2 pi k, shape (len(nu), len(ks), n).

    Derivative mode multiplies by (nu + 2 pi k); the 1/nu is applied by callers.
    """
    x = nu[:, None] + 2 * np.pi * ks[None, :]
    P = basis.unit_fourier(x)
    if mode == "derivative":
        P = P * x[..., None]
    return P


def _outer_sum(P):
    return np.einsum("mki,mkj->mij", P, P.conj())


def _tail(P_last, P_prev, K, p):
    """Hurwitz-zeta estimate of sum_{k > K} of a term decaying like k**-p.

    The amplitude is the mean of the last two scaled terms, which also averages
    out period-2 alternation.
    """
    amp = 0.5 * (_outer_sum(P_last[:, None]) * K**p + _outer_sum(P_prev[:, None]) * (K - 1) ** p)
    return amp * zeta(p, K + 1)


def _decay_matrix(basis: GeneratorSet, mode: str):
    d = np.array([g.decay for g in basis.generators], dtype=float)
    p = d[:, None] + d[None, :]
    if mode == "derivative":
        p = p - 2
    return p


def _periodized(basis: GeneratorSet, nu, mode: str, K: Optional[int] = None):
    """sum_k P_k P_k^H with tail correction; K doubles until the sum settles.

    Returns the sum, the alias terms P used for it and the final K.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    p = _decay_matrix(basis, mode)

    def at(K):
        P = _alias_terms(basis, nu, np.arange(-K, K + 1), mode)
        tail = _tail(P[:, -1], P[:, -2], K, p) + _tail(P[:, 0], P[:, 1], K, p)
        return _outer_sum(P) + tail, P

    if K is not None:
        return (*at(K), K)
    K = GRAM_K
    prev, P = at(K)
    while K < GRAM_K_MAX:
        cur, P = at(2 * K)
        K *= 2
        scale = np.maximum(1.0, np.max(np.abs(cur), axis=(1, 2)))
        if np.all(np.max(np.abs(cur - prev), axis=(1, 2)) < GRAM_TOL * scale):
            break
        prev = cur
    return cur, P, K


def gram(basis: GeneratorSet, nu, mode: str = "function", check: bool = True, K: Optional[int] = None):
    """Gram matrix sum_k psi_hat(nu + 2 pi k) psi_hat(nu + 2 pi k)^H on the unit lattice.

    Returns shape (n, n) for scalar nu, else nu.shape + (n, n).  In derivative
    mode this is the Gram matrix of the derivative generators divided by nu**2.
    """
    _check_mode(mode)
    scalar = np.ndim(nu) == 0
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    if mode == "function":
        # periodic: fold into the base band so the alias window stays centered
        nu_arr = nu_arr - 2 * np.pi * np.round(nu_arr / (2 * np.pi))
    G = _periodized(basis, nu_arr, mode, K=K)[0]
    if mode == "derivative":
        G = G / (nu_arr**2)[:, None, None]
    if check:
        _check_riesz(G)
    return G[0] if scalar else G


def _check_riesz(G):
    if not np.all(np.isfinite(G)):
        raise DegenerateBasisError("Gram matrix is not finite (generator transform has poles)")
    lam = np.linalg.eigvalsh(0.5 * (G + np.conj(np.swapaxes(G, -1, -2))))
    if np.min(lam) < RIESZ_MIN:
        raise DegenerateBasisError(f"smallest Gram eigenvalue {np.min(lam):.3e} below {RIESZ_MIN:g}")


def dual_fourier(basis: GeneratorSet, nu):
    """Transforms of the dual generators G(nu)^-1 psi_hat(nu)."""
    scalar = np.ndim(nu) == 0
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    G = gram(basis, nu_arr)
    out = np.linalg.solve(G, basis.unit_fourier(nu_arr)[..., None])[..., 0]
    return out[0] if scalar else out


@dataclass
class _Pieces:
    G: np.ndarray  # Gram of the effective basis, (m, n, n)
    P: np.ndarray  # effective alias terms, (m, 2K+1, n)
    K: int
    p: float  # decay exponent of |a^T P_k|**2

    @property
    def q0(self):
        return self.P[:, self.K]

    def dual(self):
        return np.linalg.solve(self.G, self.q0[..., None])[..., 0]

    def energy(self, s):
        """sum_k |delta_k - s^H P_k|**2, summed term by term.

        Summing magnitudes avoids the cancellation of the expanded quadratic
        form 1 - 2 Re(s^H q0) + s^H G s, whose terms are O(1) while the kernel
        is O(w**8) near zero.
        """
        v = np.einsum("mi,mki->mk", s.conj(), self.P)
        v[:, self.K] -= 1.0
        t = np.abs(v) ** 2
        K, p = self.K, self.p
        tail = 0.0
        for last, prev in ((t[:, -1], t[:, -2]), (t[:, 0], t[:, 1])):
            tail = tail + 0.5 * (last * K**p + prev * (K - 1) ** p) * zeta(p, K + 1)
        return np.sum(t, axis=1) + tail


def _pieces(basis: GeneratorSet, nu: np.ndarray, mode: str) -> _Pieces:
    G, P, K = _periodized(basis, nu, mode)
    p = 2.0 * basis.decay
    if mode == "derivative":
        G = G / (nu**2)[:, None, None]
        P = P / nu[:, None, None]
        p -= 2
    return _Pieces(G, P, K, p)


def _clamp(E, what):
    if np.any(E < -NEGATIVE_TOL):
        raise KernelInconsistencyError(f"{what} reached {np.min(E):.3e}; Gram truncation too coarse")
    return np.clip(E, 0.0, None)


def kernel_min(basis: GeneratorSet, nu, mode: str = "function"):
    """Minimum error kernel 1 - psi^H G^-1 psi (unit-lattice frequency).

    Evaluated as the residual energy of the dual sampling; since that is the
    minimizer, errors in the dual only enter quadratically.
    """
    _check_mode(mode)
    scalar = np.ndim(nu) == 0
    nu_arr = np.atleast_1d(np.abs(np.asarray(nu, dtype=float)))
    out = np.zeros(nu_arr.shape)
    nz = nu_arr != 0
    if np.any(nz):
        pc = _pieces(basis, nu_arr[nz], mode)
        out[nz] = pc.energy(pc.dual())
    out = _clamp(out, "E_min")
    return float(out[0]) if scalar else out


class ErrorKernel:
    """E_min, E_res and E of a scheme as functions of the scheme frequency.

    ``sampling='dual'`` replaces the scheme's sampling functionals by the dual
    generators of the (function-mode) basis, which gives the optimal kernel.
    """

    def __init__(self, scheme: SchemeSpec, mode: str = "function", sampling: str = "scheme"):
        _check_mode(mode)
        if sampling not in ("scheme", "dual"):
            raise InvalidArgumentError("sampling must be 'scheme' or 'dual'")
        self.scheme = scheme
        self.mode = mode
        self.sampling = sampling
        self._series_cache = None

    @property
    def order(self) -> int:
        """Power L with E(w) ~ C**2 w**(2L)."""
        return self.scheme.order - (1 if self.mode == "derivative" else 0)

    def _sampling_unit(self, nu):
        if self.sampling == "dual":
            G = gram(self.scheme.basis, nu)
            return np.linalg.solve(G, self.scheme.basis.unit_fourier(nu)[..., None])[..., 0]
        return self.scheme.sampling_fourier(nu / self.scheme.stride)

    def components(self, w):
        """(E_min, E_res, E) at scheme frequencies w."""
        w = np.atleast_1d(np.abs(np.asarray(w, dtype=float)))
        E_min, E_res, E = self._direct(np.where(w < SERIES_SWITCH, 0.0, w))
        small = (w < SERIES_SWITCH) & (w != 0)
        if np.any(small):
            series_min, series_total = self._series()
            ws = w[small]
            E_min[small] = np.clip(series_min(ws), 0.0, None)
            E[small] = np.clip(series_total(ws), 0.0, None)
            E_res[small] = np.clip(E[small] - E_min[small], 0.0, None)
        return E_min, E_res, E

    def _series(self):
        if self._series_cache is None:
            L = self.order
            x = np.linspace(FIT_WINDOW[0], FIT_WINDOW[1], FIT_POINTS)
            X = np.stack([x ** (2 * i) for i in range(FIT_TERMS)], axis=1)
            E_min, _, E = self._direct(x)
            fits = []
            for y in (E_min, E):
                coef = np.linalg.lstsq(X, y / x ** (2 * L), rcond=None)[0]
                fits.append(lambda v, c=coef: v ** (2 * L) * np.polynomial.polynomial.polyval(v**2, c))
            self._series_cache = tuple(fits)
        return self._series_cache

    def _direct(self, w):
        E_min = np.zeros(w.shape)
        E_res = np.zeros(w.shape)
        E = np.zeros(w.shape)
        nz = w != 0
        if np.any(nz):
            nu = self.scheme.stride * w[nz]
            pc = _pieces(self.scheme.basis, nu, self.mode)
            s = self._sampling_unit(nu)
            dual = pc.dual()
            E_min[nz] = pc.energy(dual)
            d = s - dual
            E_res[nz] = np.real(np.einsum("mi,mij,mj->m", d.conj(), pc.G, d))
            E[nz] = pc.energy(s)
        return _clamp(E_min, "E_min"), _clamp(E_res, "E_res"), _clamp(E, "E")

    def e_min(self, w):
        return self.components(w)[0]

    def e_res(self, w):
        return self.components(w)[1]

    def __call__(self, w):
        scalar = np.ndim(w) == 0
        out = self.components(w)[2]
        return float(out[0]) if scalar else out


def kernel_total(scheme: SchemeSpec, mode: str, w, sampling: str = "scheme"):
    k = ErrorKernel(scheme, mode, sampling)
    return k(w)


def kernel_res(scheme: SchemeSpec, mode: str, w, sampling: str = "scheme"):
    out = ErrorKernel(scheme, mode, sampling).e_res(w)
    return float(out[0]) if np.ndim(w) == 0 else out


# ---------------------------------------------------------------------------
# asymptotic constant


@dataclass(frozen=True)
class ConstantFit:
    constant: float
    residual: float
    power: int
    coefficients: tuple


def asymptotic_constant(kernel: ErrorKernel, L: Optional[int] = None, window=FIT_WINDOW) -> ConstantFit:
    """sqrt(c0) from a least-squares fit E(w)/w**(2L) = c0 + c1 w**2 + c2 w**4 + ...

    ``residual`` is the relative misfit of the model on the window.
    """
    L = kernel.order if L is None else L
    w = np.linspace(window[0], window[1], FIT_POINTS)
    y = kernel(w) / w ** (2 * L)
    if not np.all(np.isfinite(y)):
        raise FitFailedError("kernel is not finite on the fit window")
    X = np.stack([w ** (2 * i) for i in range(FIT_TERMS)], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.linalg.norm(X @ coef - y) / np.linalg.norm(y))
    if resid > FIT_TOL or coef[0] <= 0:
        raise FitFailedError(f"relative fit residual {resid:.2e} (c0={coef[0]:.3e})")
    return ConstantFit(math.sqrt(coef[0]), resid, L, tuple(float(c) for c in coef))


# ---------------------------------------------------------------------------
# error prediction


_GL_X, _GL_W = roots_legendre(32)


def _panel_integral(fun, a, b, n):
    edges = np.linspace(a, b, n + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    vals = fun(x).reshape(n, -1)
    return float(np.sum(half * (vals @ _GL_W)))


def predicted_error(f_hat: Callable, kernel: ErrorKernel, T: float, rtol: float = 1e-8) -> float:
    """sqrt((1/2pi) int |f_hat(w)|**2 E(T w) dw); derivative mode weights by w**2.

    ``f_hat`` must be the spectrum of a real function (so |f_hat| is even).
    """
    if not T > 0:
        raise InvalidArgumentError("step T must be positive")

    def integrand(w):
        a = np.abs(f_hat(w)) ** 2
        if kernel.mode == "derivative":
            a = a * w**2
        out = np.zeros_like(w)
        big = a > 0
        if np.any(big):
            out[big] = a[big] * kernel(T * w[big])
        if not np.all(np.isfinite(out)):
            raise NonIntegrableError("integrand is not finite")
        return out

    width = min(1.0, math.pi / (4 * T))
    total, W = 0.0, 0.0
    while True:
        chunk_end = max(2 * W, 8.0)
        n = int(math.ceil((chunk_end - W) / width))
        coarse = _panel_integral(integrand, W, chunk_end, n)
        fine = _panel_integral(integrand, W, chunk_end, 2 * n)
        if abs(fine - coarse) > rtol * max(abs(fine), abs(total), 1e-300):
            width /= 2
            if width < 1e-6:
                raise NonIntegrableError("quadrature does not converge")
            continue
        total += fine
        W = chunk_end
        if abs(fine) <= rtol * abs(total) or total == 0.0 and W >= 64:
            break
        if W > 1e6:
            raise NonIntegrableError("integrand does not decay")
    return math.sqrt(2 * total / (2 * math.pi))


# ---------------------------------------------------------------------------
# Riesz bounds and moment audit


@dataclass(frozen=True)
class RieszBounds:
    A: float
    B: float


def riesz_bounds(basis: GeneratorSet, n_points: int = 4096) -> RieszBounds:
    """Extreme Gram eigenvalues over a grid of [0, 2 pi)."""
    nu = 2 * np.pi * np.arange(n_points) / n_points
    G = gram(basis, nu, check=False, K=GRAM_K)
    if not np.all(np.isfinite(G)):
        raise DegenerateBasisError("Gram matrix is not finite (generator transform has poles)")
    lam = np.linalg.eigvalsh(G)
    A, B = float(np.min(lam)), float(np.max(lam))
    if A < RIESZ_MIN:
        raise DegenerateBasisError(f"lower Riesz bound {A:.3e} below {RIESZ_MIN:g}")
    return RieszBounds(A, B)


def _sampling_moment(func, stride: int, ell: int) -> float:
    """int x**ell s(x) dx for the functional rescaled to the unit lattice."""
    N = stride
    if isinstance(func, DiracDerivComb):
        # (sign/N) delta'(x - shift/N)
        if ell == 0:
            return 0.0
        return -(func.sign / N) * ell * (func.shift / N) ** (ell - 1)
    if func.prefilter is None:
        return (func.shift / N) ** ell
    taps = func.prefilter.taps()
    pos = (func.shift - N * taps.indices.astype(float)) / N
    return float(np.sum(taps.values * pos**ell))


def _fd_weights(order: int, half_width: int) -> np.ndarray:
    """Central finite-difference weights for the given derivative order."""
    x = np.arange(-half_width, half_width + 1, dtype=float)
    V = np.vander(x, increasing=True).T
    rhs = np.zeros(x.size)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def quasi_biorthonormality_audit(scheme: SchemeSpec, L: Optional[int] = None, h: float = 0.05):
    """Max over generators of |moment_ell(sampling) - moment_ell(dual)|, ell = 0..L-1.

    Dual moments are j**ell times the ell-th derivative of the dual transform at 0.
    """
    L = scheme.order if L is None else L
    half = 6
    nu = h * np.arange(-half, half + 1)
    dual = dual_fourier(scheme.basis, nu)  # (2*half+1, n)
    out = {}
    for ell in range(L):
        deriv = _fd_weights(ell, half) @ dual / h**ell
        dual_mom = np.real((1j) ** ell * deriv)
        samp_mom = np.array([_sampling_moment(s, scheme.stride, ell) for s in scheme.sampling])
        out[ell] = float(np.max(np.abs(samp_mom - dual_mom)))
    return out


__all__ = [
    "ConstantFit",
    "ErrorKernel",
    "RieszBounds",
    "asymptotic_constant",
    "dual_fourier",
    "gram",
    "kernel_min",
    "kernel_res",
    "kernel_total",
    "predicted_error",
    "quasi_biorthonormality_audit",
    "riesz_bounds",
]

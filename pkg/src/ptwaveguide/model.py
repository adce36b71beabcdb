"""Characteristic function of the double-step waveguide.

F(k, ell, gamma) = F_-(k, gamma) F_+(k, gamma) - exp(-4ik ell) F_0(k, gamma)

with

F_+-(k, gamma) = 2ik cos(sqrt(k^2 +- i gamma))
                 - (2k^2 +- i gamma) sin(sqrt(k^2 +- i gamma))/sqrt(k^2 +- i gamma)
F_0(k, gamma)  = gamma^2 sinc-(k) sinc+(k)

Zeros of F in the upper half-plane are resonances, in the lower
half-plane complex eigenvalues, and nonzero real zeros are self-dual
spectral singularities.  All evaluations carry analytic k-derivatives
and an overflow-safe power-of-e scaling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .kernels import kernel_eval

__all__ = [
    "ModelParams",
    "FValue",
    "ModelDomainError",
    "eval_F_minus",
    "eval_F_plus",
    "eval_F0",
    "eval_F",
    "eval_G",
    "eval_F_scale",
]

# |k| below which G = F/k switches to the Taylor series of F at k = 0.
_G_SERIES_CUTOFF = 1e-4
# Sampling circle for the Taylor coefficients of F at k = 0.
_G_SERIES_RADIUS = 0.1
_G_SERIES_SAMPLES = 32
_G_SERIES_ORDER = 8


class ModelDomainError(ValueError):
    """Raised for non-finite or out-of-range input."""


@dataclass(frozen=True)
class ModelParams:
    """Waveguide parameters: gain-and-loss amplitude and half distance."""

    gamma: float
    ell: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ModelDomainError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (math.isfinite(self.ell) and self.ell >= 0):
            raise ModelDomainError(f"ell must be finite and >= 0, got {self.ell}")


@dataclass(frozen=True)
class FValue:
    """A function value with analytic k-derivative and scaling.

    The true value is ``f * exp(log_scale)`` and the true derivative
    ``df * exp(log_scale)``; log_scale is 0 unless an overflow guard
    triggered somewhere in the evaluation.
    """

    f: complex
    df: complex
    log_scale: float = 0.0

    @property
    def value(self) -> complex:
        """Unscaled value; may overflow for extreme arguments."""
        return self.f * math.exp(self.log_scale) if self.log_scale != 0.0 else self.f


def _check_finite_k(k: complex) -> complex:
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise ModelDomainError(f"non-finite wavenumber: {k!r}")
    return k


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ModelDomainError(f"non-finite gamma: {gamma!r}")
    return gamma


def _eval_F_pm(k: complex, gamma: float, sign: int) -> FValue:
    k = _check_finite_k(k)
    gamma = _check_gamma(gamma)
    z = k * k + sign * 1j * gamma
    kv = kernel_eval(z)
    coeff = 2.0 * k * k + sign * 1j * gamma
    f = 2j * k * kv.c - coeff * kv.s
    # d/dk via dz/dk = 2k and the kernel derivative identities.
    df = (2j * kv.c + 2j * k * kv.dc * 2.0 * k
          - 4.0 * k * kv.s - coeff * kv.ds * 2.0 * k)
    return FValue(f=f, df=df, log_scale=kv.log_scale)


def eval_F_minus(k: complex, gamma: float) -> FValue:
    """Single-step factor with the k^2 - i*gamma argument."""
    return _eval_F_pm(k, gamma, -1)


def eval_F_plus(k: complex, gamma: float) -> FValue:
    """Single-step factor with the k^2 + i*gamma argument."""
    return _eval_F_pm(k, gamma, +1)


def eval_F0(k: complex, gamma: float) -> FValue:
    """Coupling term gamma^2 * sinc(k^2 - i gamma) * sinc(k^2 + i gamma)."""
    k = _check_finite_k(k)
    gamma = _check_gamma(gamma)
    km = kernel_eval(k * k - 1j * gamma)
    kp = kernel_eval(k * k + 1j * gamma)
    g2 = gamma * gamma
    f = g2 * km.s * kp.s
    df = g2 * (km.ds * 2.0 * k * kp.s + km.s * kp.ds * 2.0 * k)
    return FValue(f=f, df=df, log_scale=km.log_scale + kp.log_scale)


def _assemble_F(k: complex, params: ModelParams):
    """Both terms of F in scaled form.

    Returns (m1, dm1, sig1, m2, dm2, sig2): term_i = m_i * exp(sig_i),
    with the derivative of the full term (including the exponential
    factor in term 2) carried in dm_i at the same scale.
    """
    a = eval_F_minus(k, params.gamma)
    b = eval_F_plus(k, params.gamma)
    c = eval_F0(k, params.gamma)

    m1 = a.f * b.f
    dm1 = a.df * b.f + a.f * b.df
    sig1 = a.log_scale + b.log_scale

    # exp(-4ik ell) = exp(4 ell Im k) * phase; the real exponent joins
    # the scale so that the phase factor never overflows on its own.
    ell = params.ell
    rho = 4.0 * ell * k.imag
    phase = cmath.exp(-4j * ell * k.real)
    m2 = phase * c.f
    dm2 = phase * (-4j * ell * c.f + c.df)
    sig2 = rho + c.log_scale
    return m1, dm1, sig1, m2, dm2, sig2


def eval_F(k: complex, params: ModelParams) -> FValue:
    """Full characteristic function with analytic k-derivative."""
    k = _check_finite_k(k)
    m1, dm1, sig1, m2, dm2, sig2 = _assemble_F(k, params)
    if abs(sig1) < 650.0 and abs(sig2) < 650.0:
        e1 = math.exp(sig1)
        e2 = math.exp(sig2)
        return FValue(f=m1 * e1 - m2 * e2, df=dm1 * e1 - dm2 * e2, log_scale=0.0)
    sig = max(sig1, sig2)
    e1 = math.exp(sig1 - sig)
    e2 = math.exp(sig2 - sig)
    return FValue(f=m1 * e1 - m2 * e2, df=dm1 * e1 - dm2 * e2, log_scale=sig)


def eval_F_scale(k: complex, params: ModelParams) -> float:
    """log of the local magnitude scale of F: max of its two terms.

    Residual tolerances for zero refinement are relative to this scale,
    which stays meaningful where the two terms nearly cancel.
    """
    k = _check_finite_k(k)
    m1, _, sig1, m2, _, sig2 = _assemble_F(k, params)
    t1 = math.log(abs(m1)) + sig1 if m1 != 0 else -math.inf
    t2 = math.log(abs(m2)) + sig2 if m2 != 0 else -math.inf
    return max(t1, t2, 0.0)


def _taylor_coeffs_at_origin(params: ModelParams, order: int = _G_SERIES_ORDER) -> np.ndarray:
    """Leading Taylor coefficients of F(., params) at k = 0 via FFT on a circle."""
    n = _G_SERIES_SAMPLES
    rho = _G_SERIES_RADIUS
    ks = rho * np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([eval_F(complex(kk), params).value for kk in ks])
    coeffs = np.fft.fft(vals) / n
    return coeffs[: order + 1] / rho ** np.arange(order + 1)


def eval_G(k: complex, params: ModelParams) -> FValue:
    """G = F/k with the removable singularity at k = 0 filled by its limit."""
    k = _check_finite_k(k)
    if abs(k) >= _G_SERIES_CUTOFF:
        fv = eval_F(k, params)
        return FValue(f=fv.f / k, df=(fv.df * k - fv.f) / (k * k),
                      log_scale=fv.log_scale)
    a = _taylor_coeffs_at_origin(params)
    # F = sum a_j k^j with a_0 = 0, so G = sum_{j>=1} a_j k^{j-1}.
    g = 0j
    dg = 0j
    for j in range(len(a) - 1, 0, -1):
        g = g * k + a[j]
    for j in range(len(a) - 1, 1, -1):
        dg = dg * k + (j - 1) * a[j]
    return FValue(f=g, df=dg, log_scale=0.0)

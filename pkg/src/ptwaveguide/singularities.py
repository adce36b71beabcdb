"""Real-axis zeros (self-dual spectral singularities) of the waveguide.

The substitution k = (beta/2) sqrt(u^-2 - u^2), beta = sqrt(2*gamma),
u in (0, 1), turns the real and imaginary parts of the characteristic
equation into a solvability condition g(u, beta) = 0 plus an explicit
formula for the admissible distances ell (an arctan branch ladder with
a parity rule).  This module provides the solvability function and its
root scans, forbidden-gap certificates, the prescribed-wavenumber
design algorithm, and minimal-(gamma, ell) tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ModelParams, eval_F, eval_F_scale

__all__ = [
    "SingularityPoint",
    "GapCertificate",
    "DesignResult",
    "MinScanRow",
    "g",
    "g_star",
    "no_root_band",
    "solve_g_for_u",
    "recover_ell",
    "gap_certificate",
    "design_for_k",
    "min_scan",
    "real_system_residual",
    "build_point",
    "polish_real_axis_zero",
    "u_from_k_beta",
    "k_from_u_beta",
    "TABLE1_SEEDS",
]

# Approximate (gamma, k) of the lowest adjacent-elements (ell = 0)
# singularities; used as continuation seeds after polishing.
TABLE1_SEEDS = ((2.071, 1.065), (13.307, 4.318), (27.783, 7.529))

_ROUND_TRIP_TOL = 1e-9


@dataclass(frozen=True)
class SingularityPoint:
    """A real-axis zero of F together with its (u, beta, n) coordinates."""

    k: float
    gamma: float
    ell: float
    u: float
    beta: float
    n: int
    residual: float
    flags: tuple = ()


@dataclass(frozen=True)
class GapCertificate:
    """Certified beta-interval free of solvability roots."""

    beta_lo: float
    beta_hi: float
    u_star: float
    beta_star: float
    grid_margin: float

    @property
    def gamma_gap(self) -> tuple[float, float]:
        return (self.beta_lo**2 / 2.0, self.beta_hi**2 / 2.0)


@dataclass(frozen=True)
class DesignResult:
    points: list
    range_exhausted: bool
    beta_roots: list


@dataclass(frozen=True)
class MinScanRow:
    k: float
    gamma_min: Optional[float]
    ell_min: Optional[float]
    ell_family: tuple


# ---------------------------------------------------------------------------
# solvability function


def _check_u(u):
    if np.any(np.asarray(u) < 0) or np.any(np.asarray(u) > 1):
        raise ValueError("u must lie in [0, 1]")


def g(u, beta):
    """Solvability function; vectorized over u and beta.

    g(u, b) = u^4 (1-u^4) cosh(bu) cos(b/u) - 2 u^6 sinh(bu) sin(b/u)
              + 1 - u^12, with g(0, b) = 1 by continuity.
    """
    _check_u(u)
    u = np.asarray(u, dtype=float)
    beta = np.asarray(beta, dtype=float)
    scalar = u.ndim == 0 and beta.ndim == 0
    u, beta = np.broadcast_arrays(np.atleast_1d(u), np.atleast_1d(beta))
    out = np.ones(u.shape)
    pos = u > 0
    up, bp = u[pos], beta[pos]
    out[pos] = (up**4 * (1 - up**4) * np.cosh(bp * up) * np.cos(bp / up)
                - 2 * up**6 * np.sinh(bp * up) * np.sin(bp / up)
                + 1 - up**12)
    return float(out[0]) if scalar else out


def g_star(u, beta):
    """Companion function of the touching-point system; equals u*dg/du - 6g."""
    _check_u(u)
    u = np.asarray(u, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return (beta * u**3 * (1 - 3 * u**4) * np.cosh(beta * u) * np.sin(beta / u)
            + beta * u**5 * (3 - u**4) * np.sinh(beta * u) * np.cos(beta / u)
            - 2 * u**4 * (1 + u**4) * np.cosh(beta * u) * np.cos(beta / u)
            - 6 * (1 + u**12))


def no_root_band(beta: float) -> float:
    """Upper end of the root-free interval [0, (1 + beta/4)^-1)."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    return 1.0 / (1.0 + beta / 4.0)


def solve_g_for_u(beta: float, cells: int = 4000) -> list[float]:
    """All roots u in (0, 1) of g(., beta) by bracketing plus bisection."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    lo = no_root_band(beta)
    us = np.linspace(lo, 1.0, cells + 1)
    vals = g(us, beta)
    roots: list[float] = []
    for i in range(cells):
        a, b = us[i], us[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(a))
            continue
        if fa * fb < 0:
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = g(m, beta)
                if fa * fm <= 0:
                    b, fb = m, fm
                else:
                    a, fa = m, fm
                if b - a < 1e-13:
                    break
            roots.append(0.5 * (a + b))
    return roots


# ---------------------------------------------------------------------------
# (u, beta, n) <-> (k, gamma, ell)


def k_from_u_beta(u: float, beta: float) -> float:
    return beta / 2.0 * math.sqrt(1.0 / u**2 - u**2)


def u_from_k_beta(k: float, beta: float) -> float:
    """Invert the wavenumber substitution; u = beta/R is always in (0, 1)."""
    R = math.sqrt(2.0 * k * k + math.sqrt(4.0 * k**4 + beta**4))
    return beta / R


def _A1(u: float, beta: float) -> float:
    return ((u**4 - 2.0) * math.cos(beta / u)
            + u**4 * (2.0 * u**4 - 1.0) * math.cosh(beta * u))


def _A2(u: float, beta: float) -> float:
    return 2.0 * math.sqrt(max(0.0, 1.0 - u**4)) * (
        u**6 * math.sinh(beta * u) - math.sin(beta / u))


def _B(u: float, beta: float) -> float:
    return u**4 * (math.cosh(beta * u) - math.cos(beta / u))


def recover_ell(u: float, beta: float, n: int,
                clamp_negative: float = 0.0) -> Optional[float]:
    """Distance ell for branch index n, or None if the parity rule or
    ell >= 0 reject it.

    The arctan argument is A2 / (-A1); at a vanishing denominator the
    +-pi/2 limit is used (sign carried by the numerator).  A slightly
    negative result (within ``clamp_negative``, as happens when the
    input wavenumber is a rounded version of an exact ell = 0
    solution) is clamped to 0.
    """
    if not (0.0 < u < 1.0 and beta > 0.0):
        raise ValueError("need u in (0,1) and beta > 0")
    a1 = _A1(u, beta)
    a2 = _A2(u, beta)
    sign = 1.0 if a1 > 0 else (-1.0 if a1 < 0 else 0.0)
    if sign == 0.0:
        # measure-zero ambiguity of the parity rule; not resolvable here
        return None
    if (-1.0) ** n != sign:
        return None
    if a1 != 0.0:
        theta = math.atan(a2 / (-a1))
    else:
        theta = math.copysign(math.pi / 2.0, a2)
    ell = (theta + math.pi * n) / (2.0 * beta * math.sqrt(1.0 / u**2 - u**2))
    if ell < 0.0:
        return 0.0 if ell >= -clamp_negative else None
    return ell


def real_system_residual(k: float, params: ModelParams) -> tuple[float, float]:
    """Residuals of the two real equations satisfied at a real-axis zero."""
    if not (k > 0 and params.gamma > 0):
        raise ValueError("need k > 0 and gamma > 0")
    beta = math.sqrt(2.0 * params.gamma)
    u = u_from_k_beta(k, beta)
    if not (0.0 < u < 1.0):
        raise ValueError(f"substitution left (0,1): u = {u}")
    if beta * u > 700.0:
        raise ValueError("system terms overflow double precision")
    alpha = 4.0 * k * params.ell  # = 2 beta ell sqrt(u^-2 - u^2)
    b = _B(u, beta)
    return (_A1(u, beta) - b * math.cos(alpha),
            _A2(u, beta) + b * math.sin(alpha))


def build_point(u: float, beta: float, n: int, polish: bool = True,
                clamp_negative: float = 0.0) -> Optional[SingularityPoint]:
    """Assemble and verify a SingularityPoint from (u, beta, n)."""
    ell = recover_ell(u, beta, n, clamp_negative=clamp_negative)
    if ell is None:
        return None
    k = k_from_u_beta(u, beta)
    gamma = beta * beta / 2.0
    if polish:
        out = polish_real_axis_zero(k, gamma, ell)
        if out is not None:
            k, gamma = out
            beta = math.sqrt(2.0 * gamma)
            u = u_from_k_beta(k, beta)
    params = ModelParams(gamma, ell)
    fv = eval_F(k, params)
    res = abs(fv.f) * math.exp(fv.log_scale - eval_F_scale(k, params))
    flags = () if res <= _ROUND_TRIP_TOL else ("residual-above-tol",)
    return SingularityPoint(k=k, gamma=gamma, ell=ell, u=u, beta=beta, n=n,
                            residual=res, flags=flags)


def polish_real_axis_zero(k: float, gamma: float, ell: float,
                          max_iter: int = 40) -> Optional[tuple[float, float]]:
    """Newton on (Re F, Im F)(k, gamma) at fixed ell, both k and gamma real."""
    params = ModelParams(max(gamma, 1e-12), ell)
    for _ in range(max_iter):
        fv = eval_F(k, params)
        dgam = 1e-7 * max(1.0, params.gamma)
        fp = eval_F(k, ModelParams(params.gamma + dgam, ell))
        fm = eval_F(k, ModelParams(params.gamma - dgam, ell))
        scale = math.exp(fv.log_scale)
        dfdg = (fp.f * math.exp(fp.log_scale) - fm.f * math.exp(fm.log_scale)) / (2 * dgam)
        J = np.array([[fv.df.real * scale, dfdg.real],
                      [fv.df.imag * scale, dfdg.imag]])
        r = np.array([fv.f.real * scale, fv.f.imag * scale])
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            return None
        k -= step[0]
        new_gamma = params.gamma - step[1]
        if not (math.isfinite(k) and math.isfinite(new_gamma) and new_gamma > 0 and k > 0):
            return None
        params = ModelParams(new_gamma, ell)
        if abs(step[0]) < 1e-14 * max(1.0, abs(k)) and \
           abs(step[1]) < 1e-14 * max(1.0, params.gamma):
            return k, params.gamma
    return None


# ---------------------------------------------------------------------------
# gap certificate


def gap_certificate(grid: int = 2000) -> GapCertificate:
    """Certify the singularity-free amplitude window above beta = pi.

    Solves the touching-point system g = 0, g* = 0 by Newton from a
    bisection seed on min_u g(u, beta), then scans g on a grid over
    (pi, beta* - 1e-3) x [0, 1] for a positive margin.
    """
    us = np.linspace(1e-6, 1.0 - 1e-9, 4001)

    def min_g(beta: float) -> float:
        return float(np.min(g(us, beta)))

    lo, hi = 4.5, 5.0
    assert min_g(lo) > 0 > min_g(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if min_g(mid) > 0:
            lo = mid
        else:
            hi = mid
    beta0 = 0.5 * (lo + hi)
    u0 = float(us[int(np.argmin(g(us, beta0)))])

    u, beta = u0, beta0
    converged = False
    for _ in range(60):
        r = np.array([g(u, beta), float(g_star(u, beta))])
        h = 1e-7
        J = np.array([
            [(g(u + h, beta) - g(u - h, beta)) / (2 * h),
             (g(u, beta + h) - g(u, beta - h)) / (2 * h)],
            [float(g_star(u + h, beta) - g_star(u - h, beta)) / (2 * h),
             float(g_star(u, beta + h) - g_star(u, beta - h)) / (2 * h)],
        ])
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            break
        u -= step[0]
        beta -= step[1]
        if abs(step[0]) < 1e-13 and abs(step[1]) < 1e-13:
            converged = True
            break
    if not converged:
        # nested-bisection seed already has ~1e-12 accuracy in beta
        u, beta = u0, beta0

    beta_hi = beta - 1e-3
    # open at beta = pi, where g(1, pi) = 0 exactly
    bs = np.linspace(math.pi, beta_hi, grid + 1)[1:]
    uu = np.linspace(0.0, 1.0, grid)
    margin = math.inf
    for b in bs:
        margin = min(margin, float(np.min(g(uu, b))))
    return GapCertificate(beta_lo=math.pi, beta_hi=beta, u_star=u,
                          beta_star=beta, grid_margin=margin)


# ---------------------------------------------------------------------------
# prescribed-wavenumber design


def _design_fn(k: float, beta):
    """Left-hand side of the prescribed-k solvability equation in beta."""
    beta = np.asarray(beta, dtype=float)
    R = np.sqrt(2.0 * k * k + np.sqrt(4.0 * k**4 + beta**4))
    return (2.0 * beta**4 * k * k * np.cosh(beta**2 / R) * np.cos(R)
            - beta**6 * np.sinh(beta**2 / R) * np.sin(R)
            + 2.0 * k * k * (16.0 * k**4 + 3.0 * beta**4))


def design_for_k(k: float, beta_max: float = 30.0, cells: int = 3000,
                 all_roots: bool = False, max_branches: int = 4) -> DesignResult:
    """Spectral-singularity parameters producing a real-axis zero at k.

    Finds positive roots beta of the solvability equation by dichotomy
    on a bracketing grid, keeps the minimal one by default, derives u,
    and enumerates admissible distances.  Every returned point passes
    the |F| round-trip check.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    bs = np.linspace(1e-4, beta_max, cells + 1)
    vals = _design_fn(k, bs)
    roots: list[float] = []
    for i in range(cells):
        if vals[i] == 0.0:
            roots.append(float(bs[i]))
        elif vals[i] * vals[i + 1] < 0:
            a, b = float(bs[i]), float(bs[i + 1])
            fa = float(vals[i])
            for _ in range(100):
                m = 0.5 * (a + b)
                fm = float(_design_fn(k, m))
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
                if b - a < 1e-13 * max(1.0, b):
                    break
            roots.append(0.5 * (a + b))
    if not roots:
        return DesignResult(points=[], range_exhausted=True, beta_roots=[])
    chosen = roots if all_roots else roots[:1]
    points = []
    for beta in chosen:
        u = u_from_k_beta(k, beta)
        clamp = 1e-3 * math.pi / (2.0 * k)
        found = 0
        n = 0
        while found < max_branches and n <= 2 * max_branches + 8:
            pt = build_point(u, beta, n, clamp_negative=clamp)
            if pt is not None:
                points.append(pt)
                found += 1
            n += 1
    points.sort(key=lambda p: (p.k, p.gamma, p.ell))
    return DesignResult(points=points, range_exhausted=False, beta_roots=roots)


def min_scan(k_max: float, dk: float, beta_max: float = 30.0,
             n_family: int = 4) -> list[MinScanRow]:
    """Minimal-amplitude design point for each k on a uniform grid.

    Grid points with no solvability root are recorded as gaps
    (gamma_min = ell_min = None).
    """
    if not (k_max > 0 and dk > 0):
        raise ValueError("k_max and dk must be positive")
    rows: list[MinScanRow] = []
    k = dk
    while k <= k_max + 1e-12:
        res = design_for_k(k, beta_max=beta_max, max_branches=1)
        if res.range_exhausted or not res.points:
            rows.append(MinScanRow(k=k, gamma_min=None, ell_min=None,
                                   ell_family=()))
        else:
            p0 = min(res.points, key=lambda p: p.ell)
            family = tuple(p0.ell + j * math.pi / (2.0 * p0.k)
                           for j in range(n_family))
            rows.append(MinScanRow(k=k, gamma_min=p0.gamma, ell_min=p0.ell,
                                   ell_family=family))
        k += dk
    return rows

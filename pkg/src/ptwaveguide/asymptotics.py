"""Closed-form predictions for the zero set.

Covers the large-distance ladder (four-term expansion, admissibility
threshold and guaranteed count), the small-amplitude imaginary zero,
the single-step factors F+- and the large-distance convergence targets
of the zeros of F toward the zeros of F+-.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import FValue, ModelParams, eval_F_minus, eval_F_plus
from .zerofinder import SearchRegion, ZeroRecord, find_zeros, region_r

__all__ = [
    "LadderPrediction",
    "SmallGammaZero",
    "theta",
    "ladder_count",
    "ladder_predict",
    "small_gamma_zero",
    "single_step_zeros",
    "single_step_real_zero_candidate",
    "single_step_radius",
    "large_ell_targets",
    "ladder_constants",
]


@dataclass(frozen=True)
class LadderPrediction:
    """Four-term ladder zero prediction with its isolating disc."""

    n: int
    k_pred: complex
    radius: float
    admissible: bool


@dataclass(frozen=True)
class SmallGammaZero:
    """Both candidate expansions of the small-gamma imaginary zero.

    The quartic correction coefficient is shared; the two candidates
    differ in the exponent of the leading term (gamma vs gamma^2).
    Numerically the gamma^2 leading term is the one matching the actual
    zero (see the regression tests), but both forms are exposed.
    """

    displayed: complex        # i (ell + 1/3) gamma   + i c4 gamma^4
    proof_consistent: complex  # i (ell + 1/3) gamma^2 + i c4 gamma^4


def theta(gamma: float) -> float:
    """Admissibility threshold for the ladder index range."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    e = math.exp(-math.pi / 4.0)
    num = 2.0 * (1.0 - e) * gamma
    den = 17.0 * (1.0 + math.sqrt(1.0 - e)) * math.sqrt(gamma) \
        + 10.0 * math.pi / math.sqrt(3.0)
    return num / den


def ladder_count(params: ModelParams) -> int:
    """N such that 2N+1 ladder zeros are guaranteed near the real axis."""
    if not (params.gamma > 0 and params.ell > 0):
        raise ValueError("ladder_count needs gamma > 0 and ell > 0")
    return math.floor(0.5 + 2.0 * theta(params.gamma) * params.ell / math.pi)


def _is_admissible(n: int, params: ModelParams) -> bool:
    return math.pi * abs(n) / 2.0 + math.pi / 4.0 <= theta(params.gamma) * params.ell


def ladder_predict(n: int, params: ModelParams) -> LadderPrediction:
    """Three displayed orders of the ladder zero near pi*n/(2*ell)."""
    gamma, ell = params.gamma, params.ell
    if not (gamma > 0 and ell > 0):
        raise ValueError("ladder_predict needs gamma > 0 and ell > 0")
    beta = math.sqrt(2.0 * gamma)
    sh, s = math.sinh(beta), math.sin(beta)
    ch, c = math.cosh(beta), math.cos(beta)
    den = ch - c
    assert den > 0.0, "cosh - cos must be positive for gamma > 0"
    pin = math.pi * n
    t1 = pin / 2.0 / ell
    t2 = -math.sqrt(2.0) * pin * (sh - s) / (4.0 * math.sqrt(gamma) * den) / ell**2
    # Coefficient fixed against high-accuracy fits of the actual zeros:
    # the residual is O(ell^-4) with this form (see regression tests).
    t3 = -(2j * pin**2 * sh * s - pin * (sh - s) ** 2) / (4.0 * gamma * den**2) / ell**3
    return LadderPrediction(n=n, k_pred=t1 + t2 + t3,
                            radius=math.pi / (4.0 * ell),
                            admissible=_is_admissible(n, params))


# Quartic coefficient shared by both small-gamma candidates.
def _c4(ell: float) -> float:
    return 2.0 * ell**3 + 8.0 / 3.0 * ell**2 + 53.0 / 45.0 * ell + 53.0 / 315.0


def small_gamma_zero(params: ModelParams) -> SmallGammaZero:
    """Two-term expansions of the near-origin imaginary zero."""
    g, ell = params.gamma, params.ell
    lead = ell + 1.0 / 3.0
    quart = _c4(ell) * g**4
    return SmallGammaZero(
        displayed=1j * (lead * g + quart),
        proof_consistent=1j * (lead * g * g + quart),
    )


# ---------------------------------------------------------------------------
# single-step factors


def single_step_radius(gamma: float) -> float:
    """Radius r0*sqrt(gamma) bounding lower-half-plane zeros of F+-."""
    return 1.2 * max(1.0, math.sqrt(gamma)) * math.sqrt(gamma)


def single_step_zeros(gamma: float, region: SearchRegion,
                      tol: float = 1e-11) -> list[ZeroRecord]:
    """Zeros of F+ and F- inside the region, tagged 'F+' / 'F-'."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    out: list[ZeroRecord] = []
    for tag, fn in (("F+", lambda k: eval_F_plus(k, gamma)),
                    ("F-", lambda k: eval_F_minus(k, gamma))):
        for rec in find_zeros(region, fn=fn, tol=tol, gamma=gamma):
            rec.flags.append(tag)
            out.append(rec)
    return out


def single_step_real_zero_candidate(gamma: float):
    """Candidate real zero of F+- from the factored real system.

    The system pairs sqrt(1-u^4) = tanh(beta*u/2) (always a unique root
    u*) with a cosine condition that only holds at special amplitudes.
    Returns (u_star, k_abs, cos_residual); a real zero of F- exists at
    +k_abs (and of F+ at -k_abs) iff cos_residual vanishes.
    """
    beta = math.sqrt(2.0 * gamma)

    def h(u: float) -> float:
        return math.sqrt(max(0.0, 1.0 - u**4)) - math.tanh(beta * u / 2.0)

    lo, hi = 1e-12, 1.0 - 1e-12
    if h(lo) <= 0 or h(hi) >= 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    k_abs = beta / 2.0 * math.sqrt(1.0 / u**2 - u**2)
    cos_res = (math.sqrt(1.0 - u**4) * math.cos(beta / (2.0 * u))
               - u**2 * math.sin(beta / (2.0 * u)))
    return u, k_abs, cos_res


# ---------------------------------------------------------------------------
# large-distance convergence targets


def large_ell_targets(gamma: float, tol: float = 1e-11) -> list[tuple[complex, float]]:
    """Lower-half-plane zeros K of F+- with their convergence rates.

    Zeros of F approach each K exponentially in ell; the predicted
    log-distance slope is 2*Im K + d where d is the minimal distance
    among the K set and from the K set to the real axis.
    """
    R = single_step_radius(gamma) * 1.02
    region = SearchRegion(-R, R, -R, -1e-8, boundary_samples=256, max_depth=14)
    recs = [r for r in single_step_zeros(gamma, region, tol=tol)
            if r.k.imag < -1e-10]
    points: list[complex] = []
    for r in recs:
        if not any(abs(r.k - p) < 1e-8 * max(1.0, abs(p)) for p in points):
            points.append(r.k)
    points.sort(key=lambda z: (z.real, z.imag))
    if not points:
        return []
    d = min(-p.imag for p in points)
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            d = min(d, abs(p - q))
    return [(p, 2.0 * p.imag + d) for p in points]


def ladder_constants(gamma: float, grid: int = 400) -> dict:
    """Numerical values of the threshold constants C1..C4 and d.

    The constants are defined through extrema of |F- F+| over compact
    sets; here they are estimated by grid minimization with one local
    refinement pass.  They only enter tests as thresholds.
    """
    r = region_r(gamma)
    sq = math.sqrt(gamma)
    targets = large_ell_targets(gamma)
    if not targets:
        raise ValueError("F+- have no lower-half-plane zeros at this gamma")
    points = [p for p, _ in targets]
    d = min(min(-p.imag for p in points),
            min((abs(p - q) for i, p in enumerate(points)
                 for q in points[i + 1:]), default=math.inf))

    def prod_abs(k: complex) -> float:
        a = eval_F_minus(k, gamma)
        b = eval_F_plus(k, gamma)
        return abs(a.f * b.f) * math.exp(a.log_scale + b.log_scale)

    c1 = gamma**2 + math.sinh(math.sqrt((1 + r**2) * gamma)) ** 2 / (1 + r**2)

    # C2: strip |Re k| <= sqrt(gamma) r, -d/2 < Im k < 0
    xs = np.linspace(-sq * r, sq * r, grid)
    ys = np.linspace(-d / 2 * (1 - 1e-6), -d / (2 * grid), grid)
    c2 = min(prod_abs(complex(x, y)) / y**2 for x in xs for y in ys)

    # C3: lower semicircle |k| = sqrt(gamma) r
    ts = np.linspace(-math.pi, 0.0, 4 * grid)
    c3 = min(prod_abs(sq * r * complex(math.cos(t), math.sin(t))) for t in ts)

    # C4: punctured discs of radius d/2 around each K
    c4 = math.inf
    rads = np.linspace(d / (2 * grid), d / 2, grid // 4)
    angs = np.linspace(0, 2 * math.pi, grid // 4, endpoint=False)
    for p in points:
        for rho in rads:
            for t in angs:
                k = p + rho * complex(math.cos(t), math.sin(t))
                c4 = min(c4, prod_abs(k) / rho**2)
    return {"C1": c1, "C2": c2, "C3": c3, "C4": c4, "d": d, "targets": targets}

"""Branch tracing through parameter space.

Three kinds of branches are traced:

* zero trajectories k(ell) or k(gamma) of the characteristic function,
  by a secant predictor and a Newton corrector on the complex equation
  F = 0;
* spectral-singularity curves, by continuation on the two real
  equations of the real-axis system, with unknowns (k, gamma) when
  driving ell and (k, ell) when driving gamma, falling back to
  pseudo-arclength steps at folds;
* the symmetry-breaking threshold curve gamma*(ell), a singularity
  curve grown from the lowest adjacent-elements singularity.

The atlas assembles singularity curves from the seed table plus
distance-periodicity shifts and reports branch intersections
(coexisting singularities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .model import ModelParams, eval_F, eval_F_scale
from .singularities import (SingularityPoint, TABLE1_SEEDS, build_point,
                            polish_real_axis_zero, real_system_residual,
                            u_from_k_beta)

__all__ = [
    "Branch",
    "BranchPoint",
    "BranchKind",
    "trace_zero",
    "trace_zero_family",
    "trace_singularity",
    "threshold_curve",
    "atlas",
    "branch_intersections",
]

_MIN_STEP_FACTOR = 1e-6  # truncate the branch below range * this
_SUCCESS_DOUBLE = 5


class BranchKind(str, Enum):
    SINGULARITY_CURVE = "SingularityCurve"
    ZERO_TRAJECTORY = "ZeroTrajectory"
    THRESHOLD_CURVE = "ThresholdCurve"


@dataclass(frozen=True)
class BranchPoint:
    ell: float
    gamma: float
    k: complex


@dataclass
class Branch:
    kind: BranchKind
    points: list = field(default_factory=list)
    origin: str = ""
    events: list = field(default_factory=list)  # (param, kind, k)
    flags: list = field(default_factory=list)

    def verify(self, tol: float = 1e-8) -> bool:
        """Re-evaluate |F| at every point from scratch."""
        for p in self.points:
            params = ModelParams(p.gamma, p.ell)
            fv = eval_F(p.k, params)
            scale = math.exp(eval_F_scale(p.k, params))
            if abs(fv.value) > tol * scale:
                return False
        return True


def _params_at(drive: str, base: ModelParams, value: float) -> ModelParams:
    if drive == "ell":
        return ModelParams(base.gamma, value)
    if drive == "gamma":
        return ModelParams(value, base.ell)
    raise ValueError(f"drive must be 'ell' or 'gamma', got {drive!r}")


def _newton_k(k: complex, params: ModelParams, tol: float,
              max_iter: int = 30) -> Optional[complex]:
    """Newton on F(k) = 0 in complex k; None on failure."""
    scale = math.exp(min(eval_F_scale(k, params), 650.0))
    for _ in range(max_iter):
        fv = eval_F(k, params)
        if fv.df == 0:
            return None
        step = fv.f / fv.df
        k = k - step
        if not (math.isfinite(k.real) and math.isfinite(k.imag)):
            return None
        if abs(step) < 1e-13 * max(1.0, abs(k)):
            break
    fv = eval_F(k, params)
    if abs(fv.f) * math.exp(fv.log_scale) <= tol * scale:
        return k
    return None


def trace_zero(seed_k: complex, params: ModelParams, drive: str,
               range_: tuple[float, float], step: Optional[float] = None,
               tol: float = 1e-10, origin: str = "") -> Branch:
    """Trace a single zero trajectory; see :func:`trace_zero_family`."""
    return trace_zero_family([seed_k], params, drive, range_, step=step,
                             tol=tol, origins=[origin])[0]


def trace_zero_family(seed_ks, params: ModelParams, drive: str,
                      range_: tuple[float, float],
                      step: Optional[float] = None, tol: float = 1e-10,
                      origins=None) -> list[Branch]:
    """Trace several zeros in lockstep with collision detection.

    Each zero is continued by a secant predictor in the driven
    parameter and a Newton corrector in complex k.  The step is shared:
    it halves when any corrector fails and doubles after five clean
    steps, capped at range/50.  A pair of trajectories closer than
    10 * tol marks both branches with a collision flag.  Sign changes
    of Im k are recorded as events with the crossing parameter value
    located by linear interpolation.
    """
    a, b = float(range_[0]), float(range_[1])
    if a == b:
        raise ValueError("empty drive range")
    span = abs(b - a)
    direction = 1.0 if b > a else -1.0
    h0 = step if step is not None else span / 200.0
    h_cap = span / 50.0
    h_min = span * _MIN_STEP_FACTOR
    origins = origins or [""] * len(seed_ks)

    base = params
    branches = [Branch(kind=BranchKind.ZERO_TRAJECTORY, origin=o)
                for o in origins]
    ks = []
    for br, k0 in zip(branches, seed_ks):
        k = _newton_k(complex(k0), _params_at(drive, base, a), tol)
        if k is None:
            br.flags.append("seed-rejected")
            ks.append(None)
        else:
            p = _params_at(drive, base, a)
            br.points.append(BranchPoint(p.ell, p.gamma, k))
            ks.append(k)
    prev = [(a, k) for k in ks]  # for the secant predictor
    prev2 = [None] * len(ks)

    t = a
    h = min(h0, h_cap)
    streak = 0
    while (b - t) * direction > 1e-12 * span:
        h_try = min(h, (b - t) * direction)
        t_new = t + direction * h_try
        p_new = _params_at(drive, base, t_new)
        new_ks = []
        ok = True
        for i, k in enumerate(ks):
            if k is None:
                new_ks.append(None)
                continue
            guess = k
            if prev2[i] is not None and prev[i][0] != prev2[i][0]:
                slope = (prev[i][1] - prev2[i][1]) / (prev[i][0] - prev2[i][0])
                guess = k + slope * (t_new - t)
            k_new = _newton_k(guess, p_new, tol)
            if k_new is None:
                ok = False
                break
            new_ks.append(k_new)
        if not ok:
            if h_try <= h_min:
                for i, k in enumerate(ks):
                    if k is not None:
                        branches[i].flags.append("stalled")
                        ks[i] = None
                break
            h = h_try / 2.0
            streak = 0
            continue

        for i, (k_old, k_new) in enumerate(zip(ks, new_ks)):
            if k_new is None:
                continue
            if k_old.imag * k_new.imag < 0:
                frac = k_old.imag / (k_old.imag - k_new.imag)
                t_cross = t + frac * (t_new - t)
                kind = "im-down" if k_new.imag < 0 else "im-up"
                branches[i].events.append((t_cross, kind,
                                           k_old + frac * (k_new - k_old)))
            branches[i].points.append(BranchPoint(p_new.ell, p_new.gamma, k_new))
            prev2[i] = prev[i]
            prev[i] = (t_new, k_new)
        live = [k for k in new_ks if k is not None]
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                if abs(live[i] - live[j]) < 10.0 * tol:
                    for br, k in zip(branches, new_ks):
                        if k is not None and (k == live[i] or k == live[j]):
                            if "collision" not in br.flags:
                                br.flags.append("collision")
        ks = new_ks
        t = t_new
        streak += 1
        if streak >= _SUCCESS_DOUBLE:
            h = min(2.0 * h, h_cap)
            streak = 0
        if all(k is None for k in ks):
            break
    return branches


# ---------------------------------------------------------------------------
# singularity curves


def _sing_residual(x, drive_val: float, drive: str):
    """Residual of the real system; unknowns x = (k, other)."""
    k, other = x
    if drive == "ell":
        params = ModelParams(other, drive_val)   # other = gamma
    else:
        params = ModelParams(drive_val, other)   # other = ell
    return np.array(real_system_residual(k, params))


def _sing_correct(x0, drive_val: float, drive: str, tol: float,
                  max_iter: int = 30):
    """Newton on the 2x2 real system; None on failure."""
    x = np.array(x0, dtype=float)
    for _ in range(max_iter):
        try:
            r = _sing_residual(x, drive_val, drive)
        except ValueError:
            return None
        J = np.empty((2, 2))
        for j in range(2):
            h = 1e-7 * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            xm = x.copy()
            xm[j] -= h
            try:
                J[:, j] = (_sing_residual(xp, drive_val, drive)
                           - _sing_residual(xm, drive_val, drive)) / (2 * h)
            except ValueError:
                return None
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            return None
        x = x - step
        if not np.all(np.isfinite(x)) or x[0] <= 0 or x[1] < 0:
            return None
        if np.max(np.abs(step)) < 1e-13 * max(1.0, np.max(np.abs(x))):
            break
    r = _sing_residual(x, drive_val, drive)
    gamma = x[1] if drive == "ell" else drive_val
    beta = math.sqrt(2.0 * gamma)
    u = u_from_k_beta(float(x[0]), beta)
    scale = 1.0 + math.cosh(min(700.0, beta * u))  # magnitude of the system terms
    if np.max(np.abs(r)) <= tol * scale:
        return x
    return None


def _arclength_step(x, t, dx, dt, drive: str, tol: float, max_iter: int = 30):
    """Pseudo-arclength corrector: unknowns (k, other, drive_val) with a
    tangent constraint; used when the parameter-driven corrector folds."""
    y = np.array([x[0] + dx[0], x[1] + dx[1], t + dt])
    tang = np.array([dx[0], dx[1], dt])
    nrm = np.linalg.norm(tang)
    if nrm == 0:
        return None
    tang /= nrm
    y0 = y.copy()
    for _ in range(max_iter):
        try:
            r2 = _sing_residual(y[:2], y[2], drive)
        except ValueError:
            return None
        r = np.array([r2[0], r2[1], float(tang @ (y - y0))])
        J = np.empty((3, 3))
        for j in range(3):
            h = 1e-7 * max(1.0, abs(y[j]))
            yp = y.copy()
            yp[j] += h
            ym = y.copy()
            ym[j] -= h
            try:
                rp = _sing_residual(yp[:2], yp[2], drive)
                rm = _sing_residual(ym[:2], ym[2], drive)
            except ValueError:
                return None
            J[0, j] = (rp[0] - rm[0]) / (2 * h)
            J[1, j] = (rp[1] - rm[1]) / (2 * h)
            J[2, j] = tang[j]
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            return None
        y = y - step
        if not np.all(np.isfinite(y)) or y[0] <= 0 or y[1] < 0:
            return None
        if np.max(np.abs(step)) < 1e-12 * max(1.0, np.max(np.abs(y))):
            return y
    return None


def trace_singularity(seed: SingularityPoint, drive: str,
                      range_: tuple[float, float],
                      step: Optional[float] = None, tol: float = 1e-9,
                      origin: str = "",
                      kind: BranchKind = BranchKind.SINGULARITY_CURVE) -> Branch:
    """Continue a spectral-singularity curve along ell or gamma.

    The corrector solves the two real equations of the real-axis system
    for (k, gamma) at fixed ell (drive = 'ell') or (k, ell) at fixed
    gamma (drive = 'gamma').  When the corrector fails at the minimal
    step, one pseudo-arclength step is attempted before the branch is
    truncated with a flag.
    """
    if drive not in ("ell", "gamma"):
        raise ValueError(f"drive must be 'ell' or 'gamma', got {drive!r}")
    return _trace_singularity_impl(seed, drive, range_, step, tol, origin,
                                   kind, fold_range=None,
                                   gamma_cap=math.inf)


def _trace_singularity_impl(seed, drive, range_, step, tol, origin, kind,
                            fold_range, gamma_cap) -> Branch:
    a, b = float(range_[0]), float(range_[1])
    if a == b:
        raise ValueError("empty drive range")
    span = abs(b - a)
    direction = 1.0 if b > a else -1.0
    h = min(step if step is not None else span / 200.0, span / 50.0)
    h_cap = span / 50.0
    h_min = span * _MIN_STEP_FACTOR

    br = Branch(kind=kind, origin=origin)
    if drive == "ell":
        x = np.array([seed.k, seed.gamma])
        t = seed.ell
    else:
        x = np.array([seed.k, seed.ell])
        t = seed.gamma
    if abs(t - a) > 1e-9 * max(1.0, span):
        raise ValueError("seed does not sit at the start of the drive range")
    x0 = _sing_correct(x, a, drive, tol)
    if x0 is None:
        br.flags.append("seed-rejected")
        return br
    x = x0

    def record(t_val, xv):
        if drive == "ell":
            br.points.append(BranchPoint(t_val, xv[1], complex(xv[0])))
        else:
            br.points.append(BranchPoint(xv[1], t_val, complex(xv[0])))

    record(t, x)
    prev = (t, x.copy())
    prev2 = None
    streak = 0
    lo, hi = min(a, b), max(a, b)
    while (b - t) * direction > 1e-12 * span:
        h_try = min(h, (b - t) * direction)
        t_new = t + direction * h_try
        guess = x.copy()
        pred_move = np.zeros(2)
        if prev2 is not None and prev[0] != prev2[0]:
            pred_move = (prev[1] - prev2[1]) * ((t_new - t) / (prev[0] - prev2[0]))
            guess = x + pred_move
        x_new = _sing_correct(guess, t_new, drive, tol)
        # reject corrections that leap to a neighboring branch
        if x_new is not None and np.linalg.norm(x_new - guess) > \
                max(0.05 * max(1.0, float(np.linalg.norm(x))),
                    3.0 * float(np.linalg.norm(pred_move))):
            x_new = None
        if x_new is None:
            if h_try > h_min:
                h = h_try / 2.0
                streak = 0
                continue
            br.flags.append("fold")
            bounds = fold_range if fold_range is not None else (lo, hi)
            fold_pts = _trace_arclength(x, t, prev2, direction, drive,
                                        bounds, bounds[1] - bounds[0],
                                        tol, record, gamma_cap=gamma_cap)
            if fold_pts == 0:
                br.flags.append("stalled")
            break
        prev2 = prev
        prev = (t_new, x_new.copy())
        record(t_new, x_new)
        x, t = x_new, t_new
        streak += 1
        if streak >= _SUCCESS_DOUBLE:
            h = min(2.0 * h, h_cap)
            streak = 0
    return br


def _trace_arclength(x, t, prev2, direction, drive, bounds, span, tol,
                     record, gamma_cap: float = math.inf,
                     max_points: int = 3000) -> int:
    """Continue a folded singularity curve by pseudo-arclength steps.

    Follows the curve through the fold until the driven parameter
    leaves ``bounds`` or the point budget is spent.  Returns the number
    of points appended via ``record``.
    """
    lo, hi = bounds
    if prev2 is not None and prev2[0] != t:
        tang = np.array([x[0] - prev2[1][0], x[1] - prev2[1][1], t - prev2[0]])
    else:
        tang = np.array([0.0, 0.0, direction])
    nrm = np.linalg.norm(tang)
    if nrm == 0:
        return 0
    tang /= nrm
    ds = span / 400.0
    ds_min = span * 1e-7
    ds_cap = span / 50.0
    count = 0
    streak = 0
    while count < max_points:
        y = _arclength_step(x, t, tang[:2] * ds, float(tang[2] * ds),
                            drive, tol)
        if y is not None:
            pred = np.array([x[0], x[1], t]) + tang * ds
            if float(np.linalg.norm(y - pred)) > 3.0 * ds:
                y = None  # corrector leapt to a neighboring branch
        if y is None:
            if ds <= ds_min:
                return count
            ds /= 2.0
            streak = 0
            continue
        new_tang = np.array([y[0] - x[0], y[1] - x[1], y[2] - t])
        nrm = np.linalg.norm(new_tang)
        if nrm == 0:
            return count
        new_tang /= nrm
        if float(new_tang @ tang) < 0:
            # refuse to double back along the branch
            if ds <= ds_min:
                return count
            ds /= 2.0
            continue
        x = y[:2]
        t = float(y[2])
        tang = new_tang
        record(t, x)
        count += 1
        gamma = x[1] if drive == "ell" else t
        if gamma > gamma_cap:
            return count
        if not (lo - 1e-12 * span <= t <= hi + 1e-12 * span):
            return count
        streak += 1
        if streak >= _SUCCESS_DOUBLE:
            ds = min(2.0 * ds, ds_cap)
            streak = 0
    return count


def threshold_curve(ell_max: float = 3.0, step: float = 0.05,
                    tol: float = 1e-9) -> Branch:
    """Symmetry-breaking threshold gamma*(ell) from the ell = 0 seed."""
    g0, k0 = TABLE1_SEEDS[0]
    polished = polish_real_axis_zero(k0, g0, 0.0)
    if polished is None:
        raise RuntimeError("threshold seed failed to polish")
    k, gamma = polished
    beta = math.sqrt(2.0 * gamma)
    seed = SingularityPoint(k=k, gamma=gamma, ell=0.0,
                            u=u_from_k_beta(k, beta), beta=beta, n=0,
                            residual=0.0)
    return trace_singularity(seed, "ell", (0.0, ell_max), step=step, tol=tol,
                             origin="table1:0 shift:0",
                             kind=BranchKind.THRESHOLD_CURVE)


# ---------------------------------------------------------------------------
# atlas


def _dedupe(branches: list[Branch], tol: float = 1e-6) -> list[Branch]:
    """Drop branches whose sampled (ell, gamma) sets coincide."""
    kept: list[Branch] = []
    for br in branches:
        if not br.points:
            continue
        dup = False
        for other in kept:
            hits = 0
            for p in br.points[:: max(1, len(br.points) // 8)]:
                if any(abs(p.ell - q.ell) < tol and abs(p.gamma - q.gamma) < tol
                       for q in other.points):
                    hits += 1
            if hits >= max(2, len(br.points[:: max(1, len(br.points) // 8)]) - 1):
                dup = True
                break
        if not dup:
            kept.append(br)
    return kept


def branch_intersections(branches: list[Branch],
                         tol: float = 5e-3) -> list[tuple]:
    """(ell, gamma) points where two branches carry distinct wavenumbers.

    Detected by sign changes of the gamma difference between linearly
    interpolated curves over their common ell range.
    """
    out = []
    for i, bi in enumerate(branches):
        for bj in branches[i + 1:]:
            if len(bi.points) < 2 or len(bj.points) < 2:
                continue
            ei = np.array([p.ell for p in bi.points])
            gi = np.array([p.gamma for p in bi.points])
            ej = np.array([p.ell for p in bj.points])
            gj = np.array([p.gamma for p in bj.points])
            if not (np.all(np.diff(ei) > 0) and np.all(np.diff(ej) > 0)):
                continue
            lo = max(ei[0], ej[0])
            hi = min(ei[-1], ej[-1])
            if hi <= lo:
                continue
            xs = np.linspace(lo, hi, 400)
            d = np.interp(xs, ei, gi) - np.interp(xs, ej, gj)
            sign = np.sign(d)
            for m in range(len(xs) - 1):
                if sign[m] != 0 and sign[m + 1] != 0 and sign[m] != sign[m + 1]:
                    frac = d[m] / (d[m] - d[m + 1])
                    ell_x = xs[m] + frac * (xs[m + 1] - xs[m])
                    gam_x = float(np.interp(ell_x, ei, gi))
                    ki = complex(np.interp(ell_x, ei,
                                           [p.k.real for p in bi.points]))
                    kj = complex(np.interp(ell_x, ej,
                                           [p.k.real for p in bj.points]))
                    if abs(ki - kj) > tol:
                        out.append((float(ell_x), gam_x, bi.origin, bj.origin))
    return out


def atlas(gamma_max: float, ell_max: float, tol: float = 1e-9,
          max_shifts: int = 12) -> dict:
    """Singularity curves in the (ell, gamma) plane up to the given bounds.

    Seeds are the polished adjacent-elements singularities with
    gamma <= gamma_max, each replicated by the distance periodicity
    ell_j = j*pi/(2k) <= ell_max; every seed is traced toward ell_max
    and, for shifted seeds, back toward ell = 0.  Overlapping branches
    are deduplicated and pairwise intersections reported.
    """
    if not (gamma_max > 0 and ell_max > 0):
        raise ValueError("bounds must be positive")
    branches: list[Branch] = []
    for idx, (g0, k0) in enumerate(TABLE1_SEEDS):
        if g0 > gamma_max:
            continue
        polished = polish_real_axis_zero(k0, g0, 0.0)
        if polished is None:
            continue
        k, gamma = polished
        beta = math.sqrt(2.0 * gamma)
        period = math.pi / (2.0 * k)
        j = 0
        while j <= max_shifts:
            ell_j = j * period
            if ell_j > ell_max:
                break
            seed = SingularityPoint(k=k, gamma=gamma, ell=ell_j,
                                    u=u_from_k_beta(k, beta), beta=beta,
                                    n=j, residual=0.0)
            tag = f"table1:{idx} shift:{j}"
            cap = 2.0 * max(gamma_max, 4.5 * math.pi**2)
            if ell_j < ell_max:
                branches.append(_trace_singularity_impl(
                    seed, "ell", (ell_j, ell_max), None, tol, tag,
                    BranchKind.SINGULARITY_CURVE,
                    fold_range=(0.0, ell_max), gamma_cap=cap))
            if ell_j > 0.0:
                back = _trace_singularity_impl(
                    seed, "ell", (ell_j, 0.0), None, tol, tag + " back",
                    BranchKind.SINGULARITY_CURVE,
                    fold_range=(0.0, ell_max), gamma_cap=cap)
                back.points.reverse()
                branches.append(back)
            j += 1
    branches = _dedupe(branches)
    return {"branches": branches,
            "intersections": branch_intersections(branches)}

"""Locate, count and classify complex zeros inside a rectangle.

Counting uses the argument principle (phase continuation of log F along
the rectangle boundary, refined until each segment's phase step is
small).  Location uses recursive quadtree subdivision until each cell
isolates a single zero, followed by Newton refinement with Muller and
damped-descent fallbacks.  Multiple zeros are refined via Newton on
F/F', which has simple zeros.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .model import FValue, ModelParams, eval_F, eval_F_scale

__all__ = [
    "SearchRegion",
    "ZeroRecord",
    "Classification",
    "ContourError",
    "WindingAccuracyError",
    "count_zeros",
    "find_zeros",
    "classify",
    "verify_region_bounds",
    "classification_band",
    "region_r",
]

Evaluator = Callable[[complex], FValue]

# Phase step per boundary segment accepted without further refinement.
_PHASE_STEP = 0.8
_MAX_PHASE_DEPTH = 48
# |F| floor relative to the local scale below which a boundary point is
# treated as sitting on a zero.
_BOUNDARY_FLOOR = 1e-12
_JITTERS = 5


class ContourError(RuntimeError):
    """A zero sits on (or too close to) the counting contour."""


class WindingAccuracyError(RuntimeError):
    """The boundary integral did not converge to an integer winding."""


class Classification(str, enum.Enum):
    TRIVIAL_ORIGIN = "TrivialOrigin"
    RESONANCE = "Resonance"
    EIGENVALUE = "Eigenvalue"
    SPECTRAL_SINGULARITY = "SpectralSingularity"


@dataclass(frozen=True)
class SearchRegion:
    """Axis-aligned rectangle in the complex-k plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    boundary_samples: int = 128
    max_depth: int = 12

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate search region")
        if self.boundary_samples < 64:
            object.__setattr__(self, "boundary_samples", 64)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max),
                       0.5 * (self.im_min + self.im_max))

    @property
    def diag(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, k: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= k.real <= self.re_max + pad
                and self.im_min - pad <= k.imag <= self.im_max + pad)

    def dilated(self, factor: float, shift: complex = 0j) -> "SearchRegion":
        c = self.center + shift
        hw = 0.5 * (self.re_max - self.re_min) * factor
        hh = 0.5 * (self.im_max - self.im_min) * factor
        return replace(self, re_min=c.real - hw, re_max=c.real + hw,
                       im_min=c.imag - hh, im_max=c.imag + hh)


@dataclass
class ZeroRecord:
    """A located zero with classification and provenance."""

    k: complex
    classification: Optional[Classification] = None
    multiplicity: int = 1
    residual: float = math.inf
    newton_iters: int = 0
    flags: list = field(default_factory=list)


def classification_band(k: complex) -> float:
    """Half-width of the Im k = 0 / k = 0 classification band."""
    return 1e-9 * max(1.0, abs(k))


def _default_fn(params: ModelParams) -> Evaluator:
    return lambda k: eval_F(k, params)


def _default_scale(params: Optional[ModelParams]):
    if params is None:
        return lambda k: 0.0
    return lambda k: eval_F_scale(k, params)


def _log_abs(fv: FValue) -> float:
    return (math.log(abs(fv.f)) if fv.f != 0 else -math.inf) + fv.log_scale


def _phase_walk(fn: Evaluator, scale_log, a: complex, b: complex,
                fa: FValue, fb: FValue, depth: int) -> float:
    """Accumulated phase change of f along [a, b], refined recursively."""
    if fa.f == 0 or fb.f == 0:
        raise ContourError("exact zero on contour")
    d = cmath.phase(fb.f / fa.f)
    if abs(d) <= _PHASE_STEP and depth > 0:
        return d
    if depth >= _MAX_PHASE_DEPTH:
        raise ContourError("phase refinement exhausted (zero on contour?)")
    m = 0.5 * (a + b)
    fm = fn(m)
    if _log_abs(fm) <= math.log(_BOUNDARY_FLOOR) + scale_log(m):
        raise ContourError(f"|F| below boundary floor at {m}")
    return (_phase_walk(fn, scale_log, a, m, fa, fm, depth + 1)
            + _phase_walk(fn, scale_log, m, b, fm, fb, depth + 1))


def _winding(region: SearchRegion, fn: Evaluator, scale_log) -> int:
    corners = [complex(region.re_min, region.im_min),
               complex(region.re_max, region.im_min),
               complex(region.re_max, region.im_max),
               complex(region.re_min, region.im_max)]
    w = region.re_max - region.re_min
    h = region.im_max - region.im_min
    per_side = max(16, region.boundary_samples // 4)
    pts: list[complex] = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        n = max(8, int(per_side * (abs(b - a) / max(w, h))))
        pts.extend(a + (b - a) * j / n for j in range(n))
    vals = [fn(p) for p in pts]
    floor = math.log(_BOUNDARY_FLOOR)
    for p, v in zip(pts, vals):
        if _log_abs(v) <= floor + scale_log(p):
            raise ContourError(f"|F| below boundary floor at {p}")
    total = 0.0
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        total += _phase_walk(fn, scale_log, a, b, vals[i], vals[(i + 1) % n], 0)
    winding = total / (2.0 * math.pi)
    nearest = round(winding)
    if abs(winding - nearest) > 0.25:
        raise WindingAccuracyError(f"non-integer winding {winding}")
    return int(nearest)


def count_zeros(region: SearchRegion, params: Optional[ModelParams] = None,
                fn: Optional[Evaluator] = None) -> int:
    """Number of zeros of F (or ``fn``) inside the region, with multiplicity.

    A zero too close to the boundary triggers up to five small dilations
    of the contour before a :class:`ContourError` is raised.
    """
    if fn is None:
        if params is None:
            raise ValueError("either params or fn is required")
        fn = _default_fn(params)
    scale_log = _default_scale(params)
    err: Exception | None = None
    for j in range(_JITTERS + 1):
        reg = region if j == 0 else region.dilated(
            1.0 + 7e-4 * j, shift=region.diag * (3e-4 * j) * (1 + 1j))
        try:
            return _winding(reg, fn, scale_log)
        except ContourError as e:
            err = e
    raise ContourError(f"zero on contour after {_JITTERS} jitters: {err}")


# ---------------------------------------------------------------------------
# refinement


def _newton(fn: Evaluator, k0: complex, tol: float, scale_log,
            max_iter: int = 60, bound: Optional[float] = None):
    """Plain Newton; returns (k, residual, iters) or None on failure."""
    k = k0
    for i in range(1, max_iter + 1):
        fv = fn(k)
        if fv.df == 0 or not (math.isfinite(k.real) and math.isfinite(k.imag)):
            return None
        step = fv.f / fv.df
        k -= step
        if bound is not None and abs(k - k0) > bound:
            return None
        if abs(step) <= 1e-15 * (1.0 + abs(k)):
            fv = fn(k)
            res = _residual(fv, scale_log, k)
            if res <= tol:
                return k, res, i
            return None
    return None


def _residual(fv: FValue, scale_log, k: complex) -> float:
    return abs(fv.f) * math.exp(fv.log_scale - scale_log(k))


def _muller(fn: Evaluator, k0: complex, spread: float, tol: float, scale_log,
            max_iter: int = 80):
    xs = [k0 + spread, k0 - spread * 0.5 + spread * 0.8j, k0]
    fs = [fn(x).f for x in xs]
    for i in range(1, max_iter + 1):
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        h1, h2 = x1 - x0, x2 - x1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            return None
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        a = (d2 - d1) / (h1 + h2)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4 * f2 * a)
        den = b + disc if abs(b + disc) > abs(b - disc) else b - disc
        if den == 0:
            return None
        x3 = x2 - 2 * f2 / den
        fv3 = fn(x3)
        xs = [x1, x2, x3]
        fs = [f1, f2, fv3.f]
        if abs(x3 - x2) <= 1e-14 * (1.0 + abs(x3)):
            res = _residual(fv3, scale_log, x3)
            if res <= tol:
                return x3, res, i
            return None
    return None


def _damped_descent(fn: Evaluator, k0: complex, tol: float, scale_log,
                    max_iter: int = 120):
    """Newton with backtracking on |F| (modulus bisection fallback)."""
    k = k0
    fv = fn(k)
    for i in range(1, max_iter + 1):
        if fv.df == 0:
            return None
        step = fv.f / fv.df
        lam = 1.0
        for _ in range(40):
            trial = k - lam * step
            ft = fn(trial)
            if _log_abs(ft) < _log_abs(fv):
                k, fv = trial, ft
                break
            lam *= 0.5
        else:
            return None
        if abs(lam * step) <= 1e-15 * (1.0 + abs(k)):
            res = _residual(fv, scale_log, k)
            if res <= tol:
                return k, res, i
            return None
    return None


def _newton_multiple(fn: Evaluator, k0: complex, tol: float, scale_log,
                     max_iter: int = 80):
    """Newton on F/F' (simple zeros even at multiple zeros of F)."""
    k = k0
    for i in range(1, max_iter + 1):
        fv = fn(k)
        if fv.df == 0:
            return None
        delta = 1e-7 * (1.0 + abs(k))
        d2 = (fn(k + delta).df - fn(k - delta).df) / (2.0 * delta)
        h = fv.f / fv.df
        hp = 1.0 - fv.f * d2 / (fv.df * fv.df)
        if hp == 0:
            return None
        step = h / hp
        k -= step
        if abs(step) <= 1e-13 * (1.0 + abs(k)):
            res = _residual(fn(k), scale_log, k)
            return k, res, i
    return None


def _refine(fn: Evaluator, seed: complex, tol: float, scale_log,
            multiplicity: int, bound: float):
    if multiplicity <= 1:
        for attempt in (lambda: _newton(fn, seed, tol, scale_log, bound=bound),
                        lambda: _muller(fn, seed, bound * 0.05 + 1e-8, tol, scale_log),
                        lambda: _damped_descent(fn, seed, tol, scale_log)):
            out = attempt()
            if out is not None:
                return out
        return None
    return _newton_multiple(fn, seed, tol, scale_log)


# ---------------------------------------------------------------------------
# subdivision search


def _count_with_jitter(region: SearchRegion, fn: Evaluator, scale_log) -> int:
    err: Exception | None = None
    for j in range(_JITTERS + 1):
        reg = region if j == 0 else region.dilated(
            1.0 + 9e-4 * j, shift=region.diag * (4e-4 * j) * (1 - 1j))
        try:
            return _winding(reg, fn, scale_log)
        except ContourError as e:
            err = e
    raise ContourError(str(err))


def _in_counted_region(region: SearchRegion, k: complex) -> bool:
    """Whether ``k`` can have contributed to this cell's winding count.

    The jittered counting contours of :func:`_count_with_jitter` extend
    at most ``0.0045/2`` of each side length (dilation) plus
    ``0.002 * diag`` (shift) beyond the nominal rectangle; anything
    farther out belongs to a neighboring cell.
    """
    pad_re = 0.00225 * (region.re_max - region.re_min) + 0.002 * region.diag
    pad_im = 0.00225 * (region.im_max - region.im_min) + 0.002 * region.diag
    return (region.re_min - pad_re <= k.real <= region.re_max + pad_re
            and region.im_min - pad_im <= k.imag <= region.im_max + pad_im)


_SPLIT_FRACTIONS = (0.5, 0.5123, 0.4771, 0.5317, 0.4631)


def _subdivide(region: SearchRegion, frac: float) -> list[SearchRegion]:
    xm = region.re_min + frac * (region.re_max - region.re_min)
    ym = region.im_min + frac * (region.im_max - region.im_min)
    return [replace(region, re_max=xm, im_max=ym),
            replace(region, re_min=xm, im_max=ym),
            replace(region, re_max=xm, im_min=ym),
            replace(region, re_min=xm, im_min=ym)]


def _search(region: SearchRegion, fn: Evaluator, scale_log, tol: float,
            depth: int, out: list[ZeroRecord]) -> None:
    m = _count_with_jitter(region, fn, scale_log)
    if m == 0:
        return
    tiny = region.diag < max(1e-8, 50.0 * tol * max(1.0, abs(region.center)))
    terminal = tiny or depth >= region.max_depth
    if m == 1 or terminal:
        result = _refine(fn, region.center, tol, scale_log, m,
                         bound=4.0 * region.diag)
        if result is None and m == 1:
            # retry from off-center seeds before giving up
            for frac in (0.25 + 0.25j, 0.75 + 0.25j, 0.25 + 0.75j, 0.75 + 0.75j):
                seed = complex(region.re_min + frac.real * (region.re_max - region.re_min),
                               region.im_min + frac.imag * (region.im_max - region.im_min))
                result = _refine(fn, seed, tol, scale_log, m, bound=4.0 * region.diag)
                if result is not None:
                    break
        if result is not None and not _in_counted_region(region, result[0]):
            # converged to a zero of a neighboring cell; the one in this
            # cell is still unlocated
            result = None
        if result is None and not terminal:
            pass  # fall through to subdivision below
        elif result is None:
            rec = ZeroRecord(k=region.center, multiplicity=m,
                             flags=["unresolved"])
            out.append(rec)
            return
        else:
            k, res, iters = result
            out.append(ZeroRecord(k=k, multiplicity=m, residual=res,
                                  newton_iters=iters))
            return
    last_err: Exception | None = None
    for frac in _SPLIT_FRACTIONS:
        try:
            children = _subdivide(region, frac)
            for child in children:
                _search(child, fn, scale_log, tol, depth + 1, out)
            return
        except ContourError as e:
            last_err = e
            continue
    raise ContourError(f"could not split cell cleanly: {last_err}")


def _merge(records: list[ZeroRecord], tol: float) -> list[ZeroRecord]:
    merged: list[ZeroRecord] = []
    for rec in sorted(records, key=lambda r: (r.k.real, r.k.imag)):
        for prev in merged:
            if abs(prev.k - rec.k) <= 10.0 * tol * max(1.0, abs(rec.k)):
                if "unresolved" not in rec.flags and "unresolved" in prev.flags:
                    prev.k, prev.residual = rec.k, rec.residual
                    prev.flags.remove("unresolved")
                elif "unresolved" not in rec.flags:
                    prev.multiplicity = max(prev.multiplicity, rec.multiplicity)
                break
        else:
            merged.append(rec)
    return merged


def find_zeros(region: SearchRegion, params: Optional[ModelParams] = None,
               tol: float = 1e-11, fn: Optional[Evaluator] = None,
               gamma: Optional[float] = None) -> list[ZeroRecord]:
    """All zeros of F (or ``fn``) in the region, refined and classified.

    The returned multiset has total multiplicity equal to
    ``count_zeros(region)``; records are sorted by (Re k, Im k).
    """
    if fn is None:
        if params is None:
            raise ValueError("either params or fn is required")
        fn = _default_fn(params)
    scale_log = _default_scale(params)
    if gamma is None and params is not None:
        gamma = params.gamma

    out: list[ZeroRecord] = []
    _search(region, fn, scale_log, tol, 0, out)
    records = _merge(out, tol)
    if gamma is not None:
        records = [classify(r, gamma) for r in records]
    return records


# ---------------------------------------------------------------------------
# classification and location bounds


def classify(record: ZeroRecord, gamma: float) -> ZeroRecord:
    """Assign the classification enum from Im k against the band."""
    k = record.k
    eps = classification_band(k)
    if abs(k) < eps:
        record.classification = Classification.TRIVIAL_ORIGIN
    elif abs(k.imag) <= eps:
        record.classification = Classification.SPECTRAL_SINGULARITY
    elif k.imag > 0:
        record.classification = Classification.RESONANCE
    else:
        record.classification = Classification.EIGENVALUE
        bound = gamma / 2.0 + 1e-8 * max(gamma, 1.0)
        if abs(k.real * k.imag) > bound:
            raise ValueError(
                f"eigenvalue {k} violates |Re k Im k| <= gamma/2")
    return record


def region_r(gamma: float) -> float:
    """Radius factor of the disc holding every lower-half-plane zero."""
    return max(39.0 / 20.0, math.sqrt(gamma) / 2.0)


def verify_region_bounds(record: ZeroRecord, params: ModelParams) -> bool:
    """True iff the zero lies in the admissible domain: the disc
    |k| <= sqrt(gamma)*r or the exponential sector in the upper
    half-plane."""
    k = record.k
    gamma, ell = params.gamma, params.ell
    if gamma == 0:
        return abs(k) <= 1e-9
    sq = math.sqrt(gamma)
    r = region_r(gamma)
    if abs(k) <= sq * r * (1.0 + 1e-12):
        return True
    if k.imag <= 0:
        return False
    grow = sq * math.exp((ell + 1.0) * k.imag)
    if not (grow < abs(k) < (47.0 / 25.0) * grow):
        return False
    return abs(k) < (76.0 / 73.0) * gamma * math.exp((ell + 9.0 / 8.0) * abs(k))

import math

import pytest

from ptwaveguide.asymptotics import (ladder_count, ladder_predict,
                                     large_ell_targets, single_step_radius,
                                     single_step_real_zero_candidate,
                                     single_step_zeros, small_gamma_zero,
                                     theta)
from ptwaveguide.model import ModelParams
from ptwaveguide.zerofinder import SearchRegion, count_zeros, find_zeros


def _found_ladder_zero(n, params, tol=1e-12):
    pred = ladder_predict(n, params)
    c, r = pred.k_pred, pred.radius
    region = SearchRegion(c.real - r, c.real + r, c.imag - r, c.imag + r)
    recs = find_zeros(region, params=params, tol=tol, gamma=params.gamma)
    assert len(recs) == 1
    return recs[0].k, pred.k_pred


def test_theta_and_count():
    assert theta(40.0) == pytest.approx(0.2123569, abs=1e-6)
    params = ModelParams(40.0, 100.0)
    assert ladder_count(params) == math.floor(0.5 + 2 * theta(40.0) * 100 / math.pi)
    assert ladder_count(params) == 14


def test_prediction_symmetry():
    # k_{-n} = -conj(k_n): the ladder is PT-symmetric
    params = ModelParams(40.0, 100.0)
    a = ladder_predict(3, params).k_pred
    b = ladder_predict(-3, params).k_pred
    assert abs(b - (-a.conjugate())) < 1e-15


def test_prediction_converges_at_fourth_order():
    # residual after the three displayed orders shrinks ~16x per doubling
    gamma, n = 40.0, 3
    errs = []
    for ell in (50.0, 100.0, 200.0):
        k_found, k_pred = _found_ladder_zero(n, ModelParams(gamma, ell))
        errs.append(abs(k_found - k_pred))
    assert 12.0 < errs[0] / errs[1] < 20.0
    assert 12.0 < errs[1] / errs[2] < 20.0


def test_ladder_sign_rule():
    # sign of sin(sqrt(2 gamma)) decides eigenvalue vs resonance side
    k40, _ = _found_ladder_zero(3, ModelParams(40.0, 100.0))
    k50, _ = _found_ladder_zero(3, ModelParams(50.0, 100.0))
    assert math.sin(math.sqrt(80.0)) > 0 and k40.imag < 0
    assert math.sin(math.sqrt(100.0)) < 0 and k50.imag > 0


def test_small_gamma_zero_expansion():
    # the near-origin imaginary zero at gamma = 0.01, ell = 1 matches
    # the gamma^2-leading candidate, and the remainder matches the
    # quartic coefficient
    gamma, ell = 0.01, 1.0
    params = ModelParams(gamma, ell)
    region = SearchRegion(-5e-4, 5e-4, 1e-5, 5e-4)
    recs = find_zeros(region, params=params, tol=1e-14, gamma=gamma)
    assert len(recs) == 1
    z = recs[0].k
    sg = small_gamma_zero(params)
    lead = 1j * (ell + 1.0 / 3.0) * gamma**2
    assert abs(z - lead) < 1e-7  # remainder is O(gamma^4)
    assert abs(z - sg.proof_consistent) < 1e-10
    # the gamma-leading candidate is two orders of magnitude off
    assert abs(z - sg.displayed) > 100 * abs(z - sg.proof_consistent)


def test_single_step_zero_tags_and_radius():
    gamma = 10.0
    R = single_step_radius(gamma)
    assert R >= math.sqrt(gamma)
    region = SearchRegion(-R, R, -R, -1e-6, boundary_samples=256)
    recs = single_step_zeros(gamma, region)
    assert recs, "single-step factors must have lower-half-plane zeros"
    for r in recs:
        assert ("F+" in r.flags) or ("F-" in r.flags)
    # PT pairing: F+ zeros are mirrors of F- zeros
    plus = sorted((r.k for r in recs if "F+" in r.flags),
                  key=lambda z: (z.real, z.imag))
    minus = sorted((-r.k.conjugate() for r in recs if "F-" in r.flags),
                   key=lambda z: (z.real, z.imag))
    assert len(plus) == len(minus)
    for a, b in zip(plus, minus):
        assert abs(a - b) < 1e-6


def test_single_step_real_zero_sign_rule():
    # F+- can have at most one real zero each, and the two zeros are a
    # mirror pair: evaluating the defining formulas places the F+ zero
    # at positive k and the F- zero at -k; exhibited at an amplitude
    # where the cosine condition holds
    lo, hi = 14.1, 14.2

    def cos_res(g):
        return single_step_real_zero_candidate(g)[2]

    assert cos_res(lo) * cos_res(hi) < 0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if cos_res(lo) * cos_res(mid) <= 0:
            hi = mid
        else:
            lo = mid
    gamma = 0.5 * (lo + hi)
    u, k_abs, res = single_step_real_zero_candidate(gamma)
    assert abs(res) < 1e-10
    from ptwaveguide.model import eval_F_minus, eval_F_plus
    assert abs(eval_F_plus(k_abs, gamma).value) < 1e-8
    assert abs(eval_F_minus(-k_abs, gamma).value) < 1e-8
    # and no zero with the opposite sign
    assert abs(eval_F_plus(-k_abs, gamma).value) > 1e-3
    assert abs(eval_F_minus(k_abs, gamma).value) > 1e-3


def test_large_ell_convergence_targets():
    gamma = 10.0
    targets = large_ell_targets(gamma)
    assert targets
    # zeros of F approach each K as ell grows
    K = min((p for p, _ in targets), key=lambda z: abs(z))
    for ell, bound in ((6.0, 2e-2), (12.0, 1e-3)):
        params = ModelParams(gamma, ell)
        r = 0.3
        region = SearchRegion(K.real - r, K.real + r, K.imag - r, K.imag + r)
        recs = find_zeros(region, params=params, gamma=gamma)
        assert recs
        d = min(abs(rec.k - K) for rec in recs)
        assert d < bound

import cmath
import math

import pytest

from ptwaveguide.model import (ModelDomainError, ModelParams, eval_F,
                               eval_F0, eval_F_minus, eval_F_plus,
                               eval_F_scale, eval_G)

from conftest import oracle_F, oracle_F_pm, oracle_F0, to_complex

K_POINTS = [0.3, 1.0, -2.0, 1.0 + 0.5j, -0.7 - 1.3j, 4.318, 3.0j, -2.5j,
            7.529, 0.05 + 0.02j]
PARAMS = [(0.0, 1.0), (0.5, 0.0), (2.071, 0.0), (3.0, 1.5), (13.307, 0.25),
          (40.0, 2.0)]


@pytest.mark.parametrize("gamma,ell", PARAMS)
@pytest.mark.parametrize("k", K_POINTS)
def test_F_matches_oracle(k, gamma, ell):
    fv = eval_F(k, ModelParams(gamma, ell))
    ref = to_complex(oracle_F(k, gamma, ell))
    scale = math.exp(eval_F_scale(k, ModelParams(gamma, ell)))
    assert abs(fv.value - ref) <= 1e-12 * max(scale, abs(ref))


@pytest.mark.parametrize("k", K_POINTS)
def test_factors_match_oracle(k):
    gamma = 5.0
    for sign, fn in ((-1, eval_F_minus), (+1, eval_F_plus)):
        got = fn(k, gamma)
        ref = to_complex(oracle_F_pm(k, gamma, sign))
        assert abs(got.value - ref) <= 1e-12 * max(1.0, abs(ref))
    got0 = eval_F0(k, gamma)
    ref0 = to_complex(oracle_F0(k, gamma))
    assert abs(got0.value - ref0) <= 1e-12 * max(1.0, abs(ref0))


@pytest.mark.parametrize("k", [0.5, 1.5 + 0.5j, -2.0 + 1.0j])
@pytest.mark.parametrize("gamma,ell", [(0.7, 0.3), (10.0, 1.0)])
def test_derivative_against_finite_differences(k, gamma, ell):
    params = ModelParams(gamma, ell)
    h = 1e-6
    num = (eval_F(k + h, params).value - eval_F(k - h, params).value) / (2 * h)
    assert abs(eval_F(k, params).df - num) <= 1e-5 * max(1.0, abs(num))


def test_zero_gamma_closed_form():
    # F(k, ell, 0) = -4 k^2 e^{2ik} for every ell
    for k in (0.5, 2.0, 1.0 + 1.0j, -3.0 + 0.2j):
        for ell in (0.0, 0.7, 5.0):
            got = eval_F(k, ModelParams(0.0, ell)).value
            ref = -4.0 * k * k * cmath.exp(2j * k)
            assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_pt_reflection_symmetry():
    # F(-conj(k)) = conj(F(k))
    params = ModelParams(4.2, 0.9)
    for k in (1.3 + 0.4j, -0.2 + 2.0j, 2.0 - 1.0j):
        a = eval_F(-k.conjugate(), params).value
        b = eval_F(k, params).value.conjugate()
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


def test_real_axis_periodicity_in_ell():
    # exp(-4ik ell) has period pi/(2k) in ell for real k
    gamma = 7.0
    for k in (0.8, 2.5, 6.0):
        a = eval_F(k, ModelParams(gamma, 1.1)).value
        b = eval_F(k, ModelParams(gamma, 1.1 + math.pi / (2 * k))).value
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_scaled_evaluation_large_k():
    # deep in the upper half-plane the exponential term dominates;
    # the scaled value must stay finite and match the oracle in log form
    k = 2.0 + 30.0j
    params = ModelParams(5.0, 10.0)
    fv = eval_F(k, params)
    assert math.isfinite(abs(fv.f))
    ref = oracle_F(k, params.gamma, params.ell)
    import mpmath as mp
    log_ref = float(mp.log(abs(ref)))
    log_got = math.log(abs(fv.f)) + fv.log_scale
    assert abs(log_got - log_ref) < 1e-9 * max(1.0, abs(log_ref))


def test_G_fills_origin():
    fv = eval_G(0.0, ModelParams(0.0, 1.0))
    assert abs(fv.f) < 1e-13
    assert abs(fv.df - (-4.0)) < 1e-10
    # series path agrees with the direct quotient at the same k
    params = ModelParams(1.3, 0.4)
    k = 9e-5 + 2e-5j  # below the cutoff: series path
    direct = eval_F(k, params).value / k
    assert abs(eval_G(k, params).f - direct) < 1e-9


def test_invalid_inputs_rejected():
    with pytest.raises(ModelDomainError):
        ModelParams(-1.0, 0.0)
    with pytest.raises(ModelDomainError):
        ModelParams(1.0, -0.5)
    with pytest.raises(ModelDomainError):
        eval_F(complex("inf"), ModelParams(1.0, 1.0))

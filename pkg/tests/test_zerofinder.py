import math

import numpy as np
import pytest

from ptwaveguide.model import ModelParams, eval_F, eval_F_scale
from ptwaveguide.zerofinder import (Classification, SearchRegion, ZeroRecord,
                                    classification_band, classify,
                                    count_zeros, find_zeros, region_r)


def test_double_zero_at_origin_gamma_zero():
    # F(k, ell, 0) = -4 k^2 e^{2ik}: double zero at the origin
    region = SearchRegion(-0.5, 0.5, -0.5, 0.5)
    params = ModelParams(0.0, 1.0)
    assert count_zeros(region, params=params) == 2
    recs = find_zeros(region, params=params, gamma=0.0)
    assert sum(r.multiplicity for r in recs) == 2
    assert all(abs(r.k) < 1e-6 for r in recs)


def test_lowest_zero_near_threshold():
    # gamma just below the ell = 0 breaking threshold: one zero close
    # to (1.065, 0), slightly above the axis
    params = ModelParams(2.071, 0.0)
    region = SearchRegion(0.5, 1.5, -0.2, 0.2)
    recs = [r for r in find_zeros(region, params=params, gamma=2.071)
            if abs(r.k) > 1e-6]
    assert len(recs) == 1
    k = recs[0].k
    assert abs(k.real - 1.065) < 5e-3
    assert 0 < k.imag < 1e-3
    assert recs[0].classification is Classification.RESONANCE


def test_count_matches_enumeration_random_regions():
    rng = np.random.default_rng(7)
    for _ in range(6):
        gamma = float(rng.uniform(0.5, 12.0))
        ell = float(rng.uniform(0.0, 2.0))
        params = ModelParams(gamma, ell)
        region = SearchRegion(0.3 + rng.uniform(0, 0.2), 4.0, -1.5, 2.0)
        m = count_zeros(region, params=params)
        recs = find_zeros(region, params=params, gamma=gamma)
        assert sum(r.multiplicity for r in recs) == m


def test_residuals_are_relative_to_local_scale():
    params = ModelParams(5.0, 1.0)
    region = SearchRegion(0.2, 3.0, -1.0, 1.5)
    for rec in find_zeros(region, params=params, gamma=5.0):
        fv = eval_F(rec.k, params)
        rel = abs(fv.f) * math.exp(fv.log_scale - eval_F_scale(rec.k, params))
        assert rel < 1e-9


def test_classification_bands():
    eps = classification_band(1.0)
    assert eps == 1e-9
    rec = classify(ZeroRecord(k=2.0 + 0.5e-9j), gamma=1.0)
    assert rec.classification is Classification.SPECTRAL_SINGULARITY
    rec = classify(ZeroRecord(k=2.0 + 1e-3j), gamma=1.0)
    assert rec.classification is Classification.RESONANCE
    rec = classify(ZeroRecord(k=2.0 - 1e-3j), gamma=100.0)
    assert rec.classification is Classification.EIGENVALUE
    rec = classify(ZeroRecord(k=1e-12j), gamma=1.0)
    assert rec.classification is Classification.TRIVIAL_ORIGIN


def test_eigenvalue_bound_enforced():
    # |Re k * Im k| <= gamma / 2 must hold for eigenvalues; classify
    # raises when handed a violating record
    with pytest.raises(ValueError):
        classify(ZeroRecord(k=5.0 - 5.0j), gamma=1.0)


def test_region_r():
    assert region_r(1.0) == pytest.approx(39.0 / 20.0)
    assert region_r(100.0) == pytest.approx(5.0)


def test_empty_region():
    params = ModelParams(1.0, 0.5)
    region = SearchRegion(0.2, 0.8, -0.8, -0.2)
    assert count_zeros(region, params=params) == 0
    assert find_zeros(region, params=params, gamma=1.0) == []

import math

import numpy as np
import pytest

from zeroleak.core import ValidationError
from zeroleak.dp import (
    epsilon_for_target_error,
    laplace_count_release,
    laplace_eae,
    ldp_count_mse,
    randomized_response,
    rr_error_prob,
)


def test_rr_error_prob_values():
    assert rr_error_prob(0.0) == 0.5
    assert rr_error_prob(math.log(3.0)) == pytest.approx(0.25, abs=1e-12)
    assert rr_error_prob(50.0) == pytest.approx(0.0, abs=1e-12)


def test_rr_error_prob_monotone_decreasing():
    grid = np.linspace(0.0, 10.0, 101)
    vals = [rr_error_prob(e) for e in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rr_empirical_flip_rate():
    eps = 1.0
    n = 200_000
    rng = np.random.default_rng(0)
    flips = sum(randomized_response(1, eps, rng) == 0 for _ in range(n)) / n
    p = rr_error_prob(eps)
    assert abs(flips - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_rr_satisfies_ldp_on_the_binary_channel():
    # max probability ratio across inputs for both outputs must be <= e^eps
    for eps in (0.1, 0.5, 1.0, 3.0):
        p_keep = 1.0 - rr_error_prob(eps)
        for out_prob_given_1, out_prob_given_0 in [
            (p_keep, 1.0 - p_keep),
            (1.0 - p_keep, p_keep),
        ]:
            ratio = out_prob_given_1 / out_prob_given_0
            assert max(ratio, 1.0 / ratio) <= math.exp(eps) + 1e-12


def test_rr_input_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValidationError):
        randomized_response(2, 1.0, rng)
    with pytest.raises(ValidationError):
        randomized_response(1, -0.5, rng)


def test_ldp_count_mse_values():
    # frozen from direct formula evaluation: 1000 * e * (e+1) / (e-1)^2
    expected = 1000 * math.e * (math.e + 1.0) / (math.e - 1.0) ** 2
    assert ldp_count_mse(1000, 1.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(3424.3, abs=0.05)
    with pytest.raises(ValidationError):
        ldp_count_mse(1000, 0.0)


def test_ldp_count_mse_asymptote_and_monotonicity():
    assert ldp_count_mse(1000, 10.0) < 1.01 * 1000
    grid = np.linspace(0.2, 20.0, 80)
    vals = [ldp_count_mse(10, e) for e in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_laplace_release_and_analytic_error():
    assert laplace_eae(2.0) == 0.5
    rng = np.random.default_rng(1)
    ys = np.array([laplace_count_release(10, 2.0, rng) for _ in range(50_000)])
    err = np.abs(ys - 10)
    assert abs(err.mean() - 0.5) <= 4 * err.std(ddof=1) / math.sqrt(len(err))
    a = laplace_count_release(3, 1.0, np.random.default_rng(9))
    b = laplace_count_release(3, 1.0, np.random.default_rng(9))
    assert a == b


def test_epsilon_for_target_error():
    assert epsilon_for_target_error(0.5, mechanism="laplace") == pytest.approx(2.0, abs=1e-6)
    assert epsilon_for_target_error(0.5, mechanism="rr") == 0.0
    assert epsilon_for_target_error(0.25, mechanism="rr") == pytest.approx(math.log(3.0), abs=1e-6)
    eps = epsilon_for_target_error(3424.3, mechanism="ldp_mse", n_users=1000)
    assert eps == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ValidationError):
        epsilon_for_target_error(0.0)
    with pytest.raises(ValidationError):
        epsilon_for_target_error(1e-9, mechanism="laplace")  # needs eps > 50
    with pytest.raises(ValidationError):
        epsilon_for_target_error(1.0, mechanism="ldp_mse")  # missing n_users

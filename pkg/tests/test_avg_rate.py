"""Closed-form Haar-averaged Eve rate against its Monte Carlo oracles,
plus the secrecy objective assembly."""

import math

import numpy as np
import pytest

from coopsec.avg_rate import (
    PowerAllocation,
    effective_gamma,
    f_b,
    f_tilde_e,
    f_tilde_e_mc,
    rate_eve_diff,
    secrecy_objective,
    zero_threshold,
)
from coopsec.channel import main_channel_from_matrix


def random_point(k, n_active, rng):
    g = np.zeros(k)
    g[:n_active] = rng.uniform(0.3, 4.0, size=n_active)
    rng.shuffle(g)
    sigma = rng.uniform(0.2, 2.5, size=k)
    return g, sigma


def test_k1_analytic_identity():
    rng = np.random.default_rng(21)
    for _ in range(30):
        g = rng.uniform(0.01, 20.0)
        s = rng.uniform(0.05, 5.0)
        m = int(rng.integers(1, 9))
        want = math.log1p(g * s * m)
        assert f_tilde_e(np.array([g]), np.array([s]), m) == pytest.approx(
            want, abs=1e-10
        )


def test_zero_power_gives_zero():
    assert f_tilde_e(np.zeros(3), np.array([0.5, 1.0, 2.0]), 2) == 0.0


@pytest.mark.parametrize(
    "k,m,n",
    [
        (2, 3, 2),  # M >= K >= n
        (3, 3, 1),
        (3, 2, 2),  # K > M >= n
        (4, 2, 1),
        (3, 2, 3),  # K >= n > M
        (4, 2, 3),
        (3, 1, 2),
    ],
)
def test_closed_form_matches_mc(k, m, n):
    rng = np.random.default_rng(100 * k + 10 * m + n)
    g, sigma = random_point(k, n, rng)
    val = f_tilde_e(g, sigma, m)
    mean, se = f_tilde_e_mc(g, sigma, m, 200_000, rng)
    assert math.log(mean - 3 * se) <= val <= math.log(mean + 3 * se)


def test_permutation_invariance():
    rng = np.random.default_rng(22)
    for _ in range(5):
        g, sigma = random_point(4, 3, rng)
        base = f_tilde_e(g, sigma, 2)
        for _ in range(5):
            p = rng.permutation(4)
            assert f_tilde_e(g[p], sigma, 2) == pytest.approx(base, abs=1e-9)


def test_zero_power_continuity_across_branches():
    # n = 3 -> 2 crossover at K=3, M=2 switches the K > M >= n and
    # K >= n > M closed forms
    sigma = np.array([0.7, 1.3, 0.4])
    g = np.array([2.0, 1.0, 0.0])
    below = f_tilde_e(g, sigma, 2)
    g_eps = np.array([2.0, 1.0, 1e-6 * 3.0])
    above = f_tilde_e(g_eps, sigma, 2)
    assert abs(above - below) <= 1e-4


def test_monotone_in_gamma_and_sigma():
    rng = np.random.default_rng(23)
    g, sigma = random_point(3, 3, rng)
    base = f_tilde_e(g, sigma, 2)
    for i in range(3):
        g2 = g.copy()
        g2[i] += 0.3
        assert f_tilde_e(g2, sigma, 2) > base
        s2 = sigma.copy()
        s2[i] += 0.3
        assert f_tilde_e(g, s2, 2) > base


def test_tied_powers_match_mc():
    """Fully tied powers force the extended-precision path."""
    g = np.array([1.5, 1.5, 1.5])
    sigma = np.array([0.8, 1.1, 0.6])
    val = f_tilde_e(g, sigma, 2)
    rng = np.random.default_rng(24)
    mean, se = f_tilde_e_mc(g, sigma, 2, 200_000, rng)
    assert math.log(mean - 3 * se) <= val <= math.log(mean + 3 * se)


def test_tied_powers_continuous_in_the_gap():
    sigma = np.array([0.8, 1.1, 0.6])
    tied = f_tilde_e(np.array([1.5, 1.5, 1.5]), sigma, 2)
    near = f_tilde_e(np.array([1.5, 1.5001, 1.4999]), sigma, 2)
    assert tied == pytest.approx(near, abs=1e-3)


def test_jensen_direction():
    # averaged-determinant form upper-bounds the average log-det rate
    from coopsec.avg_rate import f_e_exact_mc
    from coopsec.channel import sample_haar_unitary

    rng = np.random.default_rng(25)
    g, sigma = random_point(3, 3, rng)
    val = f_tilde_e(g, sigma, 2)
    acc = 0.0
    trials = 200
    for _ in range(trials):
        v1 = sample_haar_unitary(3, rng)
        mean, _ = f_e_exact_mc(g, sigma, v1, 2, 2_000, rng)
        acc += mean
    assert val >= acc / trials - 0.05


def test_rate_eve_diff_trivia():
    sigma = np.array([0.9])
    alloc = PowerAllocation(gamma_s=np.array([0.0]), gamma_a=np.array([1.2]))
    assert rate_eve_diff(alloc, sigma, 3) == 0.0
    alloc2 = PowerAllocation(gamma_s=np.array([2.0]), gamma_a=np.array([0.0]))
    assert rate_eve_diff(alloc2, sigma, 3) == pytest.approx(
        math.log1p(2.0 * 0.9 * 3), abs=1e-10
    )


def test_rate_eve_diff_nonnegative():
    rng = np.random.default_rng(26)
    for _ in range(10):
        gs = rng.uniform(0.0, 2.0, size=3)
        ga = rng.uniform(0.0, 2.0, size=3)
        alloc = PowerAllocation(gamma_s=gs, gamma_a=ga)
        sigma = rng.uniform(0.2, 2.0, size=3)
        assert rate_eve_diff(alloc, sigma, 2) >= -1e-9


def test_f_b_values():
    lam = np.array([4.0, 1.0])
    g = np.array([0.5, 2.0])
    want = math.log1p(1.5 * 4.0 * 0.5) + math.log1p(1.5 * 1.0 * 2.0)
    assert f_b(g, lam, 3.0, 2.0) == pytest.approx(want, rel=1e-12)
    assert f_b(np.zeros(2), lam, 3.0, 2.0) == 0.0


def test_secrecy_objective_assembly():
    class EveStub:
        sigma = np.array([[0.5, 0.2], [1.5, 0.8]])

    chan = main_channel_from_matrix(np.eye(2))
    zero = PowerAllocation(gamma_s=np.zeros(2), gamma_a=np.zeros(2))
    assert secrecy_objective(zero, chan, EveStub(), 2, 2.0, 2.0).secrecy == 0.0
    alloc = PowerAllocation(gamma_s=np.array([1.0, 0.5]), gamma_a=np.zeros(2))
    pair = secrecy_objective(alloc, chan, EveStub(), 2, 2.0, 2.0)
    assert pair.rate_eve_per_loc.shape == (2,)
    # the second location dominates (larger gains); max is the binding one
    assert pair.secrecy == pytest.approx(
        pair.rate_bob - pair.rate_eve_per_loc[1], rel=1e-12
    )


def test_power_allocation_validation():
    with pytest.raises(ValueError):
        PowerAllocation(gamma_s=np.array([-0.1]), gamma_a=np.array([0.0]))
    with pytest.raises(ValueError):
        PowerAllocation(gamma_s=np.array([1.0]), gamma_a=np.array([0.0, 1.0]))
    alloc = PowerAllocation(gamma_s=np.array([1.0]), gamma_a=np.array([0.5]))
    alloc.check_budget(1.5)
    with pytest.raises(ValueError):
        alloc.check_budget(1.4)


def test_effective_gamma_threshold():
    thr = zero_threshold(2.0)
    v = np.array([1.0, thr / 2, 0.8])
    eg = effective_gamma(v, thr)
    assert eg.active_count == 2
    np.testing.assert_allclose(eg.active_sorted, [1.0, 0.8])

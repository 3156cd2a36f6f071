"""Terminating hypergeometric sums and determinant helpers against a
generic extended-precision Pochhammer-series oracle."""

import math

import mpmath
import numpy as np
import pytest

from coopsec.special import (
    det_and_minors,
    hyp2f0_terminating,
    hyp2f0_terminating_deriv,
    hyp3f1_terminating,
    hyp3f1_terminating_deriv,
    log_gamma,
    log_vandermonde,
    vandermonde_det,
)

X_GRID = (0.01, 0.1, 1.0, 10.0)


def poch_series(num_params, den_params, z, n_terms):
    """Plain sum_{l} prod (a)_l / prod (b)_l * z^l / l! at 50 digits."""
    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for l in range(n_terms + 1):
            term = mpmath.power(z, l) / mpmath.factorial(l)
            for a in num_params:
                term *= mpmath.rf(a, l)
            for b in den_params:
                term /= mpmath.rf(b, l)
            total += term
        return float(total)


def test_hyp2f0_matches_pochhammer_oracle():
    for m in range(1, 9):
        for k in range(1, m + 1):
            for x in X_GRID:
                want = poch_series((m - k + 1, -k), (), -x, k)
                got = hyp2f0_terminating(m, k, x)
                assert got == pytest.approx(want, rel=1e-12), (m, k, x)


def test_hyp3f1_matches_pochhammer_oracle():
    for k in range(2, 9):
        for m in range(1, k):
            for x in X_GRID:
                want = poch_series((1, 1, -m), (k - m + 1,), -x, m)
                got = hyp3f1_terminating(m, k, x)
                assert got == pytest.approx(want, rel=1e-12), (m, k, x)


def test_hyp3f1_shifted_matches_pochhammer_oracle():
    for k in range(3, 9):
        for m in range(2, k):
            for x in X_GRID:
                want = poch_series((2, 2, 1 - m), (k - m + 2,), -x, m - 1)
                got = hyp3f1_terminating(m, k, x, shifted=True)
                assert got == pytest.approx(want, rel=1e-12), (m, k, x)


def test_series_monotone_increasing_in_x():
    # all coefficients positive, so strictly increasing on x >= 0
    for m, k in ((3, 2), (5, 5), (8, 1)):
        vals = [hyp2f0_terminating(m, k, x) for x in X_GRID]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    for m, k in ((1, 2), (3, 7), (5, 6)):
        vals = [hyp3f1_terminating(m, k, x) for x in X_GRID]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def central_fd(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def test_hyp2f0_deriv_matches_finite_difference():
    for m, k in ((2, 2), (4, 3), (7, 5)):
        for x in (0.05, 0.7, 3.0):
            fd = central_fd(lambda t: hyp2f0_terminating(m, k, t), x, 1e-6)
            assert hyp2f0_terminating_deriv(m, k, x) == pytest.approx(fd, rel=1e-7)


def test_hyp3f1_deriv_matches_finite_difference():
    for m, k in ((1, 3), (2, 5), (4, 6)):
        for x in (0.05, 0.7, 3.0):
            fd = central_fd(lambda t: hyp3f1_terminating(m, k, t), x, 1e-6)
            assert hyp3f1_terminating_deriv(m, k, x) == pytest.approx(fd, rel=1e-7)


def test_hyp_parameter_validation():
    with pytest.raises(ValueError):
        hyp2f0_terminating(2, 3, 1.0)
    with pytest.raises(ValueError):
        hyp2f0_terminating(3, 2, -0.5)
    with pytest.raises(ValueError):
        hyp3f1_terminating(3, 3, 1.0)


def test_vandermonde_vs_power_matrix():
    rng = np.random.default_rng(11)
    for n in (2, 3, 4, 5):
        a = np.sort(rng.uniform(0.1, 5.0, size=n))
        explicit = np.linalg.det(np.vander(a, increasing=True).T)
        assert vandermonde_det(a) == pytest.approx(explicit, rel=1e-10)


def test_log_vandermonde_consistent_with_product_form():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a = rng.uniform(-2.0, 2.0, size=4)
        sign, logmag = log_vandermonde(a)
        direct = vandermonde_det(a)
        assert sign == math.copysign(1.0, direct)
        assert logmag == pytest.approx(math.log(abs(direct)), rel=1e-12)


def test_log_vandermonde_repeated_entries():
    sign, logmag = log_vandermonde(np.array([1.0, 2.0, 1.0]))
    assert sign == 0.0 and logmag == -math.inf
    assert vandermonde_det(np.array([3.0, 3.0])) == 0.0


def test_det_and_minors():
    rng = np.random.default_rng(13)
    mat = rng.standard_normal((4, 4))
    det, minors = det_and_minors(mat, entries=[(0, 0), (2, 3)])
    assert det == pytest.approx(np.linalg.det(mat), rel=1e-12)
    sub = np.delete(np.delete(mat, 2, axis=0), 3, axis=1)
    assert minors[(2, 3)] == pytest.approx(np.linalg.det(sub), rel=1e-12)
    with pytest.raises(IndexError):
        det_and_minors(mat, entries=[(4, 0)])


def test_log_gamma():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    with pytest.raises(ValueError):
        log_gamma(0.0)

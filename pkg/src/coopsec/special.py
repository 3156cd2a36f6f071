"""Stable numerical primitives: log-gamma, terminating hypergeometric sums,
Vandermonde determinants, and determinants with minors.

The two hypergeometric evaluators implement the finite polynomial sums that
arise when one of the numerator parameters is a non-positive integer.  All
coefficients of these sums are positive, so a term-ratio recursion with a
compensated (Kahan) accumulation is both fast and accurate.
"""

import math

import numpy as np

__all__ = [
    "log_gamma",
    "hyp2f0_terminating",
    "hyp2f0_terminating_deriv",
    "hyp3f1_terminating",
    "hyp3f1_terminating_deriv",
    "vandermonde_det",
    "log_vandermonde",
    "det_and_minors",
]


def log_gamma(x):
    """Natural log of Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _kahan_sum(terms):
    """Compensated sum of an iterable of floats."""
    total = 0.0
    comp = 0.0
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def _hyp2f0_terms(m, k, x):
    """Terms of sum_{l=0}^{k} (m-k+1)_l * C(k,l) * x**l, all positive for
    m >= k and x >= 0."""
    terms = [1.0]
    t = 1.0
    for l in range(k):
        # ratio t_{l+1}/t_l = (m-k+l+1) * (k-l) * x / (l+1)
        t *= (m - k + l + 1) * (k - l) * x / (l + 1)
        terms.append(t)
    return terms


def hyp2f0_terminating(m, k, x):
    """Finite-sum value of 2F0(m-k+1, -k; ; -x) for integers m >= k >= 1.

    Equals sum_{l=0}^{k} G(m-k+l+1) G(k+1) x^l / [G(m-k+1) G(k+1-l) G(l+1)].
    """
    if not (m >= k >= 1):
        raise ValueError(f"hyp2f0_terminating requires m >= k >= 1, got m={m}, k={k}")
    if x < 0:
        raise ValueError(f"hyp2f0_terminating requires x >= 0, got {x}")
    return _kahan_sum(_hyp2f0_terms(m, k, x))


def hyp2f0_terminating_deriv(m, k, x):
    """d/dx of hyp2f0_terminating(m, k, x): term-wise polynomial derivative."""
    if not (m >= k >= 1):
        raise ValueError(f"hyp2f0_terminating requires m >= k >= 1, got m={m}, k={k}")
    if x < 0:
        raise ValueError(f"hyp2f0_terminating requires x >= 0, got {x}")
    # l-th derivative term: l * c_l * x^(l-1); recursion on d_l = l*c_l*x^(l-1)
    terms = []
    t = float((m - k + 1) * k)  # l=1 term: 1 * c_1 * x^0
    terms.append(t)
    for l in range(1, k):
        # d_{l+1}/d_l = (l+1) c_{l+1} x^l / (l c_l x^{l-1}) = (m-k+l+1)(k-l) x / l
        t *= (m - k + l + 1) * (k - l) * x / l
        terms.append(t)
    return _kahan_sum(terms)


def _hyp3f1_terms_unshifted(m, k, x):
    """Terms of sum_{l=0}^{m} l! m! (k-m)! x^l / [(k-m+l)! (m-l)!]."""
    terms = [1.0]
    t = 1.0
    for l in range(m):
        # ratio t_{l+1}/t_l = (l+1) * (m-l) * x / (k-m+l+1)
        t *= (l + 1) * (m - l) * x / (k - m + l + 1)
        terms.append(t)
    return terms


def _hyp3f1_terms_shifted(m, k, x):
    """Terms of 3F1(2, 2, 1-m; k-m+2; -x); terminates after m terms
    (l = 0..m-1)."""
    terms = [1.0]
    t = 1.0
    for l in range(m - 1):
        # ratio t_{l+1}/t_l = (l+2)^2 * (m-1-l) * x / ((k-m+2+l)(l+1))
        t *= (l + 2) ** 2 * (m - 1 - l) * x / ((k - m + 2 + l) * (l + 1))
        terms.append(t)
    return terms


def hyp3f1_terminating(m, k, x, shifted=False):
    """Finite-sum value of 3F1(1,1,-m; k-m+1; -x) for integers k > m >= 1.

    With ``shifted`` the parameters are (2, 2, 1-m; k-m+2), which is the
    series appearing in the derivative of the unshifted one.
    """
    if not (k > m >= 1):
        raise ValueError(f"hyp3f1_terminating requires k > m >= 1, got m={m}, k={k}")
    if x < 0:
        raise ValueError(f"hyp3f1_terminating requires x >= 0, got {x}")
    if shifted:
        return _kahan_sum(_hyp3f1_terms_shifted(m, k, x))
    return _kahan_sum(_hyp3f1_terms_unshifted(m, k, x))


def hyp3f1_terminating_deriv(m, k, x):
    """d/dx of the unshifted hyp3f1_terminating.

    Standard pFq differentiation gives
    d/dx 3F1(1,1,-m; k-m+1; -x) = m/(k-m+1) * 3F1(2,2,1-m; k-m+2; -x).
    """
    return m / (k - m + 1) * hyp3f1_terminating(m, k, x, shifted=True)


def vandermonde_det(a):
    """Vandermonde determinant prod_{j<k} (a_k - a_j) in direct product form.

    Repeated entries give exactly 0.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    out = 1.0
    for j in range(n):
        for k in range(j + 1, n):
            out *= a[k] - a[j]
    return out


def log_vandermonde(a):
    """(sign, log|det|) of the Vandermonde determinant of ``a``.

    Returns sign 0 and -inf for repeated entries.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    sign = 1.0
    logmag = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            d = a[k] - a[j]
            if d == 0.0:
                return 0.0, -math.inf
            if d < 0:
                sign = -sign
                d = -d
            logmag += math.log(d)
    return sign, logmag


def det_and_minors(mat, entries=()):
    """Determinant of a square matrix plus selected (row, col) minors.

    Each requested minor is the determinant of ``mat`` with that row and
    column removed.  Intended for the small matrices of this problem scale;
    minors are computed by direct sub-determinants.
    """
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"det_and_minors requires a square matrix, got shape {mat.shape}")
    n = mat.shape[0]
    det = 1.0 if n == 0 else float(np.linalg.det(mat))
    minors = {}
    for (a, b) in entries:
        if not (0 <= a < n and 0 <= b < n):
            raise IndexError(f"minor index ({a}, {b}) out of range for {n}x{n} matrix")
        sub = np.delete(np.delete(mat, a, axis=0), b, axis=1)
        minors[(a, b)] = 1.0 if sub.shape[0] == 0 else float(np.linalg.det(sub))
    return det, minors

"""Average-rate functions of the eigen-direction precoded wiretap system.

``f_b`` is the Bob-side log-det rate.  ``f_tilde_e`` is the closed-form
Haar-averaged determinant approximation of the per-location Alice-to-Eve
average rate; it dispatches on the antenna/active-power regime
(M >= K >= n, K > M >= n, K > n > M) and assembles all determinant ratios
in the log domain with explicit sign tracking.  Monte Carlo estimators for
both the exact (fixed-precoder) rate and the Haar-averaged surrogate serve
as independent oracles.
"""

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .channel import complex_gaussian, sample_haar_unitary_batch
from .special import (
    hyp2f0_terminating,
    hyp2f0_terminating_deriv,
    hyp3f1_terminating,
    hyp3f1_terminating_deriv,
    log_gamma,
    log_vandermonde,
)

__all__ = [
    "PowerAllocation",
    "EffectiveGamma",
    "RatePair",
    "GradResult",
    "effective_gamma",
    "zero_threshold",
    "f_b",
    "grad_f_b",
    "f_tilde_e",
    "grad_f_tilde_e",
    "rate_eve_diff",
    "secrecy_objective",
    "f_e_exact_mc",
    "f_tilde_e_mc",
]

#: Active-power threshold scale and tie-separation factor; see design notes
#: in f_tilde_e.
ZERO_THRESHOLD_REL = 1e-9
TIE_PERTURB_REL = 1e-7

#: Entries closer than this (relative) make the Vandermonde-cancelled
#: determinant ratios lose too many digits in binary64; such points are
#: evaluated in extended precision instead.
PRECISION_GAP_REL = 1e-5
_MP_DPS = 60


@dataclass(frozen=True)
class PowerAllocation:
    """Non-negative signal / artificial-noise power vectors of length K."""

    gamma_s: np.ndarray
    gamma_a: np.ndarray

    def __post_init__(self):
        gs = np.asarray(self.gamma_s, dtype=float)
        ga = np.asarray(self.gamma_a, dtype=float)
        if gs.shape != ga.shape or gs.ndim != 1:
            raise ValueError("gamma_s and gamma_a must be 1-D vectors of equal length")
        if np.any(gs < 0) or np.any(ga < 0):
            raise ValueError("power allocations must be non-negative")
        object.__setattr__(self, "gamma_s", gs)
        object.__setattr__(self, "gamma_a", ga)

    @property
    def total(self):
        return self.gamma_s + self.gamma_a

    def check_budget(self, budget):
        used = float(np.sum(self.total))
        if used > budget * (1.0 + 1e-9):
            raise ValueError(f"allocation uses {used} > budget {budget}")


@dataclass(frozen=True)
class EffectiveGamma:
    """A single power vector with its active (above-threshold) structure.

    ``order`` sorts the original entries descending; the first
    ``active_count`` sorted entries are the active powers.
    """

    values: np.ndarray
    order: np.ndarray
    active_count: int
    threshold: float

    @property
    def active_sorted(self):
        return self.values[self.order[: self.active_count]]


def zero_threshold(scale):
    """Power below this is treated as exactly zero for regime dispatch."""
    return ZERO_THRESHOLD_REL * max(float(scale), 1.0)


def effective_gamma(values, threshold=None):
    """Build the EffectiveGamma view of a raw power vector."""
    if isinstance(values, EffectiveGamma):
        return values
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("power vector must be 1-D")
    if np.any(v < 0):
        raise ValueError("power vector must be non-negative")
    if threshold is None:
        threshold = zero_threshold(np.sum(v))
    order = np.argsort(-v, kind="stable")
    n = int(np.sum(v > threshold))
    return EffectiveGamma(values=v, order=order, active_count=n, threshold=threshold)


RatePair = namedtuple("RatePair", ["rate_bob", "rate_eve_per_loc", "secrecy"])

GradResult = namedtuple("GradResult", ["values", "fd_fallback"])


def f_b(gamma, lam, gamma_b, gamma_e):
    """Bob-side rate sum_k log(1 + (gamma_b/gamma_e) * lam_k * gamma_k)."""
    g = gamma.values if isinstance(gamma, EffectiveGamma) else np.asarray(gamma, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if g.shape != lam.shape:
        raise ValueError("gamma and lam must have the same length")
    return float(np.sum(np.log1p((gamma_b / gamma_e) * lam * g)))


def grad_f_b(gamma, lam, gamma_b, gamma_e):
    """Component-wise gradient gamma_b*lam_i / (gamma_e + gamma_b*lam_i*gamma_i)."""
    g = gamma.values if isinstance(gamma, EffectiveGamma) else np.asarray(gamma, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return gamma_b * lam / (gamma_e + gamma_b * lam * g)


def _separate_ties(v, rel=TIE_PERTURB_REL):
    """Multiplicatively perturb duplicate entries so Vandermonde factors do
    not vanish; preserves the original order of ``v``."""
    v = np.array(v, dtype=float)
    order = np.argsort(v)
    sv = v[order]
    j = 0
    for i in range(1, sv.size):
        if math.isclose(sv[i], sv[i - 1], rel_tol=10 * rel, abs_tol=0.0):
            j += 1
            sv[i] = sv[i - 1] * (1.0 + rel) if sv[i - 1] != 0 else rel
        else:
            j = 0
    if np.unique(sv).size != sv.size:
        raise ValueError("duplicate entries could not be separated by perturbation")
    out = np.empty_like(v)
    out[order] = sv
    return out


def _branch(k, m, n):
    """Regime label for the closed-form dispatch."""
    if n == 0:
        return "zero"
    if m >= k:
        return "A"
    if m >= n:
        return "B"
    return "C"


def _hyp_row_2f0(m, k, sigma, gi):
    return np.array([hyp2f0_terminating(m, k, s * gi) for s in sigma])


def _hyp_row_3f1(m, k, sigma, gi):
    return np.array([hyp3f1_terminating(m, k, s * gi) for s in sigma])


def _matrix_a(sigma, g_act, m):
    k, n = sigma.size, g_act.size
    a = np.empty((k, k))
    for i in range(k - n):
        a[i] = sigma**i
    for i in range(n):
        a[k - n + i] = _hyp_row_2f0(m, k, sigma, g_act[i])
    return a


def _matrix_b(sigma, g_act, m):
    k, n = sigma.size, g_act.size
    b = np.empty((k, k))
    for i in range(k - n):
        b[i] = sigma**i
    pw = sigma ** (k - m)
    for i in range(n):
        b[k - n + i] = pw * _hyp_row_3f1(m, k, sigma, g_act[i])
    return b


def _matrix_c(sigma, g_act, m):
    k, n = sigma.size, g_act.size
    dim = k + n - m
    c = np.zeros((dim, dim))
    for i in range(k - m):
        c[i, n - m:] = sigma**i
    pw = sigma ** (k - m)
    for i in range(n):
        r = k - m + i
        c[r, : n - m] = g_act[i] ** np.arange(n - m)
        c[r, n - m:] = g_act[i] ** (n - m) * pw * _hyp_row_3f1(m, k, sigma, g_act[i])
    return c


def _log_prefactor(k, m, n, branch):
    """Sum of log-Gamma prefactors for each regime."""
    if branch == "A":
        return sum(
            log_gamma(k + 1 - j) + log_gamma(j + 1) + log_gamma(m - k + 1)
            - log_gamma(k + 1) - log_gamma(m - k + j + 1)
            for j in range(k - n, k)
        )
    if branch == "B":
        return -n * log_gamma(k - m + 1) + sum(
            log_gamma(k + 1 - j) + log_gamma(j + 1)
            - log_gamma(m + 1) - log_gamma(m - k + j + 1)
            for j in range(k - n, k)
        )
    # branch C
    return -m * log_gamma(m + 1) + sum(
        log_gamma(n + 1 - j) + log_gamma(k - n + j + 1)
        - log_gamma(k - m + 1) - log_gamma(m - n + j + 1)
        for j in range(n - m, n)
    )


def _min_rel_gap(v):
    """Smallest pairwise separation relative to the largest magnitude."""
    if v.size < 2:
        return math.inf
    sv = np.sort(v)
    scale = max(float(sv[-1]), 1e-300)
    return float(np.min(np.diff(sv))) / scale


def _f_tilde_e_mp(sigma, g_act, m, branch):
    """Extended-precision evaluation of the closed form.

    Same determinant-ratio formulas as the float path; used when tied
    (perturbed) gamma or sigma entries leave the ratio with fewer correct
    digits than binary64 carries.  The Vandermonde denominators shrink like
    gap**(multiplicity choose 2) while the matrix determinant cancels to
    match, so 60 digits is ample for the sizes handled here.
    """
    import mpmath as mp

    k, n = sigma.size, g_act.size
    with mp.workdps(_MP_DPS):
        sig = [mp.mpf(float(s)) for s in sigma]
        gam = [mp.mpf(float(g)) for g in g_act]

        def hyp2f0(x):
            term = mp.mpf(1)
            tot = mp.mpf(1)
            for l in range(k):
                term *= (m - k + l + 1) * (k - l) * x / (l + 1)
                tot += term
            return tot

        def hyp3f1(x):
            term = mp.mpf(1)
            tot = mp.mpf(1)
            for l in range(m):
                term *= (l + 1) * (m - l) * x / (k - m + l + 1)
                tot += term
            return tot

        if branch == "A":
            rows = [[s**i for s in sig] for i in range(k - n)]
            rows += [[hyp2f0(s * g) for s in sig] for g in gam]
            sign_target = mp.mpf(1)
            extra = -(k - n) * mp.fsum(mp.log(g) for g in gam)
        elif branch == "B":
            rows = [[s**i for s in sig] for i in range(k - n)]
            rows += [[s ** (k - m) * hyp3f1(s * g) for s in sig] for g in gam]
            sign_target = mp.mpf(1)
            extra = (n - m) * mp.fsum(mp.log(g) for g in gam)
        else:
            dim = k + n - m
            rows = [
                [mp.mpf(0)] * (n - m) + [s**i for s in sig] for i in range(k - m)
            ]
            rows += [
                [g**i for i in range(n - m)]
                + [g ** (n - m) * s ** (k - m) * hyp3f1(s * g) for s in sig]
                for g in gam
            ]
            assert len(rows) == dim
            sign_target = mp.mpf((-1) ** ((k - m) * (n - m)))
            extra = mp.mpf(0)
        det = mp.det(mp.matrix(rows))
        vand_s = mp.mpf(1)
        for j in range(k):
            for i in range(j):
                vand_s *= sig[j] - sig[i]
        vand_g = mp.mpf(1)
        for j in range(n):
            for i in range(j):
                vand_g *= gam[j] - gam[i]
        ratio = sign_target * det / (vand_s * vand_g)
        if ratio <= 0:
            raise ArithmeticError(
                f"non-positive determinant ratio in branch {branch} "
                f"(extended precision); coincident parameters?"
            )
        return _log_prefactor(k, m, n, branch) + float(mp.log(ratio) + extra)


def _prepare(gamma, sigma_row, threshold):
    eg = effective_gamma(gamma, threshold)
    sigma = _separate_ties(np.asarray(sigma_row, dtype=float))
    if np.any(sigma <= 0):
        raise ValueError("sigma entries must be positive")
    g_act = _separate_ties(eg.active_sorted) if eg.active_count else np.empty(0)
    return eg, sigma, g_act


def f_tilde_e(gamma, sigma_row, m_eve, threshold=None):
    """Closed-form log E[det(I + W S^(1/2) U G U^H S^(1/2) W^H)].

    ``gamma`` may be a raw K-vector or an EffectiveGamma.  Entries below the
    zero threshold are treated as exactly zero (regime dispatch), and tied
    gamma or sigma values are separated by a relative 1e-7 perturbation
    before evaluating the determinant ratios.
    """
    eg, sigma, g_act = _prepare(gamma, sigma_row, threshold)
    k, m, n = sigma.size, int(m_eve), eg.active_count
    branch = _branch(k, m, n)
    if branch == "zero":
        return 0.0
    if min(_min_rel_gap(sigma), _min_rel_gap(g_act)) < PRECISION_GAP_REL:
        return _f_tilde_e_mp(sigma, g_act, m, branch)
    if branch == "A":
        mat = _matrix_a(sigma, g_act, m)
        extra = -(k - n) * float(np.sum(np.log(g_act)))
        det_sign_target = 1.0
    elif branch == "B":
        mat = _matrix_b(sigma, g_act, m)
        extra = (n - m) * float(np.sum(np.log(g_act)))
        det_sign_target = 1.0
    else:
        mat = _matrix_c(sigma, g_act, m)
        extra = 0.0
        det_sign_target = (-1.0) ** ((k - m) * (n - m))
    sgn_mat, log_mat = np.linalg.slogdet(mat)
    s_sig, l_sig = log_vandermonde(sigma)
    s_gam, l_gam = log_vandermonde(g_act)
    total_sign = sgn_mat * det_sign_target * s_sig * s_gam
    if not (total_sign > 0 and np.isfinite(log_mat)):
        # Cancellation the gap pre-check did not anticipate; retry slowly.
        return _f_tilde_e_mp(sigma, g_act, m, branch)
    return _log_prefactor(k, m, n, branch) + log_mat - l_sig - l_gam + extra


def _grad_active(sigma, g_act, m, branch):
    """Gradient of f_tilde_e w.r.t. the sorted active powers, via the
    trace form of the log-determinant derivative."""
    k, n = sigma.size, g_act.size
    if min(_min_rel_gap(sigma), _min_rel_gap(g_act)) < PRECISION_GAP_REL:
        raise np.linalg.LinAlgError("near-coincident parameters")
    if branch == "A":
        mat = _matrix_a(sigma, g_act, m)
    elif branch == "B":
        mat = _matrix_b(sigma, g_act, m)
    else:
        mat = _matrix_c(sigma, g_act, m)
    if np.linalg.cond(mat) > 1e10:
        raise np.linalg.LinAlgError("ill-conditioned closed-form matrix")
    inv = np.linalg.inv(mat)
    if not np.all(np.isfinite(inv)):
        raise np.linalg.LinAlgError("non-finite inverse")
    grad = np.empty(n)
    for i in range(n):
        gi = g_act[i]
        if branch == "A":
            row = k - n + i
            dvals = sigma * np.array(
                [hyp2f0_terminating_deriv(m, k, s * gi) for s in sigma]
            )
            tr = float(inv[:, row] @ dvals)
            tr -= (k - n) / gi
        elif branch == "B":
            row = k - n + i
            dvals = sigma ** (k - m + 1) * np.array(
                [hyp3f1_terminating_deriv(m, k, s * gi) for s in sigma]
            )
            tr = float(inv[:, row] @ dvals)
            tr += (n - m) / gi
        else:
            row = k - m + i
            dvals = np.zeros(k + n - m)
            j = np.arange(n - m)
            dvals[: n - m] = j * gi ** np.maximum(j - 1, 0) * (j > 0)
            f_vals = _hyp_row_3f1(m, k, sigma, gi)
            fp_vals = np.array([hyp3f1_terminating_deriv(m, k, s * gi) for s in sigma])
            dvals[n - m:] = (
                (n - m) * gi ** (n - m - 1) * sigma ** (k - m) * f_vals
                + gi ** (n - m) * sigma ** (k - m + 1) * fp_vals
            )
            tr = float(inv[:, row] @ dvals)
        # derivative of -log Delta_n(gamma)
        others = np.delete(g_act, i)
        tr -= float(np.sum(1.0 / (gi - others)))
        grad[i] = tr
    return grad


def grad_f_tilde_e(gamma, sigma_row, m_eve, threshold=None, fd_step=None):
    """Gradient of f_tilde_e in the original coordinate order.

    Active coordinates use the closed-form regime-matched expressions;
    inactive coordinates use a forward finite difference (the closed forms
    are only defined on the active block).  A numerically singular matrix
    triggers a full finite-difference fallback, flagged in the result.
    """
    eg, sigma, g_act = _prepare(gamma, sigma_row, threshold)
    k, m, n = sigma.size, int(m_eve), eg.active_count
    if fd_step is None:
        fd_step = 1e-6 * max(float(np.sum(eg.values)), 1.0)
    branch = _branch(k, m, n)
    grad = np.zeros(k)
    fallback = False
    if branch != "zero":
        try:
            g_act_grad = _grad_active(sigma, g_act, m, branch)
            if not np.all(np.isfinite(g_act_grad)):
                raise np.linalg.LinAlgError("non-finite gradient")
            grad[eg.order[:n]] = g_act_grad
        except np.linalg.LinAlgError:
            fallback = True
            base = f_tilde_e(eg, sigma, m, threshold)
            for idx in eg.order[:n]:
                bumped = eg.values.copy()
                bumped[idx] += fd_step
                grad[idx] = (f_tilde_e(bumped, sigma, m, threshold) - base) / fd_step
    # inactive coordinates: one-sided finite difference
    base = f_tilde_e(eg, sigma, m, threshold)
    for idx in eg.order[n:]:
        bumped = eg.values.copy()
        bumped[idx] += fd_step
        grad[idx] = (f_tilde_e(bumped, sigma, m, threshold) - base) / fd_step
    return GradResult(values=grad, fd_fallback=fallback)


def rate_eve_diff(alloc, sigma_row, m_eve, threshold=None):
    """Approximate Eve rate f_tilde_e(gs + ga) - f_tilde_e(ga)."""
    return f_tilde_e(alloc.total, sigma_row, m_eve, threshold) - f_tilde_e(
        alloc.gamma_a, sigma_row, m_eve, threshold
    )


def secrecy_objective(alloc, chan, eve, m_eve, gamma_b, gamma_e):
    """Secrecy rate of an allocation with the closed-form Eve approximation.

    Returns a RatePair; ``rate_bob`` is the Bob-side rate difference,
    ``rate_eve_per_loc`` the per-location approximate Eve rates, and
    ``secrecy`` their worst-case difference.
    """
    thr = zero_threshold(gamma_e)
    bob = f_b(alloc.total, chan.lam, gamma_b, gamma_e) - f_b(
        alloc.gamma_a, chan.lam, gamma_b, gamma_e
    )
    eve_rates = np.array(
        [rate_eve_diff(alloc, row, m_eve, thr) for row in eve.sigma]
    )
    return RatePair(
        rate_bob=bob,
        rate_eve_per_loc=eve_rates,
        secrecy=bob - float(np.max(eve_rates)),
    )


def _scaled_draw_dets(w, u, sigma_sqrt, g_sqrt_act, act):
    """Batched det(I_M + Y Y^H) with Y = W S^(1/2) U_act G_act^(1/2)."""
    b = sigma_sqrt[:, None] * u[:, :, act] * g_sqrt_act[None, None, :]
    y = w @ b
    gram = y @ y.conj().swapaxes(-1, -2)
    eye = np.eye(gram.shape[-1])
    return np.linalg.det(eye + gram).real


def f_tilde_e_mc(gamma, sigma_row, m_eve, trials, rng, chunk=100_000):
    """Monte Carlo oracle for the Haar-averaged expected determinant.

    Returns (mean, std_error) of det(I + W S^(1/2) U G U^H S^(1/2) W^H)
    over i.i.d. (W, U) pairs.  Take log(mean) to compare with f_tilde_e.
    """
    g = np.asarray(gamma, dtype=float)
    sigma = np.asarray(sigma_row, dtype=float)
    k = sigma.size
    act = np.flatnonzero(g > 0)
    if act.size == 0:
        return 1.0, 0.0
    sigma_sqrt = np.sqrt(sigma)
    g_sqrt = np.sqrt(g[act])
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        b = min(chunk, trials - done)
        w = complex_gaussian(rng, (b, m_eve, k))
        u = sample_haar_unitary_batch(k, b, rng)
        dets = _scaled_draw_dets(w, u, sigma_sqrt, g_sqrt, act)
        total += float(np.sum(dets))
        total_sq += float(np.sum(dets**2))
        done += b
    mean = total / trials
    var = max(total_sq / trials - mean**2, 0.0)
    return mean, math.sqrt(var / trials)


def f_e_exact_mc(gamma, sigma_row, v1, m_eve, trials, rng, chunk=100_000):
    """Monte Carlo estimate of the exact fixed-precoder average rate.

    Returns the sample mean and standard error of
    log det(I + W S^(1/2) V1 G V1^H S^(1/2) W^H) over i.i.d. W draws.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = np.asarray(gamma, dtype=float)
    sigma = np.asarray(sigma_row, dtype=float)
    k = sigma.size
    act = np.flatnonzero(g > 0)
    if act.size == 0:
        return 0.0, 0.0
    b = np.sqrt(sigma)[:, None] * v1[:, act] * np.sqrt(g[act])[None, :]
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        w = complex_gaussian(rng, (c, m_eve, k))
        y = w @ b
        gram = y @ y.conj().swapaxes(-1, -2)
        vals = np.log(np.linalg.det(np.eye(m_eve) + gram).real)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals**2))
        done += c
    mean = total / trials
    var = max(total_sq / trials - mean**2, 0.0)
    return mean, math.sqrt(var / trials)

"""Secrecy rate maximization by successive convex approximation.

Each outer iteration linearizes the Eve-side approximate rates (and the
subtracted Bob-side noise term) at the current allocation, producing a
concave sub-problem: a separable log term minus affine terms minus a max
of affine expressions, over the non-negative sum-power budget ball.  The
sub-problem is solved through an epigraph reformulation with cvxpy.
"""

import math
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .avg_rate import (
    PowerAllocation,
    f_b,
    f_tilde_e,
    grad_f_b,
    grad_f_tilde_e,
    secrecy_objective,
    zero_threshold,
)

__all__ = [
    "SurrogateModel",
    "OptimizationTrace",
    "SubproblemError",
    "WaterFilling",
    "water_filling",
    "build_surrogate",
    "solve_subproblem",
    "optimize",
    "exhaustive_search",
]

EXHAUSTIVE_POINT_CAP = 10**8


@dataclass(frozen=True)
class WaterFilling:
    """Water-filling solution; ``degenerate`` marks an all-zero channel."""

    gamma: np.ndarray
    degenerate: bool = False


def water_filling(lam, gamma_b, gamma_e, budget):
    """Maximize sum_k log(1 + (gamma_b/gamma_e) lam_k g_k) s.t. g >= 0,
    sum g = budget.

    Uses the standard sorted KKT water level; spends the budget exactly.
    """
    if budget <= 0:
        raise ValueError(f"budget must be > 0, got {budget}")
    lam = np.asarray(lam, dtype=float)
    c = (gamma_b / gamma_e) * lam
    k = lam.size
    if np.all(c <= 0):
        return WaterFilling(gamma=np.full(k, budget / k), degenerate=True)
    # Water level mu: gamma_k = max(0, 1/mu - 1/c_k).  On active channels
    # (sorted by descending c) the budget gives mu in closed form.
    inv_c = np.where(c > 0, 1.0 / np.where(c > 0, c, 1.0), np.inf)
    order = np.argsort(inv_c)
    inv_sorted = inv_c[order]
    active = 1
    for j in range(1, k):
        if not np.isfinite(inv_sorted[j]):
            break
        level = (budget + np.sum(inv_sorted[: j + 1])) / (j + 1)
        if level > inv_sorted[j]:
            active = j + 1
        else:
            break
    level = (budget + np.sum(inv_sorted[:active])) / active
    gamma = np.maximum(0.0, level - inv_c)
    # Numerical cleanup so the budget holds with equality.
    gamma *= budget / np.sum(gamma)
    return WaterFilling(gamma=gamma, degenerate=False)


@dataclass(frozen=True)
class SurrogateModel:
    """First-order model of the secrecy objective at an expansion point.

    Caches the Bob gradient at gamma_a0 and, per eavesdropper location, the
    approximate rate values and gradients at gamma_s0 + gamma_a0 and at
    gamma_a0.
    """

    point: PowerAllocation
    lam: np.ndarray
    gamma_b: float
    gamma_e: float
    f_b_a0: float
    grad_b_a0: np.ndarray
    eve_const: np.ndarray  # (L,) f_te(sum0) - f_te(a0)
    grad_eve_sum0: np.ndarray  # (L, K)
    grad_eve_a0: np.ndarray  # (L, K)

    def value(self, gamma_s, gamma_a):
        """Evaluate the concave surrogate at (gamma_s, gamma_a)."""
        gs = np.asarray(gamma_s, dtype=float)
        ga = np.asarray(gamma_a, dtype=float)
        total0 = self.point.total
        a0 = self.point.gamma_a
        bob = f_b(gs + ga, self.lam, self.gamma_b, self.gamma_e)
        bob -= self.f_b_a0 + float(self.grad_b_a0 @ (ga - a0))
        eve = (
            self.eve_const
            + self.grad_eve_sum0 @ (gs + ga - total0)
            - self.grad_eve_a0 @ (ga - a0)
        )
        return bob - float(np.max(eve))


def build_surrogate(point, chan, eve, m_eve, gamma_b, gamma_e):
    """Cache values and gradients of the secrecy terms at ``point``."""
    thr = zero_threshold(gamma_e)
    step = 1e-6 * gamma_e
    total0 = point.total
    a0 = point.gamma_a
    consts = []
    grads_sum = []
    grads_a = []
    for row in eve.sigma:
        v_sum = f_tilde_e(total0, row, m_eve, thr)
        v_a = f_tilde_e(a0, row, m_eve, thr)
        consts.append(v_sum - v_a)
        grads_sum.append(grad_f_tilde_e(total0, row, m_eve, thr, step).values)
        grads_a.append(grad_f_tilde_e(a0, row, m_eve, thr, step).values)
    return SurrogateModel(
        point=point,
        lam=np.asarray(chan.lam, dtype=float),
        gamma_b=gamma_b,
        gamma_e=gamma_e,
        f_b_a0=f_b(a0, chan.lam, gamma_b, gamma_e),
        grad_b_a0=grad_f_b(a0, chan.lam, gamma_b, gamma_e),
        eve_const=np.array(consts),
        grad_eve_sum0=np.array(grads_sum),
        grad_eve_a0=np.array(grads_a),
    )


class SubproblemError(RuntimeError):
    """Sub-problem solver failure; carries the best iterate if any."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def solve_subproblem(model, budget, radius=None):
    """Maximize the concave surrogate over the power budget set.

    Epigraph reformulation: auxiliary scalar bounds each location's affine
    Eve expression; the remaining objective is a separable concave log term
    minus affine terms, solved by an interior-point conic solver.  When
    ``radius`` is given the step is additionally confined to an l1 ball
    around the model's expansion point (trust region for the outer loop).
    """
    if budget <= 0:
        raise ValueError(f"budget must be > 0, got {budget}")
    k = model.lam.size
    gs = cp.Variable(k, nonneg=True)
    ga = cp.Variable(k, nonneg=True)
    t = cp.Variable()
    total0 = model.point.total
    a0 = model.point.gamma_a
    c = (model.gamma_b / model.gamma_e) * model.lam
    bob = cp.sum(cp.log1p(cp.multiply(c, gs + ga)))
    bob_aff = model.f_b_a0 + model.grad_b_a0 @ (ga - a0)
    eve_exprs = [
        model.eve_const[i]
        + model.grad_eve_sum0[i] @ (gs + ga - total0)
        - model.grad_eve_a0[i] @ (ga - a0)
        for i in range(model.eve_const.size)
    ]
    constraints = [cp.sum(gs) + cp.sum(ga) <= budget]
    constraints += [t >= e for e in eve_exprs]
    if radius is not None:
        center = np.concatenate([model.point.gamma_s, a0])
        constraints.append(cp.norm1(cp.hstack([gs, ga]) - center) <= radius)
    prob = cp.Problem(cp.Maximize(bob - bob_aff - t), constraints)
    solved = False
    for solver in (cp.CLARABEL, cp.ECOS, cp.SCS):
        try:
            prob.solve(solver=solver)
        except cp.SolverError:
            continue
        if prob.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            solved = True
            if prob.status == cp.OPTIMAL:
                break
    if not solved:
        best = None
        if gs.value is not None and ga.value is not None:
            best = PowerAllocation(
                gamma_s=np.maximum(gs.value, 0.0), gamma_a=np.maximum(ga.value, 0.0)
            )
        raise SubproblemError(f"sub-problem solver failed (status {prob.status})", best)
    gs_v = np.maximum(np.asarray(gs.value, dtype=float), 0.0)
    ga_v = np.maximum(np.asarray(ga.value, dtype=float), 0.0)
    used = gs_v.sum() + ga_v.sum()
    if used > budget:
        scale = budget / used
        gs_v *= scale
        ga_v *= scale
    return PowerAllocation(gamma_s=gs_v, gamma_a=ga_v)


@dataclass
class OptimizationTrace:
    """Per-iteration record of the successive convex approximation loop.

    ``iterates[0]`` is the water-filling start point; ``iterations`` counts
    outer sub-problem passes including the final convergence check.
    """

    iterates: list = field(default_factory=list)  # (alloc, surrogate, true_rate)
    iterations: int = 0
    converged: bool = False
    epsilon: float = 0.1

    @property
    def final_allocation(self):
        return self.iterates[-1][0]

    @property
    def surrogate_rates(self):
        return np.array([s for _, s, _ in self.iterates])

    @property
    def true_rates(self):
        return np.array([r for _, _, r in self.iterates])

    @property
    def final_rate(self):
        """Converged secrecy rate, clipped at zero."""
        if not self.iterates:
            return 0.0
        return max(0.0, self.true_rates[-1])


def _step_norm(a, b):
    return float(
        np.abs(np.concatenate([a.gamma_s - b.gamma_s, a.gamma_a - b.gamma_a])).sum()
    )


def optimize(chan, eve, m_eve, gamma_b, gamma_e, epsilon=0.1, max_iters=50):
    """Iterative power optimization: water-filling start, all-zero noise,
    then repeated surrogate build / concave solve.

    The surrogate is not a true minorant of the objective (the subtracted
    noise-credit term is linearized), so an unrestricted first step
    overshoots badly and the recorded surrogate trace would dip afterwards.
    Steps are therefore confined to an adaptive l1 trust region and accepted
    only when the realized closed-form improvement is at least half the
    model's prediction and the model overshoot at the accepted point stays
    below epsilon/2.  Convergence is declared when the unrestricted
    sub-problem predicts less than ``epsilon`` improvement over the current
    point, the usual surrogate-improvement stopping rule evaluated at the
    would-be fixed point.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    k = np.asarray(chan.lam).size
    wf = water_filling(chan.lam, gamma_b, gamma_e, gamma_e)
    current = PowerAllocation(gamma_s=wf.gamma, gamma_a=np.zeros(k))
    current_rate = secrecy_objective(
        current, chan, eve, m_eve, gamma_b, gamma_e
    ).secrecy
    trace = OptimizationTrace(epsilon=epsilon)
    # Iteration 0: the water-filling start; surrogate equals the true rate
    # there (first-order tangency at the expansion point).
    trace.iterates.append((current, current_rate, current_rate))
    radius = gamma_e / 8.0
    for _ in range(max_iters):
        trace.iterations += 1
        model = build_surrogate(current, chan, eve, m_eve, gamma_b, gamma_e)
        try:
            cand = solve_subproblem(model, gamma_e)
        except SubproblemError:
            if len(trace.iterates) > 1:
                break
            raise
        value = model.value(cand.gamma_s, cand.gamma_a)
        if value - current_rate <= epsilon:
            trace.converged = True
            break
        if _step_norm(cand, current) > radius:
            cand = solve_subproblem(model, gamma_e, radius=radius)
            value = model.value(cand.gamma_s, cand.gamma_a)
        accepted = False
        for _inner in range(25):
            predicted = value - current_rate
            cand_rate = secrecy_objective(
                cand, chan, eve, m_eve, gamma_b, gamma_e
            ).secrecy
            ratio = 1.0 if predicted <= 0 else (cand_rate - current_rate) / predicted
            overshoot = value - cand_rate
            if ratio >= 0.5 and overshoot <= epsilon / 2:
                if ratio > 0.8 and overshoot <= epsilon / 4:
                    radius = min(radius * 2.0, 2.0 * gamma_e)
                accepted = True
                break
            radius /= 2.0
            cand = solve_subproblem(model, gamma_e, radius=radius)
            value = model.value(cand.gamma_s, cand.gamma_a)
        if not accepted:
            # Model and objective disagree down to a vanishing radius;
            # treat the point as converged rather than looping.
            trace.converged = True
            break
        trace.iterates.append((cand, value, cand_rate))
        current, current_rate = cand, cand_rate
    return trace


def _grid_vectors(k, levels, budget):
    """All non-negative K-vectors on the grid {0, h, 2h, ...} with sum <=
    budget, h = budget / (levels - 1)."""
    h = budget / (levels - 1)
    out = []

    def rec(prefix, remaining_levels):
        if len(prefix) == k - 1:
            for v in range(remaining_levels + 1):
                out.append(prefix + (v,))
            return
        for v in range(remaining_levels + 1):
            rec(prefix + (v,), remaining_levels - v)

    rec((), levels - 1)
    idx = np.array(out, dtype=int)
    return idx, idx * h


def exhaustive_search(chan, eve, m_eve, gamma_b, gamma_e, grid=21):
    """Best grid point of the closed-form secrecy rate over the simplex
    discretization of (gamma_s, gamma_a).

    Evaluations are cached per distinct power vector: the rate depends on
    (gamma_s + gamma_a, gamma_a) only, so each grid vector's f_B and
    per-location f_tilde_e are computed once.
    """
    k = np.asarray(chan.lam).size
    if grid ** (2 * k) > EXHAUSTIVE_POINT_CAP:
        raise ValueError(
            f"grid**(2K) = {grid ** (2 * k)} exceeds the enumeration cap "
            f"{EXHAUSTIVE_POINT_CAP}"
        )
    thr = zero_threshold(gamma_e)
    idx, vecs = _grid_vectors(k, grid, gamma_e)
    n_vec = idx.shape[0]
    f_b_vals = np.array([f_b(v, chan.lam, gamma_b, gamma_e) for v in vecs])
    f_te_vals = np.empty((n_vec, eve.sigma.shape[0]))
    for a, v in enumerate(vecs):
        for i, row in enumerate(eve.sigma):
            f_te_vals[a, i] = f_tilde_e(v, row, m_eve, thr)
    best_rate = -math.inf
    best = None
    for a_tot, tot in enumerate(idx):
        sub_mask = np.flatnonzero(np.all(idx <= tot, axis=1))
        eve_rate = np.max(f_te_vals[a_tot][None, :] - f_te_vals[sub_mask], axis=1)
        rates = f_b_vals[a_tot] - f_b_vals[sub_mask] - eve_rate
        j = int(np.argmax(rates))
        if rates[j] > best_rate:
            best_rate = float(rates[j])
            best = (a_tot, sub_mask[j])
    a_tot, a_sub = best
    ga = vecs[a_sub]
    gs = vecs[a_tot] - ga
    alloc = PowerAllocation(gamma_s=np.maximum(gs, 0.0), gamma_a=ga)
    return alloc, best_rate

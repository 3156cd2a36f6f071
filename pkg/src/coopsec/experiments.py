"""Experiment campaigns: sweeps, replications, and CSV output.

Five experiment kinds cover the standard evaluation axes: approximation
error of the Haar-averaged Eve rate, optimizer convergence traces,
iteration-count statistics, and optimized secrecy rate versus node count or
cluster radius.  Output is a long-format CSV with a comment header holding
the resolved configuration, so every table is self-describing.

Replication r of sweep value s uses the RNG seeded by
SeedSequence(master_seed, spawn_key=(s_index, r)); any single replication
can therefore be reproduced in isolation.  Layouts and channels are
resampled independently per replication.
"""

import csv
import dataclasses
import io
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .avg_rate import f_e_exact_mc, f_tilde_e, secrecy_objective, PowerAllocation
from .channel import sample_haar_unitary, sample_main_channel
from .optimizer import optimize
from .scenario import gains_from_layout, sample_layout

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentSpec",
    "ResultRow",
    "run_experiment",
    "report_summary",
    "write_csv",
]

EXPERIMENT_KINDS = (
    "approx-error",
    "convergence",
    "iteration-count",
    "rate-vs-k",
    "rate-vs-radius",
)

#: Sweep parameter and default value list per kind; convergence has no sweep
#: (its "sweep value" column carries the iteration index instead).
DEFAULT_SWEEPS = {
    "approx-error": ("m_eve", (2, 4, 6)),
    "convergence": (None, (0,)),
    "iteration-count": ("k_tx", (2, 4)),
    "rate-vs-k": ("k_tx", (1, 2, 3, 4, 5)),
    "rate-vs-radius": ("r_t", (1.0, 3.0, 5.0, 7.0, 9.0)),
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One campaign: a kind, a base scenario, a sweep, and replication count."""

    kind: str
    scenario: object
    sweep_param: str = None
    sweep_values: tuple = None
    replications: int = 1
    seed: int = 0
    mc_trials: int = 10_000
    epsilon: float = 0.1
    channel: object = None  # injected MainChannel (convergence kind)

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        param, values = DEFAULT_SWEEPS[self.kind]
        if self.sweep_param is None:
            object.__setattr__(self, "sweep_param", param)
        if self.sweep_values is None:
            object.__setattr__(self, "sweep_values", values)
        else:
            object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        if self.sweep_param is not None and not hasattr(
            self.scenario, self.sweep_param
        ):
            raise ValueError(f"sweep parameter {self.sweep_param!r} not on Scenario")


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    replication: int
    metric: str
    value: float
    std_error: float = None

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"non-finite metric {self.metric}: {self.value}")


def _with_sweep(scenario, param, value):
    """Scenario copy with the sweep parameter replaced.

    Changing the transmit cluster size keeps K = N (the receive cluster
    scales with it), matching the node-count experiments.
    """
    if param is None:
        return scenario
    updates = {param: value}
    if param == "k_tx":
        updates["n_rx"] = int(value)
        updates[param] = int(value)
    if param in ("n_rx", "m_eve", "l_locs"):
        updates[param] = int(value)
    return dataclasses.replace(scenario, **updates)


def _rep_rng(spec, sweep_index, replication):
    ss = np.random.SeedSequence(spec.seed, spawn_key=(sweep_index, replication))
    return np.random.default_rng(ss)


def _uniform_alloc(k, budget):
    return PowerAllocation(
        gamma_s=np.full(k, budget / k), gamma_a=np.zeros(k)
    )


def _rows_approx_error(spec, sc, sweep_value, rep, rng):
    """Haar-average approximation error at one sampled precoder.

    Full signal power split uniformly, no artificial noise; the exact Eve
    rate is the fixed-precoder Monte Carlo average at the first candidate
    location, the approximate rate the closed form at the same point.
    """
    layout = sample_layout(sc, rng)
    beta, eve = gains_from_layout(layout, sc)
    v1 = sample_haar_unitary(sc.k_tx, rng)
    sigma = eve.sigma[0]
    gam = _uniform_alloc(sc.k_tx, sc.gamma_e).gamma_s
    approx = f_tilde_e(gam, sigma, sc.m_eve)
    exact, se = f_e_exact_mc(gam, sigma, v1, sc.m_eve, spec.mc_trials, rng)
    return [
        ResultRow(sweep_value, rep, "approx_error", approx - exact, se),
    ]


def _rows_convergence(spec, sc, sweep_value, rep, rng):
    layout = sample_layout(sc, rng)
    beta, eve = gains_from_layout(layout, sc)
    chan = spec.channel or sample_main_channel(beta, rng)
    trace = optimize(
        chan, eve, sc.m_eve, sc.gamma_b, sc.gamma_e, epsilon=spec.epsilon
    )
    rows = []
    for i, (_, sur, true) in enumerate(trace.iterates):
        rows.append(ResultRow(float(i), rep, "surrogate_rate", sur))
        rows.append(ResultRow(float(i), rep, "secrecy_rate", true))
    return rows


def _rows_iteration_count(spec, sc, sweep_value, rep, rng):
    layout = sample_layout(sc, rng)
    beta, eve = gains_from_layout(layout, sc)
    chan = sample_main_channel(beta, rng)
    trace = optimize(
        chan, eve, sc.m_eve, sc.gamma_b, sc.gamma_e, epsilon=spec.epsilon
    )
    return [
        ResultRow(sweep_value, rep, "iterations", float(trace.iterations)),
        ResultRow(sweep_value, rep, "secrecy_rate", trace.final_rate),
    ]


def _rows_rate(spec, sc, sweep_value, rep, rng):
    layout = sample_layout(sc, rng)
    beta, eve = gains_from_layout(layout, sc)
    chan = sample_main_channel(beta, rng)
    trace = optimize(
        chan, eve, sc.m_eve, sc.gamma_b, sc.gamma_e, epsilon=spec.epsilon
    )
    return [ResultRow(sweep_value, rep, "secrecy_rate", trace.final_rate)]


_KIND_RUNNERS = {
    "approx-error": _rows_approx_error,
    "convergence": _rows_convergence,
    "iteration-count": _rows_iteration_count,
    "rate-vs-k": _rows_rate,
    "rate-vs-radius": _rows_rate,
}


def run_experiment(spec, output_path=None):
    """Execute all (sweep value, replication) cells; optionally write CSV."""
    runner = _KIND_RUNNERS[spec.kind]
    rows = []
    for si, sv in enumerate(spec.sweep_values):
        sc = _with_sweep(spec.scenario, spec.sweep_param, sv)
        for rep in range(spec.replications):
            rng = _rep_rng(spec, si, rep)
            sv_num = float(sv)
            rows.extend(runner(spec, sc, sv_num, rep, rng))
    if output_path is not None:
        write_csv(rows, spec, output_path)
    return rows


def _header_comment(spec):
    sc = spec.scenario
    fields = ", ".join(
        f"{f.name}={getattr(sc, f.name)!r}" for f in dataclasses.fields(sc)
    )
    return [
        f"# coopsec {__version__} experiment: {spec.kind}",
        f"# scenario: {fields}",
        f"# sweep: {spec.sweep_param}={list(spec.sweep_values)} "
        f"replications={spec.replications} seed={spec.seed} "
        f"mc_trials={spec.mc_trials} epsilon={spec.epsilon}",
    ]


def write_csv(rows, spec, path):
    """Atomic long-format CSV write (comment header, LF endings)."""
    buf = io.StringIO()
    for line in _header_comment(spec):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sweep_param", "sweep_value", "replication", "metric",
                     "value", "std_error"])
    param = spec.sweep_param if spec.sweep_param is not None else "iteration"
    for r in rows:
        se = "" if r.std_error is None else repr(r.std_error)
        writer.writerow([param, repr(r.sweep_value), r.replication, r.metric,
                         repr(r.value), se])
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_summary(rows):
    """Per (metric, sweep value) aggregates: count, mean, p5/p50/p95."""
    if not rows:
        raise ValueError("empty result table")
    groups = {}
    for r in rows:
        groups.setdefault((r.metric, r.sweep_value), []).append(r.value)
    lines = ["metric sweep_value n mean p5 p50 p95"]
    for (metric, sv) in sorted(groups):
        vals = np.array(groups[(metric, sv)])
        p5, p50, p95 = np.percentile(vals, [5, 50, 95])
        lines.append(
            f"{metric} {sv:g} {vals.size} {vals.mean():.6f} "
            f"{p5:.6f} {p50:.6f} {p95:.6f}"
        )
    return "\n".join(lines)

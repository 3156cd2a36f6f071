"""Experiment runner and command line interface."""

import json

import numpy as np
import pytest

from coopsec.cli import main
from coopsec.experiments import (
    ExperimentSpec,
    ResultRow,
    report_summary,
    run_experiment,
)
from coopsec.scenario import Scenario


def tiny_scenario(**overrides):
    kwargs = dict(
        k_tx=1, n_rx=1, m_eve=1, l_locs=1, r_t=1.0, r_r=1.0,
        d_b=30.0, d_e=30.0, alpha=3.0, gamma_b=2.0, gamma_e=2.0, seed=3,
    )
    kwargs.update(overrides)
    return Scenario(**kwargs)


def write_config(path, **overrides):
    sc = tiny_scenario(**overrides)
    lines = [
        f"k_tx: {sc.k_tx}", f"n_rx: {sc.n_rx}", f"m_eve: {sc.m_eve}",
        f"l_locs: {sc.l_locs}", f"r_t: {sc.r_t}", f"r_r: {sc.r_r}",
        f"d_b: {sc.d_b}", f"d_e: {sc.d_e}", f"alpha: {sc.alpha}",
        f"gamma_b: {sc.gamma_b}", f"gamma_e: {sc.gamma_e}",
        f"seed: {sc.seed}",
    ]
    path.write_text("\n".join(lines) + "\n")


def test_smoke_spec_emits_rows():
    spec = ExperimentSpec(
        kind="rate-vs-k", scenario=tiny_scenario(), sweep_values=(1,),
        replications=1, mc_trials=100,
    )
    rows = run_experiment(spec)
    assert len(rows) >= 1
    assert all(np.isfinite(r.value) for r in rows)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(kind="nope", scenario=tiny_scenario())
    with pytest.raises(ValueError):
        ExperimentSpec(kind="rate-vs-k", scenario=tiny_scenario(),
                       replications=0)
    with pytest.raises(ValueError):
        ExperimentSpec(kind="rate-vs-k", scenario=tiny_scenario(),
                       sweep_param="not_a_field")


def test_report_summary_single_row():
    rows = [ResultRow(1.0, 0, "secrecy_rate", 0.5)]
    text = report_summary(rows)
    assert "secrecy_rate" in text
    line = text.splitlines()[1].split()
    assert float(line[3]) == 0.5  # mean equals the single value
    with pytest.raises(ValueError):
        report_summary([])


def test_csv_reproducible_and_schema(tmp_path):
    spec = ExperimentSpec(
        kind="iteration-count", scenario=tiny_scenario(k_tx=2, n_rx=2),
        sweep_values=(2,), replications=2, seed=9,
    )
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(spec, output_path=p1)
    run_experiment(spec, output_path=p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    assert len(comments) == 3 and "iteration-count" in comments[0]
    header = next(ln for ln in lines if not ln.startswith("#"))
    assert header == "sweep_param,sweep_value,replication,metric,value,std_error"


def test_convergence_kind_per_iteration_rows(tmp_path):
    spec = ExperimentSpec(
        kind="convergence", scenario=tiny_scenario(k_tx=2, n_rx=2, l_locs=3),
        replications=1, seed=1,
    )
    rows = run_experiment(spec)
    metrics = {r.metric for r in rows}
    assert metrics == {"surrogate_rate", "secrecy_rate"}
    sur = [r for r in rows if r.metric == "surrogate_rate"]
    iters = [r.sweep_value for r in sur]
    assert iters == sorted(iters)


def test_replication_isolation():
    """Replication r alone reproduces its cell from a full run."""
    spec = ExperimentSpec(
        kind="rate-vs-k", scenario=tiny_scenario(), sweep_values=(1, 2),
        replications=3, seed=5,
    )
    rows = run_experiment(spec)
    target = [r for r in rows if r.sweep_value == 2.0 and r.replication == 2]
    solo = ExperimentSpec(
        kind="rate-vs-k", scenario=tiny_scenario(), sweep_values=(1, 2),
        replications=3, seed=5,
    )
    rows2 = [
        r for r in run_experiment(solo)
        if r.sweep_value == 2.0 and r.replication == 2
    ]
    assert [r.value for r in rows2] == [r.value for r in target]


def test_cli_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "sc.yaml"
    write_config(cfg)
    out = tmp_path / "rows.csv"
    rc = main([
        "rate-vs-k", "--config", str(cfg), "--out", str(out),
        "--sweep-values", "1,2", "--replications", "1", "--seed", "2",
    ])
    assert rc == 0
    captured = capsys.readouterr().out
    assert "secrecy_rate" in captured
    assert out.exists()


def test_cli_convergence_with_injected_channel(tmp_path, capsys):
    cfg = tmp_path / "sc.yaml"
    write_config(cfg, k_tx=2, n_rx=2, l_locs=4)
    hfile = tmp_path / "h.json"
    h = [[[1.97, -0.92], [0.98, 0.47]], [[-0.63, -0.035], [0.019, -1.24]]]
    hfile.write_text(json.dumps({"h": h}))
    rc = main(["convergence", "--config", str(cfg), "--channel", str(hfile)])
    assert rc == 0
    assert "surrogate_rate" in capsys.readouterr().out


def test_cli_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("k_tx: 2\nbogus: 1\n")
    rc = main(["rate-vs-k", "--config", str(cfg)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err

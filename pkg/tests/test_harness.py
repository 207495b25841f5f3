import json
import math
import os

import numpy as np
import pytest

from shocklab import ConfigError, ExperimentConfig, MediumSpec, SweepSpec
from shocklab import harness
from shocklab.harness import (build_geometry, config_dict, emit_outputs,
                              expand_sweep, experiment_id, load_experiment,
                              load_sweep, predict, read_speeds_csv,
                              run_experiment, run_sweep, summarize)

from conftest import layered


def full_sweep(**base):
    return SweepSpec(
        rho_B=(2.0, 3.5, 5.0), K_B=(2.0, 3.5, 5.0),
        sigma_l=(2.0, 4.0, 8.0), sigma_r=(0.0, 0.5, 1.0),
        theta=(0.0, 22.5, 45.0, 67.5, 90.0),
        profile=("layered", "sinusoidal"),
        law=("exponential", "cubic"), base=base)


def homogeneous_config(**kw):
    kw.setdefault("resolution", 64)
    return ExperimentConfig(
        medium=MediumSpec("layered", 90.0, 1.0, 1.0, 1.0, 1.0),
        law=harness._law_from_name("exponential"),
        sigma_l=1.0, sigma_r=0.0, **kw)


# -- sweep expansion ---------------------------------------------------------------

def test_expand_sweep_protocol_counts():
    full = full_sweep()
    assert full.size == 1620
    configs = expand_sweep(full)
    assert len(configs) == 1620
    slice81 = SweepSpec(
        rho_B=(2.0, 3.5, 5.0), K_B=(2.0, 3.5, 5.0),
        sigma_l=(2.0, 4.0, 8.0), sigma_r=(0.0, 0.5, 1.0),
        theta=(45.0,), profile=("layered",), law=("exponential",))
    assert len(expand_sweep(slice81)) == 81


def test_expand_sweep_single():
    single = SweepSpec(rho_B=(2.0,), K_B=(3.0,), sigma_l=(1.0,),
                       sigma_r=(0.0,), theta=(0.0,), profile=("layered",),
                       law=("cubic",))
    configs = expand_sweep(single)
    assert len(configs) == 1
    assert configs[0].medium.K_B == 3.0
    assert configs[0].law.kind == "cubic"


def test_expand_sweep_deterministic_lexicographic():
    sweep = full_sweep()
    a = expand_sweep(sweep)
    b = expand_sweep(sweep)
    assert [experiment_id(c) for c in a] == [experiment_id(c) for c in b]
    # first config carries the head of every list; the law varies fastest
    assert a[0].medium.rho_B == 2.0 and a[0].medium.K_B == 2.0
    assert a[0].sigma_l == 2.0 and a[0].medium.theta == 0.0
    assert a[0].law.kind == "exponential" and a[1].law.kind == "cubic"
    assert a[0].medium.profile == "layered"
    assert a[2].medium.profile == "sinusoidal"


def test_expand_sweep_tied_contrast():
    sweep = SweepSpec(rho_B=(2.0, 5.0), K_B=(), sigma_l=(1.0,),
                      sigma_r=(0.0,), theta=(0.0,), profile=("layered",),
                      law=("exponential",), tie_K_B=True)
    configs = expand_sweep(sweep)
    assert [(c.medium.K_B, c.medium.rho_B) for c in configs] == \
        [(2.0, 2.0), (5.0, 5.0)]


def test_sweep_rejects_empty_lists():
    with pytest.raises(ConfigError):
        SweepSpec(rho_B=(), K_B=(1.0,), sigma_l=(1.0,), sigma_r=(0.0,),
                  theta=(0.0,), profile=("layered",), law=("exponential",))


# -- geometry ----------------------------------------------------------------------

def test_geometry_transverse_strip():
    cfg = ExperimentConfig(medium=layered(theta=90.0),
                           law=harness._law_from_name("exponential"),
                           sigma_l=1.0, sigma_r=0.0)
    geom = build_geometry(cfg, s_pred=1.5)
    assert geom.grid.ny == 4
    assert geom.grid.dy == geom.grid.dx


def test_geometry_oblique_one_projected_period():
    cfg = ExperimentConfig(medium=layered(theta=45.0),
                           law=harness._law_from_name("exponential"),
                           sigma_l=1.0, sigma_r=0.0)
    geom = build_geometry(cfg, s_pred=1.5)
    L_y = 1.0 / math.cos(math.radians(45.0))
    assert geom.grid.ny * geom.grid.dy == pytest.approx(L_y, rel=1e-14)


def test_geometry_parallel_is_one_period():
    cfg = ExperimentConfig(medium=layered(theta=0.0),
                           law=harness._law_from_name("exponential"),
                           sigma_l=1.0, sigma_r=0.0, resolution=32)
    geom = build_geometry(cfg, s_pred=1.5)
    assert geom.grid.ny == 32
    assert geom.grid.ny * geom.grid.dy == pytest.approx(1.0)


def test_geometry_front_margin_enforced():
    cfg = ExperimentConfig(medium=layered(theta=90.0),
                           law=harness._law_from_name("exponential"),
                           sigma_l=1.0, sigma_r=0.0,
                           domain_length=10.0, t_final=50.0)
    with pytest.raises(ConfigError):
        build_geometry(cfg, s_pred=1.5)


def test_geometry_auto_t_final_respects_margin():
    cfg = ExperimentConfig(medium=layered(theta=90.0),
                           law=harness._law_from_name("exponential"),
                           sigma_l=1.0, sigma_r=0.0, domain_length=10.0)
    geom = build_geometry(cfg, s_pred=2.0)
    assert geom.x_front + 2.0 * geom.t_final <= 0.9 * geom.grid.lx + 1e-12


def test_resolution_floor():
    with pytest.raises(ConfigError):
        ExperimentConfig(medium=layered(theta=0.0),
                         law=harness._law_from_name("exponential"),
                         sigma_l=1.0, sigma_r=0.0, resolution=4)


# -- experiment runs ----------------------------------------------------------------

def test_run_experiment_homogeneous_under_one_percent():
    record = run_experiment(homogeneous_config())
    assert record.front_found
    assert record.dispersion_proxy == 0.0
    assert record.rel_error < 0.01
    assert record.s_predicted == pytest.approx(
        math.sqrt(1.0 / math.log(2.0)), rel=1e-12)
    assert record.entropy_loss > 0.0


def test_record_prediction_reproducible_from_rh_alone():
    cfg = homogeneous_config()
    record = run_experiment(cfg)
    assert record.s_predicted == predict(cfg)["s_eff"]
    assert record.c_h == pytest.approx(1.0, rel=1e-12)


def test_run_sweep_parallel_matches_serial():
    configs = [homogeneous_config(resolution=16),
               homogeneous_config(resolution=32)]
    serial = run_sweep(configs, jobs=1)
    parallel = run_sweep(configs, jobs=2)
    for a, b in zip(serial, parallel):
        assert a.config_id == b.config_id
        assert a.s_measured == b.s_measured
        assert a.entropy_loss == b.entropy_loss


# -- outputs -----------------------------------------------------------------------

def test_emit_outputs_and_stability(tmp_path):
    records = [run_experiment(homogeneous_config(resolution=16))]
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    paths1 = emit_outputs(records, out1)
    emit_outputs(records, out2)
    speeds1 = (out1 / "speeds.csv").read_bytes()
    speeds2 = (out2 / "speeds.csv").read_bytes()
    assert speeds1 == speeds2

    rows = read_speeds_csv(out1 / "speeds.csv")
    assert len(rows) == 1
    assert rows[0]["theta_deg"] == 90.0
    assert rows[0]["s_predicted"] == pytest.approx(records[0].s_predicted,
                                                   rel=1e-11)
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["n_records"] == 1
    assert summary["overall"]["n"] == 1
    trace_files = [p for p in paths1 if "entropy_" in str(p)]
    assert len(trace_files) == 1
    header = open(trace_files[0]).readline().strip()
    assert header == "t,eta,eta_normalized"
    front_files = [p for p in paths1 if "front_" in str(p)]
    assert len(front_files) == 1
    assert open(front_files[0]).readline().strip() == "t,x_front"


def test_emit_outputs_rejects_empty(tmp_path):
    with pytest.raises(ConfigError):
        emit_outputs([], tmp_path)


def test_summarize_handles_unmeasured():
    rec = run_experiment(homogeneous_config(resolution=16))
    rec.rel_error = float("nan")
    summary = summarize([rec])
    assert summary["overall"]["n"] == 0
    assert summary["overall"]["median_rel_error"] is None


# -- config files -------------------------------------------------------------------

def test_load_experiment_round_trip(tmp_path):
    cfg = load_experiment("configs/example_experiment.yaml")
    assert cfg.medium.theta == 45.0
    assert cfg.law.kind == "exponential"
    assert cfg.resolution == 64
    d = config_dict(cfg)
    assert d["medium"]["K_B"] == 4.0


def test_load_sweep_files():
    sweep = load_sweep("configs/full_sweep.yaml")
    assert sweep.size == 1620
    acc = load_sweep("configs/acceptance_sweep.yaml")
    assert acc.size == 54
    assert len(expand_sweep(acc)) == 54


def test_load_experiment_errors(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("medium: {profile: layered}\n")
    with pytest.raises(ConfigError):
        load_experiment(path)
    path.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_experiment(path)
    with pytest.raises(ConfigError):
        load_experiment(tmp_path / "missing.yaml")


def test_experiment_ids_distinct():
    a = homogeneous_config()
    b = homogeneous_config(resolution=32)
    assert experiment_id(a) != experiment_id(b)
    assert experiment_id(a) == experiment_id(homogeneous_config())

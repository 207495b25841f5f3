import math

import numpy as np
import pytest

from shocklab import (EntropyTrace, FrontTrace, FrontNotFoundError,
                      ShocklabError, classify_run, entropy, measure_speed,
                      shock_position, y_average)
from shocklab.diagnostics import entropy_trace, slice_at_y
from shocklab.solver import (Grid2D, SolverConfig, grid_1d, run,
                             uniform_material, uniform_state)

from conftest import layered


def state_with(eps=0.0, u=0.0, v=0.0, K=1.0, rho=1.0, nx=8, ny=4,
               dx=None, dy=None):
    dx = dx if dx is not None else 1.0 / nx
    dy = dy if dy is not None else 1.0 / ny
    grid = Grid2D(nx=nx, ny=ny, dx=dx, dy=dy)
    Ka, ra = uniform_material(grid, K, rho)
    return uniform_state(grid, Ka, ra,
                         eps_fn=lambda X, Y: np.full_like(X, eps),
                         u_fn=lambda X, Y: np.full_like(X, u),
                         v_fn=lambda X, Y: np.full_like(X, v))


# -- y_average -------------------------------------------------------------------

def test_y_average_of_invariant_state(exp_law):
    st = state_with(eps=0.2)
    x, sig, u = y_average(st, exp_law)
    assert np.allclose(sig, st.sigma(exp_law)[:, 0], atol=0)
    assert np.allclose(u, 0.0, atol=0)


def test_y_average_two_rows(linear):
    st = state_with(nx=4, ny=2)
    st.eps_i[:, 0] = 0.0
    st.eps_i[:, 1] = 2.0
    _, sig, _ = y_average(st, linear)
    assert sig == pytest.approx(np.ones(4))


def test_y_average_checkerboard(linear):
    st = state_with(nx=6, ny=4)
    pattern = np.fromfunction(lambda i, j: (-1.0) ** (i + j), (6, 4))
    st.eps_i[:] = pattern
    _, sig, _ = y_average(st, linear)
    assert sig == pytest.approx(np.zeros(6), abs=1e-15)


def test_slice_at_y(linear):
    st = state_with(nx=4, ny=4)
    st.eps_i[:, 2] = 0.5
    _, sig, _ = slice_at_y(st, linear, y=(2 + 0.5) / 4)
    assert sig == pytest.approx(0.5 * np.ones(4))


# -- shock_position --------------------------------------------------------------

def test_shock_position_ideal_step():
    dx = 0.1
    x = (np.arange(100) + 0.5) * dx
    profile = np.where(x < 3.2, 1.0, 0.0)
    pos = shock_position(x, profile, 1.0, 0.0)
    assert pos == pytest.approx(3.2, abs=dx)


def test_shock_position_uniform_profile_not_found():
    x = np.linspace(0.05, 0.95, 10)
    with pytest.raises(FrontNotFoundError):
        shock_position(x, np.full(10, 0.7), 1.0, 0.0)


def test_shock_position_linear_ramp():
    x = np.linspace(0.0, 1.0, 101)
    profile = 1.0 - x
    assert shock_position(x, profile, 1.0, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_shock_position_takes_rightmost_crossing():
    x = np.linspace(0.05, 9.95, 100)
    profile = np.where(x < 6.0, 1.0, 0.0)
    profile[10:15] = 0.2  # oscillation behind the front dips below midpoint
    pos = shock_position(x, profile, 1.0, 0.0)
    assert pos == pytest.approx(6.0, abs=0.1)


def test_translating_step_advances_by_translation():
    dx = 0.05
    x = (np.arange(200) + 0.5) * dx
    positions = []
    for shift in (3.0, 3.5, 4.0, 4.5):
        profile = np.where(x < shift, 2.0, 0.5)
        positions.append(shock_position(x, profile, 2.0, 0.5))
    deltas = np.diff(positions)
    assert deltas == pytest.approx(0.5 * np.ones(3), abs=dx / 2)


# -- measure_speed -----------------------------------------------------------------

def test_measure_speed_exact_line():
    t = np.linspace(0.0, 5.0, 21)
    trace = FrontTrace(t, 0.5 + 1.2 * t)
    assert measure_speed(trace) == pytest.approx(1.2, rel=1e-13)
    assert trace.fit_residual < 1e-12


def test_measure_speed_constant():
    t = np.linspace(0.0, 5.0, 11)
    trace = FrontTrace(t, np.full(11, 2.5))
    assert measure_speed(trace) == pytest.approx(0.0, abs=1e-14)


def test_measure_speed_with_perturbation():
    t = np.linspace(0.0, 10.0, 41)
    x = 1.2 * t + 0.01 * (-1.0) ** np.arange(41)
    # closed-form least-squares oracle on the trailing window
    n = len(t)
    start = n - int(round(0.5 * n))
    tw, xw = t[start:], x[start:]
    slope_oracle = (np.sum((tw - tw.mean()) * (xw - xw.mean()))
                    / np.sum((tw - tw.mean()) ** 2))
    trace = FrontTrace(t, x)
    speed = measure_speed(trace)
    assert speed == pytest.approx(slope_oracle, rel=1e-12)
    assert abs(speed - 1.2) < 0.005


def test_measure_speed_needs_five_samples():
    t = np.linspace(0.0, 1.0, 6)
    x = np.full(6, np.nan)
    x[-2:] = 1.0
    with pytest.raises(ShocklabError):
        measure_speed(FrontTrace(t, x))


def test_front_trace_validation():
    with pytest.raises(ValueError):
        FrontTrace(np.array([0.0, 0.0, 1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        FrontTrace(np.array([0.0, 1.0]), np.zeros(3))


# -- entropy ------------------------------------------------------------------------

def test_entropy_zero_state(exp_law):
    assert entropy(state_with(), exp_law) == 0.0


def test_entropy_uniform_kinetic(exp_law):
    st = state_with(u=3.0, rho=2.0, eps=0.0)
    assert entropy(st, exp_law) == pytest.approx(9.0, rel=1e-13)


def test_entropy_uniform_stress(exp_law):
    from shocklab import inverse_stress
    eps = inverse_stress(exp_law, 1.0, 1.0)
    st = state_with(eps=eps)
    assert entropy(st, exp_law) == pytest.approx(1.0 - math.log(2.0),
                                                 rel=1e-12)


def test_entropy_transverse_term_optional(exp_law):
    st = state_with(u=1.0, v=2.0, rho=1.0)
    assert entropy(st, exp_law) == pytest.approx(2.5, rel=1e-13)
    assert entropy(st, exp_law, include_transverse=False) == pytest.approx(
        0.5, rel=1e-13)


def test_entropy_trace_requires_tracking(exp_law):
    st = state_with(eps=0.1, nx=16, ny=4)
    res = run(st, exp_law, SolverConfig(t_final=0.0), track_entropy=False)
    with pytest.raises(ShocklabError):
        entropy_trace(res)


def test_entropy_conserved_for_smooth_pulse(exp_law):
    # periodic smooth run: corrected entropy loss is numerical only and
    # must shrink under refinement
    losses = {}
    for nx in (64, 128):
        grid = grid_1d(nx, 1.0 / nx)
        K, rho = uniform_material(grid, 1.0, 1.0)
        st = uniform_state(grid, K, rho,
                           eps_fn=lambda X, Y: 0.1 + 0.05 * np.sin(2 * np.pi * X))
        cfg = SolverConfig(t_final=0.5, bc_x="periodic", n_samples=10)
        res = run(st, exp_law, cfg)
        tr = entropy_trace(res)
        assert tr.normalized[0] == 1.0
        assert (tr.eta_raw >= 0.0).all()
        losses[nx] = tr.loss_at(0.5)
    assert abs(losses[128]) < abs(losses[64])
    assert losses[64] < 1e-3


# -- classification -----------------------------------------------------------------

def _trace(loss, t_probe=1.0):
    times = np.array([0.0, t_probe])
    eta = np.array([1.0, 1.0 - loss])
    return EntropyTrace(times=times, eta=eta, eta_raw=eta)


def test_classify_shock_persistent_loss():
    traces = [(64, _trace(0.10)), (128, _trace(0.09))]
    assert classify_run(traces, 1.0) == "shock"


def test_classify_regularized_vanishing_loss():
    traces = [(64, _trace(0.02)), (128, _trace(0.008))]
    assert classify_run(traces, 1.0) == "regularized"


def test_classify_tiny_persistent_loss_is_regularized():
    # breakup of a discontinuous start dissipates a small mesh-converged
    # amount; sub-threshold absolute losses must not read as shocks
    traces = [(64, _trace(0.012)), (128, _trace(0.009))]
    assert classify_run(traces, 1.0) == "regularized"


def test_classify_indeterminate_between_thresholds():
    # ratio 0.7 sits between kappa and rho_persist and the loss is too
    # large to dismiss
    traces = [(64, _trace(0.05)), (128, _trace(0.035))]
    assert classify_run(traces, 1.0, rho_persist=0.8, kappa=0.5) == \
        "indeterminate"


def test_classify_input_validation():
    with pytest.raises(ValueError):
        classify_run([(64, _trace(0.1))], 1.0)
    with pytest.raises(ValueError):
        classify_run([(64, _trace(0.1)), (96, _trace(0.1))], 1.0)
    with pytest.raises(ShocklabError):
        classify_run([(64, _trace(0.1)), (128, _trace(0.1))], 2.0)

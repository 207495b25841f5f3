"""Measurement tools: front tracking, speed fits, entropy traces.

The entropy functional

    eta(t) = integral of [ 1/2 rho (u^2 + v^2) + potential(eps) ]

is constant for smooth solutions once energy exchanged through the open
x-boundaries is accounted for, and decreases where viscous shocks
dissipate.  Comparing the relative loss across mesh refinements separates
real shocks (loss persists) from dispersively regularized fronts (loss is
numerical and shrinks under refinement).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import media
from .errors import FrontNotFoundError, ShocklabError
from .media import ConstitutiveLaw
from .solver import RunResult, StateField


def y_average(state: StateField, law: ConstitutiveLaw):
    """Mean stress and velocity per x-column: (x_centers, sigma, u)."""
    sig = state.sigma(law)
    return (state.grid.x_centers,
            sig.mean(axis=1),
            state.u().mean(axis=1))


def slice_at_y(state: StateField, law: ConstitutiveLaw, y: float):
    """Fixed-y stress/velocity profiles (nearest cell row)."""
    j = int(np.clip(round((y - state.grid.y0) / state.grid.dy - 0.5),
                    0, state.grid.ny - 1))
    return (state.grid.x_centers,
            state.sigma(law)[:, j],
            state.u()[:, j])


def shock_position(x: np.ndarray, profile: np.ndarray, sigma_l: float,
                   sigma_r: float) -> float:
    """Rightmost crossing of the midpoint level, scanning right to left.

    Returns a sub-cell position by linear interpolation between the
    bracketing cell centers.  Scanning from the right keeps post-shock
    oscillations (which trail the front) from confusing the search.
    """
    if sigma_l == sigma_r:
        raise FrontNotFoundError("sigma_l == sigma_r defines no midpoint level")
    level = 0.5 * (sigma_l + sigma_r)
    d = profile - level
    sign_change = d[:-1] * d[1:] <= 0.0
    hit = np.logical_and(sign_change, np.logical_or(d[:-1] != 0.0, d[1:] != 0.0))
    idx = np.nonzero(hit)[0]
    if idx.size == 0:
        raise FrontNotFoundError("profile never crosses the midpoint level")
    j = int(idx[-1])
    if d[j] == d[j + 1]:
        return float(0.5 * (x[j] + x[j + 1]))
    frac = d[j] / (d[j] - d[j + 1])
    return float(x[j] + frac * (x[j + 1] - x[j]))


def make_front_sampler(law: ConstitutiveLaw, sigma_l: float, sigma_r: float):
    """Sampler for the run loop; NaN while no front is present."""

    def sample(state: StateField, t: float) -> float:
        x, sig, _ = y_average(state, law)
        try:
            return shock_position(x, sig, sigma_l, sigma_r)
        except FrontNotFoundError:
            return np.nan

    return sample


@dataclass
class FrontTrace:
    times: np.ndarray
    positions: np.ndarray
    fit_window: float = 0.5  # trailing fraction of samples used in the fit
    fitted_speed: float | None = None
    fit_residual: float | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.asarray(self.positions, dtype=float)
        if self.times.shape != self.positions.shape:
            raise ValueError("times and positions must have equal length")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if not 0.0 < self.fit_window <= 1.0:
            raise ValueError("fit_window must lie in (0, 1]")


def measure_speed(trace: FrontTrace) -> float:
    """Least-squares slope of position vs. time over the trailing window.

    Samples where the front was not found (NaN) are ignored; at least five
    valid samples must remain in the window.
    """
    n = len(trace.times)
    start = n - max(int(round(trace.fit_window * n)), 1)
    t = trace.times[start:]
    x = trace.positions[start:]
    keep = np.isfinite(x)
    t, x = t[keep], x[keep]
    if t.size < 5:
        raise ShocklabError(
            f"speed fit needs >= 5 valid samples in the window, got {t.size}"
        )
    slope, intercept = np.polyfit(t, x, 1)
    resid = x - (slope * t + intercept)
    trace.fitted_speed = float(slope)
    trace.fit_residual = float(np.sqrt(np.mean(resid**2)))
    return trace.fitted_speed


def entropy(state: StateField, law: ConstitutiveLaw,
            include_transverse: bool = True) -> float:
    """Midpoint-rule entropy of one snapshot.

    The kinetic term includes both velocity components by default; 1D-style
    accounting (u only) is available for comparison.
    """
    kin = state.u() ** 2
    if include_transverse:
        kin = kin + state.v() ** 2
    dens = 0.5 * state.rho_i * kin + media.stress_potential(
        law, state.K_i, state.eps_i)
    return state.grid.cell_area * float(dens.sum())


@dataclass
class EntropyTrace:
    times: np.ndarray
    eta: np.ndarray       # boundary-corrected values
    eta_raw: np.ndarray
    eta0: float = field(init=False)
    normalized: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.eta = np.asarray(self.eta, dtype=float)
        self.eta_raw = np.asarray(self.eta_raw, dtype=float)
        self.eta0 = float(self.eta[0])
        if self.eta0 <= 0.0:
            raise ValueError("eta(0) must be positive for a nontrivial run")
        self.normalized = self.eta / self.eta0

    def loss_at(self, t_probe: float) -> float:
        """Relative loss 1 - eta(t)/eta(0) at the given sample time."""
        idx = np.nonzero(np.isclose(self.times, t_probe, rtol=0.0,
                                    atol=1e-9 * max(1.0, abs(t_probe))))[0]
        if idx.size == 0:
            raise ShocklabError(f"t={t_probe} is not a sample time of this trace")
        return float(1.0 - self.normalized[idx[0]])


def entropy_trace(result: RunResult) -> EntropyTrace:
    """Boundary-corrected entropy trace of a run."""
    if result.eta_raw is None:
        raise ShocklabError("run was executed without entropy tracking")
    return EntropyTrace(times=result.times, eta=result.eta(),
                        eta_raw=result.eta_raw)


CLASSIFICATIONS = ("shock", "regularized", "indeterminate")


def classify_run(traces, t_probe: float, tau_abs: float = 0.01,
                 rho_persist: float = 0.6, kappa: float = 0.6) -> str:
    """Shock-vs-regularized call from entropy losses at >= 2 resolutions.

    ``traces`` is a sequence of (resolution, EntropyTrace).  The loss on
    the finest grid decides: a real shock keeps losing entropy under
    refinement (loss > tau_abs and at least rho_persist of the coarse
    loss).  Regularized fronts show losses that either collapse under
    refinement (loss <= kappa * coarse) or are negligible outright
    (loss <= tau_abs): a discontinuous start always dissipates a small,
    mesh-converged amount while it breaks up, so tiny persistent losses
    must not read as shocks.
    """
    if len(traces) < 2:
        raise ValueError("need entropy traces at >= 2 resolutions")
    ordered = sorted(traces, key=lambda rt: rt[0])
    if ordered[-1][0] < 2 * ordered[0][0]:
        raise ValueError("resolutions must differ by at least 2x")
    loss_coarse = ordered[0][1].loss_at(t_probe)
    loss_fine = ordered[-1][1].loss_at(t_probe)
    if loss_fine > tau_abs and loss_fine >= rho_persist * loss_coarse:
        return "shock"
    if loss_fine <= kappa * loss_coarse or loss_fine <= tau_abs:
        return "regularized"
    return "indeterminate"

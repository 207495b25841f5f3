"""Second-order finite-volume solver for the first-order wave system.

Conserved variables are q = (eps, rho*u, rho*v) on a uniform 2D grid with
two ghost cells per side.  The x-flux is (-u, -sigma, 0) and the y-flux
(-v, 0, -sigma), so each dimensional sweep is a 2x2 subsystem with the
transverse momentum passive.  A full step uses Strang splitting: half
x-sweep, full y-sweep, half x-sweep; 1D grids take plain x-sweeps.

Material (K, rho) is sampled at cell centers and cached on the state.
Ghost material copies wrap-around values on periodic sides and edge values
on outflow sides, so boundaries introduce no artificial impedance jumps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels, media
from .errors import CFLError, HyperbolicityError, ShocklabError
from .homogenize import Homogenized1D
from .media import ConstitutiveLaw, MediumSpec

GHOST = 2

BC_MODES = ("outflow", "periodic")


@dataclass(frozen=True)
class Grid2D:
    """Uniform cell-centered grid; ghost width is fixed at two cells."""

    nx: int
    ny: int
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 1 or self.ny < 1:
            raise ValueError("nx and ny must be at least 1")
        if self.dx <= 0.0 or self.dy <= 0.0:
            raise ValueError("dx and dy must be positive")

    @property
    def ghost(self) -> int:
        return GHOST

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape including ghost cells."""
        return (self.nx + 2 * GHOST, self.ny + 2 * GHOST)

    @property
    def x_centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def y_centers(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    def centers_with_ghosts(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.x0 + (np.arange(-GHOST, self.nx + GHOST) + 0.5) * self.dx
        y = self.y0 + (np.arange(-GHOST, self.ny + GHOST) + 0.5) * self.dy
        return x, y

    @property
    def lx(self) -> float:
        return self.nx * self.dx

    @property
    def ly(self) -> float:
        return self.ny * self.dy

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def one_dimensional(self) -> bool:
        return self.ny == 1


@dataclass
class StateField:
    """Conserved fields plus cached material, all with ghost frames."""

    grid: Grid2D
    eps: np.ndarray
    mom_x: np.ndarray
    mom_y: np.ndarray
    K: np.ndarray
    rho: np.ndarray

    def __post_init__(self) -> None:
        shape = self.grid.shape
        for name in ("eps", "mom_x", "mom_y", "K", "rho"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, want {shape}")

    # interior views (no ghosts)
    @property
    def eps_i(self) -> np.ndarray:
        return self.eps[GHOST:-GHOST, GHOST:-GHOST]

    @property
    def mom_x_i(self) -> np.ndarray:
        return self.mom_x[GHOST:-GHOST, GHOST:-GHOST]

    @property
    def mom_y_i(self) -> np.ndarray:
        return self.mom_y[GHOST:-GHOST, GHOST:-GHOST]

    @property
    def K_i(self) -> np.ndarray:
        return self.K[GHOST:-GHOST, GHOST:-GHOST]

    @property
    def rho_i(self) -> np.ndarray:
        return self.rho[GHOST:-GHOST, GHOST:-GHOST]

    def u(self) -> np.ndarray:
        return self.mom_x_i / self.rho_i

    def v(self) -> np.ndarray:
        return self.mom_y_i / self.rho_i

    def sigma(self, law: ConstitutiveLaw) -> np.ndarray:
        return media.stress(law, self.K_i, self.eps_i)

    def copy(self) -> "StateField":
        return StateField(self.grid, self.eps.copy(), self.mom_x.copy(),
                          self.mom_y.copy(), self.K.copy(), self.rho.copy())

    def totals(self) -> tuple[float, float, float]:
        """(sum eps, sum rho u, sum rho v) over the interior, times cell area."""
        a = self.grid.cell_area
        return (a * float(self.eps_i.sum()),
                a * float(self.mom_x_i.sum()),
                a * float(self.mom_y_i.sum()))


@dataclass(frozen=True)
class SolverConfig:
    t_final: float
    cfl_target: float = 0.9
    limiter: str = "mc"
    bc_x: str = "outflow"
    bc_y: str = "periodic"
    n_samples: int = 80
    keep_snapshots: int = 0  # keep every k-th sample's fields; 0 = none

    def __post_init__(self) -> None:
        if not 0.0 < self.cfl_target < 1.0:
            raise ValueError("cfl_target must lie in (0, 1)")
        if self.limiter not in kernels.LIMITER_IDS:
            raise ValueError(f"unknown limiter {self.limiter!r}")
        if self.bc_x not in BC_MODES or self.bc_y not in BC_MODES:
            raise ValueError("boundary modes must be 'outflow' or 'periodic'")
        if self.t_final < 0.0:
            raise ValueError("t_final must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")


# -- state construction -------------------------------------------------------

def material_arrays(grid: Grid2D, spec: MediumSpec, bc_x: str,
                    bc_y: str) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centered (K, rho) with ghost entries consistent with the BCs."""
    xg, yg = grid.centers_with_ghosts()
    K, rho = media.material_at(spec, xg[:, None], yg[None, :])
    K = np.ascontiguousarray(K, dtype=float)
    rho = np.ascontiguousarray(rho, dtype=float)
    for arr in (K, rho):
        _fill_axis0(arr, bc_x)
        _fill_axis0(arr.T, bc_y)
    return K, rho


def uniform_material(grid: Grid2D, K: float, rho: float) -> tuple[np.ndarray, np.ndarray]:
    shape = grid.shape
    return np.full(shape, float(K)), np.full(shape, float(rho))


def shock_state(grid: Grid2D, K: np.ndarray, rho: np.ndarray,
                law: ConstitutiveLaw, sigma_l: float, sigma_r: float,
                u_l: float, u_r: float, x_front: float) -> StateField:
    """Two-state initial data: stress and velocity uniform per side.

    Strain is set locally, eps = sigma_hat^{-1}(sigma_side)/K(x, y), so the
    stress field is exactly uniform on each side of the front.  The front
    is snapped to the nearest cell interface.
    """
    xg, _ = grid.centers_with_ghosts()
    snapped = grid.x0 + round((x_front - grid.x0) / grid.dx) * grid.dx
    left = (xg < snapped)[:, None]
    w_l = media.sigma_hat_inverse(law, sigma_l)
    w_r = media.sigma_hat_inverse(law, sigma_r)
    eps = np.where(left, w_l, w_r) / K
    mom_x = np.where(left, u_l, u_r) * rho
    mom_y = np.zeros(grid.shape)
    return StateField(grid, np.ascontiguousarray(eps),
                      np.ascontiguousarray(mom_x), mom_y,
                      np.asarray(K, dtype=float), np.asarray(rho, dtype=float))


def uniform_state(grid: Grid2D, K: np.ndarray, rho: np.ndarray,
                  eps_fn=None, u_fn=None, v_fn=None) -> StateField:
    """State from callables of cell-center coordinates (defaults to zero)."""
    xg, yg = grid.centers_with_ghosts()
    X, Y = np.meshgrid(xg, yg, indexing="ij")
    eps = np.zeros(grid.shape) if eps_fn is None else np.asarray(eps_fn(X, Y), dtype=float)
    u = np.zeros(grid.shape) if u_fn is None else np.asarray(u_fn(X, Y), dtype=float)
    v = np.zeros(grid.shape) if v_fn is None else np.asarray(v_fn(X, Y), dtype=float)
    return StateField(grid, np.ascontiguousarray(eps + 0.0),
                      np.ascontiguousarray(u * rho),
                      np.ascontiguousarray(v * rho),
                      np.asarray(K, dtype=float), np.asarray(rho, dtype=float))


# -- Riemann interface solve (reference, single interface) --------------------

@dataclass(frozen=True)
class RiemannFan:
    """Two f-waves with speeds plus the entering fluctuations.

    ``waves[p]`` holds the (eps, normal momentum) components of wave p;
    the transverse momentum component is passive and carries no wave.
    """

    waves: np.ndarray   # shape (2, 2)
    speeds: np.ndarray  # shape (2,)
    amdq: np.ndarray    # left-going fluctuation, shape (2,)
    apdq: np.ndarray    # right-going fluctuation, shape (2,)


def riemann_sweep(q_l, q_r, mat_l, mat_r, law: ConstitutiveLaw,
                  direction: str = "x") -> RiemannFan:
    """Solve one interface of the 2x2 sweep subsystem.

    States are (eps, rho u, rho v); ``direction`` picks which momentum is
    active.  Speeds/impedances are evaluated at each side's own state.
    """
    if direction not in ("x", "y"):
        raise ValueError("direction must be 'x' or 'y'")
    idx = 1 if direction == "x" else 2
    K_l, rho_l = mat_l
    K_r, rho_r = mat_r
    eps_l, eps_r = q_l[0], q_r[0]
    vel_l = q_l[idx] / rho_l
    vel_r = q_r[idx] / rho_r
    c_l = float(media.sound_speed(law, K_l, rho_l, eps_l))
    c_r = float(media.sound_speed(law, K_r, rho_r, eps_r))
    Z_l, Z_r = rho_l * c_l, rho_r * c_r
    d1 = -(vel_r - vel_l)
    d2 = -(float(media.stress(law, K_r, eps_r)) - float(media.stress(law, K_l, eps_l)))
    beta1 = (d2 + Z_r * d1) / (Z_l + Z_r)
    beta2 = (Z_l * d1 - d2) / (Z_l + Z_r)
    waves = np.array([[beta1, beta1 * Z_l], [beta2, -beta2 * Z_r]])
    speeds = np.array([-c_l, c_r])
    return RiemannFan(waves=waves, speeds=speeds,
                      amdq=waves[0].copy(), apdq=waves[1].copy())


# -- stepping ------------------------------------------------------------------

def _fill_axis0(arr: np.ndarray, mode: str) -> None:
    if mode == "periodic":
        arr[0] = arr[-4]
        arr[1] = arr[-3]
        arr[-2] = arr[2]
        arr[-1] = arr[3]
    else:  # outflow: zero-order extrapolation
        arr[0] = arr[2]
        arr[1] = arr[2]
        arr[-1] = arr[-3]
        arr[-2] = arr[-3]


def fill_ghosts(state: StateField, bc_x: str, bc_y: str) -> None:
    for arr in (state.eps, state.mom_x, state.mom_y):
        _fill_axis0(arr, bc_x)
        _fill_axis0(arr.T, bc_y)


def grid_max_speed(state: StateField, law: ConstitutiveLaw) -> float:
    kind, a, b, g = law.numba_params()
    cmax, ok = kernels.max_wave_speed(state.eps, state.K, state.rho,
                                      kind, a, b, g)
    if not ok:
        raise HyperbolicityError("sigma_hat' <= 0 somewhere on the grid")
    return cmax


def _run_sweep(eps, mom, K, rho, law, lam, limiter_id) -> None:
    kind, a, b, g = law.numba_params()
    status = kernels.sweep(eps, mom, K, rho, kind, a, b, g, lam, limiter_id)
    if status != 0:
        raise HyperbolicityError("sigma_hat' <= 0 during a sweep")


def step(state: StateField, law: ConstitutiveLaw, config: SolverConfig,
         dt: float, cmax: float | None = None) -> None:
    """Advance one time step in place (Strang-split in 2D).

    The caller must supply a CFL-admissible dt; violating it is an error,
    not a silent clamp.
    """
    if dt < 0.0:
        raise ValueError("dt must be non-negative")
    if dt == 0.0:
        return
    if cmax is None:
        cmax = grid_max_speed(state, law)
    hmin = min(state.grid.dx, state.grid.dy) if not state.grid.one_dimensional \
        else state.grid.dx
    if cmax * dt / hmin > config.cfl_target * (1.0 + 1e-9):
        raise CFLError(
            f"dt={dt} gives Courant number {cmax * dt / hmin:.4f} "
            f"> cfl_target={config.cfl_target}"
        )
    lim = kernels.LIMITER_IDS[config.limiter]
    g = state.grid
    if g.one_dimensional:
        _fill_axis0(state.eps, config.bc_x)
        _fill_axis0(state.mom_x, config.bc_x)
        _run_sweep(state.eps, state.mom_x, state.K, state.rho, law,
                   dt / g.dx, lim)
    else:
        for arr in (state.eps, state.mom_x):
            _fill_axis0(arr, config.bc_x)
        _run_sweep(state.eps, state.mom_x, state.K, state.rho, law,
                   0.5 * dt / g.dx, lim)
        for arr in (state.eps, state.mom_y):
            _fill_axis0(arr.T, config.bc_y)
        _run_sweep(state.eps.T, state.mom_y.T, state.K.T, state.rho.T, law,
                   dt / g.dy, lim)
        for arr in (state.eps, state.mom_x):
            _fill_axis0(arr, config.bc_x)
        _run_sweep(state.eps, state.mom_x, state.K, state.rho, law,
                   0.5 * dt / g.dx, lim)
    if not (np.isfinite(state.eps_i).all()
            and np.isfinite(state.mom_x_i).all()
            and np.isfinite(state.mom_y_i).all()):
        raise ShocklabError("non-finite state after step")


def advance(state: StateField, law: ConstitutiveLaw, config: SolverConfig,
            dts) -> None:
    """Apply a prescribed sequence of time steps (testing/replay hook)."""
    for dt in dts:
        step(state, law, config, float(dt))


# -- time loop with sampling ----------------------------------------------------

@dataclass
class Snapshot:
    t: float
    eps: np.ndarray
    mom_x: np.ndarray
    mom_y: np.ndarray


@dataclass
class RunResult:
    grid: Grid2D
    times: np.ndarray
    samples: dict[str, np.ndarray]
    eta_raw: np.ndarray | None
    boundary_work: np.ndarray | None
    snapshots: list[Snapshot]
    final_state: StateField
    n_steps: int

    def eta(self) -> np.ndarray:
        """Entropy corrected for energy exchanged through the x-boundaries."""
        if self.eta_raw is None:
            raise ShocklabError("run was executed without entropy tracking")
        if self.boundary_work is None:
            return self.eta_raw.copy()
        return self.eta_raw - self.boundary_work


def _entropy_raw(state: StateField, law: ConstitutiveLaw) -> float:
    kin = 0.5 * state.rho_i * (state.u() ** 2 + state.v() ** 2)
    pot = media.stress_potential(law, state.K_i, state.eps_i)
    return state.grid.cell_area * float((kin + pot).sum())


def _boundary_power(state: StateField, law: ConstitutiveLaw) -> float:
    """Net instantaneous energy inflow rate through the x-boundaries.

    The energy flux of the smooth system is -u*sigma in x; the y-direction
    nets to zero under periodic BCs.  Edge-cell values stand in for the
    face values.
    """
    sig = state.sigma(law)
    u = state.u()
    dy = state.grid.dy
    flux_left = -float((u[0] * sig[0]).sum()) * dy
    flux_right = -float((u[-1] * sig[-1]).sum()) * dy
    return flux_left - flux_right


def run(state: StateField, law: ConstitutiveLaw, config: SolverConfig,
        samplers: dict | None = None, track_entropy: bool = True) -> RunResult:
    """Adaptive-dt time loop; samples diagnostics at uniform times.

    ``samplers`` maps names to callables ``f(state, t) -> float`` evaluated
    at every sample time.  Entropy (when tracked) is sampled together with
    the accumulated x-boundary energy work, so callers can form the
    boundary-corrected trace.
    """
    samplers = samplers or {}
    if config.t_final == 0.0:
        times = np.array([0.0])
    else:
        times = np.linspace(0.0, config.t_final, config.n_samples + 1)
    sampled: dict[str, list] = {name: [] for name in samplers}
    eta_raw: list[float] = []
    work: list[float] = []
    snapshots: list[Snapshot] = []
    track_bwork = track_entropy and config.bc_x == "outflow"
    w_acc = 0.0
    prev_power = _boundary_power(state, law) if track_bwork else 0.0
    n_steps = 0

    def record(t: float, k: int) -> None:
        for name, fn in samplers.items():
            sampled[name].append(fn(state, t))
        if track_entropy:
            eta_raw.append(_entropy_raw(state, law))
            work.append(w_acc)
        if config.keep_snapshots and k % config.keep_snapshots == 0:
            snapshots.append(Snapshot(t, state.eps_i.copy(),
                                      state.mom_x_i.copy(),
                                      state.mom_y_i.copy()))

    record(0.0, 0)
    t = 0.0
    tiny = 1e-12 * max(1.0, config.t_final)
    for k, target in enumerate(times[1:], start=1):
        while t < target - tiny:
            cmax = grid_max_speed(state, law)
            hmin = min(state.grid.dx, state.grid.dy) \
                if not state.grid.one_dimensional else state.grid.dx
            dt = min(config.cfl_target * hmin / cmax, target - t)
            step(state, law, config, dt, cmax=cmax)
            if track_bwork:
                power = _boundary_power(state, law)
                w_acc += 0.5 * dt * (prev_power + power)
                prev_power = power
            t += dt
            n_steps += 1
        t = target
        record(t, k)

    return RunResult(
        grid=state.grid,
        times=times,
        samples={k: np.asarray(v) for k, v in sampled.items()},
        eta_raw=np.asarray(eta_raw) if track_entropy else None,
        boundary_work=np.asarray(work) if track_entropy else None,
        snapshots=snapshots,
        final_state=state,
        n_steps=n_steps,
    )


# -- 1D runs -------------------------------------------------------------------

def grid_1d(nx: int, dx: float, x0: float = 0.0) -> Grid2D:
    return Grid2D(nx=nx, ny=1, dx=dx, dy=dx, x0=x0)


def homogenized_shock_state(grid: Grid2D, system: Homogenized1D,
                            sigma_l: float, sigma_r: float, u_l: float,
                            u_r: float, x_front: float) -> StateField:
    K, rho = uniform_material(grid, system.K, system.rho)
    return shock_state(grid, K, rho, system.law, sigma_l, sigma_r,
                       u_l, u_r, x_front)


def run_homogenized_1d(system: Homogenized1D, state: StateField,
                       config: SolverConfig,
                       samplers: dict | None = None) -> RunResult:
    """Run the constant-coefficient 1D system (reference overlays)."""
    if not state.grid.one_dimensional:
        raise ValueError("run_homogenized_1d expects a 1D grid")
    cfg = config if config.keep_snapshots else replace(config, keep_snapshots=1)
    return run(state, system.law, cfg, samplers=samplers)

"""Configuration-driven experiments: single runs, sweeps, file outputs.

An experiment starts from a right-going jump connected through the
homogenized system, evolves it with the 2D variable-coefficient solver,
tracks the y-averaged front and the entropy, and compares the fitted
front speed against the prediction.  Domain geometry follows the medium
orientation: the y-extent is one projected material period (so periodic
BCs in y are exact), a four-cell strip for purely transverse propagation.

Geometry defaults (domain length, front placement, final times) are
package reconstructions, not measured protocol values.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from . import diagnostics, rh, solver
from .diagnostics import EntropyTrace, FrontTrace, classify_run, entropy_trace
from .errors import ConfigError, ShocklabError
from .homogenize import effective_parameters, homogenized_system
from .media import (ConstitutiveLaw, MediumSpec, material_along_xi,
                    sigma_hat_inverse, sound_speed)
from .rh import connect_right_going, threshold_ch, threshold_cm

FRONT_MARGIN = 0.1       # front must end at least this fraction from the edge
DEFAULT_DOMAIN_PERIODS = 12.0


@dataclass(frozen=True)
class ExperimentConfig:
    medium: MediumSpec
    law: ConstitutiveLaw
    sigma_l: float
    sigma_r: float
    u_r: float = 0.0
    resolution: int = 64          # cells per unit length
    domain_length: float | None = None
    t_final: float | None = None
    x_front: float | None = None  # needs an explicit domain_length
    limiter: str = "mc"
    cfl: float = 0.9
    n_samples: int = 80
    fit_window: float = 0.5

    def __post_init__(self) -> None:
        if self.resolution * self.medium.period < 8:
            raise ConfigError(
                "resolution must give at least 8 cells per material period"
            )
        if self.t_final is not None and self.t_final <= 0.0:
            raise ConfigError("t_final must be positive")
        if self.domain_length is not None and self.domain_length <= 0.0:
            raise ConfigError("domain_length must be positive")
        if self.x_front is not None:
            if self.domain_length is None:
                raise ConfigError("x_front needs an explicit domain_length")
            if not 0.0 < self.x_front < self.domain_length:
                raise ConfigError("x_front must lie inside the domain")

    @property
    def theta(self) -> float:
        return self.medium.theta


@dataclass(frozen=True)
class SweepSpec:
    rho_B: tuple[float, ...]
    K_B: tuple[float, ...]
    sigma_l: tuple[float, ...]
    sigma_r: tuple[float, ...]
    theta: tuple[float, ...]
    profile: tuple[str, ...]
    law: tuple[str, ...]
    tie_K_B: bool = False  # matched contrast: K_B follows rho_B
    base: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = ["rho_B", "sigma_l", "sigma_r", "theta", "profile", "law"]
        if not self.tie_K_B:
            names.append("K_B")
        for name in names:
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"sweep list {name!r} is empty")

    def k_values(self, rho_B: float) -> tuple[float, ...]:
        return (rho_B,) if self.tie_K_B else self.K_B

    @property
    def size(self) -> int:
        n_k = 1 if self.tie_K_B else len(self.K_B)
        return (len(self.rho_B) * n_k * len(self.sigma_l)
                * len(self.sigma_r) * len(self.theta) * len(self.profile)
                * len(self.law))


def _law_from_name(name: str) -> ConstitutiveLaw:
    if name == "exponential":
        return ConstitutiveLaw("exponential")
    if name == "cubic":
        return ConstitutiveLaw("cubic", alpha=0.1, beta=0.0, gamma=5.0)
    raise ConfigError(f"unknown law name {name!r}")


def expand_sweep(sweep: SweepSpec) -> list[ExperimentConfig]:
    """Cartesian product in deterministic (lexicographic) order."""
    base = dict(sweep.base)
    configs = []
    for rho_B in sweep.rho_B:
        for K_B, sig_l, sig_r, theta, profile, law_name in itertools.product(
                sweep.k_values(rho_B), sweep.sigma_l, sweep.sigma_r,
                sweep.theta, sweep.profile, sweep.law):
            medium = MediumSpec(profile=profile, theta=theta, K_A=1.0,
                                K_B=K_B, rho_A=1.0, rho_B=rho_B)
            configs.append(ExperimentConfig(
                medium=medium, law=_law_from_name(law_name),
                sigma_l=sig_l, sigma_r=sig_r, **base))
    return configs


# -- geometry -------------------------------------------------------------------

@dataclass(frozen=True)
class Geometry:
    grid: solver.Grid2D
    x_front: float
    t_final: float


def dispersion_proxy(medium: MediumSpec) -> float:
    """Contrast measure |Z_B/Z_A - 1| + |c_B/c_A - 1| (linearized)."""
    Z_ratio = math.sqrt(medium.K_B * medium.rho_B
                        / (medium.K_A * medium.rho_A))
    c_ratio = math.sqrt(medium.K_B * medium.rho_A
                        / (medium.K_A * medium.rho_B))
    return abs(Z_ratio - 1.0) + abs(c_ratio - 1.0)


def max_downstream_speed(config: ExperimentConfig) -> float:
    """Largest local sound speed at the downstream stress state."""
    xi = np.linspace(0.0, config.medium.period, 512, endpoint=False)
    K, rho = material_along_xi(config.medium, xi)
    w_r = sigma_hat_inverse(config.law, config.sigma_r)
    return float(np.max(sound_speed(config.law, K, rho, w_r / K)))


def build_geometry(config: ExperimentConfig, s_pred: float,
                   containment: bool = False) -> Geometry:
    """Domain sizes and final time honoring the front-margin rule.

    With ``containment`` the domain is stretched so that (most) forward
    radiation, not just the predicted front, stays inside for the full
    run; entropy studies use this.
    """
    sizing_speed = s_pred
    if containment:
        sizing_speed = max(1.3 * s_pred, 1.05 * max_downstream_speed(config))
    dx = 1.0 / config.resolution
    L = config.domain_length
    t_final = config.t_final
    if L is None and t_final is None:
        L = DEFAULT_DOMAIN_PERIODS * config.medium.period
    if L is None:
        # front starts at L/4 and must stay left of (1 - margin) L
        L = sizing_speed * t_final / (1.0 - FRONT_MARGIN - 0.25) * 1.05
    nx = max(int(round(L * config.resolution)), 8)
    L = nx * dx
    x_front = L / 4.0 if config.x_front is None else config.x_front
    if t_final is None:
        t_final = ((1.0 - FRONT_MARGIN) * L - x_front) / sizing_speed
    elif x_front + s_pred * t_final > (1.0 - FRONT_MARGIN) * L + 1e-9:
        raise ConfigError(
            "t_final leaves the predicted front within the margin of the "
            "outflow boundary; enlarge domain_length or shorten t_final"
        )

    theta = config.medium.theta
    if theta == 90.0:
        ny, dy = 4, dx
    else:
        L_y = config.medium.period / math.cos(math.radians(theta))
        ny = max(int(round(L_y * config.resolution)), 4)
        dy = L_y / ny
    grid = solver.Grid2D(nx=nx, ny=ny, dx=dx, dy=dy)
    return Geometry(grid=grid, x_front=x_front, t_final=t_final)


# -- records ---------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    config_id: str
    profile: str
    law_kind: str
    theta: float
    K_B: float
    rho_B: float
    sigma_l: float
    sigma_r: float
    s_predicted: float
    s_measured: float          # NaN when the front was not found
    rel_error: float           # NaN when unmeasured
    c_h: float
    c_m: float
    c_eff: float
    entropy_loss: float
    classification: str
    dispersion_proxy: float
    front_found: bool
    fit_residual: float
    trace: EntropyTrace | None = None
    front: FrontTrace | None = None


def config_dict(config: ExperimentConfig) -> dict:
    m, law = config.medium, config.law
    d = {
        "medium": {
            "profile": m.profile, "theta": m.theta, "K_A": m.K_A,
            "K_B": m.K_B, "rho_A": m.rho_A, "rho_B": m.rho_B,
            "period": m.period, "fraction": m.fraction,
        },
        "law": {"kind": law.kind},
        "sigma_l": config.sigma_l, "sigma_r": config.sigma_r,
        "u_r": config.u_r, "resolution": config.resolution,
        "domain_length": config.domain_length, "t_final": config.t_final,
        "x_front": config.x_front,
        "limiter": config.limiter, "cfl": config.cfl,
        "n_samples": config.n_samples, "fit_window": config.fit_window,
    }
    if law.kind == "cubic":
        d["law"].update(alpha=law.alpha, beta=law.beta, gamma=law.gamma)
    return d


def experiment_id(config: ExperimentConfig) -> str:
    blob = json.dumps(config_dict(config), sort_keys=True).encode()
    return hashlib.sha1(blob).hexdigest()[:12]


def predict(config: ExperimentConfig) -> dict:
    return rh.predict_speeds(config.medium, config.law, config.sigma_l,
                             config.sigma_r, config.u_r)


def _solver_config(config: ExperimentConfig, t_final: float) -> solver.SolverConfig:
    return solver.SolverConfig(
        t_final=t_final, cfl_target=config.cfl, limiter=config.limiter,
        bc_x="outflow", bc_y="periodic", n_samples=config.n_samples)


def _prepared_run(config: ExperimentConfig, containment: bool = False):
    med = effective_parameters(config.medium)
    setup = connect_right_going(config.sigma_l, config.sigma_r, config.u_r,
                                config.law, med)
    geom = build_geometry(config, setup.s_eff, containment=containment)
    K, rho = solver.material_arrays(geom.grid, config.medium,
                                    bc_x="outflow", bc_y="periodic")
    state = solver.shock_state(geom.grid, K, rho, config.law,
                               config.sigma_l, config.sigma_r,
                               setup.u_l, config.u_r, geom.x_front)
    return med, setup, geom, state


def run_experiment(config: ExperimentConfig,
                   on_final=None) -> ExperimentRecord:
    """Run one experiment and fill its record.

    ``on_final(final_state, t_final)`` is invoked after the run, e.g. to
    dump a snapshot without repeating the simulation.
    """
    med, setup, geom, state = _prepared_run(config)
    samplers = {"front_x": diagnostics.make_front_sampler(
        config.law, config.sigma_l, config.sigma_r)}
    result = solver.run(state, config.law, _solver_config(config, geom.t_final),
                        samplers=samplers)
    if on_final is not None:
        on_final(result.final_state, float(result.times[-1]))

    trace = FrontTrace(result.times, result.samples["front_x"],
                       fit_window=config.fit_window)
    s_pred = setup.s_eff
    try:
        s_meas = diagnostics.measure_speed(trace)
        rel_error = abs(s_meas - s_pred) / s_pred
        front_found = True
        residual = trace.fit_residual
    except ShocklabError:
        s_meas, rel_error, residual = math.nan, math.nan, math.nan
        front_found = False

    etrace = entropy_trace(result)
    return ExperimentRecord(
        config_id=experiment_id(config),
        profile=config.medium.profile,
        law_kind=config.law.kind,
        theta=config.medium.theta,
        K_B=config.medium.K_B,
        rho_B=config.medium.rho_B,
        sigma_l=config.sigma_l,
        sigma_r=config.sigma_r,
        s_predicted=s_pred,
        s_measured=s_meas,
        rel_error=rel_error,
        c_h=threshold_ch(config.medium, config.law, config.sigma_r),
        c_m=threshold_cm(config.medium, config.law, config.sigma_r),
        c_eff=med.c_eff,
        entropy_loss=etrace.loss_at(result.times[-1]),
        classification="",
        dispersion_proxy=dispersion_proxy(config.medium),
        front_found=front_found,
        fit_residual=residual,
        trace=etrace,
        front=trace,
    )


def run_entropy_study(config: ExperimentConfig, resolutions,
                      t_probe: float | None = None,
                      tau_abs: float = 0.01, rho_persist: float = 0.6,
                      kappa: float = 0.6):
    """Entropy traces at several resolutions plus the shock classification.

    Returns (traces, losses, label) with traces/losses keyed by resolution.
    The domain is sized once (same physical setup at every resolution)
    with forward-radiation containment.
    """
    if config.t_final is None:
        raise ConfigError("entropy studies need an explicit t_final")
    resolutions = sorted(int(r) for r in resolutions)
    if len(resolutions) < 2:
        raise ConfigError("need at least two resolutions to classify")
    t_probe = config.t_final if t_probe is None else t_probe

    traces: dict[int, EntropyTrace] = {}
    for res in resolutions:
        cfg = replace(config, resolution=res)
        _, _, geom, state = _prepared_run(cfg, containment=True)
        result = solver.run(state, cfg.law, _solver_config(cfg, geom.t_final))
        traces[res] = entropy_trace(result)
    losses = {res: tr.loss_at(t_probe) for res, tr in traces.items()}
    label = classify_run([(res, tr) for res, tr in traces.items()], t_probe,
                         tau_abs=tau_abs, rho_persist=rho_persist, kappa=kappa)
    return traces, losses, label


def homogenized_overlay(config: ExperimentConfig) -> solver.RunResult:
    """Matching 1D constant-coefficient reference run (figure overlays)."""
    med = effective_parameters(config.medium)
    setup = connect_right_going(config.sigma_l, config.sigma_r, config.u_r,
                                config.law, med)
    geom = build_geometry(config, setup.s_eff)
    system = homogenized_system(med, config.law)
    grid = solver.grid_1d(geom.grid.nx, geom.grid.dx)
    state = solver.homogenized_shock_state(grid, system, config.sigma_l,
                                           config.sigma_r, setup.u_l,
                                           config.u_r, geom.x_front)
    samplers = {"front_x": diagnostics.make_front_sampler(
        config.law, config.sigma_l, config.sigma_r)}
    return solver.run_homogenized_1d(
        system, state, _solver_config(config, geom.t_final), samplers=samplers)


# -- sweep execution --------------------------------------------------------------

def run_sweep(configs, jobs: int = 1, log=None) -> list[ExperimentRecord]:
    """Run experiments (optionally in parallel); record order is config order."""
    configs = list(configs)
    if jobs <= 1:
        records = []
        for i, cfg in enumerate(configs):
            records.append(run_experiment(cfg))
            if log:
                log(f"[{i + 1}/{len(configs)}] {records[-1].config_id} done")
        return records
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        records = list(pool.map(run_experiment, configs, chunksize=1))
    if log:
        log(f"{len(records)} experiments done on {jobs} workers")
    return records


# -- outputs -----------------------------------------------------------------------

SPEEDS_COLUMNS = ("profile", "law", "theta_deg", "K_B", "rho_B", "sigma_l",
                  "sigma_r", "s_predicted", "s_measured", "rel_error",
                  "dispersion_proxy", "classification")


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def summarize(records) -> dict:
    """Per-angle and overall relative-error statistics."""
    def stats(errs):
        errs = [e for e in errs if not math.isnan(e)]
        if not errs:
            return {"n": 0, "median_rel_error": None, "max_rel_error": None}
        return {"n": len(errs),
                "median_rel_error": float(np.median(errs)),
                "max_rel_error": float(np.max(errs))}

    by_theta: dict[str, list[float]] = {}
    for r in records:
        by_theta.setdefault(_fmt(r.theta), []).append(r.rel_error)
    return {
        "n_records": len(records),
        "overall": stats([r.rel_error for r in records]),
        "per_theta": {k: stats(v) for k, v in sorted(by_theta.items())},
    }


def emit_outputs(records, out_dir) -> list[str]:
    """Write speeds.csv, per-record entropy traces, and summary.json."""
    records = list(records)
    if not records:
        raise ConfigError("no records to emit")
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    speeds = os.path.join(out_dir, "speeds.csv")
    with open(speeds, "w", newline="") as fh:
        fh.write(",".join(SPEEDS_COLUMNS) + "\n")
        for r in records:
            row = (r.profile, r.law_kind, r.theta, r.K_B, r.rho_B, r.sigma_l,
                   r.sigma_r, r.s_predicted, r.s_measured, r.rel_error,
                   r.dispersion_proxy, r.classification)
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    paths.append(speeds)

    for r in records:
        if r.trace is not None:
            tpath = os.path.join(out_dir, f"entropy_{r.config_id}.csv")
            with open(tpath, "w", newline="") as fh:
                fh.write("t,eta,eta_normalized\n")
                for t, e, n in zip(r.trace.times, r.trace.eta,
                                   r.trace.normalized):
                    fh.write(f"{_fmt(t)},{_fmt(e)},{_fmt(n)}\n")
            paths.append(tpath)
        if r.front is not None:
            fpath = os.path.join(out_dir, f"front_{r.config_id}.csv")
            with open(fpath, "w", newline="") as fh:
                fh.write("t,x_front\n")
                for t, x in zip(r.front.times, r.front.positions):
                    fh.write(f"{_fmt(t)},{_fmt(x)}\n")
            paths.append(fpath)

    spath = os.path.join(out_dir, "summary.json")
    with open(spath, "w") as fh:
        json.dump(summarize(records), fh, sort_keys=True, indent=2)
        fh.write("\n")
    paths.append(spath)
    return paths


def read_speeds_csv(path) -> list[dict]:
    import csv

    with open(path) as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(SPEEDS_COLUMNS):
            raise ConfigError(f"{path}: unexpected columns {reader.fieldnames}")
        rows = []
        for row in reader:
            parsed = dict(row)
            for key in ("theta_deg", "K_B", "rho_B", "sigma_l", "sigma_r",
                        "s_predicted", "s_measured", "rel_error",
                        "dispersion_proxy"):
                parsed[key] = float(row[key])
            rows.append(parsed)
        return rows


# -- config files --------------------------------------------------------------------

def _medium_from_dict(d: dict) -> MediumSpec:
    try:
        return MediumSpec(
            profile=d["profile"], theta=float(d["theta"]),
            K_A=float(d.get("K_A", 1.0)), K_B=float(d["K_B"]),
            rho_A=float(d.get("rho_A", 1.0)), rho_B=float(d["rho_B"]),
            period=float(d.get("period", 1.0)),
            fraction=float(d.get("fraction", 0.5)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad medium block: {exc}") from exc


def _law_from_dict(d: dict) -> ConstitutiveLaw:
    kind = d.get("kind")
    if kind == "exponential":
        return ConstitutiveLaw("exponential")
    if kind == "cubic":
        return ConstitutiveLaw(
            "cubic", alpha=float(d.get("alpha", 0.1)),
            beta=float(d.get("beta", 0.0)), gamma=float(d.get("gamma", 5.0)))
    raise ConfigError(f"bad law block: unknown kind {kind!r}")


def experiment_from_dict(doc: dict) -> ExperimentConfig:
    if "medium" not in doc or "law" not in doc:
        raise ConfigError("experiment config needs 'medium' and 'law' blocks")
    kwargs = {}
    for key, cast in (("u_r", float), ("resolution", int),
                      ("domain_length", float), ("t_final", float),
                      ("x_front", float), ("limiter", str), ("cfl", float),
                      ("n_samples", int), ("fit_window", float)):
        if doc.get(key) is not None:
            kwargs[key] = cast(doc[key])
    try:
        return ExperimentConfig(
            medium=_medium_from_dict(doc["medium"]),
            law=_law_from_dict(doc["law"]),
            sigma_l=float(doc["sigma_l"]), sigma_r=float(doc["sigma_r"]),
            **kwargs)
    except KeyError as exc:
        raise ConfigError(f"experiment config missing field: {exc}") from exc


def load_experiment(path) -> ExperimentConfig:
    doc = _load_yaml(path)
    return experiment_from_dict(doc)


def load_sweep(path) -> SweepSpec:
    doc = _load_yaml(path)
    if "sweep" not in doc:
        raise ConfigError(f"{path}: no 'sweep' block")
    sw = doc["sweep"]
    try:
        return SweepSpec(
            rho_B=tuple(float(v) for v in sw["rho_B"]),
            K_B=tuple(float(v) for v in sw.get("K_B") or ()),
            sigma_l=tuple(float(v) for v in sw["sigma_l"]),
            sigma_r=tuple(float(v) for v in sw["sigma_r"]),
            theta=tuple(float(v) for v in sw["theta"]),
            profile=tuple(sw["profile"]),
            law=tuple(sw["law"]),
            tie_K_B=bool(sw.get("tie_K_B", False)),
            base=dict(doc.get("base") or {}),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: bad sweep block ({exc})") from exc


def _load_yaml(path) -> dict:
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed YAML ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc

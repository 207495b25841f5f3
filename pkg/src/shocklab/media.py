"""Periodic material fields and nonlinear constitutive laws.

The medium varies along a single direction

    xi = x*sin(theta) + y*cos(theta),

with period ``Omega``: theta = 90 deg means the material interfaces are
perpendicular to the x-axis (transverse propagation for an x-going wave),
theta = 0 deg means propagation parallel to the layering.

Two profiles are supported: a two-material layered medium and a smooth
sinusoidal blend of the same endpoint values.  Stress laws have the form

    sigma = sigma_hat(K(x, y) * eps)

with sigma_hat either ``exp(w) - 1`` or the cubic
``alpha*w + beta*w^2 + gamma*w^3``; both are smooth and strictly
increasing on their working range, so they are invertible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import HyperbolicityError, StressRangeError

PROFILES = ("layered", "sinusoidal")
LAW_KINDS = ("exponential", "cubic")


@dataclass(frozen=True)
class MediumSpec:
    """Periodic material description: profile, orientation and endpoints."""

    profile: str
    theta: float  # degrees in [0, 90]
    K_A: float
    K_B: float
    rho_A: float
    rho_B: float
    period: float = 1.0
    fraction: float = 0.5  # volume fraction of material A (layered only)

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if not 0.0 <= self.theta <= 90.0:
            raise ValueError("theta must lie in [0, 90] degrees")
        for name in ("K_A", "K_B", "rho_A", "rho_B", "period"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("fraction must lie strictly inside (0, 1)")

    @property
    def theta_rad(self) -> float:
        return math.radians(self.theta)

    def xi(self, x, y):
        """Coordinate along the direction of material variation."""
        return x * math.sin(self.theta_rad) + y * math.cos(self.theta_rad)

    def breakpoints(self) -> tuple[float, ...]:
        """Discontinuity locations of the profile within one period."""
        if self.profile == "layered":
            return (0.0, self.fraction * self.period, self.period)
        return (0.0, self.period)


@dataclass(frozen=True)
class ConstitutiveLaw:
    """Stress law sigma_hat(w) with w = K*eps.

    For the cubic kind, strict monotonicity of sigma_hat is checked on
    ``working_range`` (an interval of w values) at construction time.
    """

    kind: str
    alpha: float = 0.1
    beta: float = 0.0
    gamma: float = 5.0
    working_range: tuple[float, float] = (-1.0, 4.0)

    def __post_init__(self) -> None:
        if self.kind not in LAW_KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        lo, hi = self.working_range
        if not lo < hi:
            raise ValueError("working_range must be a nonempty interval")
        if self.kind == "cubic" and self._min_slope(lo, hi) <= 0.0:
            raise ValueError(
                "cubic law is not strictly increasing on "
                f"working range [{lo}, {hi}]"
            )

    def _min_slope(self, lo: float, hi: float) -> float:
        # sigma_hat'(w) = alpha + 2 beta w + 3 gamma w^2 is quadratic in w;
        # its minimum over [lo, hi] sits at an endpoint or at the vertex.
        candidates = [lo, hi]
        if self.gamma != 0.0:
            vertex = -self.beta / (3.0 * self.gamma)
            if lo < vertex < hi:
                candidates.append(vertex)
        return min(
            self.alpha + 2.0 * self.beta * w + 3.0 * self.gamma * w * w
            for w in candidates
        )

    def numba_params(self) -> tuple[int, float, float, float]:
        """(kind id, alpha, beta, gamma) consumed by the compiled kernels."""
        kind_id = 0 if self.kind == "exponential" else 1
        return kind_id, self.alpha, self.beta, self.gamma


def exponential_law() -> ConstitutiveLaw:
    return ConstitutiveLaw("exponential")


def cubic_law(alpha: float = 0.1, beta: float = 0.0, gamma: float = 5.0,
              working_range: tuple[float, float] = (-1.0, 4.0)) -> ConstitutiveLaw:
    return ConstitutiveLaw("cubic", alpha, beta, gamma, working_range)


def linear_law(slope: float = 1.0) -> ConstitutiveLaw:
    """Degenerate cubic with sigma_hat(w) = slope*w (handy reference case)."""
    return ConstitutiveLaw("cubic", alpha=slope, beta=0.0, gamma=0.0)


# -- pointwise law evaluations (accept scalars or numpy arrays) --------------

def sigma_hat(law: ConstitutiveLaw, w):
    if law.kind == "exponential":
        return np.exp(w) - 1.0
    return law.alpha * w + law.beta * w**2 + law.gamma * w**3


def sigma_hat_prime(law: ConstitutiveLaw, w):
    if law.kind == "exponential":
        return np.exp(w)
    return law.alpha + 2.0 * law.beta * w + 3.0 * law.gamma * w**2


def sigma_hat_inverse(law: ConstitutiveLaw, sigma: float) -> float:
    """Solve sigma_hat(w) = sigma for w (scalar).

    Exponential: closed form.  Cubic: safeguarded Newton with a bisection
    fallback, relative tolerance 1e-12, at most 100 iterations.
    """
    sigma = float(sigma)
    if law.kind == "exponential":
        if sigma <= -1.0:
            raise StressRangeError(
                f"sigma={sigma} is outside the exponential-law range (-1, inf)"
            )
        return math.log1p(sigma)
    return _invert_cubic(law, sigma)


def _invert_cubic(law: ConstitutiveLaw, sigma: float) -> float:
    if sigma == 0.0:
        return 0.0
    # Bracket the root by doubling outward from zero.
    lo, hi = (0.0, 1.0) if sigma > 0.0 else (-1.0, 0.0)
    grow = abs(sigma) / law.alpha if law.alpha > 0 else 1.0
    if sigma > 0.0:
        hi = max(hi, grow)
        for _ in range(200):
            if sigma_hat(law, hi) >= sigma:
                break
            hi *= 2.0
        else:
            raise StressRangeError(f"cannot bracket sigma={sigma} for cubic law")
    else:
        lo = min(lo, -grow)
        for _ in range(200):
            if sigma_hat(law, lo) <= sigma:
                break
            lo *= 2.0
        else:
            raise StressRangeError(f"cannot bracket sigma={sigma} for cubic law")

    w = min(max(sigma / law.alpha, lo), hi) if law.alpha > 0 else 0.5 * (lo + hi)
    for _ in range(100):
        f = sigma_hat(law, w) - sigma
        if f > 0.0:
            hi = w
        else:
            lo = w
        if abs(f) <= 1e-12 * max(1.0, abs(sigma)):
            return w
        fp = sigma_hat_prime(law, w)
        step_ok = fp > 0.0
        if step_ok:
            w_new = w - f / fp
            step_ok = lo < w_new < hi
        if not step_ok:
            w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 1e-15 * max(1.0, abs(w)):
            return w_new
        w = w_new
    raise StressRangeError(
        f"cubic inversion did not converge for sigma={sigma}"
    )


# -- material and stress operations ------------------------------------------

def material_at(spec: MediumSpec, x, y):
    """Material (K, rho) at physical location(s); accepts arrays."""
    xi = spec.xi(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    phase = np.mod(xi / spec.period, 1.0)
    if spec.profile == "layered":
        in_A = phase < spec.fraction
        K = np.where(in_A, spec.K_A, spec.K_B)
        rho = np.where(in_A, spec.rho_A, spec.rho_B)
    else:
        s = np.sin(2.0 * np.pi * phase)
        K = 0.5 * (spec.K_A + spec.K_B) + 0.5 * abs(spec.K_A - spec.K_B) * s
        rho = 0.5 * (spec.rho_A + spec.rho_B) + 0.5 * abs(spec.rho_A - spec.rho_B) * s
    if np.isscalar(x) and np.isscalar(y):
        return float(K), float(rho)
    return K, rho


def material_along_xi(spec: MediumSpec, xi):
    """Material (K, rho) as a function of the periodicity coordinate."""
    phase = np.mod(np.asarray(xi, dtype=float) / spec.period, 1.0)
    if spec.profile == "layered":
        in_A = phase < spec.fraction
        return (np.where(in_A, spec.K_A, spec.K_B),
                np.where(in_A, spec.rho_A, spec.rho_B))
    s = np.sin(2.0 * np.pi * phase)
    return (0.5 * (spec.K_A + spec.K_B) + 0.5 * abs(spec.K_A - spec.K_B) * s,
            0.5 * (spec.rho_A + spec.rho_B) + 0.5 * abs(spec.rho_A - spec.rho_B) * s)


def stress(law: ConstitutiveLaw, K, eps):
    return sigma_hat(law, np.asarray(K) * np.asarray(eps))


def sound_speed(law: ConstitutiveLaw, K, rho, eps):
    """Local characteristic speed sqrt(K * sigma_hat'(K eps) / rho)."""
    sp = sigma_hat_prime(law, np.asarray(K) * np.asarray(eps))
    if np.any(np.asarray(sp) <= 0.0):
        raise HyperbolicityError("sigma_hat' <= 0: hyperbolicity lost")
    return np.sqrt(np.asarray(K) * sp / np.asarray(rho))


def inverse_stress(law: ConstitutiveLaw, K, sigma: float) -> float:
    """Strain eps with stress(law, K, eps) == sigma."""
    return sigma_hat_inverse(law, sigma) / float(K)


def g_of_sigma(law: ConstitutiveLaw, sigma: float) -> float:
    """sigma_hat' evaluated at sigma_hat^{-1}(sigma)."""
    return float(sigma_hat_prime(law, sigma_hat_inverse(law, sigma)))


def stress_potential(law: ConstitutiveLaw, K, eps):
    """Integral of the stress from 0 to eps (elastic energy density)."""
    K = np.asarray(K, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if law.kind == "exponential":
        out = (np.exp(K * eps) - 1.0) / K - eps
    else:
        out = (law.alpha * K * eps**2 / 2.0
               + law.beta * K**2 * eps**3 / 3.0
               + law.gamma * K**3 * eps**4 / 4.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScalingRecord:
    """Factors induced by dividing out the material-A parameters.

    Quantities in the normalized problem relate to the originals by
    eps_norm = strain_scale * eps, sigma_norm = stress_scale * sigma,
    and wave speeds by speed_original = speed_scale * speed_norm.
    """

    K_ref: float
    rho_ref: float

    @property
    def strain_scale(self) -> float:
        return self.K_ref

    @property
    def stress_scale(self) -> float:
        return self.K_ref / self.rho_ref

    @property
    def speed_scale(self) -> float:
        return math.sqrt(self.K_ref / self.rho_ref)


def normalize(spec: MediumSpec) -> tuple[MediumSpec, ScalingRecord]:
    """Rescale so that material A has unit bulk modulus and density."""
    record = ScalingRecord(K_ref=spec.K_A, rho_ref=spec.rho_A)
    normalized = replace(
        spec,
        K_A=1.0,
        K_B=spec.K_B / spec.K_A,
        rho_A=1.0,
        rho_B=spec.rho_B / spec.rho_A,
    )
    return normalized, record

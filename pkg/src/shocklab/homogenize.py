"""Effective (homogenized) material parameters for oblique periodic media.

For low-frequency waves the rapidly varying medium behaves like a constant
one with

    K_bar      = <1/K>^-1          (harmonic average of the bulk modulus)
    rho_m      = <rho>             (arithmetic mean density)
    rho_h      = <1/rho>^-1        (harmonic mean density)
    rho_bar(t) = (cos^2(t)/rho_h + sin^2(t)/rho_m)^-1

where <.> averages over one material period along xi and t is the angle
between the propagation direction and the direction of periodicity.  The
leading-order 1D system for a plane wave in x is then

    eps_t - u_x = 0,      rho_bar(t) u_t - sigma_bar(eps)_x = 0,

closed by sigma_bar(eps) = sigma_hat(K_bar * eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError
from .media import ConstitutiveLaw, MediumSpec, sigma_hat, sound_speed


def average_over_period(fn: Callable[[np.ndarray], np.ndarray],
                        spec: MediumSpec,
                        tol: float = 1e-10,
                        offset: float = 0.0,
                        max_doublings: int = 18) -> float:
    """Mean of ``fn(xi)`` over one material period.

    Composite midpoint rule with doubling (Richardson-style stopping) per
    smooth piece; pieces are delimited by the profile's breakpoints so the
    layered case converges immediately.  ``offset`` shifts the sampling
    phase, which must not change the result for a periodic integrand.
    """
    pts = [b + offset for b in spec.breakpoints()]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += _integrate_piece(fn, a, b, tol * (b - a) / spec.period,
                                  max_doublings)
    return total / spec.period


def _integrate_piece(fn, a: float, b: float, tol: float,
                     max_doublings: int) -> float:
    n = 8
    prev = _midpoint(fn, a, b, n)
    for _ in range(max_doublings):
        n *= 2
        cur = _midpoint(fn, a, b, n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"period average did not converge on [{a}, {b}] (tol={tol})"
    )


def _midpoint(fn, a: float, b: float, n: int) -> float:
    h = (b - a) / n
    xi = a + h * (np.arange(n) + 0.5)
    return h * float(np.sum(fn(xi)))


@dataclass(frozen=True)
class EffectiveMedium:
    """Homogenized parameters, with rho_bar evaluated at a fixed angle."""

    K_bar: float
    rho_m: float
    rho_h: float
    theta: float  # degrees
    rho_bar: float
    c_eff: float

    @classmethod
    def homogeneous(cls, K: float = 1.0, rho: float = 1.0,
                    theta: float = 90.0) -> "EffectiveMedium":
        return cls(K_bar=K, rho_m=rho, rho_h=rho, theta=theta,
                   rho_bar=rho, c_eff=math.sqrt(K / rho))


def _averages(spec: MediumSpec) -> tuple[float, float, float]:
    """(K_bar, rho_m, rho_h) by closed form (layered) or quadrature."""
    if spec.profile == "layered":
        phi = spec.fraction
        K_bar = 1.0 / (phi / spec.K_A + (1.0 - phi) / spec.K_B)
        rho_m = phi * spec.rho_A + (1.0 - phi) * spec.rho_B
        rho_h = 1.0 / (phi / spec.rho_A + (1.0 - phi) / spec.rho_B)
        return K_bar, rho_m, rho_h
    from .media import material_along_xi

    K_bar = 1.0 / average_over_period(
        lambda xi: 1.0 / material_along_xi(spec, xi)[0], spec)
    rho_m = average_over_period(
        lambda xi: material_along_xi(spec, xi)[1], spec)
    rho_h = 1.0 / average_over_period(
        lambda xi: 1.0 / material_along_xi(spec, xi)[1], spec)
    return K_bar, rho_m, rho_h


def angular_density(rho_h: float, rho_m: float, theta: float) -> float:
    t = math.radians(theta)
    return 1.0 / (math.cos(t) ** 2 / rho_h + math.sin(t) ** 2 / rho_m)


def effective_parameters(spec: MediumSpec) -> EffectiveMedium:
    """Homogenized parameters of ``spec`` at its own propagation angle."""
    K_bar, rho_m, rho_h = _averages(spec)
    return EffectiveMedium(
        K_bar=K_bar,
        rho_m=rho_m,
        rho_h=rho_h,
        theta=spec.theta,
        rho_bar=angular_density(rho_h, rho_m, spec.theta),
        c_eff=math.sqrt(K_bar / rho_m),
    )


def effective_density(spec: MediumSpec, theta: float) -> float:
    """rho_bar at an arbitrary angle (degrees in [0, 90])."""
    if not 0.0 <= theta <= 90.0:
        raise ValueError("theta must lie in [0, 90] degrees")
    _, rho_m, rho_h = _averages(spec)
    return angular_density(rho_h, rho_m, theta)


@dataclass(frozen=True)
class Homogenized1D:
    """Constant-coefficient 1D conservation system eps_t - u_x = 0,
    rho u_t - sigma_bar(eps)_x = 0 with sigma_bar(eps) = sigma_hat(K eps)."""

    K: float
    rho: float
    law: ConstitutiveLaw

    def stress(self, eps):
        return sigma_hat(self.law, self.K * np.asarray(eps))

    def sound_speed(self, eps):
        return sound_speed(self.law, self.K, self.rho, eps)


def homogenized_system(med: EffectiveMedium, law: ConstitutiveLaw) -> Homogenized1D:
    return Homogenized1D(K=med.K_bar, rho=med.rho_bar, law=law)

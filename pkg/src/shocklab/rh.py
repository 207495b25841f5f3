"""Shock-speed prediction from jump conditions on the homogenized system.

Jumps use the convention [q] = q_left - q_right.  Applying the jump
conditions to the homogenized 1D system gives

    s[eps] = -[u],        rho_bar * s * [u] = -[sigma_bar],

hence the predicted speed

    s_eff = +/- sqrt([sigma_bar] / (rho_bar * [eps]))

(plus sign for right-going shocks) and the two-state connection
[u] = -sqrt([sigma_bar][eps]/rho_bar).  Strains are recovered from the
homogenized stress law, eps = sigma_hat^{-1}(sigma) / K_bar.

Also provided: the transverse-propagation speed built from pointwise
chord-slope averages, and the harmonic/arithmetic downstream sound-speed
thresholds used to decide whether a front can persist as a viscous shock.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateShockError, NonPhysicalJumpError
from .homogenize import EffectiveMedium, average_over_period, effective_parameters
from .media import (ConstitutiveLaw, MediumSpec, material_along_xi,
                    sigma_hat_inverse, sound_speed)

_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class ShockSetup:
    """A single jump: states on both sides plus the predicted speed."""

    sigma_l: float
    sigma_r: float
    u_l: float
    u_r: float
    eps_l: float
    eps_r: float
    s_eff: float
    med: EffectiveMedium

    def residuals(self) -> tuple[float, float]:
        """(s[eps] + [u], rho_bar s [u] + [sigma]); both vanish on a shock."""
        d_eps = self.eps_l - self.eps_r
        d_u = self.u_l - self.u_r
        d_sig = self.sigma_l - self.sigma_r
        return (self.s_eff * d_eps + d_u,
                self.med.rho_bar * self.s_eff * d_u + d_sig)


def _jumps(sigma_l: float, sigma_r: float, law: ConstitutiveLaw,
           med: EffectiveMedium) -> tuple[float, float, float, float]:
    if sigma_l == sigma_r:
        raise DegenerateShockError("sigma_l == sigma_r: no jump")
    eps_l = sigma_hat_inverse(law, sigma_l) / med.K_bar
    eps_r = sigma_hat_inverse(law, sigma_r) / med.K_bar
    d_sig = sigma_l - sigma_r
    d_eps = eps_l - eps_r
    if d_eps == 0.0 or d_sig / d_eps <= 0.0:
        raise NonPhysicalJumpError(
            f"[sigma]/[eps] must be positive (got sigma jump {d_sig}, "
            f"strain jump {d_eps})"
        )
    return eps_l, eps_r, d_sig, d_eps


def effective_shock_speed(sigma_l: float, sigma_r: float,
                          law: ConstitutiveLaw, med: EffectiveMedium,
                          direction: str = "right") -> float:
    """Predicted shock speed; sign set by ``direction`` (left/right)."""
    if direction not in ("left", "right"):
        raise ValueError("direction must be 'left' or 'right'")
    _, _, d_sig, d_eps = _jumps(sigma_l, sigma_r, law, med)
    s = math.sqrt(d_sig / (med.rho_bar * d_eps))
    return s if direction == "right" else -s


def connect_right_going(sigma_l: float, sigma_r: float, u_r: float,
                        law: ConstitutiveLaw,
                        med: EffectiveMedium) -> ShockSetup:
    """States joined by a right-going shock with prescribed stresses."""
    eps_l, eps_r, d_sig, d_eps = _jumps(sigma_l, sigma_r, law, med)
    u_l = u_r - math.sqrt(d_sig * d_eps / med.rho_bar)
    setup = ShockSetup(
        sigma_l=sigma_l, sigma_r=sigma_r, u_l=u_l, u_r=u_r,
        eps_l=eps_l, eps_r=eps_r,
        s_eff=math.sqrt(d_sig / (med.rho_bar * d_eps)),
        med=med,
    )
    r1, r2 = setup.residuals()
    scale = max(1.0, abs(d_sig), abs(d_eps))
    if abs(r1) > _RESIDUAL_TOL * scale or abs(r2) > _RESIDUAL_TOL * scale:
        raise AssertionError(f"jump-condition residuals too large: {r1}, {r2}")
    return setup


def legacy_transverse_speed(spec: MediumSpec, law: ConstitutiveLaw,
                            sigma_l: float, sigma_r: float) -> float:
    """Transverse-propagation speed from pointwise chord-slope averaging.

    The local chord slope [sigma]/[eps](xi) is averaged harmonically over
    one period and combined with the mean density:
    s = sqrt(harmonic_avg(chord) / rho_m).
    """
    if sigma_l == sigma_r:
        raise DegenerateShockError("sigma_l == sigma_r: no jump")
    d_w = sigma_hat_inverse(law, sigma_l) - sigma_hat_inverse(law, sigma_r)
    d_sig = sigma_l - sigma_r
    if d_w == 0.0 or d_sig / d_w <= 0.0:
        raise NonPhysicalJumpError("chord slope must be positive")

    def inv_chord(xi):
        K, _ = material_along_xi(spec, xi)
        return d_w / (d_sig * K)

    chord_h = 1.0 / average_over_period(inv_chord, spec)
    rho_m = average_over_period(lambda xi: material_along_xi(spec, xi)[1], spec)
    return math.sqrt(chord_h / rho_m)


def _local_downstream_speed(spec: MediumSpec, law: ConstitutiveLaw,
                            sigma_r: float):
    w_r = sigma_hat_inverse(law, sigma_r)

    def c(xi):
        K, rho = material_along_xi(spec, xi)
        return np.asarray(sound_speed(law, K, rho, w_r / K))

    return c


def threshold_ch(spec: MediumSpec, law: ConstitutiveLaw,
                 sigma_r: float) -> float:
    """Harmonic period-average of the downstream sound speed."""
    c = _local_downstream_speed(spec, law, sigma_r)
    return 1.0 / average_over_period(lambda xi: 1.0 / c(xi), spec)


def threshold_cm(spec: MediumSpec, law: ConstitutiveLaw, sigma_r: float,
                 literal: bool = False) -> float:
    """Arithmetic period-average of the downstream sound speed.

    With ``literal=True`` returns the mean of c^2 instead (the squared-speed
    variant); the plain mean of c is the canonical threshold.
    """
    c = _local_downstream_speed(spec, law, sigma_r)
    if literal:
        return average_over_period(lambda xi: c(xi) ** 2, spec)
    return average_over_period(c, spec)


def sigma_l_for_speed(target_speed: float, sigma_r: float,
                      law: ConstitutiveLaw, med: EffectiveMedium,
                      sigma_hi: float = 64.0) -> float:
    """Upstream stress giving a right-going shock of the requested speed.

    The speed is monotone in sigma_l for the convex laws used here, so a
    bracketed root search suffices.  Raises if the target is at or below
    the small-jump (characteristic) limit.
    """

    def gap(sig_l: float) -> float:
        return effective_shock_speed(sig_l, sigma_r, law, med) - target_speed

    lo = sigma_r + 1e-9 * max(1.0, abs(sigma_r))
    if gap(lo) >= 0.0:
        raise NonPhysicalJumpError(
            f"target speed {target_speed} is not above the characteristic "
            "speed at sigma_r; no compressive shock reaches it"
        )
    hi = max(sigma_r + 1.0, 1.0)
    for _ in range(60):
        if hi >= sigma_hi or gap(hi) > 0.0:
            break
        hi = min(2.0 * hi, sigma_hi)
    if gap(hi) <= 0.0:
        raise NonPhysicalJumpError(
            f"target speed {target_speed} not reachable with sigma_l <= {sigma_hi}"
        )
    return float(brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14))


def predict_speeds(spec: MediumSpec, law: ConstitutiveLaw, sigma_l: float,
                   sigma_r: float, u_r: float = 0.0) -> dict:
    """One-stop prediction summary used by the CLI and the harness."""
    med = effective_parameters(spec)
    setup = connect_right_going(sigma_l, sigma_r, u_r, law, med)
    return {
        "s_eff": setup.s_eff,
        "u_l": setup.u_l,
        "eps_l": setup.eps_l,
        "eps_r": setup.eps_r,
        "c_h": threshold_ch(spec, law, sigma_r),
        "c_m": threshold_cm(spec, law, sigma_r),
        "c_eff": med.c_eff,
        "K_bar": med.K_bar,
        "rho_bar": med.rho_bar,
    }

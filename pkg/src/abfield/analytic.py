"""Closed-form phases, shifts and fluxes for the electric and magnetic setups.

Sign convention used throughout the package: the relative phase between the
two branches is ``arg <Psi_L|Psi_R>`` under ``exp(-iHt/hbar)``.  A constant
potential-energy difference ``V_L - V_R`` held for a time ``T`` therefore gives
``(V_L - V_R) T / hbar``; with ``V_L = -2 e Q / r`` this is the electric phase
below, sign included.  ``e`` is always a positive magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy import integrate

from .units import Constants, ElectricSetup, MagneticSetup

RESIDUAL_FLOOR = 1e-300


class QuadratureError(RuntimeError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class ConsistencyReport:
    phi_ab: float
    delta_x: float
    delta_v: float
    lambda_: float
    phi_from_shift: float
    flux: Optional[float]
    relative_residual: float

    def as_dict(self) -> dict:
        return {
            "phi_ab": self.phi_ab,
            "delta_x": self.delta_x,
            "delta_v": self.delta_v,
            "lambda": self.lambda_,
            "phi_from_shift": self.phi_from_shift,
            "flux": self.flux,
            "relative_residual": self.relative_residual,
        }


def de_broglie_wavelength(M: float, v: float, k: Constants = None) -> float:
    """Return ``h / (M v)``; natural units (h = 2 pi) when no constants are given."""
    if not (M > 0 and v > 0):
        raise ValueError("de Broglie wavelength needs M > 0 and v > 0")
    h = 2 * math.pi if k is None else k.h_planck
    return h / (M * v)


def electric_ab_phase(s: ElectricSetup, k: Constants) -> float:
    return -2 * k.e_charge * s.Q * s.T / (s.r * k.hbar)


def electric_source_shift(s: ElectricSetup, k: Constants) -> tuple[float, float]:
    """Velocity change and accumulated shift of one source charge during its dwell.

    From the energy balance ``-eQ/r = delta(M v^2 / 2) ~ M v delta_v``.
    """
    delta_v = -k.e_charge * s.Q / (s.M * s.v * s.r)
    return delta_v, delta_v * s.T


def phase_from_shifts(delta_x: float, lam: float, multiplicity: int) -> float:
    """Phase carried by ``multiplicity`` equal wavepacket shifts.

    ``multiplicity`` is 2 for the electric geometry (two charges, same shift)
    and 4 for the magnetic one (two cylinders, opposite shifts in both branches).
    """
    if not lam > 0:
        raise ValueError("wavelength must be > 0")
    if multiplicity not in (2, 4):
        raise ValueError("multiplicity must be 2 (electric) or 4 (magnetic)")
    return multiplicity * (delta_x / lam) * 2 * math.pi


def solenoid_flux(s: MagneticSetup, k: Constants) -> float:
    return 4 * math.pi * s.Q * s.v * s.r / (k.c_light * s.L)


def magnetic_ab_phase(s: MagneticSetup, k: Constants) -> float:
    return k.e_charge * solenoid_flux(s, k) / (k.c_light * k.hbar)


def magnetic_ab_phase_expanded(s: MagneticSetup, k: Constants) -> float:
    return 4 * math.pi * k.e_charge * s.Q * s.v * s.r / (k.c_light**2 * s.L * k.hbar)


def electron_flux_profile(z, s: MagneticSetup, k: Constants):
    """Flux of the orbiting electron's field through the solenoid cross-section at height z."""
    return (math.pi * s.r**2 * k.e_charge * s.u * s.R
            / (k.c_light * (s.R**2 + z**2) ** 1.5))


def cylinder_velocity_kick_closed(s: MagneticSetup, k: Constants) -> float:
    """Long-cylinder limit of the surface velocity kick."""
    return s.u * s.Q * k.e_charge * s.r / (k.c_light**2 * s.M * s.R * s.L)


def _kick_integrand(z, s, k):
    # impulse per unit length from a slice: Phi(z) dQ / (c 2 pi r), divided by M
    return electron_flux_profile(z, s, k) / k.c_light / (2 * math.pi * s.r) * (s.Q / s.L) / s.M


def cylinder_velocity_kick_quadrature(s: MagneticSetup, k: Constants, tol: float = 1e-10) -> float:
    """Surface velocity kick integrated over the finite cylinder length.

    Adaptive Gauss-Kronrod (QUADPACK) over ``[0, L/2]``, doubled by symmetry.
    """
    if not 0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    value, err = integrate.quad(_kick_integrand, 0.0, s.L / 2, args=(s, k),
                                epsrel=tol, epsabs=0.0, points=[s.R], limit=200)
    if err > tol * abs(value):
        raise QuadratureError("velocity-kick quadrature did not converge", err / abs(value))
    return 2 * value


def cylinder_shift(s: MagneticSetup, k: Constants) -> float:
    return cylinder_velocity_kick_closed(s, k) * math.pi * s.R / s.u


def consistency_report(s, k: Constants) -> ConsistencyReport:
    """Evaluate the phase, the source shift, and the shift-to-phase identity residual."""
    if isinstance(s, ElectricSetup):
        phi = electric_ab_phase(s, k)
        dv, dx = electric_source_shift(s, k)
        multiplicity, flux = 2, None
    elif isinstance(s, MagneticSetup):
        phi = magnetic_ab_phase(s, k)
        dv = cylinder_velocity_kick_closed(s, k)
        dx = cylinder_shift(s, k)
        multiplicity, flux = 4, solenoid_flux(s, k)
    else:
        raise TypeError(f"no consistency report for {type(s).__name__}")
    lam = de_broglie_wavelength(s.M, s.v, k)
    from_shift = phase_from_shifts(dx, lam, multiplicity)
    residual = abs(from_shift - phi) / max(abs(phi), RESIDUAL_FLOOR)
    return ConsistencyReport(phi, dx, dv, lam, from_shift, flux, residual)

"""Mirror potential with a long-dwell plateau, and the classical dwell time on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .units import ConfigError

WALL_CAP = 1e6


def smoothstep(t):
    """Quintic 6t^5 - 15t^4 + 10t^3 clipped to [0, 1]; C2 at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6 * t - 15) + 10)


@dataclass(frozen=True)
class MirrorSpec:
    V: float
    d: float
    w: float
    wall_scale: float

    def __post_init__(self):
        if not (self.V > 0 and self.d > 0):
            raise ConfigError("mirror: V and d must be > 0")
        if not 0 < self.w <= self.d / 4:
            raise ConfigError("mirror.w: must satisfy 0 < w <= d/4")
        if not 0 < self.wall_scale <= self.d / 10:
            raise ConfigError("mirror.wall_scale: must satisfy 0 < wall_scale <= d/10")

    @property
    def wall_blend(self):
        """Interval over which the inner-wall excess fades into the plateau."""
        return 2 * self.wall_scale, 4 * self.wall_scale


def plateau_window(x, m: MirrorSpec):
    """1 on the plateau, quintic fall-off to 0 across [d - w, d + w]."""
    return 1.0 - smoothstep((np.asarray(x, dtype=float) - (m.d - m.w)) / (2 * m.w))


def mirror_potential(x, m: MirrorSpec):
    """Potential energy at distance ``x`` from the mirror surface.

    Finite cap ``1e6 V`` at and behind the surface so spectral propagation stays bounded.
    """
    x = np.asarray(x, dtype=float)
    cap = WALL_CAP * m.V
    a, b = m.wall_blend
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = m.V * (m.wall_scale / x) ** 2
    excess = excess * (1.0 - smoothstep((x - a) / (b - a)))
    out = m.V * plateau_window(x, m) + np.where(x > 0, excess, 0.0)
    out = np.where(x > 0, np.minimum(out, cap), cap)
    return out if out.ndim else float(out)


def classical_dwell_time(m: MirrorSpec, E: float, mass: float) -> float:
    """Round-trip time spent between the inner turning point and ``d + w``.

    Raises ``ValueError`` when ``E <= V``: at ``E == V`` the time diverges, below
    it the particle turns around in the outer blend and never reaches the plateau.
    For ``E/V - 1`` below about 1e-6 the cancellation in ``E - U`` limits the
    accuracy and scipy may emit an ``IntegrationWarning``.
    """
    if E == m.V:
        raise ValueError("dwell time diverges at E == V (zero speed on the plateau)")
    if E < m.V:
        raise ValueError("E < V: particle reflects before the plateau, plateau dwell time is zero")
    a, b = m.wall_blend
    # the wall term is strictly decreasing on (0, b]; E > V so a root exists there
    x_turn = optimize.brentq(lambda x: mirror_potential(x, m) - E, 1e-12 * m.wall_scale, b,
                             xtol=1e-15 * m.d, rtol=4 * np.finfo(float).eps)

    def speed(x):
        return math.sqrt(max(2 * (E - mirror_potential(x, m)) / mass, 0.0))

    # x = x_turn + s^2 removes the inverse-square-root endpoint singularity
    limit = 2 / math.sqrt(-2 * _slope(m, x_turn) / mass)

    def near(s):
        # below ~1e-6 of the wall scale rounding swamps E - U; use the s -> 0 limit
        if s * s < 1e-6 * m.wall_scale:
            return limit
        v = speed(x_turn + s * s)
        return 2 * s / v if v > 0 else limit

    s_hi = math.sqrt(b - x_turn)
    t2, _ = integrate.quad(lambda x: 1.0 / speed(x), b, m.d + m.w,
                           points=[m.d - m.w], epsrel=1e-11, limit=200)
    # close to E = V the plateau term dominates; an absolute target tied to it
    # keeps the sharply peaked blend segment from chasing roundoff
    # the integrand peaks where the faded wall meets the plateau; seed breakpoints there
    marks = [b - (b - a) * 10.0**-k for k in range(1, 7)]
    breaks = [math.sqrt(x - x_turn) for x in marks if x > x_turn]
    t1, _ = integrate.quad(near, 0.0, s_hi, epsrel=1e-10, epsabs=1e-11 * t2, limit=400,
                           points=breaks or None)
    return 2 * (t1 + t2)


def _slope(m, x, h=None):
    h = h or 1e-6 * m.wall_scale
    return (mirror_potential(x + h, m) - mirror_potential(x - h, m)) / (2 * h)

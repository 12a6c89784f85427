"""Split-operator spectral propagation of a 1D wavefunction (hbar = 1).

Strang splitting ``exp(-iV dt/2) exp(-iK dt) exp(-iV dt/2)`` on a periodic
uniform grid, with the kinetic factor applied in Fourier space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy import fft

HBAR = 1.0

Potential = Callable[[np.ndarray, float], np.ndarray]


class GridError(ValueError):
    pass


class BoundaryError(RuntimeError):
    """Probability reached the edge of the periodic grid."""


class Grid:
    def __init__(self, n: int, x_min: float, x_max: float):
        if n < 2 or n & (n - 1):
            raise GridError("grid point count must be a power of two")
        if not x_max > x_min:
            raise GridError("x_max must exceed x_min")
        self.n = n
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.dx = (self.x_max - self.x_min) / n
        self.x = self.x_min + self.dx * np.arange(n)
        self.k_values = 2 * np.pi * fft.fftfreq(n, d=self.dx)

    @classmethod
    def centered(cls, n, extent):
        return cls(n, -extent / 2, extent / 2)

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.n == other.n
                and self.x_min == other.x_min and self.x_max == other.x_max)

    def __hash__(self):
        return hash((self.n, self.x_min, self.x_max))

    def __repr__(self):
        return f"Grid(n={self.n}, x_min={self.x_min}, x_max={self.x_max})"


@dataclass(frozen=True, eq=False)
class GridState:
    grid: Grid
    psi: np.ndarray
    t: float = 0.0
    mass: float = 1.0

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)


class Moments(NamedTuple):
    mean_x: float
    mean_p: float
    std_x: float
    std_p: float
    mean_E: float


def init_gaussian(grid: Grid, x0: float, p0: float, sigma: float, mass: float = 1.0) -> GridState:
    """Minimum-uncertainty Gaussian with position spread ``sigma``."""
    if sigma < 4 * grid.dx:
        raise GridError(f"sigma={sigma:g} below resolution limit 4*dx={4 * grid.dx:g}")
    if x0 - 6 * sigma < grid.x_min or x0 + 6 * sigma > grid.x_max:
        raise GridError("wavepacket needs a 6 sigma margin inside the grid")
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * p0 * x / HBAR)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return GridState(grid, psi, 0.0, mass)


def _kinetic_phase(grid, mass, dt):
    return np.exp(-1j * HBAR * grid.k_values**2 / (2 * mass) * dt)


def step(state: GridState, potential: Potential, dt: float, _kin=None) -> GridState:
    """One Strang step; ``potential(x, t)`` is sampled at the step midpoint."""
    kin = _kinetic_phase(state.grid, state.mass, dt) if _kin is None else _kin
    half = np.exp(-0.5j * dt / HBAR * potential(state.grid.x, state.t + dt / 2))
    psi = half * fft.ifft(kin * fft.fft(half * state.psi))
    return GridState(state.grid, psi, state.t + dt, state.mass)


class Stepper:
    """Reusable stepper that caches the kinetic factor for a fixed ``dt``."""

    def __init__(self, grid: Grid, mass: float, dt: float):
        self.dt = dt
        self.kin = _kinetic_phase(grid, mass, dt)

    def __call__(self, state, potential):
        return step(state, potential, self.dt, self.kin)


def n_steps(t_span: float, dt: float) -> int:
    n = round(t_span / abs(dt))
    if abs(n * abs(dt) - t_span) > 1e-9 * max(t_span, abs(dt)):
        raise ValueError("time span must be an integer multiple of dt")
    return n


def evolve(state: GridState, potential: Potential, t_final: float, dt: float) -> GridState:
    """Step from ``state.t`` to ``t_final``; a negative ``dt`` runs backwards."""
    steps = n_steps(abs(t_final - state.t), dt)
    stepper = Stepper(state.grid, state.mass, dt)
    for _ in range(steps):
        state = stepper(state, potential)
    return replace(state, t=t_final)


def overlap(a: GridState, b: GridState) -> complex:
    """``<a|b>`` on a shared grid."""
    if a.grid != b.grid:
        raise GridError("overlap requires states on the same grid")
    return complex(np.vdot(a.psi, b.psi) * a.grid.dx)


def moments(state: GridState, potential: Potential = None) -> Moments:
    """Position/momentum means and spreads plus the mean energy.

    Momentum statistics come from the discrete Fourier spectrum, so they are
    exact for band-limited states.  Without a potential the energy is kinetic only.
    """
    g = state.grid
    rho = np.abs(state.psi) ** 2 * g.dx
    norm = rho.sum()
    mean_x = float(np.dot(rho, g.x) / norm)
    var_x = float(np.dot(rho, (g.x - mean_x) ** 2) / norm)
    phi = fft.fft(state.psi)
    w = np.abs(phi) ** 2
    w /= w.sum()
    p = HBAR * g.k_values
    mean_p = float(np.dot(w, p))
    var_p = float(np.dot(w, (p - mean_p) ** 2))
    energy = float(np.dot(w, p**2)) / (2 * state.mass)
    if potential is not None:
        energy += float(np.dot(rho, potential(g.x, state.t)) / norm)
    return Moments(mean_x, mean_p, math.sqrt(var_x), math.sqrt(var_p), energy)


def kick(state: GridState, dp: float) -> GridState:
    return replace(state, psi=state.psi * np.exp(1j * dp * state.grid.x / HBAR))


def displace(state: GridState, dx: float) -> GridState:
    """Translate by ``dx`` exactly via the Fourier shift theorem."""
    phi = fft.fft(state.psi) * np.exp(-1j * state.grid.k_values * dx)
    return replace(state, psi=fft.ifft(phi))


def edge_probability(state: GridState, width: float) -> float:
    """Probability within ``width`` of either end of the grid."""
    g = state.grid
    near = (g.x - g.x_min < width) | (g.x_max - g.x < width)
    return float(np.sum(np.abs(state.psi[near]) ** 2) * g.dx)

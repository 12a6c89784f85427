"""Two-branch evolution of a source wavepacket and the interference observables.

The electron is a classical source of potentials: in branch L it sits in the
left arm, in branch R in the right arm.  Each branch evolves its own copy of
the source state; the electron's interference depends on the overlap
``c = <Psi_L|Psi_R>`` alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .propagator import (HBAR, BoundaryError, GridState, Moments, Potential, Stepper,
                         edge_probability, kick, moments, n_steps, overlap)

VISIBILITY_TOL = 1e-10
PHASE_FLOOR = 1e-3


class PhaseSamplingError(RuntimeError):
    """Consecutive samples moved the relative phase by more than pi/2."""


@dataclass(frozen=True)
class BranchResult:
    times: np.ndarray
    overlap: np.ndarray
    visibility: np.ndarray
    rel_phase: np.ndarray
    entropy: np.ndarray
    moments_L: list
    moments_R: list
    final_overlap: complex
    final_L: GridState = field(repr=False)
    final_R: GridState = field(repr=False)
    phase_gaps: bool = False

    @property
    def final_phase(self) -> float:
        """Unwrapped relative phase at the end of the run."""
        last = self.rel_phase[-1]
        delta = (np.angle(self.final_overlap) - last + np.pi) % (2 * np.pi) - np.pi
        return float(last + delta)


def detector_probabilities(c: complex) -> tuple[float, float]:
    """Port probabilities (A, B) for a tuned interferometer with source overlap ``c``."""
    if abs(c) > 1 + 1e-6:
        raise ValueError(f"|overlap| = {abs(c):.12g} exceeds 1; upstream numerical fault")
    p_a = (1 - c.real) / 2
    return p_a, 1 - p_a


def entanglement_entropy(c: complex) -> float:
    """Von Neumann entropy (nats) of the electron's reduced state."""
    a = min(abs(c), 1.0)
    s = 0.0
    for lam in ((1 + a) / 2, (1 - a) / 2):
        if lam > 0:
            s -= lam * math.log(lam)
    return s


def gaussian_visibility_model(delta_x: float, delta_p: float, sigma: float) -> float:
    """|overlap| of two equal-width minimum-uncertainty Gaussians offset by (delta_x, delta_p)."""
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return math.exp(-delta_x**2 / (8 * sigma**2) - delta_p**2 * sigma**2 / (2 * HBAR**2))


def _unwrap(phases, vis):
    out = np.empty_like(phases)
    gaps = False
    out[0] = phases[0]
    for i in range(1, len(phases)):
        delta = (phases[i] - phases[i - 1] + np.pi) % (2 * np.pi) - np.pi
        if vis[i] > PHASE_FLOOR and vis[i - 1] > PHASE_FLOOR:
            if abs(delta) >= np.pi / 2:
                raise PhaseSamplingError(
                    f"relative phase moved {delta:.3f} rad between samples {i - 1} and {i}; "
                    "sample more often")
        else:
            gaps = True
        out[i] = out[i - 1] + delta
    return out, gaps


def run_branches(
    initial: GridState,
    V_L: Potential,
    V_R: Potential,
    t_final: float,
    dt: float,
    sample_every: int = 1,
    kicks_L: Sequence[tuple[float, float]] = (),
    kicks_R: Sequence[tuple[float, float]] = (),
    edge_width: Optional[float] = None,
    edge_tol: float = 1e-12,
) -> BranchResult:
    """Evolve two copies of ``initial`` under ``V_L`` and ``V_R``.

    ``kicks_*`` are instantaneous impulses ``(time, dp)``; each fires at the first
    step boundary at or after its time.  When ``edge_width`` is given, any sample
    with more than ``edge_tol`` probability that close to the grid edge raises
    :class:`BoundaryError`.
    """
    steps = n_steps(t_final - initial.t, dt)
    stepper = Stepper(initial.grid, initial.mass, dt)
    pending_L = sorted(kicks_L)
    pending_R = sorted(kicks_R)
    a = b = initial

    times, cs, mL, mR = [], [], [], []

    def apply(state, pending):
        while pending and pending[0][0] <= state.t + 1e-9 * abs(dt):
            state = kick(state, pending.pop(0)[1])
        return state

    def sample(a, b):
        if edge_width is not None:
            for s in (a, b):
                if edge_probability(s, edge_width) > edge_tol:
                    raise BoundaryError(f"probability reached the grid edge at t={s.t:g}")
        times.append(a.t)
        cs.append(overlap(a, b))
        mL.append(moments(a, V_L))
        mR.append(moments(b, V_R))

    for i in range(steps):
        a = apply(a, pending_L)
        b = apply(b, pending_R)
        if i % sample_every == 0:
            sample(a, b)
        a = stepper(a, V_L)
        b = stepper(b, V_R)
    a = apply(a, pending_L)
    b = apply(b, pending_R)
    if steps % sample_every == 0:
        sample(a, b)

    c = np.array(cs)
    vis = np.abs(c)
    if np.any(vis > 1 + VISIBILITY_TOL):
        raise RuntimeError("visibility exceeded 1; states are not normalized")
    rel, gaps = _unwrap(np.angle(c), vis)
    entropy = np.array([entanglement_entropy(z) for z in c])
    return BranchResult(np.array(times), c, vis, rel, entropy, mL, mR,
                        overlap(a, b), a, b, gaps)

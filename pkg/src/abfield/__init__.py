"""Aharonov-Bohm phases as wavepacket shifts of the field source.

Closed-form phases and shifts for the electric and magnetic setups, a
split-operator propagator, two-branch interference, and end-to-end scenarios.
"""

from importlib import resources

from .analytic import (ConsistencyReport, consistency_report, cylinder_shift,
                       cylinder_velocity_kick_closed, cylinder_velocity_kick_quadrature,
                       de_broglie_wavelength, electric_ab_phase, electric_source_shift,
                       electron_flux_profile, magnetic_ab_phase, phase_from_shifts,
                       solenoid_flux)
from .branches import (BranchResult, detector_probabilities, entanglement_entropy,
                       gaussian_visibility_model, run_branches)
from .mirror import MirrorSpec, classical_dwell_time, mirror_potential
from .propagator import (Grid, GridState, displace, evolve, init_gaussian, kick, moments,
                         overlap, step)
from .scenarios import (ChargeConfiguration, ScenarioReport, coulomb_field_at,
                        decoherence_sweep, electric_scenario, magnetic_scenario,
                        triggered_null_scenario)
from .units import (ConfigError, Constants, ElectricSetup, MagneticSetup, ScalingMap,
                    SimulationConfig, load_config, to_natural_units, to_physical_units)

__version__ = "0.1.0"


def default_config(name: str) -> SimulationConfig:
    """Load one of the bundled configs: electric, magnetic, decoherence, null_check."""
    text = resources.files(__name__).joinpath("configs", f"{name}.json").read_text()
    return load_config(text)

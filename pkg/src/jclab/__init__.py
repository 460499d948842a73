"""Dissipative atom-field dynamics: closed forms, a Fock-space oracle, and derived metrics."""
from .dynamics import ScalarProfile, SystemParams, characteristic_function, scalar_profile
from .errors import (ConfigError, DegenerateBasis, ExcessLeakage, JCLabError, NonPhysicalState,
                     NoViolation, StepFailure, TruncationTooSmall)
from .metrics import (BellSettings, bell_death_time, bell_expectation, bell_max, concurrence,
                      entanglement_of_formation, linear_entropy)
from .oracle import evolve_lindblad, lindblad_trajectory, project_to_qubit
from .states import QubitDensity, TwoQubitState, joint_state, reduced_states
from .teleportation import BlochAngles, one_qubit_report, two_qubit_report

__version__ = "0.1.0"

__all__ = [
    "BellSettings", "BlochAngles", "ConfigError", "DegenerateBasis", "ExcessLeakage", "JCLabError",
    "NoViolation", "NonPhysicalState", "QubitDensity", "ScalarProfile", "StepFailure", "SystemParams",
    "TruncationTooSmall", "TwoQubitState", "bell_death_time", "bell_expectation", "bell_max",
    "characteristic_function", "concurrence", "entanglement_of_formation", "evolve_lindblad",
    "joint_state", "lindblad_trajectory", "linear_entropy", "one_qubit_report", "project_to_qubit",
    "reduced_states", "scalar_profile", "two_qubit_report",
]

"""Accelerated adiabatic entangling of two resonator-coupled qubits.

Desk-scale simulator for the avoided-crossing entangling protocol: adiabatic
sweep catalog, counterdiabatic field computation, oscillating-control
synthesis, closed- and open-system propagation, and robustness studies.
"""

__version__ = "0.1.0"

from ._kernels import backend_name
from .controls import (
    ControlSignals,
    ECDConfig,
    PerturbationSample,
    build_control_signals,
    resolve_omega,
)
from .model import SystemParams, dispersive_estimates, minimal_gap
from .propagate import (
    DensityMatrix,
    NoiseRates,
    PureState,
    fidelity_mixed,
    infidelity,
    initial_state,
    propagate_lindblad,
    propagate_unitary,
    target_state,
)
from .spectral import build_cd_profile, cd_field, eigen_frames, partial_cd
from .sweeps import SweepSpec, eval_sweep, eval_sweep_derivative

__all__ = [
    "ControlSignals",
    "DensityMatrix",
    "ECDConfig",
    "NoiseRates",
    "PerturbationSample",
    "PureState",
    "SweepSpec",
    "SystemParams",
    "backend_name",
    "build_cd_profile",
    "build_control_signals",
    "cd_field",
    "dispersive_estimates",
    "eigen_frames",
    "eval_sweep",
    "eval_sweep_derivative",
    "fidelity_mixed",
    "infidelity",
    "initial_state",
    "minimal_gap",
    "partial_cd",
    "propagate_lindblad",
    "propagate_unitary",
    "resolve_omega",
    "target_state",
]

"""Analytical model and OFDM simulator for retro-reflective resonant-beam links."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    InvalidArgumentError,
    NoLinkError,
    RbcomError,
    SingularConfigurationError,
    UnstableResonatorError,
)
from .link_budget import DetectorSpec, LinkBudget, capacity, received_power
from .ofdm_sim import BerReport, OfdmConfig, run_link
from .pipeline import LinkResult, evaluate, run_figure, run_ofdm, run_sweep
from .power_chain import (
    EfficiencyChain,
    GainMediumSpec,
    LossBudget,
    ShgCrystalSpec,
    fundamental_beam_power,
)
from .resonator_modes import ResonatorGeometry, Stability, classify_stability
from .scenario import Scenario, SweepSpec, load_scenario, parse_scenario

__all__ = [
    "__version__",
    "BerReport", "ConfigError", "DetectorSpec", "EfficiencyChain", "GainMediumSpec",
    "InvalidArgumentError", "LinkBudget", "LinkResult", "LossBudget", "NoLinkError",
    "OfdmConfig", "RbcomError", "ResonatorGeometry", "Scenario", "ShgCrystalSpec",
    "SingularConfigurationError", "Stability", "SweepSpec", "UnstableResonatorError",
    "capacity", "classify_stability", "evaluate", "fundamental_beam_power", "load_scenario",
    "parse_scenario", "received_power", "run_figure", "run_link", "run_ofdm", "run_sweep",
]

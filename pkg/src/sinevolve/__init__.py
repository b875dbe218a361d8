"""Decompose sampled series into time-windowed sinusoids with a binary GA."""

from .decomposition import (
    ComponentSpecs,
    CountProfile,
    DecompositionResult,
    decompose_adaptive,
    decompose_fixed,
    default_window_penalty,
    profile_to_windows,
    windows_to_profile,
)
from .encoding import (
    ChromosomeLayout,
    ParameterSpec,
    bit_count,
    decode_components,
    encode_components,
    fixed_window_layout,
    sinusoid_layout,
)
from .ga import ConvergenceTrace, GAConfig, Individual, TraceEntry, evolve, run
from .signal_model import (
    Grid,
    InstantaneousProfile,
    SinusoidalComponent,
    TimeSeries,
    fitness,
    instantaneous_profile,
    normalize_phase,
    residual,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "ChromosomeLayout",
    "ComponentSpecs",
    "ConvergenceTrace",
    "CountProfile",
    "DecompositionResult",
    "GAConfig",
    "Grid",
    "Individual",
    "InstantaneousProfile",
    "ParameterSpec",
    "SinusoidalComponent",
    "TimeSeries",
    "TraceEntry",
    "bit_count",
    "decode_components",
    "decompose_adaptive",
    "decompose_fixed",
    "default_window_penalty",
    "encode_components",
    "evolve",
    "fitness",
    "fixed_window_layout",
    "instantaneous_profile",
    "normalize_phase",
    "profile_to_windows",
    "residual",
    "run",
    "sinusoid_layout",
    "synthesize",
    "windows_to_profile",
]

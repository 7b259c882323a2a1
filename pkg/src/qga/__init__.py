"""Gate-based quantum genetic algorithm with a statevector simulator."""

from __future__ import annotations

from .config import ConfigError, EvolutionConfig, RunSettings, load_config
from .encoding import EncodingSpec, VariableDomain
from .evolution import EvolutionResult, run_evolution
from .fitness import FitnessRecord, get_objective
from .gateset import Gate, GateSet
from .genome import CircuitGenome, Instruction, Layer
from .simulator import BACKEND, output_distribution, run_circuit

__all__ = [
    "BACKEND",
    "CircuitGenome",
    "ConfigError",
    "EncodingSpec",
    "EvolutionConfig",
    "EvolutionResult",
    "FitnessRecord",
    "Gate",
    "GateSet",
    "Instruction",
    "Layer",
    "RunSettings",
    "VariableDomain",
    "get_objective",
    "load_config",
    "output_distribution",
    "run_circuit",
    "run_evolution",
]

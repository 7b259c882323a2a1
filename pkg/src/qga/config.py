"""Run configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from .gateset import GateSet


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class EvolutionConfig:
    qubits_per_variable: int = 8
    depth_mode: str = "fixed"          # fixed | variable
    depth: int = 4
    d_min: int = 1
    d_max: int = 10
    mutation_rate: float = 0.3
    crossover_rate: float = 0.7
    elite_fraction: float = 0.2
    shots: int = 1024
    max_generations: int = 50
    population_size: int = 50
    gate_set: GateSet = GateSet.QUANTUM
    depth_mutation_rate: float = 0.1
    fitness_mode: str = "sampled"      # sampled | exact
    entanglement: str = "none"         # none | pairwise | product
    pairing: str = "per-generation"    # per-generation | fixed
    seed: int = 0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "gate_set", GateSet(self.gate_set))
        except ValueError:
            raise ConfigError("gate_set", f"expected classical or quantum, got {self.gate_set!r}") from None
        self.validate()

    @property
    def variable_depth(self) -> bool:
        return self.depth_mode == "variable"

    def replace(self, **changes) -> EvolutionConfig:
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        for key in ("mutation_rate", "crossover_rate", "depth_mutation_rate"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(key, f"must lie in [0, 1], got {value}")
        if not 0.0 < self.elite_fraction < 1.0:
            raise ConfigError("elite_fraction", f"must lie in (0, 1), got {self.elite_fraction}")
        if self.population_size < 2:
            raise ConfigError("population_size", "must be >= 2")
        if self.qubits_per_variable < 1:
            raise ConfigError("qubits_per_variable", "must be >= 1")
        if self.shots < 1:
            raise ConfigError("shots", "must be >= 1")
        if self.max_generations < 0:
            raise ConfigError("max_generations", "must be >= 0")
        if self.seed < 0:
            raise ConfigError("seed", "must be >= 0")
        if self.depth_mode not in ("fixed", "variable"):
            raise ConfigError("depth_mode", f"expected fixed or variable, got {self.depth_mode!r}")
        if self.depth_mode == "fixed" and self.depth < 1:
            raise ConfigError("depth", "must be >= 1")
        if self.depth_mode == "variable" and not 1 <= self.d_min <= self.d_max:
            raise ConfigError("d_min", f"need 1 <= d_min <= d_max, got [{self.d_min}, {self.d_max}]")
        if self.fitness_mode not in ("sampled", "exact"):
            raise ConfigError("fitness_mode", f"expected sampled or exact, got {self.fitness_mode!r}")
        if self.entanglement not in ("none", "pairwise", "product"):
            raise ConfigError("entanglement", f"expected none, pairwise or product, got {self.entanglement!r}")
        if self.pairing not in ("per-generation", "fixed"):
            raise ConfigError("pairing", f"expected per-generation or fixed, got {self.pairing!r}")
        if self.entanglement != "none" and self.population_size % 2:
            raise ConfigError("population_size", "must be even when entanglement is enabled")


@dataclass(frozen=True)
class RunSettings:
    """Everything in a config file: the evolution config plus experiment keys."""

    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    objective: str = "Rastrigin"
    num_variables: int = 2
    repetitions: int = 1
    output: str = "qga_out"
    timing: bool = False


_EVOLUTION_KEYS = {f.name: f for f in fields(EvolutionConfig)}
_SETTINGS_KEYS = {"objective", "num_variables", "repetitions", "output", "timing"}


def _convert(key: str, raw: str, kind) -> object:
    try:
        if kind in (int, "int"):
            return int(raw)
        if kind in (float, "float"):
            return float(raw)
        if kind in (bool, "bool"):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {getattr(kind, '__name__', kind)}") from None
    return raw


def parse_config_text(text: str, overrides: dict[str, str] | None = None) -> RunSettings:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        values[key] = raw
    values.update(overrides or {})

    evo, settings = {}, {}
    for key, raw in values.items():
        if key in _EVOLUTION_KEYS:
            kind = _EVOLUTION_KEYS[key].type
            evo[key] = raw if key == "gate_set" else _convert(key, raw, kind)
        elif key in _SETTINGS_KEYS:
            kind = {"num_variables": int, "repetitions": int, "timing": bool}.get(key, str)
            settings[key] = _convert(key, raw, kind)
        else:
            raise ConfigError(key, "unknown configuration key")
    if settings.get("repetitions", 1) < 1:
        raise ConfigError("repetitions", "must be >= 1")
    if settings.get("num_variables", 2) < 1:
        raise ConfigError("num_variables", "must be >= 1")
    return RunSettings(evolution=EvolutionConfig(**evo), **settings)


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> RunSettings:
    return parse_config_text(Path(path).read_text(), overrides)


def format_config(settings: RunSettings) -> str:
    lines = [
        f"objective = {settings.objective}",
        f"num_variables = {settings.num_variables}",
        f"repetitions = {settings.repetitions}",
        f"output = {settings.output}",
        f"timing = {str(settings.timing).lower()}",
    ]
    for f in fields(EvolutionConfig):
        lines.append(f"{f.name} = {getattr(settings.evolution, f.name)}")
    return "\n".join(lines) + "\n"

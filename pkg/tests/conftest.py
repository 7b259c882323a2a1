from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qga import simulator
from qga.evolution import random_genome
from qga.gateset import GateSet

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

BACKENDS = ["python"] + (["compiled"] if simulator.compiled_available() else [])


@st.composite
def genomes(draw, max_qubits: int = 5, max_depth: int = 6, gate_set: GateSet = GateSet.QUANTUM):
    q = draw(st.integers(1, max_qubits))
    d = draw(st.integers(1, max_depth))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_genome(q, d, gate_set, np.random.default_rng(seed))


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = simulator.BACKEND
    simulator.set_backend(request.param)
    yield request.param
    simulator.set_backend(previous)


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

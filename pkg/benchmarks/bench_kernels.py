"""Time the compiled and pure-Python gate kernels on the same circuits.

    python benchmarks/bench_kernels.py [--qubits 16] [--repeat 20]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qga import simulator
from qga.evolution import random_genome
from qga.gateset import Gate, GateSet
from qga.genome import Instruction, Layer


def _single_gate_cases(q: int) -> dict[str, Layer]:
    mid = q // 2
    return {
        "H": Layer((Instruction(Gate.H, (mid,)),)),
        "T": Layer((Instruction(Gate.T, (mid,)),)),
        "CNOT": Layer((Instruction(Gate.CNOT, (0, q - 1)),)),
        "Toffoli": Layer((Instruction(Gate.Toffoli, (0, mid, q - 1)),)),
        "Fredkin": Layer((Instruction(Gate.Fredkin, (mid, 0, q - 1)),)),
    }


def bench(backend: str, q: int, repeat: int, genome) -> dict[str, float]:
    simulator.set_backend(backend)
    state = np.zeros(1 << q, dtype=np.complex128)
    state[0] = 1.0
    out = {}
    for name, layer in _single_gate_cases(q).items():
        t = timeit.timeit(lambda: simulator.apply_layer(state, q, layer), number=repeat)
        out[name] = t / repeat * 1e6
    t = timeit.timeit(lambda: simulator.run_circuit(genome), number=max(1, repeat // 4))
    out["circuit"] = t / max(1, repeat // 4) * 1e6
    return out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=16)
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    genome = random_genome(args.qubits, args.depth, GateSet.QUANTUM, np.random.default_rng(1))
    backends = ["python"] + (["compiled"] if simulator.compiled_available() else [])
    results = {b: bench(b, args.qubits, args.repeat, genome) for b in backends}

    print(f"{args.qubits} qubits, random circuit depth {args.depth}; microseconds per call")
    print(f"{'kernel':<10}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name in results["python"]:
        row = f"{name:<10}" + "".join(f"{results[b][name]:>12.1f}" for b in backends)
        if len(backends) == 2:
            row += f"{results['python'][name] / results['compiled'][name]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

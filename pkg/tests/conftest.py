import numpy as np
import pytest

from qca import CaRule, Circuit, Gate, h, mcx, x


@pytest.fixture
def rng():
    return np.random.default_rng(0)


RULE_90 = CaRule.from_wolfram(90)


def random_gate(gen: np.random.Generator, num_qubits: int) -> Gate:
    kind = gen.integers(0, 3 if num_qubits > 1 else 2)
    target = int(gen.integers(0, num_qubits))
    if kind == 0:
        return h(target)
    if kind == 1:
        return x(target)
    n_controls = int(gen.integers(1, min(num_qubits, 4)))
    pool = [q for q in range(num_qubits) if q != target]
    controls = gen.choice(pool, size=n_controls, replace=False)
    return mcx([(int(q), int(gen.integers(0, 2))) for q in controls], target)


def random_circuit(gen: np.random.Generator, num_qubits: int, num_gates: int) -> Circuit:
    return Circuit(num_qubits, tuple(random_gate(gen, num_qubits) for _ in range(num_gates)))


def random_state_array(gen: np.random.Generator, num_qubits: int) -> np.ndarray:
    amps = gen.normal(size=1 << num_qubits) + 1j * gen.normal(size=1 << num_qubits)
    return amps / np.linalg.norm(amps)

"""Dense statevector simulator for the h/x/mcx gate set.

Basis convention: bit b of a basis index is the state of qubit b, so qubit 0
is the least significant bit. All operations return a new StateVector and
never mutate their input; X and mcx are applied as exact amplitude
permutations (no floating-point rounding).
"""

from dataclasses import dataclass

import numpy as np

from .circuit import HADAMARD, MCX, PAULI_X, Circuit, Gate
from .errors import ResourceError

DEFAULT_MAX_QUBITS = 26

_SQRT_HALF = np.sqrt(0.5)

# A basis index is a plain int in [0, 2**num_qubits).
BasisIndex = int


@dataclass(eq=False)
class StateVector:
    """2**num_qubits complex amplitudes with unit L2 norm."""

    num_qubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def new_basis_state(
    num_qubits: int, index: BasisIndex, *, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """The computational basis state |index> on ``num_qubits`` qubits."""
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    if num_qubits > max_qubits:
        raise ResourceError(f"{num_qubits} qubits exceeds the budget of {max_qubits}")
    dim = 1 << num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def from_amplitudes(amplitudes) -> StateVector:
    """Wrap an amplitude array, validating length and unit norm."""
    amps = np.array(amplitudes, dtype=np.complex128)
    dim = amps.size
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"amplitude count {dim} is not a power of two >= 2")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
        raise ValueError("amplitudes are not normalized")
    return StateVector(dim.bit_length() - 1, amps)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new StateVector."""
    out = state.copy()
    _apply_inplace(out.amplitudes, gate, state.num_qubits)
    return out


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply a circuit's gates in list order, returning a new StateVector.

    Legal whenever every referenced qubit index fits the state; a gate that
    does not fit raises with its position in the circuit attached.
    """
    out = state.copy()
    for pos, gate in enumerate(circuit.gates):
        try:
            _apply_inplace(out.amplitudes, gate, state.num_qubits)
        except ValueError as err:
            raise ValueError(f"gate {pos} ({gate.kind}): {err}") from err
    return out


def apply_permutation(state: StateVector, permutation: np.ndarray) -> StateVector:
    """Apply the basis permutation |i> -> |permutation[i]> exactly.

    The caller guarantees ``permutation`` is a bijection on the index range;
    amplitudes are moved, never recomputed.
    """
    perm = np.asarray(permutation)
    if perm.shape != state.amplitudes.shape:
        raise ValueError("permutation length does not match the state dimension")
    out = np.empty_like(state.amplitudes)
    out[perm] = state.amplitudes
    return StateVector(state.num_qubits, out)


def marginal_probability(state: StateVector, qubits, pattern) -> float:
    """Probability that the listed qubits carry the given bit pattern."""
    qubits = list(qubits)
    pattern = list(pattern)
    if len(qubits) != len(pattern):
        raise ValueError("qubits and pattern must have the same length")
    if len(set(qubits)) != len(qubits):
        raise ValueError("qubits must be distinct")
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")
    sel = _match_mask(state.amplitudes.size, zip(qubits, pattern))
    return float(np.sum(np.abs(state.amplitudes[sel]) ** 2))


def measure_all(state: StateVector, rng_seed=0) -> BasisIndex:
    """Sample one basis index with probability |amplitude|^2.

    ``rng_seed`` is an integer seed or a numpy Generator (reuse a Generator
    to draw several samples from one stream). The state is not collapsed.
    """
    gen = np.random.default_rng(rng_seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    return int(gen.choice(probs.size, p=probs))


def reduced_density_matrix(state: StateVector, qubits) -> np.ndarray:
    """Reduced density matrix of the listed qubits, tracing out the rest.

    Row/column bit b of the reduced index corresponds to ``qubits[b]``.
    """
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError("qubits must be distinct")
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")
    total = state.num_qubits
    psi = state.amplitudes.reshape([2] * total)  # axis a holds qubit total-1-a
    kept = [total - 1 - q for q in reversed(qubits)]
    rest = [a for a in range(total) if a not in kept]
    mat = np.transpose(psi, kept + rest).reshape(1 << len(qubits), -1)
    return mat @ mat.conj().T


def _apply_inplace(amps: np.ndarray, gate: Gate, num_qubits: int) -> None:
    for q in gate.qubits:
        if q >= num_qubits:
            raise ValueError(f"qubit {q} out of range for {num_qubits}-qubit state")
    if gate.kind == HADAMARD:
        _hadamard(amps, gate.target)
    elif gate.kind == PAULI_X:
        _pauli_x(amps, gate.target)
    elif gate.kind == MCX:
        _mcx(amps, gate.controls, gate.target)
    else:  # pragma: no cover - Gate validates kind
        raise ValueError(f"unknown gate kind {gate.kind!r}")


def _hadamard(amps: np.ndarray, target: int) -> None:
    view = amps.reshape(-1, 2, 1 << target)
    low = view[:, 0, :].copy()
    high = view[:, 1, :]
    view[:, 0, :] = (low + high) * _SQRT_HALF
    view[:, 1, :] = (low - high) * _SQRT_HALF


def _pauli_x(amps: np.ndarray, target: int) -> None:
    view = amps.reshape(-1, 2, 1 << target)
    view[:, [0, 1], :] = view[:, [1, 0], :]


def _mcx(amps: np.ndarray, controls, target: int) -> None:
    pairs = list(controls) + [(target, 0)]
    src = np.nonzero(_match_mask(amps.size, pairs))[0]
    dst = src | (1 << target)
    tmp = amps[src].copy()
    amps[src] = amps[dst]
    amps[dst] = tmp


def _match_mask(dim: int, pairs) -> np.ndarray:
    idx = np.arange(dim)
    sel = np.ones(dim, dtype=bool)
    for qubit, value in pairs:
        sel &= ((idx >> qubit) & 1) == value
    return sel

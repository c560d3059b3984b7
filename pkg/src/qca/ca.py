"""1D cellular automata: classical engine, preimage enumeration, and the
compiler from update rules to reversible circuits with ancilla uncomputation.

Conventions: cell i of a CA state sits at bit i of its integer encoding and
at qubit ``layout.layer(j)[i]`` of a register layout. Bit strings are written
cell 0 leftmost, so "100" means cell 0 is alive.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import COMPRESSED, Circuit, Gate, RegisterLayout, h, inverse, mcx, x
from .errors import ResourceError

PERIODIC = "periodic"
FIXED_ZERO = "fixed_zero"

PAPER_DECOMPOSITION = "paper_decomposition"
GENERIC_TABLE = "generic_table"

# Exhaustive preimage scans are capped at 2**24 initial states.
ENUMERATION_GUARD = 24
_CHUNK = 1 << 20


@dataclass(frozen=True)
class CaRule:
    """Radius-1 binary update rule as an 8-entry truth table.

    ``table[(left << 2) | (center << 1) | right]`` is the next state of a
    cell whose neighborhood reads (left, center, right).
    """

    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != 8 or any(v not in (0, 1) for v in self.table):
            raise ValueError("rule table must be 8 entries of 0/1")

    @classmethod
    def from_wolfram(cls, number: int) -> "CaRule":
        if not 0 <= number <= 255:
            raise ValueError(f"Wolfram number must be 0..255, got {number}")
        return cls(tuple((number >> k) & 1 for k in range(8)))

    @property
    def wolfram_number(self) -> int:
        return sum(v << k for k, v in enumerate(self.table))

    @property
    def uses_center(self) -> bool:
        return any(self.table[k] != self.table[k ^ 0b010] for k in range(8))


@dataclass(frozen=True)
class CaState:
    """Immutable row of cells; cell i at ``bits[i]``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits or any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be a non-empty sequence of 0/1")

    @property
    def n(self) -> int:
        return len(self.bits)

    @classmethod
    def from_string(cls, text: str) -> "CaState":
        if not text or any(ch not in "01" for ch in text):
            raise ValueError(f"bit string must be non-empty 0/1, got {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_int(cls, value: int, n: int) -> "CaState":
        if not 0 <= value < (1 << n):
            raise ValueError(f"value {value} out of range for {n} cells")
        return cls(tuple((value >> i) & 1 for i in range(n)))

    def to_int(self) -> int:
        return sum(b << i for i, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class EvolutionSpec:
    """A CA evolution problem: width, step count, rule, boundary condition."""

    n: int
    m: int
    rule: CaRule
    boundary: str = PERIODIC

    def __post_init__(self) -> None:
        if self.boundary not in (PERIODIC, FIXED_ZERO):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.boundary == PERIODIC and self.n < 3:
            raise ValueError("periodic boundary needs n >= 3 (neighbors must be distinct)")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class PreimageReport:
    """Exhaustive ground truth: every initial state reaching ``target``."""

    target: CaState
    l: int
    preimages: tuple[CaState, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "preimages", tuple(self.preimages))
        if self.l != len(self.preimages):
            raise ValueError("l must equal the number of preimages")


def _neighborhood(bits: tuple[int, ...], i: int, boundary: str) -> tuple[int, int, int]:
    n = len(bits)
    if boundary == PERIODIC:
        return bits[(i - 1) % n], bits[i], bits[(i + 1) % n]
    left = bits[i - 1] if i > 0 else 0
    right = bits[i + 1] if i < n - 1 else 0
    return left, bits[i], right


def ca_step(state: CaState, rule: CaRule, boundary: str = PERIODIC) -> CaState:
    """One synchronous update of every cell."""
    out = []
    for i in range(state.n):
        left, center, right = _neighborhood(state.bits, i, boundary)
        out.append(rule.table[(left << 2) | (center << 1) | right])
    return CaState(tuple(out))


def ca_evolve(state: CaState, rule: CaRule, boundary: str, m: int) -> CaState:
    """m-fold composition of :func:`ca_step`; m=0 returns the input."""
    if m < 0:
        raise ValueError("m must be >= 0")
    for _ in range(m):
        state = ca_step(state, rule, boundary)
    return state


def step_ints(values, n: int, rule: CaRule, boundary: str = PERIODIC) -> np.ndarray:
    """Vectorized :func:`ca_step` on integer-encoded states (cell i at bit i)."""
    v = np.asarray(values, dtype=np.int64)
    mask = (1 << n) - 1
    if boundary == PERIODIC:
        left = ((v << 1) | (v >> (n - 1))) & mask
        right = (v >> 1) | ((v << (n - 1)) & mask)
    else:
        left = (v << 1) & mask
        right = v >> 1
    out = np.zeros_like(v)
    for pattern in range(8):
        if not rule.table[pattern]:
            continue
        l, c, r = (pattern >> 2) & 1, (pattern >> 1) & 1, pattern & 1
        match = (left if l else ~left) & (v if c else ~v) & (right if r else ~right)
        out |= match & mask
    return out


def evolve_ints(values, n: int, rule: CaRule, boundary: str, m: int) -> np.ndarray:
    """m-fold composition of :func:`step_ints`."""
    v = np.asarray(values, dtype=np.int64)
    for _ in range(m):
        v = step_ints(v, n, rule, boundary)
    return v


def preimages(spec: EvolutionSpec, q: CaState) -> PreimageReport:
    """Scan all 2**n initial states and collect those with f^(m)(x) = q."""
    if q.n != spec.n:
        raise ValueError(f"target has {q.n} cells, spec has {spec.n}")
    if spec.n > ENUMERATION_GUARD:
        raise ResourceError(
            f"preimage enumeration capped at n <= {ENUMERATION_GUARD}, got {spec.n}"
        )
    target = q.to_int()
    total = 1 << spec.n
    found: list[int] = []
    for start in range(0, total, _CHUNK):
        xs = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        ys = evolve_ints(xs, spec.n, spec.rule, spec.boundary, spec.m)
        found.extend(int(v) for v in xs[ys == target])
    states = tuple(CaState.from_int(v, spec.n) for v in found)
    return PreimageReport(target=q, l=len(states), preimages=states)


def _neighbor_qubits(spec: EvolutionSpec, cell: int, source: tuple[int, ...]):
    """Source-layer qubits of the left/right neighbors (None = fixed zero)."""
    n = spec.n
    if spec.boundary == PERIODIC:
        return source[(cell - 1) % n], source[(cell + 1) % n]
    left = source[cell - 1] if cell > 0 else None
    right = source[cell + 1] if cell < n - 1 else None
    return left, right


def build_cell_update(
    spec: EvolutionSpec,
    cell: int,
    source_layer: int,
    dest_layer: int,
    layout: RegisterLayout,
    style: str = GENERIC_TABLE,
) -> Circuit:
    """Circuit writing the next state of one cell into its fresh ancilla.

    The ancilla (cell's qubit in ``dest_layer``) must be |0>. With
    ``generic_table`` one mcx is emitted per true row of the effective truth
    table, controls matching the neighborhood pattern; variables the rule
    does not depend on (e.g. the center cell for an XOR rule) carry no
    control. ``paper_decomposition`` is the fixed X/Toffoli sequence for the
    XOR-of-neighbors rule (Wolfram 90) only: set the ancilla, then Toffoli,
    then an X-conjugated Toffoli on the two neighbor qubits.
    """
    if not 0 <= cell < spec.n:
        raise ValueError(f"cell {cell} out of range for n={spec.n}")
    source = layout.layer(source_layer)
    dest = layout.layer(dest_layer)
    ancilla = dest[cell]
    left, right = _neighbor_qubits(spec, cell, source)
    nq = layout.num_qubits

    if style == PAPER_DECOMPOSITION:
        if spec.rule.wolfram_number != 90:
            raise ValueError(
                "paper_decomposition only implements rule 90; use generic_table"
            )
        if left is None and right is None:
            return Circuit(nq, ())  # XOR of two fixed zeros
        if left is None or right is None:
            neighbor = right if left is None else left
            return Circuit(nq, (mcx([(neighbor, 1)], ancilla),))
        gates = (
            x(ancilla),
            mcx([(left, 1), (right, 1)], ancilla),
            x(left),
            x(right),
            mcx([(left, 1), (right, 1)], ancilla),
            x(left),
            x(right),
        )
        return Circuit(nq, gates)

    if style != GENERIC_TABLE:
        raise ValueError(f"unknown cell-update style {style!r}")

    positions = [left, source[cell], right]

    def value(assign: dict[int, int]) -> int:
        bits = [assign.get(k, 0) if positions[k] is not None else 0 for k in range(3)]
        return spec.rule.table[(bits[0] << 2) | (bits[1] << 1) | bits[2]]

    present = [k for k in range(3) if positions[k] is not None]
    deps = []
    for k in present:
        others = [p for p in present if p != k]
        for combo in itertools.product((0, 1), repeat=len(others)):
            assign = dict(zip(others, combo))
            if value({**assign, k: 0}) != value({**assign, k: 1}):
                deps.append(k)
                break

    gates: list[Gate] = []
    if not deps:
        if value({}):
            gates.append(x(ancilla))
    else:
        for combo in itertools.product((0, 1), repeat=len(deps)):
            assign = dict(zip(deps, combo))
            if value(assign):
                controls = [(positions[k], assign[k]) for k in deps]
                gates.append(mcx(controls, ancilla))
    return Circuit(nq, tuple(gates))


def build_layer(
    spec: EvolutionSpec, j: int, layout: RegisterLayout, style: str = GENERIC_TABLE
) -> Circuit:
    """One evolution step: cell updates for cells 0..n-1, reading layer j-1
    and writing layer j. Updates within a layer commute (disjoint targets,
    read-only shared controls)."""
    if j < 1:
        raise ValueError("layer index must be >= 1")
    circuit = Circuit(layout.num_qubits, ())
    for cell in range(spec.n):
        circuit = circuit + build_cell_update(spec, cell, j - 1, j, layout, style)
    return circuit


def build_uca(
    spec: EvolutionSpec,
    layout: RegisterLayout,
    style: str = GENERIC_TABLE,
    *,
    max_qubits: int | None = None,
) -> Circuit:
    """Full m-step evolution with uncomputation.

    Forward layers 1..m, then the inverses of layers m-1..1, so the net
    action on |x>|0...0> is |x>|f^(m)(x)> with every intermediate layer
    restored to |0> exactly. Requires a layout that keeps all m+1 layers
    (a literal layout, or any layout when m = 1).
    """
    if layout.n != spec.n or layout.m != spec.m:
        raise ValueError("layout does not match the evolution spec")
    if layout.mode == COMPRESSED and spec.m > 1:
        raise ValueError("compressed layouts keep no intermediate layers; use literal mode")
    if max_qubits is not None and layout.num_qubits > max_qubits:
        raise ResourceError(
            f"{layout.num_qubits} qubits exceeds the budget of {max_qubits}"
        )
    forward = [build_layer(spec, j, layout, style) for j in range(1, spec.m + 1)]
    circuit = Circuit(layout.num_qubits, ())
    for layer in forward:
        circuit = circuit + layer
    for layer in reversed(forward[:-1]):
        circuit = circuit + inverse(layer)
    return circuit


def prepare_superposition(layout: RegisterLayout) -> Circuit:
    """Hadamard wall on the input register: uniform superposition of all 2**n
    initial states."""
    return Circuit(layout.num_qubits, tuple(h(q) for q in layout.x_register))


def uca_permutation(spec: EvolutionSpec, layout: RegisterLayout) -> np.ndarray:
    """Compressed-mode evolution as a basis permutation.

    Maps |x>|y> to |x>|y XOR f^(m)(x)| using the classical engine; this is
    the net action of the uncomputed circuit and is its own inverse. Any
    phase-ancilla qubit passes through untouched.
    """
    if layout.mode != COMPRESSED:
        raise ValueError("uca_permutation requires a compressed layout")
    if layout.n != spec.n or layout.m != spec.m:
        raise ValueError("layout does not match the evolution spec")
    n = spec.n
    images = evolve_ints(np.arange(1 << n, dtype=np.int64), n, spec.rule, spec.boundary, spec.m)
    idx = np.arange(1 << layout.num_qubits, dtype=np.int64)
    return idx ^ (images[idx & ((1 << n) - 1)] << n)

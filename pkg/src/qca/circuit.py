"""Gate and circuit IR: construction, inversion, register layout, QCT text format.

The gate set is {Hadamard, Pauli-X, multi-controlled-X}. Every gate is its
own inverse, so a circuit is inverted by reversing its gate list.
"""

from dataclasses import dataclass

from .errors import QctParseError

HADAMARD = "h"
PAULI_X = "x"
MCX = "mcx"

_KINDS = (HADAMARD, PAULI_X, MCX)

LITERAL = "literal"
COMPRESSED = "compressed"


@dataclass(frozen=True)
class Gate:
    """A primitive gate.

    ``controls`` holds (qubit, control_value) pairs and is only allowed for
    mcx gates. Control value 1 fires on |1> (positive control), 0 fires on
    |0> (negative control); the target flips iff every control matches.
    """

    kind: str
    target: int
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise ValueError("target qubit must be non-negative")
        if self.kind != MCX:
            if self.controls:
                raise ValueError(f"{self.kind} gate takes no controls")
            return
        if not self.controls:
            raise ValueError("mcx requires at least one control; use an x gate instead")
        seen: set[int] = set()
        for qubit, value in self.controls:
            if qubit < 0:
                raise ValueError("control qubit must be non-negative")
            if value not in (0, 1):
                raise ValueError(f"control value must be 0 or 1, got {value!r}")
            if qubit in seen:
                raise ValueError(f"duplicate control qubit {qubit}")
            seen.add(qubit)
        if self.target in seen:
            raise ValueError(f"qubit {self.target} used as both control and target")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + (self.target,)


def h(target: int) -> Gate:
    """Hadamard on one qubit."""
    return Gate(HADAMARD, target)


def x(target: int) -> Gate:
    """Pauli-X (NOT) on one qubit."""
    return Gate(PAULI_X, target)


def mcx(controls, target: int) -> Gate:
    """Multi-controlled X with per-control polarity.

    ``controls`` is an iterable of (qubit, control_value) pairs; the target
    flips iff every control qubit equals its control value. A two-positive-
    control mcx is the Toffoli gate. Zero controls degenerate to a plain X.
    """
    ctrl = tuple((int(q), int(v)) for q, v in controls)
    if not ctrl:
        return Gate(PAULI_X, int(target))
    return Gate(MCX, int(target), ctrl)


@dataclass(frozen=True)
class Circuit:
    """An immutable ordered list of gates over ``num_qubits`` qubits."""

    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for pos, gate in enumerate(self.gates):
            top = max(gate.qubits)
            if top >= self.num_qubits:
                raise ValueError(
                    f"gate {pos} references qubit {top} but circuit has "
                    f"{self.num_qubits} qubits"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        if other.num_qubits != self.num_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        return Circuit(self.num_qubits, self.gates + other.gates)


def inverse(circuit: Circuit) -> Circuit:
    """Inverse circuit: gates in reverse order (each gate is self-inverse)."""
    return Circuit(circuit.num_qubits, tuple(reversed(circuit.gates)))


@dataclass(frozen=True)
class RegisterLayout:
    """Assignment of logical registers to flat qubit indices.

    Cell i of evolution step j sits at qubit ``layer(j)[i]``; blocks are
    contiguous and disjoint. Literal mode keeps one n-qubit block per step
    (m+1 blocks); compressed mode keeps only the input block and the output
    block. The optional phase ancilla is the single highest qubit.
    """

    n: int
    m: int
    mode: str
    with_phase_ancilla: bool = False

    def __post_init__(self) -> None:
        if self.mode not in (LITERAL, COMPRESSED):
            raise ValueError(f"unknown layout mode {self.mode!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @classmethod
    def literal(cls, n: int, m: int, phase_ancilla: bool = False) -> "RegisterLayout":
        return cls(n, m, LITERAL, phase_ancilla)

    @classmethod
    def compressed(cls, n: int, m: int, phase_ancilla: bool = False) -> "RegisterLayout":
        return cls(n, m, COMPRESSED, phase_ancilla)

    @property
    def num_blocks(self) -> int:
        return self.m + 1 if self.mode == LITERAL else 2

    @property
    def num_qubits(self) -> int:
        return self.n * self.num_blocks + (1 if self.with_phase_ancilla else 0)

    @property
    def x_register(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @property
    def output_register(self) -> tuple[int, ...]:
        return self.layer(self.m)

    @property
    def phase_ancilla(self) -> int | None:
        return self.n * self.num_blocks if self.with_phase_ancilla else None

    def layer(self, j: int) -> tuple[int, ...]:
        """Qubits of the register holding step j (j=0 is the input register)."""
        if not 0 <= j <= self.m:
            raise ValueError(f"layer {j} out of range 0..{self.m}")
        if self.mode == LITERAL:
            block = j
        elif j == 0:
            block = 0
        elif j == self.m:
            block = 1
        else:
            raise ValueError(f"compressed layout keeps no layer {j}")
        return tuple(range(block * self.n, (block + 1) * self.n))

    def intermediate_layers(self) -> list[tuple[int, ...]]:
        """Qubit blocks of steps 1..m-1 (empty in compressed mode)."""
        if self.mode == COMPRESSED:
            return []
        return [self.layer(j) for j in range(1, self.m)]


def export_qct(circuit: Circuit) -> str:
    """Serialize a circuit to QCT v1 text.

    Format: ``qct 1`` header, ``qubits <Q>``, then one gate per line:
    ``h <q>``, ``x <q>``, or ``mcx <+c|-c>... t<q>`` where ``+``/``-`` marks
    a positive/negative control. LF line endings, no trailing whitespace.
    """
    lines = ["qct 1", f"qubits {circuit.num_qubits}"]
    for gate in circuit.gates:
        if gate.kind == HADAMARD:
            lines.append(f"h {gate.target}")
        elif gate.kind == PAULI_X:
            lines.append(f"x {gate.target}")
        else:
            ctrl = " ".join(f"{'+' if v else '-'}{q}" for q, v in gate.controls)
            lines.append(f"mcx {ctrl} t{gate.target}")
    return "\n".join(lines) + "\n"


def parse_qct(text: str) -> Circuit:
    """Parse QCT v1 text into a Circuit.

    Blank lines are ignored and ``#`` starts a comment. Raises
    :class:`QctParseError` naming the 1-based line of the first problem.
    """
    rows: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        rows.append((lineno, stripped.split()))

    if not rows or rows[0][1] != ["qct", "1"]:
        bad = rows[0][0] if rows else 1
        raise QctParseError(f"expected 'qct 1' header, line {bad}")
    if len(rows) < 2 or rows[1][1][0] != "qubits":
        bad = rows[1][0] if len(rows) > 1 else rows[0][0]
        raise QctParseError(f"expected 'qubits <Q>' declaration, line {bad}")
    qubits_line, qubits_tokens = rows[1]
    if len(qubits_tokens) != 2 or not qubits_tokens[1].isdigit():
        raise QctParseError(f"expected 'qubits <Q>' declaration, line {qubits_line}")
    num_qubits = int(qubits_tokens[1])
    if num_qubits < 1:
        raise QctParseError(f"qubit count must be >= 1, line {qubits_line}")

    gates: list[Gate] = []
    for lineno, tokens in rows[2:]:
        mnemonic = tokens[0]
        if mnemonic in (HADAMARD, PAULI_X):
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise QctParseError(f"expected '{mnemonic} <qubit>', line {lineno}")
            qubit = _parse_qubit(tokens[1], num_qubits, lineno)
            gates.append(h(qubit) if mnemonic == HADAMARD else x(qubit))
        elif mnemonic == MCX:
            if len(tokens) < 3 or not tokens[-1].startswith("t"):
                raise QctParseError(
                    f"mcx needs controls and a trailing t<qubit> target, line {lineno}"
                )
            target = _parse_qubit(tokens[-1][1:], num_qubits, lineno)
            controls: list[tuple[int, int]] = []
            for token in tokens[1:-1]:
                if len(token) < 2 or token[0] not in "+-":
                    raise QctParseError(f"bad control token {token!r}, line {lineno}")
                qubit = _parse_qubit(token[1:], num_qubits, lineno)
                controls.append((qubit, 1 if token[0] == "+" else 0))
            try:
                gates.append(mcx(controls, target))
            except ValueError as err:
                raise QctParseError(f"{err}, line {lineno}") from err
        else:
            raise QctParseError(f"unknown mnemonic {mnemonic!r}, line {lineno}")
    return Circuit(num_qubits, tuple(gates))


def _parse_qubit(token: str, num_qubits: int, lineno: int) -> int:
    if not token.isdigit():
        raise QctParseError(f"bad qubit index {token!r}, line {lineno}")
    qubit = int(token)
    if qubit >= num_qubits:
        raise QctParseError(f"qubit out of range, line {lineno}")
    return qubit

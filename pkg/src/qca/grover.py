"""Amplitude amplification for CA preimage search.

An oracle call phase-marks every initial state x whose m-step evolution
reaches the target pattern, via a multi-controlled X kicked back into an
ancilla prepared in (|0> - |1>)/sqrt(2). The diffusion circuit then inverts
all amplitudes about their average. Search results always carry the
classically enumerated ground truth.
"""

import math
from dataclasses import dataclass

import numpy as np

from .ca import CaState, EvolutionSpec, ca_evolve, preimages, prepare_superposition, uca_permutation
from .circuit import COMPRESSED, Circuit, RegisterLayout, h, mcx, x
from .errors import ResourceError
from .statevec import (
    DEFAULT_MAX_QUBITS,
    StateVector,
    apply_circuit,
    apply_permutation,
    measure_all,
    new_basis_state,
)

# A target pattern is a row of cells, same shape as a CA state.
TargetPattern = CaState

RECOMPUTE = "recompute"
PAPER_LITERAL = "paper_literal"

FIXED_K = "fixed_k"
DOUBLING = "doubling"

# Repetitions of the full L = 1,2,4,... doubling pass before giving up.
DEFAULT_MAX_PASSES = 8


@dataclass(frozen=True)
class GroverPlan:
    """How to drive the search: iteration schedule and oracle style.

    ``fixed_k`` runs ``k`` iterations (or the optimal count for ``l_hint``,
    falling back to the enumerated count). ``doubling`` assumes the solution
    count is unknown: for L = 1, 2, 4, ... up to 2**n it draws the iteration
    count uniformly from [0, ceil(pi/4 * sqrt(N/L))], measures, and verifies
    classically, repeating the whole pass until a verified hit.
    """

    schedule: str = FIXED_K
    k: int | None = None
    l_hint: int | None = None
    oracle_style: str = RECOMPUTE

    def __post_init__(self) -> None:
        if self.schedule not in (FIXED_K, DOUBLING):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.oracle_style not in (RECOMPUTE, PAPER_LITERAL):
            raise ValueError(f"unknown oracle style {self.oracle_style!r}")
        if self.k is not None and self.k < 0:
            raise ValueError("k must be >= 0")
        if self.schedule == DOUBLING and (self.k is not None or self.l_hint is not None):
            raise ValueError("doubling schedule derives its own iteration counts")


@dataclass(eq=False)
class Oracle:
    """Phase-marking oracle over a register layout.

    ``mark`` is the conditioned multi-controlled X into the phase ancilla;
    ``evolution`` is the compressed-mode evolution permutation (None on
    literal layouts). Recompute style wraps every mark in evolution and
    un-evolution so the work register returns to |0>; paper-literal style
    marks an already evolved state and leaves it entangled.
    """

    style: str
    mark: Circuit
    evolution: np.ndarray | None = None

    def apply(self, state: StateVector) -> StateVector:
        if self.style == RECOMPUTE:
            if self.evolution is None:
                raise ValueError("recompute oracle needs an evolution permutation")
            state = apply_permutation(state, self.evolution)
            state = apply_circuit(state, self.mark)
            return apply_permutation(state, self.evolution)
        return apply_circuit(state, self.mark)


@dataclass(frozen=True)
class SearchResult:
    """One search outcome plus the classical ground truth."""

    measured_x: CaState
    verified: bool
    oracle_calls: int
    iterations_used: int
    success_probability: float
    seed: int
    l_classical: int
    stage_ks: tuple[int, ...] = ()


def prepare_phase_ancilla(layout: RegisterLayout) -> Circuit:
    """X then H on the phase ancilla: |0> becomes (|0> - |1>)/sqrt(2)."""
    z = layout.phase_ancilla
    if z is None:
        raise ValueError("layout has no phase ancilla")
    return Circuit(layout.num_qubits, (x(z), h(z)))


def build_oracle(
    spec: EvolutionSpec,
    q: TargetPattern,
    layout: RegisterLayout,
    style: str = RECOMPUTE,
    *,
    literal_st: bool = False,
) -> Oracle:
    """Oracle flipping the amplitude sign of every x with f^(m)(x) = q.

    The mark conditions a multi-controlled X on the output register and
    targets the phase ancilla. By default the target pattern is folded into
    control polarities; ``literal_st`` instead emits the explicit X-sandwich
    that maps the pattern to all-ones around an all-positive control.
    """
    if q.n != spec.n:
        raise ValueError(f"target pattern has {q.n} cells, spec has {spec.n}")
    if style not in (RECOMPUTE, PAPER_LITERAL):
        raise ValueError(f"unknown oracle style {style!r}")
    z = layout.phase_ancilla
    if z is None:
        raise ValueError("oracle needs a layout with a phase ancilla")
    out = layout.output_register

    if literal_st:
        flips = tuple(x(out[i]) for i in range(spec.n) if q.bits[i] == 0)
        gates = flips + (mcx([(o, 1) for o in out], z),) + flips
    else:
        gates = (mcx([(out[i], q.bits[i]) for i in range(spec.n)], z),)
    mark = Circuit(layout.num_qubits, gates)

    evolution = uca_permutation(spec, layout) if layout.mode == COMPRESSED else None
    if style == RECOMPUTE and evolution is None:
        raise ValueError("recompute style requires a compressed layout")
    return Oracle(style, mark, evolution)


def build_diffusion(layout: RegisterLayout) -> Circuit:
    """Inversion about the average on the input register.

    Hadamard wall, then a phase flip on every state except |0...0|: the
    all-negative-control mcx kicks a minus sign into the phase ancilla and
    the trailing X on the ancilla restores the overall sign, so the circuit
    equals 2|u><u| - I (u the uniform state) entrywise, not just up to
    global phase.
    """
    z = layout.phase_ancilla
    if z is None:
        raise ValueError("diffusion needs a layout with a phase ancilla")
    xs = layout.x_register
    wall = tuple(h(q) for q in xs)
    middle = (mcx([(q, 0) for q in xs], z), x(z))
    return Circuit(layout.num_qubits, wall + middle + wall)


def optimal_iterations(num_states: int, num_marked: int) -> int:
    """Iteration count maximizing the success probability.

    Rounds pi/(4*theta) - 1/2 half-up, with theta = asin(sqrt(l/N)); for
    small l/N this is within one of the (pi/4)*sqrt(N/l) estimate.
    """
    if num_marked == 0:
        raise ValueError("no marked states: search is pointless")
    if not 1 <= num_marked <= num_states:
        raise ValueError(f"need 1 <= l <= N, got l={num_marked}, N={num_states}")
    theta = math.asin(math.sqrt(num_marked / num_states))
    return max(0, math.floor(math.pi / (4 * theta)))


def paper_iteration_estimate(num_states: int, num_marked: int) -> float:
    """The (pi/4)*sqrt(N/l) iteration estimate."""
    if num_marked < 1:
        raise ValueError("num_marked must be >= 1")
    return (math.pi / 4) * math.sqrt(num_states / num_marked)


def x_register_distribution(state: StateVector, layout: RegisterLayout) -> np.ndarray:
    """Marginal probability of each input-register value."""
    n = layout.n
    return state.probabilities().reshape(-1, 1 << n).sum(axis=0)


def success_probability(
    state: StateVector, spec: EvolutionSpec, q: TargetPattern, layout: RegisterLayout
) -> float:
    """Probability that measuring the input register yields a true preimage."""
    report = preimages(spec, q)
    dist = x_register_distribution(state, layout)
    return float(sum(dist[s.to_int()] for s in report.preimages))


def _prepare(layout: RegisterLayout, oracle: Oracle, max_qubits: int) -> StateVector:
    state = new_basis_state(layout.num_qubits, 0, max_qubits=max_qubits)
    state = apply_circuit(state, prepare_superposition(layout))
    state = apply_circuit(state, prepare_phase_ancilla(layout))
    if oracle.style == PAPER_LITERAL:
        state = apply_permutation(state, oracle.evolution)
    return state


def _iterate(state: StateVector, oracle: Oracle, diffusion: Circuit, k: int) -> StateVector:
    for _ in range(k):
        state = oracle.apply(state)
        state = apply_circuit(state, diffusion)
    return state


def grover_search(
    spec: EvolutionSpec,
    q: TargetPattern,
    plan: GroverPlan = GroverPlan(),
    rng_seed: int = 0,
    *,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    max_passes: int = DEFAULT_MAX_PASSES,
) -> SearchResult:
    """Run the full search: superpose, amplify, measure, verify classically.

    Uses a compressed layout (2n + 1 qubits). The measured input register is
    checked against the classical evolution; ``success_probability`` is read
    off the exact pre-measurement statevector. One seeded generator drives
    both the doubling schedule's iteration draws and the measurements, so
    equal seeds give identical results.
    """
    if q.n != spec.n:
        raise ValueError(f"target pattern has {q.n} cells, spec has {spec.n}")
    layout = RegisterLayout.compressed(spec.n, spec.m, phase_ancilla=True)
    if layout.num_qubits > max_qubits:
        raise ResourceError(
            f"search needs {layout.num_qubits} qubits, budget is {max_qubits}"
        )
    rng = np.random.default_rng(rng_seed)
    ground = preimages(spec, q)
    num_states = 1 << spec.n
    oracle = build_oracle(spec, q, layout, plan.oracle_style)
    diffusion = build_diffusion(layout)

    def measure_input(state: StateVector) -> CaState:
        index = measure_all(state, rng)
        return CaState.from_int(index & (num_states - 1), spec.n)

    def is_preimage(candidate: CaState) -> bool:
        return ca_evolve(candidate, spec.rule, spec.boundary, spec.m) == q

    if plan.schedule == FIXED_K:
        if plan.k is not None:
            k = plan.k
        else:
            hint = plan.l_hint if plan.l_hint is not None else ground.l
            k = optimal_iterations(num_states, max(hint, 1))
        state = _iterate(_prepare(layout, oracle, max_qubits), oracle, diffusion, k)
        probability = success_probability(state, spec, q, layout)
        measured = measure_input(state)
        return SearchResult(
            measured_x=measured,
            verified=is_preimage(measured),
            oracle_calls=k,
            iterations_used=k,
            success_probability=probability,
            seed=rng_seed,
            l_classical=ground.l,
            stage_ks=(k,),
        )

    stage_ks: list[int] = []
    total_calls = 0
    state = _prepare(layout, oracle, max_qubits)
    measured = measure_input(state)
    k = 0
    for _ in range(max_passes):
        stage_l = 1
        while stage_l <= num_states:
            k_max = math.ceil((math.pi / 4) * math.sqrt(num_states / stage_l))
            k = int(rng.integers(0, k_max + 1))
            stage_ks.append(k)
            total_calls += k
            state = _iterate(_prepare(layout, oracle, max_qubits), oracle, diffusion, k)
            measured = measure_input(state)
            if is_preimage(measured):
                return SearchResult(
                    measured_x=measured,
                    verified=True,
                    oracle_calls=total_calls,
                    iterations_used=k,
                    success_probability=success_probability(state, spec, q, layout),
                    seed=rng_seed,
                    l_classical=ground.l,
                    stage_ks=tuple(stage_ks),
                )
            stage_l *= 2
    return SearchResult(
        measured_x=measured,
        verified=False,
        oracle_calls=total_calls,
        iterations_used=k,
        success_probability=success_probability(state, spec, q, layout),
        seed=rng_seed,
        l_classical=ground.l,
        stage_ks=tuple(stage_ks),
    )


def compare_styles(
    spec: EvolutionSpec,
    q: TargetPattern,
    iterations: int,
    *,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> dict[str, list[float]]:
    """Success-probability trajectories of both oracle styles, side by side.

    Entry j of each list is the probability after j oracle+diffusion rounds;
    recompute follows the ideal amplification curve, paper-literal diffuses
    while the work register is still entangled.
    """
    layout = RegisterLayout.compressed(spec.n, spec.m, phase_ancilla=True)
    if layout.num_qubits > max_qubits:
        raise ResourceError(
            f"comparison needs {layout.num_qubits} qubits, budget is {max_qubits}"
        )
    diffusion = build_diffusion(layout)
    out: dict[str, list[float]] = {}
    for style in (RECOMPUTE, PAPER_LITERAL):
        oracle = build_oracle(spec, q, layout, style)
        state = _prepare(layout, oracle, max_qubits)
        trajectory = [success_probability(state, spec, q, layout)]
        for _ in range(iterations):
            state = _iterate(state, oracle, diffusion, 1)
            trajectory.append(success_probability(state, spec, q, layout))
        out[style] = trajectory
    return out

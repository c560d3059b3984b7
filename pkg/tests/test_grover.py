import math

import numpy as np
import pytest

from qca import (
    CaRule,
    CaState,
    EvolutionSpec,
    FIXED_ZERO,
    GroverPlan,
    PAPER_LITERAL,
    PERIODIC,
    RECOMPUTE,
    RegisterLayout,
    ResourceError,
    apply_circuit,
    apply_permutation,
    build_diffusion,
    build_oracle,
    compare_styles,
    from_amplitudes,
    grover_search,
    new_basis_state,
    optimal_iterations,
    paper_iteration_estimate,
    preimages,
    prepare_phase_ancilla,
    prepare_superposition,
    reduced_density_matrix,
    success_probability,
)
from qca.grover import _iterate, _prepare

from conftest import RULE_90, random_state_array

SQRT_HALF = math.sqrt(0.5)


def purity(state, qubit) -> float:
    rho = reduced_density_matrix(state, [qubit])
    return float(np.trace(rho @ rho).real)


def bijective_instance(n: int, m: int = 1, x_seed: int = 3):
    """A single-preimage search instance: rule 90 with pinned-zero boundary
    is a bijection for even n, so the image of any x has exactly l = 1."""
    spec = EvolutionSpec(n, m, RULE_90, FIXED_ZERO)
    x = CaState.from_int(x_seed, n)
    from qca import ca_evolve

    q = ca_evolve(x, spec.rule, spec.boundary, m)
    return spec, q


class TestPreparePhaseAncilla:
    def test_minus_state(self):
        layout = RegisterLayout.compressed(1, 1, phase_ancilla=True)
        out = apply_circuit(new_basis_state(3, 0), prepare_phase_ancilla(layout))
        # ancilla is qubit 2: amplitudes on |z=0> and |z=1>
        assert abs(out.amplitudes[0] - SQRT_HALF) < 1e-12
        assert abs(out.amplitudes[4] + SQRT_HALF) < 1e-12

    def test_inverse_returns_to_zero(self):
        # X-then-H is not self-inverse (it squares to a Y rotation); undoing
        # it takes the reversed gate order
        from qca import inverse, marginal_probability

        layout = RegisterLayout.compressed(1, 1, phase_ancilla=True)
        circuit = prepare_phase_ancilla(layout)
        z = layout.phase_ancilla
        undone = apply_circuit(apply_circuit(new_basis_state(3, 0), circuit), inverse(circuit))
        assert marginal_probability(undone, [z], [0]) == pytest.approx(1.0, abs=1e-12)
        twice = apply_circuit(apply_circuit(new_basis_state(3, 0), circuit), circuit)
        assert marginal_probability(twice, [z], [1]) == pytest.approx(1.0, abs=1e-12)

    def test_kickback_leaves_ancilla_separable(self):
        # flipping the |-> ancilla negates the hit branch only
        layout = RegisterLayout.compressed(2, 1, phase_ancilla=True)
        spec, q = EvolutionSpec(3, 1, RULE_90), None  # unused; direct circuit test
        from qca import h as hadamard, mcx

        state = new_basis_state(5, 0)
        state = apply_circuit(state, prepare_superposition(layout))
        state = apply_circuit(state, prepare_phase_ancilla(layout))
        before = state.amplitudes.copy()
        from qca import Circuit

        kick = Circuit(5, (mcx([(0, 1), (1, 1)], layout.phase_ancilla),))
        after = apply_circuit(state, kick)
        assert purity(after, layout.phase_ancilla) == pytest.approx(1.0, abs=1e-10)
        # branch x=11 got its sign flipped, all else untouched
        for idx in range(32):
            want = -before[idx] if (idx & 3) == 3 else before[idx]
            assert after.amplitudes[idx] == want

    def test_requires_phase_ancilla(self):
        with pytest.raises(ValueError):
            prepare_phase_ancilla(RegisterLayout.compressed(2, 1))


class TestBuildOracle:
    def test_marks_exactly_the_preimages(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("000")
        layout = RegisterLayout.compressed(3, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout, PAPER_LITERAL)
        state = _prepare(layout, oracle, 26)
        before = state.amplitudes.copy()
        after = oracle.apply(state)
        marked = {s.to_int() for s in preimages(spec, q).preimages}
        assert marked == {0b000, 0b111}
        for idx in range(before.size):
            want = -before[idx] if (idx & 7) in marked else before[idx]
            assert abs(after.amplitudes[idx] - want) < 1e-12

    @pytest.mark.parametrize("n,m,number,qval", [(4, 2, 30, 5), (5, 1, 110, 9), (8, 1, 90, 60)])
    def test_sign_flips_match_enumeration(self, n, m, number, qval):
        rule = CaRule.from_wolfram(number)
        spec = EvolutionSpec(n, m, rule)
        q = CaState.from_int(qval, n)
        layout = RegisterLayout.compressed(n, m, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout, RECOMPUTE)
        state = _prepare(layout, oracle, 26)
        before = state.amplitudes.copy()
        after = oracle.apply(state)
        marked = {s.to_int() for s in preimages(spec, q).preimages}
        mask = (1 << n) - 1
        for idx in np.nonzero(np.abs(before) > 1e-15)[0]:
            want = -before[idx] if (idx & mask) in marked else before[idx]
            assert abs(after.amplitudes[idx] - want) < 1e-12
        assert purity(after, layout.phase_ancilla) >= 1 - 1e-9

    def test_no_marked_states_acts_as_identity(self):
        spec = EvolutionSpec(4, 1, RULE_90)
        q = CaState.from_string("1000")  # odd parity: unreachable
        assert preimages(spec, q).l == 0
        layout = RegisterLayout.compressed(4, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout, RECOMPUTE)
        state = _prepare(layout, oracle, 26)
        after = oracle.apply(state)
        assert np.max(np.abs(after.amplitudes - state.amplitudes)) < 1e-15

    def test_literal_st_sandwich_equals_folded(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("010")
        layout = RegisterLayout.compressed(3, 1, phase_ancilla=True)
        folded = build_oracle(spec, q, layout, PAPER_LITERAL)
        sandwich = build_oracle(spec, q, layout, PAPER_LITERAL, literal_st=True)
        for value in range(1 << layout.num_qubits):
            a = apply_circuit(new_basis_state(layout.num_qubits, value), folded.mark)
            b = apply_circuit(new_basis_state(layout.num_qubits, value), sandwich.mark)
            assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_pattern_length_mismatch(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        layout = RegisterLayout.compressed(3, 1, phase_ancilla=True)
        with pytest.raises(ValueError):
            build_oracle(spec, CaState.from_string("0101"), layout)

    def test_styles_agree_after_first_mark(self):
        # recompute's post-mark state (work register re-evolved) must equal
        # the paper-literal post-oracle state
        spec = EvolutionSpec(3, 2, RULE_90)
        q = CaState.from_string("011")
        layout = RegisterLayout.compressed(3, 2, phase_ancilla=True)
        rec = build_oracle(spec, q, layout, RECOMPUTE)
        lit = build_oracle(spec, q, layout, PAPER_LITERAL)
        state_rec = apply_permutation(rec.apply(_prepare(layout, rec, 26)), rec.evolution)
        state_lit = lit.apply(_prepare(layout, lit, 26))
        assert np.max(np.abs(state_rec.amplitudes - state_lit.amplitudes)) <= 1e-12


class TestBuildDiffusion:
    def layout(self, n):
        return RegisterLayout.compressed(n, 1, phase_ancilla=True)

    def embed(self, col, layout):
        # x-register amplitudes `col`, work register |0>, ancilla |->
        dim = 1 << layout.num_qubits
        amps = np.zeros(dim, dtype=complex)
        z_bit = 1 << layout.phase_ancilla
        for value, amplitude in enumerate(col):
            amps[value] = amplitude * SQRT_HALF
            amps[value | z_bit] = -amplitude * SQRT_HALF
        return from_amplitudes(amps)

    def extract(self, state, layout, n):
        # project the ancilla onto |->: col = sqrt2 * amp(x, 0, z=0)
        return np.array([state.amplitudes[v] * math.sqrt(2) for v in range(1 << n)])

    def test_uniform_state_unchanged(self):
        layout = self.layout(3)
        col = np.full(8, 1 / math.sqrt(8))
        out = self.extract(
            apply_circuit(self.embed(col, layout), build_diffusion(layout)), layout, 3
        )
        assert np.max(np.abs(out - col)) < 1e-12

    def test_hand_example_n2(self):
        # amplitudes (1,0,0,0): average 1/4, map a -> 2A - a
        layout = self.layout(2)
        col = np.array([1.0, 0, 0, 0])
        out = self.extract(
            apply_circuit(self.embed(col, layout), build_diffusion(layout)), layout, 2
        )
        assert np.max(np.abs(out - [-0.5, 0.5, 0.5, 0.5])) < 1e-12

    def test_inversion_about_average_random_states(self, rng):
        for n in (2, 4, 6, 8):
            layout = self.layout(n)
            diffusion = build_diffusion(layout)
            for _ in range(25):
                col = random_state_array(rng, n)
                out = self.extract(
                    apply_circuit(self.embed(col, layout), diffusion), layout, n
                )
                expected = 2 * col.mean() - col
                assert np.max(np.abs(out - expected)) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_dense_matrix_equality(self, n):
        # column-by-column comparison against the explicit outer product
        layout = self.layout(n)
        diffusion = build_diffusion(layout)
        dim = 1 << n
        uniform = np.full(dim, 1 / math.sqrt(dim))
        expected = 2 * np.outer(uniform, uniform) - np.eye(dim)
        for value in range(dim):
            col = np.zeros(dim)
            col[value] = 1.0
            out = self.extract(
                apply_circuit(self.embed(col, layout), diffusion), layout, n
            )
            assert np.max(np.abs(out - expected[:, value])) < 1e-10

    def test_requires_phase_ancilla(self):
        with pytest.raises(ValueError):
            build_diffusion(RegisterLayout.compressed(2, 1))


class TestIterationCounts:
    def test_frozen_examples(self):
        assert optimal_iterations(16, 1) == 3
        assert optimal_iterations(1024, 1) == 25
        assert optimal_iterations(4, 1) == 1
        assert optimal_iterations(8, 2) == 1

    def test_n4_l1_is_exact(self):
        theta = math.asin(0.5)
        assert math.sin(3 * theta) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_no_marked_states_raises(self):
        with pytest.raises(ValueError, match="no marked states"):
            optimal_iterations(16, 0)

    def test_bounds(self):
        with pytest.raises(ValueError):
            optimal_iterations(16, 17)

    def test_agreement_with_sqrt_estimate(self):
        # the estimate can exceed the rounded optimum by slightly more than
        # one near l = N/4 (e.g. N=512, l=75 gives a 1.052 gap)
        worst = 0.0
        for n in range(2, 13):
            N = 1 << n
            for l in range(1, N // 4 + 1):
                gap = abs(paper_iteration_estimate(N, l) - optimal_iterations(N, l))
                worst = max(worst, gap)
        assert worst <= 1.06
        assert abs(paper_iteration_estimate(1024, 1) - 25.13) < 0.01


class TestTrajectory:
    def test_success_probability_uniform(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("000")
        layout = RegisterLayout.compressed(3, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout)
        state = _prepare(layout, oracle, 26)
        assert success_probability(state, spec, q, layout) == pytest.approx(0.25, abs=1e-12)

    def test_unreachable_target_probability_zero(self):
        spec = EvolutionSpec(4, 1, RULE_90)
        q = CaState.from_string("1000")
        layout = RegisterLayout.compressed(4, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout)
        state = _prepare(layout, oracle, 26)
        assert success_probability(state, spec, q, layout) == 0.0

    def test_matches_closed_form_with_overrotation(self):
        # n=8 single-preimage instance: p(j) = sin^2((2j+1) theta), checked
        # past the optimum and around one full period
        spec, q = bijective_instance(8)
        layout = RegisterLayout.compressed(8, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout)
        diffusion = build_diffusion(layout)
        theta = math.asin(math.sqrt(1 / 256))
        k = optimal_iterations(256, 1)
        period = math.ceil(math.pi / (2 * theta))
        state = _prepare(layout, oracle, 26)
        probs = [success_probability(state, spec, q, layout)]
        for _ in range(k + period + 1):
            state = _iterate(state, oracle, diffusion, 1)
            probs.append(success_probability(state, spec, q, layout))
        for j, p in enumerate(probs):
            assert abs(p - math.sin((2 * j + 1) * theta) ** 2) < 1e-6
        assert abs(probs[k + period] - probs[k]) < 0.02
        assert purity(state, layout.phase_ancilla) >= 1 - 1e-9

    def test_first_iteration_amplification(self):
        # one round sends each marked amplitude to (3 - 4l/N)/sqrt(N)
        spec = EvolutionSpec(5, 1, RULE_90)
        q = CaState.from_string("01100")
        report = preimages(spec, q)
        assert report.l == 2
        layout = RegisterLayout.compressed(5, 1, phase_ancilla=True)
        oracle = build_oracle(spec, q, layout)
        state = _iterate(_prepare(layout, oracle, 26), oracle, build_diffusion(layout), 1)
        expected = (3 - 4 * report.l / 32) / math.sqrt(32)
        for s in report.preimages:
            amp = state.amplitudes[s.to_int()] * math.sqrt(2)
            assert abs(amp - expected) < 1e-10

    def test_compare_styles_report(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("000")
        report = compare_styles(spec, q, 2)
        theta = math.asin(0.5)
        for j, p in enumerate(report[RECOMPUTE]):
            assert abs(p - math.sin((2 * j + 1) * theta) ** 2) < 1e-10
        assert report[PAPER_LITERAL][0] == pytest.approx(0.25, abs=1e-12)
        # the literal sequence diffuses an entangled register and loses
        # amplitude relative to ideal amplification
        assert report[PAPER_LITERAL][1] < report[RECOMPUTE][1]


class TestGroverSearch:
    def test_l2_instance_certain_hit(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("000")
        result = grover_search(spec, q, GroverPlan(), rng_seed=5)
        assert result.verified
        assert str(result.measured_x) in {"000", "111"}
        assert result.iterations_used == 1
        assert result.success_probability == pytest.approx(1.0, abs=1e-10)
        assert result.l_classical == 2

    def test_explicit_k(self):
        spec, q = bijective_instance(4)
        result = grover_search(spec, q, GroverPlan(k=3), rng_seed=0)
        assert result.oracle_calls == 3
        expected = math.sin(7 * math.asin(0.25)) ** 2
        assert result.success_probability == pytest.approx(expected, abs=1e-9)

    def test_unreachable_fixed_k_returns_unverified(self):
        spec = EvolutionSpec(4, 1, RULE_90)
        q = CaState.from_string("1000")
        result = grover_search(spec, q, GroverPlan(), rng_seed=0)
        assert not result.verified
        assert result.success_probability == 0.0
        assert result.l_classical == 0

    def test_same_seed_same_result(self):
        spec, q = bijective_instance(6)
        plan = GroverPlan(schedule="doubling")
        a = grover_search(spec, q, plan, rng_seed=11)
        b = grover_search(spec, q, plan, rng_seed=11)
        assert a == b

    def test_paper_literal_style_still_finds(self):
        spec = EvolutionSpec(3, 1, RULE_90)
        q = CaState.from_string("000")
        result = grover_search(spec, q, GroverPlan(oracle_style=PAPER_LITERAL), rng_seed=2)
        assert result.verified == (str(result.measured_x) in {"000", "111"})

    def test_doubling_statistics_small(self):
        spec, q = bijective_instance(6)
        plan = GroverPlan(schedule="doubling")
        calls = []
        for seed in range(30):
            result = grover_search(spec, q, plan, rng_seed=seed)
            assert result.verified
            assert result.oracle_calls == sum(result.stage_ks)
            calls.append(result.oracle_calls)
        reference = (math.pi / 4) * math.sqrt(64)
        assert 0.5 * reference <= np.mean(calls) <= 4 * reference

    def test_doubling_unreachable_exhausts(self):
        spec = EvolutionSpec(4, 1, RULE_90)
        q = CaState.from_string("1000")
        result = grover_search(spec, q, GroverPlan(schedule="doubling"), rng_seed=0, max_passes=2)
        assert not result.verified
        assert len(result.stage_ks) == 2 * 5  # two passes of L = 1,2,4,8,16

    def test_budget_guard(self):
        spec = EvolutionSpec(13, 1, RULE_90)
        with pytest.raises(ResourceError):
            grover_search(spec, CaState.from_int(0, 13), GroverPlan())

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            GroverPlan(schedule="doubling", k=3)
        with pytest.raises(ValueError):
            GroverPlan(k=-1)
        with pytest.raises(ValueError):
            GroverPlan(oracle_style="magic")

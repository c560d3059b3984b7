"""Command-line frontend: evolve, search, verify, circuit.

Exit codes: 0 success/found, 1 search exhausted without a verified hit,
2 usage error, 3 resource budget exceeded. Output is deterministic for a
fixed config and seed; pass --timing to include wall-clock times (which
breaks byte-for-byte reproducibility).
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import grover
from .ca import (
    GENERIC_TABLE,
    PAPER_DECOMPOSITION,
    PERIODIC,
    CaRule,
    CaState,
    EvolutionSpec,
    build_cell_update,
    build_uca,
    ca_evolve,
    evolve_ints,
    preimages,
    prepare_superposition,
)
from .circuit import RegisterLayout, export_qct
from .errors import ResourceError
from .statevec import DEFAULT_MAX_QUBITS, apply_circuit, new_basis_state

_RESULT_KEYS = (
    "n", "m", "rule", "boundary", "target", "mode", "oracle_style", "schedule",
    "k", "iterations_used", "oracle_calls", "measured_x", "verified",
    "success_probability", "l_classical", "seed", "wall_time_ms",
)


class _UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    n: int
    m: int = 1
    rule: int = 90
    boundary: str = PERIODIC
    target: str | None = None
    mode: str = "compressed"
    oracle_style: str = grover.RECOMPUTE
    schedule: str = grover.FIXED_K
    k: int | None = None
    seed: int = 0
    output_path: str | None = None
    format: str = "json"
    init: str | None = None
    style: str = GENERIC_TABLE
    literal_st: bool = False
    kind: str = "uca"
    repeats: int = 1
    timing: bool = False


def max_qubit_budget() -> int:
    """Qubit budget, overridable via the QCA_MAX_QUBITS environment variable."""
    raw = os.environ.get("QCA_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError:
        raise _UsageError(f"QCA_MAX_QUBITS: expected an integer, got {raw!r}") from None
    if value < 1:
        raise _UsageError(f"QCA_MAX_QUBITS: must be >= 1, got {value}")
    return value


def _parse_rule(number: int) -> CaRule:
    if not 0 <= number <= 255:
        raise _UsageError(f"--rule: Wolfram number must be 0..255, got {number}")
    return CaRule.from_wolfram(number)


def _parse_bits(text: str, flag: str, n: int) -> CaState:
    if any(ch not in "01" for ch in text) or not text:
        raise _UsageError(f"{flag}: expected a string of 0/1, got {text!r}")
    if len(text) != n:
        raise _UsageError(f"{flag}: expected {n} bits, got {len(text)}")
    return CaState.from_string(text)


def _make_spec(cfg: RunConfig) -> EvolutionSpec:
    try:
        return EvolutionSpec(cfg.n, cfg.m, _parse_rule(cfg.rule), cfg.boundary)
    except ValueError as err:
        raise _UsageError(str(err)) from err


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_bytes(text.encode("utf-8"))


def cmd_evolve(cfg: RunConfig) -> int:
    spec = _make_spec(cfg)
    state = _parse_bits(cfg.init or "", "--init", spec.n)
    lines = [str(state)]
    for _ in range(spec.m):
        state = ca_evolve(state, spec.rule, spec.boundary, 1)
        lines.append(str(state))
    _write_output("\n".join(lines) + "\n", cfg.output_path)
    return 0


def _result_record(cfg: RunConfig, result: grover.SearchResult, wall_ms: float | None) -> dict:
    k_value = list(result.stage_ks) if cfg.schedule == grover.DOUBLING else result.iterations_used
    record = {
        "n": cfg.n,
        "m": cfg.m,
        "rule": cfg.rule,
        "boundary": cfg.boundary,
        "target": cfg.target,
        "mode": cfg.mode,
        "oracle_style": cfg.oracle_style,
        "schedule": cfg.schedule,
        "k": k_value,
        "iterations_used": result.iterations_used,
        "oracle_calls": result.oracle_calls,
        "measured_x": str(result.measured_x),
        "verified": result.verified,
        "success_probability": result.success_probability,
        "l_classical": result.l_classical,
        "seed": result.seed,
        "wall_time_ms": wall_ms,
    }
    assert tuple(record) == _RESULT_KEYS
    return record


def _format_csv(records: list[dict]) -> str:
    def cell(value) -> str:
        if isinstance(value, str):
            return value
        return json.dumps(value)

    lines = [",".join(_RESULT_KEYS)]
    for record in records:
        lines.append(",".join(cell(record[key]) for key in _RESULT_KEYS))
    return "\n".join(lines) + "\n"


def cmd_search(cfg: RunConfig) -> int:
    spec = _make_spec(cfg)
    target = _parse_bits(cfg.target or "", "--target", spec.n)
    budget = max_qubit_budget()
    try:
        plan = grover.GroverPlan(schedule=cfg.schedule, k=cfg.k, oracle_style=cfg.oracle_style)
    except ValueError as err:
        raise _UsageError(str(err)) from err

    def one(seed: int) -> dict:
        started = time.perf_counter()
        result = grover.grover_search(spec, target, plan, seed, max_qubits=budget)
        wall = (time.perf_counter() - started) * 1000.0 if cfg.timing else None
        return _result_record(cfg, result, wall)

    seeds = [cfg.seed + i for i in range(cfg.repeats)]
    if len(seeds) == 1:
        records = [one(seeds[0])]
    else:
        workers = min(len(seeds), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, seeds))

    if cfg.format == "csv":
        text = _format_csv(records)
    else:
        payload = records[0] if len(records) == 1 else records
        text = json.dumps(payload, indent=2) + "\n"
    _write_output(text, cfg.output_path)
    return 0 if any(record["verified"] for record in records) else 1


def run_verification(
    spec: EvolutionSpec,
    q: CaState | None = None,
    style: str = GENERIC_TABLE,
    *,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> tuple[bool, list[str]]:
    """Cross-check the compiled circuits against the classical engine.

    Returns (all_passed, report_lines). Checks: cell-update truth table,
    exhaustive circuit-vs-classical equivalence with clean ancillas on all
    2**n basis inputs, superposition amplitudes, and (given a target) the
    preimage count.
    """
    lines: list[str] = []
    ok = True

    probe = EvolutionSpec(3, 1, spec.rule, PERIODIC)
    probe_layout = RegisterLayout.literal(3, 1)
    styles = [GENERIC_TABLE]
    if spec.rule.wolfram_number == 90:
        styles.append(PAPER_DECOMPOSITION)
    for probe_style in styles:
        update = build_cell_update(probe, 0, 0, 1, probe_layout, probe_style)
        good = 0
        for pattern in range(8):
            left, center, right = (pattern >> 2) & 1, (pattern >> 1) & 1, pattern & 1
            index = (left << 2) | (right << 1) | center  # cell0's neighbors are cells 2,1
            final = apply_circuit(new_basis_state(6, index), update)
            expected = index | (spec.rule.table[pattern] << 3)
            if final.amplitudes[expected] == 1.0:
                good += 1
            else:
                ok = False
                lines.append(
                    f"truth table ({probe_style}): FAIL at (l,c,r)=({left},{center},{right})"
                )
        lines.append(f"truth table ({probe_style}): {good}/8 rows match")

    layout = RegisterLayout.literal(spec.n, spec.m)
    if layout.num_qubits > max_qubits:
        raise ResourceError(
            f"verification needs {layout.num_qubits} qubits, budget is {max_qubits}"
        )
    uca = build_uca(spec, layout, style)
    total = 1 << spec.n
    shift = spec.m * spec.n
    matches = 0
    clean = True
    for value in range(total):
        final = apply_circuit(new_basis_state(layout.num_qubits, value, max_qubits=max_qubits), uca)
        image = ca_evolve(CaState.from_int(value, spec.n), spec.rule, spec.boundary, spec.m)
        expected = value | (image.to_int() << shift)
        if final.amplitudes[expected] == 1.0:
            matches += 1
        else:
            ok = False
            clean = False
            actual = int(np.argmax(np.abs(final.amplitudes)))
            got = CaState.from_int((actual >> shift) & (total - 1), spec.n)
            lines.append(
                f"equivalence: FAIL at x={CaState.from_int(value, spec.n)} "
                f"(quantum {got} != classical {image})"
            )
    lines.append(f"equivalence: {matches}/{total} basis states match")
    lines.append(
        "uncomputation: intermediate layers clean on all inputs"
        if clean
        else "uncomputation: FAIL (see equivalence mismatches)"
    )

    superposed = apply_circuit(
        new_basis_state(layout.num_qubits, 0, max_qubits=max_qubits),
        prepare_superposition(layout) + uca,
    )
    images = evolve_ints(np.arange(total), spec.n, spec.rule, spec.boundary, spec.m)
    expected_amps = np.zeros_like(superposed.amplitudes)
    amp = 1.0 / np.sqrt(total)
    for value in range(total):
        expected_amps[value | (int(images[value]) << shift)] = amp
    deviation = float(np.max(np.abs(superposed.amplitudes - expected_amps)))
    lines.append(f"superposition: max amplitude deviation {deviation:.3e}")
    if deviation > 1e-12:
        ok = False
        lines.append("superposition: FAIL (deviation above 1e-12)")

    if q is not None:
        report = preimages(spec, q)
        shown = " ".join(str(s) for s in report.preimages[:16])
        suffix = " ..." if report.l > 16 else ""
        lines.append(f"preimages(q={q}): l={report.l} [{shown}{suffix}]")

    lines.append("PASS" if ok else "FAIL")
    return ok, lines


def cmd_verify(cfg: RunConfig) -> int:
    spec = _make_spec(cfg)
    target = _parse_bits(cfg.target, "--target", spec.n) if cfg.target else None
    ok, lines = run_verification(spec, target, cfg.style, max_qubits=max_qubit_budget())
    _write_output("\n".join(lines) + "\n", cfg.output_path)
    return 0 if ok else 1


def cmd_circuit(cfg: RunConfig) -> int:
    spec = _make_spec(cfg)
    budget = max_qubit_budget()
    if cfg.kind == "grover":
        layout = RegisterLayout.literal(spec.n, spec.m, phase_ancilla=True)
        if layout.num_qubits > budget:
            raise ResourceError(
                f"circuit needs {layout.num_qubits} qubits, budget is {budget}"
            )
        target = _parse_bits(cfg.target or "", "--target", spec.n)
        oracle = grover.build_oracle(
            spec, target, layout, grover.PAPER_LITERAL, literal_st=cfg.literal_st
        )
        circuit = oracle.mark + grover.build_diffusion(layout)
    else:
        layout = RegisterLayout.literal(spec.n, spec.m)
        circuit = build_uca(spec, layout, cfg.style, max_qubits=budget)
    _write_output(export_qct(circuit), cfg.output_path)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qca",
        description="Reversible quantum circuits and Grover preimage search for 1D cellular automata.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True, help="number of cells")
        p.add_argument("--m", type=int, default=1, help="evolution steps (default 1)")
        p.add_argument("--rule", type=int, default=90, help="Wolfram rule number (default 90)")
        p.add_argument(
            "--boundary",
            choices=["periodic", "fixed_zero"],
            default="periodic",
            help="boundary condition (default periodic)",
        )
        p.add_argument("--output", "-o", default=None, help="write output to a file")

    p_evolve = sub.add_parser("evolve", help="print the classical evolution of one state")
    common(p_evolve)
    p_evolve.add_argument("--init", required=True, help="initial state bit string, cell 0 first")
    p_evolve.set_defaults(handler=cmd_evolve)

    p_search = sub.add_parser("search", help="Grover search for preimages of a target pattern")
    common(p_search)
    p_search.add_argument("--target", required=True, help="target pattern bit string")
    p_search.add_argument(
        "--oracle-style",
        choices=[grover.RECOMPUTE, grover.PAPER_LITERAL],
        default=grover.RECOMPUTE,
        dest="oracle_style",
    )
    p_search.add_argument(
        "--schedule", choices=[grover.FIXED_K, grover.DOUBLING], default=grover.FIXED_K
    )
    p_search.add_argument("--k", type=int, default=None, help="fixed iteration count")
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--repeats", type=int, default=1, help="independent seeded runs")
    p_search.add_argument("--format", choices=["json", "csv"], default="json")
    p_search.add_argument(
        "--timing", action="store_true", help="include wall-clock times (non-reproducible)"
    )
    p_search.set_defaults(handler=cmd_search)

    p_verify = sub.add_parser("verify", help="cross-check circuits against the classical engine")
    common(p_verify)
    p_verify.add_argument("--target", default=None, help="also report preimages of this pattern")
    p_verify.add_argument(
        "--style",
        choices=[GENERIC_TABLE, PAPER_DECOMPOSITION],
        default=GENERIC_TABLE,
        help="cell-update compilation style",
    )
    p_verify.set_defaults(handler=cmd_verify)

    p_circuit = sub.add_parser("circuit", help="emit a circuit in QCT text form")
    common(p_circuit)
    p_circuit.add_argument("--kind", choices=["uca", "grover"], default="uca")
    p_circuit.add_argument(
        "--style",
        choices=[GENERIC_TABLE, PAPER_DECOMPOSITION],
        default=GENERIC_TABLE,
        help="cell-update compilation style (uca only)",
    )
    p_circuit.add_argument("--target", default=None, help="target pattern (grover only)")
    p_circuit.add_argument(
        "--literal-st",
        action="store_true",
        dest="literal_st",
        help="emit the explicit X-sandwich pattern conditioner",
    )
    p_circuit.set_defaults(handler=cmd_circuit)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=args.subcommand, n=args.n)
    for name in (
        "m", "rule", "boundary", "target", "oracle_style", "schedule", "k",
        "seed", "format", "init", "style", "literal_st", "kind", "repeats", "timing",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    cfg.output_path = args.output
    if cfg.repeats < 1:
        raise _UsageError(f"--repeats: must be >= 1, got {cfg.repeats}")
    if args.subcommand == "circuit":
        cfg.mode = "literal"
    elif args.subcommand == "verify":
        cfg.mode = "literal"
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return args.handler(cfg)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ResourceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

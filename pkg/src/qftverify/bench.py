"""Benchmark sweeps: generate, mutate, verify, and record time and memory.

Reported time follows the independent-per-qubit methodology: a correct
circuit records its worst-case qubit time, an erroneous circuit records the
time of the first qubit that produced a counterexample.  Memory is the peak
of Python allocations during one untimed verification pass (timed passes run
without instrumentation so the numbers stay clean); it is approximate by
nature and recorded as such.

Sizes above the desk-scale cap are skipped unless explicitly allowed, and a
skip is marked in the results rather than silently dropped.  Huge sizes are
verified by streaming the generated gates line by line instead of
materializing tens of millions of gate objects.
"""

from __future__ import annotations

import csv
import time
import tracemalloc
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .abstraction import CircuitTypeError, _interpret_line
from .boolexpr import DEFAULT_TERM_BUDGET
from .checker import (
    TYPE_ERROR,
    VERIFIED,
    CheckerConfig,
    VerificationReport,
    _check_line_bits,
    verify_circuit,
)
from .circuit import (
    CircuitDescription,
    ErrorSpec,
    GateInstance,
    IncorrectControl,
    IncorrectGateOrder,
    generate_qft,
    inject_error,
    iter_qft_gates,
    qft_gate_count,
)

__all__ = [
    "DEFAULT_SIZE_CAP",
    "TABLE_SCENARIOS",
    "BenchRecord",
    "BenchConfig",
    "BenchResult",
    "scenario_error_spec",
    "run_bench",
    "run_position_sweep",
    "write_csv",
    "write_plot_data",
]

DEFAULT_SIZE_CAP = 2048

# Above this size circuits are stream-verified instead of materialized.
STREAM_THRESHOLD = DEFAULT_SIZE_CAP

TABLE_SCENARIOS = ("correct", "gate-2", "gate-n", "control-2", "control-n")


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark measurement (see module docstring for the timing rules)."""

    qubits: int
    gates: int
    scenario: str
    verdict: str
    backend: str
    time_s: float
    mem_mb: float


@dataclass
class BenchConfig:
    sizes: Sequence[int] = ()
    scenarios: Sequence[str] = TABLE_SCENARIOS
    repeats: int = 1
    size_cap: int = DEFAULT_SIZE_CAP
    allow_huge: bool = False
    exhaustive: bool = False
    measure_memory: bool = True


@dataclass
class BenchResult:
    records: list[BenchRecord] = field(default_factory=list)
    skipped_sizes: list[int] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return bool(self.skipped_sizes)


def scenario_error_spec(name: str, m: int) -> ErrorSpec | None:
    """The standard single-error mutations benchmarked against each size.

    gate-2: the first rotation on qubit 1 (order 2) gets order 3.
    gate-n: the deepest rotation on qubit 1 (order m) gets order m-1.
    control-2: the first rotation on qubit 1 is controlled by qubit 3.
    control-n: the deepest rotation on qubit 1 is controlled by qubit m-1.
    """
    if name == "correct":
        return None
    if m < 4:
        raise ValueError(f"benchmark scenarios need m >= 4, got {m}")
    if name == "gate-2":
        return IncorrectGateOrder(target=1, ordinal=1, wrong_n=3)
    if name == "gate-n":
        return IncorrectGateOrder(target=1, ordinal=m - 1, wrong_n=m - 1)
    if name == "control-2":
        return IncorrectControl(target=1, ordinal=1, wrong_control=3)
    if name == "control-n":
        return IncorrectControl(target=1, ordinal=m - 1, wrong_control=m - 1)
    raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(TABLE_SCENARIOS)}")


def _report_stat_ms(report: VerificationReport, fallback_ms: float) -> tuple[float, str]:
    """(reported milliseconds, backend) per the per-qubit methodology."""
    if report.overall == TYPE_ERROR or not report.records:
        return fallback_ms, "anf"
    if report.overall == VERIFIED:
        worst = max(report.records, key=lambda rec: rec.millis)
        return worst.millis, worst.backend
    for rec in report.records:
        if rec.verdict.status != VERIFIED:
            return rec.millis, rec.backend
    return fallback_ms, "anf"


def _measure_verify(c: CircuitDescription, cfg: BenchConfig) -> BenchRecord:
    checker_cfg = CheckerConfig(exhaustive=cfg.exhaustive)
    mem_mb = 0.0
    if cfg.measure_memory:
        tracemalloc.start()
        verify_circuit(c, checker_cfg)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        mem_mb = peak / (1024.0 * 1024.0)
    best_ms = None
    backend = "anf"
    verdict = ""
    for _ in range(max(1, cfg.repeats)):
        t0 = time.perf_counter()
        report = verify_circuit(c, checker_cfg)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        ms, backend = _report_stat_ms(report, wall_ms)
        verdict = report.overall
        if best_ms is None or ms < best_ms:
            best_ms = ms
    return BenchRecord(
        qubits=c.m, gates=c.gate_count, scenario="", verdict=verdict,
        backend=backend, time_s=best_ms / 1000.0, mem_mb=round(mem_mb, 3),
    )


# ---------------------------------------------------------------------------
# Streaming path for huge sizes
# ---------------------------------------------------------------------------
#
# The canonical generator emits each line's gates contiguously, and the
# standard scenario mutations keep every gate on its own line, so the stream
# can be interpreted and checked one line at a time in O(m) live state.


def _mutated_qft_stream(m: int, spec: ErrorSpec | None) -> Iterable[GateInstance]:
    if spec is None:
        yield from iter_qft_gates(m)
        return
    if not isinstance(spec, (IncorrectGateOrder, IncorrectControl)):
        raise ValueError(f"streaming benchmarks support gate and control mutations, not {spec!r}")
    seen_r = 0
    for g in iter_qft_gates(m):
        if g.kind == "R" and g.target == spec.target:
            seen_r += 1
            if seen_r == spec.ordinal:
                if isinstance(spec, IncorrectGateOrder):
                    g = GateInstance("R", g.target, n=spec.wrong_n, control=g.control)
                else:
                    g = GateInstance("R", g.target, n=g.n, control=spec.wrong_control)
        yield g
    if seen_r < getattr(spec, "ordinal", 0):
        raise ValueError(f"line {spec.target} has no rotation ordinal {spec.ordinal}")


def _stream_verify(m: int, spec: ErrorSpec | None, exhaustive: bool) -> tuple[str, float, int]:
    """Verify a generated (optionally mutated) circuit without materializing it.

    Returns (overall verdict, reported milliseconds, gates seen).  Assumes
    line-contiguous gate order, which the generator guarantees and the
    supported mutations preserve.
    """
    gates_seen = 0
    current_line = 0
    items: list[tuple[int, GateInstance]] = []
    done: set[int] = set()
    worst_ms = 0.0
    failing_ms: float | None = None
    overall = VERIFIED

    def finish_line() -> bool:
        nonlocal worst_ms, failing_ms, overall
        if current_line == 0:
            return True
        t0 = time.perf_counter()
        try:
            bits = _interpret_line(m, items)
            verdict = _check_line_bits(bits, current_line, m, DEFAULT_TERM_BUDGET)
        except CircuitTypeError:
            overall = TYPE_ERROR
            return False
        ms = (time.perf_counter() - t0) * 1000.0
        worst_ms = max(worst_ms, ms)
        if verdict.status != VERIFIED:
            if overall == VERIFIED:
                overall = verdict.status
                failing_ms = ms
            return exhaustive
        return True

    for ordinal, gate in enumerate(_mutated_qft_stream(m, spec), start=1):
        gates_seen += 1
        if gate.target != current_line:
            if not finish_line():
                return overall, failing_ms if failing_ms is not None else worst_ms, gates_seen
            if gate.target in done:
                raise ValueError("gate stream is not line-contiguous; cannot stream-verify")
            done.add(current_line)
            current_line = gate.target
            items = []
        items.append((ordinal, gate))
    finish_line()
    reported = failing_ms if failing_ms is not None else worst_ms
    return overall, reported, gates_seen


def _bench_one(m: int, scenario: str, cfg: BenchConfig) -> BenchRecord:
    spec = scenario_error_spec(scenario, m)
    if m > STREAM_THRESHOLD:
        if cfg.measure_memory:
            tracemalloc.start()
            _stream_verify(m, spec, cfg.exhaustive)
            _, peak = tracemalloc.get_traced_memory()
            tracemalloc.stop()
            mem_mb = peak / (1024.0 * 1024.0)
        else:
            mem_mb = 0.0
        best_ms = None
        verdict = ""
        gates = qft_gate_count(m)
        for _ in range(max(1, cfg.repeats)):
            verdict, ms, _ = _stream_verify(m, spec, cfg.exhaustive)
            if best_ms is None or ms < best_ms:
                best_ms = ms
        return BenchRecord(qubits=m, gates=gates, scenario=scenario, verdict=verdict,
                           backend="anf", time_s=best_ms / 1000.0, mem_mb=round(mem_mb, 3))
    circuit = generate_qft(m)
    if spec is not None:
        circuit = inject_error(circuit, spec)
    record = _measure_verify(circuit, cfg)
    return BenchRecord(
        qubits=record.qubits, gates=record.gates, scenario=scenario,
        verdict=record.verdict, backend=record.backend,
        time_s=record.time_s, mem_mb=record.mem_mb,
    )


def run_bench(cfg: BenchConfig) -> BenchResult:
    """Run the sweep described by ``cfg``; sizes beyond the cap are skipped
    (with a marker) unless huge sizes are explicitly allowed."""
    result = BenchResult()
    for m in cfg.sizes:
        if m > cfg.size_cap and not cfg.allow_huge:
            result.skipped_sizes.append(m)
            continue
        for scenario in cfg.scenarios:
            result.records.append(_bench_one(m, scenario, cfg))
    return result


def run_position_sweep(m: int, positions: Sequence[int], repeats: int = 3,
                       measure_memory: bool = True) -> BenchResult:
    """Move a rotation-order error across qubit lines and measure each verify.

    Position k mutates the first rotation gate of qubit k (lines 1..m-1 carry
    rotations; the last line has none to mutate).  Scenario labels read
    incorrect-gate@q<k>.
    """
    result = BenchResult()
    base = generate_qft(m) if m <= STREAM_THRESHOLD else None
    cfg = BenchConfig(repeats=repeats, measure_memory=measure_memory)
    for k in positions:
        if not 1 <= k <= m - 1:
            raise ValueError(f"position {k} out of range 1..{m - 1}")
        spec = IncorrectGateOrder(target=k, ordinal=1, wrong_n=3)
        if base is not None:
            record = _measure_verify(inject_error(base, spec), cfg)
            record = BenchRecord(
                qubits=record.qubits, gates=record.gates,
                scenario=f"incorrect-gate@q{k}", verdict=record.verdict,
                backend=record.backend, time_s=record.time_s, mem_mb=record.mem_mb,
            )
        else:
            best_ms = None
            verdict = ""
            for _ in range(max(1, repeats)):
                verdict, ms, _ = _stream_verify(m, spec, exhaustive=False)
                if best_ms is None or ms < best_ms:
                    best_ms = ms
            record = BenchRecord(qubits=m, gates=qft_gate_count(m),
                                 scenario=f"incorrect-gate@q{k}", verdict=verdict,
                                 backend="anf", time_s=best_ms / 1000.0, mem_mb=0.0)
        result.records.append(record)
    return result


CSV_COLUMNS = ("qubits", "gates", "scenario", "verdict", "backend", "time_s", "mem_mb")


def write_csv(result: BenchResult, path: Path | str) -> None:
    """CSV with the schema qubits,gates,scenario,verdict,backend,time_s,mem_mb.

    A truncated sweep gets an explicit trailing marker comment.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for rec in result.records:
            writer.writerow([rec.qubits, rec.gates, rec.scenario, rec.verdict,
                             rec.backend, f"{rec.time_s:.6f}", f"{rec.mem_mb:.3f}"])
        if result.truncated:
            sizes = ", ".join(str(s) for s in result.skipped_sizes)
            handle.write(f"# truncated: sizes skipped by resource budget: {sizes}\n")


def write_plot_data(result: BenchResult, path: Path | str) -> None:
    """Gnuplot-friendly blocks (one index per scenario): gates, time, memory."""
    path = Path(path)
    by_scenario: dict[str, list[BenchRecord]] = {}
    for rec in result.records:
        by_scenario.setdefault(rec.scenario, []).append(rec)
    blocks = []
    for scenario, records in by_scenario.items():
        lines = [f"# scenario: {scenario}", "# gates time_s mem_mb"]
        for rec in sorted(records, key=lambda r: r.gates):
            lines.append(f"{rec.gates} {rec.time_s:.6f} {rec.mem_mb:.3f}")
        blocks.append("\n".join(lines))
    path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")

"""Quantifier-free bit-vector obligations and external solver driving.

Each qubit's correctness obligation is emitted as a standalone SMT-LIB2 file
over the logic of fixed-width bit-vectors: inputs are Boolean constants, the
line's output term is built gate by gate (if-then-else on the control, fixed
width addition for the modular accumulate), and the file asserts that output
and target differ.  ``unsat`` therefore means the qubit is correct, and a
``sat`` model is a counterexample assignment.

Solvers are driven strictly as child processes; nothing links against a
solver library.  The command comes from configuration, with the QFTV_SOLVER
environment variable taking precedence.
"""

from __future__ import annotations

import os
import re
import resource
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .abstraction import _interpret_line, eval_bits, typecheck
from .boolexpr import evaluate
from .checker import QubitVerdict, UNRESOLVED, VERIFIED, VIOLATION, _check_line_bits, target_vector
from .circuit import CircuitDescription, GateInstance

__all__ = [
    "SolverConfig",
    "SolverResult",
    "ModelAssignment",
    "ModelParseError",
    "SOLVER_ENV_VAR",
    "solver_from_env",
    "emit_smt2",
    "invoke_solver",
    "parse_model",
    "write_obligations",
    "make_qubit_checker",
]

SOLVER_ENV_VAR = "QFTV_SOLVER"


class ModelParseError(Exception):
    """Solver output did not contain a readable model."""


@dataclass(frozen=True)
class SolverConfig:
    """How to launch the solver: a command string (shell-style split) that
    receives the obligation file path as its last argument."""

    command: str = "z3"
    timeout_s: float | None = None


@dataclass(frozen=True)
class ModelAssignment:
    """Total assignment parsed from a model; ``defaulted`` lists variables the
    solver omitted (don't-cares), which default to false."""

    values: dict[int, int]
    defaulted: tuple[int, ...]


@dataclass(frozen=True)
class SolverResult:
    """Classified outcome of one solver run.

    status is "unsat", "sat", "unknown", or "failure".  peak_mb is the
    operating system's high-water memory mark over child processes, which is
    approximate (it is cumulative across earlier children).
    """

    status: str
    model: ModelAssignment | None = None
    reason: str = ""
    wall_s: float = 0.0
    peak_mb: float | None = None


def solver_from_env(default_command: str | None = None) -> SolverConfig | None:
    """Solver configuration from QFTV_SOLVER (or a default), or None when the
    executable cannot be found on PATH."""
    command = os.environ.get(SOLVER_ENV_VAR, "").strip() or default_command or "z3"
    parts = shlex.split(command)
    if not parts or shutil.which(parts[0]) is None:
        return None
    return SolverConfig(command=command)


def _bv_literal(width: int, hot: int | None) -> str:
    """Binary bit-vector literal with bit ``hot`` (1-based from the left) set."""
    bits = ["0"] * width
    if hot is not None:
        bits[hot - 1] = "1"
    return "#b" + "".join(bits)


def _emit_obligation(line_items: Sequence[tuple[int, GateInstance]], i: int, m: int) -> str:
    """SMT-LIB2 text for one typechecked line.  Deterministic, byte-stable."""
    sort = f"(_ BitVec {m})"
    out = ["(set-logic QF_BV)"]
    for k in range(1, m + 1):
        out.append(f"(declare-const b{k} Bool)")
    zero = _bv_literal(m, None)
    step = -1
    for _, gate in line_items:
        if gate.kind == "H":
            term = f"(ite b{gate.target} {_bv_literal(m, 1)} {zero})"
        else:
            addend = f"(ite b{gate.control} {_bv_literal(m, gate.n)} {zero})"
            term = f"(bvadd s{step} {addend})"
        step += 1
        out.append(f"(define-fun s{step} () {sort} {term})")
    if step < 0:
        raise ValueError(f"line {i} never receives an H gate; it has no bit-vector obligation")
    out.append(f"(define-fun actual () {sort} s{step})")
    pieces = [f"(ite b{k} #b1 #b0)" for k in range(i, m + 1)]
    if i > 1:
        pieces.append("#b" + "0" * (i - 1))
    target = pieces[0]
    for piece in pieces[1:]:
        target = f"(concat {target} {piece})"
    out.append(f"(define-fun target () {sort} {target})")
    out.append("(assert (not (= actual target)))")
    out.append("(check-sat)")
    out.append("(get-model)")
    return "\n".join(out) + "\n"


def emit_smt2(c: CircuitDescription, i: int) -> str:
    """Emit qubit i's obligation for a type-correct circuit.

    Type errors are decided before any solver sees the circuit, so this
    raises CircuitTypeError rather than encoding an ill-typed line.
    """
    typecheck(c)
    if not 1 <= i <= c.m:
        raise IndexError(f"qubit {i} out of range 1..{c.m}")
    items = [(k, g) for k, g in enumerate(c.gates, start=1) if g.target == i]
    return _emit_obligation(items, i, c.m)


def write_obligations(c: CircuitDescription, directory: Path | str) -> list[Path]:
    """Write q<i>.smt2 for every qubit that has an obligation; returns paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    typecheck(c)
    paths = []
    items_by_line: dict[int, list] = {i: [] for i in range(1, c.m + 1)}
    for k, g in enumerate(c.gates, start=1):
        items_by_line[g.target].append((k, g))
    for i in range(1, c.m + 1):
        if not any(g.kind == "H" for _, g in items_by_line[i]):
            continue
        path = directory / f"q{i}.smt2"
        path.write_text(_emit_obligation(items_by_line[i], i, c.m), encoding="utf-8")
        paths.append(path)
    return paths


_MODEL_ENTRY = re.compile(
    r"\(\s*define-fun\s+b(\d+)\s*\(\s*\)\s*Bool\s+(true|false)\s*\)", re.S
)
_STATUS_LINE = re.compile(r"^\s*(sat|unsat|unknown)\s*$", re.M)


def parse_model(output: str, m: int) -> ModelAssignment:
    """Extract a total assignment for b1..bm from solver model output.

    Tolerant of whitespace and entry order.  Variables the solver omitted
    default to false and are flagged.  Raises ModelParseError when no model
    entries are present at all.
    """
    values: dict[int, int] = {}
    for match in _MODEL_ENTRY.finditer(output):
        index = int(match.group(1))
        if 1 <= index <= m:
            values[index] = 1 if match.group(2) == "true" else 0
    if not values:
        raise ModelParseError("no model entries found in solver output")
    defaulted = tuple(k for k in range(1, m + 1) if k not in values)
    for k in defaulted:
        values[k] = 0
    return ModelAssignment(values=values, defaulted=defaulted)


def _declared_width(text: str) -> int:
    indices = [int(s) for s in re.findall(r"\(declare-const\s+b(\d+)\s+Bool\s*\)", text)]
    if not indices:
        raise ModelParseError("obligation file declares no input variables")
    return max(indices)


def invoke_solver(cfg: SolverConfig, obligation_path: Path | str) -> SolverResult:
    """Run the solver on one obligation file and classify its verdict.

    Timeouts are enforced at the process level (solver-agnostic) and reported
    as Unknown("timeout").  A missing executable or unclassifiable output
    becomes a failure result rather than an exception.
    """
    path = Path(obligation_path)
    argv = shlex.split(cfg.command) + [str(path)]
    start = time.perf_counter()
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=cfg.timeout_s
        )
    except FileNotFoundError as exc:
        return SolverResult("failure", reason=f"cannot launch solver: {exc}",
                            wall_s=time.perf_counter() - start)
    except subprocess.TimeoutExpired:
        return SolverResult("unknown", reason="timeout",
                            wall_s=time.perf_counter() - start, peak_mb=_children_peak_mb())
    wall = time.perf_counter() - start
    peak = _children_peak_mb()
    match = _STATUS_LINE.search(proc.stdout)
    if match is None:
        head = (proc.stderr or proc.stdout).strip().splitlines()
        return SolverResult(
            "failure",
            reason=f"exit {proc.returncode}: {head[0] if head else 'no output'}",
            wall_s=wall, peak_mb=peak,
        )
    status = match.group(1)
    if status == "unsat":
        return SolverResult("unsat", wall_s=wall, peak_mb=peak)
    if status == "unknown":
        return SolverResult("unknown", reason="solver returned unknown", wall_s=wall, peak_mb=peak)
    try:
        model = parse_model(proc.stdout, _declared_width(path.read_text(encoding="utf-8")))
    except ModelParseError as exc:
        return SolverResult("failure", reason=str(exc), wall_s=wall, peak_mb=peak)
    return SolverResult("sat", model=model, wall_s=wall, peak_mb=peak)


def _children_peak_mb() -> float:
    # Linux reports ru_maxrss in kilobytes; high-water over all reaped children.
    return resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss / 1024.0


def make_qubit_checker(c: CircuitDescription, lines: Sequence[Sequence[tuple[int, GateInstance]]],
                       cfg: SolverConfig) -> Callable[[int], QubitVerdict]:
    """Per-qubit solver-backed decision procedure for verify_circuit.

    Sat models are re-validated locally against the abstract semantics before
    a violation is reported, so a nonconforming solver cannot fabricate a
    counterexample.
    """

    def check(i: int) -> QubitVerdict:
        items = lines[i - 1]
        if not any(g.kind == "H" for _, g in items):
            return _check_line_bits(None, i, c.m, budget=0)
        with tempfile.TemporaryDirectory(prefix="qftv-smt-") as tmp:
            path = Path(tmp) / f"q{i}.smt2"
            path.write_text(_emit_obligation(items, i, c.m), encoding="utf-8")
            result = invoke_solver(cfg, path)
        if result.status == "unsat":
            return QubitVerdict(qubit=i, status=VERIFIED)
        if result.status == "sat":
            assignment = dict(result.model.values)
            bits = _interpret_line(c.m, items)
            actual = tuple(evaluate(b, assignment) for b in bits)
            expected = eval_bits(target_vector(i, c.m), assignment)
            if actual == expected:
                return QubitVerdict(
                    qubit=i, status=UNRESOLVED,
                    detail="solver model failed local re-validation; treating as unresolved",
                )
            detail = ""
            if result.model.defaulted:
                names = ", ".join(f"b{k}" for k in result.model.defaulted)
                detail = f"model omitted {names}; defaulted to false"
            return QubitVerdict(
                qubit=i, status=VIOLATION, counterexample=assignment,
                expected=expected, actual=actual, detail=detail,
            )
        return QubitVerdict(qubit=i, status=UNRESOLVED,
                            detail=f"solver {result.status}: {result.reason}")

    return check

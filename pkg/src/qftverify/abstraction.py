"""Typed rotation semantics: wire typing and the symbolic abstract interpreter.

On basis inputs every gate in these circuits acts as a rotation by a negative
power of two of a full turn, so a qubit's state abstracts to a width-m
*fractional bit-vector*: bit p (1-based, bit 1 most significant) has weight
2**-p, and the vector <.x1..xm> denotes the fraction of a full rotation
accumulated on the line.  Bits are symbolic Boolean expressions over the
circuit's input variables b1..bm.

Wire typing: a line starts as Control (its initial Boolean value) and becomes
Data (a fractional bit-vector) at its unique H gate.  An H gate consumes a
Control and produces the one-bit-set vector conditioned on its input; a
rotation of order n adds, modulo 1, a one-hot vector at position n ANDed with
its control's initial value.  Violations of this discipline are the type
errors that expose structural circuit defects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .boolexpr import FALSE, BoolExpr, and_, evaluate, var, xor
from .circuit import CircuitDescription, GateInstance

__all__ = [
    "WireType",
    "TypeErrorKind",
    "CircuitTypeError",
    "WireTyping",
    "SymbolicBitVector",
    "AbstractOutputs",
    "typecheck",
    "abstract_h",
    "abstract_rn",
    "symbolic_add_mod",
    "run_abstract",
    "eval_bits",
    "bits_to_string",
]


class WireType(enum.Enum):
    CONTROL = "control"
    DATA = "data"


class TypeErrorKind(enum.Enum):
    """Wire-kind mismatches; values name the offended gate port.

    RN_CONTROL_PORT_GOT_DATA is unreachable for circuits built from this IR
    (controls are initial-line taps by construction) and exists so reports
    can name the case if the invariant is ever broken by hand-built inputs.
    """

    H_ON_DATA_WIRE = "h-on-data-wire"
    RN_DATA_PORT_GOT_CONTROL = "rn-data-port-got-control"
    RN_CONTROL_PORT_GOT_DATA = "rn-control-port-got-data"
    DUPLICATE_H = "duplicate-h"


class CircuitTypeError(Exception):
    """A wire-kind mismatch, located by gate ordinal (1-based) and qubit line."""

    def __init__(self, kind: TypeErrorKind, line: int, gate_ordinal: int, message: str):
        super().__init__(f"gate {gate_ordinal} (line {line}): {message}")
        self.kind = kind
        self.line = line
        self.gate_ordinal = gate_ordinal


@dataclass(frozen=True)
class WireTyping:
    """Successful typing: for each line, the gate ordinal where it turns Data.

    ``h_gate_ordinal[i-1]`` is the 1-based program position of line i's H, or
    None when the line never receives one (legal only if no rotation targets
    it; such a line stays Control to the end).
    """

    h_gate_ordinal: tuple[int | None, ...]

    def wire_type_after(self, line: int, gate_ordinal: int) -> WireType:
        h = self.h_gate_ordinal[line - 1]
        return WireType.DATA if h is not None and gate_ordinal >= h else WireType.CONTROL


@dataclass(frozen=True)
class SymbolicBitVector:
    """Width-m fractional bit-vector; ``bits[0]`` is bit 1, the 2**-1 bit."""

    width: int
    bits: tuple[BoolExpr, ...]

    def __post_init__(self):
        if len(self.bits) != self.width:
            raise ValueError(f"expected {self.width} bits, got {len(self.bits)}")

    @classmethod
    def zero(cls, m: int) -> "SymbolicBitVector":
        return cls(m, (FALSE,) * m)

    @classmethod
    def one_hot(cls, n: int, m: int, value: BoolExpr) -> "SymbolicBitVector":
        """``value`` at bit position n (weight 2**-n), zero elsewhere."""
        if not 1 <= n <= m:
            raise ValueError(f"bit position {n} out of range 1..{m}")
        bits = [FALSE] * m
        bits[n - 1] = value
        return cls(m, tuple(bits))

    def bit(self, p: int) -> BoolExpr:
        """Bit p, 1-based from the most significant fractional position."""
        return self.bits[p - 1]

    def __str__(self) -> str:
        return "<." + " ".join(str(b) for b in self.bits) + ">"


def abstract_h(qc: BoolExpr, m: int) -> SymbolicBitVector:
    """H on a Control value: rotation 1/2 of a turn iff the input is 1.

    Output bits are (qc, 0, ..., 0): a half-turn when qc holds, none
    otherwise.
    """
    return SymbolicBitVector.one_hot(1, m, qc)


def abstract_rn(qc: BoolExpr, qd: SymbolicBitVector, n: int, m: int) -> SymbolicBitVector:
    """Controlled rotation of order n: add 2**-n of a turn iff qc holds.

    The conditional add is expressed by ANDing the control into the one-hot
    addend, which coincides with if-then-else branching on every concrete
    control value and stays total on symbolic ones.
    """
    if qd.width != m:
        raise ValueError(f"data width {qd.width} does not match m={m}")
    if not 1 <= n <= m:
        raise ValueError(f"rotation order {n} not representable in {m} fractional bits")
    return symbolic_add_mod(qd, SymbolicBitVector.one_hot(n, m, qc))


def symbolic_add_mod(a: SymbolicBitVector, b: SymbolicBitVector) -> SymbolicBitVector:
    """Fixed-point modular addition: ripple-carry from bit m up, carry out of
    bit 1 discarded (values wrap modulo one full rotation)."""
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} vs {b.width}")
    bits = list(a.bits)
    carry = FALSE
    for p in range(a.width - 1, -1, -1):
        x, y = bits[p], b.bits[p]
        bits[p] = xor(xor(x, y), carry)
        # majority(x, y, carry) over GF(2): xy ^ carry(x ^ y)
        carry = xor(and_(x, y), and_(carry, xor(x, y)))
    return SymbolicBitVector(a.width, tuple(bits))


def eval_bits(v: SymbolicBitVector, assignment: Mapping[int, int]) -> tuple[int, ...]:
    """Concrete bits of ``v`` under an input assignment."""
    return tuple(evaluate(bit, assignment) for bit in v.bits)


def bits_to_string(bits: Sequence[int]) -> str:
    """Render concrete bits in fractional notation, e.g. (1,0,1) -> "0.101"."""
    return "0." + "".join(str(b) for b in bits)


@dataclass(frozen=True)
class AbstractOutputs:
    """Final per-line symbolic bit-vectors of a type-correct circuit.

    A line that never receives an H stays Control and has no bit-vector; its
    entry is None and the property checker reports it as a violation (an
    unrotated wire cannot carry the required output form).
    """

    width: int
    per_qubit: tuple[SymbolicBitVector | None, ...]

    def qubit(self, i: int) -> SymbolicBitVector | None:
        """Output of qubit i (1-based)."""
        if not 1 <= i <= self.width:
            raise IndexError(f"qubit {i} out of range 1..{self.width}")
        return self.per_qubit[i - 1]


def typecheck(gates_or_circuit: CircuitDescription | Iterable[GateInstance],
              m: int | None = None) -> WireTyping:
    """Check the wire-typing discipline; raise CircuitTypeError on violation.

    Success means every line has at most one H and no rotation targets a line
    before its H.  Accepts either a circuit or a raw gate iterable with ``m``
    (the latter lets benchmark sweeps stream huge circuits).
    """
    if isinstance(gates_or_circuit, CircuitDescription):
        gates: Iterable[GateInstance] = gates_or_circuit.gates
        m = gates_or_circuit.m
    else:
        gates = gates_or_circuit
        if m is None:
            raise ValueError("m is required when typechecking a raw gate iterable")
    h_at: list[int | None] = [None] * m
    rotated_since_h = [False] * m
    for ordinal, gate in enumerate(gates, start=1):
        line = gate.target
        if gate.kind == "H":
            if h_at[line - 1] is not None:
                if rotated_since_h[line - 1]:
                    raise CircuitTypeError(
                        TypeErrorKind.H_ON_DATA_WIRE, line, ordinal,
                        f"H applied to line {line} after it became a data wire",
                    )
                raise CircuitTypeError(
                    TypeErrorKind.DUPLICATE_H, line, ordinal,
                    f"second H gate on line {line}",
                )
            h_at[line - 1] = ordinal
        else:
            if h_at[line - 1] is None:
                raise CircuitTypeError(
                    TypeErrorKind.RN_DATA_PORT_GOT_CONTROL, line, ordinal,
                    f"rotation targets line {line}, which has no preceding H "
                    f"(control value on a data port)",
                )
            rotated_since_h[line - 1] = True
    return WireTyping(tuple(h_at))


def _interpret_line(m: int, items: Sequence[tuple[int, GateInstance]]) -> list[BoolExpr] | None:
    """Run one line's gates under the abstract semantics.

    ``items`` are (program ordinal, gate) pairs for a single line, already
    typechecked.  Returns the final bit list, or None if the line never
    receives an H.  The one-hot adds are done in place with early carry
    cut-off, so a gate costs O(live carry chain), not O(m).
    """
    bits: list[BoolExpr] | None = None
    for ordinal, gate in items:
        if gate.kind == "H":
            if bits is not None:
                raise CircuitTypeError(
                    TypeErrorKind.H_ON_DATA_WIRE, gate.target, ordinal,
                    "H on a data wire reached the interpreter; typecheck first",
                )
            bits = [FALSE] * m
            bits[0] = var(gate.target)
        else:
            if bits is None:
                raise CircuitTypeError(
                    TypeErrorKind.RN_DATA_PORT_GOT_CONTROL, gate.target, ordinal,
                    "rotation on a control wire reached the interpreter; typecheck first",
                )
            n = gate.n
            if n is None or n > m:
                raise ValueError(f"rotation order {n} not representable in {m} bits")
            qc = var(gate.control)
            p = n - 1
            carry = and_(bits[p], qc)
            bits[p] = xor(bits[p], qc)
            p -= 1
            while p >= 0 and carry is not FALSE:
                carry, bits[p] = and_(bits[p], carry), xor(bits[p], carry)
                p -= 1
            # carry out of bit 1 is the modulo-one wrap: dropped
    return bits


def group_gates_by_line(c: CircuitDescription) -> list[list[tuple[int, GateInstance]]]:
    """Per-line (program ordinal, gate) lists; index 0 holds line 1."""
    lines: list[list[tuple[int, GateInstance]]] = [[] for _ in range(c.m)]
    for ordinal, gate in enumerate(c.gates, start=1):
        lines[gate.target - 1].append((ordinal, gate))
    return lines


def run_abstract(c: CircuitDescription) -> AbstractOutputs:
    """Interpret the whole circuit abstractly; raises CircuitTypeError.

    Gates on distinct lines commute under these semantics (controls tap
    initial values only), so each line is folded independently.
    """
    typecheck(c)
    outputs: list[SymbolicBitVector | None] = []
    for items in group_gates_by_line(c):
        bits = _interpret_line(c.m, items)
        outputs.append(None if bits is None else SymbolicBitVector(c.m, tuple(bits)))
    return AbstractOutputs(c.m, tuple(outputs))

import random
from fractions import Fraction

import pytest

from qftverify.abstraction import (
    AbstractOutputs,
    CircuitTypeError,
    SymbolicBitVector,
    TypeErrorKind,
    abstract_h,
    abstract_rn,
    eval_bits,
    run_abstract,
    symbolic_add_mod,
    typecheck,
)
from qftverify.boolexpr import FALSE, TRUE, anf_normalize, var
from qftverify.circuit import (
    CircuitDescription,
    DuplicateH,
    GateInstance,
    IncorrectControl,
    MissingH,
    generate_qft,
    inject_error,
)
from helpers import all_basis_inputs, bits_as_int, concrete_line_values


def vec(*bits):
    return SymbolicBitVector(len(bits), tuple(bits))


def value_of(v: SymbolicBitVector, assignment) -> Fraction:
    return Fraction(bits_as_int(eval_bits(v, assignment)), 2 ** v.width)


class TestAbstractH:
    def test_one_input(self):
        assert abstract_h(TRUE, 3) == vec(TRUE, FALSE, FALSE)

    def test_zero_input(self):
        assert abstract_h(FALSE, 3) == vec(FALSE, FALSE, FALSE)

    def test_symbolic_input(self):
        assert abstract_h(var(2), 3) == vec(var(2), FALSE, FALSE)


class TestAbstractRn:
    def test_concrete_add(self):
        # half turn plus quarter turn
        out = abstract_rn(TRUE, vec(TRUE, FALSE, FALSE), n=2, m=3)
        assert out == vec(TRUE, TRUE, FALSE)

    def test_control_zero_is_identity(self):
        qd = vec(var(1), var(2), FALSE)
        assert abstract_rn(FALSE, qd, n=3, m=3) == qd

    def test_symbolic_control_fills_bit(self):
        out = abstract_rn(var(3), vec(var(1), var(2), FALSE), n=3, m=3)
        assert out == vec(var(1), var(2), var(3))

    def test_order_finer_than_width_rejected(self):
        with pytest.raises(ValueError, match="not representable"):
            abstract_rn(var(2), SymbolicBitVector.zero(3), n=4, m=3)


class TestAddMod:
    def test_concrete_carry(self):
        # 1/8 + 1/8 = 1/4
        assert symbolic_add_mod(vec(FALSE, FALSE, TRUE), vec(FALSE, FALSE, TRUE)) \
            == vec(FALSE, TRUE, FALSE)

    def test_msb_carry_discarded(self):
        b = var(1)
        out = symbolic_add_mod(vec(b, FALSE, FALSE), vec(b, FALSE, FALSE))
        # truth table over b: b=0 gives 0, b=1 gives 1/2+1/2 = 1 = 0 (mod 1)
        assert out == vec(FALSE, FALSE, FALSE)

    def test_carry_into_next_bit(self):
        b = var(1)
        out = symbolic_add_mod(vec(FALSE, FALSE, b), vec(FALSE, FALSE, b))
        # two eighth turns make one quarter turn, for either value of b
        assert out == vec(FALSE, b, FALSE)

    def test_width_mismatch(self):
        with pytest.raises(ValueError, match="width mismatch"):
            symbolic_add_mod(SymbolicBitVector.zero(2), SymbolicBitVector.zero(3))

    def _random_vec(self, rng, width, num_vars):
        bits = []
        for _ in range(width):
            roll = rng.random()
            if roll < 0.3:
                bits.append(FALSE)
            elif roll < 0.4:
                bits.append(TRUE)
            else:
                bits.append(var(rng.randint(1, num_vars)))
        return SymbolicBitVector(width, tuple(bits))

    def test_commutative_and_associative(self):
        rng = random.Random(99)
        for _ in range(40):
            width = rng.randint(1, 8)
            nv = rng.randint(1, 6)
            a, b, c = (self._random_vec(rng, width, nv) for _ in range(3))
            ab = symbolic_add_mod(a, b)
            ba = symbolic_add_mod(b, a)
            assert [anf_normalize(x) for x in ab.bits] == [anf_normalize(x) for x in ba.bits]
            left = symbolic_add_mod(ab, c)
            right = symbolic_add_mod(a, symbolic_add_mod(b, c))
            assert [anf_normalize(x) for x in left.bits] == [anf_normalize(x) for x in right.bits]

    def test_modulo_law_against_fractions(self):
        rng = random.Random(7)
        for _ in range(40):
            width = rng.randint(1, 8)
            nv = rng.randint(1, 6)
            a = self._random_vec(rng, width, nv)
            b = self._random_vec(rng, width, nv)
            total = symbolic_add_mod(a, b)
            for bits in all_basis_inputs(nv):
                sigma = {k + 1: bits[k] for k in range(nv)}
                expect = (value_of(a, sigma) + value_of(b, sigma)) % 1
                assert value_of(total, sigma) == expect


class TestTypecheck:
    def test_generated_circuits_are_well_typed(self):
        typing = typecheck(generate_qft(4))
        assert typing.h_gate_ordinal == (1, 5, 8, 10)

    def test_missing_h_flags_first_rotation(self):
        mutated = inject_error(generate_qft(3), MissingH(2))
        with pytest.raises(CircuitTypeError) as info:
            typecheck(mutated)
        assert info.value.kind == TypeErrorKind.RN_DATA_PORT_GOT_CONTROL
        assert info.value.line == 2
        assert info.value.gate_ordinal == 4  # the rotation targeting line 2

    def test_duplicate_h_flags_second_h(self):
        mutated = inject_error(generate_qft(3), DuplicateH(1))
        with pytest.raises(CircuitTypeError) as info:
            typecheck(mutated)
        assert info.value.kind == TypeErrorKind.DUPLICATE_H
        assert info.value.line == 1
        assert info.value.gate_ordinal == 2

    def test_h_after_rotation_is_data_wire_error(self):
        gates = (
            GateInstance("H", 1),
            GateInstance("R", 1, n=2, control=2),
            GateInstance("H", 1),
            GateInstance("H", 2),
        )
        with pytest.raises(CircuitTypeError) as info:
            typecheck(CircuitDescription(2, gates))
        assert info.value.kind == TypeErrorKind.H_ON_DATA_WIRE
        assert info.value.gate_ordinal == 3

    def test_line_without_any_gates_passes(self):
        # a bare line is not a type error; the property checker reports it
        typing = typecheck(CircuitDescription(2, (GateInstance("H", 1),)))
        assert typing.h_gate_ordinal == (1, None)

    def test_raw_iterable_needs_m(self):
        with pytest.raises(ValueError):
            typecheck(iter([GateInstance("H", 1)]))

    def test_wire_type_query(self):
        from qftverify.abstraction import WireType

        typing = typecheck(generate_qft(3))
        assert typing.wire_type_after(1, 1) == WireType.DATA
        assert typing.wire_type_after(2, 1) == WireType.CONTROL
        assert typing.wire_type_after(2, 4) == WireType.DATA
        assert typing.wire_type_after(3, 5) == WireType.CONTROL


class TestRunAbstract:
    def test_three_qubit_outputs(self):
        outs = run_abstract(generate_qft(3))
        assert outs.qubit(1) == vec(var(1), var(2), var(3))
        assert outs.qubit(2) == vec(var(2), var(3), FALSE)
        assert outs.qubit(3) == vec(var(3), FALSE, FALSE)

    def test_wrong_control_repeats_variable(self):
        mutated = inject_error(generate_qft(3), IncorrectControl(target=1, ordinal=2, wrong_control=2))
        outs = run_abstract(mutated)
        assert outs.qubit(1) == vec(var(1), var(2), var(2))

    def test_duplicate_h_propagates_type_error(self):
        mutated = inject_error(generate_qft(3), DuplicateH(2))
        with pytest.raises(CircuitTypeError) as info:
            run_abstract(mutated)
        assert info.value.kind == TypeErrorKind.DUPLICATE_H

    def test_bare_line_stays_control(self):
        outs = run_abstract(CircuitDescription(2, (GateInstance("H", 1),)))
        assert outs.qubit(2) is None

    @pytest.mark.parametrize("m", [8, 33, 64])
    def test_generated_outputs_are_syntactically_canonical(self, m):
        outs = run_abstract(generate_qft(m))
        for i in range(1, m + 1):
            bits = outs.qubit(i).bits
            for p in range(1, m + 1):
                if p <= m - i + 1:
                    assert bits[p - 1] is var(i + p - 1)
                else:
                    assert bits[p - 1] is FALSE

    def test_eval_commutes_with_concrete_execution(self):
        rng = random.Random(2024)
        from qftverify.circuit import enumerate_error_specs, inject_error as inject

        for m in (2, 3, 5, 8, 16):
            base = generate_qft(m)
            circuits = [base]
            specs = list(enumerate_error_specs(base))
            rng.shuffle(specs)
            for spec in specs[:6]:
                circuits.append(inject(base, spec))
            for c in circuits:
                try:
                    outs = run_abstract(c)
                except CircuitTypeError:
                    continue
                for _ in range(8):
                    bits = tuple(rng.randint(0, 1) for _ in range(m))
                    sigma = {k + 1: bits[k] for k in range(m)}
                    concrete = concrete_line_values(c, bits)
                    for i in range(1, m + 1):
                        vec_i = outs.qubit(i)
                        if vec_i is None:
                            assert concrete[i - 1] is None
                        else:
                            assert bits_as_int(eval_bits(vec_i, sigma)) == concrete[i - 1]


class TestEvalBits:
    def test_substitution(self):
        v = vec(var(1), var(2), var(3))
        assert eval_bits(v, {1: 1, 2: 0, 3: 1}) == (1, 0, 1)

    def test_constant_vector(self):
        assert eval_bits(SymbolicBitVector.zero(3), {1: 1, 2: 1, 3: 1}) == (0, 0, 0)

    def test_qubit_two_of_three(self):
        outs = run_abstract(generate_qft(3))
        assert eval_bits(outs.qubit(2), {1: 0, 2: 1, 3: 1}) == (1, 1, 0)

    def test_unassigned_variable(self):
        with pytest.raises(ValueError, match="unassigned"):
            eval_bits(vec(var(1), var(2)), {1: 1})


class TestAbstractOutputs:
    def test_index_bounds(self):
        outs = run_abstract(generate_qft(2))
        with pytest.raises(IndexError):
            outs.qubit(0)
        with pytest.raises(IndexError):
            outs.qubit(3)
        assert isinstance(outs, AbstractOutputs)

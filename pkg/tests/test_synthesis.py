"""
Tests for state preparation, controlled circuits, CSWAP/Toffoli decompositions, transpilation and depth.
"""
import cmath
import math

import numpy as np
import pytest

from src.errors import InvalidArgumentError, UnsupportedGateError, WidthMismatchError
from src.statevector import (
    Circuit,
    GateKind,
    Polarity,
    StateVector,
    ccx,
    circuit_unitary,
    controlled_gate,
    cswap,
    cx,
    cz,
    gate_matrix,
    global_phase,
    h,
    random_state,
    rx,
    ry,
    rz,
    s,
    sdg,
    swap,
    sx,
    unitary,
    x,
)
from src.synthesis import (
    BASIS_GATE_SET,
    SeparablePrepSpec,
    SynthesizedPrep,
    control_circuit,
    controlled,
    controlled_inflation,
    cx_equivalent_count,
    decompose_cswap,
    decompose_registers_cswap,
    decompose_toffoli,
    depth,
    euler_zsx,
    is_transpiled,
    prepare_basis_state,
    prepare_separable,
    prepare_state,
    prepared_state,
    transpile,
    wrap_angle,
    zyz_angles,
)


def _random_unitary(dim, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _assert_same_unitary(a, b, atol=1e-10):
    np.testing.assert_allclose(circuit_unitary(a), circuit_unitary(b), atol=atol)


def _peeled_layers(circuit):
    """
    Depth by repeatedly removing the front layer: gates with no earlier remaining gate on their qubits.
    """
    remaining = [g for g in circuit if g.kind != GateKind.GLOBAL_PHASE]
    layers = 0
    while remaining:
        blocked, rest = set(), []
        for gate in remaining:
            if not blocked.isdisjoint(gate.qubits):
                rest.append(gate)
            blocked.update(gate.qubits)
        remaining = rest
        layers += 1
    return layers


# ---------------------------------------------------------------------------
# state preparation
# ---------------------------------------------------------------------------

class TestPrepareState:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_prepares_random_targets_exactly(self, n):
        for seed in range(3):
            target = random_state(n, seed)
            prep = prepare_state(target)
            np.testing.assert_allclose(prepared_state(prep).amplitudes, target.amplitudes, atol=1e-10)

    def test_sparse_target(self):
        target = StateVector.from_amplitudes([0, 0.6, 0.8j, 0])
        np.testing.assert_allclose(prepared_state(prepare_state(target)).amplitudes, target.amplitudes, atol=1e-10)

    def test_rejects_unnormalized_target(self):
        with pytest.raises(InvalidArgumentError):
            prepare_state(StateVector(1, [1, 1]))

    def test_global_phase_is_tracked_not_synthesized(self):
        target = random_state(2, 5)
        theta = 0.7
        base = prepare_state(target)
        rotated = prepare_state(target.scaled(cmath.exp(1j * theta)))
        assert len(rotated.circuit) == len(base.circuit)
        np.testing.assert_allclose(
            prepared_state(rotated).amplitudes, target.amplitudes * cmath.exp(1j * theta), atol=1e-10
        )

    def test_uses_only_cx_ry_rz(self):
        prep = prepare_state(random_state(3, 2))
        assert {g.kind for g in prep.circuit} <= {GateKind.CX, GateKind.RY, GateKind.RZ}

    def test_basis_state_preparation(self):
        prep = prepare_basis_state("101")
        assert prep.global_phase == 0.0
        assert int(np.argmax(np.abs(prepared_state(prep).amplitudes))) == 5
        assert all(g.kind == GateKind.X for g in prep.circuit)

    def test_separable_preparation_is_tensor_power(self):
        spec = SeparablePrepSpec(block_qubits=2, block_count=2, block_seed=4)
        block = random_state(2, 4)
        prep = prepare_separable(spec)
        assert prep.num_qubits == 4
        expected = np.kron(block.amplitudes, block.amplitudes)
        np.testing.assert_allclose(prepared_state(prep).amplitudes, expected, atol=1e-10)

    def test_separable_spec_validation(self):
        with pytest.raises(InvalidArgumentError):
            SeparablePrepSpec(block_qubits=0, block_count=1)

    def test_separable_block_width_checked(self):
        with pytest.raises(WidthMismatchError):
            prepare_separable(SeparablePrepSpec(2, 2), random_state(3, 0))


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

class TestDecompositions:
    def test_toffoli_matches_ccx_exactly(self):
        _assert_same_unitary(Circuit(3, decompose_toffoli(0, 1, 2)), Circuit(3, [ccx(0, 1, 2)]))

    def test_toffoli_uses_six_cx(self):
        assert sum(1 for g in decompose_toffoli(0, 1, 2) if g.kind == GateKind.CX) == 6

    def test_cswap_matches_primitive(self):
        _assert_same_unitary(decompose_cswap(0, 1, 2), Circuit(3, [cswap(0, 1, 2)]))
        _assert_same_unitary(decompose_cswap(2, 0, 1), Circuit(3, [cswap(2, 0, 1)]))

    def test_cswap_is_permutation(self):
        u = circuit_unitary(decompose_cswap(0, 1, 2))
        expected = np.eye(8)
        expected[[3, 5]] = expected[[5, 3]]
        np.testing.assert_allclose(u, expected, atol=1e-10)

    def test_cswap_costs_eight_cx(self):
        assert cx_equivalent_count(decompose_cswap(0, 1, 2)) == 8

    @pytest.mark.parametrize("n", range(1, 9))
    def test_register_cswap_costs_8n(self, n):
        circuit = decompose_registers_cswap(0, range(1, n + 1), range(n + 1, 2 * n + 1))
        assert cx_equivalent_count(circuit) == 8 * n
        assert circuit.num_qubits == 2 * n + 1

    def test_register_cswap_rejects_overlap(self):
        with pytest.raises(InvalidArgumentError):
            decompose_registers_cswap(0, [1, 2], [2, 3])

    def test_register_cswap_rejects_length_mismatch(self):
        with pytest.raises(WidthMismatchError):
            decompose_registers_cswap(0, [1, 2], [3])

    def test_cswap_needs_distinct_qubits(self):
        with pytest.raises(InvalidArgumentError):
            decompose_cswap(0, 1, 1)


# ---------------------------------------------------------------------------
# Euler angles
# ---------------------------------------------------------------------------

class TestEuler:
    MATRICES = [
        gate_matrix(h(0)),
        gate_matrix(s(0)),
        gate_matrix(x(0)),
        gate_matrix(sx(0)),
        gate_matrix(rx(0, 0.3)),
        gate_matrix(ry(0, math.pi / 2)),
        np.eye(2, dtype=complex),
        _random_unitary(2, 1),
        _random_unitary(2, 2),
    ]

    @pytest.mark.parametrize("index", range(len(MATRICES)))
    def test_zyz_reconstructs(self, index):
        matrix = self.MATRICES[index]
        alpha, beta, gamma, delta = zyz_angles(matrix)
        rebuilt = cmath.exp(1j * alpha) * (
            gate_matrix(rz(0, beta)) @ gate_matrix(ry(0, gamma)) @ gate_matrix(rz(0, delta))
        )
        np.testing.assert_allclose(rebuilt, matrix, atol=1e-10)
        assert 0.0 <= gamma <= math.pi + 1e-12

    @pytest.mark.parametrize("index", range(len(MATRICES)))
    def test_euler_zsx_is_exact(self, index):
        matrix = self.MATRICES[index]
        gates = euler_zsx(matrix, 0)
        assert {g.kind for g in gates} <= BASIS_GATE_SET | {GateKind.GLOBAL_PHASE}
        np.testing.assert_allclose(circuit_unitary(Circuit(1, gates)), matrix, atol=1e-10)

    def test_wrap_angle(self):
        assert wrap_angle(3 * math.pi) == pytest.approx((math.pi, 1))
        wrapped, turns = wrap_angle(-math.pi)
        assert wrapped == pytest.approx(math.pi)
        assert turns == -1
        assert wrap_angle(0.5) == (0.5, 0)


# ---------------------------------------------------------------------------
# controlled circuits
# ---------------------------------------------------------------------------

class TestControl:
    @pytest.mark.parametrize("polarity", [Polarity.ON_ONE, Polarity.ON_ZERO])
    def test_gatewise_control_matches_controlled_gate(self, polarity):
        inner = Circuit(3, [
            h(0), s(1), sdg(2), rx(0, 0.2), ry(1, -0.4), rz(2, 1.3), x(0), sx(1),
            cx(0, 1), cz(1, 2), swap(0, 2), ccx(0, 1, 2), cswap(2, 0, 1), global_phase(0.9),
            unitary(_random_unitary(2, 3), 1),
        ])
        gatewise = control_circuit(inner, 3, [0, 1, 2], 4, polarity)
        reference = Circuit(4, [controlled_gate(inner, 3, [0, 1, 2], polarity)])
        _assert_same_unitary(gatewise, reference)

    def test_nested_controlled_instruction(self):
        inner = Circuit(2, [controlled_gate(ry(0, 0.7), 1, [0]), h(1)])
        gatewise = control_circuit(inner, 2, [0, 1], 3)
        reference = Circuit(3, [controlled_gate(inner, 2, [0, 1])])
        _assert_same_unitary(gatewise, reference)

    def test_controlled_prep_block_structure(self):
        prep = prepare_state(random_state(2, 8))
        u = circuit_unitary(prep.circuit)
        phase = cmath.exp(1j * prep.global_phase)
        zero = np.zeros((4, 4))
        np.testing.assert_allclose(
            circuit_unitary(controlled(prep)), np.block([[np.eye(4), zero], [zero, phase * u]]), atol=1e-10
        )
        np.testing.assert_allclose(
            circuit_unitary(controlled(prep, Polarity.ON_ZERO)),
            np.block([[phase * u, zero], [zero, np.eye(4)]]),
            atol=1e-10,
        )

    def test_controlled_branch_prepares_target(self):
        target = random_state(2, 21)
        prep = prepare_state(target)
        column = circuit_unitary(controlled(prep))[:, 4]
        np.testing.assert_allclose(column[4:], target.amplitudes, atol=1e-10)

    def test_promoted_phase_is_observable(self):
        prep = SynthesizedPrep(Circuit(1), math.pi / 3)
        u = circuit_unitary(controlled(prep))
        phase = cmath.exp(1j * math.pi / 3)
        np.testing.assert_allclose(np.diag(u), [1, 1, phase, phase], atol=1e-12)

    def test_multi_qubit_payload_not_controllable(self):
        inner = Circuit(2, [unitary(_random_unitary(4, 1), 0, 1)])
        with pytest.raises(UnsupportedGateError):
            control_circuit(inner, 2, [0, 1], 3)

    def test_control_must_not_be_a_target(self):
        with pytest.raises(InvalidArgumentError):
            control_circuit(Circuit(1, [h(0)]), 0, [0], 1)

    def test_target_count_checked(self):
        with pytest.raises(WidthMismatchError):
            control_circuit(Circuit(2), 0, [1], 3)

    def test_inflation_within_bound(self):
        inflation = controlled_inflation(prepare_state(random_state(3, 6)))
        assert inflation["controlled_two_qubit"] <= inflation["bound"]
        assert inflation["ratio"] > 1.0


# ---------------------------------------------------------------------------
# transpilation and metrics
# ---------------------------------------------------------------------------

class TestTranspile:
    def test_output_uses_basis_only(self):
        circuit = Circuit(3, [h(0), cx(0, 1), swap(1, 2), ccx(0, 1, 2), s(2), rx(1, 0.3), cswap(0, 1, 2)])
        lowered = transpile(circuit)
        assert is_transpiled(lowered)
        assert not is_transpiled(circuit)

    def test_exact_including_phase(self):
        circuit = Circuit(3, [
            h(0), cx(0, 1), rz(1, 5.0), rz(1, 4.0), swap(1, 2), ccx(0, 1, 2), sdg(2),
            ry(0, 2.2), cswap(2, 0, 1), global_phase(0.4), unitary(_random_unitary(2, 9), 1),
            controlled_gate(ry(0, 0.3), 2, [0]),
        ])
        _assert_same_unitary(transpile(circuit), circuit, atol=1e-9)

    def test_single_global_phase_entry(self):
        lowered = transpile(Circuit(2, [h(0), s(1), cx(0, 1), h(1)]))
        assert sum(1 for g in lowered if g.kind == GateKind.GLOBAL_PHASE) <= 1

    def test_consecutive_rz_merged(self):
        lowered = transpile(Circuit(1, [rz(0, 0.1), rz(0, 0.2)]))
        rotations = [g for g in lowered if g.kind == GateKind.RZ]
        assert len(rotations) == 1
        assert rotations[0].angle == pytest.approx(0.3)

    def test_cancelling_rz_dropped(self):
        lowered = transpile(Circuit(1, [rz(0, 0.4), rz(0, -0.4)]))
        assert [g for g in lowered if g.kind == GateKind.RZ] == []

    def test_cx_becomes_one_cz(self):
        lowered = transpile(Circuit(2, [cx(0, 1)]))
        assert sum(1 for g in lowered if g.kind == GateKind.CZ) == 1

    def test_transpiled_cswap_has_eight_cz(self):
        lowered = transpile(decompose_cswap(0, 1, 2))
        assert sum(1 for g in lowered if g.kind == GateKind.CZ) == 8

    def test_multi_qubit_payload_rejected(self):
        with pytest.raises(UnsupportedGateError):
            transpile(Circuit(2, [unitary(_random_unitary(4, 2), 0, 1)]))


class TestMetrics:
    def test_depth_counts_layers(self):
        assert depth(Circuit(2, [h(0), h(1), cx(0, 1), global_phase(1.0)])) == 2

    def test_depth_of_empty_circuit(self):
        assert depth(Circuit(3)) == 0

    def test_depth_serial_chain(self):
        assert depth(Circuit(1, [h(0), s(0), x(0)])) == 3

    def test_cx_equivalent_weights(self):
        circuit = Circuit(3, [cx(0, 1), cz(1, 2), swap(0, 2), ccx(0, 1, 2), cswap(0, 1, 2), h(0)])
        assert cx_equivalent_count(circuit) == 1 + 1 + 3 + 6 + 8

    @pytest.mark.parametrize("transpiled", [False, True])
    def test_cswap_depth_matches_layer_peeling(self, transpiled):
        circuit = decompose_cswap(0, 1, 2)
        if transpiled:
            circuit = transpile(circuit)
        assert depth(circuit) == _peeled_layers(circuit)
        assert depth(circuit) > 8

    def test_register_depth_matches_layer_peeling(self):
        circuit = transpile(decompose_registers_cswap(0, [1, 2], [3, 4]))
        assert depth(circuit) == _peeled_layers(circuit)

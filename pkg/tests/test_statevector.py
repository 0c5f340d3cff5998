"""
Tests for the statevector simulator: conventions, gate application, unitaries, sampling and transforms.
"""
import math

import numpy as np
import pytest

from src.errors import InvalidArgumentError, NonUnitaryError, WidthMismatchError
from src.statevector import (
    Circuit,
    Gate,
    GateKind,
    Polarity,
    StateVector,
    ancilla_outcome_probabilities,
    apply_circuit,
    apply_gate,
    basis_coefficient,
    basis_probability,
    basis_state,
    ccx,
    circuit_unitary,
    compose,
    controlled_gate,
    cswap,
    cx,
    cz,
    derive_seeds,
    gate_matrix,
    global_phase,
    h,
    inner_product,
    inverse_circuit,
    make_rng,
    random_state,
    remap_circuit,
    rx,
    ry,
    rz,
    s,
    sample_ancilla,
    sample_basis_counts,
    simulate,
    swap,
    sx,
    unitary,
    x,
    zero_state,
)

CX_MATRIX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _single_qubit_operator(n, q, matrix):
    """
    Full-register operator from Kronecker factors; qubit 0 is the rightmost factor.
    """
    factors = [np.eye(2, dtype=complex)] * n
    factors[n - 1 - q] = matrix
    operator = factors[0]
    for factor in factors[1:]:
        operator = np.kron(operator, factor)
    return operator


def _cx_permutation(n, control, target):
    dim = 2 ** n
    operator = np.zeros((dim, dim), dtype=complex)
    for index in range(dim):
        image = index ^ (1 << target) if (index >> control) & 1 else index
        operator[image, index] = 1
    return operator


def _index_of(state):
    """
    Index of the single nonzero amplitude of a basis state.
    """
    return int(np.argmax(np.abs(state.amplitudes)))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

class TestStates:
    def test_zero_state(self):
        state = zero_state(3)
        assert state.amplitudes[0] == 1
        assert state.norm_squared() == pytest.approx(1.0)

    def test_basis_state_is_most_significant_first(self):
        assert _index_of(basis_state("10")) == 2
        assert _index_of(basis_state("001")) == 1

    def test_zero_width_rejected(self):
        with pytest.raises(InvalidArgumentError):
            zero_state(0)

    def test_from_amplitudes_normalizes(self):
        state = StateVector.from_amplitudes([1, 1], normalize=True)
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_from_amplitudes_requires_power_of_two(self):
        with pytest.raises(InvalidArgumentError):
            StateVector.from_amplitudes([1, 0, 0])

    def test_amplitudes_are_read_only(self):
        state = zero_state(1)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0

    def test_scaled_applies_phase(self):
        state = zero_state(1).scaled(1j)
        assert state.amplitudes[0] == pytest.approx(1j)


# ---------------------------------------------------------------------------
# gate construction and application
# ---------------------------------------------------------------------------

class TestGates:
    def test_repeated_qubits_rejected(self):
        with pytest.raises(InvalidArgumentError):
            cx(1, 1)

    def test_rotation_needs_angle(self):
        with pytest.raises(InvalidArgumentError):
            Gate(GateKind.RZ, (0,))

    def test_non_unitary_payload_rejected(self):
        with pytest.raises(NonUnitaryError):
            unitary(np.array([[1, 1], [0, 1]]), 0)

    def test_oversized_payload_rejected(self):
        with pytest.raises(InvalidArgumentError):
            unitary(np.eye(16), 0, 1, 2, 3)

    def test_rz_convention(self):
        theta = 0.7
        np.testing.assert_allclose(
            gate_matrix(rz(0, theta)), np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
        )

    def test_x_on_qubit_zero_sets_least_significant_bit(self):
        state = apply_gate(zero_state(2), x(0))
        assert _index_of(state) == 1

    def test_cx_first_qubit_is_control(self):
        state = apply_gate(basis_state("01"), cx(0, 1))
        assert _index_of(state) == 3
        state = apply_gate(basis_state("01"), cx(1, 0))
        assert _index_of(state) == 1

    def test_ccx_flips_target_when_both_controls_set(self):
        state = apply_gate(basis_state("011"), ccx(0, 1, 2))
        assert _index_of(state) == 7

    def test_cswap_exchanges_targets(self):
        state = apply_gate(basis_state("011"), cswap(0, 1, 2))
        assert _index_of(state) == 5

    def test_cswap_idle_when_control_clear(self):
        state = apply_gate(basis_state("010"), cswap(0, 1, 2))
        assert _index_of(state) == 2

    def test_unitary_payload_matches_cx(self):
        state = apply_gate(basis_state("01"), unitary(CX_MATRIX, 0, 1))
        assert _index_of(state) == 3

    def test_global_phase_multiplies(self):
        state = apply_gate(zero_state(2), global_phase(math.pi / 2))
        assert state.amplitudes[0] == pytest.approx(1j)

    def test_hadamard_superposition(self):
        state = apply_gate(zero_state(1), h(0))
        assert basis_probability(state, "0") == pytest.approx(0.5)
        assert basis_probability(state, "1") == pytest.approx(0.5)

    def test_controlled_gate_on_one(self):
        gate = controlled_gate(x(0), 1, [0])
        assert _index_of(apply_gate(basis_state("10"), gate)) == 3
        assert _index_of(apply_gate(basis_state("00"), gate)) == 0

    def test_controlled_gate_on_zero(self):
        gate = controlled_gate(x(0), 1, [0], Polarity.ON_ZERO)
        assert _index_of(apply_gate(basis_state("00"), gate)) == 1
        assert _index_of(apply_gate(basis_state("10"), gate)) == 2

    def test_gate_outside_state_rejected(self):
        with pytest.raises(InvalidArgumentError):
            apply_gate(zero_state(1), x(1))

    def test_norm_preserved(self):
        state = random_state(3, 4)
        circuit = Circuit(3, [h(0), cx(0, 1), ry(2, 0.3), cswap(2, 0, 1), sx(1)])
        assert apply_circuit(state, circuit).norm_squared() == pytest.approx(1.0, abs=1e-12)

    def test_norm_drift_over_long_circuit(self):
        rng = np.random.default_rng(17)
        n = 12
        gates = []
        for _ in range(10_000):
            choice = rng.integers(5)
            q, other = (int(v) for v in rng.choice(n, size=2, replace=False))
            if choice == 0:
                gates.append(h(q))
            elif choice == 1:
                gates.append(ry(q, float(rng.uniform(-math.pi, math.pi))))
            elif choice == 2:
                gates.append(rz(q, float(rng.uniform(-math.pi, math.pi))))
            elif choice == 3:
                gates.append(sx(q))
            else:
                gates.append(cx(q, other))
        state = apply_circuit(random_state(n, 8), Circuit(n, gates))
        assert abs(state.norm_squared() - 1.0) <= 1e-9

    def test_application_is_linear(self):
        circuit = Circuit(3, [h(0), cx(0, 1), ry(2, 0.3), cswap(2, 0, 1), rz(1, -1.2), sx(1)])
        a, b = random_state(3, 21), random_state(3, 22)
        alpha, beta = 0.6 - 0.2j, -0.3 + 0.7j
        mixed = StateVector(3, alpha * a.amplitudes + beta * b.amplitudes)
        expected = alpha * apply_circuit(a, circuit).amplitudes + beta * apply_circuit(b, circuit).amplitudes
        np.testing.assert_allclose(apply_circuit(mixed, circuit).amplitudes, expected, atol=1e-12)


# ---------------------------------------------------------------------------
# circuits and unitaries
# ---------------------------------------------------------------------------

class TestCircuits:
    def test_append_checks_range(self):
        with pytest.raises(InvalidArgumentError):
            Circuit(2).append(x(2))

    def test_width_mismatch(self):
        with pytest.raises(WidthMismatchError):
            apply_circuit(zero_state(2), Circuit(3))

    def test_unitary_columns_are_basis_images(self):
        u = circuit_unitary(Circuit(2, [cx(0, 1)]))
        assert u[3, 1] == pytest.approx(1.0)
        assert u[0, 0] == pytest.approx(1.0)

    def test_unitary_first_column_is_simulation(self):
        circuit = Circuit(3, [h(0), cx(0, 2), rz(1, 0.4), swap(1, 2), s(0)])
        np.testing.assert_allclose(circuit_unitary(circuit)[:, 0], simulate(circuit).amplitudes, atol=1e-12)

    def test_unitary_matches_kronecker_product(self):
        n = 4
        rng = np.random.default_rng(31)
        gates, expected = [], np.eye(2 ** n, dtype=complex)
        for _ in range(40):
            q, other = (int(v) for v in rng.choice(n, size=2, replace=False))
            theta = float(rng.uniform(-math.pi, math.pi))
            kind = int(rng.integers(8))
            if kind == 7:
                gates.append(cx(q, other))
                expected = _cx_permutation(n, q, other) @ expected
                continue
            gate, matrix = [
                (h(q), HADAMARD),
                (x(q), np.array([[0, 1], [1, 0]], dtype=complex)),
                (s(q), np.diag([1, 1j])),
                (sx(q), 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])),
                (rz(q, theta), np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])),
                (ry(q, theta), np.array([[math.cos(theta / 2), -math.sin(theta / 2)],
                                         [math.sin(theta / 2), math.cos(theta / 2)]], dtype=complex)),
                (rx(q, theta), np.array([[math.cos(theta / 2), -1j * math.sin(theta / 2)],
                                         [-1j * math.sin(theta / 2), math.cos(theta / 2)]])),
            ][kind]
            gates.append(gate)
            expected = _single_qubit_operator(n, q, matrix) @ expected
        np.testing.assert_allclose(circuit_unitary(Circuit(n, gates)), expected, atol=1e-10)

    def test_controlled_unitary_is_block_diagonal(self):
        theta = 0.9
        u = circuit_unitary(Circuit(2, [controlled_gate(ry(0, theta), 1, [0])]))
        expected = np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), gate_matrix(ry(0, theta))]])
        np.testing.assert_allclose(u, expected, atol=1e-12)

    def test_unitary_cap(self):
        with pytest.raises(InvalidArgumentError):
            circuit_unitary(Circuit(11))


# ---------------------------------------------------------------------------
# overlaps and probabilities
# ---------------------------------------------------------------------------

class TestOverlaps:
    def test_inner_product_convention(self):
        a, b = random_state(2, 1), random_state(2, 2)
        assert inner_product(a, b) == pytest.approx(np.vdot(b.amplitudes, a.amplitudes))
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))

    def test_inner_product_of_plus_and_zero(self):
        plus = apply_gate(zero_state(1), h(0))
        assert inner_product(plus, zero_state(1)) == pytest.approx(1 / math.sqrt(2))

    def test_orthogonal_basis_states(self):
        assert inner_product(basis_state("01"), basis_state("10")) == 0

    def test_inner_product_width_mismatch(self):
        with pytest.raises(WidthMismatchError):
            inner_product(zero_state(1), zero_state(2))

    def test_basis_coefficient(self):
        state = apply_gate(zero_state(1), h(0))
        assert basis_coefficient(state, "1") == pytest.approx(1 / math.sqrt(2))

    def test_ancilla_probabilities(self):
        state = apply_circuit(zero_state(2), Circuit(2, [h(0), x(1)]))
        p0, p1 = ancilla_outcome_probabilities(state, 0)
        assert (p0, p1) == pytest.approx((0.5, 0.5))
        assert ancilla_outcome_probabilities(state, 1) == pytest.approx((0.0, 1.0))

    def test_ancilla_index_checked(self):
        with pytest.raises(InvalidArgumentError):
            ancilla_outcome_probabilities(zero_state(2), 2)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

class TestSampling:
    def test_negative_seed_rejected(self):
        with pytest.raises(InvalidArgumentError):
            make_rng(-1)

    def test_zero_shots_rejected(self):
        with pytest.raises(InvalidArgumentError):
            sample_ancilla(zero_state(1), 0, 0, seed=1)

    def test_sample_ancilla_is_deterministic(self):
        state = apply_gate(zero_state(2), h(0))
        assert sample_ancilla(state, 0, 1000, seed=5) == sample_ancilla(state, 0, 1000, seed=5)

    def test_sample_ancilla_counts_sum_to_shots(self):
        state = apply_gate(zero_state(2), ry(0, 1.1))
        n0, n1 = sample_ancilla(state, 0, 777, seed=9)
        assert n0 + n1 == 777

    def test_deterministic_outcome(self):
        assert sample_ancilla(zero_state(2), 0, 100, seed=3) == (100, 0)

    def test_basis_counts_on_basis_state(self):
        assert sample_basis_counts(basis_state("10"), 100, seed=0) == {"10": 100}

    def test_even_split_concentrates(self):
        plus = apply_gate(zero_state(1), h(0))
        shots = 1_000_000
        hits = sum(abs(sample_ancilla(plus, 0, shots, seed)[0] / shots - 0.5) <= 5e-3 for seed in range(100))
        assert hits >= 95

    def test_estimate_within_four_over_root_shots(self):
        state = apply_gate(zero_state(2), ry(0, 1.1))
        p0, _ = ancilla_outcome_probabilities(state, 0)
        shots = 10_000
        hits = sum(
            abs(sample_ancilla(state, 0, shots, seed)[0] / shots - p0) <= 4 / math.sqrt(shots)
            for seed in range(200)
        )
        assert hits >= 198

    def test_derived_seeds(self):
        seeds = derive_seeds(7, 3)
        assert seeds == derive_seeds(7, 3)
        assert len(set(seeds)) == 3

    def test_random_state_is_normalized_and_seeded(self):
        a = random_state(3, 11)
        assert a.norm_squared() == pytest.approx(1.0)
        np.testing.assert_array_equal(a.amplitudes, random_state(3, 11).amplitudes)
        assert not np.allclose(a.amplitudes, random_state(3, 12).amplitudes)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

class TestTransforms:
    def test_inverse_circuit(self):
        payload = circuit_unitary(Circuit(1, [ry(0, 0.3), rz(0, 1.2)]))
        circuit = Circuit(3, [
            h(0), s(1), sx(2), rx(0, 0.4), rz(1, -0.8), cx(0, 1), cz(1, 2),
            ccx(0, 1, 2), unitary(payload, 2), global_phase(0.3),
            controlled_gate(ry(0, 0.5), 2, [0]),
        ])
        u = circuit_unitary(circuit)
        u_inv = circuit_unitary(inverse_circuit(circuit))
        np.testing.assert_allclose(u_inv @ u, np.eye(8), atol=1e-12)

    def test_remap_circuit(self):
        remapped = remap_circuit(Circuit(2, [cx(0, 1)]), [3, 1], 4)
        assert remapped.num_qubits == 4
        assert remapped.instructions[0].qubits == (3, 1)

    def test_remap_width_mismatch(self):
        with pytest.raises(WidthMismatchError):
            remap_circuit(Circuit(2), [0], 3)

    def test_compose(self):
        combined = compose(Circuit(2, [h(0)]), Circuit(2, [cx(0, 1)]))
        assert [g.kind for g in combined] == [GateKind.H, GateKind.CX]

    def test_compose_width_mismatch(self):
        with pytest.raises(WidthMismatchError):
            compose(Circuit(1), Circuit(2))

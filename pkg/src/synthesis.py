"""
Circuit synthesis: state preparation by uniformly controlled rotations, gate-wise controlled circuits with
global-phase promotion, CSWAP / Toffoli decompositions, transpilation to the {CZ, RZ, SX, X} basis, and depth.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import ANGLE_TOLERANCE, NORM_TOLERANCE
from .errors import InvalidArgumentError, UnsupportedGateError, WidthMismatchError
from .statevector import (
    Circuit,
    GateKind,
    Polarity,
    StateVector,
    cswap,
    ccx,
    cx,
    cz,
    gate_matrix,
    global_phase,
    h,
    random_state,
    remap_circuit,
    remap_gate,
    rz,
    ry,
    simulate,
    sx,
    x,
)
from .utils import parse_bitstring, qubit_bit

BASIS_GATE_SET = frozenset({GateKind.CZ, GateKind.RZ, GateKind.SX, GateKind.X})
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SynthesizedPrep:
    """
    A preparation circuit plus its tracked global phase: target = exp(i*global_phase) * circuit|0...0>.
    """
    circuit: Circuit
    global_phase: float = 0.0

    @property
    def num_qubits(self):
        return self.circuit.num_qubits


@dataclass(frozen=True)
class SeparablePrepSpec:
    block_qubits: int
    block_count: int
    block_seed: int = 0

    def __post_init__(self):
        if self.block_qubits < 1 or self.block_count < 1:
            raise InvalidArgumentError(
                f"Separable spec needs block_qubits >= 1 and block_count >= 1, "
                f"got {self.block_qubits} x {self.block_count}"
            )

    @property
    def total_qubits(self):
        return self.block_qubits * self.block_count


def _negligible(theta):
    return abs(theta) < ANGLE_TOLERANCE


def wrap_angle(theta):
    """
    Wraps an angle into (-pi, pi]; returns (wrapped, turns) with theta = wrapped + 2*pi*turns.
    """
    turns = math.floor((theta + math.pi) / TWO_PI)
    wrapped = theta - TWO_PI * turns
    if wrapped <= -math.pi:
        wrapped += TWO_PI
        turns -= 1
    return wrapped, turns


def prepared_state(prep):
    """
    Returns the exact target a prep stands for: its simulated output times exp(i*global_phase).
    """
    return simulate(prep.circuit).scaled(cmath.exp(1j * prep.global_phase))


# ---------------------------------------------------------------------------
# State preparation
# ---------------------------------------------------------------------------

def _multiplexed_rotation(kind, target, controls, angles):
    """
    Uniformly controlled rotation: applies R(angles[c]) on target where c = sum(bit(controls[i]) << i).
    Recursive CX-multiplexor, 2^k CX for k controls.
    """
    angles = np.asarray(angles, dtype=float)
    if np.all(np.abs(angles) < ANGLE_TOLERANCE):
        return []
    if not controls:
        return [ry(target, angles[0]) if kind == GateKind.RY else rz(target, angles[0])]

    half = len(angles) // 2
    low, high = angles[:half], angles[half:]
    plus = (low + high) / 2.0
    minus = (low - high) / 2.0
    rest, last = controls[:-1], controls[-1]
    gates = _multiplexed_rotation(kind, target, rest, plus)
    if np.all(np.abs(minus) < ANGLE_TOLERANCE):
        return gates
    gates.append(cx(last, target))
    gates.extend(_multiplexed_rotation(kind, target, rest, minus))
    gates.append(cx(last, target))
    return gates


def prepare_state(target):
    """
    Synthesizes a circuit preparing `target` from |0...0> up to the tracked global phase.
    Magnitudes are loaded top-down with multiplexed RY, then phases with multiplexed RZ.
    """
    norm = target.norm_squared()
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise InvalidArgumentError(f"Target state is not normalized (|psi|^2 = {norm:.12g})")

    n = target.num_qubits
    weights = np.abs(target.amplitudes) ** 2
    gates = []

    for q in range(n - 1, -1, -1):
        prefix_weights = weights.reshape(2 ** (n - q), 2 ** q).sum(axis=1)
        p0, p1 = prefix_weights[0::2], prefix_weights[1::2]
        thetas = 2.0 * np.arctan2(np.sqrt(p1), np.sqrt(p0))
        gates.extend(_multiplexed_rotation(GateKind.RY, q, list(range(q + 1, n)), thetas))

    omega = np.angle(target.amplitudes)
    for q in range(n):
        pairs = omega.reshape(-1, 2)
        thetas = pairs[:, 1] - pairs[:, 0]
        gates.extend(_multiplexed_rotation(GateKind.RZ, q, list(range(q + 1, n)), thetas))
        omega = pairs.mean(axis=1)

    return SynthesizedPrep(Circuit(n, gates), float(omega[0]))


def prepare_basis_state(bitstring):
    """
    X-gate preparation of a computational basis state |t>.
    """
    width = len(bitstring)
    parse_bitstring(bitstring, width)
    gates = [x(q) for q in range(width) if qubit_bit(bitstring, q)]
    return SynthesizedPrep(Circuit(width, gates), 0.0)


def prepare_separable(spec, block_state: Optional[StateVector] = None):
    """
    Prepares the p-fold tensor power of one block state by repeating its circuit on consecutive blocks.
    """
    if block_state is None:
        block_state = random_state(spec.block_qubits, spec.block_seed)
    if block_state.num_qubits != spec.block_qubits:
        raise WidthMismatchError(
            f"Block state has {block_state.num_qubits} qubits, spec says {spec.block_qubits}"
        )
    block = prepare_state(block_state)
    m = spec.block_qubits
    circuit = Circuit(spec.total_qubits)
    for k in range(spec.block_count):
        circuit.extend(remap_circuit(block.circuit, [k * m + q for q in range(m)], spec.total_qubits))
    return SynthesizedPrep(circuit, spec.block_count * block.global_phase)


# ---------------------------------------------------------------------------
# Decompositions
# ---------------------------------------------------------------------------

def decompose_toffoli(c1, c2, target):
    """
    Six-CX Toffoli with T gates written as RZ(+-pi/4); the T-vs-RZ phase is restored exactly.
    """
    quarter = math.pi / 4
    return [
        h(target),
        cx(c2, target), rz(target, -quarter),
        cx(c1, target), rz(target, quarter),
        cx(c2, target), rz(target, -quarter),
        cx(c1, target),
        rz(c2, quarter), rz(target, quarter),
        h(target),
        cx(c1, c2),
        rz(c1, quarter), rz(c2, -quarter),
        cx(c1, c2),
        global_phase(math.pi / 8),
    ]


def _cswap_gates(control, a, b):
    return [cx(b, a), *decompose_toffoli(control, a, b), cx(b, a)]


def decompose_cswap(control, a, b):
    """
    CSWAP as CX(b,a) . Toffoli(control,a,b) . CX(b,a): exactly 8 CX plus one-qubit gates.
    """
    if len({control, a, b}) != 3:
        raise InvalidArgumentError(f"CSWAP needs three distinct qubits, got {(control, a, b)}")
    return Circuit(max(control, a, b) + 1, _cswap_gates(control, a, b))


def decompose_registers_cswap(control, reg_a, reg_b, num_qubits=None):
    """
    Register-wide CSWAP as one decomposed CSWAP per qubit pair: 8n CX for n-qubit registers.
    """
    reg_a, reg_b = list(reg_a), list(reg_b)
    if len(reg_a) != len(reg_b):
        raise WidthMismatchError(f"Registers differ in length: {len(reg_a)} vs {len(reg_b)}")
    used = [control, *reg_a, *reg_b]
    if len(set(used)) != len(used):
        raise InvalidArgumentError("Control and registers must be disjoint")
    width = num_qubits or max(used) + 1
    circuit = Circuit(width)
    for a, b in zip(reg_a, reg_b):
        circuit.extend(_cswap_gates(control, a, b))
    return circuit


# ---------------------------------------------------------------------------
# Single-qubit Euler angles
# ---------------------------------------------------------------------------

def zyz_angles(matrix):
    """
    Returns (alpha, beta, gamma, delta) with U = exp(i alpha) RZ(beta) RY(gamma) RZ(delta), gamma in [0, pi].
    """
    matrix = np.asarray(matrix, dtype=complex)
    alpha = cmath.phase(np.linalg.det(matrix)) / 2.0
    special = matrix * cmath.exp(-1j * alpha)
    gamma = 2.0 * math.atan2(abs(special[1, 0]), abs(special[0, 0]))
    phase_11 = cmath.phase(special[1, 1]) if abs(special[1, 1]) > ANGLE_TOLERANCE else 0.0
    phase_10 = cmath.phase(special[1, 0]) if abs(special[1, 0]) > ANGLE_TOLERANCE else 0.0
    beta = phase_11 + phase_10
    delta = phase_11 - phase_10
    return alpha, beta, gamma, delta


def _sequence_matrix(gates):
    total = np.eye(2, dtype=complex)
    for gate in gates:
        total = gate_matrix(gate) @ total
    return total


def _with_exact_phase(gates, target_matrix):
    """
    Appends the GLOBAL_PHASE that makes the gate sequence equal the target matrix exactly.
    """
    trace = np.trace(_sequence_matrix(gates).conj().T @ target_matrix)
    phase = cmath.phase(trace) if abs(trace) > 0 else 0.0
    if not _negligible(phase):
        gates.append(global_phase(phase))
    return gates


def euler_zsx(matrix, q):
    """
    Lowers a one-qubit unitary onto RZ / SX / X with an exact GLOBAL_PHASE entry.
    """
    _, beta, gamma, delta = zyz_angles(matrix)
    if _negligible(gamma):
        gates = [rz(q, beta + delta)]
    elif _negligible(gamma - math.pi / 2):
        gates = [rz(q, delta - math.pi / 2), sx(q), rz(q, beta + math.pi / 2)]
    elif _negligible(gamma - math.pi):
        gates = [rz(q, delta - beta + math.pi), x(q)]
    else:
        gates = [rz(q, delta), sx(q), rz(q, gamma + math.pi), sx(q), rz(q, beta + math.pi)]
    return _with_exact_phase(gates, matrix)


# ---------------------------------------------------------------------------
# Controlled circuits
# ---------------------------------------------------------------------------

def _controlled_one_qubit(matrix, control, target):
    """
    Two-CX ABC construction: U = e^{ia} A X B X C with ABC = I, phase moved onto the control.
    """
    alpha, beta, gamma, delta = zyz_angles(matrix)
    gates = []
    if not _negligible((delta - beta) / 2):
        gates.append(rz(target, (delta - beta) / 2))
    gates.append(cx(control, target))
    if not _negligible((delta + beta) / 2):
        gates.append(rz(target, -(delta + beta) / 2))
    if not _negligible(gamma):
        gates.append(ry(target, -gamma / 2))
    gates.append(cx(control, target))
    if not _negligible(gamma):
        gates.append(ry(target, gamma / 2))
    if not _negligible(beta):
        gates.append(rz(target, beta))
    gates.extend(_controlled_phase(alpha, control))
    return gates


def _controlled_phase(phi, control):
    """
    Controlled e^{i phi} is the phase gate diag(1, e^{i phi}) = e^{i phi/2} RZ(phi) on the control.
    """
    if _negligible(phi):
        return []
    return [rz(control, phi), global_phase(phi / 2)]


def _controlled_gates(gate, control):
    kind = gate.kind
    if control in gate.qubits:
        raise InvalidArgumentError(f"Control qubit {control} is also a target of {kind.value}")
    if kind == GateKind.GLOBAL_PHASE:
        return _controlled_phase(gate.angle, control)
    if kind == GateKind.X:
        return [cx(control, gate.qubits[0])]
    if kind == GateKind.CX:
        return [ccx(control, *gate.qubits)]
    if kind == GateKind.CZ:
        a, b = gate.qubits
        return [h(b), ccx(control, a, b), h(b)]
    if kind == GateKind.SWAP:
        return [cswap(control, *gate.qubits)]
    if len(gate.qubits) == 1:
        return _controlled_one_qubit(gate_matrix(gate), control, gate.qubits[0])

    gates = []
    for part in _expand_multi_qubit(gate):
        gates.extend(_controlled_gates(part, control))
    return gates


def _expand_multi_qubit(gate):
    """
    Rewrites CCX / CSWAP / CONTROLLED into one-qubit gates, CX and GLOBAL_PHASE.
    """
    kind = gate.kind
    if kind == GateKind.CCX:
        return decompose_toffoli(*gate.qubits)
    if kind == GateKind.CSWAP:
        return _cswap_gates(*gate.qubits)
    if kind == GateKind.CONTROLLED:
        control, targets = gate.qubits[0], gate.qubits[1:]
        width = max(gate.qubits) + 1
        return control_circuit(gate.inner, control, targets, width, gate.polarity).instructions
    raise UnsupportedGateError(
        f"{kind.value} on {len(gate.qubits)} qubits cannot be decomposed (general unitary synthesis)"
    )


def control_circuit(circuit, control, targets, num_qubits, polarity=Polarity.ON_ONE, phase=0.0):
    """
    Gate-wise controlled version of exp(i*phase) * circuit on `num_qubits` qubits, with local qubit j
    mapped to targets[j]. Every GLOBAL_PHASE is promoted to a phase on the control so the
    controlled action is exact. On-zero polarity is X-conjugation of the control.
    """
    targets = list(targets)
    if len(targets) != circuit.num_qubits:
        raise WidthMismatchError(
            f"{len(targets)} targets given for a {circuit.num_qubits}-qubit circuit"
        )
    polarity = Polarity(polarity)
    out = Circuit(num_qubits)
    if polarity == Polarity.ON_ZERO:
        out.append(x(control))
    for gate in circuit:
        out.extend(_controlled_gates(remap_gate(gate, targets), control))
    out.extend(_controlled_phase(phase, control))
    if polarity == Polarity.ON_ZERO:
        out.append(x(control))
    return out


def controlled(prep, polarity=Polarity.ON_ONE):
    """
    Controlled preparation on 1 + n qubits with the control on the highest index, so the unitary is
    the block matrix [[I, 0], [0, e^{i phi} U]] (on-one) or its mirror (on-zero).
    """
    n = prep.num_qubits
    return control_circuit(prep.circuit, n, range(n), n + 1, polarity, prep.global_phase)


# ---------------------------------------------------------------------------
# Transpilation
# ---------------------------------------------------------------------------

def _lower(gate):
    """
    Yields basis gates (plus GLOBAL_PHASE) equal to `gate` exactly.
    """
    kind = gate.kind
    if kind in BASIS_GATE_SET or kind == GateKind.GLOBAL_PHASE:
        yield gate
    elif len(gate.qubits) == 1:
        yield from euler_zsx(gate_matrix(gate), gate.qubits[0])
    elif kind == GateKind.CX:
        control, target = gate.qubits
        yield from _lower(h(target))
        yield cz(control, target)
        yield from _lower(h(target))
    elif kind == GateKind.SWAP:
        a, b = gate.qubits
        for part in (cx(a, b), cx(b, a), cx(a, b)):
            yield from _lower(part)
    else:
        for part in _expand_multi_qubit(gate):
            yield from _lower(part)


def transpile(circuit):
    """
    Rewrites a circuit into {CZ, RZ, SX, X} plus one GLOBAL_PHASE entry. Consecutive RZ on the same
    qubit are merged and zero-angle rotations dropped; no other resynthesis is done.
    """
    out = Circuit(circuit.num_qubits)
    pending = {}
    phase = 0.0

    def flush(q):
        nonlocal phase
        if q not in pending:
            return
        wrapped, turns = wrap_angle(pending.pop(q))
        # RZ(theta + 2*pi*k) = (-1)^k RZ(theta)
        phase += math.pi * turns
        if not _negligible(wrapped):
            out.append(rz(q, wrapped))

    for gate in circuit:
        for basis_gate in _lower(gate):
            if basis_gate.kind == GateKind.GLOBAL_PHASE:
                phase += basis_gate.angle
            elif basis_gate.kind == GateKind.RZ:
                q = basis_gate.qubits[0]
                pending[q] = pending.get(q, 0.0) + basis_gate.angle
            else:
                for q in basis_gate.qubits:
                    flush(q)
                out.append(basis_gate)

    for q in sorted(pending):
        flush(q)
    wrapped, _ = wrap_angle(phase)
    if not _negligible(wrapped):
        out.append(global_phase(wrapped))
    return out


def is_transpiled(circuit):
    return all(g.kind in BASIS_GATE_SET or g.is_bookkeeping for g in circuit)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def depth(circuit):
    """
    Longest chain of gates sharing qubits; each gate is one layer, GLOBAL_PHASE is free.
    """
    levels = [0] * circuit.num_qubits
    for gate in circuit:
        if gate.is_bookkeeping:
            continue
        layer = max(levels[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            levels[q] = layer
    return max(levels, default=0)


_CX_WEIGHT = {
    GateKind.CX: 1,
    GateKind.CZ: 1,
    GateKind.SWAP: 3,
    GateKind.CCX: 6,
    GateKind.CSWAP: 8,
}


def cx_equivalent_count(circuit):
    """
    Two-qubit cost in CX units before transpilation (CCX = 6, CSWAP = 8, SWAP = 3).
    """
    total = 0
    for gate in circuit:
        if gate.kind == GateKind.CONTROLLED:
            width = max(gate.qubits) + 1
            total += cx_equivalent_count(Circuit(width, list(_expand_multi_qubit(gate))))
        else:
            total += _CX_WEIGHT.get(gate.kind, 0)
    return total


def one_qubit_count(circuit):
    return sum(1 for g in circuit if len(g.qubits) == 1)


def controlled_inflation(prep):
    """
    Measures the CX-equivalent growth of gate-wise controlling a prep against the naive bound
    8 * two-qubit + 2 * one-qubit + 2.
    """
    base_two = cx_equivalent_count(prep.circuit)
    base_one = one_qubit_count(prep.circuit)
    controlled_two = cx_equivalent_count(controlled(prep))
    return {
        "prep_two_qubit": base_two,
        "prep_one_qubit": base_one,
        "controlled_two_qubit": controlled_two,
        "bound": 8 * base_two + 2 * base_one + 2,
        "ratio": controlled_two / base_two if base_two else float("inf") if controlled_two else 0.0,
    }

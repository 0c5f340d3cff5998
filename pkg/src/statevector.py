"""
Dense statevector simulation: the gate/circuit IR, gate application, exact outcome probabilities,
seeded shot sampling, and the brute-force inner-product oracle every protocol is validated against.

Conventions used everywhere in the package:
- qubit 0 is the least-significant bit of the amplitude index;
- bitstrings are written most-significant qubit first;
- a gate's matrix is written with its first listed qubit as the most-significant bit
  (so CX(control, target) is the textbook 4x4 matrix);
- RZ(theta) = diag(exp(-i theta/2), exp(+i theta/2)).
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from .config import MATRIX_GATE_MAX_QUBITS, MAX_QUBITS, UNITARY_MAX_QUBITS, UNITARY_TOLERANCE
from .errors import InvalidArgumentError, NonUnitaryError, WidthMismatchError
from .utils import parse_bitstring


class GateKind(str, Enum):
    X = "X"
    SX = "SX"
    SXDG = "SXDG"
    H = "H"
    S = "S"
    SDG = "SDG"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CX = "CX"
    CZ = "CZ"
    SWAP = "SWAP"
    CCX = "CCX"
    CSWAP = "CSWAP"
    UNITARY = "UNITARY"
    CONTROLLED = "CONTROLLED"
    GLOBAL_PHASE = "GLOBAL_PHASE"


class Polarity(str, Enum):
    ON_ONE = "on-one"
    ON_ZERO = "on-zero"


ROTATION_KINDS = {GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.GLOBAL_PHASE}
FIXED_ARITY = {
    GateKind.X: 1,
    GateKind.SX: 1,
    GateKind.SXDG: 1,
    GateKind.H: 1,
    GateKind.S: 1,
    GateKind.SDG: 1,
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.CX: 2,
    GateKind.CZ: 2,
    GateKind.SWAP: 2,
    GateKind.CCX: 3,
    GateKind.CSWAP: 3,
    GateKind.GLOBAL_PHASE: 0,
}

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_FIXED_MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.SX: 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
    GateKind.SXDG: 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex),
    GateKind.H: _SQRT2_INV * np.array([[1, 1], [1, -1]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def _permutation_matrix(size, swap_a, swap_b):
    matrix = np.eye(size, dtype=complex)
    matrix[[swap_a, swap_b]] = matrix[[swap_b, swap_a]]
    return matrix


# control is the most-significant bit: CCX exchanges |110>,|111>; CSWAP exchanges |101>,|110>
_FIXED_MATRICES[GateKind.CCX] = _permutation_matrix(8, 6, 7)
_FIXED_MATRICES[GateKind.CSWAP] = _permutation_matrix(8, 5, 6)


def is_unitary(matrix, atol=UNITARY_TOLERANCE):
    """
    Checks U^dagger U = I entrywise within the tolerance.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=atol)


@dataclass(frozen=True)
class Gate:
    """
    A tagged gate instruction. `qubits` lists control(s) first where applicable. For CONTROLLED
    gates, `inner` is a Circuit whose local qubit j acts on `qubits[1 + j]`.
    """
    kind: GateKind
    qubits: tuple = ()
    angle: Optional[float] = None
    matrix: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    inner: Optional["Circuit"] = None
    polarity: Polarity = Polarity.ON_ONE

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidArgumentError(f"{self.kind.value} has repeated qubit indices {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise InvalidArgumentError(f"{self.kind.value} has a negative qubit index {self.qubits}")

        if self.kind in FIXED_ARITY and len(self.qubits) != FIXED_ARITY[self.kind]:
            raise InvalidArgumentError(
                f"{self.kind.value} acts on {FIXED_ARITY[self.kind]} qubit(s), got {len(self.qubits)}"
            )
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise InvalidArgumentError(f"{self.kind.value} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        if self.kind == GateKind.UNITARY:
            self._check_matrix()
        if self.kind == GateKind.CONTROLLED:
            if self.inner is None or len(self.qubits) != 1 + self.inner.num_qubits:
                raise InvalidArgumentError("CONTROLLED needs a control plus one qubit per inner qubit")
            object.__setattr__(self, "polarity", Polarity(self.polarity))

    def _check_matrix(self):
        if self.matrix is None:
            raise InvalidArgumentError("UNITARY requires a matrix payload")
        matrix = np.array(self.matrix, dtype=complex)
        k = len(self.qubits)
        if k == 0 or k > MATRIX_GATE_MAX_QUBITS:
            raise InvalidArgumentError(
                f"UNITARY payload must act on 1..{MATRIX_GATE_MAX_QUBITS} qubits, got {k}"
            )
        if matrix.shape != (2 ** k, 2 ** k):
            raise InvalidArgumentError(f"UNITARY on {k} qubit(s) needs a {2 ** k}x{2 ** k} matrix")
        if not is_unitary(matrix):
            raise NonUnitaryError("UNITARY payload is not unitary within 1e-10")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def is_bookkeeping(self):
        return self.kind == GateKind.GLOBAL_PHASE


@dataclass
class Circuit:
    """
    An ordered instruction list over `num_qubits` qubits.
    """
    num_qubits: int
    instructions: list = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise InvalidArgumentError("A circuit needs at least one qubit")
        gates = list(self.instructions)
        self.instructions = []
        self.extend(gates)

    def append(self, gate):
        if any(q >= self.num_qubits for q in gate.qubits):
            raise InvalidArgumentError(
                f"{gate.kind.value} on qubits {gate.qubits} is outside a {self.num_qubits}-qubit circuit"
            )
        self.instructions.append(gate)
        return self

    def extend(self, gates):
        for gate in gates:
            self.append(gate)
        return self

    def __iter__(self):
        return iter(self.instructions)

    def __len__(self):
        return len(self.instructions)


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    Dense amplitudes over `num_qubits` qubits, qubit 0 as the least-significant index bit.
    """
    num_qubits: int
    amplitudes: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != 2 ** self.num_qubits:
            raise InvalidArgumentError(
                f"{amplitudes.shape[0]} amplitudes do not describe {self.num_qubits} qubits"
            )
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize=False):
        amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
        num_qubits = int(round(math.log2(amplitudes.shape[0]))) if amplitudes.shape[0] else 0
        if num_qubits < 1 or 2 ** num_qubits != amplitudes.shape[0]:
            raise InvalidArgumentError("Amplitude count must be a power of two >= 2")
        if normalize:
            norm = np.linalg.norm(amplitudes)
            if norm == 0:
                raise InvalidArgumentError("Cannot normalize the zero vector")
            amplitudes = amplitudes / norm
        return cls(num_qubits, amplitudes)

    def norm_squared(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def scaled(self, factor):
        return StateVector(self.num_qubits, self.amplitudes * factor)


# ---------------------------------------------------------------------------
# Gate constructors
# ---------------------------------------------------------------------------

def x(q):
    return Gate(GateKind.X, (q,))


def sx(q):
    return Gate(GateKind.SX, (q,))


def h(q):
    return Gate(GateKind.H, (q,))


def s(q):
    return Gate(GateKind.S, (q,))


def sdg(q):
    return Gate(GateKind.SDG, (q,))


def rx(q, theta):
    return Gate(GateKind.RX, (q,), theta)


def ry(q, theta):
    return Gate(GateKind.RY, (q,), theta)


def rz(q, theta):
    return Gate(GateKind.RZ, (q,), theta)


def cx(control, target):
    return Gate(GateKind.CX, (control, target))


def cz(a, b):
    return Gate(GateKind.CZ, (a, b))


def swap(a, b):
    return Gate(GateKind.SWAP, (a, b))


def ccx(c1, c2, target):
    return Gate(GateKind.CCX, (c1, c2, target))


def cswap(control, a, b):
    return Gate(GateKind.CSWAP, (control, a, b))


def global_phase(phi):
    return Gate(GateKind.GLOBAL_PHASE, (), phi)


def unitary(matrix, *qubits):
    return Gate(GateKind.UNITARY, tuple(qubits), matrix=matrix)


def controlled_gate(inner: Union[Gate, Circuit], control, targets, polarity=Polarity.ON_ONE):
    """
    Wraps a gate or a circuit as a CONTROLLED instruction. A bare Gate is read with local qubit
    indices, i.e. its qubit j acts on targets[j].
    """
    targets = tuple(targets)
    if isinstance(inner, Gate):
        inner = Circuit(len(targets), [inner])
    return Gate(GateKind.CONTROLLED, (control, *targets), inner=inner, polarity=polarity)


# ---------------------------------------------------------------------------
# Gate matrices
# ---------------------------------------------------------------------------

def _reverse_qubit_order(matrix, k):
    """
    Converts between the LSB-first circuit convention and the first-listed-is-MSB gate convention.
    """
    if k <= 1:
        return matrix
    tensor = matrix.reshape((2,) * (2 * k))
    order = list(reversed(range(k))) + list(reversed(range(k, 2 * k)))
    return tensor.transpose(order).reshape(2 ** k, 2 ** k)


def gate_matrix(gate):
    """
    Returns the matrix of a gate with its first listed qubit as the most-significant bit.
    GLOBAL_PHASE returns the 1x1 phase factor.
    """
    kind = gate.kind
    if kind in _FIXED_MATRICES:
        return _FIXED_MATRICES[kind]
    if kind == GateKind.GLOBAL_PHASE:
        return np.array([[np.exp(1j * gate.angle)]])
    if kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        c, sn = math.cos(gate.angle / 2), math.sin(gate.angle / 2)
        if kind == GateKind.RX:
            return np.array([[c, -1j * sn], [-1j * sn, c]], dtype=complex)
        if kind == GateKind.RY:
            return np.array([[c, -sn], [sn, c]], dtype=complex)
        return np.diag([np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)])
    if kind == GateKind.UNITARY:
        return gate.matrix
    if kind == GateKind.CONTROLLED:
        m = gate.inner.num_qubits
        inner = _reverse_qubit_order(circuit_unitary(gate.inner), m)
        identity = np.eye(2 ** m, dtype=complex)
        zero = np.zeros_like(identity)
        if gate.polarity == Polarity.ON_ONE:
            return np.block([[identity, zero], [zero, inner]])
        return np.block([[inner, zero], [zero, identity]])
    raise InvalidArgumentError(f"No matrix for gate kind {kind}")


# ---------------------------------------------------------------------------
# Application engine
# ---------------------------------------------------------------------------

def _apply_to_tensor(tensor, gate, axis_of):
    """
    Applies one gate to a (2,)*n [+ batch] tensor. `axis_of[q]` is the tensor axis holding qubit q.
    """
    if gate.kind == GateKind.GLOBAL_PHASE:
        return tensor * np.exp(1j * gate.angle)

    if gate.kind == GateKind.CONTROLLED:
        control_axis = axis_of[gate.qubits[0]]
        index = [slice(None)] * tensor.ndim
        index[control_axis] = 1 if gate.polarity == Polarity.ON_ONE else 0
        index = tuple(index)
        inner_axes = []
        for target in gate.qubits[1:]:
            axis = axis_of[target]
            inner_axes.append(axis - 1 if axis > control_axis else axis)
        sub = tensor[index]
        for inner_gate in gate.inner:
            sub = _apply_to_tensor(sub, inner_gate, inner_axes)
        out = tensor.copy()
        out[index] = sub
        return out

    k = len(gate.qubits)
    matrix = gate_matrix(gate).reshape((2,) * (2 * k))
    targets = [axis_of[q] for q in gate.qubits]
    result = np.tensordot(matrix, tensor, axes=(list(range(k, 2 * k)), targets))
    return np.moveaxis(result, list(range(k)), targets)


def _top_level_axes(num_qubits):
    return [num_qubits - 1 - q for q in range(num_qubits)]


def _check_width(n, cap=MAX_QUBITS):
    if not isinstance(n, (int, np.integer)) or n < 1 or n > cap:
        raise InvalidArgumentError(f"Qubit count must be in 1..{cap}, got {n}")


def _check_qubits(gate, num_qubits):
    if any(q >= num_qubits for q in gate.qubits):
        raise InvalidArgumentError(
            f"{gate.kind.value} on qubits {gate.qubits} is outside a {num_qubits}-qubit state"
        )


def zero_state(n):
    """
    Returns |0...0> on n qubits.
    """
    _check_width(n)
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[0] = 1.0
    return StateVector(n, amplitudes)


def basis_state(bitstring):
    """
    Returns the computational basis state for a most-significant-first label.
    """
    width = len(bitstring)
    _check_width(width)
    amplitudes = np.zeros(2 ** width, dtype=complex)
    amplitudes[parse_bitstring(bitstring, width)] = 1.0
    return StateVector(width, amplitudes)


def apply_gate(state, gate):
    """
    Applies a single gate and returns the new state. Norm is preserved; nothing is renormalized.
    """
    _check_qubits(gate, state.num_qubits)
    n = state.num_qubits
    tensor = state.amplitudes.reshape((2,) * n)
    tensor = _apply_to_tensor(tensor, gate, _top_level_axes(n))
    return StateVector(n, tensor.reshape(-1))


def apply_circuit(state, circuit):
    """
    Applies every instruction of the circuit in order.
    """
    if state.num_qubits != circuit.num_qubits:
        raise WidthMismatchError(
            f"Circuit has {circuit.num_qubits} qubits but the state has {state.num_qubits}"
        )
    n = state.num_qubits
    axes = _top_level_axes(n)
    tensor = state.amplitudes.reshape((2,) * n)
    for gate in circuit:
        tensor = _apply_to_tensor(tensor, gate, axes)
    return StateVector(n, np.ascontiguousarray(tensor).reshape(-1))


def simulate(circuit):
    """
    Runs the circuit on |0...0>.
    """
    return apply_circuit(zero_state(circuit.num_qubits), circuit)


def circuit_unitary(circuit):
    """
    Builds the full 2^n x 2^n unitary by pushing every basis state through the circuit at once.
    """
    n = circuit.num_qubits
    _check_width(n, UNITARY_MAX_QUBITS)
    dim = 2 ** n
    tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    axes = _top_level_axes(n)
    for gate in circuit:
        tensor = _apply_to_tensor(tensor, gate, axes)
    return np.ascontiguousarray(tensor).reshape(dim, dim)


# ---------------------------------------------------------------------------
# Overlaps and probabilities
# ---------------------------------------------------------------------------

def inner_product(a, b):
    """
    Returns <b|a> = sum_k conj(b_k) a_k, the ground-truth oracle for every protocol.
    """
    if a.num_qubits != b.num_qubits:
        raise WidthMismatchError(f"Cannot take <{b.num_qubits}q|{a.num_qubits}q>")
    return complex(np.vdot(b.amplitudes, a.amplitudes))


def basis_coefficient(state, bitstring):
    """
    Returns the amplitude <bitstring|state>.
    """
    return complex(state.amplitudes[parse_bitstring(bitstring, state.num_qubits)])


def basis_probability(state, bitstring):
    """
    Born probability |<t|state>|^2 of one basis label (most-significant qubit first).
    """
    return float(abs(basis_coefficient(state, bitstring)) ** 2)


def _bit_mask(num_qubits, qubit):
    if qubit < 0 or qubit >= num_qubits:
        raise InvalidArgumentError(f"Qubit {qubit} is outside a {num_qubits}-qubit state")
    return ((np.arange(2 ** num_qubits) >> qubit) & 1).astype(bool)


def ancilla_outcome_probabilities(state, ancilla_index):
    """
    Returns (p0, p1) for a Z measurement of one qubit.
    """
    mask = _bit_mask(state.num_qubits, ancilla_index)
    weights = np.abs(state.amplitudes) ** 2
    return float(weights[~mask].sum()), float(weights[mask].sum())


# ---------------------------------------------------------------------------
# Seeded sampling (numpy PCG64 bit generator)
# ---------------------------------------------------------------------------

def make_rng(seed):
    """
    Returns a numpy Generator on the PCG64 bit generator, which is portable across platforms.
    """
    if seed is None or int(seed) < 0:
        raise InvalidArgumentError(f"Seed must be a non-negative integer, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))


def derive_seeds(seed, count):
    """
    Splits one seed into `count` independent child seeds (numpy SeedSequence spawning).
    """
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def _check_shots(shots):
    if shots is None or int(shots) < 1:
        raise InvalidArgumentError(f"Shot count must be >= 1, got {shots}")
    return int(shots)


def sample_ancilla(state, ancilla_index, shots, seed):
    """
    Samples `shots` Z measurements of one qubit and returns (n0, n1).
    """
    shots = _check_shots(shots)
    _, p1 = ancilla_outcome_probabilities(state, ancilla_index)
    n1 = int(make_rng(seed).binomial(shots, min(max(p1, 0.0), 1.0)))
    return shots - n1, n1


def sample_basis_counts(state, shots, seed):
    """
    Samples full computational-basis measurements; returns {bitstring: count} for observed outcomes.
    """
    shots = _check_shots(shots)
    weights = np.abs(state.amplitudes) ** 2
    weights = weights / weights.sum()
    counts = make_rng(seed).multinomial(shots, weights)
    width = state.num_qubits
    return {format(int(i), f"0{width}b"): int(c) for i, c in enumerate(counts) if c}


def random_state(n, seed):
    """
    Draws a normalized state with i.i.d. complex Gaussian amplitudes (isotropic), deterministic per seed.
    """
    _check_width(n)
    rng = make_rng(seed)
    dim = 2 ** n
    amplitudes = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(n, amplitudes / np.linalg.norm(amplitudes))


# ---------------------------------------------------------------------------
# Circuit transforms
# ---------------------------------------------------------------------------

_SELF_INVERSE = {
    GateKind.X, GateKind.H, GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.CCX, GateKind.CSWAP
}
_INVERSE_KIND = {
    GateKind.S: GateKind.SDG,
    GateKind.SDG: GateKind.S,
    GateKind.SX: GateKind.SXDG,
    GateKind.SXDG: GateKind.SX,
}


def inverse_gate(gate):
    kind = gate.kind
    if kind in _SELF_INVERSE:
        return gate
    if kind in _INVERSE_KIND:
        return Gate(_INVERSE_KIND[kind], gate.qubits)
    if kind in ROTATION_KINDS:
        return Gate(kind, gate.qubits, -gate.angle)
    if kind == GateKind.UNITARY:
        return Gate(kind, gate.qubits, matrix=gate.matrix.conj().T)
    if kind == GateKind.CONTROLLED:
        return Gate(kind, gate.qubits, inner=inverse_circuit(gate.inner), polarity=gate.polarity)
    raise InvalidArgumentError(f"Cannot invert gate kind {kind}")


def inverse_circuit(circuit):
    """
    Builds the adjoint: instructions reversed, each one inverted.
    """
    return Circuit(circuit.num_qubits, [inverse_gate(g) for g in reversed(circuit.instructions)])


def remap_gate(gate, mapping):
    qubits = tuple(mapping[q] for q in gate.qubits)
    return Gate(gate.kind, qubits, gate.angle, gate.matrix, gate.inner, gate.polarity)


def remap_circuit(circuit, mapping, num_qubits):
    """
    Re-targets a circuit onto a wider one: local qubit q becomes mapping[q].
    """
    if len(mapping) != circuit.num_qubits:
        raise WidthMismatchError(
            f"Mapping covers {len(mapping)} qubits but the circuit has {circuit.num_qubits}"
        )
    return Circuit(num_qubits, [remap_gate(g, mapping) for g in circuit])


def compose(*circuits):
    """
    Concatenates circuits of equal width.
    """
    widths = {c.num_qubits for c in circuits}
    if len(widths) != 1:
        raise WidthMismatchError(f"Cannot compose circuits of widths {sorted(widths)}")
    combined = Circuit(widths.pop())
    for circuit in circuits:
        combined.extend(circuit)
    return combined

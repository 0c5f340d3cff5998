"""
The five overlap protocols: circuit builders (real / imaginary / projection variants), exact or sampled
evaluation, and the classical recovery that turns ancilla statistics into the complex overlap <B|A>.

Qubit layout of every ancilla-based circuit: the ancilla is qubit 0, then register A, then register B
(zero-control: reference register, then A, then B), each register in ascending qubit order.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel

from .config import DEFAULT_REFERENCE_SHOTS, DEGENERACY_THRESHOLD
from .errors import DegenerateReferenceError, InvalidArgumentError, WidthMismatchError
from .statevector import (
    Circuit,
    ancilla_outcome_probabilities,
    basis_coefficient,
    basis_probability,
    cswap,
    cx,
    derive_seeds,
    h,
    inner_product,
    inverse_circuit,
    remap_circuit,
    sample_ancilla,
    sample_basis_counts,
    sdg,
    simulate,
    x,
)
from .synthesis import control_circuit, prepare_basis_state, prepared_state
from .utils import parse_bitstring, qubit_bit

ANCILLA = 0

# <branch0|branch1> of the zero-control circuit is <B|A> conj(a0) b0; recovery feeds conj(a0).
ZERO_CONTROL_CONJUGATES_A0 = True


class ProtocolKind(str, Enum):
    SWAP_TEST = "swap"
    VACUUM_TEST = "vacuum"
    HADAMARD_TEST = "hadamard"
    ONE_CONTROL = "one-control"
    ZERO_CONTROL = "zero-control"

    @property
    def phase_bearing(self):
        return self not in (ProtocolKind.SWAP_TEST, ProtocolKind.VACUUM_TEST)


class Part(str, Enum):
    REAL = "real"
    IMAG = "imag"


class ReferenceMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"
    MEASURED = "measured"


@dataclass(frozen=True)
class ReferenceCoefficient:
    bitstring: str
    value: complex


class MeasurementOutcome(BaseModel):
    R: float
    I: float
    shots_R: int = 0
    shots_I: int = 0


class ReferenceRecord(BaseModel):
    name: str
    bitstring: str
    real: float
    imag: float
    mode: ReferenceMode = ReferenceMode.EXACT
    variance: float = 0.0


class OverlapEstimate(BaseModel):
    """
    Recovered overlap plus the shot metadata and references it was derived from.
    """
    protocol: ProtocolKind
    real: Optional[float] = None
    imag: Optional[float] = None
    magnitude_squared: float
    magnitude_squared_raw: float
    clamped: bool = False
    shots: int = 0
    seed: Optional[int] = None
    outcome: Optional[MeasurementOutcome] = None
    references: List[ReferenceRecord] = []
    projection: Optional[str] = None
    variance_real: float = 0.0
    variance_imag: float = 0.0
    variance_magnitude_squared: float = 0.0

    @property
    def value(self):
        if self.real is None:
            return None
        return complex(self.real, self.imag)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def _check_widths(prep_a, prep_b):
    if prep_a.num_qubits != prep_b.num_qubits:
        raise WidthMismatchError(
            f"|A> has {prep_a.num_qubits} qubits but |B> has {prep_b.num_qubits}"
        )
    return prep_a.num_qubits


def _registers(n, count):
    return [list(range(1 + k * n, 1 + (k + 1) * n)) for k in range(count)]


def _open_ancilla(circuit, part):
    circuit.append(h(ANCILLA))
    if Part(part) == Part.IMAG:
        circuit.append(sdg(ANCILLA))


def _register_cswap(control, reg_a, reg_b):
    return [cswap(control, a, b) for a, b in zip(reg_a, reg_b)]


def _projection_label(projection, n):
    label = projection if projection is not None else "0" * n
    parse_bitstring(label, n)
    return label


def build_swap_test(prep_a, prep_b):
    """
    H(anc), U_A on register A, U_B on register B, register CSWAP, H(anc): p0 - p1 = |<B|A>|^2.
    """
    n = _check_widths(prep_a, prep_b)
    width = 2 * n + 1
    reg_a, reg_b = _registers(n, 2)
    circuit = Circuit(width)
    circuit.append(h(ANCILLA))
    circuit.extend(remap_circuit(prep_a.circuit, reg_a, width))
    circuit.extend(remap_circuit(prep_b.circuit, reg_b, width))
    circuit.extend(_register_cswap(ANCILLA, reg_a, reg_b))
    circuit.append(h(ANCILLA))
    return circuit


def build_vacuum_test(prep_a, prep_b):
    """
    U_A followed by U_B^dagger on n qubits: P(0...0) = |<B|A>|^2.
    """
    n = _check_widths(prep_a, prep_b)
    circuit = Circuit(n)
    circuit.extend(prep_a.circuit)
    circuit.extend(inverse_circuit(prep_b.circuit))
    return circuit


def build_hadamard_test(prep_a, prep_b, part=Part.REAL):
    """
    Controlled U_B^dagger U_A between ancilla Hadamards; both factors controlled with phases promoted.
    p0 - p1 = Re<B|A> (Im<B|A> with the S^dagger variant).
    """
    n = _check_widths(prep_a, prep_b)
    width = n + 1
    (reg,) = _registers(n, 1)
    circuit = Circuit(width)
    _open_ancilla(circuit, part)
    circuit.extend(control_circuit(prep_a.circuit, ANCILLA, reg, width, phase=prep_a.global_phase))
    circuit.extend(
        control_circuit(inverse_circuit(prep_b.circuit), ANCILLA, reg, width, phase=-prep_b.global_phase)
    )
    circuit.append(h(ANCILLA))
    return circuit


def build_one_control(prep_a, prep_b, part=Part.REAL, projection=None):
    """
    Only U_A is controlled; U_B runs uncontrolled and a register CSWAP interferes the branches.
    p0 - p1 = Re(<B|A> b_t) with b_t = <t|B>; 0-controlled X gates put |t> in register A's idle branch.
    """
    n = _check_widths(prep_a, prep_b)
    label = _projection_label(projection, n)
    width = 2 * n + 1
    reg_a, reg_b = _registers(n, 2)
    circuit = Circuit(width)
    _open_ancilla(circuit, part)

    flipped = [reg_a[q] for q in range(n) if qubit_bit(label, q)]
    if flipped:
        circuit.append(x(ANCILLA))
        circuit.extend(cx(ANCILLA, target) for target in flipped)
        circuit.append(x(ANCILLA))

    circuit.extend(control_circuit(prep_a.circuit, ANCILLA, reg_a, width, phase=prep_a.global_phase))
    circuit.extend(remap_circuit(prep_b.circuit, reg_b, width))
    circuit.extend(_register_cswap(ANCILLA, reg_a, reg_b))
    circuit.append(h(ANCILLA))
    return circuit


def build_zero_control(prep_a, prep_b, part=Part.REAL, projection=None):
    """
    No controlled preparations: CSWAP(reference, A) on |1>, CSWAP(reference, B) on |0>.
    p0 - p1 = Re(<B|A> conj(a_t) b_t); a non-zero projection loads |t> into the reference register.
    """
    n = _check_widths(prep_a, prep_b)
    label = _projection_label(projection, n)
    width = 3 * n + 1
    reg_ref, reg_a, reg_b = _registers(n, 3)
    circuit = Circuit(width)
    _open_ancilla(circuit, part)
    circuit.extend(x(reg_ref[q]) for q in range(n) if qubit_bit(label, q))
    circuit.extend(remap_circuit(prep_a.circuit, reg_a, width))
    circuit.extend(remap_circuit(prep_b.circuit, reg_b, width))
    circuit.extend(_register_cswap(ANCILLA, reg_ref, reg_a))
    circuit.append(x(ANCILLA))
    circuit.extend(_register_cswap(ANCILLA, reg_ref, reg_b))
    circuit.append(x(ANCILLA))
    circuit.append(h(ANCILLA))
    return circuit


def build_protocol(kind, prep_a, prep_b, part=Part.REAL, projection=None):
    """
    Dispatches to the builder for `kind`; part and projection are ignored where they do not apply.
    """
    kind = ProtocolKind(kind)
    if kind == ProtocolKind.SWAP_TEST:
        return build_swap_test(prep_a, prep_b)
    if kind == ProtocolKind.VACUUM_TEST:
        return build_vacuum_test(prep_a, prep_b)
    if kind == ProtocolKind.HADAMARD_TEST:
        return build_hadamard_test(prep_a, prep_b, part)
    if kind == ProtocolKind.ONE_CONTROL:
        return build_one_control(prep_a, prep_b, part, projection)
    return build_zero_control(prep_a, prep_b, part, projection)


def expected_width(kind, n):
    kind = ProtocolKind(kind)
    return {
        ProtocolKind.VACUUM_TEST: n,
        ProtocolKind.HADAMARD_TEST: n + 1,
        ProtocolKind.SWAP_TEST: 2 * n + 1,
        ProtocolKind.ONE_CONTROL: 2 * n + 1,
        ProtocolKind.ZERO_CONTROL: 3 * n + 1,
    }[kind]


# ---------------------------------------------------------------------------
# Recovery
# ---------------------------------------------------------------------------

def _coefficient(reference, name):
    if isinstance(reference, ReferenceCoefficient):
        return reference.bitstring, complex(reference.value)
    return name, complex(reference)


def _check_reference(value, name, bitstring, threshold):
    if abs(value) <= threshold:
        raise DegenerateReferenceError(name, bitstring, abs(value), threshold)


def recover_one_control(R, I, b0, threshold=DEGENERACY_THRESHOLD):
    """
    <B|A> = (cR + dI)/|b0|^2 + i (cI - dR)/|b0|^2 with b0 = c + i d.
    """
    bitstring, value = _coefficient(b0, "b0")
    _check_reference(value, "b0", bitstring, threshold)
    c, d = value.real, value.imag
    norm = c * c + d * d
    return complex((c * R + d * I) / norm, (c * I - d * R) / norm)


def recover_zero_control(R, I, a0, b0, threshold=DEGENERACY_THRESHOLD, conjugate_a0=ZERO_CONTROL_CONJUGATES_A0):
    """
    <B|A> = (gR + hI)/(|a0|^2 |b0|^2) + i (gI - hR)/(|a0|^2 |b0|^2) with g = ec - fd, h = ed + fc,
    a0 = e + i f, b0 = c + i d. The circuit measures conj(a0) b0, so (e, f) is taken from conj(a0).
    """
    a_bits, a_value = _coefficient(a0, "a0")
    b_bits, b_value = _coefficient(b0, "b0")
    _check_reference(a_value, "a0", a_bits, threshold)
    _check_reference(b_value, "b0", b_bits, threshold)
    if conjugate_a0:
        a_value = a_value.conjugate()
    e, f = a_value.real, a_value.imag
    c, d = b_value.real, b_value.imag
    g = e * c - f * d
    hh = e * d + f * c
    norm = (e * e + f * f) * (c * c + d * d)
    return complex((g * R + hh * I) / norm, (g * I - hh * R) / norm)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _ancilla_difference(circuit, shots=None, seed=None):
    """
    Returns (p0 - p1, variance) exactly (shots is None) or from `shots` binomial samples.
    """
    state = simulate(circuit)
    if shots is None:
        p0, p1 = ancilla_outcome_probabilities(state, ANCILLA)
        return p0 - p1, 0.0
    n0, n1 = sample_ancilla(state, ANCILLA, shots, seed)
    diff = (n0 - n1) / shots
    return diff, (1.0 - diff * diff) / shots


def _split_shots(shots):
    """
    Real part gets shots // 2, the imaginary part the rest; both parts must be sampled.
    """
    if shots < 2:
        raise InvalidArgumentError(f"A sampled complex estimate needs at least 2 shots, got {shots}")
    real = shots // 2
    return real, shots - real


def _exact_reference(prep, name, label, threshold):
    value = basis_coefficient(prepared_state(prep), label)
    _check_reference(value, name, label, threshold)
    return ReferenceCoefficient(label, value), ReferenceRecord(
        name=name, bitstring=label, real=value.real, imag=value.imag
    )


def _estimated_reference(name, label, squared, variance, mode, shots, threshold):
    """
    Turns an estimate of |ref|^2 into a real positive reference (the partner state's phase gauge).
    """
    magnitude = math.sqrt(max(squared, 0.0))
    _check_reference(magnitude, name, label, threshold)
    return ReferenceCoefficient(label, complex(magnitude)), ReferenceRecord(
        name=name, bitstring=label, real=magnitude, imag=0.0, mode=mode, variance=variance
    )


def _sampled_squared_reference(kind, role, prep_a, prep_b, label, shots, seed):
    """
    |b_t|^2 (role 'b') or |a_t|^2 (role 'a') from a real-part run with the partner replaced by |t>.
    """
    basis = prepare_basis_state(label)
    if role == "b":
        circuit = build_protocol(kind, basis, prep_b, Part.REAL, label)
    else:
        circuit = build_protocol(kind, prep_a, basis, Part.REAL, label)
    return _ancilla_difference(circuit, shots, seed)


def _measured_squared_reference(prep, label, shots, seed):
    counts = sample_basis_counts(simulate(prep.circuit), shots, seed)
    squared = counts.get(label, 0) / shots
    return squared, squared * (1.0 - squared) / shots


def _acquire_reference(kind, role, prep_a, prep_b, label, mode, shots, seed, threshold):
    name = f"{role}0"
    prep = prep_b if role == "b" else prep_a
    if mode == ReferenceMode.EXACT:
        return _exact_reference(prep, name, label, threshold)
    if mode == ReferenceMode.SAMPLED:
        squared, variance = _sampled_squared_reference(kind, role, prep_a, prep_b, label, shots, seed)
    else:
        squared, variance = _measured_squared_reference(prep, label, shots, seed)
    return _estimated_reference(name, label, squared, variance, mode, shots, threshold)


def _reference_variance_terms(value, references):
    """
    First-order contribution of estimated |ref|^2 values: d<B|A>/dq = -<B|A>/(2q) per reference.
    """
    var_re = var_im = 0.0
    for record in references:
        if record.mode == ReferenceMode.EXACT:
            continue
        squared = record.real ** 2
        scale = 1.0 / (2.0 * squared) ** 2
        var_re += value.real ** 2 * scale * record.variance
        var_im += value.imag ** 2 * scale * record.variance
    return var_re, var_im


def estimate_overlap(
    kind,
    prep_a,
    prep_b,
    shots=0,
    seed=0,
    projection=None,
    reference_mode=ReferenceMode.EXACT,
    reference_shots=None,
    threshold=DEGENERACY_THRESHOLD,
):
    """
    Builds the protocol circuits, evaluates them exactly (shots == 0) or with a seeded shot budget, and
    applies the recovery formula. Phase-bearing protocols split `shots` evenly between the real and
    imaginary circuits, so a sampled budget for them must be at least 2; each part and each reference
    gets its own derived seed.
    """
    kind = ProtocolKind(kind)
    reference_mode = ReferenceMode(reference_mode)
    shots = int(shots)
    if shots < 0:
        raise InvalidArgumentError(f"Shot count must be >= 0, got {shots}")
    n = _check_widths(prep_a, prep_b)
    seed_real, seed_imag, seed_ref_b, seed_ref_a = derive_seeds(seed, 4)

    if not kind.phase_bearing:
        return _estimate_magnitude(kind, prep_a, prep_b, shots, seed, seed_real)

    shots_real, shots_imag = _split_shots(shots) if shots else (0, 0)
    label = None
    references, coefficients = [], {}
    if kind in (ProtocolKind.ONE_CONTROL, ProtocolKind.ZERO_CONTROL):
        label = _projection_label(projection, n)
        ref_shots = reference_shots or shots or DEFAULT_REFERENCE_SHOTS
        roles = ["b"] if kind == ProtocolKind.ONE_CONTROL else ["a", "b"]
        for role in roles:
            role_seed = seed_ref_b if role == "b" else seed_ref_a
            coefficient, record = _acquire_reference(
                kind, role, prep_a, prep_b, label, reference_mode, ref_shots, role_seed, threshold
            )
            coefficients[role] = coefficient
            references.append(record)

    R, var_R = _ancilla_difference(
        build_protocol(kind, prep_a, prep_b, Part.REAL, label), shots_real or None, seed_real
    )
    I, var_I = _ancilla_difference(
        build_protocol(kind, prep_a, prep_b, Part.IMAG, label), shots_imag or None, seed_imag
    )

    if kind == ProtocolKind.HADAMARD_TEST:
        value = complex(R, I)
        var_re, var_im = var_R, var_I
    elif kind == ProtocolKind.ONE_CONTROL:
        b = coefficients["b"].value
        value = recover_one_control(R, I, coefficients["b"], threshold)
        scale = abs(b) ** 4
        var_re = (b.real ** 2 * var_R + b.imag ** 2 * var_I) / scale
        var_im = (b.real ** 2 * var_I + b.imag ** 2 * var_R) / scale
    else:
        value = recover_zero_control(R, I, coefficients["a"], coefficients["b"], threshold)
        w = coefficients["a"].value.conjugate() * coefficients["b"].value
        scale = abs(w) ** 4
        var_re = (w.real ** 2 * var_R + w.imag ** 2 * var_I) / scale
        var_im = (w.real ** 2 * var_I + w.imag ** 2 * var_R) / scale

    ref_re, ref_im = _reference_variance_terms(value, references)
    magnitude_squared = abs(value) ** 2
    return OverlapEstimate(
        protocol=kind,
        real=value.real,
        imag=value.imag,
        magnitude_squared=magnitude_squared,
        magnitude_squared_raw=magnitude_squared,
        shots=shots,
        seed=seed if shots else None,
        outcome=MeasurementOutcome(R=R, I=I, shots_R=shots_real, shots_I=shots_imag),
        references=references,
        projection=label,
        variance_real=var_re + ref_re,
        variance_imag=var_im + ref_im,
    )


def _estimate_magnitude(kind, prep_a, prep_b, shots, seed, part_seed):
    if kind == ProtocolKind.SWAP_TEST:
        raw, variance = _ancilla_difference(build_swap_test(prep_a, prep_b), shots or None, part_seed)
    else:
        state = simulate(build_vacuum_test(prep_a, prep_b))
        zeros = "0" * state.num_qubits
        if shots == 0:
            raw, variance = basis_probability(state, zeros), 0.0
        else:
            raw = sample_basis_counts(state, shots, part_seed).get(zeros, 0) / shots
            variance = raw * (1.0 - raw) / shots
    clamped_value = min(max(raw, 0.0), 1.0)
    return OverlapEstimate(
        protocol=kind,
        magnitude_squared=clamped_value,
        magnitude_squared_raw=raw,
        clamped=clamped_value != raw,
        shots=shots,
        seed=seed if shots else None,
        variance_magnitude_squared=variance,
    )


def rotate_prep_phase(prep, theta):
    """
    Returns the same preparation with its target multiplied by exp(i*theta).
    """
    return type(prep)(prep.circuit, prep.global_phase + theta)


def oracle_overlap(prep_a, prep_b):
    """
    Brute-force <B|A> from the prepared targets.
    """
    return inner_product(prepared_state(prep_a), prepared_state(prep_b))

"""
Circuit text format shared by the synthesis module and the CLI.

    qubits N
    # comment
    H 0
    CX 0 1
    RZ 2 0.78539816339744828
    GLOBAL_PHASE 0.39269908169872414
    UNITARY 0 | 0.70710678118654757+0j 0.70710678118654757+0j 0.70710678118654757+0j -0.70710678118654757+0j

Qubits come control-first, angles last. UNITARY entries are row-major after a '|'. CONTROLLED
instructions are expanded gate-wise when written, so every file holds primitive kinds only.
"""
import numpy as np

from .errors import CircuitFormatError, InvalidArgumentError
from .statevector import FIXED_ARITY, ROTATION_KINDS, Circuit, Gate, GateKind
from .synthesis import control_circuit
from .utils import clean_text

ANGLE_FORMAT = "{:.17g}"


def _format_complex_entry(value):
    value = complex(value)
    return f"{value.real:.17g}{value.imag:+.17g}j"


def format_gate(gate):
    """
    Renders one primitive instruction as a single text line.
    """
    parts = [gate.kind.value, *(str(q) for q in gate.qubits)]
    if gate.kind in ROTATION_KINDS:
        parts.append(ANGLE_FORMAT.format(gate.angle))
    if gate.kind == GateKind.UNITARY:
        parts.append("|")
        parts.extend(_format_complex_entry(v) for v in gate.matrix.reshape(-1))
    return " ".join(parts)


def _expanded(circuit):
    for gate in circuit:
        if gate.kind == GateKind.CONTROLLED:
            width = max(gate.qubits) + 1
            inner = control_circuit(gate.inner, gate.qubits[0], gate.qubits[1:], width, gate.polarity)
            yield from _expanded(inner)
        else:
            yield gate


def format_circuit(circuit, title=None):
    """
    Serializes a circuit to the documented text format.
    """
    lines = [f"qubits {circuit.num_qubits}"]
    if title:
        lines.append(f"# {clean_text(title)}")
    lines.extend(format_gate(g) for g in _expanded(circuit))
    return "\n".join(lines) + "\n"


def _parse_line(tokens, line_number):
    try:
        kind = GateKind(tokens[0].upper())
    except ValueError:
        raise CircuitFormatError(f"line {line_number}: unknown gate kind {tokens[0]!r}")
    if kind == GateKind.CONTROLLED:
        raise CircuitFormatError(f"line {line_number}: CONTROLLED must be written expanded")

    try:
        if kind == GateKind.UNITARY:
            if "|" not in tokens:
                raise CircuitFormatError(f"line {line_number}: UNITARY needs '|' before its entries")
            split = tokens.index("|")
            qubits = [int(t) for t in tokens[1:split]]
            entries = [complex(t) for t in tokens[split + 1:]]
            dim = 2 ** len(qubits)
            if len(entries) != dim * dim:
                raise CircuitFormatError(
                    f"line {line_number}: UNITARY on {len(qubits)} qubit(s) needs {dim * dim} entries"
                )
            return Gate(kind, tuple(qubits), matrix=np.array(entries).reshape(dim, dim))

        arity = FIXED_ARITY[kind]
        expected = 1 + arity + (1 if kind in ROTATION_KINDS else 0)
        if len(tokens) != expected:
            raise CircuitFormatError(
                f"line {line_number}: {kind.value} expects {expected - 1} operand(s), got {len(tokens) - 1}"
            )
        qubits = tuple(int(t) for t in tokens[1:1 + arity])
        angle = float(tokens[1 + arity]) if kind in ROTATION_KINDS else None
        return Gate(kind, qubits, angle)
    except CircuitFormatError:
        raise
    except InvalidArgumentError as exc:
        raise CircuitFormatError(f"line {line_number}: {exc}")
    except ValueError:
        raise CircuitFormatError(f"line {line_number}: malformed operands {' '.join(tokens[1:])!r}")


def parse_circuit(text):
    """
    Parses the text format back into a Circuit.
    """
    circuit = None
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = clean_text(raw)
        if not line or line.startswith("#"):
            continue
        tokens = line.split(" ")
        if circuit is None:
            if tokens[0].lower() != "qubits" or len(tokens) != 2:
                raise CircuitFormatError(f"line {line_number}: expected header 'qubits N'")
            try:
                circuit = Circuit(int(tokens[1]))
            except (ValueError, InvalidArgumentError):
                raise CircuitFormatError(f"line {line_number}: bad qubit count {tokens[1]!r}")
            continue
        gate = _parse_line(tokens, line_number)
        try:
            circuit.append(gate)
        except InvalidArgumentError as exc:
            raise CircuitFormatError(f"line {line_number}: {exc}")
    if circuit is None:
        raise CircuitFormatError("empty circuit file: missing 'qubits N' header")
    return circuit


def write_circuit(circuit, path, title=None):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_circuit(circuit, title))


def read_circuit(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_circuit(handle.read())

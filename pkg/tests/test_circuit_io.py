"""
Tests for the circuit text format in src/circuit_io.py.
"""
import numpy as np
import pytest

from src.circuit_io import format_circuit, format_gate, parse_circuit, read_circuit, write_circuit
from src.errors import CircuitFormatError
from src.statevector import (
    Circuit,
    GateKind,
    circuit_unitary,
    controlled_gate,
    cswap,
    cx,
    global_phase,
    h,
    ry,
    rz,
    unitary,
)

SAMPLE = """qubits 2
# bell pair
H 0

CX 0 1
RZ 1 0.5
GLOBAL_PHASE 0.25
"""


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

class TestFormat:
    def test_header_and_title(self):
        text = format_circuit(Circuit(3, [h(0)]), title="demo\ncircuit")
        lines = text.splitlines()
        assert lines[0] == "qubits 3"
        assert lines[1] == "# demo circuit"
        assert lines[2] == "H 0"

    def test_rotation_line(self):
        assert format_gate(rz(2, 0.5)) == "RZ 2 0.5"

    def test_qubits_control_first(self):
        assert format_gate(cswap(2, 0, 1)) == "CSWAP 2 0 1"

    def test_unitary_line(self):
        line = format_gate(unitary(np.eye(2), 0))
        assert line.startswith("UNITARY 0 | ")
        assert len(line.split("|")[1].split()) == 4

    def test_controlled_is_expanded(self):
        circuit = Circuit(2, [controlled_gate(ry(0, 0.8), 1, [0])])
        text = format_circuit(circuit)
        assert "CONTROLLED" not in text
        np.testing.assert_allclose(circuit_unitary(parse_circuit(text)), circuit_unitary(circuit), atol=1e-12)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class TestParse:
    def test_sample(self):
        circuit = parse_circuit(SAMPLE)
        assert circuit.num_qubits == 2
        assert [g.kind for g in circuit] == [GateKind.H, GateKind.CX, GateKind.RZ, GateKind.GLOBAL_PHASE]
        assert circuit.instructions[2].angle == 0.5

    def test_lowercase_kinds_accepted(self):
        circuit = parse_circuit("qubits 1\nh 0\nrz 0 1.5\n")
        assert [g.kind for g in circuit] == [GateKind.H, GateKind.RZ]

    def test_round_trip_preserves_unitary(self):
        payload = circuit_unitary(Circuit(1, [ry(0, 0.3), rz(0, -1.1)]))
        circuit = Circuit(3, [h(0), cx(0, 2), rz(1, 1 / 3), cswap(0, 1, 2), global_phase(0.123), unitary(payload, 1)])
        parsed = parse_circuit(format_circuit(circuit))
        assert len(parsed) == len(circuit)
        np.testing.assert_allclose(circuit_unitary(parsed), circuit_unitary(circuit), atol=1e-12)

    def test_angles_round_trip_exactly(self):
        parsed = parse_circuit(format_circuit(Circuit(1, [rz(0, 1 / 3)])))
        assert parsed.instructions[0].angle == 1 / 3

    @pytest.mark.parametrize("text", [
        "",
        "# only a comment\n",
        "H 0\n",
        "qubits two\n",
        "qubits 1\nFOO 0\n",
        "qubits 1\nRZ 0\n",
        "qubits 1\nH 0 1\n",
        "qubits 1\nH 1\n",
        "qubits 2\nCX 0 0\n",
        "qubits 1\nRZ 0 abc\n",
        "qubits 1\nUNITARY 0 1 0 0 1\n",
        "qubits 1\nUNITARY 0 | 1 0 0\n",
        "qubits 1\nUNITARY 0 | 1 1 0 1\n",
        "qubits 2\nCONTROLLED 1 0\n",
    ])
    def test_malformed_input_rejected(self, text):
        with pytest.raises(CircuitFormatError):
            parse_circuit(text)

    def test_error_names_the_line(self):
        with pytest.raises(CircuitFormatError, match="line 3"):
            parse_circuit("qubits 1\nH 0\nBAD 0\n")


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

class TestFiles:
    def test_write_and_read(self, tmp_path):
        path = tmp_path / "bell.txt"
        circuit = Circuit(2, [h(0), cx(0, 1)])
        write_circuit(circuit, str(path), title="bell")
        assert path.read_text(encoding="utf-8").startswith("qubits 2\n# bell\n")
        loaded = read_circuit(str(path))
        np.testing.assert_allclose(circuit_unitary(loaded), circuit_unitary(circuit), atol=1e-12)

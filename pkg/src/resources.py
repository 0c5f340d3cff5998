"""
Resource accounting on transpiled circuits: gate census, depth x qubits, the separable-A / dense-B
comparison between the Hadamard and one-control tests, and the block-size crossover scan.
"""
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

from pydantic import BaseModel

from .config import MAX_WORKERS
from .errors import InvalidArgumentError, NotTranspiledError
from .protocols import (
    ANCILLA,
    Part,
    ProtocolKind,
    build_protocol,
    expected_width,
)
from .statevector import GateKind, derive_seeds, inverse_circuit, random_state
from .synthesis import (
    BASIS_GATE_SET,
    SeparablePrepSpec,
    control_circuit,
    decompose_registers_cswap,
    depth,
    is_transpiled,
    prepare_separable,
    prepare_state,
    transpile,
)

CSV_COLUMNS = ["protocol", "n", "p", "qubits", "cz", "rz", "sx", "x", "two_qubit", "depth", "dq"]
DEFAULT_SCAN_PROTOCOLS = (ProtocolKind.HADAMARD_TEST, ProtocolKind.ONE_CONTROL)
_BASIS_ORDER = (GateKind.CZ, GateKind.RZ, GateKind.SX, GateKind.X)


class ResourceReport(BaseModel):
    counts: Dict[str, int]
    two_qubit_count: int
    depth: int
    qubits: int
    dq: int

    def __add__(self, other):
        """
        Part-summed report: counts and depths add, the width is shared.
        """
        counts = {k: self.counts.get(k, 0) + other.counts.get(k, 0) for k in self.counts.keys() | other.counts.keys()}
        qubits = max(self.qubits, other.qubits)
        total_depth = self.depth + other.depth
        return ResourceReport(
            counts=counts,
            two_qubit_count=self.two_qubit_count + other.two_qubit_count,
            depth=total_depth,
            qubits=qubits,
            dq=total_depth * qubits,
        )


class ComparisonRow(BaseModel):
    protocol: ProtocolKind
    n: int
    p: int
    report: ResourceReport

    def to_record(self):
        counts = self.report.counts
        return {
            "protocol": self.protocol.value,
            "n": self.n,
            "p": self.p,
            "qubits": self.report.qubits,
            "cz": counts.get("CZ", 0),
            "rz": counts.get("RZ", 0),
            "sx": counts.get("SX", 0),
            "x": counts.get("X", 0),
            "two_qubit": self.report.two_qubit_count,
            "depth": self.report.depth,
            "dq": self.report.dq,
        }


class HeuristicVerdict(BaseModel):
    n: int
    p: int
    controlled_inverse_b: int
    one_control_overhead: int
    prefers_one_control: bool
    measured_one_control_cheaper: bool

    @property
    def agrees(self):
        return self.prefers_one_control == self.measured_one_control_cheaper


class ScanResult(BaseModel):
    rows: List[ComparisonRow]
    verdicts: List[HeuristicVerdict]
    gate_crossover: Optional[int] = None
    dq_crossover: Optional[int] = None

    @property
    def heuristic_consistent(self):
        return all(v.agrees for v in self.verdicts)

    def records(self):
        return [row.to_record() for row in self.rows]


def report(circuit):
    """
    Exact census of a transpiled circuit. GLOBAL_PHASE is bookkeeping and counts nowhere.
    """
    if not is_transpiled(circuit):
        stray = sorted({g.kind.value for g in circuit if g.kind not in BASIS_GATE_SET and not g.is_bookkeeping})
        raise NotTranspiledError(f"Circuit contains non-basis gates: {', '.join(stray)}")
    census = Counter(g.kind for g in circuit if not g.is_bookkeeping)
    counts = {kind.value: census.get(kind, 0) for kind in _BASIS_ORDER}
    d = depth(circuit)
    return ResourceReport(
        counts=counts,
        two_qubit_count=counts["CZ"],
        depth=d,
        qubits=circuit.num_qubits,
        dq=d * circuit.num_qubits,
    )


def scan_preps(block_qubits, block_count, seed):
    """
    Separable A (block_count copies of one random block) and dense random B on block_qubits * block_count qubits.
    """
    seed_a, seed_b = derive_seeds(seed, 2)
    spec = SeparablePrepSpec(block_qubits, block_count, block_seed=seed_a)
    prep_a = prepare_separable(spec)
    prep_b = prepare_state(random_state(spec.total_qubits, seed_b))
    return prep_a, prep_b


def constant_x_gates(kind, projection=None):
    """
    X gates a builder places on the ancilla independently of the states: the zero-control on-zero
    CSWAP pair, and the one-control projection pair when the projection has a 1 bit.
    """
    kind = ProtocolKind(kind)
    if kind == ProtocolKind.ZERO_CONTROL:
        return 2
    if kind == ProtocolKind.ONE_CONTROL and projection and "1" in projection:
        return 2
    return 0


def protocol_report(kind, prep_a, prep_b, projection=None, figure_parity=False):
    """
    Transpiled report summed over the real and imaginary circuits (a single circuit for swap / vacuum).

    figure_parity subtracts `constant_x_gates` from the X count of each part and nothing else: depth and
    depth x qubits still include those X layers. The default all-zero one-control projection places
    no constant X, so there the option only affects zero-control rows.
    """
    kind = ProtocolKind(kind)
    parts = [Part.REAL, Part.IMAG] if kind.phase_bearing else [Part.REAL]
    total = None
    for part in parts:
        part_report = report(transpile(build_protocol(kind, prep_a, prep_b, part, projection)))
        if figure_parity:
            dropped = constant_x_gates(kind, projection)
            part_report.counts["X"] -= dropped
        total = part_report if total is None else total + part_report
    return total


def compare_protocols(block_qubits, block_count, seed, protocols=DEFAULT_SCAN_PROTOCOLS, figure_parity=False):
    """
    One ComparisonRow per protocol for the separable-A / dense-B pair of size (n, p).
    """
    prep_a, prep_b = scan_preps(block_qubits, block_count, seed)
    return [
        ComparisonRow(
            protocol=kind,
            n=block_qubits,
            p=block_count,
            report=protocol_report(kind, prep_a, prep_b, figure_parity=figure_parity),
        )
        for kind in map(ProtocolKind, protocols)
    ]


def _cz(circuit):
    return report(transpile(circuit)).two_qubit_count


def component_audit(block_qubits, block_count, seed):
    """
    Per-part CZ cost of each one-control component, measured on its own: controlled U_A, the register
    CSWAP and the uncontrolled U_B. Their sum is the one-control per-part two-qubit count.
    """
    prep_a, prep_b = scan_preps(block_qubits, block_count, seed)
    n = prep_a.num_qubits
    width = expected_width(ProtocolKind.ONE_CONTROL, n)
    reg_a = list(range(1, n + 1))
    reg_b = list(range(n + 1, 2 * n + 1))
    audit = {
        "controlled_a": _cz(control_circuit(prep_a.circuit, ANCILLA, reg_a, width, phase=prep_a.global_phase)),
        "register_cswap": _cz(decompose_registers_cswap(ANCILLA, reg_a, reg_b, width)),
        "uncontrolled_b": _cz(prep_b.circuit),
    }
    audit["total"] = sum(audit.values())
    return audit


def prefer_one_control(prep_b):
    """
    Selection heuristic: the one-control test wins on two-qubit gates when the controlled U_B^dagger
    costs more than the 8n register CSWAP plus the uncontrolled U_B. Returns (verdict, lhs, rhs).
    """
    n = prep_b.num_qubits
    controlled_inverse = _cz(
        control_circuit(inverse_circuit(prep_b.circuit), ANCILLA, range(1, n + 1), n + 1, phase=-prep_b.global_phase)
    )
    overhead = 8 * n + _cz(prep_b.circuit)
    return controlled_inverse > overhead, controlled_inverse, overhead


def _scan_point(args):
    block_qubits, block_count, seed, protocols, figure_parity = args
    rows = compare_protocols(block_qubits, block_count, seed, protocols, figure_parity)
    by_kind = {row.protocol: row for row in rows}
    _, prep_b = scan_preps(block_qubits, block_count, seed)
    verdict, lhs, rhs = prefer_one_control(prep_b)
    hadamard = by_kind.get(ProtocolKind.HADAMARD_TEST)
    one_control = by_kind.get(ProtocolKind.ONE_CONTROL)
    measured = (
        one_control.report.two_qubit_count < hadamard.report.two_qubit_count
        if hadamard and one_control else verdict
    )
    return rows, HeuristicVerdict(
        n=block_qubits,
        p=block_count,
        controlled_inverse_b=lhs,
        one_control_overhead=rhs,
        prefers_one_control=verdict,
        measured_one_control_cheaper=measured,
    )


def _first_crossover(rows, metric):
    """
    Smallest n whose one-control metric is strictly below the Hadamard metric.
    """
    table = {}
    for row in rows:
        table.setdefault((row.n, row.p), {})[row.protocol] = metric(row.report)
    for (n, _), values in sorted(table.items()):
        if ProtocolKind.HADAMARD_TEST in values and ProtocolKind.ONE_CONTROL in values:
            if values[ProtocolKind.ONE_CONTROL] < values[ProtocolKind.HADAMARD_TEST]:
                return n
    return None


def crossover_scan(
    block_sizes,
    block_counts=(1,),
    seed=0,
    protocols=DEFAULT_SCAN_PROTOCOLS,
    figure_parity=False,
    max_workers=MAX_WORKERS,
):
    """
    Runs compare_protocols over every (n, p) configuration. Rows come back in configuration order
    (p outer, n inner) regardless of completion order.
    """
    block_sizes = list(block_sizes)
    block_counts = list(block_counts)
    if not block_sizes or not block_counts or min(block_sizes) < 1 or min(block_counts) < 1:
        raise InvalidArgumentError(f"Scan ranges must be non-empty and positive: n={block_sizes}, p={block_counts}")
    protocols = tuple(ProtocolKind(k) for k in protocols)
    configs = [(n, p, seed, protocols, figure_parity) for p in block_counts for n in block_sizes]

    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as executor:
        points = list(executor.map(_scan_point, configs))

    rows = [row for point_rows, _ in points for row in point_rows]
    verdicts = [verdict for _, verdict in points]
    return ScanResult(
        rows=rows,
        verdicts=verdicts,
        gate_crossover=_first_crossover(rows, lambda r: r.two_qubit_count),
        dq_crossover=_first_crossover(rows, lambda r: r.dq),
    )

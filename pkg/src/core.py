"""
Command orchestration used by the CLI: builds the states a run asks for, drives the protocol, resource
and validation modules, and renders their results. Status lines go to stderr; results go to stdout or a file.
"""
from enum import Enum
from typing import Optional

import click
import numpy as np
from pydantic import BaseModel, Field, model_validator

from .circuit_io import format_circuit
from .config import OUTPUT_CSV
from .errors import InvalidArgumentError, ValidationFailure
from .export import (
    estimate_lines,
    estimate_record,
    render_table,
    save_scan_csv,
    save_text,
    records_csv_text,
    to_json,
)
from .protocols import (
    Part,
    ProtocolKind,
    ReferenceMode,
    build_protocol,
    estimate_overlap,
    oracle_overlap,
)
from .resources import CSV_COLUMNS, DEFAULT_SCAN_PROTOCOLS, crossover_scan
from .statevector import StateVector, random_state
from .synthesis import prepare_state, transpile
from .utils import parse_bitstring
from .validation import run_validation


class Command(str, Enum):
    OVERLAP = "overlap"
    RESOURCES = "resources"
    SYNTH = "synth"
    VALIDATE = "validate"


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class BKind(str, Enum):
    RANDOM = "random"
    ZERO_B0 = "zero-b0"


class RunConfig(BaseModel):
    command: Command
    protocol: ProtocolKind = ProtocolKind.ONE_CONTROL
    n: int = Field(default=2, ge=1)
    p: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    seed_b: Optional[int] = Field(default=None, ge=0)
    shots: int = Field(default=0, ge=0)
    projection: Optional[str] = None
    part: Part = Part.REAL
    output_format: OutputFormat = OutputFormat.TABLE
    output: Optional[str] = None
    reference_mode: ReferenceMode = ReferenceMode.EXACT
    b_kind: BKind = BKind.RANDOM
    n_min: int = Field(default=1, ge=1)
    n_max: int = Field(default=8, ge=1)
    include_zero_control: bool = False
    figure_parity: bool = False
    transpiled: bool = False
    quick: bool = False
    inject_imag_fault: bool = False
    quiet: bool = False

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.projection is not None:
            parse_bitstring(self.projection, self.n)
        if self.n_min > self.n_max:
            raise ValueError(f"--n-min ({self.n_min}) must not exceed --n-max ({self.n_max})")
        return self

    @property
    def effective_seed_b(self):
        return self.seed + 1 if self.seed_b is None else self.seed_b


def status(config, message):
    """
    Echoes a progress line to stderr unless the run is quiet.
    """
    if not config.quiet:
        click.echo(message, err=True)


def _emit(config, text):
    """
    Writes `text` to the configured output file, or stdout when none is given.
    """
    if config.output:
        try:
            save_text(text, config.output)
        except OSError as exc:
            raise InvalidArgumentError(f"Cannot write {config.output}: {exc}")
        status(config, f"   -> Saved to: {config.output}")
    else:
        click.echo(text.rstrip("\n"))


def zero_b0_state(n, seed):
    """
    Seeded random state with the all-zero amplitude removed, so <0...0|B> = 0.
    """
    amplitudes = np.array(random_state(n, seed).amplitudes)
    amplitudes[0] = 0.0
    return StateVector.from_amplitudes(amplitudes, normalize=True)


def build_states(config):
    """
    Synthesizes the seeded A state and the B state (random, or with a vanishing |0...0> amplitude for zero-b0).
    """
    state_a = random_state(config.n, config.seed)
    if config.b_kind == BKind.ZERO_B0:
        state_b = zero_b0_state(config.n, config.effective_seed_b)
    else:
        state_b = random_state(config.n, config.effective_seed_b)
    return prepare_state(state_a), prepare_state(state_b)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_overlap(config):
    """
    Estimates <B|A> (or |<B|A>|^2) with the requested protocol and prints it next to the oracle value.
    """
    prep_a, prep_b = build_states(config)
    mode = f"{config.shots} shots" if config.shots else "exact"
    status(config, f"   -> {config.protocol.value} test on n={config.n} ({mode})")
    estimate = estimate_overlap(
        config.protocol,
        prep_a,
        prep_b,
        shots=config.shots,
        seed=config.seed,
        projection=config.projection,
        reference_mode=config.reference_mode,
    )
    oracle = oracle_overlap(prep_a, prep_b)
    record = estimate_record(estimate, oracle)

    if config.output_format == OutputFormat.JSON:
        _emit(config, to_json(record))
    elif config.output_format == OutputFormat.CSV:
        flat = {
            "protocol": record["protocol"],
            "real": record["real"],
            "imag": record["imag"],
            "magnitude_squared": record["magnitude_squared"],
            "shots": record["shots"],
            "clamped": record["clamped"],
            "abs_error": record["abs_error"],
        }
        _emit(config, records_csv_text([flat]))
    else:
        _emit(config, "\n".join(estimate_lines(estimate, oracle)))
    return estimate


def cmd_resources(config):
    """
    Runs the separable-A / dense-B scan over n_min..n_max at fixed p and emits the rows plus a crossover summary.
    """
    protocols = list(DEFAULT_SCAN_PROTOCOLS)
    if config.include_zero_control:
        protocols.append(ProtocolKind.ZERO_CONTROL)
    sizes = range(config.n_min, config.n_max + 1)
    status(config, f"   -> Scanning n={config.n_min}..{config.n_max}, p={config.p}, seed={config.seed}")
    scan = crossover_scan(sizes, [config.p], config.seed, protocols, config.figure_parity)
    records = scan.records()

    if config.output_format == OutputFormat.JSON:
        _emit(config, to_json(records))
    elif config.output_format == OutputFormat.TABLE and not config.output:
        click.echo(render_table(records, CSV_COLUMNS))
    else:
        path = config.output or OUTPUT_CSV
        try:
            save_scan_csv(records, path)
        except OSError as exc:
            raise InvalidArgumentError(f"Cannot write {path}: {exc}")
        status(config, f"   -> Saved {len(records)} rows to: {path}")

    summary = (
        f"crossover: two-qubit n*={scan.gate_crossover if scan.gate_crossover is not None else 'none'}, "
        f"dq n*={scan.dq_crossover if scan.dq_crossover is not None else 'none'}, "
        f"heuristic {'consistent' if scan.heuristic_consistent else 'INCONSISTENT'}"
    )
    click.echo(summary, err=config.output_format == OutputFormat.JSON and config.output is None)
    return scan


def cmd_synth(config):
    """
    Writes the requested protocol circuit in the circuit text format.
    """
    prep_a, prep_b = build_states(config)
    circuit = build_protocol(config.protocol, prep_a, prep_b, config.part, config.projection)
    if config.transpiled:
        circuit = transpile(circuit)
    title = (
        f"{config.protocol.value} {config.part.value} n={config.n} "
        f"seed={config.seed} seed_b={config.effective_seed_b}"
    )
    status(config, f"   -> {title}: {circuit.num_qubits} qubits, {len(circuit)} instructions")
    _emit(config, format_circuit(circuit, title))
    return circuit


def cmd_validate(config):
    """
    Runs the validation suites; raises ValidationFailure when any suite fails.
    """
    summary = run_validation(quick=config.quick, inject_imag_fault=config.inject_imag_fault, quiet=config.quiet)
    passed = sum(s.passed for s in summary.suites)
    failed = sum(s.failed for s in summary.suites)
    click.echo(f"validation: {passed} passed, {failed} failed in {len(summary.suites)} suites")
    if not summary.ok:
        broken = ", ".join(s.name for s in summary.suites if not s.ok)
        raise ValidationFailure(f"Validation failed: {broken}")
    return summary


COMMANDS = {
    Command.OVERLAP: cmd_overlap,
    Command.RESOURCES: cmd_resources,
    Command.SYNTH: cmd_synth,
    Command.VALIDATE: cmd_validate,
}


def run(config):
    return COMMANDS[config.command](config)

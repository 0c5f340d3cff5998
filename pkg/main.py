"""
CLI entry point for the overlap lab: overlap estimation, resource scans, circuit dumps and validation.
"""
import sys

import click
from pydantic import ValidationError

from src.core import BKind, Command, OutputFormat, RunConfig, run
from src.errors import EXIT_ARGUMENT, OverlapLabError, exit_code_for
from src.protocols import Part, ProtocolKind, ReferenceMode

PROTOCOL_CHOICES = [k.value for k in ProtocolKind]


def _execute(ctx, command, **options):
    """
    Validates the options into a RunConfig, runs the command and maps failures to exit codes.
    """
    quiet = ctx.obj.get("quiet", False) if ctx.obj else False
    try:
        config = RunConfig(command=command, quiet=quiet, **options)
    except ValidationError as exc:
        for error in exc.errors():
            field = ".".join(str(part) for part in error.get("loc", ())) or "options"
            click.echo(f"   [!] {field}: {error.get('msg')}", err=True)
        sys.exit(EXIT_ARGUMENT)

    try:
        run(config)
    except OverlapLabError as exc:
        click.echo(f"   [!] {exc}", err=True)
        sys.exit(exit_code_for(exc))
    except (ValueError, OSError) as exc:
        click.echo(f"   [!] {exc}", err=True)
        sys.exit(exit_code_for(exc))


def state_options(func):
    options = [
        click.option("--protocol", type=click.Choice(PROTOCOL_CHOICES), default=ProtocolKind.ONE_CONTROL.value, show_default=True),
        click.option("--n", "n", type=int, default=2, show_default=True, help="Register width in qubits."),
        click.option("--seed", type=int, default=0, show_default=True, help="Seed of the random |A>."),
        click.option("--seed-b", type=int, default=None, help="Seed of the random |B> (default: seed + 1)."),
        click.option("--b-kind", type=click.Choice([k.value for k in BKind]), default=BKind.RANDOM.value,
                     show_default=True, help="'zero-b0' removes the <0...0|B> amplitude."),
        click.option("--projection", type=str, default=None, help="Basis bitstring t for the reference <t|B>."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--quiet", is_flag=True, help="Suppress status lines on stderr.")
@click.pass_context
def cli(ctx, quiet):
    """
    Scalar-product protocols on a statevector simulator.
    """
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet


@cli.command()
@state_options
@click.option("--shots", type=int, default=0, show_default=True, help="Shot budget; 0 evaluates exactly.")
@click.option("--reference-mode", type=click.Choice([m.value for m in ReferenceMode]),
              default=ReferenceMode.EXACT.value, show_default=True)
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
              default=OutputFormat.TABLE.value, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def overlap(ctx, **options):
    """Estimate <B|A> with one protocol and compare it with the oracle."""
    _execute(ctx, Command.OVERLAP, **options)


@cli.command()
@click.option("--n-min", type=int, default=1, show_default=True)
@click.option("--n-max", type=int, default=8, show_default=True)
@click.option("--p", "p", type=int, default=1, show_default=True, help="Number of blocks in the separable |A>.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--include-zero-control", is_flag=True)
@click.option("--figure-parity", is_flag=True, help="Drop the builders' constant X gates from the X counts (depth unchanged).")
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]),
              default=OutputFormat.CSV.value, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def resources(ctx, **options):
    """Gate-count and depth x qubits scan: Hadamard test vs one-control test."""
    _execute(ctx, Command.RESOURCES, **options)


@cli.command()
@state_options
@click.option("--part", type=click.Choice([p.value for p in Part]), default=Part.REAL.value, show_default=True)
@click.option("--transpiled", is_flag=True, help="Lower to {CZ, RZ, SX, X} before writing.")
@click.option("--output", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def synth(ctx, **options):
    """Write a protocol circuit in the circuit text format."""
    _execute(ctx, Command.SYNTH, **options)


@cli.command()
@click.option("--quick", is_flag=True, help="Reduced widths and seed counts.")
@click.option("--inject-imag-fault", is_flag=True, hidden=True)
@click.pass_context
def validate(ctx, **options):
    """Run the cross-agreement, qubit-count, census, transpile and inflation suites."""
    _execute(ctx, Command.VALIDATE, **options)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()

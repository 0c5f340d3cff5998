"""
Exception hierarchy shared by the library modules, with the exit codes the CLI maps them to.
"""

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_DEGENERATE_REFERENCE = 3
EXIT_VALIDATION = 4


class OverlapLabError(Exception):
    exit_code = 1


class InvalidArgumentError(OverlapLabError, ValueError):
    exit_code = EXIT_ARGUMENT


class WidthMismatchError(InvalidArgumentError):
    pass


class NonUnitaryError(InvalidArgumentError):
    pass


class UnsupportedGateError(InvalidArgumentError):
    pass


class NotTranspiledError(InvalidArgumentError):
    pass


class CircuitFormatError(InvalidArgumentError):
    pass


class DegenerateReferenceError(OverlapLabError):
    """
    Raised when a reference amplitude (b0 or a0) is too small to divide by.
    """
    exit_code = EXIT_DEGENERATE_REFERENCE

    def __init__(self, name, bitstring, magnitude, threshold):
        self.name = name
        self.bitstring = bitstring
        self.magnitude = magnitude
        self.threshold = threshold
        super().__init__(
            f"Reference coefficient {name} = <{bitstring}|.> has magnitude {magnitude:.3e} "
            f"(threshold {threshold:.1e}); recovery only works for a nonzero reference. "
            f"Pass --projection with a bitstring t where <t|B> != 0."
        )


class ValidationFailure(OverlapLabError):
    exit_code = EXIT_VALIDATION


def exit_code_for(exc):
    """
    Maps an exception to the documented CLI exit code.
    """
    if isinstance(exc, OverlapLabError):
        return exc.exit_code
    if isinstance(exc, (ValueError, OSError)):
        return EXIT_ARGUMENT
    return 1

"""
Text, number and bitstring helpers shared by the simulator, the circuit text format and the exporters.
"""
from .config import SIGNIFICANT_DIGITS
from .errors import InvalidArgumentError


def clean_text(text):
    """
    Standardizes text by removing newlines, tabs, and collapsing multiple spaces.
    Keeps circuit text lines and table cells on a single line.
    """
    if not text:
        return ""
    if isinstance(text, list):
        text = " ".join([str(x) for x in text])

    text = str(text).replace('\n', ' ').replace('\r', '').replace('\t', ' ')
    return " ".join(text.split())


def format_number(value, digits=SIGNIFICANT_DIGITS):
    """
    Formats a real number with a fixed number of significant digits and a '.' decimal point.
    """
    if value is None:
        return ""
    text = f"{float(value):.{digits}g}"
    return "0" if text == "-0" else text


def format_complex(value, digits=SIGNIFICANT_DIGITS):
    """
    Formats a complex number as 're+imj' with fixed significant digits.
    """
    value = complex(value)
    imag = format_number(value.imag, digits)
    sign = "" if imag.startswith("-") else "+"
    return f"{format_number(value.real, digits)}{sign}{imag}j"


def parse_bitstring(bitstring, width):
    """
    Validates a basis label (most-significant qubit first) and returns its integer index.
    """
    label = clean_text(bitstring)
    if len(label) != width or any(ch not in "01" for ch in label):
        raise InvalidArgumentError(
            f"Malformed bitstring {bitstring!r}: expected {width} characters of 0/1"
        )
    return int(label, 2)


def qubit_bit(bitstring, qubit):
    """
    Returns the bit for a qubit in a most-significant-first label (qubit 0 is the last character).
    """
    return int(bitstring[len(bitstring) - 1 - qubit])

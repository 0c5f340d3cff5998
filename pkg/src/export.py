"""
Output helpers used by the CLI path: resource-scan CSV, JSON records and plain-text tables, all with
12-significant-digit, locale-independent numbers.
"""
import json
import os

import pandas as pd

from .config import SIGNIFICANT_DIGITS
from .resources import CSV_COLUMNS
from .utils import clean_text, format_complex, format_number


def round_number(value, digits=SIGNIFICANT_DIGITS):
    if value is None:
        return None
    return float(format_number(value, digits))


def _round_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        return round_number(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def estimate_record(estimate, oracle=None):
    """
    Flattens an OverlapEstimate into its JSON object shape, adding the oracle and absolute error when known.
    """
    record = _round_floats(estimate.model_dump(mode="json"))
    if oracle is not None:
        if estimate.value is not None:
            error = abs(estimate.value - oracle)
            record["oracle"] = {"real": round_number(oracle.real), "imag": round_number(oracle.imag)}
        else:
            error = abs(estimate.magnitude_squared - abs(oracle) ** 2)
            record["oracle"] = {"magnitude_squared": round_number(abs(oracle) ** 2)}
        record["abs_error"] = round_number(error)
    return record


def records_csv_text(records, columns=None):
    """
    Renders row dicts as CSV text in the given column order, LF line endings, no index column.
    """
    return pd.DataFrame(records, columns=columns).to_csv(index=False, lineterminator="\n")


def scan_csv_text(records):
    return records_csv_text(records, CSV_COLUMNS)


def save_scan_csv(records, path):
    """
    Writes the resource-scan rows with the fixed column header; parent directories are created.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(scan_csv_text(records))
    return path


def to_json(payload):
    """
    Serializes a payload with every float rounded to 12 significant digits.
    """
    return json.dumps(_round_floats(payload), indent=2, sort_keys=False)


def save_text(text, path):
    """
    Writes text as UTF-8, creating the parent directory if needed, and returns the path.
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


def render_table(records, columns=None):
    """
    Plain-text table for terminal output.
    """
    frame = pd.DataFrame(records, columns=columns)
    if frame.empty:
        return "(no rows)"
    return frame.to_string(index=False)


def estimate_lines(estimate, oracle=None):
    """
    Human-readable summary lines for one overlap estimate.
    """
    lines = [f"protocol          : {estimate.protocol.value}"]
    if estimate.value is not None:
        lines.append(f"overlap <B|A>     : {format_complex(estimate.value)}")
    lines.append(f"|<B|A>|^2         : {format_number(estimate.magnitude_squared)}")
    if estimate.clamped:
        lines.append(f"raw |<B|A>|^2     : {format_number(estimate.magnitude_squared_raw)} (clamped)")
    if oracle is not None:
        lines.append(f"oracle <B|A>      : {format_complex(oracle)}")
        if estimate.value is not None:
            lines.append(f"abs error         : {format_number(abs(estimate.value - oracle))}")
        else:
            lines.append(f"abs error         : {format_number(abs(estimate.magnitude_squared - abs(oracle) ** 2))}")
    for ref in estimate.references:
        lines.append(
            f"reference {ref.name:<7} : <{ref.bitstring}|.> = {format_complex(complex(ref.real, ref.imag))} "
            f"({clean_text(ref.mode.value)})"
        )
    if estimate.shots:
        lines.append(f"shots             : {estimate.shots} (seed {estimate.seed})")
        if estimate.value is not None:
            lines.append(
                f"std error         : {format_number(estimate.variance_real ** 0.5)} (re), "
                f"{format_number(estimate.variance_imag ** 0.5)} (im)"
            )
        else:
            lines.append(f"std error         : {format_number(estimate.variance_magnitude_squared ** 0.5)}")
    return lines

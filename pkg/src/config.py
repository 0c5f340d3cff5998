"""
Configuration module: loads environment variables and exposes simulation caps, numerical tolerances, and output paths.
"""
import os
from datetime import datetime

# Load .env if available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass


def _env_int(name, default):
    try:
        return int(os.getenv(name, default))
    except (TypeError, ValueError):
        return default


def _env_float(name, default):
    try:
        return float(os.getenv(name, default))
    except (TypeError, ValueError):
        return default


# --- SIMULATION CAPS ---
MAX_QUBITS = _env_int("OVERLAP_MAX_QUBITS", 20)
UNITARY_MAX_QUBITS = _env_int("OVERLAP_UNITARY_MAX_QUBITS", 10)
MATRIX_GATE_MAX_QUBITS = _env_int("OVERLAP_MATRIX_GATE_MAX_QUBITS", 3)

# --- TOLERANCES ---
DEGENERACY_THRESHOLD = _env_float("OVERLAP_DEGENERACY_THRESHOLD", 1e-8)
ANGLE_TOLERANCE = _env_float("OVERLAP_ANGLE_TOLERANCE", 1e-12)
NORM_TOLERANCE = _env_float("OVERLAP_NORM_TOLERANCE", 1e-8)
UNITARY_TOLERANCE = 1e-10

# --- APP SETTINGS ---
DEFAULT_REFERENCE_SHOTS = _env_int("OVERLAP_REFERENCE_SHOTS", 100000)
MAX_WORKERS = max(1, _env_int("OVERLAP_MAX_WORKERS", 4))
OUTPUT_DIR = os.getenv("OVERLAP_OUTPUT_DIR") or "."
SIGNIFICANT_DIGITS = 12

# Using a standard timestamp for the filename
TIMESTAMP = datetime.now().strftime("%Y%m%d_%H%M%S")
OUTPUT_CSV = os.path.join(OUTPUT_DIR, f"resource_scan_{TIMESTAMP}.csv")

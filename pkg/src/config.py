import os
from pathlib import Path

# --- Locations ---
REPO_ROOT = Path(__file__).resolve().parent.parent
DIRECTORY_DATA = REPO_ROOT / "data"  # shipped tilings, configurations and fibers
DIRECTORY_CONFIGURATIONS = DIRECTORY_DATA / "configurations"
DIRECTORY_FIBERS = DIRECTORY_DATA / "fibers"

# --- Runtime knobs (environment) ---
LOG_LEVEL = os.environ.get("BURNIAT_LOG_LEVEL", "WARNING").upper()
# Cap on worker processes for per-piece volume computations; 1 runs everything in-process
MAX_WORKERS = max(1, int(os.environ.get("BURNIAT_MAX_WORKERS", "1")))

# --- Exact-core defaults ---
TRIANGULATION_ORDER = "lex"  # pulling vertex per face: "lex" (smallest index) or "reverse"
CHAMBER_ORACLE_MAX_DIM = 4  # chamber cross-check only runs in dimension <= this

# --- Surface lattice ---
NEG_CURVE_MAX_BLOWUPS = 8
NEG_CURVE_DEGREE_BOUND = 6  # complete for k <= 8, cross-checked against SLOW_SCAN_DEGREE_BOUND
SLOW_SCAN_DEGREE_BOUND = 12


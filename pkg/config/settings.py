"""
Configuration management for the quantum network toolkit
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base directories
BASE_DIR = Path(__file__).parent.parent
ASSETS_DIR = BASE_DIR / "src" / "gates" / "assets"


def default_output_dir() -> Path:
    """
    Resolve the output root at call time so QN_OUT_DIR set after import is honoured

    Returns:
        Output directory path
    """
    return Path(os.getenv("QN_OUT_DIR", str(BASE_DIR / "outputs")))


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ("1", "true", "yes")


# Logging Configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("LOG_FILE")  # optional file sink
SHOW_PROGRESS = _env_flag("QN_SHOW_PROGRESS", "true")

# Config documents
CONFIG_SCHEMA_VERSION = 1

# Evaluation Configuration
TRAINING_SET_SIZE = int(os.getenv("QN_TRAINING_SET_SIZE", "10"))
TEST_SET_SIZE = int(os.getenv("QN_TEST_SET_SIZE", "2000"))
SUPP_TABLE_STATES = int(os.getenv("QN_SUPP_TABLE_STATES", "100000"))
HISTOGRAM_BINS = int(os.getenv("QN_HISTOGRAM_BINS", "20"))
EVAL_BATCH_SIZE = int(os.getenv("QN_EVAL_BATCH_SIZE", "500"))

# Genetic algorithm defaults
GA_POPULATION_SIZE = int(os.getenv("QN_GA_POPULATION", "20"))
GA_MAX_GENERATIONS = int(os.getenv("QN_GA_MAX_GENERATIONS", "300"))
GA_MUTATION_RATE = float(os.getenv("QN_GA_MUTATION_RATE", "0.1"))
GA_FITNESS_TARGET = float(os.getenv("QN_GA_FITNESS_TARGET", "0.999"))
GA_STAGNATION_HALVING = int(os.getenv("QN_GA_STAGNATION_HALVING", "50"))
GA_STAGNATION_SWITCH = int(os.getenv("QN_GA_STAGNATION_SWITCH", "100"))
GA_WORKERS = int(os.getenv("QN_GA_WORKERS", "1"))

# Nelder-Mead defaults
NM_MAX_ITERATIONS = int(os.getenv("QN_NM_MAX_ITERATIONS", "2000"))
NM_XATOL = float(os.getenv("QN_NM_XATOL", "1e-8"))
NM_FATOL = float(os.getenv("QN_NM_FATOL", "1e-10"))

# Numerical tolerances
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
FIDELITY_TOL = 1e-9
IMAG_TOL = 1e-12

# Model conventions
SIGMA_DOUBLED = "doubled"   # sigma+- = sigma_x +- i sigma_y, as in the coupling Hamiltonian
SIGMA_LADDER = "ladder"     # conventional |e><g| ladder, as in the one-site model
SIGMA_CONVENTIONS = (SIGMA_DOUBLED, SIGMA_LADDER)
REGISTER_ORDERING = "qubits-first"

# Fidelity measures
MEASURE_OVERLAP = "overlap"     # <phi|rho|phi> for pure ideal outputs
MEASURE_UHLMANN = "uhlmann"     # mixed ideal outputs

# Acceptance thresholds used when a config does not set one
DEFAULT_THRESHOLDS = {
    "single_qubit": 0.995,
    "two_qubit": 0.98,
    "markovian": 0.98,
    "grover2": 0.98,
    "grover3": 0.97,
    "supp_table": 0.999,
    "identity": 1e-10,
}

# Toolkit version recorded in run manifests
TOOLKIT_VERSION = "0.1.0"

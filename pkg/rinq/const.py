""" The constants, helpers and errors for RinQ """

import re
import logging
import math
from voluptuous.error import Invalid

DOMAIN = "rinq"

# Structure ingestion
DEFAULT_MODEL = 1
DEFAULT_PDB_MIRROR = "https://files.rcsb.org/download"
DEFAULT_CACHE_DIR = "~/.cache/rinq"
DEFAULT_HTTP_TIMEOUT_SEC = 30
ENV_PDB_MIRROR = "RINQ_PDB_MIRROR"
ENV_CACHE_DIR = "RINQ_CACHE_DIR"
PDB_ID_REGEX = r"^[0-9][A-Za-z0-9]{3}$"
UNKNOWN_PDB_ID = "XXXX"

# Residue interaction network
DEFAULT_CUTOFF_A = 8.0

# Classical centrality
DEFAULT_POWER_MAX_ITER = 1000
DEFAULT_POWER_TOL = 1e-6
EXPM_SERIES_REL_TOL = 1e-12
EXPM_SERIES_MAX_TERMS = 200

# QUBO
DEFAULT_TAU = 5
DEFAULT_P1_SCALE = 10.0
DEFAULT_ESTRADA_P1_SCALE = 50.0
# at 10n the cubic 1XY1 minimum selects 6 residues instead of 5
DEFAULT_CUBIC_P1_SCALE = 20.0
DEFAULT_P0_SCALE = 1.0

# Annealing
DEFAULT_BETA_MIN = 0.1
DEFAULT_BETA_MAX = 4.0
DEFAULT_SWEEPS = 1000
DEFAULT_READS = 10000
DEFAULT_READS_PER_BLOCK = 256
DEFAULT_SEED = 7
DEFAULT_JOBS = 1
ENERGY_TIE_TOL = 1e-9
BRUTE_FORCE_MAX_UNCONSTRAINED = 24
BRUTE_FORCE_MAX_COMBINATIONS = 10**7
BRUTE_FORCE_CHUNK = 1 << 16

# Corpus
DEFAULT_MAX_CONCURRENCY = 4

MEASURE_EIGENVECTOR = "eigenvector"
MEASURE_ESTRADA = "estrada"
MEASURES = [MEASURE_EIGENVECTOR, MEASURE_ESTRADA]

FORMULATION_SIMPLE = "simple"
FORMULATION_CUBIC = "cubic"
FORMULATIONS = [FORMULATION_SIMPLE, FORMULATION_CUBIC]

QUBO_EIGENVECTOR_SIMPLE = "eigenvector_simple"
QUBO_EIGENVECTOR_CUBIC = "eigenvector_cubic"
QUBO_ESTRADA = "estrada"
QUBO_CUSTOM = "custom"
QUBO_FORMULATIONS = [QUBO_EIGENVECTOR_SIMPLE, QUBO_EIGENVECTOR_CUBIC, QUBO_ESTRADA]

TERM_READING_PUBLISHED = "published"
TERM_READING_DOUBLED = "doubled"
TERM_READINGS = [TERM_READING_PUBLISHED, TERM_READING_DOUBLED]
DEFAULT_TERM_READING = TERM_READING_PUBLISHED

INTERPOLATION_GEOMETRIC = "geometric"
INTERPOLATION_LINEAR = "linear"
INTERPOLATIONS = [INTERPOLATION_GEOMETRIC, INTERPOLATION_LINEAR]
DEFAULT_INTERPOLATION = INTERPOLATION_GEOMETRIC

FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMAT_DOT = "dot"
FORMAT_GRAPHML = "graphml"
FORMAT_TEXT = "text"
GRAPH_FORMATS = [FORMAT_DOT, FORMAT_GRAPHML, FORMAT_JSON]
SCORE_FORMATS = [FORMAT_CSV, FORMAT_JSON]
REPORT_FORMATS = [FORMAT_JSON, FORMAT_TEXT, FORMAT_CSV]
OUTPUT_FORMATS = [FORMAT_JSON, FORMAT_CSV, FORMAT_DOT, FORMAT_GRAPHML, FORMAT_TEXT]

COMMAND_FETCH = "fetch"
COMMAND_GRAPH = "graph"
COMMAND_CENTRALITY = "centrality"
COMMAND_SOLVE = "solve"
COMMAND_COMPARE = "compare"
COMMAND_CORPUS = "corpus"
COMMAND_PENALTIES = "penalties"
COMMANDS = [COMMAND_FETCH, COMMAND_GRAPH, COMMAND_CENTRALITY, COMMAND_SOLVE, COMMAND_COMPARE, COMMAND_CORPUS, COMMAND_PENALTIES]

STAGE_INGEST = "ingest"
STAGE_FETCH = "fetch"
STAGE_GRAPH = "graph"
STAGE_CENTRALITY = "centrality"
STAGE_QUBO = "qubo"
STAGE_ANNEAL = "anneal"
STAGE_ANALYSIS = "analysis"
STAGE_CLI = "cli"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PIPELINE = 2
EXIT_NO_VALID_SAMPLE = 3

CONF_COMMAND = "command"
CONF_SOURCE = "source"
CONF_CHAIN = "chain"
CONF_MODEL = "model"
CONF_CUTOFF = "cutoff"
CONF_MEASURE = "measure"
CONF_FORMULATION = "formulation"
CONF_TERM_READING = "term_reading"
CONF_TAU = "tau"
CONF_P0 = "p0"
CONF_P1 = "p1"
CONF_SCHEDULE = "schedule"
CONF_BETA_MIN = "beta_min"
CONF_BETA_MAX = "beta_max"
CONF_SWEEPS = "sweeps"
CONF_READS = "reads"
CONF_INTERPOLATION = "interpolation"
CONF_SEED = "seed"
CONF_JOBS = "jobs"
CONF_FORMAT = "format"
CONF_OUTPUT = "output"
CONF_CACHE_DIR = "cache_dir"
CONF_MIRROR = "mirror"
CONF_TAU_SWEEP = "tau_sweep"
CONF_NORMALIZE = "normalize"
CONF_MAX_CONCURRENCY = "max_concurrency"

CORPUS_CSV_HEADER = ["pdb_id", "n", "edges", "measure", "tau", "classical_top", "qubo_top", "jaccard", "energy", "valid_fraction", "status"]

_LOGGER = logging.getLogger(__name__)


def normalize_pdb_id(value: str) -> str:
    """Check a PDB identifier and return it uppercased"""
    if value is None or not re.match(PDB_ID_REGEX, value.strip()):
        raise InvalidPdbIdError(f"'{value}' is not a valid PDB identifier (expected a digit followed by 3 alphanumerics)")
    return value.strip().upper()


def validate_pdb_id(value: str) -> str:
    """voluptuous validator for a PDB identifier"""
    try:
        return normalize_pdb_id(value)
    except InvalidPdbIdError as err:
        raise Invalid(str(err)) from err


def residue_label(chain_id: str, res_seq: int, res_name: str, insertion_code: str = "") -> str:
    """The human readable label of a residue, ie 'A:6:CYS'"""
    return f"{chain_id}:{res_seq}{insertion_code or ''}:{res_name}"


def bits_to_string(bits) -> str:
    """Render a bit vector index-0-first"""
    return "".join("1" if b else "0" for b in bits)


def selection_key(bits) -> tuple:
    """Ordering key giving the bit vector whose selected index list is lexicographically smallest first (110000 before 101000)"""
    return tuple(1 - int(b) for b in bits)


def get_safe_float(value) -> float | None:
    """Get a finite float from value or None"""
    if value is None:
        return None
    try:
        float_val = float(value)
    except (TypeError, ValueError):
        return None
    return float_val if math.isfinite(float_val) else None


class RinqError(Exception):
    """The base of all RinQ errors"""

    stage: str = STAGE_CLI
    exit_code: int = EXIT_PIPELINE

    def __init__(self, message, stage: str | None = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage


class UsageError(RinqError):
    """A caller passed an invalid argument"""

    exit_code = EXIT_USAGE


class ConfigurationError(UsageError):
    """An error in configuration"""


class PdbParseError(RinqError):
    """A structure file could not be parsed"""

    stage = STAGE_INGEST

    def __init__(self, message, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyStructureError(RinqError):
    """A structure file holds no ATOM record"""

    stage = STAGE_INGEST


class InvalidPdbIdError(UsageError):
    """A PDB identifier does not have the expected format"""

    stage = STAGE_FETCH


class PdbFetchError(RinqError):
    """The download of a structure failed"""

    stage = STAGE_FETCH

    def __init__(self, message, status: int | None = None):
        super().__init__(message if status is None else f"{message} (HTTP {status})")
        self.status = status


class CacheIOError(RinqError):
    """The structure cache could not be written"""

    stage = STAGE_FETCH


class DegenerateInputError(RinqError):
    """The input has no edge (or no element) where one is required"""

    stage = STAGE_GRAPH


class ConvergenceError(RinqError):
    """Power iteration did not converge"""

    stage = STAGE_CENTRALITY

    def __init__(self, message, residual: float):
        super().__init__(f"{message} (final residual {residual:.3e})")
        self.residual = residual


class InstanceTooLargeError(RinqError):
    """An exhaustive search would be too large"""

    stage = STAGE_ANNEAL


class SweepError(RinqError):
    """A tau sweep level has no valid sample"""

    stage = STAGE_ANALYSIS

    def __init__(self, message, level: int):
        super().__init__(message)
        self.level = level


class NoValidSampleError(RinqError):
    """No sample satisfies the cardinality constraint"""

    stage = STAGE_ANNEAL
    exit_code = EXIT_NO_VALID_SAMPLE


class PipelineError(RinqError):
    """An upstream error decorated with the pipeline stage where it happened"""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(str(cause), stage=stage)
        self.cause = cause
        self.exit_code = cause.exit_code if isinstance(cause, RinqError) else EXIT_PIPELINE

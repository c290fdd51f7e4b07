""" QUBO matrices selecting the top-tau central residues """

import csv
import hashlib
import io
import json
from dataclasses import dataclass

import numpy as np

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .rin import degree_unit_vector

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuboMatrix:
    """A dense symmetric QUBO with its provenance"""

    entries: np.ndarray
    formulation: str
    tau: int | None
    p0: float | None
    p1: float | None
    term_reading: str | None = None

    @property
    def n(self) -> int:
        """The number of binary variables"""
        return self.entries.shape[0]

    def digest(self) -> str:
        """Content hash of Q"""
        entries = np.ascontiguousarray(self.entries, dtype=np.float64)
        return hashlib.sha256(f"{entries.shape}".encode("ascii") + entries.tobytes()).hexdigest()

    @classmethod
    def from_array(cls, entries, tau: int | None = None) -> "QuboMatrix":
        """Wrap a raw matrix, symmetrizing it"""
        matrix = np.asarray(entries, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise UsageError(f"a QUBO matrix must be square, got shape {matrix.shape}", stage=STAGE_QUBO)
        return cls(entries=(matrix + matrix.T) / 2.0, formulation=QUBO_CUSTOM, tau=tau, p0=None, p1=None)


def _check_tau(n: int, tau: int):
    if not 1 <= tau <= n:
        raise UsageError(f"tau must be between 1 and {n}, got {tau}", stage=STAGE_QUBO)


def constraint_matrix(n: int, tau: int) -> np.ndarray:
    """C = (1 - 2 tau) I + U. For x with k ones x'Cx = (k - tau)^2 - tau^2"""
    _check_tau(n, tau)
    return np.ones((n, n)) + (1.0 - 2.0 * tau - 1.0) * np.eye(n)


def default_penalties(n: int, p1_scale: float = DEFAULT_P1_SCALE) -> tuple[float, float]:
    """(1/sqrt(n), p1_scale * n)"""
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}", stage=STAGE_QUBO)
    return 1.0 / math.sqrt(n), p1_scale * n


def resolve_penalties(n: int, formulation: str, p0: float | None = None, p1: float | None = None) -> tuple[float, float]:
    """Fill the missing penalties with the defaults of the formulation"""
    p1_scale = {QUBO_ESTRADA: DEFAULT_ESTRADA_P1_SCALE, QUBO_EIGENVECTOR_CUBIC: DEFAULT_CUBIC_P1_SCALE}.get(formulation, DEFAULT_P1_SCALE)
    default_p0, default_p1 = default_penalties(n, p1_scale)
    return (default_p0 if p0 is None else float(p0), default_p1 if p1 is None else float(p1))


def _symmetric_outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u v' + v u'"""
    outer = np.outer(u, v)
    return outer + outer.T


def _assemble(centrality_term: np.ndarray, n: int, tau: int, p0: float, p1: float) -> np.ndarray:
    entries = -p0 * centrality_term + p1 * constraint_matrix(n, tau)
    return (entries + entries.T) / 2.0


def build_eigenvector_qubo(adjacency_matrix, tau: int, p0: float, p1: float, term_reading: str = DEFAULT_TERM_READING) -> QuboMatrix:
    """Simplified eigenvector centrality QUBO.

    doubled:   Q = -2 p0 (A d)(A d)' + p1 C
    published: Q = -p0 (A d)(A d)' - p0 ((A2 d)(A d)' + (A d)(A2 d)')/2 + p1 C
    """
    matrix = np.asarray(adjacency_matrix, dtype=float)
    n = matrix.shape[0]
    _check_tau(n, tau)
    d_hat = degree_unit_vector(matrix)
    walk1 = matrix @ d_hat

    if term_reading == TERM_READING_DOUBLED:
        centrality_term = 2.0 * np.outer(walk1, walk1)
    elif term_reading == TERM_READING_PUBLISHED:
        walk2 = matrix @ walk1
        centrality_term = np.outer(walk1, walk1) + _symmetric_outer(walk2, walk1) / 2.0
    else:
        raise UsageError(f"unknown term reading '{term_reading}' (expected one of {TERM_READINGS})", stage=STAGE_QUBO)

    _LOGGER.info("Built the eigenvector QUBO (n=%d, tau=%d, p0=%.6f, p1=%.2f, reading=%s)", n, tau, p0, p1, term_reading)
    return QuboMatrix(
        entries=_assemble(centrality_term, n, tau, p0, p1),
        formulation=QUBO_EIGENVECTOR_SIMPLE,
        tau=tau,
        p0=p0,
        p1=p1,
        term_reading=term_reading,
    )


def build_eigenvector_qubo_cubic(adjacency_matrix, tau: int, p0: float, p1: float) -> QuboMatrix:
    """Q = -p0 (A2 d)(A d)' - p0 (A d)(A2 d)' + p1 C"""
    matrix = np.asarray(adjacency_matrix, dtype=float)
    n = matrix.shape[0]
    _check_tau(n, tau)
    d_hat = degree_unit_vector(matrix)
    walk1 = matrix @ d_hat
    walk2 = matrix @ walk1
    _LOGGER.info("Built the cubic eigenvector QUBO (n=%d, tau=%d, p0=%.6f, p1=%.2f)", n, tau, p0, p1)
    return QuboMatrix(entries=_assemble(_symmetric_outer(walk2, walk1), n, tau, p0, p1), formulation=QUBO_EIGENVECTOR_CUBIC, tau=tau, p0=p0, p1=p1)


def truncated_expm(adjacency_matrix) -> np.ndarray:
    """E = I + A + A^2/2 + A^3/6"""
    matrix = np.asarray(adjacency_matrix, dtype=float)
    square = matrix @ matrix
    return np.eye(matrix.shape[0]) + matrix + square / 2.0 + square @ matrix / 6.0


def truncation_error_bound(edge_count: int) -> float:
    """Frobenius bound of exp(A) - truncated_expm(A): e^z - (1 + z + z^2/2 + z^3/6) with z = sqrt(2|E|)"""
    if edge_count < 0:
        raise UsageError(f"edge count must be >= 0, got {edge_count}", stage=STAGE_QUBO)
    z = math.sqrt(2.0 * edge_count)
    return math.expm1(z) - z - z * z / 2.0 - z**3 / 6.0


def build_estrada_qubo(adjacency_matrix, tau: int, p0: float, p1: float) -> QuboMatrix:
    """Q = -p0 (E d)(E d)' + p1 C with E the cubic truncation of exp(A)"""
    matrix = np.asarray(adjacency_matrix, dtype=float)
    n = matrix.shape[0]
    _check_tau(n, tau)
    d_hat = degree_unit_vector(matrix)
    walks = truncated_expm(matrix) @ d_hat
    _LOGGER.info("Built the Estrada QUBO (n=%d, tau=%d, p0=%.6f, p1=%.2f)", n, tau, p0, p1)
    return QuboMatrix(entries=_assemble(np.outer(walks, walks), n, tau, p0, p1), formulation=QUBO_ESTRADA, tau=tau, p0=p0, p1=p1)


def qubo_kind(measure: str, formulation: str = FORMULATION_SIMPLE) -> str:
    """The QUBO formulation for a measure and an eigenvector form"""
    if measure == MEASURE_ESTRADA:
        return QUBO_ESTRADA
    if measure != MEASURE_EIGENVECTOR:
        raise UsageError(f"unknown measure '{measure}' (expected one of {MEASURES})", stage=STAGE_QUBO)
    if formulation not in FORMULATIONS:
        raise UsageError(f"unknown formulation '{formulation}' (expected one of {FORMULATIONS})", stage=STAGE_QUBO)
    return QUBO_EIGENVECTOR_CUBIC if formulation == FORMULATION_CUBIC else QUBO_EIGENVECTOR_SIMPLE


def build_qubo(
    adjacency_matrix,
    kind: str,
    tau: int,
    p0: float | None = None,
    p1: float | None = None,
    term_reading: str = DEFAULT_TERM_READING,
) -> QuboMatrix:
    """Build any of the QUBO formulations, missing penalties taking their defaults"""
    n = np.asarray(adjacency_matrix).shape[0]
    p0, p1 = resolve_penalties(n, kind, p0, p1)
    if kind == QUBO_EIGENVECTOR_SIMPLE:
        return build_eigenvector_qubo(adjacency_matrix, tau, p0, p1, term_reading=term_reading)
    if kind == QUBO_EIGENVECTOR_CUBIC:
        return build_eigenvector_qubo_cubic(adjacency_matrix, tau, p0, p1)
    if kind == QUBO_ESTRADA:
        return build_estrada_qubo(adjacency_matrix, tau, p0, p1)
    raise UsageError(f"unknown QUBO formulation '{kind}' (expected one of {QUBO_FORMULATIONS})", stage=STAGE_QUBO)


def _entries_of(qubo) -> np.ndarray:
    return qubo.entries if isinstance(qubo, QuboMatrix) else np.asarray(qubo, dtype=float)


def qubo_energy(qubo, bits) -> float:
    """x'Qx summed over the selected variables only"""
    entries = _entries_of(qubo)
    x = np.asarray(bits)
    if x.ndim != 1 or x.shape[0] != entries.shape[0]:
        raise UsageError(f"bit vector of size {x.size} does not match a QUBO of size {entries.shape[0]}", stage=STAGE_QUBO)
    if not np.isin(x, (0, 1)).all():
        raise UsageError("the vector must be binary", stage=STAGE_QUBO)
    selected = np.flatnonzero(x)
    return float(entries[np.ix_(selected, selected)].sum())


def qubo_to_dict(qubo: QuboMatrix) -> dict:
    """Nonzero entries (i <= j) of the symmetric matrix with the provenance"""
    rows, cols = np.nonzero(np.triu(qubo.entries))
    return {
        "n": qubo.n,
        "tau": qubo.tau,
        "p0": qubo.p0,
        "p1": qubo.p1,
        "formulation": qubo.formulation,
        "term_reading": qubo.term_reading,
        "digest": qubo.digest(),
        "entries": [[int(i), int(j), float(qubo.entries[i, j])] for i, j in zip(rows, cols)],
    }


def qubo_to_json(qubo: QuboMatrix) -> str:
    """The JSON document of a QUBO"""
    return json.dumps(qubo_to_dict(qubo), indent=2, sort_keys=True) + "\n"


def qubo_to_csv(qubo: QuboMatrix) -> str:
    """Upper triangular COO form for external solvers: q_ij + q_ji folded into one coefficient"""
    folded = np.triu(qubo.entries) + np.triu(qubo.entries, k=1)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["i", "j", "q"])
    for i, j in zip(*np.nonzero(folded)):
        writer.writerow([int(i), int(j), repr(float(folded[i, j]))])
    return buffer.getvalue()

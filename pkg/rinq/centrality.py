""" Classical centrality oracles: eigenvector centrality by power iteration and Estrada centrality by the matrix exponential """

import csv
import io
import json
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .rin import ResidueGraph, WARNING_DISCONNECTED_GRAPH

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CentralityScores:
    """Scores by node index"""

    measure: str
    values: tuple[float, ...]
    eigenvalue_estimate: float | None = None
    iterations: int | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        """The scores as a numpy vector"""
        return np.array(self.values, dtype=float)


def _check_square(adjacency_matrix) -> np.ndarray:
    matrix = np.asarray(adjacency_matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise UsageError(f"expected a square matrix, got shape {matrix.shape}", stage=STAGE_CENTRALITY)
    return matrix


def eigenvector_centrality(adjacency_matrix, max_iter: int = DEFAULT_POWER_MAX_ITER, tol: float = DEFAULT_POWER_TOL) -> CentralityScores:
    """Power iteration from the uniform vector, stopped when ||x_k+1 - x_k||_1 < n * tol.

    The iteration is applied to A + I, as the networkx implementation does: it has the
    same eigenvectors as A but no -lambda partner eigenvalue, so it also converges on
    bipartite graphs (a path for instance) where plain A iterations oscillate.
    """
    matrix = _check_square(adjacency_matrix)
    n = matrix.shape[0]
    if n == 0 or not matrix.any():
        raise DegenerateInputError("eigenvector centrality is undefined for a graph without edge", stage=STAGE_CENTRALITY)

    warnings = []
    if not nx.is_connected(nx.from_numpy_array(matrix)):
        _LOGGER.warning("The graph is disconnected: eigenvector centrality only describes its dominant component")
        warnings.append(WARNING_DISCONNECTED_GRAPH)

    x = np.full(n, 1.0 / np.sqrt(n))
    for iteration in range(1, max_iter + 1):
        x_last = x
        x = matrix @ x_last + x_last
        x = x / np.linalg.norm(x)
        if np.abs(x - x_last).sum() < n * tol:
            eigenvalue = float(x @ matrix @ x)
            _LOGGER.debug("Power iteration converged after %d iterations, lambda=%.6f", iteration, eigenvalue)
            return CentralityScores(
                measure=MEASURE_EIGENVECTOR,
                values=tuple(float(v) for v in np.abs(x)),
                eigenvalue_estimate=eigenvalue,
                iterations=iteration,
                warnings=tuple(warnings),
            )

    eigenvalue = float(x @ matrix @ x)
    residual = float(np.linalg.norm(matrix @ x - eigenvalue * x))
    _LOGGER.error("Power iteration did not converge in %d iterations", max_iter)
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", residual)


def matrix_exponential(adjacency_matrix) -> np.ndarray:
    """exp(A) by scaling and squaring of the Taylor series, symmetrized on output"""
    matrix = _check_square(adjacency_matrix)
    n = matrix.shape[0]
    norm = np.linalg.norm(matrix, "fro")
    squarings = max(0, int(np.ceil(np.log2(norm)))) if norm > 0 else 0
    scaled = matrix / (2.0**squarings)

    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, EXPM_SERIES_MAX_TERMS + 1):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, "fro") < EXPM_SERIES_REL_TOL * np.linalg.norm(result, "fro"):
            break

    for _ in range(squarings):
        result = result @ result

    return (result + result.T) / 2.0


def estrada_centrality(adjacency_matrix) -> CentralityScores:
    """Estrada (subgraph) centrality: the diagonal of exp(A)"""
    exponential = matrix_exponential(adjacency_matrix)
    return CentralityScores(measure=MEASURE_ESTRADA, values=tuple(float(v) for v in np.diag(exponential)))


def compute_centrality(adjacency_matrix, measure: str, max_iter: int = DEFAULT_POWER_MAX_ITER, tol: float = DEFAULT_POWER_TOL) -> CentralityScores:
    """Dispatch on the measure name"""
    if measure == MEASURE_EIGENVECTOR:
        return eigenvector_centrality(adjacency_matrix, max_iter=max_iter, tol=tol)
    if measure == MEASURE_ESTRADA:
        return estrada_centrality(adjacency_matrix)
    raise UsageError(f"unknown measure '{measure}' (expected one of {MEASURES})", stage=STAGE_CENTRALITY)


def top_tau(scores: CentralityScores, tau: int) -> list[int]:
    """The tau best nodes, descending score, ascending index on ties"""
    n = len(scores.values)
    if not 1 <= tau <= n:
        raise UsageError(f"tau must be between 1 and {n}, got {tau}", stage=STAGE_CENTRALITY)
    return sorted(range(n), key=lambda i: (-scores.values[i], i))[:tau]


def scores_to_rows(scores: CentralityScores, graph: ResidueGraph) -> list[dict]:
    """One row per node: index, chain, res_seq, res_name, score"""
    return [
        {
            "index": index,
            "chain": node.chain_id,
            "res_seq": node.res_seq,
            "res_name": node.res_name,
            "score": value,
        }
        for index, (node, value) in enumerate(zip(graph.nodes, scores.values))
    ]


def scores_to_csv(scores: CentralityScores, graph: ResidueGraph) -> str:
    """CSV with the header index,chain,res_seq,res_name,score"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=["index", "chain", "res_seq", "res_name", "score"], lineterminator="\n")
    writer.writeheader()
    for row in scores_to_rows(scores, graph):
        writer.writerow({**row, "score": f"{row['score']:.10g}"})
    return buffer.getvalue()


def scores_to_json(scores: CentralityScores, graph: ResidueGraph) -> str:
    """JSON document of the scores with their provenance"""
    document = {
        "pdb_id": graph.pdb_id,
        "measure": scores.measure,
        "eigenvalue_estimate": scores.eigenvalue_estimate,
        "scores": scores_to_rows(scores, graph),
        "warnings": list(scores.warnings),
    }
    return json.dumps(document, indent=2, sort_keys=True) + "\n"

"""RinQ: top-tau central residues of protein residue interaction networks by QUBO and simulated annealing"""

__version__ = "1.0.0"

from .const import RinqError  # noqa: E402
from .pdb_ingest import ResidueRecord, StructureModel, extract_ca, fetch_pdb, parse_pdb  # noqa: E402
from .rin import ResidueGraph, adjacency, build_rin, degree_unit_vector, export_graph, load_graph  # noqa: E402
from .centrality import CentralityScores, eigenvector_centrality, estrada_centrality, matrix_exponential, top_tau  # noqa: E402
from .qubo import (  # noqa: E402
    QuboMatrix,
    build_eigenvector_qubo,
    build_eigenvector_qubo_cubic,
    build_estrada_qubo,
    constraint_matrix,
    default_penalties,
    qubo_energy,
    truncated_expm,
    truncation_error_bound,
)
from .simulated_annealing_algo import AnnealSchedule, Sample, SampleSet, SimulatedAnnealingAlgorithm, anneal, brute_force_solve, filter_valid  # noqa: E402
from .analysis import AnalysisReport, jaccard, render_report, tau_sweep_ranking  # noqa: E402
from .coordinator import RinqCoordinator, compare_run  # noqa: E402

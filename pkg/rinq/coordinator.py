""" The coordinator chaining the pipeline stages: ingest, graph, classical scores, QUBO, anneal and analysis """

import asyncio
import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .config_schema import run_config_schema, validate_config
from .pdb_ingest import extract_ca, fetch_pdb, parse_pdb, select_model
from .rin import ResidueGraph, adjacency, build_rin, load_graph
from .centrality import CentralityScores, compute_centrality
from .qubo import QuboMatrix, build_qubo, qubo_kind
from .simulated_annealing_algo import AnnealSchedule, Sample, SampleSet, SimulatedAnnealingAlgorithm, filter_valid
from .analysis import AnalysisReport, build_report, report_row, tau_sweep_ranking

_LOGGER = logging.getLogger(__name__)


@contextmanager
def pipeline_stage(stage: str):
    """Label any RinqError or OSError raised inside the block with the pipeline stage"""
    try:
        yield
    except PipelineError:
        raise
    except (RinqError, OSError) as err:
        _LOGGER.error("Stage %s failed: %s", stage, err)
        raise PipelineError(stage, err) from err


@dataclass(frozen=True)
class SolveResult:
    """The outputs of one QUBO solve"""

    graph: ResidueGraph
    qubo: QuboMatrix
    samples: SampleSet
    best: Sample | None


class RinqCoordinator:
    """Runs the pipeline for one validated run configuration"""

    _config: dict

    def __init__(self, config: dict | None = None):
        self._config = validate_config(run_config_schema, config or {})
        _LOGGER.debug("Coordinator configuration: %s", self._config)

    @property
    def config(self) -> dict:
        """The validated configuration"""
        return self._config

    @property
    def schedule(self) -> AnnealSchedule:
        """The anneal schedule of the configuration"""
        with pipeline_stage(STAGE_ANNEAL):
            return AnnealSchedule.from_config(self._config[CONF_SCHEDULE])

    @property
    def kind(self) -> str:
        """The QUBO formulation for the configured measure"""
        return qubo_kind(self._config[CONF_MEASURE], self._config[CONF_FORMULATION])

    def with_overrides(self, **overrides) -> "RinqCoordinator":
        """A coordinator on the same configuration with some values replaced"""
        config = dict(self._config)
        schedule = dict(config[CONF_SCHEDULE])
        if CONF_SEED in overrides:
            schedule[CONF_SEED] = overrides.pop(CONF_SEED)
        config.update(overrides)
        config[CONF_SCHEDULE] = schedule
        return RinqCoordinator(config)

    def read_structure(self, source: str) -> str:
        """The PDB text of a source: a path to a file or a PDB identifier"""
        path = Path(source).expanduser()
        if path.is_file():
            with pipeline_stage(STAGE_INGEST):
                return path.read_text(encoding="utf-8")
        if re.match(PDB_ID_REGEX, source):
            with pipeline_stage(STAGE_FETCH):
                return fetch_pdb(source, self._config[CONF_CACHE_DIR], self._config[CONF_MIRROR])
        raise PipelineError(STAGE_INGEST, FileNotFoundError(f"file not found: {source}"))

    def load_graph(self, source: str) -> ResidueGraph:
        """The residue interaction network of a PDB id, a .pdb file or a graph .json file"""
        if source.lower().endswith(".json"):
            path = Path(source).expanduser()
            if not path.is_file():
                raise PipelineError(STAGE_INGEST, FileNotFoundError(f"file not found: {source}"))
            with pipeline_stage(STAGE_GRAPH):
                return load_graph(path.read_text(encoding="utf-8"))

        text = self.read_structure(source)
        pdb_id = source.upper() if re.match(PDB_ID_REGEX, source) else None
        with pipeline_stage(STAGE_INGEST):
            model = select_model(parse_pdb(text, pdb_id=pdb_id), self._config[CONF_MODEL])
            residues = extract_ca(model, self._config[CONF_CHAIN])
        with pipeline_stage(STAGE_GRAPH):
            return build_rin(residues, self._config[CONF_CUTOFF], pdb_id=model.pdb_id)

    def centrality(self, graph: ResidueGraph, measure: str | None = None) -> CentralityScores:
        """Classical scores of the graph"""
        with pipeline_stage(STAGE_CENTRALITY):
            return compute_centrality(adjacency(graph), measure or self._config[CONF_MEASURE])

    def build_qubo(self, graph: ResidueGraph) -> QuboMatrix:
        """The QUBO of the configured measure, formulation, tau and penalties"""
        with pipeline_stage(STAGE_QUBO):
            return build_qubo(
                adjacency(graph),
                self.kind,
                self._config[CONF_TAU],
                p0=self._config[CONF_P0],
                p1=self._config[CONF_P1],
                term_reading=self._config[CONF_TERM_READING],
            )

    def solve(self, graph: ResidueGraph) -> SolveResult:
        """Build the QUBO, anneal it and keep the best valid sample"""
        qubo = self.build_qubo(graph)
        schedule = self.schedule
        with pipeline_stage(STAGE_ANNEAL):
            samples = SimulatedAnnealingAlgorithm(schedule).anneal(qubo)
            best = filter_valid(samples, self._config[CONF_TAU])
        return SolveResult(graph=graph, qubo=qubo, samples=samples, best=best)

    def compare(self, source: str) -> AnalysisReport:
        """The whole pipeline for one source"""
        graph = self.load_graph(source)
        classical = self.centrality(graph)
        result = self.solve(graph)
        sweep = None
        if self._config[CONF_TAU_SWEEP]:
            with pipeline_stage(STAGE_ANALYSIS):
                sweep = tau_sweep_ranking(
                    adjacency(graph),
                    self.kind,
                    self._config[CONF_TAU],
                    self.schedule,
                    p0=self._config[CONF_P0],
                    p1=self._config[CONF_P1],
                    term_reading=self._config[CONF_TERM_READING],
                    classical=classical,
                )
        with pipeline_stage(STAGE_ANALYSIS):
            report = build_report(
                graph,
                self._config[CONF_MEASURE],
                self.kind,
                self._config[CONF_TAU],
                classical,
                result.qubo,
                result.samples,
                result.best,
                self._config[CONF_TERM_READING],
                sweep,
            )
        _LOGGER.info("Compared %s: jaccard=%s energy=%s", report.pdb_id, report.jaccard, report.qubo_energy)
        return report

    async def async_run_corpus(self, entries: list[dict], max_concurrency: int | None = None) -> list[dict]:
        """Compare every manifest entry, at most max_concurrency at once. Rows keep the manifest order"""
        semaphore = asyncio.Semaphore(max_concurrency or self._config[CONF_MAX_CONCURRENCY])

        async def run_one(entry: dict) -> dict:
            overrides = {key: value for key, value in entry.items() if key != CONF_SOURCE}
            async with semaphore:
                try:
                    coordinator = self.with_overrides(**overrides)
                    report = await asyncio.to_thread(coordinator.compare, entry[CONF_SOURCE])
                except RinqError as err:
                    _LOGGER.warning("Corpus entry %s failed: [%s] %s", entry[CONF_SOURCE], err.stage, err)
                    return {"pdb_id": entry[CONF_SOURCE], "status": f"error: [{err.stage}] {err}"}
            return report_row(report)

        return list(await asyncio.gather(*(run_one(entry) for entry in entries)))


def compare_run(pdb_source: str, measure: str, tau: int, schedule: AnnealSchedule, parameters: dict | None = None) -> AnalysisReport:
    """Run the pipeline end to end for one protein"""
    config = dict(parameters or {})
    config.update({CONF_MEASURE: measure, CONF_TAU: tau, CONF_SCHEDULE: {**schedule.as_dict(), CONF_JOBS: schedule.jobs}})
    return RinqCoordinator(config).compare(pdb_source)

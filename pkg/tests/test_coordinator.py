""" The tests of the pipeline coordinator and of the asynchronous corpus run """
# pylint: disable=unused-argument, wildcard-import, unused-wildcard-import

from rinq.config_schema import parse_corpus_manifest
from rinq.coordinator import RinqCoordinator, pipeline_stage

from .commons import *

FAST = {CONF_READS: 200, CONF_SWEEPS: 100}


def make_coordinator(cache_dir, **config) -> RinqCoordinator:
    """A coordinator on a test cache with a cheap schedule"""
    return RinqCoordinator({CONF_CACHE_DIR: str(cache_dir), CONF_SCHEDULE: dict(FAST), **config})


def test_pipeline_stage_labels_errors():
    """RinqError and OSError are wrapped with the stage, other errors pass through"""
    with pytest.raises(PipelineError) as error:
        with pipeline_stage(STAGE_QUBO):
            raise UsageError("bad tau")
    assert error.value.stage == STAGE_QUBO
    assert error.value.exit_code == EXIT_USAGE

    with pytest.raises(PipelineError) as error:
        with pipeline_stage(STAGE_INGEST):
            raise FileNotFoundError("missing.pdb")
    assert error.value.exit_code == EXIT_PIPELINE

    with pytest.raises(PipelineError) as error:
        with pipeline_stage(STAGE_ANALYSIS):
            with pipeline_stage(STAGE_ANNEAL):
                raise NoValidSampleError("none")
    assert error.value.stage == STAGE_ANNEAL
    assert error.value.exit_code == EXIT_NO_VALID_SAMPLE

    with pytest.raises(ValueError):
        with pipeline_stage(STAGE_GRAPH):
            raise ValueError("not ours")


def test_invalid_configuration():
    """A configuration outside the schema is a usage error"""
    with pytest.raises(ConfigurationError) as error:
        RinqCoordinator({CONF_TAU: 0})
    assert error.value.exit_code == EXIT_USAGE

    with pytest.raises(ConfigurationError):
        RinqCoordinator({CONF_SCHEDULE: {CONF_BETA_MIN: 2.0, CONF_BETA_MAX: 1.0}})


def test_with_overrides(cache_dir):
    """Overrides replace values and the seed goes to the schedule"""
    coordinator = make_coordinator(cache_dir)
    other = coordinator.with_overrides(**{CONF_TAU: 3, CONF_SEED: 42, CONF_MEASURE: MEASURE_ESTRADA})

    assert other.config[CONF_TAU] == 3
    assert other.schedule.seed == 42
    assert other.schedule.reads == 200
    assert other.kind == QUBO_ESTRADA
    assert coordinator.config[CONF_TAU] == DEFAULT_TAU
    assert coordinator.schedule.seed == DEFAULT_SEED


def test_load_graph_from_pdb_file(tmp_path, cache_dir):
    """A .pdb file gives a graph with the chain and cutoff of the configuration"""
    path = tmp_path / "peptide.pdb"
    path.write_text(straight_peptide_pdb("9PEP", 6), encoding="utf-8")

    graph = make_coordinator(cache_dir).load_graph(str(path))
    assert graph.pdb_id == "9PEP"
    assert graph.n == 6
    assert graph.edge_count == 9
    assert graph.labels[0] == "A:1:MET"

    assert make_coordinator(cache_dir, **{CONF_CUTOFF: 4.0}).load_graph(str(path)).edge_count == 5

    with pytest.raises(PipelineError) as error:
        make_coordinator(cache_dir, **{CONF_CHAIN: "B"}).load_graph(str(path))
    assert error.value.stage == STAGE_GRAPH


def test_load_graph_from_cache(cache_dir):
    """A PDB identifier is read from the cache"""
    (cache_dir / "9PEP.pdb").write_text(straight_peptide_pdb("9PEP", 5), encoding="utf-8")
    with patch("rinq.pdb_ingest.requests.get") as mock_get:
        graph = make_coordinator(cache_dir).load_graph("9pep")
    mock_get.assert_not_called()
    assert graph.pdb_id == "9PEP"
    assert graph.n == 5


def test_load_graph_missing_sources(cache_dir):
    """Missing files are pipeline errors of the ingest stage"""
    coordinator = make_coordinator(cache_dir)
    for source in ["missing.pdb", "missing.json"]:
        with pytest.raises(PipelineError) as error:
            coordinator.load_graph(source)
        assert error.value.stage == STAGE_INGEST
        assert error.value.exit_code == EXIT_PIPELINE


def test_solve(cache_dir):
    """solve keeps the best sample with tau selected residues"""
    coordinator = make_coordinator(cache_dir, **{CONF_TAU: 5})
    graph = load_graph(OXYTOCIN_GRAPH_FILE.read_text(encoding="utf-8"))
    result = coordinator.solve(graph)

    assert result.qubo.formulation == QUBO_EIGENVECTOR_SIMPLE
    assert result.best.popcount == 5
    assert result.samples.num_reads == 200


async def test_corpus_run(cache_dir):
    """Every manifest entry gives a row in manifest order, failures become error rows"""
    (cache_dir / "9PEP.pdb").write_text(straight_peptide_pdb("9PEP", 6), encoding="utf-8")
    (cache_dir / "9LNG.pdb").write_text(straight_peptide_pdb("9LNG", 8), encoding="utf-8")
    entries = parse_corpus_manifest("9PEP tau=2\n# not published yet\n9BAD\n9lng tau=3 seed=5\n")
    assert [entry[CONF_SOURCE] for entry in entries] == ["9PEP", "9BAD", "9LNG"]

    coordinator = make_coordinator(cache_dir)
    with patch("rinq.pdb_ingest.requests.get", return_value=MagicMock(status_code=404, text="")) as mock_get:
        rows = await coordinator.async_run_corpus(entries, max_concurrency=2)
    mock_get.assert_called_once()

    assert [row["pdb_id"] for row in rows] == ["9PEP", "9BAD", "9LNG"]
    assert rows[0]["status"] == "ok"
    assert (rows[0]["n"], rows[0]["edges"], rows[0]["tau"]) == (6, 9, 2)
    assert len(rows[0]["qubo_top"].split()) == 2
    assert rows[1]["status"].startswith("error: [fetch]")
    assert "HTTP 404" in rows[1]["status"]
    assert (rows[2]["n"], rows[2]["tau"]) == (8, 3)


async def test_corpus_run_is_deterministic(cache_dir):
    """Concurrency does not change the rows"""
    (cache_dir / "9PEP.pdb").write_text(straight_peptide_pdb("9PEP", 7), encoding="utf-8")
    entries = parse_corpus_manifest("9PEP tau=2\n9PEP tau=3\n9PEP tau=2 measure=estrada\n")
    coordinator = make_coordinator(cache_dir)

    sequential = await coordinator.async_run_corpus(entries, max_concurrency=1)
    concurrent = await coordinator.async_run_corpus(entries, max_concurrency=3)
    assert sequential == concurrent
    assert sequential[2]["measure"] == MEASURE_ESTRADA

""" The tests of the rinq command line """
# pylint: disable=unused-argument, wildcard-import, unused-wildcard-import

import csv
import io

import networkx as nx

from rinq.cli import run

from .commons import *

GRAPH = str(OXYTOCIN_GRAPH_FILE)
FAST_ARGS = ["--reads", "1000", "--sweeps", "200"]


def run_cli(*argv: str) -> tuple[int, str, str]:
    """Run the command line, returning the exit code, stdout and stderr"""
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def test_compare_json():
    """compare prints the canonical JSON report and exits 0"""
    code, out, err = run_cli("compare", GRAPH, *FAST_ARGS)

    assert code == EXIT_OK, err
    report = json.loads(out)
    assert report["pdb_id"] == "1XY1"
    assert report["jaccard"] == 1.0
    assert report["qubo_energy"] == pytest.approx(OXYTOCIN_EIGENVECTOR_ENERGY, abs=1e-6)
    assert [item["index"] for item in report["qubo_top"]] == [5, 4, 0, 1, 2]


def test_compare_is_deterministic():
    """Two runs with the same arguments print the same bytes, whatever the number of jobs"""
    first = run_cli("compare", GRAPH, "--seed", "5", "--reads", "300", "--sweeps", "50")
    again = run_cli("compare", GRAPH, "--seed", "5", "--reads", "300", "--sweeps", "50", "--jobs", "2")
    assert first[0] == again[0] == EXIT_OK
    assert first[1] == again[1]


def test_compare_text_and_csv():
    """Text and CSV renderings of compare"""
    code, out, _ = run_cli("compare", GRAPH, "--format", "text", *FAST_ARGS)
    assert code == EXIT_OK
    assert "Jaccard index: 1.000" in out

    code, out, _ = run_cli("compare", GRAPH, "--format", "csv", "--tau-sweep", *FAST_ARGS)
    assert code == EXIT_OK
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["qubo_top"] == "5 4 0 1 2"


def test_compare_estrada():
    """The Estrada measure with tau = 1 selects residue 6"""
    code, out, _ = run_cli("compare", GRAPH, "--measure", "estrada", "--tau", "1", *FAST_ARGS)
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["p1"] == 450.0
    assert [item["label"] for item in report["qubo_top"]] == ["A:6:CYS"]


def test_usage_errors():
    """Bad command lines exit 1 with a message on stderr"""
    for argv in [
        [],
        ["bogus"],
        ["compare"],
        ["compare", GRAPH, "--tau", "0"],
        ["compare", GRAPH, "--tau", "10"],
        ["compare", GRAPH, "--measure", "pagerank"],
        ["compare", GRAPH, "--beta-min", "5"],
    ]:
        code, out, err = run_cli(*argv)
        assert code == EXIT_USAGE, argv
        assert err.startswith("rinq: ["), argv
        assert out == ""


def test_pipeline_errors(tmp_path):
    """Missing inputs and unreadable files exit 2"""
    code, _, err = run_cli("graph", "missing.pdb")
    assert code == EXIT_PIPELINE
    assert err.startswith("rinq: [ingest]")

    broken = tmp_path / "broken.pdb"
    broken.write_text("REMARK nothing here\n", encoding="utf-8")
    code, _, err = run_cli("centrality", str(broken))
    assert code == EXIT_PIPELINE
    assert "[ingest]" in err


def test_no_valid_sample_exit_code():
    """The report is still written when no sample is valid, and the exit code is 3"""
    with patch("rinq.coordinator.filter_valid", return_value=None):
        code, out, err = run_cli("compare", GRAPH, "--reads", "20", "--sweeps", "10")

    assert code == EXIT_NO_VALID_SAMPLE
    assert json.loads(out)["qubo_top"] is None
    assert "[anneal]" in err


def test_graph_command():
    """graph emits JSON by default and GraphML or DOT on request"""
    code, out, _ = run_cli("graph", GRAPH, "--measure", "eigenvector", "--normalize")
    assert code == EXIT_OK
    document = json.loads(out)
    assert len(document["edges"]) == 23
    assert max(node["score"] for node in document["nodes"]) == 1.0
    assert document["nodes"][5]["score"] == 1.0

    code, out, _ = run_cli("graph", GRAPH, "--format", "graphml")
    assert code == EXIT_OK
    assert nx.parse_graphml(out).number_of_edges() == 23

    code, out, _ = run_cli("graph", GRAPH, "--format", "dot")
    assert code == EXIT_OK
    assert "--" in out


def test_graph_from_pdb_file(tmp_path):
    """A structure file with a chain filter and a cutoff"""
    path = tmp_path / "peptide.pdb"
    path.write_text(straight_peptide_pdb("9PEP", 6), encoding="utf-8")

    code, out, _ = run_cli("graph", str(path), "--chain", "A", "--cutoff", "4.0")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["pdb_id"] == "9PEP"
    assert len(document["edges"]) == 5


def test_centrality_command():
    """centrality emits CSV by default and JSON on request"""
    code, out, _ = run_cli("centrality", GRAPH)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 9
    assert float(rows[5]["score"]) == pytest.approx(OXYTOCIN_EIGENVECTOR[6], abs=2e-4)

    code, out, _ = run_cli("centrality", GRAPH, "--measure", "estrada", "--format", "json")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["scores"][5]["score"] == pytest.approx(OXYTOCIN_ESTRADA[6], abs=1e-3)


def test_solve_command(tmp_path):
    """solve prints the best valid sample and can save the QUBO"""
    qubo_path = tmp_path / "qubo.json"
    output = tmp_path / "solve.txt"
    code, out, _ = run_cli("solve", GRAPH, "--emit-qubo", str(qubo_path), "--format", "text", "-o", str(output), *FAST_ARGS)

    assert code == EXIT_OK
    assert out == ""
    text = output.read_text(encoding="utf-8")
    assert "Best valid sample: 111011000" in text
    assert "A:6:CYS" in text

    qubo = json.loads(qubo_path.read_text(encoding="utf-8"))
    assert qubo["n"] == 9
    assert qubo["tau"] == 5
    assert qubo["formulation"] == QUBO_EIGENVECTOR_SIMPLE

    code, out, _ = run_cli("solve", GRAPH, "--formulation", "cubic", *FAST_ARGS)
    assert code == EXIT_OK
    assert json.loads(out)["energy"] == pytest.approx(OXYTOCIN_CUBIC_ENERGY, abs=1e-6)


def test_solve_cubic_needs_a_stronger_constraint():
    """At p1 = 10n the cubic minimum has six residues: no read ends with five"""
    code, out, err = run_cli("solve", GRAPH, "--formulation", "cubic", "--p1", "90", *FAST_ARGS)
    assert code == EXIT_NO_VALID_SAMPLE
    assert json.loads(out)["bits"] is None
    assert "[anneal]" in err


def test_config_file(tmp_path):
    """Values from --config apply and command line flags override them"""
    config = tmp_path / "run.yaml"
    config.write_text("measure: estrada\ntau: 1\nschedule:\n  reads: 1000\n  sweeps: 200\n", encoding="utf-8")

    code, out, _ = run_cli("compare", GRAPH, "--config", str(config))
    assert code == EXIT_OK
    assert json.loads(out)["measure"] == MEASURE_ESTRADA

    code, out, _ = run_cli("compare", GRAPH, "--config", str(config), "--measure", "eigenvector", "--tau", "5")
    assert code == EXIT_OK
    assert json.loads(out)["jaccard"] == 1.0


def test_fetch_command(cache_dir):
    """fetch stores the structure in the cache and prints its path"""
    response = MagicMock(status_code=200, text=straight_peptide_pdb("9PEP", 3))
    with patch("rinq.pdb_ingest.requests.get", return_value=response):
        code, out, _ = run_cli("fetch", "9pep", "--cache-dir", str(cache_dir))

    assert code == EXIT_OK
    assert out.strip() == str(cache_dir / "9PEP.pdb")
    assert (cache_dir / "9PEP.pdb").is_file()

    code, _, err = run_cli("fetch", "peptide", "--cache-dir", str(cache_dir))
    assert code == EXIT_USAGE
    assert err.startswith("rinq: [fetch]")


def test_corpus_command(tmp_path, cache_dir):
    """corpus writes one CSV row per manifest line and exits 2 when one of them failed"""
    (cache_dir / "9PEP.pdb").write_text(straight_peptide_pdb("9PEP", 6), encoding="utf-8")
    manifest = tmp_path / "corpus.txt"
    manifest.write_text("9PEP tau=2\n9PEP tau=3\n", encoding="utf-8")

    code, out, _ = run_cli("corpus", str(manifest), "--cache-dir", str(cache_dir), "--reads", "200", "--sweeps", "100")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [row["tau"] for row in rows] == ["2", "3"]
    assert {row["status"] for row in rows} == {"ok"}

    manifest.write_text("9PEP tau=2\n9BAD\n", encoding="utf-8")
    with patch("rinq.pdb_ingest.requests.get", return_value=MagicMock(status_code=404, text="")):
        code, out, _ = run_cli("corpus", str(manifest), "--cache-dir", str(cache_dir), "--reads", "200", "--sweeps", "100")
    assert code == EXIT_PIPELINE
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[1]["pdb_id"] == "9BAD"
    assert rows[1]["status"].startswith("error: [fetch]")

    code, _, _ = run_cli("corpus", str(tmp_path / "missing.txt"))
    assert code == EXIT_PIPELINE


def test_penalties_command():
    """penalties writes one row per (p0 scale, p1 scale) pair"""
    code, out, _ = run_cli("penalties", GRAPH, "--p1-scale", "10", "--p1-scale", "20", *FAST_ARGS)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(row["p0_scale"], row["p1_scale"]) for row in rows] == [("1", "10"), ("1", "20")]
    assert [row["p1"] for row in rows] == ["90", "180"]


def test_version():
    """--version exits 0"""
    assert run_cli("--version")[0] == EXIT_OK

""" The rinq command line """

import argparse
import asyncio
import itertools
import sys
from pathlib import Path

from . import __version__
from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .config_schema import load_config_file, merge_config, parse_corpus_manifest
from .coordinator import RinqCoordinator, pipeline_stage
from .pdb_ingest import fetch_pdb, resolve_cache_dir
from .rin import adjacency, export_graph
from .centrality import scores_to_csv, scores_to_json
from .qubo import qubo_to_json
from .analysis import canonical_json, penalty_rows_to_csv, penalty_sweep, render_report, rows_to_csv

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# argparse destination -> configuration key
_ARGUMENT_KEYS = {
    "source": CONF_SOURCE,
    "chain": CONF_CHAIN,
    "model": CONF_MODEL,
    "cutoff": CONF_CUTOFF,
    "measure": CONF_MEASURE,
    "formulation": CONF_FORMULATION,
    "term_reading": CONF_TERM_READING,
    "tau": CONF_TAU,
    "p0": CONF_P0,
    "p1": CONF_P1,
    "format": CONF_FORMAT,
    "output": CONF_OUTPUT,
    "cache_dir": CONF_CACHE_DIR,
    "mirror": CONF_MIRROR,
    "tau_sweep": CONF_TAU_SWEEP,
    "normalize": CONF_NORMALIZE,
    "max_concurrency": CONF_MAX_CONCURRENCY,
}
_SCHEDULE_KEYS = {
    "beta_min": CONF_BETA_MIN,
    "beta_max": CONF_BETA_MAX,
    "sweeps": CONF_SWEEPS,
    "reads": CONF_READS,
    "interpolation": CONF_INTERPOLATION,
    "seed": CONF_SEED,
    "jobs": CONF_JOBS,
}


class _ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser raising UsageError instead of exiting"""

    def error(self, message):
        raise UsageError(message, stage=STAGE_CLI)


def _add_output_arguments(parser: argparse.ArgumentParser, formats: list[str]):
    parser.add_argument("--format", choices=formats, default=None, help=f"output format (default {formats[0]})")
    parser.add_argument("-o", "--output", default=None, help="write the result to this file instead of stdout")


def _add_structure_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("source", help="PDB identifier, .pdb file or graph .json file")
    parser.add_argument("--chain", default=None, help="keep only this chain (default: all chains)")
    parser.add_argument("--model", type=int, default=None, help=f"model number (default {DEFAULT_MODEL})")
    parser.add_argument("--cutoff", type=float, default=None, help=f"contact distance in Angstrom (default {DEFAULT_CUTOFF_A})")


def _add_qubo_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--measure", choices=MEASURES, default=None, help=f"centrality measure (default {MEASURE_EIGENVECTOR})")
    parser.add_argument("--formulation", choices=FORMULATIONS, default=None, help="eigenvector QUBO form (default simple)")
    parser.add_argument("--term-reading", dest="term_reading", choices=TERM_READINGS, default=None, help="reading of the simple eigenvector centrality term")
    parser.add_argument("--tau", type=int, default=None, help=f"number of residues to select (default {DEFAULT_TAU})")
    parser.add_argument("--p0", type=float, default=None, help="centrality weight (default 1/sqrt(n))")
    parser.add_argument("--p1", type=float, default=None, help="constraint weight (default 10n, 20n for the cubic form, 50n for estrada)")
    parser.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED})")
    parser.add_argument("--reads", type=int, default=None, help=f"number of reads (default {DEFAULT_READS})")
    parser.add_argument("--sweeps", type=int, default=None, help=f"sweeps per read (default {DEFAULT_SWEEPS})")
    parser.add_argument("--beta-min", dest="beta_min", type=float, default=None, help=f"first inverse temperature (default {DEFAULT_BETA_MIN})")
    parser.add_argument("--beta-max", dest="beta_max", type=float, default=None, help=f"last inverse temperature (default {DEFAULT_BETA_MAX})")
    parser.add_argument("--interpolation", choices=INTERPOLATIONS, default=None, help=f"beta schedule shape (default {DEFAULT_INTERPOLATION})")
    parser.add_argument("--jobs", type=int, default=None, help="parallel jobs for the reads (result does not depend on it)")


def build_parser() -> argparse.ArgumentParser:
    """The rinq argument parser"""
    common = _ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs on stderr")
    common.add_argument("--config", default=None, help="YAML run configuration")
    common.add_argument("--cache-dir", dest="cache_dir", default=None, help=f"structure cache (default ${ENV_CACHE_DIR} or {DEFAULT_CACHE_DIR})")
    common.add_argument("--mirror", default=None, help=f"structure download base URL (default ${ENV_PDB_MIRROR} or {DEFAULT_PDB_MIRROR})")

    parser = _ArgumentParser(prog="rinq", description="Top-tau central residues of protein contact networks by QUBO and simulated annealing")
    parser.add_argument("--version", action="version", version=f"rinq {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    fetch = commands.add_parser(COMMAND_FETCH, parents=[common], help="download a structure into the cache")
    fetch.add_argument("source", help="PDB identifier")

    graph = commands.add_parser(COMMAND_GRAPH, parents=[common], help="emit the residue interaction network")
    _add_structure_arguments(graph)
    graph.add_argument("--measure", choices=MEASURES, default=None, help="attach this centrality as node score")
    graph.add_argument("--normalize", action="store_true", default=None, help="max-normalize the scores to [0, 1]")
    _add_output_arguments(graph, [FORMAT_JSON, FORMAT_DOT, FORMAT_GRAPHML])

    centrality = commands.add_parser(COMMAND_CENTRALITY, parents=[common], help="emit classical centrality scores")
    _add_structure_arguments(centrality)
    centrality.add_argument("--measure", choices=MEASURES, default=None, help=f"centrality measure (default {MEASURE_EIGENVECTOR})")
    _add_output_arguments(centrality, SCORE_FORMATS)

    solve = commands.add_parser(COMMAND_SOLVE, parents=[common], help="anneal the QUBO and emit the best valid sample")
    _add_structure_arguments(solve)
    _add_qubo_arguments(solve)
    solve.add_argument("--emit-qubo", dest="emit_qubo", default=None, help="also write the QUBO as JSON to this file")
    _add_output_arguments(solve, [FORMAT_JSON, FORMAT_TEXT])

    compare = commands.add_parser(COMMAND_COMPARE, parents=[common], help="compare QUBO and classical top-tau residues")
    _add_structure_arguments(compare)
    _add_qubo_arguments(compare)
    compare.add_argument("--tau-sweep", dest="tau_sweep", action="store_true", default=None, help="also rebuild the ranking by sweeping tau from 1")
    _add_output_arguments(compare, REPORT_FORMATS)

    corpus = commands.add_parser(COMMAND_CORPUS, parents=[common], help="compare every protein of a manifest")
    corpus.add_argument("manifest", help="text file: one 'PDBID [key=value ...]' per line")
    _add_qubo_arguments(corpus)
    corpus.add_argument("--cutoff", type=float, default=None, help=f"contact distance in Angstrom (default {DEFAULT_CUTOFF_A})")
    corpus.add_argument("--max-concurrency", dest="max_concurrency", type=int, default=None, help=f"proteins run at once (default {DEFAULT_MAX_CONCURRENCY})")
    _add_output_arguments(corpus, [FORMAT_CSV])

    penalties = commands.add_parser(COMMAND_PENALTIES, parents=[common], help="anneal over a grid of penalty weights")
    _add_structure_arguments(penalties)
    _add_qubo_arguments(penalties)
    penalties.add_argument("--p0-scale", dest="p0_scales", type=float, action="append", default=None, help="p0 = scale / sqrt(n), repeatable (default 1)")
    penalties.add_argument("--p1-scale", dest="p1_scales", type=float, action="append", default=None, help="p1 = scale * n, repeatable (default 10)")
    _add_output_arguments(penalties, [FORMAT_CSV])

    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT)
    logging.getLogger(DOMAIN).setLevel(level)


def _config_from_args(args: argparse.Namespace) -> dict:
    file_config = load_config_file(args.config) if args.config else {}
    values = vars(args)
    overrides = {key: values[dest] for dest, key in _ARGUMENT_KEYS.items() if values.get(dest) is not None}
    overrides[CONF_SCHEDULE] = {key: values[dest] for dest, key in _SCHEDULE_KEYS.items() if values.get(dest) is not None}
    overrides[CONF_COMMAND] = args.command
    return merge_config(file_config, overrides)


def _write(content: str, output: str | None, stdout):
    if output is None:
        stdout.write(content)
        return
    try:
        Path(output).write_text(content, encoding="utf-8")
    except OSError as err:
        raise PipelineError(STAGE_CLI, err) from err


def _solve_document(result, labels) -> dict:
    best = result.best
    qubo, samples = result.qubo, result.samples
    return {
        "pdb_id": result.graph.pdb_id,
        "n": qubo.n,
        "formulation": qubo.formulation,
        "term_reading": qubo.term_reading,
        "tau": qubo.tau,
        "p0": qubo.p0,
        "p1": qubo.p1,
        "qubo_digest": samples.qubo_digest,
        "schedule": samples.schedule.as_dict(),
        "bits": best.bitstring if best else None,
        "energy": best.energy if best else None,
        "selected": [{"index": i, "label": labels[i]} for i in best.selected] if best else None,
        "valid_fraction": samples.valid_fraction(qubo.tau),
        "num_distinct_samples": len(samples),
        "lowest": [{"bits": s.bitstring, "energy": s.energy, "occurrences": s.occurrences} for s in samples.lowest(5)],
    }


def _solve_text(document: dict) -> str:
    lines = [f"Protein {document['pdb_id']}: QUBO {document['formulation']} n={document['n']} tau={document['tau']} p0={document['p0']:.6g} p1={document['p1']:.6g}"]
    if document["bits"] is None:
        lines.append("No valid sample")
    else:
        lines.append(f"Best valid sample: {document['bits']}")
        lines.append(f"Energy: {document['energy']:.10g}")
        lines.append("Top nodes: " + ", ".join(item["label"] for item in document["selected"]))
    lines.append(f"Valid fraction: {document['valid_fraction']:.4f} ({document['num_distinct_samples']} distinct samples)")
    return "\n".join(lines) + "\n"


def _run_command(args: argparse.Namespace, stdout) -> int:
    config = _config_from_args(args)
    coordinator = RinqCoordinator(config)
    fmt = config[CONF_FORMAT]
    output = config[CONF_OUTPUT]

    if args.command == COMMAND_FETCH:
        with pipeline_stage(STAGE_FETCH):
            fetch_pdb(config[CONF_SOURCE], config[CONF_CACHE_DIR], config[CONF_MIRROR])
        _write(f"{resolve_cache_dir(config[CONF_CACHE_DIR]) / (config[CONF_SOURCE].upper() + '.pdb')}\n", output, stdout)
        return EXIT_OK

    if args.command == COMMAND_GRAPH:
        graph = coordinator.load_graph(config[CONF_SOURCE])
        scores = coordinator.centrality(graph, args.measure) if args.measure else None
        with pipeline_stage(STAGE_GRAPH):
            _write(export_graph(graph, scores, fmt or FORMAT_JSON, normalize=config[CONF_NORMALIZE]), output, stdout)
        return EXIT_OK

    if args.command == COMMAND_CENTRALITY:
        graph = coordinator.load_graph(config[CONF_SOURCE])
        scores = coordinator.centrality(graph)
        content = scores_to_json(scores, graph) if fmt == FORMAT_JSON else scores_to_csv(scores, graph)
        _write(content, output, stdout)
        return EXIT_OK

    if args.command == COMMAND_SOLVE:
        graph = coordinator.load_graph(config[CONF_SOURCE])
        result = coordinator.solve(graph)
        if args.emit_qubo:
            _write(qubo_to_json(result.qubo), args.emit_qubo, stdout)
        document = _solve_document(result, graph.labels)
        _write(_solve_text(document) if fmt == FORMAT_TEXT else canonical_json(document), output, stdout)
        if result.best is None:
            raise NoValidSampleError(f"no sample with exactly {config[CONF_TAU]} selected residues")
        return EXIT_OK

    if args.command == COMMAND_COMPARE:
        report = coordinator.compare(config[CONF_SOURCE])
        _write(render_report(report, fmt or FORMAT_JSON), output, stdout)
        if not report.has_valid_sample:
            raise NoValidSampleError(f"no sample with exactly {report.tau} selected residues")
        return EXIT_OK

    if args.command == COMMAND_CORPUS:
        try:
            manifest = Path(args.manifest).read_text(encoding="utf-8")
        except OSError as err:
            raise PipelineError(STAGE_INGEST, err) from err
        rows = asyncio.run(coordinator.async_run_corpus(parse_corpus_manifest(manifest)))
        _write(rows_to_csv(rows), output, stdout)
        return EXIT_PIPELINE if any(row["status"].startswith("error") for row in rows) else EXIT_OK

    if args.command == COMMAND_PENALTIES:
        graph = coordinator.load_graph(config[CONF_SOURCE])
        scales = list(itertools.product(args.p0_scales or [DEFAULT_P0_SCALE], args.p1_scales or [DEFAULT_P1_SCALE]))
        with pipeline_stage(STAGE_ANALYSIS):
            rows = penalty_sweep(adjacency(graph), coordinator.kind, config[CONF_TAU], coordinator.schedule, scales, term_reading=config[CONF_TERM_READING])
        _write(penalty_rows_to_csv(rows), output, stdout)
        return EXIT_OK

    raise UsageError(f"unknown command '{args.command}'", stage=STAGE_CLI)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Run the command line and return the exit code"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    verbosity = 0
    try:
        args = build_parser().parse_args(argv)
        verbosity = args.verbose
        _configure_logging(verbosity)
        return _run_command(args, stdout)
    except SystemExit as err:
        # --help and --version
        return err.code if isinstance(err.code, int) else EXIT_USAGE
    except RinqError as err:
        if verbosity >= 2:
            _LOGGER.exception("rinq failed")
        stderr.write(f"rinq: [{err.stage}] {err}\n")
        return err.exit_code


def main():
    """The console script entry point"""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

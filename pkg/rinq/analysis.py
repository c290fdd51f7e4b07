""" Agreement between QUBO selections and classical rankings: Jaccard index, tau sweeps, penalty sweeps and reports """

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .centrality import CentralityScores, compute_centrality, top_tau
from .qubo import build_qubo
from .simulated_annealing_algo import AnnealSchedule, SimulatedAnnealingAlgorithm, filter_valid

_LOGGER = logging.getLogger(__name__)

FLOAT_DIGITS = 10


def jaccard(set_a: Iterable, set_b: Iterable) -> float:
    """|A & B| / |A | B|"""
    set_a, set_b = set(set_a), set(set_b)
    union = set_a | set_b
    if not union:
        raise DegenerateInputError("the Jaccard index of two empty sets is undefined", stage=STAGE_ANALYSIS)
    return len(set_a & set_b) / len(union)


@dataclass(frozen=True)
class TauSweepResult:
    """The ranking rebuilt from the successive best valid sets"""

    ranking: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...]
    energies: tuple[float, ...]
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        """The JSON view, with residue labels when given"""
        return {
            "ranking": [_node(i, labels) for i in self.ranking],
            "levels": [{"tau": tau, "selected": list(level), "energy": energy} for tau, (level, energy) in enumerate(zip(self.levels, self.energies), start=1)],
            "warnings": list(self.warnings),
        }


def _classical_measure(kind: str) -> str:
    return MEASURE_ESTRADA if kind == QUBO_ESTRADA else MEASURE_EIGENVECTOR


def tau_sweep_ranking(
    adjacency_matrix,
    formulation: str,
    tau_max: int,
    schedule: AnnealSchedule,
    p0: float | None = None,
    p1: float | None = None,
    term_reading: str = DEFAULT_TERM_READING,
    classical: CentralityScores | None = None,
) -> TauSweepResult:
    """Solve tau = 1..tau_max and rank the node entering the best valid set at each level.

    When a level does not extend the previous set by exactly one node the sweep is
    flagged as non nested, and the node entering at that level is the unranked member
    of the new set with the best classical score.
    """
    matrix = np.asarray(adjacency_matrix, dtype=float)
    n = matrix.shape[0]
    if not 1 <= tau_max <= n:
        raise UsageError(f"tau_max must be between 1 and {n}, got {tau_max}", stage=STAGE_ANALYSIS)
    if classical is None:
        classical = compute_centrality(matrix, _classical_measure(formulation))

    algorithm = SimulatedAnnealingAlgorithm(schedule)
    ranking: list[int] = []
    levels, energies, warnings = [], [], []
    previous: set[int] = set()
    for tau in range(1, tau_max + 1):
        qubo = build_qubo(matrix, formulation, tau, p0=p0, p1=p1, term_reading=term_reading)
        best = filter_valid(algorithm.anneal(qubo), tau)
        if best is None:
            raise SweepError(f"no valid sample at tau={tau}", level=tau)

        current = set(best.selected)
        entering = current - previous
        if len(entering) != 1:
            message = f"non-nested sweep at tau={tau}"
            _LOGGER.warning("%s: %s after %s", message, sorted(current), sorted(previous))
            warnings.append(message)
        candidates = sorted(current - set(ranking), key=lambda i: (-classical.values[i], i))
        ranking.append(candidates[0])
        levels.append(tuple(sorted(current)))
        energies.append(best.energy)
        previous = current

    return TauSweepResult(ranking=tuple(ranking), levels=tuple(levels), energies=tuple(energies), warnings=tuple(warnings))


@dataclass(frozen=True)
class PenaltySweepRow:
    """The outcome of one (p0, p1) pair"""

    p0_scale: float
    p1_scale: float
    p0: float
    p1: float
    valid_fraction: float
    selected: tuple[int, ...] | None
    energy: float | None
    jaccard: float | None


def penalty_sweep(
    adjacency_matrix,
    formulation: str,
    tau: int,
    schedule: AnnealSchedule,
    scales: Sequence[tuple[float, float]],
    term_reading: str = DEFAULT_TERM_READING,
    classical: CentralityScores | None = None,
) -> list[PenaltySweepRow]:
    """Anneal the QUBO for each (p0 scale, p1 scale): p0 = p0_scale / sqrt(n), p1 = p1_scale * n"""
    matrix = np.asarray(adjacency_matrix, dtype=float)
    n = matrix.shape[0]
    if classical is None:
        classical = compute_centrality(matrix, _classical_measure(formulation))
    reference = top_tau(classical, tau)

    algorithm = SimulatedAnnealingAlgorithm(schedule)
    rows = []
    for p0_scale, p1_scale in scales:
        p0, p1 = p0_scale / math.sqrt(n), p1_scale * n
        samples = algorithm.anneal(build_qubo(matrix, formulation, tau, p0=p0, p1=p1, term_reading=term_reading))
        best = filter_valid(samples, tau)
        rows.append(
            PenaltySweepRow(
                p0_scale=p0_scale,
                p1_scale=p1_scale,
                p0=p0,
                p1=p1,
                valid_fraction=samples.valid_fraction(tau),
                selected=tuple(best.selected) if best else None,
                energy=best.energy if best else None,
                jaccard=jaccard(reference, best.selected) if best else None,
            )
        )
        _LOGGER.info("Penalty sweep p0=%.6f p1=%.2f: valid fraction %.4f", p0, p1, rows[-1].valid_fraction)
    return rows


@dataclass(frozen=True)
class RankedResidue:
    """A node with its residue label and classical score"""

    index: int
    label: str
    score: float


@dataclass(frozen=True)
class AnalysisReport:
    """Classical versus QUBO selection for one protein"""

    pdb_id: str
    n: int
    edge_count: int
    cutoff: float
    measure: str
    formulation: str
    term_reading: str | None
    tau: int
    p0: float
    p1: float
    classical_top: tuple[RankedResidue, ...]
    qubo_top: tuple[RankedResidue, ...] | None
    qubo_energy: float | None
    jaccard: float | None
    schedule: AnnealSchedule
    qubo_digest: str
    valid_fraction: float
    num_distinct_samples: int
    warnings: tuple[str, ...] = field(default_factory=tuple)
    labels: tuple[str, ...] = field(default_factory=tuple)
    sweep: TauSweepResult | None = None

    @property
    def has_valid_sample(self) -> bool:
        """False when no read satisfied the cardinality constraint"""
        return self.qubo_top is not None

    def to_dict(self) -> dict:
        """The JSON view of the report"""
        document = {
            "pdb_id": self.pdb_id,
            "n": self.n,
            "edge_count": self.edge_count,
            "cutoff": self.cutoff,
            "measure": self.measure,
            "formulation": self.formulation,
            "term_reading": self.term_reading,
            "tau": self.tau,
            "p0": self.p0,
            "p1": self.p1,
            "classical_top": [_ranked(r) for r in self.classical_top],
            "qubo_top": [_ranked(r) for r in self.qubo_top] if self.qubo_top is not None else None,
            "qubo_energy": self.qubo_energy,
            "jaccard": self.jaccard,
            "schedule": self.schedule.as_dict(),
            "qubo_digest": self.qubo_digest,
            "valid_fraction": self.valid_fraction,
            "num_distinct_samples": self.num_distinct_samples,
            "warnings": list(self.warnings),
        }
        if self.sweep is not None:
            document["tau_sweep"] = self.sweep.to_dict(self.labels)
        return document


def build_report(
    graph,
    measure: str,
    kind: str,
    tau: int,
    classical: CentralityScores,
    qubo,
    samples,
    best,
    term_reading: str | None,
    sweep: TauSweepResult | None = None,
) -> AnalysisReport:
    """Assemble a report from the outputs of every pipeline stage"""
    labels = tuple(graph.labels)
    classical_indexes = top_tau(classical, tau)
    classical_top = tuple(RankedResidue(i, labels[i], classical.values[i]) for i in classical_indexes)
    qubo_top = None
    if best is not None:
        qubo_top = tuple(RankedResidue(i, labels[i], classical.values[i]) for i in sorted(best.selected, key=lambda i: (-classical.values[i], i)))

    warnings = list(graph.warnings) + list(classical.warnings)
    if best is None:
        warnings.append(f"no valid sample with {tau} selected residues")
    if sweep is not None:
        warnings.extend(sweep.warnings)

    return AnalysisReport(
        pdb_id=graph.pdb_id,
        n=graph.n,
        edge_count=graph.edge_count,
        cutoff=graph.cutoff,
        measure=measure,
        formulation=kind,
        term_reading=term_reading if kind == QUBO_EIGENVECTOR_SIMPLE else None,
        tau=tau,
        p0=qubo.p0,
        p1=qubo.p1,
        classical_top=classical_top,
        qubo_top=qubo_top,
        qubo_energy=best.energy if best is not None else None,
        jaccard=jaccard(classical_indexes, best.selected) if best is not None else None,
        schedule=samples.schedule,
        qubo_digest=samples.qubo_digest,
        valid_fraction=samples.valid_fraction(tau),
        num_distinct_samples=len(samples),
        warnings=tuple(dict.fromkeys(warnings)),
        labels=labels,
        sweep=sweep,
    )


def _node(index: int, labels: Sequence[str] | None) -> dict:
    return {"index": index, "label": labels[index]} if labels else {"index": index}


def _ranked(residue: RankedResidue) -> dict:
    return {"index": residue.index, "label": residue.label, "score": residue.score}


def _round_floats(value):
    """Round floats to FLOAT_DIGITS significant digits for canonical output"""
    if isinstance(value, float):
        return float(f"{value:.{FLOAT_DIGITS}g}") if math.isfinite(value) else value
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def canonical_json(document: dict) -> str:
    """Key sorted, 2 space indented JSON with rounded floats"""
    return json.dumps(_round_floats(document), indent=2, sort_keys=True) + "\n"


def _residue_list(residues) -> str:
    return " ".join(str(r.index) for r in residues) if residues is not None else ""


def _format_optional(value, pattern: str) -> str:
    return pattern.format(value) if value is not None else ""


def report_row(report: AnalysisReport, status: str = "ok") -> dict:
    """The corpus CSV row of a report"""
    return {
        "pdb_id": report.pdb_id,
        "n": report.n,
        "edges": report.edge_count,
        "measure": report.measure,
        "tau": report.tau,
        "classical_top": _residue_list(report.classical_top),
        "qubo_top": _residue_list(report.qubo_top),
        "jaccard": _format_optional(report.jaccard, "{:.3f}"),
        "energy": _format_optional(report.qubo_energy, "{:.10g}"),
        "valid_fraction": f"{report.valid_fraction:.4f}",
        "status": status if report.has_valid_sample else "no-valid-sample",
    }


def rows_to_csv(rows: Iterable[dict], header: Sequence[str] = CORPUS_CSV_HEADER) -> str:
    """CSV text of rows, header first"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(header), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def _render_text(report: AnalysisReport) -> str:
    lines = [
        f"Protein {report.pdb_id}: {report.n} residues, {report.edge_count} contacts (cutoff {report.cutoff:g} A)",
        f"Measure {report.measure}, QUBO {report.formulation}, tau={report.tau}, p0={report.p0:.6g}, p1={report.p1:.6g}",
        f"Schedule: {', '.join(f'{k}={v}' for k, v in report.schedule.as_dict().items())}",
        "",
        f"{'rank':>4}  {'classical':<14} {'score':>10}   {'qubo':<14}",
    ]
    qubo_top = report.qubo_top or ()
    for rank in range(max(len(report.classical_top), len(qubo_top))):
        classical = report.classical_top[rank] if rank < len(report.classical_top) else None
        selected = qubo_top[rank] if rank < len(qubo_top) else None
        lines.append(
            f"{rank + 1:>4}  {classical.label if classical else '':<14} {f'{classical.score:.4f}' if classical else '':>10}   {selected.label if selected else '':<14}"
        )
    lines.append("")
    if report.has_valid_sample:
        lines.append(f"Energy: {report.qubo_energy:.10g}")
        lines.append(f"Jaccard index: {report.jaccard:.3f}")
    else:
        lines.append("No valid sample")
    lines.append(f"Valid fraction: {report.valid_fraction:.4f} over {report.schedule.reads} reads ({report.num_distinct_samples} distinct samples)")
    if report.sweep is not None:
        lines.append("Tau sweep ranking: " + " > ".join(report.labels[i] for i in report.sweep.ranking))
    for warning in report.warnings:
        lines.append(f"Warning: {warning}")
    return "\n".join(lines) + "\n"


def render_report(report: AnalysisReport, fmt: str = FORMAT_JSON) -> str:
    """Render a report as canonical JSON, a text table or a one row CSV"""
    if fmt == FORMAT_JSON:
        return canonical_json(report.to_dict())
    if fmt == FORMAT_TEXT:
        return _render_text(report)
    if fmt == FORMAT_CSV:
        return rows_to_csv([report_row(report)])
    raise UsageError(f"unknown report format '{fmt}' (expected one of {REPORT_FORMATS})", stage=STAGE_ANALYSIS)


def penalty_rows_to_csv(rows: Sequence[PenaltySweepRow]) -> str:
    """CSV of a penalty sweep"""
    return rows_to_csv(
        (
            {
                "p0_scale": f"{row.p0_scale:g}",
                "p1_scale": f"{row.p1_scale:g}",
                "p0": f"{row.p0:.10g}",
                "p1": f"{row.p1:.10g}",
                "valid_fraction": f"{row.valid_fraction:.4f}",
                "selected": " ".join(str(i) for i in row.selected) if row.selected is not None else "",
                "energy": _format_optional(row.energy, "{:.10g}"),
                "jaccard": _format_optional(row.jaccard, "{:.3f}"),
            }
            for row in rows
        ),
        header=["p0_scale", "p1_scale", "p0", "p1", "valid_fraction", "selected", "energy", "jaccard"],
    )

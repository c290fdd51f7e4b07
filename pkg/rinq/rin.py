""" The residue interaction network: contact graph, adjacency matrix and graph serializations """

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import networkx as nx
import numpy as np
import voluptuous as vol

from .const import *  # pylint: disable=wildcard-import, unused-wildcard-import
from .pdb_ingest import ResidueRecord

_LOGGER = logging.getLogger(__name__)

WARNING_DEGENERATE_GRAPH = "degenerate graph: fewer than 2 residues"
WARNING_DISCONNECTED_GRAPH = "graph disconnected"


@dataclass(frozen=True)
class ResidueGraph:
    """Undirected contact graph. Node index i is the bit index of residue nodes[i]"""

    nodes: tuple[ResidueRecord, ...]
    edges: tuple[tuple[int, int], ...]
    cutoff: float
    pdb_id: str = UNKNOWN_PDB_ID
    has_coordinates: bool = True
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        """The number of residues"""
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        """The number of contacts"""
        return len(self.edges)

    @property
    def labels(self) -> list[str]:
        """The residue labels in index order"""
        return [node.label for node in self.nodes]

    def to_networkx(self, scores: Sequence[float] | None = None) -> nx.Graph:
        """A networkx view of the graph, nodes in index order"""
        graph = nx.Graph(name=self.pdb_id)
        for index, node in enumerate(self.nodes):
            attributes = {
                "label": node.label,
                "chain": node.chain_id,
                "res_seq": node.res_seq,
                "res_name": node.res_name,
            }
            if scores is not None:
                attributes["score"] = float(scores[index])
            graph.add_node(index, **attributes)
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        """True when every residue can reach every other one"""
        return self.n > 0 and nx.is_connected(self.to_networkx())


def build_rin(residues: Sequence[ResidueRecord], cutoff: float = DEFAULT_CUTOFF_A, pdb_id: str = UNKNOWN_PDB_ID) -> ResidueGraph:
    """Connect every pair of residues whose C-alpha distance is <= cutoff"""
    if cutoff is None or cutoff <= 0:
        raise UsageError(f"the cutoff must be > 0, got {cutoff}", stage=STAGE_GRAPH)
    if not residues:
        raise DegenerateInputError("no residue with a CA atom to build a graph from")

    warnings = []
    n = len(residues)
    if n < 2:
        _LOGGER.warning("Graph of %s has only %d residue", pdb_id, n)
        warnings.append(WARNING_DEGENERATE_GRAPH)

    coordinates = np.array([residue.ca_position for residue in residues], dtype=float)
    deltas = coordinates[:, None, :] - coordinates[None, :, :]
    squared = np.einsum("ijk,ijk->ij", deltas, deltas)
    rows, cols = np.triu_indices(n, k=1)
    contact = squared[rows, cols] <= cutoff * cutoff
    edges = tuple((int(i), int(j)) for i, j in zip(rows[contact], cols[contact]))

    _LOGGER.info("Built the residue interaction network of %s: %d nodes, %d edges (cutoff %.2f A)", pdb_id, n, len(edges), cutoff)
    return ResidueGraph(nodes=tuple(residues), edges=edges, cutoff=float(cutoff), pdb_id=pdb_id, warnings=tuple(warnings))


def adjacency(graph: ResidueGraph) -> np.ndarray:
    """The dense symmetric 0/1 adjacency matrix, zero diagonal"""
    matrix = np.zeros((graph.n, graph.n), dtype=float)
    if graph.edges:
        index = np.array(graph.edges, dtype=int)
        matrix[index[:, 0], index[:, 1]] = 1.0
        matrix[index[:, 1], index[:, 0]] = 1.0
    return matrix


def degree_unit_vector(adjacency_matrix: np.ndarray) -> np.ndarray:
    """d / ||d|| with d the degree vector"""
    degrees = np.asarray(adjacency_matrix, dtype=float).sum(axis=1)
    norm = np.linalg.norm(degrees)
    if norm == 0:
        raise DegenerateInputError("the graph has no edge: the normalized degree vector is undefined")
    return degrees / norm


def _normalized(values: Sequence[float]) -> list[float]:
    """Max normalization to [0, 1]"""
    top = max(values) if len(values) else 0.0
    return [float(v) / top if top > 0 else 0.0 for v in values]


def _score_list(graph: ResidueGraph, scores) -> list[float] | None:
    if scores is None:
        return None
    # a Mapping has a values() method, CentralityScores a values tuple
    values = scores if isinstance(scores, Mapping) else getattr(scores, "values", scores)
    if isinstance(values, Mapping):
        missing = [i for i in range(graph.n) if i not in values]
        if missing:
            raise UsageError(f"scores do not cover nodes {missing}", stage=STAGE_GRAPH)
        return [float(values[i]) for i in range(graph.n)]
    values = list(values)
    if len(values) != graph.n:
        raise UsageError(f"{len(values)} scores given for {graph.n} nodes", stage=STAGE_GRAPH)
    return [float(v) for v in values]


def graph_to_dict(graph: ResidueGraph, scores: Sequence[float] | None = None) -> dict:
    """The JSON document of a graph"""
    nodes = []
    for index, node in enumerate(graph.nodes):
        item = {
            "index": index,
            "chain": node.chain_id,
            "res_seq": node.res_seq,
            "insertion_code": node.insertion_code,
            "res_name": node.res_name,
            "label": node.label,
        }
        if graph.has_coordinates:
            item["ca"] = [round(float(c), 3) for c in node.ca_position]
        if scores is not None:
            item["score"] = scores[index]
        nodes.append(item)
    return {
        "pdb_id": graph.pdb_id,
        "cutoff": graph.cutoff,
        "nodes": nodes,
        "edges": [[i, j] for i, j in graph.edges],
    }


def export_graph(graph: ResidueGraph, scores=None, fmt: str = FORMAT_JSON, normalize: bool = False) -> str:
    """Serialize a graph to DOT, GraphML or JSON, with an optional score per node"""
    if fmt not in GRAPH_FORMATS:
        raise UsageError(f"unknown graph format '{fmt}' (expected one of {GRAPH_FORMATS})", stage=STAGE_GRAPH)

    values = _score_list(graph, scores)
    if values is not None and normalize:
        values = _normalized(values)

    if fmt == FORMAT_JSON:
        return json.dumps(graph_to_dict(graph, values), indent=2) + "\n"

    nx_graph = graph.to_networkx(values)
    if fmt == FORMAT_GRAPHML:
        return "\n".join(nx.generate_graphml(nx_graph)) + "\n"

    # networkx refuses unquoted ':' in DOT attributes, and labels are 'A:6:CYS'
    for _, attributes in nx_graph.nodes(data=True):
        for key, value in attributes.items():
            if isinstance(value, str) and ":" in value:
                attributes[key] = f'"{value}"'
    return nx.nx_pydot.to_pydot(nx_graph).to_string()


_graph_document_schema = vol.Schema(
    {
        vol.Optional("pdb_id", default=UNKNOWN_PDB_ID): str,
        vol.Required("cutoff"): vol.Coerce(float),
        vol.Required("nodes"): [
            vol.Schema(
                {
                    vol.Required("index"): int,
                    vol.Required("chain"): str,
                    vol.Required("res_seq"): int,
                    vol.Optional("insertion_code", default=""): str,
                    vol.Required("res_name"): str,
                    vol.Optional("ca"): vol.All([vol.Coerce(float)], vol.Length(min=3, max=3)),
                },
                extra=vol.ALLOW_EXTRA,
            )
        ],
        vol.Required("edges"): [vol.All([int], vol.Length(min=2, max=2))],
    },
    extra=vol.ALLOW_EXTRA,
)


def load_graph(text: str) -> ResidueGraph:
    """Load a graph written by export_graph in JSON format"""
    try:
        document = _graph_document_schema(json.loads(text))
    except (ValueError, vol.Invalid) as err:
        raise UsageError(f"not a graph document: {err}", stage=STAGE_GRAPH) from err

    nodes = sorted(document["nodes"], key=lambda item: item["index"])
    if [item["index"] for item in nodes] != list(range(len(nodes))):
        raise UsageError("graph node indexes must be 0..n-1", stage=STAGE_GRAPH)

    has_coordinates = all("ca" in item for item in nodes)
    residues = tuple(
        ResidueRecord(
            chain_id=item["chain"],
            res_seq=item["res_seq"],
            insertion_code=item["insertion_code"],
            res_name=item["res_name"],
            ca_position=tuple(item["ca"]) if has_coordinates else (0.0, 0.0, 0.0),
        )
        for item in nodes
    )

    edges = set()
    for i, j in document["edges"]:
        if i == j or not (0 <= i < len(nodes) and 0 <= j < len(nodes)):
            raise UsageError(f"invalid edge [{i}, {j}]", stage=STAGE_GRAPH)
        edges.add((min(i, j), max(i, j)))

    warnings = (WARNING_DEGENERATE_GRAPH,) if len(residues) < 2 else ()
    graph = ResidueGraph(
        nodes=residues,
        edges=tuple(sorted(edges)),
        cutoff=document["cutoff"],
        pdb_id=document["pdb_id"],
        has_coordinates=has_coordinates,
        warnings=warnings,
    )
    _LOGGER.info("Loaded the graph of %s: %d nodes, %d edges", graph.pdb_id, graph.n, graph.edge_count)
    return graph

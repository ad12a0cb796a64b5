"""Bipartite skill-occupation graph: construction, file formats, statistics."""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import DataError

logger = logging.getLogger(__name__)

TSV_HEADER = ("occupation_id", "occupation_title", "skill_id", "skill_name")
SOURCES = ("dice", "bls-generated", "user")
FORMATS = ("edge-tsv", "graph-json")


class GraphError(DataError):
    kind = "graph-error"


class MalformedRow(GraphError):
    kind = "malformed-row"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line


class DanglingEdge(GraphError):
    kind = "dangling-edge"


class EmptyGraph(GraphError):
    kind = "empty-graph"


@dataclass(frozen=True, order=True)
class OccupationNode:
    id: str
    title: str
    source: str = "user"

    def __post_init__(self):
        if not str(self.id).strip():
            raise GraphError("occupation id must be non-empty")
        if not self.title.strip():
            raise GraphError(f"occupation {self.id!r} has an empty title")
        if self.source not in SOURCES:
            raise GraphError(f"occupation {self.id!r}: unknown source {self.source!r}")


@dataclass(frozen=True, order=True)
class SkillNode:
    id: str
    name: str

    def __post_init__(self):
        if not str(self.id).strip():
            raise GraphError("skill id must be non-empty")
        if not self.name.strip():
            raise GraphError(f"skill {self.id!r} has an empty name")


@dataclass(frozen=True)
class GraphStats:
    occupation_count: int
    skill_count: int
    edge_count: int
    avg_skills_per_occupation: float
    avg_occupations_per_skill: float

    def display(self) -> dict[str, str]:
        return {
            "#Occ": str(self.occupation_count),
            "#Skill": str(self.skill_count),
            "#Edges": str(self.edge_count),
            "#Avg Skill per Occ": f"{self.avg_skills_per_occupation:.1f}",
            "#Avg Occ per Skill": f"{self.avg_occupations_per_skill:.1f}",
        }

    def table(self) -> str:
        cells = self.display()
        widths = [max(len(k), len(v)) for k, v in cells.items()]
        head = "  ".join(k.rjust(w) for k, w in zip(cells, widths))
        row = "  ".join(v.rjust(w) for v, w in zip(cells.values(), widths))
        return f"{head}\n{row}\n"


class SkillOccupationGraph:
    """Immutable bipartite graph.

    Edges are ``(occupation_id, skill_id)`` pairs, so every edge joins the two
    partitions by construction; validation checks that both endpoints exist.
    Repeated edges are collapsed and counted in ``duplicates_collapsed``.
    """

    def __init__(
        self,
        occupations: Iterable[OccupationNode],
        skills: Iterable[SkillNode],
        edges: Iterable[tuple[str, str]],
    ):
        occ: dict[str, OccupationNode] = {}
        for node in occupations:
            if node.id in occ:
                raise GraphError(f"duplicate occupation id {node.id!r}")
            occ[node.id] = node
        sk: dict[str, SkillNode] = {}
        for node in skills:
            if node.id in sk:
                raise GraphError(f"duplicate skill id {node.id!r}")
            sk[node.id] = node

        edge_set: set[tuple[str, str]] = set()
        dupes = 0
        for o, s in edges:
            if o not in occ:
                raise DanglingEdge(f"edge ({o!r}, {s!r}): unknown occupation {o!r}")
            if s not in sk:
                raise DanglingEdge(f"edge ({o!r}, {s!r}): unknown skill {s!r}")
            if (o, s) in edge_set:
                dupes += 1
            edge_set.add((o, s))

        self._occupations = occ
        self._skills = sk
        self._edges = frozenset(edge_set)
        self.duplicates_collapsed = dupes

    @property
    def occupations(self) -> Mapping[str, OccupationNode]:
        return self._occupations

    @property
    def skills(self) -> Mapping[str, SkillNode]:
        return self._skills

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return self._edges

    @cached_property
    def _adjacency(self) -> tuple[dict[str, tuple[str, ...]], dict[str, tuple[str, ...]]]:
        occ_adj: dict[str, list[str]] = {o: [] for o in self._occupations}
        skill_adj: dict[str, list[str]] = {s: [] for s in self._skills}
        for o, s in self._edges:
            occ_adj[o].append(s)
            skill_adj[s].append(o)
        return (
            {k: tuple(sorted(v)) for k, v in occ_adj.items()},
            {k: tuple(sorted(v)) for k, v in skill_adj.items()},
        )

    def skills_of(self, occupation_id: str) -> tuple[str, ...]:
        """Skill ids adjacent to an occupation, sorted."""
        return self._adjacency[0][occupation_id]

    def occupations_of(self, skill_id: str) -> tuple[str, ...]:
        """Occupation ids adjacent to a skill, sorted."""
        return self._adjacency[1][skill_id]

    def degree(self, node_id: str) -> int:
        if node_id in self._occupations:
            return len(self.skills_of(node_id))
        return len(self.occupations_of(node_id))

    def is_empty(self) -> bool:
        return not self._occupations and not self._skills

    def canonical(self) -> dict:
        """Plain-data form with nodes and edges sorted by id."""
        return {
            "occupations": [
                {"id": n.id, "title": n.title, "source": n.source}
                for n in sorted(self._occupations.values(), key=lambda n: n.id)
            ],
            "skills": [
                {"id": n.id, "name": n.name}
                for n in sorted(self._skills.values(), key=lambda n: n.id)
            ],
            "edges": [list(e) for e in sorted(self._edges)],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SkillOccupationGraph):
            return NotImplemented
        return (
            self._occupations == other._occupations
            and self._skills == other._skills
            and self._edges == other._edges
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"SkillOccupationGraph({len(self._occupations)} occupations, "
            f"{len(self._skills)} skills, {len(self._edges)} edges)"
        )


def compute_stats(g: SkillOccupationGraph) -> GraphStats:
    n_occ, n_skill, n_edge = len(g.occupations), len(g.skills), len(g.edges)
    if n_occ == 0 or n_skill == 0:
        raise EmptyGraph("statistics need at least one occupation and one skill")
    return GraphStats(
        occupation_count=n_occ,
        skill_count=n_skill,
        edge_count=n_edge,
        avg_skills_per_occupation=n_edge / n_occ,
        avg_occupations_per_skill=n_edge / n_skill,
    )


def occupation_projection(g: SkillOccupationGraph) -> dict[str, frozenset[str]]:
    """Occupations adjacent iff they share at least one skill; no self-loops."""
    adj: dict[str, set[str]] = {o: set() for o in g.occupations}
    for s in g.skills:
        members = g.occupations_of(s)
        for o in members:
            adj[o].update(members)
    for o, nbrs in adj.items():
        nbrs.discard(o)
    return {o: frozenset(n) for o, n in adj.items()}


# --------------------------------------------------------------------- I/O


def _read_tsv(path: Path, source: str) -> SkillOccupationGraph:
    occupations: dict[str, OccupationNode] = {}
    skills: dict[str, SkillNode] = {}
    edges: list[tuple[str, str]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader, None)
        if header is None:
            raise EmptyGraph(f"{path}: file is empty")
        if tuple(h.strip() for h in header) != TSV_HEADER:
            raise MalformedRow(1, "expected header " + " | ".join(TSV_HEADER))
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise MalformedRow(line, f"expected 4 tab-separated fields, got {len(row)}")
            oid, title, sid, name = (c.strip() for c in row)
            if not (oid and title and sid and name):
                raise MalformedRow(line, "empty field")
            prev = occupations.get(oid)
            if prev is None:
                occupations[oid] = OccupationNode(oid, title, source)
            elif prev.title != title:
                raise MalformedRow(line, f"occupation {oid!r} has conflicting titles")
            prev_skill = skills.get(sid)
            if prev_skill is None:
                skills[sid] = SkillNode(sid, name)
            elif prev_skill.name != name:
                raise MalformedRow(line, f"skill {sid!r} has conflicting names")
            edges.append((oid, sid))
    return SkillOccupationGraph(occupations.values(), skills.values(), edges)


def _read_json(path: Path) -> SkillOccupationGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedRow(exc.lineno, exc.msg) from exc
    if not isinstance(doc, dict) or not {"occupations", "skills", "edges"} <= doc.keys():
        raise GraphError(f"{path}: expected an object with occupations, skills and edges")
    try:
        occupations = [
            OccupationNode(str(o["id"]), o["title"], o.get("source", "user"))
            for o in doc["occupations"]
        ]
        skills = [SkillNode(str(s["id"]), s["name"]) for s in doc["skills"]]
        edges = [(str(o), str(s)) for o, s in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"{path}: malformed node or edge entry ({exc})") from exc
    return SkillOccupationGraph(occupations, skills, edges)


def infer_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        return "graph-json"
    if suffix in (".tsv", ".txt"):
        return "edge-tsv"
    raise GraphError(f"cannot infer graph format from {path}")


def ingest_graph(path: str | Path, format: str | None = None, *, source: str = "user") -> SkillOccupationGraph:
    """Read and validate a graph file.

    ``source`` labels occupations read from TSV (the JSON format stores it per
    node).  Raises :class:`MalformedRow`, :class:`DanglingEdge` or
    :class:`EmptyGraph`.
    """
    path = Path(path)
    format = format or infer_format(path)
    if format == "edge-tsv":
        g = _read_tsv(path, source)
    elif format == "graph-json":
        g = _read_json(path)
    else:
        raise GraphError(f"unknown graph format {format!r}")
    if g.is_empty():
        raise EmptyGraph(f"{path}: graph has no nodes")
    if g.duplicates_collapsed:
        logger.warning("%s: collapsed %d duplicate edge(s)", path, g.duplicates_collapsed)
    return g


def dumps_graph(g: SkillOccupationGraph, format: str = "graph-json") -> str:
    """Canonical, byte-stable serialization."""
    if format == "graph-json":
        return json.dumps(g.canonical(), ensure_ascii=False, indent=1) + "\n"
    if format == "edge-tsv":
        linked_occ = {o for o, _ in g.edges}
        linked_skill = {s for _, s in g.edges}
        isolated = (len(g.occupations) - len(linked_occ)) + (len(g.skills) - len(linked_skill))
        if isolated:
            logger.warning("edge-tsv cannot express isolated nodes; dropping %d", isolated)
        lines = ["\t".join(TSV_HEADER)]
        for o, s in sorted(g.edges):
            lines.append("\t".join((o, g.occupations[o].title, s, g.skills[s].name)))
        return "\n".join(lines) + "\n"
    raise GraphError(f"unknown graph format {format!r}")


def write_graph(g: SkillOccupationGraph, path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    format = format or infer_format(path)
    path.write_text(dumps_graph(g, format), encoding="utf-8")


def merge_graphs(graphs: Iterable[SkillOccupationGraph]) -> SkillOccupationGraph:
    """Union of several graphs; node ids must agree on titles/names."""
    occ: dict[str, OccupationNode] = {}
    sk: dict[str, SkillNode] = {}
    edges: set[tuple[str, str]] = set()
    for g in graphs:
        for node in g.occupations.values():
            if occ.setdefault(node.id, node) != node:
                raise GraphError(f"occupation {node.id!r} differs between input graphs")
        for node in g.skills.values():
            if sk.setdefault(node.id, node) != node:
                raise GraphError(f"skill {node.id!r} differs between input graphs")
        edges |= g.edges
    return SkillOccupationGraph(occ.values(), sk.values(), edges)


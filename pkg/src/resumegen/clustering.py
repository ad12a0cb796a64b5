"""Partition occupations into density clusters and drop the small ones.

Expanding a cluster from a random seed occupation to every occupation within
two hops, repeated until nothing new is reached, yields exactly the connected
component of the seed in the occupation projection.  Seeds therefore only
affect discovery order, and the partition can be computed directly with
union-find.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .graph import EmptyGraph, SkillOccupationGraph


class UnionFind:
    """Disjoint sets over hashable items, path halving + union by size."""

    def __init__(self, items=()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class Cluster:
    id: int
    occupation_ids: tuple[str, ...]
    skill_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.occupation_ids)


@dataclass(frozen=True)
class ClusterSet:
    clusters: tuple[Cluster, ...]
    dropped_occupation_ids: tuple[str, ...]
    min_cluster_size: int = 10
    _by_id: dict = field(default=None, init=False, repr=False, compare=False)

    def get(self, cluster_id: int) -> Cluster:
        if self._by_id is None:
            object.__setattr__(self, "_by_id", {c.id: c for c in self.clusters})
        return self._by_id[cluster_id]

    def to_dict(self) -> dict:
        return {
            "min_cluster_size": self.min_cluster_size,
            "clusters": [
                {"id": c.id, "occupations": list(c.occupation_ids), "skills": list(c.skill_ids)}
                for c in self.clusters
            ],
            "dropped": list(self.dropped_occupation_ids),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ClusterSet:
        clusters = tuple(
            Cluster(int(c["id"]), tuple(c["occupations"]), tuple(c["skills"])) for c in doc["clusters"]
        )
        return cls(clusters, tuple(doc["dropped"]), int(doc["min_cluster_size"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> ClusterSet:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def components_to_clusterset(
    g: SkillOccupationGraph, components, min_size: int
) -> ClusterSet:
    """Canonicalize occupation groups: sort members, order groups by smallest
    member id, filter by size, number the survivors from 0."""
    groups = sorted((sorted(c) for c in components), key=lambda c: c[0])
    kept, dropped = [], []
    for members in groups:
        if len(members) >= min_size:
            skills = sorted({s for o in members for s in g.skills_of(o)})
            kept.append(Cluster(len(kept), tuple(members), tuple(skills)))
        else:
            dropped.extend(members)
    return ClusterSet(tuple(kept), tuple(sorted(dropped)), min_size)


def cluster_graph(g: SkillOccupationGraph, min_size: int = 10) -> ClusterSet:
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    if not g.occupations:
        raise EmptyGraph("graph has no occupations to cluster")
    uf = UnionFind(g.occupations)
    # uniting every skill's occupations is the same as uniting along projection edges
    for s in g.skills:
        members = g.occupations_of(s)
        for o in members[1:]:
            uf.union(members[0], o)
    return components_to_clusterset(g, uf.groups(), min_size)


@dataclass(frozen=True)
class ClusterSummary:
    count: int
    mean_size: float
    min_size: int
    max_size: int
    dropped: int

    def table(self) -> str:
        return (
            f"{'#Clusters':>9}  {'Avg #Occ':>8}  {'Min #Occ':>8}  {'Max #Occ':>8}  {'#Dropped':>8}\n"
            f"{self.count:>9}  {self.mean_size:>8.1f}  {self.min_size:>8}  {self.max_size:>8}  {self.dropped:>8}\n"
        )


def cluster_stats(cs: ClusterSet) -> ClusterSummary:
    sizes = [len(c) for c in cs.clusters]
    if not sizes:
        return ClusterSummary(0, 0.0, 0, 0, len(cs.dropped_occupation_ids))
    return ClusterSummary(
        count=len(sizes),
        mean_size=statistics.fmean(sizes),
        min_size=min(sizes),
        max_size=max(sizes),
        dropped=len(cs.dropped_occupation_ids),
    )

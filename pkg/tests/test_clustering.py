import random

import pytest
from hypothesis import given, settings, strategies as st

from resumegen.clustering import ClusterSet, UnionFind, cluster_graph, cluster_stats, components_to_clusterset
from resumegen.graph import EmptyGraph

from factories import build_graph, random_bipartite
from oracles import bfs_components, two_hop_expansion_clusters


def _chain(prefix, n):
    """n occupations linked in a path through shared skills."""
    return [(f"{prefix}{i}", f"{prefix}s{i}") for i in range(n)] + [
        (f"{prefix}{i + 1}", f"{prefix}s{i}") for i in range(n - 1)
    ]


def _member_sets(cs):
    return {frozenset(c.occupation_ids) for c in cs.clusters}


def test_union_find_basics():
    uf = UnionFind(range(5))
    assert uf.union(0, 1) and uf.union(3, 4)
    assert not uf.union(1, 0)
    assert uf.find(0) == uf.find(1) != uf.find(2)
    assert sorted(sorted(g) for g in uf.groups()) == [[0, 1], [2], [3, 4]]


def test_size_filter_example():
    g = build_graph(_chain("a", 12) + _chain("b", 9) + _chain("c", 30))
    cs = cluster_graph(g, 10)
    assert len(cs.clusters) == 2
    assert len(cs.dropped_occupation_ids) == 9
    assert sorted(len(c) for c in cs.clusters) == [12, 30]


def test_cluster_stats_example():
    g = build_graph(_chain("a", 10) + _chain("b", 20))
    s = cluster_stats(cluster_graph(g, 10))
    assert (s.count, s.mean_size) == (2, 15.0)
    assert "#Clusters" in s.table()


def test_cluster_stats_recount():
    g = random_bipartite(random.Random(2), 80, 120, 90)
    cs = cluster_graph(g, 2)
    sizes = [len(c) for c in bfs_components(g.occupations, g.edges) if len(c) >= 2]
    s = cluster_stats(cs)
    assert s.count == len(sizes)
    assert s.mean_size == pytest.approx(sum(sizes) / len(sizes), abs=1e-12)
    assert (s.min_size, s.max_size) == (min(sizes), max(sizes))


def test_cluster_skills_are_member_skills():
    g = random_bipartite(random.Random(4), 40, 40, 70)
    for c in cluster_graph(g, 1).clusters:
        assert set(c.skill_ids) == {s for o, s in g.edges if o in set(c.occupation_ids)}


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 80), st.integers(1, 6), st.integers(0, 10**6))
def test_matches_bfs_and_two_hop_expansion(n_occ, n_skill, n_edges, min_size, seed):
    g = random_bipartite(random.Random(seed), n_occ, n_skill, n_edges)
    cs = cluster_graph(g, min_size)
    expected = {c for c in bfs_components(g.occupations, g.edges) if len(c) >= min_size}
    assert _member_sets(cs) == expected
    for s in range(3):
        assert _member_sets(cs) == set(two_hop_expansion_clusters(g.occupations, g.edges, min_size, seed + s))
    # every occupation is in exactly one cluster or dropped
    placed = [o for c in cs.clusters for o in c.occupation_ids] + list(cs.dropped_occupation_ids)
    assert sorted(placed) == sorted(g.occupations)


def test_ids_are_canonical_and_serialization_stable(tmp_path):
    g = random_bipartite(random.Random(9), 60, 50, 80)
    cs = cluster_graph(g, 2)
    assert [c.id for c in cs.clusters] == list(range(len(cs.clusters)))
    firsts = [c.occupation_ids[0] for c in cs.clusters]
    assert firsts == sorted(firsts)
    path = tmp_path / "c.json"
    cs.write(path)
    again = ClusterSet.read(path)
    assert again == cs
    assert again.dumps() == cs.dumps()
    # permuting the component input does not change the result
    comps = bfs_components(g.occupations, g.edges)
    random.Random(1).shuffle(comps)
    assert components_to_clusterset(g, comps, 2) == cs


def test_errors():
    with pytest.raises(ValueError):
        cluster_graph(build_graph([("a", "s")]), 0)
    with pytest.raises(EmptyGraph):
        cluster_graph(build_graph([]), 1)
    cs = cluster_graph(build_graph([("a", "s")]), 5)
    assert cs.clusters == () and cluster_stats(cs).count == 0
    with pytest.raises(KeyError):
        cs.get(0)

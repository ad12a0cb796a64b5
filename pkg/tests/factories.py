"""Synthetic graphs and specs for tests."""

from __future__ import annotations

import random

from resumegen.annotation import NamePool, build_annotation, perturb
from resumegen.clustering import cluster_graph
from resumegen.graph import OccupationNode, SkillNode, SkillOccupationGraph
from resumegen.pipeline import plan_triples
from resumegen.rendering.triple import render_template
from resumegen.rng import Rng
from resumegen.sampling import ExperienceSpan, SamplingTargets, TripleSpec

TITLES = (
    "Software Engineer",
    "Registered Nurse",
    "Data Analyst",
    "Electrician",
    "Accountant",
    "Office Clerk",
    "Product Manager",
    "Welder",
    "Pharmacist",
    "Teacher",
)
PREFIXES = ("", "Senior ", "Junior ", "Lead ", "Assistant ")


def build_graph(edges, titles=None, skill_names=None, extra_occupations=(), extra_skills=()) -> SkillOccupationGraph:
    titles = titles or {}
    skill_names = skill_names or {}
    occ_ids = sorted({o for o, _ in edges} | set(extra_occupations))
    skill_ids = sorted({s for _, s in edges} | set(extra_skills))
    return SkillOccupationGraph(
        [OccupationNode(o, titles.get(o, f"Title {o}")) for o in occ_ids],
        [SkillNode(s, skill_names.get(s, f"skill {s}")) for s in skill_ids],
        edges,
    )


def random_bipartite(rng: random.Random, n_occ: int, n_skill: int, n_edges: int) -> SkillOccupationGraph:
    occs = [f"o{i}" for i in range(n_occ)]
    skills = [f"s{i}" for i in range(n_skill)]
    edges = {(rng.choice(occs), rng.choice(skills)) for _ in range(n_edges)}
    return build_graph(sorted(edges), extra_occupations=occs, extra_skills=skills)


def clustered_graph(
    n_clusters: int = 10,
    per_cluster: int = 50,
    skills_per_cluster: int = 60,
    seed: int = 0,
) -> SkillOccupationGraph:
    """Disjoint clusters; each occupation has 3 to 12 skills and shares one with
    its predecessor, so every cluster is connected."""
    rng = random.Random(seed)
    edges, titles, names = set(), {}, {}
    for c in range(n_clusters):
        skills = [f"c{c}s{k}" for k in range(skills_per_cluster)]
        for s in skills:
            names[s] = f"skill {c} {s.split('s')[-1]}"
        prev = None
        for i in range(per_cluster):
            o = f"c{c}o{i}"
            titles[o] = f"{rng.choice(PREFIXES)}{TITLES[(c + i) % len(TITLES)]} {c}.{i}"
            picked = set(rng.sample(skills, rng.randint(3, 12)))
            if prev is not None:
                picked.add(rng.choice(sorted(e[1] for e in edges if e[0] == prev)))
            edges |= {(o, s) for s in picked}
            prev = o
    return build_graph(sorted(edges), titles, names)


def make_spec(
    skills=("a", "b", "c"),
    durations=(2, 3),
    titles=None,
    last_active=2020,
    spec_id="t000000",
    name="Ada",
    gender="female",
) -> TripleSpec:
    titles = titles or [f"Job {i}" for i in range(len(durations))]
    spans, end = [], last_active
    for t, d in zip(reversed(titles), reversed(durations)):
        spans.append(ExperienceSpan(f"occ:{t}", t, end - d, end, d))
        end -= d
    spans.reverse()
    return TripleSpec(
        id=spec_id,
        seed=1,
        cluster_id=0,
        start_occupation_id=spans[0].occupation_id,
        job_title=titles[0],
        skills=tuple(skills),
        experiences=tuple(spans),
        jd_experience_years=tuple(1 for _ in spans),
        candidate_first_name=name,
        candidate_gender=gender,
        targets=SamplingTargets(len(spans), len(skills)),
    )


def annotated(spec: TripleSpec, seed: int = 0):
    p = perturb(spec, Rng(seed))
    return build_annotation(spec, p, spec.candidate_first_name, spec.candidate_gender)


def template_triples(count: int, seed: int = 0, graph: SkillOccupationGraph | None = None):
    g = graph or clustered_graph(n_clusters=4, per_cluster=20, seed=seed)
    cs = cluster_graph(g, 10)
    planned = plan_triples(g, cs, count, seed, NamePool.from_files())
    return [render_template(s, a) for s, a in planned]

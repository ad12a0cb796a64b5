"""Composition of sampling, annotation, rendering and assessment.

Randomness for triple ``i`` comes from independent streams derived from the
root seed: ``("sample", i, attempt)`` for the walk, ordering and time spans,
``("name", i)`` for the candidate name and ``("perturb", i)`` for the
counterfactual.  Names are assigned in index order because the per-cluster
gender counters are shared; everything else is job-local.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .annotation import (
    AnnotationRecord,
    NamePool,
    assign_name,
    build_annotation,
    perturb,
)
from .clustering import ClusterSet
from .errors import DataError, EndpointFailure
from .graph import SkillOccupationGraph
from .quality import (
    CRITERIA,
    QualityScore,
    UnparseableScore,
    build_geval_prompt,
    parse_score,
)
from .rendering.documents import ParseError, parse_triple
from .rendering.endpoint import EndpointClient
from .rendering.prompt import (
    STRUCTURE_REMINDER,
    build_generation_prompt,
    jd_experience_text,
    span_text,
)
from .rendering.triple import Triple, removed_skills_present, render_template
from .rng import Rng, derive_seed
from .sampling import (
    Oracle,
    TripleSpec,
    attribute_time,
    choose_targets,
    order_experiences,
    pick_start,
    sample_subgraph,
)

logger = logging.getLogger(__name__)

OracleFactory = Callable[[str], Oracle]
MAX_ATTEMPTS = 25


def triple_id(index: int) -> str:
    return f"t{index:06d}"


def _map(fn, items, jobs: int) -> list:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def draft_spec(
    index: int,
    g: SkillOccupationGraph,
    cs: ClusterSet,
    root_seed: int,
    count_oracle: Oracle | None = None,
    order_oracle: Oracle | None = None,
) -> TripleSpec:
    """Sampled spec without a candidate name.

    Walks ending with fewer than two skills cannot be perturbed and are
    redrawn from the next attempt stream.
    """
    tid = triple_id(index)
    rejected = 0
    for attempt in range(MAX_ATTEMPTS):
        seed = derive_seed(root_seed, "sample", index, attempt)
        rng = Rng(seed)
        cluster, start = pick_start(cs, rng)
        title = g.occupations[start].title
        targets = choose_targets(title, g.degree(start), rng, count_oracle)
        sub = sample_subgraph(g, cluster, start, targets, rng)
        if len(sub.skill_ids) < 2:
            rejected += 1
            continue

        pending = {}
        for occ in sub.occupation_ids:
            pending.setdefault(g.occupations[occ].title, []).append(occ)
        titles = [g.occupations[o].title for o in sub.occupation_ids]
        degrees = {g.occupations[o].title: g.degree(o) for o in sub.occupation_ids}
        ordering = order_experiences(titles, order_oracle, degrees)
        ordered = [(pending[t].pop(0), t) for t in ordering.titles]
        spans, jd_years = attribute_time(ordered, rng)

        notes = [n for n in (targets.note, ordering.note) if n]
        if rejected:
            notes.append(f"redrawn-after-{rejected}-walks-with-under-2-skills")
        return TripleSpec(
            id=tid,
            seed=seed,
            cluster_id=cluster.id,
            start_occupation_id=start,
            job_title=title,
            skills=tuple(g.skills[s].name for s in sub.skill_ids),
            experiences=tuple(spans),
            jd_experience_years=tuple(jd_years),
            candidate_first_name="",
            candidate_gender="",
            targets=targets,
            skill_shortfall=sub.skill_shortfall,
            experience_shortfall=sub.experience_shortfall,
            ordering_source=ordering.source,
            notes=tuple(notes),
        )
    raise DataError(f"{tid}: no walk reached two skills in {MAX_ATTEMPTS} attempts")


def plan_triples(
    g: SkillOccupationGraph,
    cs: ClusterSet,
    count: int,
    root_seed: int,
    names: NamePool,
    count_oracle: OracleFactory | None = None,
    order_oracle: OracleFactory | None = None,
    jobs: int = 1,
) -> list[tuple[TripleSpec, AnnotationRecord]]:
    def draft(i: int) -> TripleSpec:
        tid = triple_id(i)
        return draft_spec(
            i,
            g,
            cs,
            root_seed,
            count_oracle(tid) if count_oracle else None,
            order_oracle(tid) if order_oracle else None,
        )

    drafts = _map(draft, range(count), jobs)
    out = []
    for i, spec in enumerate(drafts):
        name, gender = assign_name(names, spec.cluster_id, Rng.derived(root_seed, "name", i))
        spec = replace(spec, candidate_first_name=name, candidate_gender=gender)
        p = perturb(spec, Rng.derived(root_seed, "perturb", i))
        out.append((spec, build_annotation(spec, p, name, gender)))
    return out


@dataclass
class RenderOutcome:
    triples: list[Triple]
    rejects: list[dict]
    failures: list[EndpointFailure]


def _render_endpoint(spec: TripleSpec, ann: AnnotationRecord, client: EndpointClient) -> Triple | dict:
    prompt = build_generation_prompt(spec, ann).text
    error: ParseError | None = None
    for text in (prompt, prompt + STRUCTURE_REMINDER):
        raw = client.complete(text, spec.id)
        try:
            jd, matched, unmatched = parse_triple(raw)
        except ParseError as exc:
            error = exc
            continue
        triple = Triple(spec.id, spec, ann, jd, matched, unmatched, "endpoint", raw)
        leftover = removed_skills_present(triple)
        if leftover:
            return {"triple_id": spec.id, "error": "removed-skill-present", "detail": leftover, "raw_text": raw}
        return triple
    return {"triple_id": spec.id, "error": error.kind, "detail": str(error), "raw_text": raw}


def render_all(
    planned: Sequence[tuple[TripleSpec, AnnotationRecord]],
    mode: str = "template",
    client: EndpointClient | None = None,
    jobs: int = 1,
) -> RenderOutcome:
    """Render every planned triple.

    Endpoint replies that fail to parse are retried once with a reminder about
    the required structure and otherwise returned as rejects.  Endpoint
    failures do not stop the run; completed replies are cached so a rerun
    resumes where this one stopped.
    """
    if mode == "template":
        return RenderOutcome([render_template(s, a) for s, a in planned], [], [])
    if mode != "endpoint" or client is None:
        raise ValueError("endpoint rendering needs an EndpointClient")

    def one(item):
        try:
            return _render_endpoint(item[0], item[1], client)
        except EndpointFailure as exc:
            return exc

    triples, rejects, failures = [], [], []
    for result in _map(one, planned, jobs):
        if isinstance(result, Triple):
            triples.append(result)
        elif isinstance(result, EndpointFailure):
            failures.append(result)
        else:
            rejects.append(result)
    return RenderOutcome(triples, rejects, failures)


def _judge_inputs(t: Triple, kind: str) -> tuple[list[str], list[str], str]:
    ann = t.annotation
    if kind == "job-description":
        exp = [jd_experience_text(e.title, y) for e, y in zip(ann.experiences, t.spec.jd_experience_years)]
        return list(ann.skills), exp, t.job_description.text()
    if kind == "resume-matched":
        return list(ann.skills), [span_text(e) for e in ann.experiences], t.resume_matched.text()
    return list(ann.unmatched_skills), [span_text(e) for e in ann.unmatched_experiences], t.resume_unmatched.text()


@dataclass
class AssessOutcome:
    scores: list[QualityScore]
    unparseable: list[dict]


def assess(
    triples: Sequence[Triple],
    client: EndpointClient,
    sample_size: int = 100,
    seed: int = 0,
    jobs: int = 1,
) -> AssessOutcome:
    """Score a seeded sample of documents on both criteria."""
    pool = [(t, kind) for t in sorted(triples, key=lambda t: t.id) for kind in t.documents()]
    picked = Rng.derived(seed, "assess").sample(pool, min(sample_size, len(pool)))
    jobs_list = [(t, kind, c) for t, kind in picked for c in CRITERIA]

    def one(item):
        t, kind, criterion = item
        skills, exp, doc = _judge_inputs(t, kind)
        judge_kind = "job-description" if kind == "job-description" else "resume"
        doc_id = f"{t.id}:{kind}"
        reply = client.complete(build_geval_prompt(criterion, skills, exp, doc, judge_kind), doc_id)
        try:
            return QualityScore(criterion, parse_score(reply), doc_id, client.model, judge_kind)
        except UnparseableScore as exc:
            return {"document_id": doc_id, "criterion": criterion, "error": exc.kind, "reply": reply}

    scores, bad = [], []
    for r in _map(one, jobs_list, jobs):
        (scores if isinstance(r, QualityScore) else bad).append(r)
    return AssessOutcome(scores, bad)

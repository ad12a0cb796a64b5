"""Extend a seed graph with new occupations.

Each new occupation title is matched to its most similar occupation in a
reference graph; the matched occupation's degree becomes the number of skills
to request from the oracle.  Without a reference graph the count is drawn from
a clamped normal distribution instead.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol

from .errors import DataError
from .graph import OccupationNode, SkillNode, SkillOccupationGraph
from .rng import Rng

SKILL_PROMPT = "Generate {n} number of required skills necessary for the occupation {occupation}."


class EmptyReference(DataError):
    kind = "empty-reference"


class EmptySkillList(DataError):
    kind = "empty-skill-list"


class SimilarityProvider(Protocol):
    def __call__(self, a: str, b: str) -> float: ...


def _trigrams(text: str) -> Counter:
    padded = f"  {' '.join(text.lower().split())}  "
    return Counter(padded[i : i + 3] for i in range(len(padded) - 2))


def trigram_cosine(a: str, b: str) -> float:
    """Cosine similarity of character-trigram count vectors of lowercased text.

    Deterministic stand-in for a phrase-embedding model.  Symmetric, in [0, 1],
    and exactly 1 for identical non-empty inputs.
    """
    if not a.strip() or not b.strip():
        return 0.0
    ta, tb = _trigrams(a), _trigrams(b)
    if ta == tb:
        return 1.0
    dot = sum(ta[k] * tb[k] for k in sorted(ta.keys() & tb.keys()))
    na = sum(v * v for v in ta.values())
    nb = sum(v * v for v in tb.values())
    return min(1.0, dot / math.sqrt(na * nb))


@dataclass(frozen=True)
class CurationPlan:
    occupation_title: str
    matched_reference_title: str | None
    match_score: float
    target_skill_count: int

    def __post_init__(self):
        if self.target_skill_count < 1:
            raise ValueError("target_skill_count must be >= 1")
        if not 0.0 <= self.match_score <= 1.0:
            raise ValueError("match_score must lie in [0, 1]")


def match_occupation(
    title: str,
    reference: SkillOccupationGraph,
    sim: SimilarityProvider = trigram_cosine,
) -> CurationPlan:
    """Best-scoring reference occupation; ties go to the lexicographically
    smallest title (then id).  Reference occupations without skills are
    ignored since they cannot supply a skill count."""
    if not title.strip():
        raise ValueError("title must be non-empty")
    best: tuple[float, str, str] | None = None
    for occ in reference.occupations.values():
        if reference.degree(occ.id) == 0:
            continue
        score = float(sim(title, occ.title))
        key = (score, occ.title, occ.id)
        if best is None or score > best[0] or (score == best[0] and key[1:] < best[1:]):
            best = key
    if best is None:
        raise EmptyReference("reference graph has no occupation with skills")
    score, ref_title, ref_id = best
    return CurationPlan(title, ref_title, min(1.0, max(0.0, score)), reference.degree(ref_id))


def plan_from_distribution(
    title: str,
    rng: Rng,
    mean: float = 8.5,
    std: float = 3.0,
    clamp: tuple[int, int] = (3, 20),
) -> CurationPlan:
    n = round(rng.gauss(mean, std))
    n = max(clamp[0], min(clamp[1], n))
    return CurationPlan(title, None, 0.0, n)


def build_skill_generation_prompt(plan: CurationPlan) -> str:
    return SKILL_PROMPT.format(n=plan.target_skill_count, occupation=plan.occupation_title)


_BULLET = re.compile(r"^\s*(?:[-*•]|\d+[.)]|\(\d+\))\s*")


def clean_skill(raw: str) -> str:
    s = _BULLET.sub("", raw).strip()
    s = s.strip("\"'`*")
    s = re.sub(r"[\s.,;:!]+$", "", s)
    return " ".join(s.split())


def parse_generated_skills(reply: str) -> list[str]:
    """Skill names from a free-text oracle reply (one per line or comma list).

    A ``Name: description`` line keeps only the name.  Duplicates are removed
    case-insensitively, first spelling wins.
    """
    lines = [ln for ln in reply.splitlines() if ln.strip()]
    if len(lines) == 1 and "," in lines[0]:
        lines = lines[0].split(",")
    out: list[str] = []
    seen: set[str] = set()
    for ln in lines:
        if ":" in ln and not _BULLET.match(ln) and ln.rstrip().endswith(":"):
            continue  # preamble such as "Here are the skills:"
        name = clean_skill(ln.split(":", 1)[0] if ":" in ln else ln)
        if name and name.lower() not in seen:
            seen.add(name.lower())
            out.append(name)
    return out


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-") or "x"


def _fresh_id(prefix: str, text: str, taken: set[str]) -> str:
    base = f"{prefix}:{_slug(text)}"
    candidate, i = base, 2
    while candidate in taken:
        candidate = f"{base}-{i}"
        i += 1
    return candidate


def merge_generated_skills(
    g: SkillOccupationGraph,
    title: str,
    skills: Sequence[str],
    source: str = "bls-generated",
) -> SkillOccupationGraph:
    """Add ``title`` and its skills to ``g``, returning a new graph.

    Occupations and skills are reused on case-insensitive exact name match.
    """
    return merge_generated_batch(g, [(title, skills)], source)


def merge_generated_batch(
    g: SkillOccupationGraph,
    items: Iterable[tuple[str, Sequence[str]]],
    source: str = "bls-generated",
) -> SkillOccupationGraph:
    """Same as merging each ``(title, skills)`` pair in turn, in one pass."""
    occupations = dict(g.occupations)
    skill_nodes = dict(g.skills)
    edges = set(g.edges)
    taken = set(occupations) | set(skill_nodes)
    occ_by_title = {n.title.lower(): n.id for n in occupations.values()}
    skill_by_name = {n.name.lower(): n.id for n in skill_nodes.values()}

    for title, skills in items:
        cleaned = [clean_skill(s) for s in skills]
        if not cleaned or any(not s for s in cleaned):
            raise EmptySkillList(f"no usable skills for {title!r}")
        title = " ".join(title.split())
        if not title:
            raise ValueError("title must be non-empty")
        occ_id = occ_by_title.get(title.lower())
        if occ_id is None:
            occ_id = _fresh_id("occ", title, taken)
            taken.add(occ_id)
            occupations[occ_id] = OccupationNode(occ_id, title, source)
            occ_by_title[title.lower()] = occ_id
        for name in cleaned:
            sid = skill_by_name.get(name.lower())
            if sid is None:
                sid = _fresh_id("skill", name, taken)
                taken.add(sid)
                skill_nodes[sid] = SkillNode(sid, name)
                skill_by_name[name.lower()] = sid
            edges.add((occ_id, sid))
    return SkillOccupationGraph(occupations.values(), skill_nodes.values(), edges)


def reference_skill_fallback(plan: CurationPlan, reference: SkillOccupationGraph) -> list[str]:
    """Offline substitute for oracle skill generation: the matched reference
    occupation's own skills (sorted by name, truncated to the target count)."""
    if plan.matched_reference_title is None:
        raise EmptyReference("plan has no matched reference occupation")
    for occ in sorted(reference.occupations.values(), key=lambda n: n.id):
        if occ.title == plan.matched_reference_title and reference.degree(occ.id):
            names = sorted(reference.skills[s].name for s in reference.skills_of(occ.id))
            return names[: plan.target_skill_count]
    raise EmptyReference(f"{plan.matched_reference_title!r} not found in reference graph")


def write_plans(plans: Iterable[CurationPlan], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for plan in plans:
            fh.write(json.dumps(asdict(plan), ensure_ascii=False) + "\n")


def read_plans(path: str | Path) -> list[CurationPlan]:
    with open(path, encoding="utf-8") as fh:
        return [CurationPlan(**json.loads(line)) for line in fh if line.strip()]

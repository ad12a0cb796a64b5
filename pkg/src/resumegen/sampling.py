"""Subgraph sampling: targets, random walk, chronological ordering, time spans."""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Callable, Mapping, Sequence
from dataclasses import asdict, dataclass, field

from .clustering import Cluster, ClusterSet
from .graph import SkillOccupationGraph
from .rng import Rng

Oracle = Callable[[str], str]

SKILL_COUNT_PROMPT = (
    "On average how many skills does a person with a job title of '{title}' "
    "may have listed in his or her resume?"
)
ORDERING_PROMPT = (
    "Given the previous experiences of individuals with {experiences}, please arrange them "
    "in a chronological order based on the likelihood of encountering these experiences "
    "from earlier to later over time."
)

MIN_EXPERIENCES, MAX_EXPERIENCES = 1, 5
MIN_DURATION, MAX_DURATION = 1, 5
FIRST_LAST_ACTIVE, FINAL_LAST_ACTIVE = 2015, 2023
FALLBACK_SKILL_CLAMP = (3, 20)
WALK_BUDGET_FACTOR = 200

# (tier, pattern) checked against the lowercased title; highest matching tier wins
SENIORITY_TIERS: tuple[tuple[int, re.Pattern], ...] = (
    (8, re.compile(r"\b(?:chief|head)\b")),
    (7, re.compile(r"\b(?:vp|vice president)\b")),
    (6, re.compile(r"\bdirector\b")),
    (5, re.compile(r"\b(?:manager|supervisor)\b")),
    (4, re.compile(r"\b(?:lead|principal|staff)\b")),
    (3, re.compile(r"\bsenior\b")),
    (1, re.compile(r"\b(?:junior|assistant)\b")),
    (0, re.compile(r"\bintern\b")),
)
UNMARKED_TIER = 2


@dataclass(frozen=True)
class SamplingTargets:
    experience_count: int
    skill_count: int
    source: str = "fallback"  # "oracle" | "fallback"
    note: str | None = None

    def __post_init__(self):
        if not MIN_EXPERIENCES <= self.experience_count <= MAX_EXPERIENCES:
            raise ValueError(f"experience_count {self.experience_count} outside [1, 5]")
        if self.skill_count < 1:
            raise ValueError("skill_count must be >= 1")
        if self.source not in ("oracle", "fallback"):
            raise ValueError(f"unknown target source {self.source!r}")


@dataclass(frozen=True)
class ExperienceSpan:
    occupation_id: str
    title: str
    start_year: int
    end_year: int
    duration_years: int

    def __post_init__(self):
        if not MIN_DURATION <= self.duration_years <= MAX_DURATION:
            raise ValueError(f"duration {self.duration_years} outside [1, 5]")
        if self.end_year - self.start_year != self.duration_years:
            raise ValueError("end_year - start_year must equal duration_years")


@dataclass(frozen=True)
class SubgraphSample:
    cluster_id: int
    start_occupation_id: str
    skill_ids: tuple[str, ...]
    occupation_ids: tuple[str, ...]
    steps: int
    skill_shortfall: bool
    experience_shortfall: bool

    @property
    def shortfall(self) -> bool:
        return self.skill_shortfall or self.experience_shortfall


@dataclass(frozen=True)
class OrderingResult:
    titles: tuple[str, ...]
    source: str  # "oracle" | "fallback" | "trivial"
    note: str | None = None


@dataclass(frozen=True)
class TripleSpec:
    """Symbolic plan that fully determines one triple before rendering."""

    id: str
    seed: int
    cluster_id: int
    start_occupation_id: str
    job_title: str
    skills: tuple[str, ...]
    experiences: tuple[ExperienceSpan, ...]
    jd_experience_years: tuple[int, ...]
    candidate_first_name: str
    candidate_gender: str
    targets: SamplingTargets
    skill_shortfall: bool = False
    experience_shortfall: bool = False
    ordering_source: str = "trivial"
    notes: tuple[str, ...] = field(default=())

    @property
    def last_active_year(self) -> int:
        return self.experiences[-1].end_year

    def to_dict(self) -> dict:
        d = asdict(self)
        d["skills"] = list(self.skills)
        d["experiences"] = [asdict(e) for e in self.experiences]
        d["jd_experience_years"] = list(self.jd_experience_years)
        d["notes"] = list(self.notes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TripleSpec:
        d = dict(d)
        d["skills"] = tuple(d["skills"])
        d["experiences"] = tuple(ExperienceSpan(**e) for e in d["experiences"])
        d["jd_experience_years"] = tuple(d["jd_experience_years"])
        d["targets"] = SamplingTargets(**d["targets"])
        d["notes"] = tuple(d.get("notes", ()))
        return cls(**d)


# ------------------------------------------------------------------ targets


def build_skill_count_prompt(title: str) -> str:
    if not title.strip():
        raise ValueError("title must be non-empty")
    return SKILL_COUNT_PROMPT.format(title=title)


_RANGE = re.compile(r"(\d+)\s*(?:-|–|—|to)\s*(\d+)")
_INT = re.compile(r"\d+")


def parse_count_reply(reply: str) -> int | None:
    """Integer from a count reply; a range such as ``10-15`` gives its rounded-up midpoint."""
    m = _RANGE.search(reply)
    if m:
        lo, hi = sorted((int(m.group(1)), int(m.group(2))))
        value = (lo + hi + 1) // 2
    else:
        m = _INT.search(reply)
        if not m:
            return None
        value = int(m.group(0))
    return value if value >= 1 else None


def choose_targets(
    start_title: str,
    start_degree: int,
    rng: Rng,
    oracle: Oracle | None = None,
) -> SamplingTargets:
    """Experience count uniform on {1..5}; skill count from the oracle if it
    answers with a usable number, else the start occupation's degree clamped to
    [3, 20]."""
    experiences = rng.randint(MIN_EXPERIENCES, MAX_EXPERIENCES)
    lo, hi = FALLBACK_SKILL_CLAMP
    fallback = max(lo, min(hi, start_degree))
    if oracle is None:
        return SamplingTargets(experiences, fallback, "fallback")
    reply = oracle(build_skill_count_prompt(start_title))
    n = parse_count_reply(reply)
    if n is None:
        return SamplingTargets(experiences, fallback, "fallback", "oracle-reply-unparseable")
    return SamplingTargets(experiences, n, "oracle")


# --------------------------------------------------------------------- walk


def pick_start(cs: ClusterSet, rng: Rng) -> tuple[Cluster, str]:
    """Cluster uniformly, then a start occupation uniformly within it."""
    if not cs.clusters:
        raise ValueError("cluster set is empty")
    cluster = rng.choice(cs.clusters)
    return cluster, rng.choice(cluster.occupation_ids)


def sample_subgraph(
    g: SkillOccupationGraph,
    cluster: Cluster,
    start: str,
    targets: SamplingTargets,
    rng: Rng,
) -> SubgraphSample:
    """Alternating occupation -> skill -> occupation random walk from ``start``.

    Distinct skills and occupations (the start included) are collected until
    each reaches its target or ``200 * (skill + experience target)`` hops have
    been taken.  Once the occupation target is met the walk only steps onto
    occupations already collected, so every skill is adjacent to a collected
    occupation.  Whatever stays below target is flagged as a shortfall.
    """
    want_skills, want_occ = targets.skill_count, targets.experience_count
    skills: list[str] = []
    occupations: list[str] = [start]
    seen_skills: set[str] = set()
    seen_occ = {start}
    budget = WALK_BUDGET_FACTOR * (want_skills + want_occ)
    steps = 0
    current = start

    while (len(skills) < want_skills or len(occupations) < want_occ) and steps < budget:
        nbrs = g.skills_of(current)
        if not nbrs:
            if current == start:
                break
            current = start
            steps += 1
            continue
        skill = rng.choice(nbrs)
        steps += 1
        if skill not in seen_skills and len(skills) < want_skills:
            seen_skills.add(skill)
            skills.append(skill)
        nexts = g.occupations_of(skill)
        if len(occupations) >= want_occ:
            # stay on collected occupations so every skill comes from one of them
            nexts = [o for o in nexts if o in seen_occ]
        occ = rng.choice(nexts)
        steps += 1
        if occ not in seen_occ and len(occupations) < want_occ:
            seen_occ.add(occ)
            occupations.append(occ)
        current = occ

    return SubgraphSample(
        cluster_id=cluster.id,
        start_occupation_id=start,
        skill_ids=tuple(skills),
        occupation_ids=tuple(occupations),
        steps=steps,
        skill_shortfall=len(skills) < want_skills,
        experience_shortfall=len(occupations) < want_occ,
    )


# ----------------------------------------------------------------- ordering


def build_ordering_prompt(titles: Sequence[str]) -> str:
    if len(titles) < 2:
        raise ValueError("ordering needs at least two titles")
    listed = ", ".join(f'"{t}"' for t in titles)
    return ORDERING_PROMPT.format(experiences=listed)


def seniority(title: str) -> int:
    low = " ".join(title.lower().split())
    tiers = [tier for tier, pat in SENIORITY_TIERS if pat.search(low)]
    return max(tiers) if tiers else UNMARKED_TIER


def fallback_order(titles: Sequence[str], degrees: Mapping[str, int] | None = None) -> list[str]:
    degrees = degrees or {}
    return sorted(titles, key=lambda t: (seniority(t), degrees.get(t, 0), t))


_LINE_PREFIX = re.compile(r"^\s*(?:[-*•]|\d+[.)]|\(\d+\)|step \d+:?)\s*", re.IGNORECASE)
_SEPARATORS = re.compile(r"\s*(?:->|→|=>|>|,|;)\s*")


def _match_reply(reply: str, titles: Sequence[str]) -> list[str] | None:
    by_lower: dict[str, str] = {}
    for t in titles:
        by_lower.setdefault(" ".join(t.lower().split()), t)

    def resolve(chunks: list[str]) -> list[str] | None:
        out = []
        for chunk in chunks:
            key = " ".join(_LINE_PREFIX.sub("", chunk).strip().strip("\"'`*.").lower().split())
            if key in by_lower:
                out.append(by_lower[key])
        return out if Counter(out) == Counter(titles) else None

    lines = [ln for ln in reply.splitlines() if ln.strip()]
    found = resolve(lines)
    if found is None and len(lines) == 1:
        found = resolve(_SEPARATORS.split(lines[0]))
    return found


def order_experiences(
    titles: Sequence[str],
    oracle: Oracle | None = None,
    degrees: Mapping[str, int] | None = None,
) -> OrderingResult:
    """Oldest-to-newest ordering; always a permutation of ``titles``.

    The oracle reply is used only when it names every input title exactly once
    (case-insensitive, one per line or separated by commas/arrows).  Otherwise
    titles are sorted by keyword seniority tier, then occupation degree, then
    text.
    """
    titles = list(titles)
    if len(titles) < 2:
        return OrderingResult(tuple(titles), "trivial")
    note = None
    if oracle is not None:
        found = _match_reply(oracle(build_ordering_prompt(titles)), titles)
        if found is not None:
            return OrderingResult(tuple(found), "oracle")
        note = "oracle-not-a-permutation"
    return OrderingResult(tuple(fallback_order(titles, degrees)), "fallback", note)


# --------------------------------------------------------------------- time


def attribute_time(
    ordered: Sequence[tuple[str, str]],
    rng: Rng,
) -> tuple[list[ExperienceSpan], list[int]]:
    """Resume spans and job-description years for ``(occupation_id, title)``
    pairs ordered oldest to newest.

    Draw order: last-active year, then one duration per experience, then one
    job-description year count per experience (both oldest first).  Spans are
    laid out backwards from the last-active year with no gaps.
    """
    if not ordered:
        raise ValueError("attribute_time needs at least one experience")
    last_active = rng.randint(FIRST_LAST_ACTIVE, FINAL_LAST_ACTIVE)
    durations = [rng.randint(MIN_DURATION, MAX_DURATION) for _ in ordered]
    jd_years = [rng.randint(MIN_DURATION, MAX_DURATION) for _ in ordered]

    spans: list[ExperienceSpan] = []
    end = last_active
    for (occ_id, title), d in zip(reversed(ordered), reversed(durations)):
        spans.append(ExperienceSpan(occ_id, title, end - d, end, d))
        end -= d
    spans.reverse()
    return spans, jd_years

"""Candidate names and the counterfactual (unmatched resume) perturbation."""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

from .errors import DataError
from .rng import Rng
from .sampling import ExperienceSpan, TripleSpec

GENDERS = ("female", "male")
MAX_REMOVED_SKILLS = 5


class EmptyPool(DataError):
    kind = "empty-pool"


class TooFewSkills(DataError):
    kind = "too-few-skills"


def _read_names(path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


class NamePool:
    """First-name lists per gender plus per-cluster gender counters.

    Counter updates are guarded by a lock so one pool can be shared by
    concurrent jobs.
    """

    def __init__(self, female: list[str], male: list[str]):
        if not female or not male:
            raise EmptyPool("both name pools must be non-empty")
        self.names = {"female": list(female), "male": list(male)}
        self.counters: dict[int, dict[str, int]] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_files(cls, female: str | Path | None = None, male: str | Path | None = None) -> NamePool:
        """Load one-name-per-line UTF-8 files; bundled lists when omitted."""
        data = resources.files("resumegen") / "data"
        f = _read_names(Path(female) if female else data / "names_female.txt")
        m = _read_names(Path(male) if male else data / "names_male.txt")
        return cls(f, m)

    def imbalance(self, cluster_id: int) -> int:
        c = self.counters.get(cluster_id, {"female": 0, "male": 0})
        return c["female"] - c["male"]


def assign_name(pool: NamePool, cluster_id: int, rng: Rng) -> tuple[str, str]:
    """Pick the gender that keeps the cluster balanced (a coin flip when it
    already is), then a name uniformly from that gender's pool."""
    with pool._lock:
        counts = pool.counters.setdefault(cluster_id, {"female": 0, "male": 0})
        diff = counts["female"] - counts["male"]
        if diff > 0:
            gender = "male"
        elif diff < 0:
            gender = "female"
        else:
            gender = GENDERS[rng.randbelow(2)]
        counts[gender] += 1
    return rng.choice(pool.names[gender]), gender


@dataclass(frozen=True)
class Perturbation:
    removed_skills: tuple[str, ...]
    last_experience_reduction_years: int
    last_experience_new_duration: int
    last_experience_dropped: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["removed_skills"] = list(self.removed_skills)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> Perturbation:
        return cls(
            tuple(d["removed_skills"]),
            d["last_experience_reduction_years"],
            d["last_experience_new_duration"],
            d["last_experience_dropped"],
        )


def max_removable(n_skills: int) -> int:
    return min(MAX_REMOVED_SKILLS, n_skills - 1)


def perturb(spec: TripleSpec, rng: Rng) -> Perturbation:
    """Remove 1..min(5, n-1) skills and shorten the last experience.

    The removal count is drawn first, then the removed set; removed skills keep
    the order they have in the TripleSpec.
    """
    n = len(spec.skills)
    if n < 2:
        raise TooFewSkills(f"{spec.id}: perturbation needs at least 2 skills, got {n}")
    k = rng.randint(1, max_removable(n))
    picked = set(rng.sample(range(n), k))
    removed = tuple(s for i, s in enumerate(spec.skills) if i in picked)
    d_last = spec.experiences[-1].duration_years
    reduction = rng.randint(1, d_last)
    new = d_last - reduction
    return Perturbation(removed, reduction, new, new == 0)


def is_maximal(p: Perturbation, n_skills: int) -> bool:
    """Whether a perturbation removed as many skills as the bound allows."""
    return len(p.removed_skills) == max_removable(n_skills)


def modification_items(spec: TripleSpec, p: Perturbation) -> list[str]:
    last = spec.experiences[-1].title
    items = [f"removed skill: {s}" for s in p.removed_skills]
    if p.last_experience_dropped:
        items.append(f"last experience '{last}' removed")
    else:
        items.append(f"last experience '{last}' reduced by {p.last_experience_reduction_years} year(s)")
    return items


@dataclass(frozen=True)
class AnnotationRecord:
    skills: tuple[str, ...]
    experiences: tuple[ExperienceSpan, ...]
    perturbation: Perturbation
    candidate_name: str
    candidate_gender: str
    explanation_positive: tuple[str, ...]
    explanation_negative: tuple[str, ...]

    @property
    def unmatched_skills(self) -> tuple[str, ...]:
        removed = set(self.perturbation.removed_skills)
        return tuple(s for s in self.skills if s not in removed)

    @property
    def unmatched_experiences(self) -> tuple[ExperienceSpan, ...]:
        """Experiences as they appear on the unmatched resume.

        A shortened last experience keeps its end year and starts later; a
        zero-length one is left out.
        """
        *earlier, last = self.experiences
        p = self.perturbation
        if p.last_experience_dropped:
            return tuple(earlier)
        new = p.last_experience_new_duration
        shortened = ExperienceSpan(last.occupation_id, last.title, last.end_year - new, last.end_year, new)
        return (*earlier, shortened)

    def to_dict(self) -> dict:
        return {
            "skills": list(self.skills),
            "experiences": [asdict(e) for e in self.experiences],
            "perturbation": self.perturbation.to_dict(),
            "candidate_name": self.candidate_name,
            "candidate_gender": self.candidate_gender,
            "explanation_positive": list(self.explanation_positive),
            "explanation_negative": list(self.explanation_negative),
        }

    @classmethod
    def from_dict(cls, d: dict) -> AnnotationRecord:
        return cls(
            skills=tuple(d["skills"]),
            experiences=tuple(ExperienceSpan(**e) for e in d["experiences"]),
            perturbation=Perturbation.from_dict(d["perturbation"]),
            candidate_name=d["candidate_name"],
            candidate_gender=d["candidate_gender"],
            explanation_positive=tuple(d["explanation_positive"]),
            explanation_negative=tuple(d["explanation_negative"]),
        )


def build_annotation(spec: TripleSpec, perturbation: Perturbation, name: str, gender: str) -> AnnotationRecord:
    if gender not in GENDERS:
        raise ValueError(f"unknown gender {gender!r}")
    if not set(perturbation.removed_skills) <= set(spec.skills):
        raise ValueError("removed skills must come from the planned skills")
    positive = tuple(spec.skills) + tuple(e.title for e in spec.experiences)
    return AnnotationRecord(
        skills=tuple(spec.skills),
        experiences=tuple(spec.experiences),
        perturbation=perturbation,
        candidate_name=name,
        candidate_gender=gender,
        explanation_positive=positive,
        explanation_negative=tuple(modification_items(spec, perturbation)),
    )

"""Per-task supervised records, train/test/dev splits and corpus statistics."""

from __future__ import annotations

import json
import logging
import re
import statistics
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .annotation import is_maximal
from .errors import DataError
from .rendering.triple import Triple, removed_skills_present
from .rng import Rng

logger = logging.getLogger(__name__)

TASKS = ("matching", "explanation", "extraction", "editing")
SPLITS = ("train", "test", "dev")
PAPER_SPLIT_SIZES = (50000, 1000, 1000)
CATEGORIES = ("tech", "social-product-finance", "manual-labor", "healthcare", "administrative")
UNCATEGORIZED = "uncategorized"


class InsufficientTriples(DataError):
    kind = "insufficient-triples"


@dataclass
class TaskRecord:
    id: str
    task: str
    triple_id: str
    input: dict
    target: dict
    polarity: str | None = None
    split: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> TaskRecord:
        return cls(**d)


@dataclass
class ExportResult:
    records: list[TaskRecord]
    skipped: int = 0
    skipped_ids: list[str] = field(default_factory=list)


def _pair(triple: Triple, resume_key: str) -> dict:
    return {
        "job_description": triple.job_description.text(),
        "resume": triple.documents()[resume_key].text(),
    }


def _matching(t: Triple, explain: bool) -> list[TaskRecord]:
    task = "explanation" if explain else "matching"
    out = []
    for polarity, key, label, expl in (
        ("positive", "resume-matched", 1, t.annotation.explanation_positive),
        ("negative", "resume-unmatched", 0, t.annotation.explanation_negative),
    ):
        target: dict = {"label": label}
        if explain:
            target["explanation"] = list(expl)
        out.append(TaskRecord(f"{t.id}:{task}:{polarity}", task, t.id, _pair(t, key), target, polarity))
    return out


def _extraction(t: Triple) -> list[TaskRecord]:
    ann = t.annotation
    gold = {
        "job-description": (ann.skills, [e.title for e in ann.experiences]),
        "resume-matched": (ann.skills, [e.title for e in ann.experiences]),
        "resume-unmatched": (ann.unmatched_skills, [e.title for e in ann.unmatched_experiences]),
    }
    out = []
    for kind, doc in t.documents().items():
        skills, titles = gold[kind]
        for fld, items in (("skills", skills), ("experiences", titles)):
            out.append(
                TaskRecord(
                    f"{t.id}:extraction:{kind}:{fld}",
                    "extraction",
                    t.id,
                    {"document": doc.text(), "document_kind": kind, "field": fld},
                    {"items": list(items)},
                )
            )
    return out


def _editing(t: Triple) -> list[TaskRecord]:
    return [
        TaskRecord(
            f"{t.id}:editing",
            "editing",
            t.id,
            {
                "resume": t.resume_unmatched.text(),
                "modifications": "\n".join(t.annotation.explanation_negative),
            },
            {
                "skills": t.resume_matched["Skills"],
                "experience": t.resume_matched["Experience"],
            },
        )
    ]


def _noisy_matching(triples: Sequence[Triple], seed: int, negative_ratio: int) -> list[TaskRecord]:
    """One positive per triple (the unmatched resume when its perturbation is
    maximal, else the matched one) plus ``negative_ratio`` random cross-triple
    pairs per positive."""
    if len(triples) < 2:
        raise InsufficientTriples("noise mode needs at least two triples for cross pairs")
    rng = Rng.derived(seed, "noise-negatives")
    out = []
    for i, t in enumerate(triples):
        maximal = is_maximal(t.annotation.perturbation, len(t.annotation.skills))
        key = "resume-unmatched" if maximal else "resume-matched"
        out.append(
            TaskRecord(f"{t.id}:matching:positive", "matching", t.id, _pair(t, key), {"label": 1}, "positive")
        )
        for r in range(negative_ratio):
            j = rng.randbelow(len(triples) - 1)
            j += j >= i
            other = triples[j]
            out.append(
                TaskRecord(
                    f"{t.id}:matching:negative-{r}",
                    "matching",
                    t.id,
                    {"job_description": t.job_description.text(), "resume": other.resume_matched.text()},
                    {"label": 0, "resume_from": other.id},
                    "negative",
                )
            )
    return out


def export_task(
    triples: Iterable[Triple],
    task: str,
    noise: bool = False,
    seed: int = 0,
    negative_ratio: int = 1,
) -> ExportResult:
    """Records for one task.  Triples whose unmatched resume still lists a
    removed skill are skipped and counted."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if noise and task != "matching":
        raise ValueError("noise mode only applies to the matching task")
    valid, skipped = [], []
    for t in triples:
        if removed_skills_present(t):
            skipped.append(t.id)
        else:
            valid.append(t)
    if skipped:
        logger.warning("skipped %d triple(s) failing integrity checks", len(skipped))

    if noise:
        records = _noisy_matching(valid, seed, negative_ratio)
    else:
        build = {
            "matching": lambda t: _matching(t, explain=False),
            "explanation": lambda t: _matching(t, explain=True),
            "extraction": _extraction,
            "editing": _editing,
        }[task]
        records = [r for t in valid for r in build(t)]
    return ExportResult(records, len(skipped), skipped)


# ------------------------------------------------------------------- splits


def scaled_split_sizes(n_triples: int, ratio: Sequence[int] = PAPER_SPLIT_SIZES) -> tuple[int, int, int]:
    """Split sizes keeping the train:test:dev ratio, using every triple.

    Test and dev get ``round(n * share)`` triples (at least one each when there
    is room), train takes the remainder.
    """
    total = sum(ratio)
    if n_triples < 3:
        raise InsufficientTriples(f"need at least 3 triples to split, got {n_triples}")
    test = max(1, round(n_triples * ratio[1] / total))
    dev = max(1, round(n_triples * ratio[2] / total))
    return n_triples - test - dev, test, dev


def assign_splits(triple_ids: Iterable[str], sizes: Sequence[int], seed: int) -> dict[str, str]:
    """Seeded shuffle of the sorted id set; the first ``sizes[0]`` ids go to
    train, the next ``sizes[1]`` to test, then ``sizes[2]`` to dev.  Extra
    triples are left unassigned."""
    ids = sorted(set(triple_ids))
    if len(ids) < sum(sizes):
        raise InsufficientTriples(f"{len(ids)} triples cannot fill splits of sizes {tuple(sizes)}")
    Rng.derived(seed, "split").shuffle(ids)
    out: dict[str, str] = {}
    pos = 0
    for name, size in zip(SPLITS, sizes):
        for tid in ids[pos : pos + size]:
            out[tid] = name
        pos += size
    if pos < len(ids):
        logger.warning("%d triple(s) not assigned to any split", len(ids) - pos)
    return out


def split(records: Iterable[TaskRecord], assignment: Mapping[str, str]) -> dict[str, list[TaskRecord]]:
    """Tag records with their triple's split; records of unassigned triples are dropped."""
    out: dict[str, list[TaskRecord]] = {s: [] for s in SPLITS}
    for r in records:
        name = assignment.get(r.triple_id)
        if name is not None:
            r.split = name
            out[name].append(r)
    return out


# -------------------------------------------------------------- statistics


@dataclass(frozen=True)
class CategoryMap:
    clusters: dict[int, str]
    keywords: dict[str, list[str]]
    default: str = UNCATEGORIZED

    @classmethod
    def load(cls, path: str | Path | None = None) -> CategoryMap:
        if path is None:
            text = (resources.files("resumegen") / "data" / "categories.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        doc = json.loads(text)
        clusters = {int(k): v for k, v in doc.get("clusters", {}).items()}
        return cls(clusters, dict(doc.get("keywords", {})), doc.get("default", UNCATEGORIZED))

    def categorize(self, cluster_id: int, title: str) -> str:
        if cluster_id in self.clusters:
            return self.clusters[cluster_id]
        low = title.lower()
        for category, words in self.keywords.items():
            if any(re.search(rf"\b{re.escape(w.strip().lower())}", low) for w in words):
                return category
        return self.default


def word_count(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class DocStats:
    count: int
    mean_words: float
    min_words: int
    max_words: int


@dataclass(frozen=True)
class CorpusStats:
    triples: int
    documents: dict[str, DocStats]
    mean_skills: float
    mean_experiences: float
    mean_removed_skills: float
    categories: dict[str, int]
    category_details: dict[str, dict[str, float]]

    def to_dict(self) -> dict:
        return asdict(self)


DOC_LABELS = {"job-description": "JD", "resume-matched": "R-M", "resume-unmatched": "R-U"}


def compute_corpus_stats(triples: Sequence[Triple], category_map: CategoryMap | None = None) -> CorpusStats:
    if not triples:
        raise DataError("no triples to summarize")
    category_map = category_map or CategoryMap.load()
    words: dict[str, list[int]] = {k: [] for k in DOC_LABELS}
    per_cat: dict[str, dict[str, list[int]]] = {}
    unmapped = 0
    for t in triples:
        for kind, doc in t.documents().items():
            words[kind].append(word_count(doc.text()))
        cat = category_map.categorize(t.spec.cluster_id, t.spec.job_title)
        unmapped += cat == UNCATEGORIZED
        slot = per_cat.setdefault(cat, {"skills": [], "jd_words": [], "resume_words": []})
        slot["skills"].append(len(t.annotation.skills))
        slot["jd_words"].append(words["job-description"][-1])
        slot["resume_words"].append(words["resume-matched"][-1])
    if unmapped:
        logger.warning("%d triple(s) fell outside the category map", unmapped)

    docs = {
        kind: DocStats(len(v), statistics.fmean(v), min(v), max(v)) for kind, v in words.items()
    }
    order = [c for c in CATEGORIES if c in per_cat] + sorted(c for c in per_cat if c not in CATEGORIES)
    return CorpusStats(
        triples=len(triples),
        documents=docs,
        mean_skills=statistics.fmean(len(t.annotation.skills) for t in triples),
        mean_experiences=statistics.fmean(len(t.annotation.experiences) for t in triples),
        mean_removed_skills=statistics.fmean(len(t.annotation.perturbation.removed_skills) for t in triples),
        categories={c: len(per_cat[c]["skills"]) for c in order},
        category_details={
            c: {
                "triples": len(per_cat[c]["skills"]),
                "mean_skills": statistics.fmean(per_cat[c]["skills"]),
                "mean_jd_words": statistics.fmean(per_cat[c]["jd_words"]),
                "mean_resume_words": statistics.fmean(per_cat[c]["resume_words"]),
            }
            for c in order
        },
    )


def _count_label(n: int) -> str:
    return f"{n / 1000:.0f}K" if n >= 10000 else str(n)


def document_table(stats: CorpusStats) -> str:
    """Rows JD / R-M / R-U; columns #Doc, Avg #W, Min #W, Max #W."""
    lines = [f"{'':<5}{'#Doc':>8}{'Avg #W':>9}{'Min #W':>9}{'Max #W':>9}"]
    for kind, label in DOC_LABELS.items():
        d = stats.documents[kind]
        lines.append(f"{label:<5}{_count_label(d.count):>8}{d.mean_words:>9.1f}{d.min_words:>9}{d.max_words:>9}")
    return "\n".join(lines) + "\n"


def annotation_table(stats: CorpusStats) -> str:
    """Rows Sampled / Removed; columns Avg #Skills, Avg #Exp."""
    return (
        f"{'':<9}{'Avg #Skills':>13}{'Avg #Exp':>10}\n"
        f"{'Sampled':<9}{stats.mean_skills:>13.2f}{stats.mean_experiences:>10.2f}\n"
        f"{'Removed':<9}{stats.mean_removed_skills:>13.1f}{'-':>10}\n"
    )


def category_table(stats: CorpusStats) -> str:
    lines = [f"{'Category':<24}{'#Triples':>9}{'Share':>8}{'Avg #Skills':>13}{'Avg #W JD':>11}{'Avg #W R':>10}"]
    for cat, d in stats.category_details.items():
        share = d["triples"] / stats.triples
        lines.append(
            f"{cat:<24}{d['triples']:>9}{share:>8.1%}{d['mean_skills']:>13.2f}"
            f"{d['mean_jd_words']:>11.1f}{d['mean_resume_words']:>10.1f}"
        )
    return "\n".join(lines) + "\n"

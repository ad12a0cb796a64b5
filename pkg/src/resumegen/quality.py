"""LLM-as-judge scoring of generated documents for consistency and factuality."""

from __future__ import annotations

import re
import statistics
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass

from .errors import DataError

CRITERIA = ("consistency", "factuality")
KINDS = ("job-description", "resume")

_CONSISTENCY = """# Instruction:
As a hiring manager, your task is to evaluate job descriptions on a scale of 1-5. This scale represents the consistency of the job description, with 1 being completely inconsistent and 5 being fully consistent. Your evaluation should consider the alignment of job responsibilities, required skills, qualifications, and the overall tone of the job description, as well as the consistency between different sections of the job description. Please ensure you fully understand these instructions before proceeding.

# Evaluation Criteria:
1. Completely Inconsistent: The job responsibilities, required skills, qualifications, and overall tone of the job description are not aligned. The description is confusing and does not provide a clear understanding of the job. Additionally, there are significant inconsistencies between different sections of the job description, making it confusing and unclear.
2. Mostly Inconsistent: There are some elements of the job description that align, but there are significant inconsistencies between different sections that make the description unclear.
3. Somewhat Consistent: The job description has a fair amount of alignment between the responsibilities, skills, and qualifications, as well as between different sections, but there are areas that could be improved for clarity.
4. Mostly Consistent: The job description is mostly aligned, both within sections and between different sections, with only minor inconsistencies. The description provides a clear understanding of the job.
5. Fully Consistent: The job responsibilities, required skills, qualifications, and overall tone of the job description are perfectly aligned. Additionally, there is a high level of consistency between different sections, resulting in a clear and comprehensive understanding of the job.

# Evaluation Steps:
1. Carefully read the entire job description, focusing on the alignment between the job responsibilities, required skills, qualifications, and the overall tone of the description.
2. Evaluate the overall consistency of the job description based on the provided criteria.
3. Assign a consistency score ranging from 1 to 5, using the Evaluation Criteria as a guide.
"""

_FACTUALITY = """# Instruction:
As a hiring manager, your task is to evaluate job descriptions on a scale of 1-5. This scale represents the factuality of the job description, with 1 being completely false and 5 being completely true. Your evaluation should consider the accuracy of the job responsibilities, required skills, qualifications, and the overall representation of the job role. Please ensure you fully understand these instructions before proceeding.

# Evaluation Criteria:
1. Completely False: The job description does not match the job title at all. The responsibilities, required skills, and qualifications are misleading or incorrect.
2. Mostly False: The job description has some elements of truth but contains significant inaccuracies or exaggerations in the responsibilities, required skills, or qualifications.
3. Somewhat True: The job description is partially accurate. Some responsibilities, required skills, or qualifications may be overstated or understated.
4. Mostly True: The job description is largely accurate, with minor discrepancies in the responsibilities, required skills, or qualifications.
5. Completely True: The job description accurately represents the job title, responsibilities, required skills, and qualifications without any exaggeration or understatement.

# Evaluation Steps:
1. Carefully read the entire job description, focusing on the job title, responsibilities, required skills, and qualifications.
2. Evaluate the overall factuality of the job description based on the provided criteria.
3. Assign a factuality score ranging from 1 to 5, using the Evaluation Criteria as a guide.
"""

_INPUTS = """
# Required Skills:
{skills}

# Required Experience:
{experience}

# Job Description:
{document}

# Evaluation Form (scores ONLY):"""

_TEMPLATES = {"consistency": _CONSISTENCY, "factuality": _FACTUALITY}


class UnparseableScore(DataError):
    kind = "unparseable-score"


def _for_resumes(text: str) -> str:
    for old, new in (("job descriptions", "resumes"), ("job description", "resume"), ("Job Description", "Resume")):
        text = text.replace(old, new)
    return text


def build_geval_prompt(
    criterion: str,
    skills: Sequence[str] | str,
    experience: Sequence[str] | str,
    document: str,
    kind: str = "job-description",
) -> str:
    """Judge prompt for one document.  Resume prompts use the same wording
    with "job description" swapped for "resume"."""
    if criterion not in _TEMPLATES:
        raise ValueError(f"unknown criterion {criterion!r}")
    if kind not in KINDS:
        raise ValueError(f"unknown document kind {kind!r}")
    if not document.strip():
        raise ValueError("document must be non-empty")
    skills = skills if isinstance(skills, str) else ", ".join(skills)
    experience = experience if isinstance(experience, str) else ", ".join(experience)
    frame = _TEMPLATES[criterion] + _INPUTS
    if kind == "resume":
        frame = _for_resumes(frame)
    # substitute in one pass so braces inside the document are left alone
    values = {"skills": skills, "experience": experience, "document": document}
    return re.sub(r"\{(skills|experience|document)\}", lambda m: values[m.group(1)], frame)


_SCORE = re.compile(r"(?<![\d.])(\d+)(?!\.?\d)")


def parse_score(reply: str) -> int:
    """First standalone integer in 1..5 (``"Score: 5"`` -> 5, ``"4.5"`` rejected)."""
    for m in _SCORE.finditer(reply):
        value = int(m.group(1))
        if 1 <= value <= 5:
            return value
    raise UnparseableScore(f"no score in 1-5 found in {reply[:80]!r}")


@dataclass(frozen=True)
class QualityScore:
    criterion: str
    score: int
    document_id: str
    judge_model: str
    kind: str = "job-description"

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not 1 <= self.score <= 5:
            raise ValueError(f"score {self.score} outside [1, 5]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScoreSummary:
    count: int
    mean: float
    std: float


def aggregate_scores(scores: Iterable[QualityScore], by_kind: bool = False) -> dict:
    """Mean and population standard deviation per criterion (or per
    ``(kind, criterion)`` when ``by_kind``)."""
    groups: dict = {}
    for s in scores:
        key = (s.kind, s.criterion) if by_kind else s.criterion
        groups.setdefault(key, []).append(s.score)
    if not groups:
        raise DataError("no scores to aggregate")
    return {
        key: ScoreSummary(len(v), statistics.fmean(v), statistics.pstdev(v))
        for key, v in sorted(groups.items())
    }


def score_table(summary: dict) -> str:
    """Aligned text table: one row per document kind, one column pair per criterion."""
    kinds = sorted({k[0] for k in summary})
    head = f"{'':<16}" + "".join(f"{c.capitalize():>20}" for c in CRITERIA)
    lines = [head]
    for kind in kinds:
        cells = []
        for c in CRITERIA:
            s = summary.get((kind, c))
            cells.append(f"{s.mean:.2f} ± {s.std:.2f} (n={s.count})" if s else "-")
        lines.append(f"{kind:<16}" + "".join(f"{cell:>20}" for cell in cells))
    return "\n".join(lines) + "\n"

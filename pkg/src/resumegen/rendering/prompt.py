"""The whole-document generation prompt (one request yields all three documents)."""

from __future__ import annotations

from dataclasses import dataclass

from ..annotation import AnnotationRecord
from ..sampling import ExperienceSpan, TripleSpec

_INSTRUCTION = (
    'Write a job description for a "{job_title}" job which require only skill set of '
    '"{skills}" and only previous job experience of "{jd_experience}" and a matching '
    'resume for a candidate with the name of "{first_name}" and having only skill set of '
    '"{skills}" and only previous job experience of "{resume_experience}". Then generate '
    "exactly the same resume (keeping everything the same) but excluding skill set of "
    '"{removed_skills}" and "{modification}". Don\'t include any extra skills and '
    "experience. But generate extra details about provided skills and job experience. The "
    "job description should only contain Job Title, Job Summary, Required Skills, and "
    "Responsibilities sections (only include few responsibilities). Resumes should only "
    "contain Personal Information (containing the provided first name and a matching "
    "generated last name and email), Education, Skills, and Experience sections.\n"
    "The generated output should exactly be according the following structure:\n"
)

_STRUCTURE = """
###### Job-description

## Job title
.....
## Job Summary
.....
## Required Skills
.....
## Required Experience
.....
## Responsibilities
.....

###### Resume 1

## Personal Information
.....
## Education
.....
## Skills
.....
## Experience
.....

###### Resume 2

## Personal Information
.....
## Education
.....
## Skills
.....
## Experience
.....

output:"""

STRUCTURE_REMINDER = (
    "\n\nFollow the structure exactly: the three ###### blocks in the order shown, "
    "each with exactly the listed ## sections."
)


@dataclass(frozen=True)
class GenerationPrompt:
    text: str


def span_text(e: ExperienceSpan) -> str:
    return f"{e.title} ({e.start_year}–{e.end_year})"


def jd_experience_text(title: str, years: int) -> str:
    return f"{title} ({years} years)"


def modification_phrase(annotation: AnnotationRecord) -> str:
    last = annotation.experiences[-1]
    p = annotation.perturbation
    if p.last_experience_dropped:
        return f"removing the last experience '{last.title}'"
    new = annotation.unmatched_experiences[-1]
    return (
        f"changing the last experience '{last.title}' from "
        f"{last.start_year}–{last.end_year} to {new.start_year}–{new.end_year}"
    )


def build_generation_prompt(spec: TripleSpec, annotation: AnnotationRecord) -> GenerationPrompt:
    text = _INSTRUCTION.format(
        job_title=spec.job_title,
        skills=", ".join(spec.skills),
        jd_experience=", ".join(
            jd_experience_text(e.title, y) for e, y in zip(spec.experiences, spec.jd_experience_years)
        ),
        first_name=spec.candidate_first_name,
        resume_experience=", ".join(span_text(e) for e in spec.experiences),
        removed_skills=", ".join(annotation.perturbation.removed_skills),
        modification=modification_phrase(annotation),
    )
    return GenerationPrompt(text + _STRUCTURE)

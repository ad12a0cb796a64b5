"""Deterministic offline renderer producing generation-shaped documents."""

from __future__ import annotations

import hashlib

from ..annotation import AnnotationRecord
from ..sampling import ExperienceSpan, TripleSpec
from .documents import ParsedDocument

SUMMARIES = (
    "We are looking for a {title} to join our team. The ideal candidate brings hands-on "
    "experience with {skill} and a commitment to high quality work.",
    "Our organization is hiring a {title}. You will apply your strength in {skill} to "
    "support daily operations and long-term goals.",
    "As a {title}, you will work closely with colleagues across the organization and rely "
    "on {skill} to deliver reliable results.",
    "We seek a motivated {title} who can put {skill} to work in a fast-paced environment "
    "and help the team grow.",
)
RESPONSIBILITIES = (
    ("Perform the core duties of a {title} with accuracy and care.",
     "Apply {skill} to solve problems as they arise.",
     "Collaborate with team members and report progress regularly."),
    ("Plan and carry out day-to-day {title} activities.",
     "Use {skill} to maintain quality standards.",
     "Document work and share knowledge with the team."),
    ("Own assigned tasks from start to finish as a {title}.",
     "Keep {skill} up to date and apply it in daily work.",
     "Communicate clearly with supervisors and stakeholders."),
)
EDUCATION = (
    "Bachelor's degree in a field related to {title} work",
    "Associate degree with coursework relevant to {title} duties",
    "Professional certificate program related to {title} practice",
    "Bachelor of Science with a focus relevant to the {title} role",
)
LAST_NAMES = (
    "Adams", "Ahmed", "Alvarez", "Banda", "Brown", "Chen", "Cohen", "Diaz", "Evans",
    "Garcia", "Gupta", "Hansen", "Ibrahim", "Ito", "Johnson", "Kim", "Kowalski", "Lee",
    "Lopez", "Martin", "Mensah", "Murphy", "Nguyen", "Novak", "Okafor", "Patel", "Perez",
    "Rossi", "Santos", "Schmidt", "Silva", "Singh", "Smith", "Tanaka", "Taylor", "Walker",
    "Williams", "Wong", "Yilmaz", "Zhang",
)


def _pick(options, *keys: object):
    digest = hashlib.sha256("\x1f".join(str(k) for k in keys).encode("utf-8")).digest()
    return options[int.from_bytes(digest[:8], "big") % len(options)]


def _bullets(items) -> str:
    return "\n".join(f"- {s}" for s in items)


NO_EXPERIENCE = "No prior professional experience listed."


def _experience_lines(spans: tuple[ExperienceSpan, ...]) -> str:
    if not spans:
        return NO_EXPERIENCE
    return "\n".join(f"{e.title} ({e.start_year}–{e.end_year})" for e in spans)


def render_documents(spec: TripleSpec, annotation: AnnotationRecord) -> tuple[ParsedDocument, ParsedDocument, ParsedDocument]:
    title = spec.job_title
    lead_skill = spec.skills[0]
    jd = ParsedDocument.build(
        "job-description",
        {
            "Job title": title,
            "Job Summary": _pick(SUMMARIES, "summary", title).format(title=title, skill=lead_skill),
            "Required Skills": _bullets(spec.skills),
            "Required Experience": "\n".join(
                f"{y}+ years as {e.title}" for e, y in zip(spec.experiences, spec.jd_experience_years)
            ),
            "Responsibilities": _bullets(
                line.format(title=title, skill=lead_skill) for line in _pick(RESPONSIBILITIES, "resp", title)
            ),
        },
    )

    first = annotation.candidate_name
    last = _pick(LAST_NAMES, "last-name", spec.seed)
    handle = ".".join("".join(ch for ch in part.lower() if ch.isalnum()) for part in (first, last))
    personal = f"Name: {first} {last}\nEmail: {handle}@example.com"
    education = _pick(EDUCATION, "education", title).format(title=title)

    def resume(skills, spans) -> ParsedDocument:
        return ParsedDocument.build(
            "resume",
            {
                "Personal Information": personal,
                "Education": education,
                "Skills": _bullets(skills),
                "Experience": _experience_lines(spans),
            },
        )

    matched = resume(annotation.skills, annotation.experiences)
    unmatched = resume(annotation.unmatched_skills, annotation.unmatched_experiences)
    return jd, matched, unmatched

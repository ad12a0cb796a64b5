"""The rendered triple and its integrity checks."""

from __future__ import annotations

from dataclasses import dataclass

from ..annotation import AnnotationRecord
from ..sampling import TripleSpec
from ..textnorm import normalize, phrase_pattern
from .documents import ParsedDocument, render_triple_text
from .template import render_documents


@dataclass(frozen=True)
class Triple:
    id: str
    spec: TripleSpec
    annotation: AnnotationRecord
    job_description: ParsedDocument
    resume_matched: ParsedDocument
    resume_unmatched: ParsedDocument
    renderer: str  # "template" | "endpoint"
    raw_text: str | None = None

    def documents(self) -> dict[str, ParsedDocument]:
        return {
            "job-description": self.job_description,
            "resume-matched": self.resume_matched,
            "resume-unmatched": self.resume_unmatched,
        }

    def text(self) -> str:
        return self.raw_text if self.raw_text is not None else render_triple_text(
            self.job_description, self.resume_matched, self.resume_unmatched
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "renderer": self.renderer,
            "spec": self.spec.to_dict(),
            "annotation": self.annotation.to_dict(),
            "job_description": self.job_description.to_dict(),
            "resume_matched": self.resume_matched.to_dict(),
            "resume_unmatched": self.resume_unmatched.to_dict(),
            "raw_text": self.raw_text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Triple:
        return cls(
            id=d["id"],
            spec=TripleSpec.from_dict(d["spec"]),
            annotation=AnnotationRecord.from_dict(d["annotation"]),
            job_description=ParsedDocument.from_dict(d["job_description"]),
            resume_matched=ParsedDocument.from_dict(d["resume_matched"]),
            resume_unmatched=ParsedDocument.from_dict(d["resume_unmatched"]),
            renderer=d["renderer"],
            raw_text=d.get("raw_text"),
        )


def render_template(spec: TripleSpec, annotation: AnnotationRecord) -> Triple:
    jd, matched, unmatched = render_documents(spec, annotation)
    return Triple(spec.id, spec, annotation, jd, matched, unmatched, "template")


def removed_skills_present(triple: Triple) -> list[str]:
    """Removed skills still mentioned in the unmatched resume's Skills section.

    Mentions of kept skills are blanked out first, so a removed ``Java`` is not
    reported because ``Java Programming`` was kept.
    """
    text = normalize(triple.resume_unmatched["Skills"])
    for kept in sorted(triple.annotation.unmatched_skills, key=len, reverse=True):
        pat = phrase_pattern(kept)
        if pat is not None:
            text = pat.sub("|", text)
    found = []
    for skill in triple.annotation.perturbation.removed_skills:
        pat = phrase_pattern(skill)
        if pat is not None and pat.search(text):
            found.append(skill)
    return found

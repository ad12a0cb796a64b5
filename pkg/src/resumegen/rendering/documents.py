"""Structured documents and the parser for three-block generation output."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DataError

JD_SECTIONS = ("Job title", "Job Summary", "Required Skills", "Required Experience", "Responsibilities")
RESUME_SECTIONS = ("Personal Information", "Education", "Skills", "Experience")
SECTIONS = {"job-description": JD_SECTIONS, "resume": RESUME_SECTIONS}

BLOCKS = (
    ("job-description", "Job-description"),
    ("resume-1", "Resume 1"),
    ("resume-2", "Resume 2"),
)
BLOCK_KIND = {"job-description": "job-description", "resume-1": "resume", "resume-2": "resume"}

_MARKER = re.compile(r"^[ \t]*#{6}(?!#)[ \t]*(.*?)[ \t]*$", re.MULTILINE)
_HEADER = re.compile(r"^[ \t]*##(?!#)[ \t]*(.*?)[ \t]*$", re.MULTILINE)


class ParseError(DataError):
    kind = "parse-error"

    def __init__(self, message: str, block: str | None = None, section: str | None = None):
        super().__init__(message)
        self.block = block
        self.section = section


class MissingBlock(ParseError):
    kind = "missing-block"


class ExtraBlock(ParseError):
    kind = "extra-block"


class MissingSection(ParseError):
    kind = "missing-section"


class EmptySection(ParseError):
    kind = "empty-section"


class ExtraSection(ParseError):
    kind = "extra-section"


@dataclass(frozen=True)
class ParsedDocument:
    kind: str  # "job-description" | "resume"
    sections: tuple[tuple[str, str], ...]

    def __post_init__(self):
        expected = SECTIONS[self.kind]
        if tuple(h for h, _ in self.sections) != expected:
            raise ValueError(f"{self.kind} sections must be exactly {expected}")
        if any(not body.strip() for _, body in self.sections):
            raise ValueError("section bodies must be non-empty")

    def __getitem__(self, header: str) -> str:
        for h, body in self.sections:
            if h == header:
                return body
        raise KeyError(header)

    def text(self) -> str:
        return "\n\n".join(f"## {h}\n{body}" for h, body in self.sections)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sections": {h: b for h, b in self.sections}}

    @classmethod
    def from_dict(cls, d: dict) -> ParsedDocument:
        return cls(d["kind"], tuple(d["sections"].items()))

    @classmethod
    def build(cls, kind: str, bodies: dict[str, str]) -> ParsedDocument:
        return cls(kind, tuple((h, bodies[h]) for h in SECTIONS[kind]))


def render_triple_text(jd: ParsedDocument, matched: ParsedDocument, unmatched: ParsedDocument) -> str:
    parts = []
    for (_, marker), doc in zip(BLOCKS, (jd, matched, unmatched)):
        parts.append(f"###### {marker}\n\n{doc.text()}\n")
    return "\n".join(parts)


def _norm(text: str) -> str:
    text = text.strip().strip("*_").strip()
    text = text.rstrip(":").strip()
    return " ".join(re.sub(r"[-_]", " ", text.lower()).split())


_BLOCK_BY_NORM = {_norm(marker): key for key, marker in BLOCKS}
_SECTION_BY_NORM = {kind: {_norm(h): h for h in hs} for kind, hs in SECTIONS.items()}


def _parse_block(block: str, body: str) -> ParsedDocument:
    kind = BLOCK_KIND[block]
    canon = _SECTION_BY_NORM[kind]
    headers = list(_HEADER.finditer(body))
    found: dict[str, str] = {}
    for i, m in enumerate(headers):
        name = canon.get(_norm(m.group(1)))
        if name is None:
            raise ExtraSection(f"{block}: unexpected section {m.group(1)!r}", block, m.group(1))
        if name in found:
            raise ExtraSection(f"{block}: duplicate section {name!r}", block, name)
        end = headers[i + 1].start() if i + 1 < len(headers) else len(body)
        found[name] = body[m.end() : end].strip()
    for name in SECTIONS[kind]:
        if name not in found:
            raise MissingSection(f"{block}: missing section {name!r}", block, name)
        if not found[name]:
            raise EmptySection(f"{block}: section {name!r} is empty", block, name)
    return ParsedDocument.build(kind, found)


def parse_triple(raw: str) -> tuple[ParsedDocument, ParsedDocument, ParsedDocument]:
    """Split generation output into job description, matched and unmatched resume.

    Block markers are ``######`` lines, section headers ``##`` lines; both are
    matched case-insensitively with whitespace, hyphens and trailing colons
    ignored.  Text before the first marker is ignored.  Raises a
    :class:`ParseError` subclass naming the first problem found.
    """
    markers = list(_MARKER.finditer(raw))
    seen: list[str] = []
    for m in markers:
        key = _BLOCK_BY_NORM.get(_norm(m.group(1)))
        if key is None:
            raise ExtraBlock(f"unexpected block marker {m.group(0).strip()!r}", m.group(1))
        if key in seen:
            raise ExtraBlock(f"block {key!r} appears more than once", key)
        seen.append(key)
    expected = [key for key, _ in BLOCKS]
    for key in expected:
        if key not in seen:
            raise MissingBlock(f"missing block {key!r}", key)
    for pos, (want, got) in enumerate(zip(expected, seen), start=1):
        if want != got:
            raise MissingBlock(f"expected block {want!r} in position {pos}, found {got!r}", want)

    docs = []
    for i, (m, key) in enumerate(zip(markers, seen)):
        end = markers[i + 1].start() if i + 1 < len(markers) else len(raw)
        docs.append(_parse_block(key, raw[m.end() : end]))
    return docs[0], docs[1], docs[2]


def skill_items(section_body: str) -> list[str]:
    """Bullet items of a list-style section, in order."""
    items = []
    for line in section_body.splitlines():
        line = line.strip()
        if line.startswith(("- ", "* ", "• ")):
            items.append(line[2:].strip())
    return items

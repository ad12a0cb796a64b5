"""Prompt construction, template rendering, endpoint access and parsing."""

from .documents import (
    EmptySection,
    ExtraBlock,
    ExtraSection,
    MissingBlock,
    MissingSection,
    ParsedDocument,
    ParseError,
    parse_triple,
    render_triple_text,
)
from .endpoint import EndpointClient, generate_endpoint
from .prompt import GenerationPrompt, build_generation_prompt
from .triple import Triple, removed_skills_present, render_template

__all__ = [
    "EmptySection",
    "EndpointClient",
    "ExtraBlock",
    "ExtraSection",
    "GenerationPrompt",
    "MissingBlock",
    "MissingSection",
    "ParseError",
    "ParsedDocument",
    "Triple",
    "build_generation_prompt",
    "generate_endpoint",
    "parse_triple",
    "removed_skills_present",
    "render_template",
    "render_triple_text",
]

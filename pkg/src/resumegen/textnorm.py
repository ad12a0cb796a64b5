"""Text normalization shared by metrics and integrity checks."""

from __future__ import annotations

import re

_PUNCT = re.compile(r"[^\w\s]|_")


def normalize(text: str) -> str:
    """Lowercase, turn punctuation into spaces, collapse whitespace."""
    return " ".join(_PUNCT.sub(" ", text.lower()).split())


def tokens(text: str) -> list[str]:
    return normalize(text).split()


def phrase_pattern(phrase: str) -> re.Pattern | None:
    """Pattern matching a normalized phrase on token boundaries of normalized text."""
    p = normalize(phrase)
    return re.compile(rf"(?<!\S){re.escape(p)}(?!\S)") if p else None

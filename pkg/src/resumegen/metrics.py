"""Evaluation metrics for matching, explanation, extraction and editing.

All text is normalized the same way (lowercase, punctuation to spaces,
whitespace collapsed) before comparison.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass

from .textnorm import normalize, tokens


class LengthMismatch(ValueError):
    kind = "length-mismatch"


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} predictions vs {len(b)} gold labels")


@dataclass(frozen=True)
class MatchEval:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return asdict(self)


def eval_matching(preds: Sequence[int], golds: Sequence[int]) -> MatchEval:
    """Binary classification scores; undefined precision/recall count as 0."""
    _check_lengths(preds, golds)
    if not golds:
        return MatchEval(0.0, 0.0, 0.0, 0.0)
    tp = fp = fn = correct = 0
    for p, g in zip(preds, golds):
        p, g = int(p), int(g)
        if p not in (0, 1) or g not in (0, 1):
            raise ValueError("matching labels must be 0 or 1")
        correct += p == g
        tp += p == 1 and g == 1
        fp += p == 1 and g == 0
        fn += p == 0 and g == 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return MatchEval(correct / len(golds), precision, recall, _f1(precision, recall))


def explanation_hit_rate(explanations: Sequence[str | Sequence[str]], gold_modifications: Sequence[Sequence[str]]) -> float:
    """Fraction of gold modifications whose normalized text occurs inside the
    normalized explanation of the same record."""
    _check_lengths(explanations, gold_modifications)
    hits = total = 0
    for expl, mods in zip(explanations, gold_modifications):
        text = expl if isinstance(expl, str) else " ".join(expl)
        haystack = normalize(text)
        for mod in mods:
            total += 1
            needle = normalize(mod)
            hits += bool(needle) and needle in haystack
    return hits / total if total else 0.0


@dataclass(frozen=True)
class ExtractionEval:
    accuracy: float
    f1: float

    def to_dict(self) -> dict:
        return asdict(self)


def eval_extraction(pred_sets: Sequence[Iterable[str]], gold_sets: Sequence[Iterable[str]]) -> ExtractionEval:
    """Exact-set accuracy per document and micro F1 over item multisets."""
    _check_lengths(pred_sets, gold_sets)
    if not gold_sets:
        return ExtractionEval(0.0, 0.0)
    exact = tp = n_pred = n_gold = 0
    for pred, gold in zip(pred_sets, gold_sets):
        p = Counter(x for x in map(normalize, pred) if x)
        g = Counter(x for x in map(normalize, gold) if x)
        exact += set(p) == set(g)
        tp += sum((p & g).values())
        n_pred += sum(p.values())
        n_gold += sum(g.values())
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    return ExtractionEval(exact / len(gold_sets), _f1(precision, recall))


def bigrams(text: str) -> list[tuple[str, str]]:
    toks = tokens(text)
    return list(zip(toks, toks[1:]))


def rouge2(candidate: str, reference: str) -> float:
    """Bigram-overlap F1 with clipped counts."""
    c, r = Counter(bigrams(candidate)), Counter(bigrams(reference))
    if not c or not r:
        return 0.0
    overlap = sum((c & r).values())
    return _f1(overlap / sum(c.values()), overlap / sum(r.values()))


def f_add(output: str, reference: str, source: str) -> float:
    """F1 over bigrams added relative to the input.

    With bigram sets O (output), R (reference) and I (input):
    precision = |O∩R \\ I| / |O \\ I|, recall = |O∩R \\ I| / |R \\ I|.
    Set semantics, not clipped counts.
    """
    o, r, i = set(bigrams(output)), set(bigrams(reference)), set(bigrams(source))
    added_out, added_ref = o - i, r - i
    good = len(added_out & added_ref)
    precision = good / len(added_out) if added_out else 0.0
    recall = good / len(added_ref) if added_ref else 0.0
    return _f1(precision, recall)


@dataclass(frozen=True)
class EditEval:
    rouge2_f1: float
    f_add: float

    def to_dict(self) -> dict:
        return asdict(self)


def eval_editing(outputs: Sequence[str], references: Sequence[str], sources: Sequence[str]) -> EditEval:
    _check_lengths(outputs, references)
    _check_lengths(outputs, sources)
    if not outputs:
        return EditEval(0.0, 0.0)
    n = len(outputs)
    r = sum(rouge2(o, ref) for o, ref in zip(outputs, references)) / n
    f = sum(f_add(o, ref, src) for o, ref, src in zip(outputs, references, sources)) / n
    return EditEval(r, f)

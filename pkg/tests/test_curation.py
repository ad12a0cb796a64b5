import math
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from resumegen.curation import (
    CurationPlan,
    EmptyReference,
    EmptySkillList,
    build_skill_generation_prompt,
    match_occupation,
    merge_generated_batch,
    merge_generated_skills,
    parse_generated_skills,
    plan_from_distribution,
    read_plans,
    reference_skill_fallback,
    trigram_cosine,
    write_plans,
)
from resumegen.graph import SkillOccupationGraph, compute_stats
from resumegen.rng import Rng

from factories import build_graph

EMPTY = SkillOccupationGraph([], [], [])


def _reference():
    edges = [("se", f"k{i}") for i in range(7)] + [("nu", f"n{i}") for i in range(4)]
    return build_graph(edges, titles={"se": "Software Engineer", "nu": "Nurse"})


def _cosine_oracle(a, b):
    def grams(t):
        p = "  " + " ".join(t.lower().split()) + "  "
        return [p[i : i + 3] for i in range(len(p) - 2)]

    ca, cb = Counter(grams(a)), Counter(grams(b))
    dot = sum(ca[k] * cb.get(k, 0) for k in ca)
    return dot / math.sqrt(sum(v * v for v in ca.values()) * sum(v * v for v in cb.values()))


def test_exact_title_match_with_any_provider():
    ref = _reference()
    plan = match_occupation("Software Engineer", ref, sim=lambda a, b: 1.0 if a == b else 0.3)
    assert (plan.matched_reference_title, plan.target_skill_count) == ("Software Engineer", 7)
    assert match_occupation("Software Engineer", ref).target_skill_count == 7


def test_trigram_fallback_is_argmax_of_all_pairs():
    rng = random.Random(0)
    words = ["Backend", "Frontend", "Developer", "Engineer", "Nurse", "Data", "Analyst", "Chef", "Senior", "Lead"]
    titles = sorted({" ".join(rng.sample(words, 2)) for _ in range(40)})[:20]
    edges = [(f"o{i}", f"s{i}") for i in range(len(titles))]
    ref = build_graph(edges, titles={f"o{i}": t for i, t in enumerate(titles)})
    scores = {t: _cosine_oracle("Backend Developer", t) for t in titles}
    best = max(scores.values())
    expected = min(t for t, v in scores.items() if abs(v - best) < 1e-12)
    plan = match_occupation("Backend Developer", ref)
    assert plan.matched_reference_title == expected
    assert plan.match_score == pytest.approx(best, abs=1e-12)


@given(st.text(min_size=1, max_size=20), st.text(min_size=1, max_size=20))
def test_trigram_cosine_properties(a, b):
    v = trigram_cosine(a, b)
    assert 0.0 <= v <= 1.0
    assert v == trigram_cosine(b, a)
    if a.strip():
        assert trigram_cosine(a, a) == 1.0


def test_match_ignores_skillless_and_empty_reference():
    ref = build_graph([("a", "s")], titles={"a": "Nurse"}, extra_occupations=["z"])
    assert match_occupation("Title z", ref).matched_reference_title == "Nurse"
    with pytest.raises(EmptyReference):
        match_occupation("Nurse", build_graph([], extra_occupations=["z"]))


def test_many_titles_give_one_plan_each():
    ref = _reference()
    titles = [f"Occupation {i}" for i in range(1112)]
    plans = [match_occupation(t, ref) for t in titles]
    assert len(plans) == 1112
    assert [p.occupation_title for p in plans] == titles


def test_skill_prompt_text():
    plan = CurationPlan("Nurse", None, 0.0, 7)
    assert build_skill_generation_prompt(plan) == (
        "Generate 7 number of required skills necessary for the occupation Nurse."
    )
    assert build_skill_generation_prompt(CurationPlan("X", None, 0.0, 1)) == (
        "Generate 1 number of required skills necessary for the occupation X."
    )


def test_plan_from_distribution_is_seeded_and_clamped():
    a = [plan_from_distribution("T", Rng.derived(1, "c", i)).target_skill_count for i in range(500)]
    b = [plan_from_distribution("T", Rng.derived(1, "c", i)).target_skill_count for i in range(500)]
    assert a == b
    assert min(a) >= 3 and max(a) <= 20
    assert 7.5 < sum(a) / len(a) < 9.5


def test_parse_generated_skills():
    reply = "Here are the skills:\n1. Patient care: looking after people\n2) CPR.\n- cpr\n* **Empathy**"
    assert parse_generated_skills(reply) == ["Patient care", "CPR", "Empathy"]
    assert parse_generated_skills("Python, SQL ,  git") == ["Python", "SQL", "git"]
    assert parse_generated_skills("   ") == []


def test_merge_into_empty_graph():
    g = merge_generated_skills(EMPTY, "Nurse", ["Empathy", "CPR"])
    assert (len(g.occupations), len(g.skills), len(g.edges)) == (1, 2, 2)
    assert next(iter(g.occupations.values())).source == "bls-generated"


def test_merge_reuses_case_insensitive_skill():
    g = merge_generated_skills(EMPTY, "Nurse", ["Empathy", "CPR"])
    g2 = merge_generated_skills(g, "Medic", ["cpr", "Triage"])
    assert len(g2.skills) == 3
    assert len(g2.occupations) == 2
    g3 = merge_generated_skills(g2, "nurse", ["Triage"])
    assert len(g3.occupations) == 2 and len(g3.edges) == 5
    with pytest.raises(EmptySkillList):
        merge_generated_skills(g, "X", [])


def test_merge_degree_recount():
    ref_counts = [3 + (i * 7) % 10 for i in range(1112)]
    g = merge_generated_batch(EMPTY, [(f"Job {i}", [f"skill {i}-{k}" for k in range(n)]) for i, n in enumerate(ref_counts)])
    assert compute_stats(g).avg_skills_per_occupation == pytest.approx(sum(ref_counts) / len(ref_counts), abs=1e-12)


def test_reference_fallback_and_plan_io(tmp_path):
    ref = _reference()
    plan = CurationPlan("Nurse II", "Nurse", 0.8, 3)
    assert reference_skill_fallback(plan, ref) == ["skill n0", "skill n1", "skill n2"]
    with pytest.raises(EmptyReference):
        reference_skill_fallback(CurationPlan("X", None, 0.0, 3), ref)
    path = tmp_path / "plans.jsonl"
    write_plans([plan], path)
    assert read_plans(path) == [plan]


def test_batch_merge_equals_sequential_merges():
    items = [("Nurse", ["Empathy", "CPR"]), ("Medic", ["cpr", "Triage"]), ("nurse", ["Triage"]), ("Nurse!", ["x"])]
    g = EMPTY
    for title, skills in items:
        g = merge_generated_skills(g, title, skills)
    assert merge_generated_batch(EMPTY, items) == g

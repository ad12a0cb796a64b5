import pytest
from hypothesis import given, settings, strategies as st

from resumegen.annotation import Perturbation, build_annotation
from resumegen.rendering import documents as docs
from resumegen.rendering.documents import (
    EmptySection,
    ExtraBlock,
    ExtraSection,
    MissingBlock,
    MissingSection,
    ParsedDocument,
    parse_triple,
    render_triple_text,
    skill_items,
)
from resumegen.rendering.prompt import build_generation_prompt, modification_phrase
from resumegen.rendering.template import NO_EXPERIENCE
from resumegen.rendering.triple import Triple, removed_skills_present, render_template

from factories import annotated, make_spec, template_triples

MARKERS = ("###### Job-description", "###### Resume 1", "###### Resume 2")


def _triple(skills=("a", "b", "c"), removed=("b",), durations=(2, 3), reduction=1):
    spec = make_spec(skills=skills, durations=durations)
    new = durations[-1] - reduction
    ann = build_annotation(spec, Perturbation(tuple(removed), reduction, new, new == 0), "Ada", "female")
    return render_template(spec, ann)


def test_prompt_markers_and_fields():
    spec = make_spec(skills=("Python", "SQL"), titles=["Analyst", "Senior Analyst"])
    ann = annotated(spec)
    text = build_generation_prompt(spec, ann).text
    for m in MARKERS:
        assert text.count(m) == 1
    assert text.startswith('Write a job description for a "Analyst" job which require only skill set of "Python, SQL"')
    assert 'with the name of "Ada"' in text
    assert text.endswith("output:")
    assert "Senior Analyst (2017–2020)" in text
    assert modification_phrase(ann) in text


def test_single_skill_prompt_has_no_separator():
    spec = make_spec(skills=("X", "Y"))
    ann = build_annotation(spec, Perturbation(("Y",), 1, 2, False), "Ada", "female")
    text = build_generation_prompt(spec, ann).text
    assert 'excluding skill set of "Y"' in text
    spec1 = make_spec(skills=("X",))
    ann1 = build_annotation(spec1, Perturbation((), 1, 2, False), "Ada", "female")
    assert 'only skill set of "X" and' in build_generation_prompt(spec1, ann1).text


def test_modification_phrases():
    t = _triple(durations=(2, 3), reduction=1)
    assert modification_phrase(t.annotation) == "changing the last experience 'Job 1' from 2017–2020 to 2018–2020"
    t = _triple(durations=(2, 1), reduction=1)
    assert modification_phrase(t.annotation) == "removing the last experience 'Job 1'"


def test_unmatched_skills_are_set_minus():
    t = _triple()
    assert skill_items(t.resume_unmatched["Skills"]) == ["a", "c"]
    assert skill_items(t.resume_matched["Skills"]) == ["a", "b", "c"]
    assert removed_skills_present(t) == []


def test_dropped_last_experience_placeholder():
    t = _triple(durations=(1,), reduction=1)
    assert t.resume_unmatched["Experience"] == NO_EXPERIENCE


def test_template_is_deterministic():
    spec = make_spec()
    a = render_template(spec, annotated(spec, 3))
    b = render_template(spec, annotated(spec, 3))
    assert a == b and a.text() == b.text()


def test_round_trip_exact():
    for t in template_triples(50, seed=4):
        jd, m, u = parse_triple(t.text())
        assert (jd, m, u) == (t.job_description, t.resume_matched, t.resume_unmatched)
        for (h1, b1), (h2, b2) in zip(jd.sections, t.job_description.sections):
            assert h1 == h2 and b1 == b2


def test_triple_dict_round_trip():
    t = _triple()
    assert Triple.from_dict(t.to_dict()) == t


def test_parse_tolerates_header_variants_and_preamble():
    t = _triple()
    raw = "Sure, here it is.\n\n" + t.text().replace("## Job Summary", "##  job summary:").replace(
        "###### Resume 1", "######resume 1"
    )
    jd, m, _ = parse_triple(raw)
    assert jd["Job Summary"] == t.job_description["Job Summary"]
    assert m == t.resume_matched


def test_missing_section():
    t = _triple()
    text = t.text()
    cut = text.rindex("## Education")
    end = text.index("## Skills", cut)
    with pytest.raises(MissingSection) as exc:
        parse_triple(text[:cut] + text[end:])
    assert (exc.value.kind, exc.value.block, exc.value.section) == ("missing-section", "resume-2", "Education")


def test_block_errors():
    t = _triple()
    text = t.text()
    swapped = text.replace("###### Resume 1", "@@").replace("###### Resume 2", "###### Resume 1").replace("@@", "###### Resume 2")
    with pytest.raises((MissingBlock, ExtraBlock)) as exc:
        parse_triple(swapped)
    assert exc.value.kind in ("missing-block", "extra-block")
    with pytest.raises(MissingBlock):
        parse_triple(text.split("###### Resume 2")[0])
    with pytest.raises(ExtraBlock):
        parse_triple(text + "\n###### Resume 2\n## Skills\nx\n")
    with pytest.raises(ExtraBlock):
        parse_triple(text + "\n###### Cover letter\nhello\n")
    with pytest.raises(MissingBlock):
        parse_triple("no structure at all")


def test_section_errors():
    text = _triple().text()
    with pytest.raises(EmptySection):
        parse_triple(text.replace("## Job title\nJob 0", "## Job title\n   "))
    with pytest.raises(ExtraSection):
        parse_triple(text.replace("## Responsibilities", "## Benefits\nfree coffee\n\n## Responsibilities"))


def test_parsed_document_validation():
    with pytest.raises(ValueError):
        ParsedDocument("resume", (("Skills", "x"),))
    d = ParsedDocument.build("resume", {h: "x" for h in docs.RESUME_SECTIONS})
    assert ParsedDocument.from_dict(d.to_dict()) == d


def test_removed_skill_detection():
    t = _triple(skills=("Java", "Java Programming", "SQL"), removed=("Java",))
    assert removed_skills_present(t) == []
    jd, m, u = t.job_description, t.resume_matched, t.resume_unmatched
    bodies = dict(u.sections)
    bodies["Skills"] += "\n- Java"
    leaked = Triple(t.id, t.spec, t.annotation, jd, m, ParsedDocument.build("resume", bodies), "template")
    assert removed_skills_present(leaked) == ["Java"]


_body = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="#\r"), min_size=1, max_size=40).filter(
    lambda s: s.strip()
)


@settings(max_examples=100, deadline=None)
@given(st.lists(_body, min_size=13, max_size=13))
def test_arbitrary_bodies_round_trip(bodies):
    bodies = [b.strip() for b in bodies]
    jd = ParsedDocument.build("job-description", dict(zip(docs.JD_SECTIONS, bodies[:5])))
    r1 = ParsedDocument.build("resume", dict(zip(docs.RESUME_SECTIONS, bodies[5:9])))
    r2 = ParsedDocument.build("resume", dict(zip(docs.RESUME_SECTIONS, bodies[9:])))
    assert parse_triple(render_triple_text(jd, r1, r2)) == (jd, r1, r2)

"""Tests for the .vif parser, linter, and canonical serializer."""

import pytest
from hypothesis import given, strategies as st

from vif.script import (
    BadDetectorError,
    BadIntegerError,
    ConditionalGoto,
    DetectorSpec,
    EmptyIdError,
    Expect,
    MalformedDirectiveError,
    Paragraph,
    SectionChoice,
    Span,
    TimerGoto,
    errors,
    extract_spans,
    lint_story,
    normalize_section_id,
    parse_directive,
    parse_script,
    serialize_story,
)

from oracles import reachable_sections


# --- normalize_section_id ---------------------------------------------------


def test_normalize_figure_cases():
    assert normalize_section_id("no stress") == "no_stress"
    assert normalize_section_id("start") == "start"
    assert normalize_section_id("  Send  To Bob ") == "send_to_bob"


def test_normalize_empty_raises():
    with pytest.raises(EmptyIdError):
        normalize_section_id("   ")
    with pytest.raises(EmptyIdError):
        normalize_section_id("!!!")


@given(st.text(min_size=1, max_size=40))
def test_normalize_idempotent(raw):
    try:
        once = normalize_section_id(raw)
    except EmptyIdError:
        return
    assert normalize_section_id(once) == once


# --- parse_directive --------------------------------------------------------


def test_directive_timer():
    assert parse_directive("timer:2000 goto:bob_awaits") == TimerGoto(2000, "bob_awaits")


def test_directive_conditional_default_predicate():
    got = parse_directive("bind:2000 goto:stress")
    assert got == ConditionalGoto(2000, "stress", "stressed")


def test_directive_conditional_named_predicate():
    got = parse_directive("bind:500:night goto:wolves")
    assert got == ConditionalGoto(500, "wolves", "night")


def test_directive_expect():
    got = parse_directive("ex:breathVar_3:bits:heart")
    assert got == Expect(DetectorSpec("breathVar", 3), "bits", "heart")


def test_directive_section_choice():
    assert parse_directive("bind:goto:training") == SectionChoice("training")


def test_directive_choice_span():
    got = parse_directive("bind:goto:send_to_bob:yes, please.")
    assert isinstance(got, Span)
    assert got.kind == "choice"
    assert got.text == "yes, please."
    assert got.target == "send_to_bob"


def test_directive_biofeedback_passive():
    got = parse_directive("bind:heart:heartstyle:heartbeat")
    assert got == Span(
        kind="biofeedback", text="heartbeat", signal="heart", style="heartstyle", active=False
    )


def test_directive_biofeedback_active():
    got = parse_directive("bind:breath:breathstyle:ac:breathVar:breaths")
    assert isinstance(got, Span)
    assert got.active and got.detector_var == "breathVar" and got.signal == "breath"
    assert got.text == "breaths"


def test_directive_targets_are_normalized():
    got = parse_directive("timer:10 goto:Bob_Awaits")
    assert got == TimerGoto(10, "bob_awaits")


@pytest.mark.parametrize(
    "raw,err",
    [
        ("goto:x", MalformedDirectiveError),
        ("timer:2000", MalformedDirectiveError),
        ("timer:20x0 goto:y", BadIntegerError),
        ("bind:12ms goto:y", MalformedDirectiveError),
        ("ex:breath:bits:heart", BadDetectorError),
        ("ex:breathVar_0:bits:heart", BadDetectorError),
        ("ex:breathVar_3:bits", MalformedDirectiveError),
        ("bind:onlyone", MalformedDirectiveError),
        ("warp:goto:x", MalformedDirectiveError),
    ],
)
def test_directive_errors(raw, err):
    with pytest.raises(err):
        parse_directive(raw)


# --- extract_spans ----------------------------------------------------------


def kinds_and_texts(spans):
    return [(s.kind, s.text) for s in spans]


def test_spans_emphasis():
    spans, hoisted = extract_spans("He's just /behind/.")
    assert not hoisted
    assert kinds_and_texts(spans) == [("plain", "He's just "), ("emphasis", "behind"), ("plain", ".")]


def test_spans_plain_only():
    spans, hoisted = extract_spans("Howdy, Adventurer!")
    assert not hoisted
    assert kinds_and_texts(spans) == [("plain", "Howdy, Adventurer!")]


def test_spans_two_inline_choices():
    line = "to relax? bind:goto:send_to_bob:yes, please. bind:goto:no_stress:no, it's good."
    spans, hoisted = extract_spans(line)
    assert not hoisted
    assert kinds_and_texts(spans) == [
        ("plain", "to relax? "),
        ("choice", "yes, please."),
        ("plain", " "),
        ("choice", "no, it's good."),
    ]
    assert spans[1].target == "send_to_bob"
    assert spans[3].target == "no_stress"


def test_spans_biofeedback_keeps_trailing_punctuation_plain():
    spans, _ = extract_spans("Now try to feel your bind:heart:heartstyle:heartbeat.")
    assert kinds_and_texts(spans) == [
        ("plain", "Now try to feel your "),
        ("biofeedback", "heartbeat"),
        ("plain", "."),
    ]


def test_spans_unterminated_emphasis_warns():
    diags = []
    spans, _ = extract_spans("a 3/4 slope", diags, lineno=7)
    assert kinds_and_texts(spans) == [("plain", "a 3/4 slope")]
    assert [d.code for d in diags] == ["W010"]
    assert diags[0].severity == "warning" and diags[0].line == 7


def test_spans_inline_directive_is_hoisted_and_plain_merged():
    spans, hoisted = extract_spans("Go timer:5 goto:later now.")
    assert kinds_and_texts(spans) == [("plain", "Go  now.")]
    assert hoisted == [TimerGoto(5, "later")]


def test_spans_malformed_token_stays_plain_with_diagnostic():
    diags = []
    spans, hoisted = extract_spans("oops bind:goto: nothing", diags)
    assert not hoisted
    assert spans[0].kind == "plain"
    assert any(d.severity == "error" for d in diags)


# --- parse_script -----------------------------------------------------------


def test_parse_minimal():
    story, diags = parse_script("#ACTIVATE: a\n* a\nHi.\n")
    assert not diags
    assert story.entry == "a"
    assert story.section_ids() == ["a"]
    assert story.sections[0].speaker == "narrator"
    para = story.sections[0].items[0]
    assert isinstance(para, Paragraph)
    assert kinds_and_texts(para.spans) == [("plain", "Hi.")]


def test_parse_missing_entry_is_error():
    _, diags = parse_script("* a\nHi.")
    assert [d.code for d in errors(diags)] == ["E010"]


def test_parse_body_before_section_is_error():
    _, diags = parse_script("#ACTIVATE: a\nHi.\n* a\nok")
    assert "E011" in [d.code for d in errors(diags)]


def test_parse_duplicates():
    src = "#ACTIVATE: a\n* N @north:#s:#medium:\n* N @south:#s:#small:\n* a\nx\n* a\ny\n"
    _, diags = parse_script(src)
    codes = [d.code for d in errors(diags)]
    assert "E012" in codes and "E013" in codes


def test_parse_figure7(figure7_story):
    story = figure7_story
    assert story.entry == "start"
    assert story.section_ids() == [
        "start",
        "no_stress",
        "stress",
        "send_to_bob",
        "bob_awaits",
        "training",
        "heart",
    ]
    names = [sp.name for sp in story.speakers]
    assert names == ["narrator", "Narrator", "Bob Zen"]
    assert story.speakers[0].builtin
    assert story.speaker("Narrator").position == "north"
    assert story.speaker("Bob Zen").position == "south"
    owners = {sec.id: sec.speaker for sec in story.sections}
    assert owners["start"] == "Narrator"
    assert owners["bob_awaits"] == "Bob Zen"


def test_parse_figure7_directives(figure7_story):
    start = figure7_story.section("start")
    assert start.directives() == [ConditionalGoto(2000, "stress", "stressed")]
    send = figure7_story.section("send_to_bob")
    assert send.directives() == [TimerGoto(2000, "bob_awaits")]
    training = figure7_story.section("training")
    assert training.directives() == [Expect(DetectorSpec("breathVar", 3), "bits", "heart")]
    bob = figure7_story.section("bob_awaits")
    assert bob.directives() == [SectionChoice("training")]


def test_parse_figure7_span_ids_dense_and_stable(figure7_source, figure7_story):
    ids = [sp.span_id for sp in figure7_story.spans()]
    assert ids == [f"s{i}" for i in range(1, len(ids) + 1)]
    again, _ = parse_script(figure7_source)
    assert [sp.span_id for sp in again.spans()] == ids


def test_figure7_choice_spans(figure7_story):
    stress = figure7_story.section("stress")
    choices = [sp for sp in stress.spans() if sp.kind == "choice"]
    assert [(c.text, c.target) for c in choices] == [
        ("yes, please.", "send_to_bob"),
        ("no, it's good.", "no_stress"),
    ]


def test_figure7_detector_bindings(figure7_story):
    assert figure7_story.detector_bindings() == {"breathVar": "breath"}


def test_parse_crlf_and_comments():
    src = "#ACTIVATE: a\r\n# just a comment\r\n* a\r\nHi.\r\n"
    story, diags = parse_script(src)
    assert not diags
    assert story.section_ids() == ["a"]


# --- lint -------------------------------------------------------------------


def story_edges(story):
    from vif.script import _transition_targets

    return {
        sec.id: [t for t, _, _ in _transition_targets(sec)] for sec in story.sections
    }


def test_lint_figure7_clean(figure7_story):
    diags = lint_story(figure7_story)
    assert diags == []


def test_lint_reachability_matches_oracle(figure7_story):
    reachable = reachable_sections(story_edges(figure7_story), figure7_story.entry)
    assert reachable == set(figure7_story.section_ids())  # no_stress via inline choice


def test_lint_detects_single_mutation(figure7_source):
    mutated = figure7_source.replace("goto:stress", "goto:stres")
    story, parse_diags = parse_script(mutated)
    assert not errors(parse_diags)
    diags = lint_story(story)
    e001 = [d for d in diags if d.code == "E001"]
    assert len(e001) == 1
    line_of_directive = figure7_source.splitlines().index("  bind:2000 goto:stress") + 1
    assert e001[0].line == line_of_directive


def test_lint_orphan_section_warns(figure7_source):
    story, _ = parse_script(figure7_source + "* orphan\nNobody comes here.\n")
    diags = lint_story(story)
    w001 = [d for d in diags if d.code == "W001"]
    assert len(w001) == 1
    assert "orphan" in w001[0].message
    oracle = reachable_sections(story_edges(story), story.entry)
    assert set(story.section_ids()) - oracle == {"orphan"}


def test_lint_unknown_signal_warns():
    src = "#ACTIVATE: a\n* a\nYour bind:chakra:glow:aura shimmers.\n"
    story, _ = parse_script(src)
    assert [d.code for d in lint_story(story)] == ["W003"]


def test_lint_expect_declares_signal():
    src = "#ACTIVATE: a\n* a\nex:calmVar_2:bits:b\nYour bind:calmVar:glow:calm grows.\n* b\ndone\n"
    story, _ = parse_script(src)
    assert [d.code for d in lint_story(story)] == []


def test_lint_unused_speaker_warns():
    src = "#ACTIVATE: a\n* a\nHi.\n* Ghost @west:#g:#small:\n"
    story, _ = parse_script(src)
    assert [d.code for d in lint_story(story)] == ["W004"]


def test_lint_empty_choice_label_warns():
    src = "#ACTIVATE: a\n* a\nPick: bind:goto:a: \n"
    story, _ = parse_script(src)
    assert "W002" in [d.code for d in lint_story(story)]


# --- serialization ----------------------------------------------------------


def test_serialize_minimal_exact():
    story, _ = parse_script("#ACTIVATE: a\n* a\nHi.\n")
    assert serialize_story(story) == "#ACTIVATE: a\n* a\nHi.\n"


def test_round_trip_whole_corpus(corpus_dir):
    paths = sorted(corpus_dir.glob("*.vif"))
    assert len(paths) >= 10
    for path in paths:
        source = path.read_text(encoding="utf-8")
        first, diags = parse_script(source, path.name)
        assert not errors(diags), (path.name, diags)
        canonical = serialize_story(first)
        second, diags2 = parse_script(canonical, path.name + ":canonical")
        assert not errors(diags2), (path.name, diags2)
        assert second == first, path.name
        # serialization is a fixed point after one pass
        assert serialize_story(second) == canonical, path.name


# A bounded generator of random-but-valid stories for the round-trip law.
_word = st.text(alphabet="abcdefghij", min_size=1, max_size=6)
_plain = st.text(alphabet="abcdefg ,'!?", min_size=1, max_size=20).filter(
    lambda s: s.strip() and "  " not in s
)


@st.composite
def _story_source(draw):
    n_sections = draw(st.integers(1, 4))
    ids = draw(
        st.lists(_word, min_size=n_sections, max_size=n_sections, unique_by=lambda w: w)
    )
    lines = [f"#ACTIVATE: {ids[0]}"]
    for sid in ids:
        lines.append(f"* {sid}")
        n_items = draw(st.integers(0, 3))
        for _ in range(n_items):
            kind = draw(st.sampled_from(["plain", "emphasis", "choice", "timer", "cond"]))
            target = draw(st.sampled_from(ids))
            if kind == "plain":
                lines.append(draw(_plain))
            elif kind == "emphasis":
                a, b = draw(_plain), draw(_word)
                lines.append(f"{a.strip()} /{b}/ after")
            elif kind == "choice":
                label = draw(_plain).strip()
                lines.append(f"Pick: bind:goto:{target}:{label}.")
            elif kind == "timer":
                lines.append(f"timer:{draw(st.integers(0, 9999))} goto:{target}")
            else:
                lines.append(f"bind:{draw(st.integers(0, 9999))} goto:{target}")
    return "\n".join(lines) + "\n"


@given(_story_source())
def test_round_trip_generated_stories(source):
    first, diags = parse_script(source)
    assert not errors(diags)
    second, diags2 = parse_script(serialize_story(first))
    assert not errors(diags2)
    assert second == first

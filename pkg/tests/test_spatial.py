import pytest

from artext.spatial import (
    elaborate_locations,
    find_measures,
    first_mentions,
    relation_of,
    relation_phrase,
    substitute_measures,
    summarize_context,
)
from artext.types import DetectedObject, SpatialContext, SpatialRelation

from conftest import TS


def obj(label, azimuth=0.0, distance=1.0, confidence=0.9, length=None):
    return DetectedObject(
        label=label,
        azimuth_deg=azimuth,
        distance_m=distance,
        confidence=confidence,
        characteristic_length_m=length,
    )


def ctx(*objects):
    return SpatialContext(objects=tuple(objects), captured_at=TS)


# --- relation_of -------------------------------------------------------

def test_relation_thresholds():
    assert relation_of(-45.0) is SpatialRelation.ON_YOUR_LEFT
    assert relation_of(45.0) is SpatialRelation.ON_YOUR_RIGHT
    assert relation_of(0.0) is SpatialRelation.IN_FRONT_OF_YOU
    # exactly on the cone edge still counts as in front
    assert relation_of(20.0) is SpatialRelation.IN_FRONT_OF_YOU
    assert relation_of(-20.0) is SpatialRelation.IN_FRONT_OF_YOU
    assert relation_of(20.001) is SpatialRelation.ON_YOUR_RIGHT
    assert relation_of(-20.001) is SpatialRelation.ON_YOUR_LEFT


def test_relation_full_sweep_against_bruteforce():
    for az in range(-180, 181):
        if az < -20:
            expected = SpatialRelation.ON_YOUR_LEFT
        elif az > 20:
            expected = SpatialRelation.ON_YOUR_RIGHT
        else:
            expected = SpatialRelation.IN_FRONT_OF_YOU
        assert relation_of(float(az)) is expected, az


# --- first_mentions ----------------------------------------------------

def test_first_mentions_finds_leftmost_whole_words():
    text = "Place the coffee mug with the dripper"
    mentions = first_mentions(text, [obj("dripper"), obj("coffee mug")])
    assert [m.obj.label for m in mentions] == ["coffee mug", "dripper"]
    start, end = mentions[0].start, mentions[0].end
    assert text[start:end] == "coffee mug"
    assert text[mentions[1].start:mentions[1].end] == "dripper"


def test_first_mentions_does_not_match_inside_words():
    assert first_mentions("Wash the mugs first", [obj("mug")]) == []
    mentions = first_mentions("Wash the mug now", [obj("mug")])
    assert len(mentions) == 1


def test_first_mentions_is_case_insensitive():
    mentions = first_mentions("Lift the Coffee Mug carefully", [obj("coffee mug")])
    assert len(mentions) == 1


def test_low_confidence_detections_are_invisible():
    text = "Take the screwdriver"
    assert first_mentions(text, [obj("screwdriver", confidence=0.4)]) == []
    assert elaborate_locations(text, ctx(obj("screwdriver", azimuth=-40, confidence=0.49))) == text


# --- elaborate_locations -----------------------------------------------

def test_elaborate_inserts_direction_after_first_mention():
    out = elaborate_locations(
        "Then place the coffee mug with the dripper",
        ctx(obj("coffee mug", azimuth=45.0)),
    )
    assert out == "Then place the coffee mug on your right with the dripper"


def test_elaborate_handles_multiple_objects():
    out = elaborate_locations(
        "Put the filter in the dripper and the kettle on the stand",
        ctx(obj("dripper", azimuth=-35.0), obj("kettle", azimuth=5.0)),
    )
    assert "dripper on your left" in out
    assert "kettle in front of you" in out


def test_elaborate_is_idempotent():
    context = ctx(obj("coffee mug", azimuth=45.0), obj("dripper", azimuth=-30.0))
    text = "Then place the coffee mug with the dripper"
    once = elaborate_locations(text, context)
    twice = elaborate_locations(once, context)
    assert once == twice


def test_elaborate_only_touches_first_mention():
    out = elaborate_locations(
        "Move the mug. Fill the mug.",
        ctx(obj("mug", azimuth=90.0)),
    )
    assert out == "Move the mug on your right. Fill the mug."


# --- measures ----------------------------------------------------------

def test_find_measures_parses_digits_and_words():
    found = find_measures("Move it seven inches, then 3 cm more")
    assert len(found) == 2
    assert found[0].meters == pytest.approx(7 * 0.0254)
    assert found[1].meters == pytest.approx(0.03)


def test_find_measures_ignores_bare_numbers():
    assert find_measures("Wait 30 seconds and pour 100 g of water") == []


def test_substitute_appends_comparable_object():
    # 7 in = 0.1778 m; 0.18 m is a ratio of 1.012, well within 25%
    out = substitute_measures(
        "Move the gear to seven inches left",
        ctx(obj("screwdriver", length=0.18)),
    )
    assert out == "Move the gear to seven inches left, or the length of a screwdriver"


def test_substitute_lands_before_clause_punctuation():
    out = substitute_measures(
        "Move the gear to seven inches left, then stop.",
        ctx(obj("screwdriver", length=0.18)),
    )
    assert out == "Move the gear to seven inches left, or the length of a screwdriver, then stop."


def test_substitute_skips_out_of_tolerance_objects():
    text = "Move the gear to seven inches left"
    assert substitute_measures(text, ctx(obj("screwdriver", length=0.30))) == text
    assert substitute_measures(text, ctx(obj("pin", length=0.10))) == text


def test_substitute_prefers_nearest_ratio():
    # ratios 1.10 and 1.20 against 0.1 m; the 1.10 object wins
    out = substitute_measures(
        "Slide it 10 cm forward",
        ctx(obj("spoon", length=0.110), obj("stapler", length=0.120)),
    )
    assert "length of a spoon" in out
    assert "stapler" not in out


def test_substitute_uses_an_for_vowel_labels():
    out = substitute_measures(
        "Leave a gap of 30 cm between chairs",
        ctx(obj("A4 paper", length=0.297)),
    )
    assert ", or the length of an A4 paper" in out


def test_substitute_does_not_stack_comparisons():
    context = ctx(obj("screwdriver", length=0.18))
    once = substitute_measures("Move the gear to seven inches left", context)
    twice = substitute_measures(once, context)
    assert once == twice


# --- summaries ---------------------------------------------------------

def test_summary_lists_visible_objects():
    s = summarize_context(
        ctx(obj("coffee mug", azimuth=45.0, distance=1.2), obj("ghost", confidence=0.2))
    )
    assert s == "coffee mug on your right, 1.2 m away"


def test_summary_when_nothing_is_visible():
    assert summarize_context(None) == "none"
    assert summarize_context(ctx()) == "none"

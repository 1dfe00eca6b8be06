import json
from datetime import datetime, timezone

import pytest

from artext.types import (
    ERROR_CLASSES,
    CandidateSet,
    CandidateSimplification,
    DesignGuideline,
    DetectedObject,
    ErrorClass,
    ErrorProbabilities,
    InvalidManual,
    ManualDocument,
    ManualStep,
    PlanAction,
    SimplificationPlan,
    SimplificationTechnique,
    SpatialContext,
    StepStatus,
    decode_datetime,
    encode_datetime,
    error_registry_hash,
    validate_manual,
)

from conftest import TS, make_manual, make_step


def test_exactly_four_techniques():
    assert len(SimplificationTechnique) == 4
    assert {t.value for t in SimplificationTechnique} == {
        "content_reduction",
        "syntactic_simplification",
        "lexical_simplification",
        "elaborative_simplification",
    }


def test_exactly_three_guidelines():
    assert len(DesignGuideline) == 3


def test_error_registry_is_ordered_and_stable():
    assert ERROR_CLASSES == (
        ErrorClass.MEANING_ALTERED,
        ErrorClass.SYNTACTICALLY_COMPLEX,
        ErrorClass.TOO_LONG,
    )
    assert ERROR_CLASSES.index(ErrorClass.MEANING_ALTERED) == 0
    assert ERROR_CLASSES.index(ErrorClass.TOO_LONG) == 2
    # hash depends only on the ordered class values
    assert error_registry_hash() == error_registry_hash(ERROR_CLASSES)
    permuted = (ErrorClass.TOO_LONG, ErrorClass.MEANING_ALTERED, ErrorClass.SYNTACTICALLY_COMPLEX)
    assert error_registry_hash(permuted) != error_registry_hash()


def test_step_rejects_zero_ordinal():
    with pytest.raises(InvalidManual):
        make_step(step_id=0)


def test_step_rejects_empty_original():
    with pytest.raises(InvalidManual):
        make_step(original="   ")


def test_reviewed_step_requires_simplified_text():
    with pytest.raises(InvalidManual) as err:
        ManualStep(step_id=1, original_text="Pour water.", status=StepStatus.REVIEWED)
    assert any(v.field == "simplified_text" for v in err.value.violations)


def test_draft_step_allows_missing_simplified_text():
    step = make_step()
    assert step.simplified_text is None
    assert step.status is StepStatus.DRAFT


def test_manual_requires_contiguous_step_ids():
    raw = make_manual().to_dict()
    raw["steps"][1]["step_id"] = 3
    violations = validate_manual(raw)
    assert any(v.field == "steps" and "contiguously" in v.rule for v in violations)
    with pytest.raises(InvalidManual):
        ManualDocument.from_dict(raw)


def test_manual_requires_at_least_one_step():
    raw = make_manual().to_dict()
    raw["steps"] = []
    assert any(v.field == "steps" for v in validate_manual(raw))


def test_validate_manual_empty_iff_constructor_accepts():
    good = make_manual().to_dict()
    assert validate_manual(good) == []
    ManualDocument.from_dict(good)  # should not raise

    for mutate in (
        lambda d: d.update(version=0),
        lambda d: d["steps"][0].update(original_text=""),
        lambda d: d.update(title="  "),
    ):
        raw = make_manual().to_dict()
        mutate(raw)
        assert validate_manual(raw), f"expected violations after {mutate}"
        with pytest.raises((InvalidManual, ValueError)):
            ManualDocument.from_dict(raw)


def test_manual_version_must_be_positive():
    with pytest.raises(InvalidManual):
        make_manual(version=0)


def test_manual_roundtrip_through_json():
    doc = make_manual(tags=("coffee", "term:dripper"))
    raw = json.loads(json.dumps(doc.to_dict()))
    assert ManualDocument.from_dict(raw) == doc


def test_glossary_comes_from_term_tags():
    doc = make_manual(tags=("kitchen", "term:Dripper", "term:mug"))
    assert doc.glossary() == {"dripper", "mug"}


def test_timestamps_truncate_to_seconds():
    noisy = datetime(2024, 3, 1, 12, 0, 0, 999999, tzinfo=timezone.utc)
    doc = make_manual(created_at=noisy, updated_at=noisy)
    assert doc.created_at.microsecond == 0
    assert encode_datetime(doc.created_at) == "2024-03-01T12:00:00Z"
    assert decode_datetime("2024-03-01T12:00:00Z") == doc.created_at


def test_naive_timestamp_rejected():
    with pytest.raises(ValueError):
        make_manual(created_at=datetime(2024, 3, 1, 12, 0, 0))


def test_plan_roundtrip_and_normalization():
    plan = SimplificationPlan(
        thoughts="  Sentence is long.\nSplit it.  ",
        actions=(
            PlanAction(SimplificationTechnique.SYNTACTIC_SIMPLIFICATION, "split  at\nthe first and"),
        ),
    )
    assert plan.thoughts == "Sentence is long. Split it."
    assert plan.actions[0].description == "split at the first and"
    assert SimplificationPlan.from_dict(json.loads(json.dumps(plan.to_dict()))) == plan


def test_empty_plan_is_valid():
    plan = SimplificationPlan(thoughts="Already short enough.")
    assert plan.actions == ()


def test_technique_from_name_accepts_display_and_value_forms():
    assert (
        PlanAction.technique_from_name("Syntactic Simplification")
        is SimplificationTechnique.SYNTACTIC_SIMPLIFICATION
    )
    assert (
        PlanAction.technique_from_name("content_reduction")
        is SimplificationTechnique.CONTENT_REDUCTION
    )
    with pytest.raises(ValueError):
        PlanAction.technique_from_name("summarization")


def test_error_probabilities_fixed_length():
    probs = ErrorProbabilities(probs=(0.1, 0.2, 0.3), classifier_id="rule-v1")
    assert probs.prob_of(ErrorClass.TOO_LONG) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        ErrorProbabilities(probs=(0.1, 0.2), classifier_id="rule-v1")
    with pytest.raises(ValueError):
        ErrorProbabilities(probs=(0.1, 0.2, 1.5), classifier_id="rule-v1")


def test_candidate_probability_bounds():
    CandidateSimplification(text="x", raw_probability=1.0, candidate_index=0)
    with pytest.raises(ValueError):
        CandidateSimplification(text="x", raw_probability=0.0, candidate_index=0)
    with pytest.raises(ValueError):
        CandidateSimplification(text="x", raw_probability=1.2, candidate_index=0)


def test_candidate_set_checks_indices():
    cands = tuple(
        CandidateSimplification(text=f"c{i}", raw_probability=0.5, candidate_index=i)
        for i in range(5)
    )
    cs = CandidateSet(original_text="orig", candidates=cands)
    assert cs.n == 5
    raw = json.loads(json.dumps(cs.to_dict()))
    assert CandidateSet.from_dict(raw) == cs
    with pytest.raises(ValueError):
        CandidateSet(original_text="orig", candidates=cands[:3])
    shuffled = (cands[1],) + (cands[0],) + cands[2:]
    with pytest.raises(ValueError):
        CandidateSet(original_text="orig", candidates=shuffled)


def test_detected_object_bounds():
    obj = DetectedObject(label="mug", azimuth_deg=45.0, distance_m=1.2, confidence=0.9)
    assert obj.characteristic_length_m is None
    with pytest.raises(ValueError):
        DetectedObject(label="mug", azimuth_deg=200.0, distance_m=1.0, confidence=0.9)
    with pytest.raises(ValueError):
        DetectedObject(label="mug", azimuth_deg=0.0, distance_m=0.0, confidence=0.9)
    with pytest.raises(ValueError):
        DetectedObject(label="", azimuth_deg=0.0, distance_m=1.0, confidence=0.9)


def test_spatial_context_roundtrip_and_freeze():
    ctx = SpatialContext(
        objects=(
            DetectedObject(
                label="screwdriver",
                azimuth_deg=-30.0,
                distance_m=0.6,
                confidence=0.8,
                characteristic_length_m=0.18,
            ),
        ),
        captured_at=TS,
    )
    assert not ctx.frozen
    frozen = ctx.freeze()
    assert frozen.frozen and frozen.objects == ctx.objects
    raw = json.loads(json.dumps(frozen.to_dict()))
    assert SpatialContext.from_dict(raw) == frozen

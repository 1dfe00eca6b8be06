"""End-to-end simplification of manual steps.

Order of operations per step: plan, sample n candidates, classify
errors, calibrate, validate, select, then spatial elaboration on the
winner only. Validation gates selection: a failing candidate keeps its
report but cannot win, and when nothing passes the step falls back to
its original text.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

from .calibration import CalibrationModel, calibrate
from .classifiers import ErrorClassifier
from .prompting import LlmBackend, PromptTemplate, simplify_plan_then_execute
from .spatial import elaborate_locations, substitute_measures
from .types import (
    CandidateSet,
    ManualDocument,
    ManualStep,
    SimplificationPlan,
    SpatialContext,
    StepStatus,
)
from .validators import MEANING_THRESHOLD, DisplayProfile, ValidationReport, validate

__all__ = ["StepResult", "simplify_step", "simplify_manual", "apply_spatial"]


@dataclass(frozen=True)
class StepResult:
    """Everything the pipeline produced for one step."""

    step_id: int
    original_text: str
    plan: SimplificationPlan
    candidates: CandidateSet
    reports: tuple[ValidationReport, ...]
    chosen_index: int | None
    chosen_text: str
    display_text: str
    model_version: int

    @property
    def fell_back(self) -> bool:
        return self.chosen_index is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "step_id": self.step_id,
            "original_text": self.original_text,
            "plan": self.plan.to_dict(),
            "candidates": [c.to_dict() for c in self.candidates.candidates],
            "validation": [r.to_dict() for r in self.reports],
            "chosen_index": self.chosen_index,
            "chosen_text": self.chosen_text,
            "display_text": self.display_text,
            "model_version": self.model_version,
        }


def apply_spatial(text: str, context: SpatialContext | None) -> str:
    if context is None:
        return text
    return substitute_measures(elaborate_locations(text, context), context)


def _pick(cset: CandidateSet, reports: tuple[ValidationReport, ...]) -> int | None:
    """Best calibrated probability among candidates whose report passed."""
    best: int | None = None
    best_q = -1.0
    for cand, report in zip(cset.candidates, reports):
        if not report.passed:
            continue
        if cand.calibrated_probability > best_q:
            best = cand.candidate_index
            best_q = cand.calibrated_probability
    return best


def simplify_step(
    step_id: int,
    original: str,
    context: SpatialContext | None,
    template: PromptTemplate,
    backend: LlmBackend,
    classifier: ErrorClassifier,
    model: CalibrationModel,
    n: int = 5,
    plan_temperature: float = 0.0,
    candidate_temperature: float = 0.7,
    profile: DisplayProfile | None = None,
    glossary: frozenset[str] = frozenset(),
    meaning_threshold: float = MEANING_THRESHOLD,
) -> StepResult:
    plan, cset = simplify_plan_then_execute(
        original,
        context,
        template,
        backend,
        n=n,
        plan_temperature=plan_temperature,
        temperature=candidate_temperature,
    )
    scored = replace(
        cset,
        candidates=tuple(
            replace(c, error_probs=classifier.classify(original, c.text))
            for c in cset.candidates
        ),
    )
    scored = calibrate(scored, model)
    reports = tuple(
        validate(
            original,
            c.text,
            profile=profile,
            glossary=glossary,
            classifier=classifier,
            meaning_threshold=meaning_threshold,
        )
        for c in scored.candidates
    )
    chosen_index = _pick(scored, reports)
    chosen_text = original if chosen_index is None else scored.candidates[chosen_index].text
    return StepResult(
        step_id=step_id,
        original_text=original,
        plan=plan,
        candidates=scored,
        reports=reports,
        chosen_index=chosen_index,
        chosen_text=chosen_text,
        display_text=apply_spatial(chosen_text, context),
        model_version=model.version,
    )


def simplify_manual(
    doc: ManualDocument,
    context: SpatialContext | None,
    template: PromptTemplate,
    backend: LlmBackend,
    classifier: ErrorClassifier,
    model: CalibrationModel,
    **step_kwargs,
) -> tuple[ManualDocument, list[StepResult]]:
    """Simplify every step; returns the updated document and results.

    The returned document keeps the input version (the caller passes it
    to the store, which assigns the next version). Each step gets the
    chosen text, Simplified status, and the shared context snapshot.
    """
    results = []
    new_steps: list[ManualStep] = []
    glossary = doc.glossary()
    for step in doc.steps:
        result = simplify_step(
            step.step_id,
            step.original_text,
            context,
            template,
            backend,
            classifier,
            model,
            glossary=glossary,
            **step_kwargs,
        )
        results.append(result)
        new_steps.append(
            replace(
                step,
                simplified_text=result.chosen_text,
                status=StepStatus.SIMPLIFIED,
                spatial_snapshot=context,
            )
        )
    return replace(doc, steps=tuple(new_steps)), results

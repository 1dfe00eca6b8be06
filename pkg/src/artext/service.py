"""HTTP service exposing the store, pipeline, and review workflow.

State that is not the manual store lives in memory: the latest
detection snapshot, per-step contexts frozen by step advancement, and
the pipeline output cache that backs the review queue. The calibration
model is the exception; it is persisted next to the store so a restart
keeps the trained weights.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Any, Mapping

from fastapi import Body, Depends, FastAPI, Header, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .calibration import (
    GoldDataset,
    GoldSample,
    GoldSource,
    TrainConfig,
    default_featurizer,
    default_model,
    fit,
    load_model,
    save_model,
)
from .classifiers import ClassifierUnavailable
from .config import AppConfig, ConfigError, make_backend, make_classifier
from .pipeline import StepResult, apply_spatial, simplify_manual
from .prompting import (
    BackendReturnedWrongCount,
    BackendUnavailable,
    MalformedPlan,
    UnknownTechnique,
    load_template,
)
from .seeds import default_template
from .spatial import MIN_CONFIDENCE
from .store import ConcurrentUpdateConflict, ManualStore, NotFound
from .types import (
    DetectedObject,
    ErrorClass,
    InvalidManual,
    ManualDocument,
    ManualStep,
    SpatialContext,
    StepStatus,
    utc_now,
)
from .validators import line_count, validate

__all__ = ["ServiceState", "create_app"]


class ServiceState:
    def __init__(self, config: AppConfig):
        self.config = config
        self.store = ManualStore(config.store_dir)
        if config.template_path:
            self.template = load_template(config.template_path)
        else:
            self.template = default_template(config.exemplar_order_seed)
        self.model_path = Path(config.store_dir) / "model.json"
        self.model = (
            load_model(self.model_path) if self.model_path.exists() else default_model()
        )
        self.model_lock = threading.Lock()
        self.live_objects: tuple[DetectedObject, ...] = ()
        self.frozen_contexts: dict[tuple[str, int], SpatialContext] = {}
        self.step_results: dict[tuple[str, int], StepResult] = {}


def _bad_payload(detail: Any) -> HTTPException:
    return HTTPException(status_code=422, detail=detail)


def _doc_for_create(payload: Mapping[str, Any]) -> ManualDocument:
    raw_steps = payload.get("steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise _bad_payload("steps must be a nonempty list")
    steps = []
    for position, raw in enumerate(raw_steps, start=1):
        if isinstance(raw, str):
            steps.append(ManualStep(step_id=position, original_text=raw))
        elif isinstance(raw, Mapping):
            data = dict(raw)
            data.setdefault("step_id", position)
            steps.append(ManualStep.from_dict(data))
        else:
            raise _bad_payload(f"step {position} must be a string or an object")
    now = utc_now()
    tags = payload.get("tags", ())
    if not isinstance(tags, (list, tuple)):
        raise _bad_payload("tags must be a list of strings")
    return ManualDocument(
        manual_id="pending",
        title=payload.get("title", ""),
        steps=tuple(steps),
        tags=frozenset(tags),
        version=1,
        created_at=now,
        updated_at=now,
    )


def _doc_for_update(manual_id: str, payload: Mapping[str, Any]) -> ManualDocument:
    if "version" not in payload:
        raise _bad_payload("updates must carry the version they are based on")
    data = dict(payload)
    if data.setdefault("manual_id", manual_id) != manual_id:
        raise _bad_payload(
            f"payload manual_id {data['manual_id']!r} does not match the URL"
        )
    stamp = utc_now().strftime("%Y-%m-%dT%H:%M:%SZ")
    data.setdefault("created_at", stamp)
    data.setdefault("updated_at", stamp)
    return ManualDocument.from_dict(data)


def create_app(config: AppConfig | None = None, state: ServiceState | None = None) -> FastAPI:
    if state is None:
        state = ServiceState(config or AppConfig())
    config = state.config

    async def check_token(x_api_token: str | None = Header(default=None)) -> None:
        if config.api_token is not None and x_api_token != config.api_token:
            raise HTTPException(status_code=401, detail="missing or invalid API token")

    app = FastAPI(title="artext", dependencies=[Depends(check_token)])
    # The review console is served from its own origin; without this
    # the browser blocks its requests.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(NotFound)
    async def on_not_found(request: Request, exc: NotFound):
        return JSONResponse(status_code=404, content={"detail": str(exc.args[0])})

    @app.exception_handler(ConcurrentUpdateConflict)
    async def on_conflict(request: Request, exc: ConcurrentUpdateConflict):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(InvalidManual)
    async def on_invalid(request: Request, exc: InvalidManual):
        return JSONResponse(
            status_code=422,
            content={
                "detail": str(exc),
                "violations": [v.to_dict() for v in exc.violations],
            },
        )

    for upstream in (
        BackendUnavailable,
        BackendReturnedWrongCount,
        MalformedPlan,
        UnknownTechnique,
        ClassifierUnavailable,
    ):

        @app.exception_handler(upstream)
        async def on_upstream(request: Request, exc: Exception):
            return JSONResponse(status_code=503, content={"detail": str(exc)})

    def _get_doc(manual_id: str, version: int | None = None) -> ManualDocument:
        return state.store.get_manual(manual_id, version)

    def _get_step(doc: ManualDocument, step_id: int) -> ManualStep:
        try:
            return doc.step(step_id)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc

    @app.get("/health")
    async def health():
        return {"status": "ok", "model_version": state.model.version}

    @app.post("/manuals", status_code=201)
    async def create_manual(payload: dict = Body(...)):
        try:
            doc = _doc_for_create(payload)
        except HTTPException:
            raise
        except InvalidManual:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise _bad_payload(f"malformed manual payload: {exc}") from exc
        manual_id = state.store.create_manual(doc)
        return state.store.get_manual(manual_id).to_dict()

    @app.put("/manuals/{manual_id}")
    async def update_manual(manual_id: str, payload: dict = Body(...)):
        try:
            doc = _doc_for_update(manual_id, payload)
        except HTTPException:
            raise
        except InvalidManual:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise _bad_payload(f"malformed manual payload: {exc}") from exc
        state.store.update_manual(manual_id, doc)
        return state.store.get_manual(manual_id).to_dict()

    @app.get("/manuals")
    async def list_manuals(query: str = "", tag: list[str] = Query(default=[])):
        found = state.store.search(query=query, tags=tag)
        return {"manuals": [m.to_dict() for m in found]}

    @app.get("/manuals/{manual_id}")
    async def get_manual(manual_id: str, version: int | None = None):
        return _get_doc(manual_id, version).to_dict()

    @app.get("/manuals/{manual_id}/versions")
    async def list_versions(manual_id: str):
        versions = state.store.list_versions(manual_id)
        if not versions:
            raise HTTPException(status_code=404, detail=f"no manual {manual_id}")
        return {"manual_id": manual_id, "versions": versions, "latest": versions[-1]}

    @app.post("/context/detections")
    async def post_detections(payload: list = Body(...)):
        try:
            objects = tuple(DetectedObject.from_dict(o) for o in payload)
        except (ValueError, TypeError, KeyError, AttributeError) as exc:
            raise _bad_payload(f"malformed detection list: {exc}") from exc
        state.live_objects = objects
        visible = sum(1 for o in objects if o.confidence >= MIN_CONFIDENCE)
        return {"accepted": len(objects), "visible": visible}

    @app.post("/manuals/{manual_id}/simplify")
    async def simplify(manual_id: str):
        doc = _get_doc(manual_id)
        try:
            backend = make_backend(config)
        except ConfigError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        classifier = make_classifier(config)
        context = None
        if state.live_objects:
            context = SpatialContext(
                objects=state.live_objects, captured_at=utc_now(), frozen=True
            )
        model = state.model
        updated, results = simplify_manual(
            doc,
            context,
            state.template,
            backend,
            classifier,
            model,
            n=config.sample_count,
            plan_temperature=config.plan_temperature,
            candidate_temperature=config.candidate_temperature,
            profile=config.display,
            meaning_threshold=config.meaning_threshold,
        )
        state.store.update_manual(manual_id, updated)
        for result in results:
            state.step_results[(manual_id, result.step_id)] = result
        return {
            "manual_id": manual_id,
            "model_version": model.version,
            "steps": [r.to_dict() for r in results],
        }

    @app.get("/manuals/{manual_id}/steps/{step_id}/display")
    async def display_step(manual_id: str, step_id: int):
        doc = _get_doc(manual_id)
        step = _get_step(doc, step_id)
        if step.status is StepStatus.DRAFT or step.simplified_text is None:
            raise HTTPException(
                status_code=409,
                detail=f"step {step_id} is still a draft; simplify the manual first",
            )
        context = state.frozen_contexts.get((manual_id, step_id)) or step.spatial_snapshot
        text = apply_spatial(step.simplified_text, context)
        return {
            "manual_id": manual_id,
            "step_id": step_id,
            "version": doc.version,
            "status": step.status.value,
            "text": text,
            "lines": line_count(text, config.display),
        }

    @app.post("/manuals/{manual_id}/steps/{step_id}/advance")
    async def advance_step(manual_id: str, step_id: int):
        doc = _get_doc(manual_id)
        _get_step(doc, step_id)
        next_id = step_id + 1
        has_next = any(s.step_id == next_id for s in doc.steps)
        if not has_next:
            return {
                "manual_id": manual_id,
                "completed_step": step_id,
                "frozen_for_step": None,
                "objects": 0,
            }
        frozen = SpatialContext(
            objects=state.live_objects, captured_at=utc_now(), frozen=True
        )
        state.frozen_contexts[(manual_id, next_id)] = frozen
        return {
            "manual_id": manual_id,
            "completed_step": step_id,
            "frozen_for_step": next_id,
            "objects": len(frozen.objects),
        }

    @app.get("/review/queue")
    async def review_queue():
        items = []
        for manual_id in sorted(state.store.list_manual_ids()):
            doc = state.store.get_manual(manual_id)
            for step in doc.steps:
                if step.status is not StepStatus.SIMPLIFIED:
                    continue
                cached = state.step_results.get((manual_id, step.step_id))
                items.append(
                    {
                        "manual_id": manual_id,
                        "title": doc.title,
                        "version": doc.version,
                        "step_id": step.step_id,
                        "original_text": step.original_text,
                        "simplified_text": step.simplified_text,
                        "plan": cached.plan.to_dict() if cached else None,
                        "candidates": (
                            [c.to_dict() for c in cached.candidates.candidates]
                            if cached
                            else None
                        ),
                        "validation": (
                            [r.to_dict() for r in cached.reports] if cached else None
                        ),
                        "chosen_index": cached.chosen_index if cached else None,
                    }
                )
        return {"items": items}

    def _chosen_probability(manual_id: str, step_id: int) -> float | None:
        cached = state.step_results.get((manual_id, step_id))
        if cached is None or cached.chosen_index is None:
            return None
        return cached.candidates.candidates[cached.chosen_index].raw_probability

    @app.post("/review/{manual_id}/{step_id}/verdict")
    async def review_verdict(manual_id: str, step_id: int, payload: dict = Body(...)):
        doc = _get_doc(manual_id)
        step = _get_step(doc, step_id)
        if step.status is not StepStatus.SIMPLIFIED:
            raise HTTPException(
                status_code=409,
                detail=f"step {step_id} is {step.status.value}, not awaiting review",
            )
        verdict = payload.get("verdict")
        report_dict = None
        graded_text = step.simplified_text or step.original_text

        if verdict == "accept":
            final_text = graded_text
            sample = GoldSample(
                original_text=step.original_text,
                simplified_text=graded_text,
                verdict=1,
                source=GoldSource.EXPERT_REVIEW,
                raw_probability=_chosen_probability(manual_id, step_id),
            )
        elif verdict == "reject":
            raw_label = payload.get("error_class")
            try:
                label = ErrorClass(raw_label)
            except ValueError:
                raise _bad_payload(
                    f"reject needs an error_class, one of "
                    f"{[e.value for e in ErrorClass]}; got {raw_label!r}"
                ) from None
            # The step falls back to its original wording so the device
            # never displays text an expert has flagged.
            final_text = step.original_text
            sample = GoldSample(
                original_text=step.original_text,
                simplified_text=graded_text,
                verdict=0,
                source=GoldSource.EXPERT_REVIEW,
                error_label=label,
                raw_probability=_chosen_probability(manual_id, step_id),
            )
        elif verdict == "edit":
            text = payload.get("text")
            if not isinstance(text, str) or not text.strip():
                raise _bad_payload("edit needs nonempty replacement text")
            report = validate(
                step.original_text,
                text,
                profile=config.display,
                glossary=doc.glossary(),
                classifier=make_classifier(config),
                meaning_threshold=config.meaning_threshold,
            )
            report_dict = report.to_dict()
            if not report.passed:
                raise _bad_payload(
                    {"message": "edited text failed validation", "report": report_dict}
                )
            final_text = text
            sample = GoldSample(
                original_text=step.original_text,
                simplified_text=text,
                verdict=1,
                source=GoldSource.EXPERT_REVIEW,
            )
        else:
            raise _bad_payload(
                f"verdict must be 'accept', 'reject', or 'edit'; got {verdict!r}"
            )

        new_steps = tuple(
            replace(s, simplified_text=final_text, status=StepStatus.REVIEWED)
            if s.step_id == step_id
            else s
            for s in doc.steps
        )
        version = state.store.update_manual(manual_id, replace(doc, steps=new_steps))
        state.store.append_gold(sample)
        return {
            "manual_id": manual_id,
            "step_id": step_id,
            "status": StepStatus.REVIEWED.value,
            "version": version,
            "gold": sample.to_dict(),
            "validation": report_dict,
        }

    @app.post("/calibration/train")
    async def train_calibrator(payload: dict | None = Body(default=None)):
        overrides = payload or {}
        samples = state.store.load_gold()
        if not samples:
            raise _bad_payload("no gold samples recorded yet; review some steps first")
        try:
            train_config = TrainConfig(
                learning_rate=overrides.get("learning_rate", config.training.learning_rate),
                epochs=overrides.get("epochs", config.training.epochs),
                seed=overrides.get("seed", config.training.seed),
            )
        except (ValueError, TypeError) as exc:
            raise _bad_payload(f"bad training parameters: {exc}") from exc
        featurizer = default_featurizer(make_classifier(config))
        dataset = GoldDataset(tuple(samples))
        with state.model_lock:
            next_version = state.model.version + 1
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                model, losses = fit(dataset, featurizer, train_config, version=next_version)
            save_model(model, state.model_path)
            state.model = model
        return {
            "model": model.to_dict(),
            "trained_on": dataset.k,
            "loss_curve": losses,
            "final_loss": losses[-1],
            "warnings": [str(w.message) for w in caught],
        }

    @app.get("/calibration/model")
    async def get_model():
        return {"model": state.model.to_dict()}

    return app

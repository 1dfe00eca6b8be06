"""Command line front end.

Exit codes follow the usual convention here: 0 for success, 1 when the
requested checks ran but found failures, 2 when the command itself
could not run (missing files, bad config, unreachable backend).
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .calibration import (
    GoldDataset,
    GoldSample,
    TrainConfig,
    default_featurizer,
    default_model,
    fit,
    save_model,
)
from .classifiers import ClassifierUnavailable
from .config import ConfigError, load_config, make_backend, make_classifier
from .pipeline import simplify_manual
from .prompting import BackendUnavailable, MalformedPlan, UnknownTechnique, save_template
from .seeds import build_demo_fixture, default_template, seed_store
from .service import create_app
from .store import ManualStore
from .types import (
    DetectedObject,
    InvalidManual,
    ManualDocument,
    ManualStep,
    SpatialContext,
    utc_now,
)
from .validators import DisplayProfile, validate

_OPERATIONAL = (
    OSError,
    ConfigError,
    BackendUnavailable,
    ClassifierUnavailable,
    MalformedPlan,
    UnknownTechnique,
    json.JSONDecodeError,
)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _read_manual_file(path: str) -> ManualDocument:
    """Accept a stored manual, a {title, steps} sketch, or plain text."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if "manual_id" in data:
            return ManualDocument.from_dict(data)
        raw_steps = data.get("steps", [])
        steps = tuple(
            ManualStep(step_id=i, original_text=s)
            if isinstance(s, str)
            else ManualStep.from_dict({"step_id": i, **s})
            for i, s in enumerate(raw_steps, start=1)
        )
        now = utc_now()
        return ManualDocument(
            manual_id="cli",
            title=data.get("title", Path(path).stem),
            steps=steps,
            tags=frozenset(data.get("tags", ())),
            version=1,
            created_at=now,
            updated_at=now,
        )
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    steps = tuple(
        ManualStep(step_id=i, original_text=line) for i, line in enumerate(lines, start=1)
    )
    now = utc_now()
    return ManualDocument(
        manual_id="cli",
        title=Path(path).stem,
        steps=steps,
        tags=frozenset(),
        version=1,
        created_at=now,
        updated_at=now,
    )


@click.group()
def main():
    """Simplify task manuals for small AR displays."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None, help="Override the configured bind host.")
@click.option("--port", type=int, default=None, help="Override the configured port.")
def serve(config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    try:
        config = load_config(config_path)
        app = create_app(config)
    except _OPERATIONAL as exc:
        _fail(str(exc))
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command()
@click.option("--manual", "manual_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--fixture", type=click.Path(exists=True), default=None,
              help="Scripted backend fixture; implies mock mode.")
@click.option("--context", "context_path", type=click.Path(exists=True), default=None,
              help="JSON list of detected objects to ground spatial wording.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write results here instead of stdout.")
def simplify(manual_path, config_path, fixture, context_path, out_path):
    """Simplify every step of a manual file, offline."""
    try:
        config = load_config(config_path)
        if fixture is not None:
            config = replace(
                config, backend=replace(config.backend, mode="mock", fixture_path=fixture)
            )
        doc = _read_manual_file(manual_path)
        context = None
        if context_path is not None:
            raw = json.loads(Path(context_path).read_text(encoding="utf-8"))
            objects = raw.get("objects", []) if isinstance(raw, dict) else raw
            context = SpatialContext(
                objects=tuple(DetectedObject.from_dict(o) for o in objects),
                captured_at=utc_now(),
                frozen=True,
            )
        backend = make_backend(config)
        classifier = make_classifier(config)
        _, results = simplify_manual(
            doc,
            context,
            default_template(config.exemplar_order_seed),
            backend,
            classifier,
            default_model(),
            n=config.sample_count,
            plan_temperature=config.plan_temperature,
            candidate_temperature=config.candidate_temperature,
            profile=config.display,
            meaning_threshold=config.meaning_threshold,
        )
    except InvalidManual as exc:
        _fail(f"manual is invalid: {exc}")
    except _OPERATIONAL as exc:
        _fail(str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        _fail(f"bad input: {exc}")

    payload = {
        "title": doc.title,
        "steps": [r.to_dict() for r in results],
    }
    rendered = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(rendered + "\n", encoding="utf-8")
    else:
        click.echo(rendered)
    fallbacks = [r.step_id for r in results if r.fell_back]
    if fallbacks:
        click.echo(
            f"no candidate passed validation for steps {fallbacks}; kept original text",
            err=True,
        )
        sys.exit(1)


@main.command()
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True),
              help="JSONL file, one labeled sample per line.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
def train(gold_path, out_path, config_path, seed, epochs, learning_rate):
    """Fit the candidate calibrator on labeled review outcomes."""
    try:
        config = load_config(config_path)
        samples = []
        for line in Path(gold_path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                samples.append(GoldSample.from_dict(json.loads(line)))
        if not samples:
            _fail(f"{gold_path} holds no samples")
        train_config = TrainConfig(
            learning_rate=(
                learning_rate if learning_rate is not None else config.training.learning_rate
            ),
            epochs=epochs if epochs is not None else config.training.epochs,
            seed=seed if seed is not None else config.training.seed,
        )
        featurizer_classifier = make_classifier(config)
        model, losses = fit(
            GoldDataset(tuple(samples)),
            default_featurizer(featurizer_classifier),
            train_config,
        )
        save_model(model, out_path)
    except _OPERATIONAL as exc:
        _fail(str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        _fail(f"bad input: {exc}")
    click.echo(
        f"trained on {len(samples)} samples over {train_config.epochs} epochs; "
        f"loss {losses[0]:.4f} -> {losses[-1]:.4f}; saved to {out_path}"
    )


@main.command("validate")
@click.option("--manual", "manual_path", required=True, type=click.Path(exists=True))
@click.option("--chars-per-line", type=int, default=40, show_default=True)
@click.option("--max-lines", type=int, default=None)
def validate_cmd(manual_path, chars_per_line, max_lines):
    """Check each step's simplified text against the display rules."""
    try:
        doc = _read_manual_file(manual_path)
        profile = DisplayProfile(chars_per_line=chars_per_line, max_lines=max_lines)
    except InvalidManual as exc:
        _fail(f"manual is invalid: {exc}")
    except _OPERATIONAL as exc:
        _fail(str(exc))
    except (ValueError, KeyError, TypeError) as exc:
        _fail(f"bad input: {exc}")

    failures = 0
    glossary = doc.glossary()
    for step in doc.steps:
        if not step.simplified_text:
            click.echo(f"step {step.step_id}: FAIL (no simplified text to check)")
            failures += 1
            continue
        report = validate(
            step.original_text, step.simplified_text, profile=profile, glossary=glossary
        )
        for check in report.checks:
            mark = "pass" if check.passed else "FAIL"
            click.echo(f"step {step.step_id}: {mark} {check.rule} ({check.detail})")
        if not report.passed:
            failures += 1
    click.echo(f"{len(doc.steps) - failures}/{len(doc.steps)} steps pass")
    if failures:
        sys.exit(1)


@main.command()
@click.option("--examples", is_flag=True, required=True,
              help="Load the bundled example manuals and gold labels.")
@click.option("--store", "store_dir", type=click.Path(), default=None,
              help="Store directory; defaults to the configured one.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--fixture-out", type=click.Path(), default=None,
              help="Also write a scripted-backend fixture for the examples.")
@click.option("--template-out", type=click.Path(), default=None,
              help="Also write the default prompt template as a text file.")
def seed(examples, store_dir, config_path, fixture_out, template_out):
    """Populate a store with the example corpus."""
    if not examples:
        _fail("--examples is the only seeding source; pass it explicitly")
    try:
        config = load_config(config_path)
        store = ManualStore(store_dir or config.store_dir)
        ids = seed_store(store)
        if fixture_out:
            Path(fixture_out).write_text(
                json.dumps(build_demo_fixture(), indent=2) + "\n", encoding="utf-8"
            )
        if template_out:
            save_template(default_template(config.exemplar_order_seed), template_out)
    except _OPERATIONAL as exc:
        _fail(str(exc))
    click.echo(f"seeded {len(ids)} manuals: {', '.join(ids)}")
    click.echo(f"gold samples: {len(store.load_gold())}")


if __name__ == "__main__":
    main()

import random
from datetime import datetime, timezone

import numpy as np

from artext.calibration import GoldDataset, GoldSample, GoldSource
from artext.types import ErrorClass, ManualDocument, ManualStep, StepStatus

TS = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_step(step_id=1, original="Pour the water over the grounds slowly.", **kw):
    return ManualStep(step_id=step_id, original_text=original, **kw)


def make_manual(manual_id="m-test", title="Test manual", steps=None, version=1, tags=(), **kw):
    if steps is None:
        steps = (make_step(1), make_step(2, original="Wait thirty seconds, then serve."))
    return ManualDocument(
        manual_id=manual_id,
        title=title,
        steps=tuple(steps),
        version=version,
        tags=frozenset(tags),
        created_at=kw.pop("created_at", TS),
        updated_at=kw.pop("updated_at", TS),
        **kw,
    )


def make_simplified_step(step_id=1, original="Pour the water over the grounds slowly.",
                         simplified="Pour water slowly.", status=StepStatus.SIMPLIFIED):
    return ManualStep(
        step_id=step_id,
        original_text=original,
        simplified_text=simplified,
        status=status,
    )


def make_separable_dataset(seed, size, margin=0.05):
    """Gold samples whose verdict is 1 exactly when p > 0.5.

    A margin keeps p away from the boundary so the set is separable
    with room to spare. Error probabilities are all zero by design;
    pair it with p_featurizer.
    """
    rng = random.Random(seed)
    samples = []
    while len(samples) < size:
        p = rng.uniform(0.01, 1.0)
        if abs(p - 0.5) < margin:
            continue
        verdict = 1 if p > 0.5 else 0
        samples.append(
            GoldSample(
                original_text=f"step {len(samples)}",
                simplified_text=f"short {len(samples)}",
                verdict=verdict,
                source=GoldSource.SEEDED,
                error_label=None if verdict else ErrorClass.MEANING_ALTERED,
                raw_probability=p,
            )
        )
    return GoldDataset(tuple(samples))


def p_featurizer(sample):
    return np.array([sample.raw_probability, 0.0, 0.0, 0.0])

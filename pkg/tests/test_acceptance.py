"""Release gate: one test per shipping criterion.

Each test prints a single verdict line, so running this file with
``pytest tests/test_acceptance.py -v -s`` doubles as the sign-off
checklist. The tolerances here are contractual; loosening them means
renegotiating the release bar, not editing this file.
"""

import json
import random
import string
import threading
import time
from dataclasses import replace

import numpy as np
import pytest
from fastapi.testclient import TestClient

from artext.calibration import (
    TrainConfig,
    batch_grad,
    batch_loss,
    calibrate,
    default_model,
    fit,
    predict_verdict,
    select,
    softmax,
)
from artext.config import AppConfig, BackendConfig
from artext.prompting import parse_plan, render_plan
from artext.seeds import COFFEE_PAIRS, MEETING_PAIRS, build_demo_fixture, seed_store
from artext.service import ServiceState, create_app
from artext.spatial import elaborate_locations, relation_of, substitute_measures
from artext.store import ConcurrentUpdateConflict, ManualStore
from artext.types import (
    CandidateSet,
    CandidateSimplification,
    DetectedObject,
    ErrorProbabilities,
    ManualDocument,
    ManualStep,
    PlanAction,
    SimplificationPlan,
    SimplificationTechnique,
    SpatialContext,
    SpatialRelation,
    utc_now,
)
from artext.validators import DisplayProfile, check_length_reduction, check_line_count, validate

from conftest import make_separable_dataset, p_featurizer


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_gradient_check():
    rng = random.Random(1009)
    h = 1e-6
    worst = 0.0
    started = time.perf_counter()
    for _ in range(100):
        x = np.array([[rng.uniform(0.0, 1.0) for _ in range(4)]])
        y = np.array([float(rng.randint(0, 1))])
        w = np.array([rng.uniform(-3, 3) for _ in range(4)])
        b = rng.uniform(-3, 3)
        gw, gb = batch_grad(w, b, x, y)
        fd = np.empty(5)
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            fd[j] = (batch_loss(w + e, b, x, y) - batch_loss(w - e, b, x, y)) / (2 * h)
        fd[4] = (batch_loss(w, b + h, x, y) - batch_loss(w, b - h, x, y)) / (2 * h)
        analytic = np.append(gw, gb)
        rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(fd), 1e-12)
        worst = max(worst, rel)
    elapsed = time.perf_counter() - started
    _report(
        "gradient-check",
        worst < 1e-5 and elapsed < 5.0,
        f"worst rel err {worst:.2e}, {elapsed:.2f}s over 100 draws",
    )


def test_calibration_training():
    trainset = make_separable_dataset(101, 200)
    heldout = make_separable_dataset(202, 200)
    started = time.perf_counter()
    model, losses = fit(trainset, p_featurizer, TrainConfig(seed=13))
    elapsed = time.perf_counter() - started

    hits = sum(
        predict_verdict(model, p_featurizer(s)) == s.verdict for s in heldout.samples
    )
    accuracy = hits / len(heldout.samples)
    monotone = all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
    again, _ = fit(trainset, p_featurizer, TrainConfig(seed=13))
    deterministic = again.w_diag == model.w_diag and again.b == model.b
    _report(
        "calibration-training",
        accuracy >= 0.95 and monotone and deterministic and elapsed < 10.0,
        f"held-out accuracy {accuracy:.3f}, monotone={monotone}, "
        f"deterministic={deterministic}, {elapsed:.2f}s",
    )


def _candidate_set(features: np.ndarray) -> CandidateSet:
    cands = tuple(
        CandidateSimplification(
            text=f"candidate {i}",
            raw_probability=float(f[0]),
            candidate_index=i,
            error_probs=ErrorProbabilities(
                probs=tuple(float(v) for v in f[1:]), classifier_id="rule-v1"
            ),
        )
        for i, f in enumerate(features)
    )
    return CandidateSet(original_text="original", candidates=cands, n=len(cands))


def test_softmax_and_selection_properties():
    rng = np.random.default_rng(2024)
    cases = 0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        z = rng.normal(0.0, 5.0, size=n)
        q = softmax(z)
        assert abs(q.sum() - 1.0) < 1e-9
        shift = softmax(z + rng.normal(0.0, 50.0))
        assert np.max(np.abs(q - shift)) < 1e-12
        scale = float(rng.uniform(0.1, 10.0))
        assert int(np.argmax(softmax(z * scale))) == int(np.argmax(q))
        cases += 1

    model = default_model()
    ties_ok = True
    py_rng = random.Random(77)
    for _ in range(1000):
        n = py_rng.randint(2, 6)
        shared = np.array(
            [py_rng.uniform(0.5, 1.0)] + [py_rng.uniform(0.0, 0.4) for _ in range(3)]
        )
        rows = []
        tied = sorted(py_rng.sample(range(n), py_rng.randint(2, n)))
        for i in range(n):
            if i in tied:
                rows.append(shared.copy())
            else:
                rows.append(
                    np.array(
                        [py_rng.uniform(0.01, 0.45)]
                        + [py_rng.uniform(0.5, 1.0) for _ in range(3)]
                    )
                )
        cset = calibrate(_candidate_set(np.array(rows)), model)
        best = max(
            cset.candidates, key=lambda c: (c.calibrated_probability, -c.candidate_index)
        )
        ties_ok = ties_ok and select(cset).candidate_index == tied[0] == best.candidate_index
        cases += 1
    _report("softmax-properties", ties_ok and cases == 2000, f"{cases} random cases")


def test_pipeline_five_candidates_byte_stable(tmp_path):
    fixture = tmp_path / "fixture.json"
    fixture.write_text(json.dumps(build_demo_fixture()), encoding="utf-8")
    state = ServiceState(
        AppConfig(
            store_dir=str(tmp_path / "store"),
            backend=BackendConfig(mode="mock", fixture_path=str(fixture)),
        )
    )
    client = TestClient(create_app(state=state))
    ids = seed_store(state.store)
    coffee_id = next(
        i for i in ids if "coffee" in state.store.get_manual(i).title.lower()
    )
    first = client.post(f"/manuals/{coffee_id}/simplify")
    second = client.post(f"/manuals/{coffee_id}/simplify")
    steps = first.json()["steps"]
    counts_ok = len(steps) == 9 and all(len(s["candidates"]) == 5 for s in steps)
    stable = first.content == second.content
    _report(
        "pipeline-n5-byte-stable",
        first.status_code == 200 and counts_ok and stable,
        f"9 steps x 5 candidates, responses identical={stable}",
    )


def test_corpus_length_and_lines():
    profile = DisplayProfile(chars_per_line=40)
    passed = 0
    for original, simplified in COFFEE_PAIRS + MEETING_PAIRS:
        length = check_length_reduction(original, simplified)
        lines = check_line_count(original, simplified, profile)
        if length.passed and lines.passed:
            passed += 1
    _report("corpus-length-check", passed == 16, f"{passed}/16 pairs")


def test_spatial_relation_oracle():
    def oracle(azimuth: float) -> SpatialRelation:
        # Independent formulation: nearest of the three cone centers,
        # with the front cone owning [-20, 20] inclusive.
        if -20.0 <= azimuth <= 20.0:
            return SpatialRelation.IN_FRONT_OF_YOU
        return (
            SpatialRelation.ON_YOUR_RIGHT if azimuth > 0 else SpatialRelation.ON_YOUR_LEFT
        )

    sweep_ok = all(
        relation_of(float(az)) is oracle(float(az)) for az in range(-180, 181)
    )

    mug = DetectedObject(
        label="coffee mug", azimuth_deg=45.0, distance_m=1.2, confidence=0.9
    )
    ctx = SpatialContext(objects=(mug,), captured_at=utc_now(), frozen=True)
    elaborated = elaborate_locations("Pick up the coffee mug.", ctx)
    mug_ok = "coffee mug on your right" in elaborated

    screwdriver = DetectedObject(
        label="screwdriver",
        azimuth_deg=0.0,
        distance_m=0.5,
        confidence=0.9,
        characteristic_length_m=0.18,
    )
    ctx2 = SpatialContext(objects=(screwdriver,), captured_at=utc_now(), frozen=True)
    substituted = substitute_measures("Move the drill seven inches left.", ctx2)
    screw_ok = ", or the length of a screwdriver" in substituted

    _report(
        "spatial-oracle",
        sweep_ok and mug_ok and screw_ok,
        f"361-point sweep={sweep_ok}, mug phrase={mug_ok}, size comparison={screw_ok}",
    )


def test_validator_identity():
    rng = random.Random(4242)
    alphabet = string.ascii_letters + string.digits + " .,;:!?'\"-()"
    checked = 0
    for _ in range(1000):
        while True:
            x = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 120)))
            if x.strip():
                break
        report = validate(x, x)
        assert report.passed, f"identity failed for {x!r}"
        checked += 1
    _report("validator-identity", checked == 1000, f"{checked} random strings")


def test_store_durability_and_conflict(tmp_path):
    root = tmp_path / "store"
    store = ManualStore(root)
    now = utc_now()
    doc = ManualDocument(
        manual_id="pending",
        title="Durability probe",
        steps=(ManualStep(step_id=1, original_text="Check the seals on the hatch."),),
        tags=frozenset(),
        version=1,
        created_at=now,
        updated_at=now,
    )
    manual_id = store.create_manual(doc)
    v1 = store.get_manual(manual_id)
    store.update_manual(manual_id, replace(v1, title="Durability probe, rev A"))
    v2 = store.get_manual(manual_id)
    store.update_manual(manual_id, replace(v2, title="Durability probe, rev B"))

    reopened = ManualStore(root)
    titles = [reopened.get_manual(manual_id, v).title for v in (1, 2, 3)]
    durable = (
        reopened.list_versions(manual_id) == [1, 2, 3]
        and titles[0] == "Durability probe"
        and titles[2] == "Durability probe, rev B"
        and reopened.get_manual(manual_id).version == 3
    )

    base = reopened.get_manual(manual_id)
    outcomes: list[str] = []
    barrier = threading.Barrier(2)

    def racer(tag: str):
        barrier.wait()
        try:
            reopened.update_manual(manual_id, replace(base, title=f"race {tag}"))
            outcomes.append("ok")
        except ConcurrentUpdateConflict:
            outcomes.append("conflict")

    threads = [threading.Thread(target=racer, args=(t,)) for t in ("a", "b")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    race_ok = sorted(outcomes) == ["conflict", "ok"]
    _report(
        "store-durability",
        durable and race_ok,
        f"3 versions kept, race outcomes {outcomes}",
    )


def test_plan_round_trip():
    rng = random.Random(31415)
    words = (
        "pour water filter slowly grind settle stir lid wait remove trim label "
        "align fold press check place serve rinse"
    ).split()
    techniques = list(SimplificationTechnique)
    round_trips = 0
    for _ in range(300):
        thoughts = " ".join(rng.choice(words) for _ in range(rng.randint(1, 12)))
        actions = tuple(
            PlanAction(
                technique=rng.choice(techniques),
                description=" ".join(rng.choice(words) for _ in range(rng.randint(1, 8))),
            )
            for _ in range(rng.randint(0, 6))
        )
        plan = SimplificationPlan(thoughts=thoughts, actions=actions)
        assert parse_plan(render_plan(plan)) == plan
        round_trips += 1
    _report("plan-round-trip", round_trips == 300, f"{round_trips} randomized plans")

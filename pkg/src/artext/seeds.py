"""Seed corpus: two instruction manuals, prompt exemplars, gold samples.

The pour-over coffee task (9 steps) and the meeting room task (7 steps)
ship as paired original/simplified texts. They drive the few-shot
exemplars, the seeded gold dataset, and the demo fixture for the
scripted backend, so a fresh install can exercise the whole pipeline
offline.
"""

from __future__ import annotations

from .calibration import GoldSample, GoldSource
from .prompting import DEFAULT_SYSTEM_PREAMBLE, Exemplar, PromptTemplate
from .store import ManualStore
from .types import (
    ErrorClass,
    ManualDocument,
    ManualStep,
    PlanAction,
    SimplificationTechnique,
    utc_now,
)

__all__ = [
    "COFFEE_TITLE",
    "COFFEE_PAIRS",
    "MEETING_TITLE",
    "MEETING_PAIRS",
    "CORPUS_PAIRS",
    "DUMBBELL_INPUT",
    "DUMBBELL_OUTPUT",
    "default_exemplars",
    "default_template",
    "build_demo_fixture",
    "seed_manual_documents",
    "seed_gold_samples",
    "seed_store",
]

COFFEE_TITLE = "Pour-over coffee brewing"

COFFEE_PAIRS: tuple[tuple[str, str], ...] = (
    (
        "To create a coffee, first please carefully place the pour-over dripper over the coffee mug.",
        "Place dripper (on your left) on coffee mug.",
    ),
    (
        "Prepare the filter insert by folding the paper filter in half to create a semi-circle, "
        "and in half again to create a quarter-circle. Place the paper filter in the dripper "
        "and spread open to create a cone.",
        "Fold paper filter in half, then half again. Put filter in dripper, form cone shape.",
    ),
    (
        "Rinse the filter. Pour enough hot water into the filter to wet it. The entire paper "
        "filter should be moist. Rinsing the filter will remove any papery residue so your "
        "coffee doesn't have a woodsy taste.",
        "Wet filter with water to rinse away residue.",
    ),
    (
        "Lift up the dripper and pour out the water. Then set the dripper with the wet filter "
        "back on the coffee mug.",
        "Remove dripper, pour out water, and return dripper to coffee mug.",
    ),
    (
        "Get out a digital scale and measure out 3 tablespoons (about 30 g) of coffee beans. "
        "Measure out 30 g of whole beans and place them in your grinder.",
        "Measure 30g coffee beans on a digital scale (right side), place in grinder (right side).",
    ),
    (
        "Grind the beans until the coffee grounds are the consistency of coarse sand, "
        "about 20 seconds.",
        "Grind beans for 20 seconds, until coarse sand consistency.",
    ),
    (
        "Transfer the coffee grounds to the filter cone. Then place the coffee mug with the "
        "dripper on a digital scale and set it to zero.",
        "Move grounds to filter cone. Set coffee mug with dripper on scale, zero it.",
    ),
    (
        "Slowly pour the water over the grounds in a circular motion. Do not overfill beyond "
        "the top of the paper filter. Your scale should read 100 g once you've poured enough "
        "water into the dripper.",
        "Slowly pour water in circles over grounds, stopping at 100g on scale.",
    ),
    (
        "Let the coffee drain completely into the mug and wait for 30 seconds and you can "
        "complete the task;",
        "Drain coffee into mug and wait for 30 seconds to end.",
    ),
)

MEETING_TITLE = "Meeting room setup"

MEETING_PAIRS: tuple[tuple[str, str], ...] = (
    (
        "Before arranging the meeting room, take a moment to tidy up the desk and move "
        "anything that's not necessary to other desks;",
        "Tidy desk, move the unnecessary items to other desks.",
    ),
    (
        "Once the desk is clear, bring the power strip on the desk and connect the Charger "
        "to the power strip so the meeting attendants can use.",
        "Put power strip on desk, connect phone charger to it.",
    ),
    (
        "Connect the camera's charger to the power strip and position the camera at the "
        "opposite end of the desk from the TV.",
        "Connect camera to strip, facing opposite of TV.",
    ),
    (
        "Arrange the chairs in the meeting room. Make sure that there's enough space between "
        "each chair - roughly 1.5 feet should suffice. Position one chair on the window side, "
        "and place five chairs on the other side.",
        "Arrange chairs on two sides. Leave space of roughly two A4 papers' length apart. "
        "Window side: 1 chair. Other side: 5 chairs.",
    ),
    (
        "Next, place cups of water and papers on each chair. Each person should have one cup "
        "of water and paper;",
        "Place water, paper onto desk in front of chairs.",
    ),
    (
        "Put up the desk nameplates on on each chair. When Alice is on the side of the window, "
        "other desk nameplates should be put on the other side. The sequence is Bob, Amy, "
        "Andy, Dave and Luis.",
        "Place nameplates: Window side: Alice (window); sequence (left to right) on other "
        "side: Bob, Amy, Andy, Dave, Luis.",
    ),
    (
        "Since Alice is the VIP in the meeting, place make it clearly by putting the remote "
        "controller to Alice's position.",
        "Place remote controller at Alice's position on desk.",
    ),
)

CORPUS_PAIRS: tuple[tuple[str, str], ...] = COFFEE_PAIRS + MEETING_PAIRS

DUMBBELL_INPUT = (
    "Grab a pair of 10 to 12 lb (4.5 to 5.4 kg) dumbbells and lie on your back with your "
    "arms behind you and your legs extended and raised to a 45-degree angle"
)
DUMBBELL_OUTPUT = (
    "Grab a pair of 10 to 12 lb (4.5 to 5.4 kg) dumbbells. Lie on your back with your arms "
    "behind you. Extend your legs and raise them to a 45-degree angle."
)

_A = SimplificationTechnique


def default_exemplars() -> tuple[Exemplar, ...]:
    return (
        Exemplar(
            input_text=DUMBBELL_INPUT,
            thoughts=(
                "One sentence chains three separate actions with 'and', and the last clause "
                "buries the movement in a passive construction."
            ),
            plan=(
                PlanAction(_A.SYNTACTIC_SIMPLIFICATION, "split at the first 'and'"),
                PlanAction(_A.SYNTACTIC_SIMPLIFICATION, "split at the second 'and'"),
                PlanAction(
                    _A.SYNTACTIC_SIMPLIFICATION,
                    "turn the passive leg description into a direct instruction",
                ),
            ),
            output_text=DUMBBELL_OUTPUT,
        ),
        Exemplar(
            input_text=COFFEE_PAIRS[1][0],
            thoughts=(
                "Two sentences explain folding twice and placing the filter; the geometry "
                "asides can go, and each action deserves its own short sentence."
            ),
            plan=(
                PlanAction(_A.CONTENT_REDUCTION, "drop the semi-circle and quarter-circle asides"),
                PlanAction(_A.SYNTACTIC_SIMPLIFICATION, "one short sentence per action"),
            ),
            output_text=COFFEE_PAIRS[1][1],
        ),
        Exemplar(
            input_text=MEETING_PAIRS[1][0],
            thoughts=(
                "The purpose clause about attendants adds nothing the doer needs; two "
                "actions remain."
            ),
            plan=(
                PlanAction(_A.CONTENT_REDUCTION, "drop the purpose clause"),
                PlanAction(_A.SYNTACTIC_SIMPLIFICATION, "split the two actions"),
                PlanAction(_A.LEXICAL_SIMPLIFICATION, "name the charger plainly"),
            ),
            output_text=MEETING_PAIRS[1][1],
        ),
    )


def default_template(exemplar_order_seed: int = 0) -> PromptTemplate:
    return PromptTemplate(
        system_preamble=DEFAULT_SYSTEM_PREAMBLE,
        exemplars=default_exemplars(),
        exemplar_order_seed=exemplar_order_seed,
    )


_DEMO_PLAN_TEXT = (
    "THOUGHTS: The step packs several actions into long sentences with filler the doer "
    "does not need.\n"
    "PLAN:\n"
    "1. content reduction: drop filler words and asides\n"
    "2. syntactic simplification: split into short imperative sentences\n"
)


def build_demo_fixture(pairs: tuple[tuple[str, str], ...] = COFFEE_PAIRS) -> list[dict]:
    """Scripted-backend fixture covering one plan + five candidates per step.

    Candidate 0 is the reference simplification with the best
    probability; the others add weaker duplicates and two deliberately
    broken rewrites (one bloated, one gutted) so validation has
    something to reject.
    """
    entries: list[dict] = []
    for original, simplified in pairs:
        entries.append({"text": _DEMO_PLAN_TEXT, "token_logprobs": None})
        entries.append({"text": simplified, "token_logprobs": [-0.2, -0.3]})
        entries.append({"text": simplified, "token_logprobs": [-0.5, -0.5]})
        entries.append({"text": simplified.rstrip("."), "token_logprobs": [-0.8, -0.6]})
        entries.append(
            {
                "text": original + " Do this carefully and double-check the result.",
                "token_logprobs": [-1.0, -1.2],
            }
        )
        entries.append(
            {
                "text": " ".join(simplified.split()[:2]),
                "token_logprobs": [-1.5, -0.9],
            }
        )
    return entries


def seed_manual_documents() -> list[ManualDocument]:
    """Fresh draft manuals for the two seed tasks.

    Steps carry only original text; simplification is the pipeline's
    job. The store replaces ids and timestamps on create.
    """
    now = utc_now()

    def build(title: str, pairs, tags: frozenset[str]) -> ManualDocument:
        steps = tuple(
            ManualStep(step_id=i, original_text=original)
            for i, (original, _) in enumerate(pairs, start=1)
        )
        return ManualDocument(
            manual_id="seed",
            title=title,
            steps=steps,
            tags=tags,
            version=1,
            created_at=now,
            updated_at=now,
        )

    return [
        build(COFFEE_TITLE, COFFEE_PAIRS, frozenset({"coffee", "kitchen", "term:dripper"})),
        build(MEETING_TITLE, MEETING_PAIRS, frozenset({"meeting", "office", "term:nameplates"})),
    ]


def seed_gold_samples() -> list[GoldSample]:
    """Positive verdicts for every corpus pair plus crafted negatives."""
    samples = [
        GoldSample(
            original_text=original,
            simplified_text=simplified,
            verdict=1,
            source=GoldSource.SEEDED,
            raw_probability=0.75,
        )
        for original, simplified in CORPUS_PAIRS
    ]
    # Negatives: bloated, gutted, and untouched rewrites drawn from the
    # corpus so both verdict classes exist from the start.
    for original, simplified in (COFFEE_PAIRS[0], MEETING_PAIRS[0], COFFEE_PAIRS[7]):
        samples.append(
            GoldSample(
                original_text=original,
                simplified_text=original + " Do this carefully and double-check the result.",
                verdict=0,
                source=GoldSource.SEEDED,
                error_label=ErrorClass.TOO_LONG,
                raw_probability=0.30,
            )
        )
        samples.append(
            GoldSample(
                original_text=original,
                simplified_text=" ".join(simplified.split()[:2]),
                verdict=0,
                source=GoldSource.SEEDED,
                error_label=ErrorClass.MEANING_ALTERED,
                raw_probability=0.25,
            )
        )
        samples.append(
            GoldSample(
                original_text=original,
                simplified_text=original,
                verdict=0,
                source=GoldSource.SEEDED,
                error_label=ErrorClass.SYNTACTICALLY_COMPLEX,
                raw_probability=0.35,
            )
        )
    return samples


def seed_store(store: ManualStore) -> list[str]:
    """Load the seed manuals and gold samples; returns new manual ids."""
    ids = [store.create_manual(doc) for doc in seed_manual_documents()]
    for sample in seed_gold_samples():
        store.append_gold(sample)
    return ids

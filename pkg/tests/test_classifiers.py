import random

import httpx
import pytest

from artext.classifiers import (
    ClassifierUnavailable,
    RemoteClassifier,
    RuleBasedClassifier,
    classify_rules,
    content_words,
    meaning_altered_score,
    syntactic_complexity_score,
    too_long_score,
)
from artext.types import ERROR_CLASSES, ErrorClass


def test_content_word_recall_worked_example():
    # "and" is a stopword, the six remaining words are content; the
    # candidate keeps two of them, so recall is 2/6.
    original = "Place dripper on mug and pour water"
    assert content_words(original) == {"place", "dripper", "on", "mug", "pour", "water"}
    score = meaning_altered_score(original, "Pour water")
    assert score == pytest.approx(1.0 - 2.0 / 6.0)
    assert score > 0.5  # fails the downstream meaning check


def test_meaning_score_zero_on_identity():
    text = "Grind the beans until coarse, about 20 seconds."
    assert meaning_altered_score(text, text) == 0.0


def test_meaning_score_on_real_pair_stays_low():
    # Hand-computed: original has 14 content words, candidate keeps 11
    # (transfer, place and digital are dropped).
    original = (
        "Transfer the coffee grounds to the filter cone. Then place the coffee "
        "mug with the dripper on a digital scale and set it to zero."
    )
    candidate = "Move grounds to filter cone. Set coffee mug with dripper on scale, zero it."
    assert meaning_altered_score(original, candidate) == pytest.approx(1.0 - 11.0 / 14.0)


def test_empty_candidate_scores_maximal_meaning_loss():
    probs = classify_rules("Pour the water.", "")
    assert probs.prob_of(ErrorClass.MEANING_ALTERED) == 1.0
    assert probs.prob_of(ErrorClass.TOO_LONG) == 0.0


def test_empty_original_rejected():
    with pytest.raises(ValueError):
        classify_rules("   ", "Pour water.")


def test_complexity_counts_clause_markers():
    assert syntactic_complexity_score("Pour water") == 0.0
    assert syntactic_complexity_score("Fold the filter and place it in the dripper") == 0.25
    crowded = "Pour water and wait because the filter drips while it drains and cools"
    # and, because, while, and -> 4 markers, saturated
    assert syntactic_complexity_score(crowded) == 1.0
    assert syntactic_complexity_score("Pour, wait, serve, repeat, enjoy, finish" * 5) == 0.0


def test_too_long_is_a_strict_indicator():
    assert too_long_score("abcd", "abcde") == 1.0
    assert too_long_score("abcd", "abcd") == 0.0
    assert too_long_score("abcd", "abc") == 0.0


def test_too_long_monotone_over_prefixes():
    rng = random.Random(7)
    alphabet = "abcdefg hij"
    for _ in range(200):
        original = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 30)))
        candidate = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 40)))
        cut = rng.randint(0, len(candidate))
        assert too_long_score(original, candidate[:cut]) <= too_long_score(original, candidate)


def test_classify_is_deterministic_and_bounded():
    rng = random.Random(11)
    words = ["pour", "water", "mug", "filter", "and", "slowly", "the", "set"]
    for _ in range(100):
        original = " ".join(rng.choices(words, k=rng.randint(1, 12)))
        candidate = " ".join(rng.choices(words, k=rng.randint(0, 12)))
        first = classify_rules(original, candidate)
        second = classify_rules(original, candidate)
        assert first == second
        assert all(0.0 <= p <= 1.0 for p in first.probs)


def test_registry_permutation_permutes_probs():
    original = "Place dripper on mug and pour water"
    candidate = "Pour water"
    base = classify_rules(original, candidate)
    permuted_registry = (ErrorClass.TOO_LONG, ErrorClass.MEANING_ALTERED,
                         ErrorClass.SYNTACTICALLY_COMPLEX)
    permuted = classify_rules(original, candidate, registry=permuted_registry)
    for cls_, p in zip(permuted_registry, permuted.probs):
        assert p == base.probs[ERROR_CLASSES.index(cls_)]


def test_rule_classifier_object_matches_function():
    clf = RuleBasedClassifier()
    assert clf.classify("Pour the water.", "Pour water.") == classify_rules(
        "Pour the water.", "Pour water."
    )


def _mock_remote(handler):
    transport = httpx.MockTransport(handler)
    client = httpx.Client(transport=transport)
    return RemoteClassifier("http://classifier.test/score", client=client)


def test_remote_classifier_roundtrip():
    def handler(request):
        assert request.url.path == "/score"
        return httpx.Response(200, json={"probs": [0.2, 0.1, 0.0], "classifier_id": "learned-v2"})

    clf = _mock_remote(handler)
    probs = clf.classify("Pour the water.", "Pour water.")
    assert probs.classifier_id == "learned-v2"
    assert probs.probs == (0.2, 0.1, 0.0)


def test_remote_classifier_down_raises_unavailable():
    def handler(request):
        raise httpx.ConnectError("refused")

    with pytest.raises(ClassifierUnavailable):
        _mock_remote(handler).classify("Pour the water.", "Pour water.")


def test_remote_classifier_bad_reply_raises_unavailable():
    def handler(request):
        return httpx.Response(200, json={"probs": [0.2], "classifier_id": "x"})

    with pytest.raises(ClassifierUnavailable):
        _mock_remote(handler).classify("Pour the water.", "Pour water.")

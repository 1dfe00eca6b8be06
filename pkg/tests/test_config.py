import json

import pytest

from artext.classifiers import RuleBasedClassifier
from artext.config import (
    AppConfig,
    BackendConfig,
    ClassifierConfig,
    ConfigError,
    load_config,
    make_backend,
    make_classifier,
)
from artext.prompting import ScriptedBackend


def test_defaults_without_a_file():
    config = load_config(None)
    assert config.backend.mode == "mock"
    assert config.classifier.mode == "rule"
    assert config.sample_count == 5
    assert config.plan_temperature == 0.0
    assert config.candidate_temperature == 0.7
    assert config.display.chars_per_line == 40
    assert config.training.epochs == 500
    assert config.api_token is None


def test_file_overrides_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(
        json.dumps(
            {
                "store_dir": str(tmp_path / "data"),
                "sample_count": 3,
                "backend": {"mode": "http", "endpoint": "http://llm.local/v1", "model": "m1"},
                "display": {"chars_per_line": 32, "max_lines": 4},
                "training": {"seed": 99},
                "api_token": "hunter2",
            }
        )
    )
    config = load_config(path)
    assert config.sample_count == 3
    assert config.backend.endpoint == "http://llm.local/v1"
    assert config.display.max_lines == 4
    assert config.training.seed == 99
    assert config.training.epochs == 500
    assert config.api_token == "hunter2"


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"samples": 3}))
    with pytest.raises(ConfigError, match="unknown config keys"):
        load_config(path)


def test_bad_json_and_bad_root(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{nope")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(path)
    path.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="root must be"):
        load_config(path)


def test_mode_validation():
    with pytest.raises(ConfigError):
        BackendConfig(mode="carrier-pigeon")
    with pytest.raises(ConfigError):
        BackendConfig(mode="http")  # no endpoint
    with pytest.raises(ConfigError):
        ClassifierConfig(mode="remote")  # no endpoint
    with pytest.raises(ConfigError):
        AppConfig(sample_count=0)


def test_make_backend_mock_requires_fixture(tmp_path):
    with pytest.raises(ConfigError, match="fixture_path"):
        make_backend(AppConfig())
    fixture = tmp_path / "f.json"
    fixture.write_text(json.dumps([{"text": "Hi.", "token_logprobs": None}]))
    backend = make_backend(
        AppConfig(backend=BackendConfig(mode="mock", fixture_path=str(fixture)))
    )
    assert isinstance(backend, ScriptedBackend)


def test_make_classifier_rule_default():
    assert isinstance(make_classifier(AppConfig()), RuleBasedClassifier)

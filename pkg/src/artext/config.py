"""Runtime configuration for the service and CLI.

Config files are plain JSON. Every key is optional; omitted keys take
the defaults below, so an empty file (or no file at all) yields a
working local setup with the scripted backend and rule classifier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .classifiers import ErrorClassifier, RemoteClassifier, RuleBasedClassifier
from .prompting import LlmBackend, HttpBackend, ScriptedBackend
from .validators import DisplayProfile

__all__ = [
    "BackendConfig",
    "ClassifierConfig",
    "TrainingDefaults",
    "AppConfig",
    "ConfigError",
    "load_config",
    "make_backend",
    "make_classifier",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    mode: str = "mock"
    fixture_path: str | None = None
    endpoint: str = ""
    model: str = ""
    api_key: str | None = None
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.mode not in ("mock", "http"):
            raise ConfigError(f"backend.mode must be 'mock' or 'http', got {self.mode!r}")
        if self.mode == "http" and not self.endpoint:
            raise ConfigError("backend.mode 'http' requires backend.endpoint")


@dataclass(frozen=True)
class ClassifierConfig:
    mode: str = "rule"
    endpoint: str = ""
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.mode not in ("rule", "remote"):
            raise ConfigError(f"classifier.mode must be 'rule' or 'remote', got {self.mode!r}")
        if self.mode == "remote" and not self.endpoint:
            raise ConfigError("classifier.mode 'remote' requires classifier.endpoint")


@dataclass(frozen=True)
class TrainingDefaults:
    learning_rate: float = 0.1
    epochs: int = 500
    seed: int = 13


@dataclass(frozen=True)
class AppConfig:
    store_dir: str = "artext-data"
    backend: BackendConfig = field(default_factory=BackendConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    display: DisplayProfile = field(default_factory=DisplayProfile)
    sample_count: int = 5
    plan_temperature: float = 0.0
    candidate_temperature: float = 0.7
    meaning_threshold: float = 0.5
    exemplar_order_seed: int = 0
    template_path: str | None = None
    training: TrainingDefaults = field(default_factory=TrainingDefaults)
    api_token: str | None = None
    host: str = "127.0.0.1"
    port: int = 8571

    def __post_init__(self):
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")
        if not 0.0 < self.meaning_threshold <= 1.0:
            raise ConfigError("meaning_threshold must be in (0, 1]")


def _section(raw: Mapping[str, Any], key: str) -> dict[str, Any]:
    value = raw.get(key, {})
    if not isinstance(value, Mapping):
        raise ConfigError(f"config section {key!r} must be an object")
    return dict(value)


def parse_config(raw: Mapping[str, Any]) -> AppConfig:
    known = {
        "store_dir",
        "backend",
        "classifier",
        "display",
        "sample_count",
        "plan_temperature",
        "candidate_temperature",
        "meaning_threshold",
        "exemplar_order_seed",
        "template_path",
        "training",
        "api_token",
        "host",
        "port",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return AppConfig(
            store_dir=raw.get("store_dir", "artext-data"),
            backend=BackendConfig(**_section(raw, "backend")),
            classifier=ClassifierConfig(**_section(raw, "classifier")),
            display=DisplayProfile(**_section(raw, "display")),
            sample_count=raw.get("sample_count", 5),
            plan_temperature=raw.get("plan_temperature", 0.0),
            candidate_temperature=raw.get("candidate_temperature", 0.7),
            meaning_threshold=raw.get("meaning_threshold", 0.5),
            exemplar_order_seed=raw.get("exemplar_order_seed", 0),
            template_path=raw.get("template_path"),
            training=TrainingDefaults(**_section(raw, "training")),
            api_token=raw.get("api_token"),
            host=raw.get("host", "127.0.0.1"),
            port=raw.get("port", 8571),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is None:
        return AppConfig()
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(raw)


def make_backend(config: AppConfig) -> LlmBackend:
    """Build a fresh backend instance.

    Callers should invoke this once per simplification request. The
    scripted backend carries a cursor, and sharing one across requests
    would make responses depend on request history.
    """
    bc = config.backend
    if bc.mode == "http":
        return HttpBackend(
            endpoint=bc.endpoint,
            model=bc.model,
            api_key=bc.api_key,
            timeout_s=bc.timeout_s,
        )
    if bc.fixture_path is None:
        raise ConfigError("backend.mode 'mock' requires backend.fixture_path")
    return ScriptedBackend.from_file(bc.fixture_path)


def make_classifier(config: AppConfig) -> ErrorClassifier:
    cc = config.classifier
    if cc.mode == "remote":
        return RemoteClassifier(endpoint=cc.endpoint, timeout_s=cc.timeout_s)
    return RuleBasedClassifier()

"""Prompt construction, plan parsing, and LLM backends.

Prompts are plain text with labeled blocks (INPUT / CONTEXT / THOUGHTS /
PLAN / OUTPUT). Simplification is a two-call protocol: a deterministic
planning call (temperature 0) whose reply is parsed into a
SimplificationPlan, then a sampling call that embeds the plan verbatim
and asks for n candidate rewrites.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .spatial import summarize_context
from .types import (
    CandidateSet,
    CandidateSimplification,
    PlanAction,
    SimplificationPlan,
    SpatialContext,
)

__all__ = [
    "Exemplar",
    "PromptTemplate",
    "LlmRequest",
    "LlmSample",
    "LlmResponse",
    "LlmBackend",
    "ScriptedBackend",
    "HttpBackend",
    "MalformedPlan",
    "UnknownTechnique",
    "BackendUnavailable",
    "BackendReturnedWrongCount",
    "DEFAULT_SYSTEM_PREAMBLE",
    "render_actions",
    "render_plan",
    "render_exemplar",
    "build_plan_prompt",
    "build_execution_prompt",
    "parse_plan",
    "candidate_probability",
    "generate_candidates",
    "simplify_plan_then_execute",
    "save_template",
    "load_template",
]


class MalformedPlan(ValueError):
    """The model's reply has no parseable plan block."""


class UnknownTechnique(ValueError):
    """A plan line names a technique outside the registered four."""


class BackendUnavailable(RuntimeError):
    """The LLM backend cannot be reached or refused the request."""


class BackendReturnedWrongCount(RuntimeError):
    """The backend returned a different number of samples than asked."""


DEFAULT_SYSTEM_PREAMBLE = """\
You rewrite step-by-step task instructions for a small head-worn display.
Follow three guidelines:
1. Preserve meaning: keep every detail the task needs to succeed.
2. Respect the display: the panel is narrow, so favor short lines, plain
   words, and one action per sentence.
3. Prefer brevity over grammar: terse fragments beat full sentences when
   they save a line.
Four techniques are available, and a plan may combine them:
- content reduction: drop words and asides the task does not need
- syntactic simplification: split long sentences, straighten clause order
- lexical simplification: replace uncommon words with everyday ones
- elaborative simplification: add a short cue that prevents a mistake
Given an INPUT and its CONTEXT, first write THOUGHTS about what makes it
hard to follow, then a numbered PLAN of techniques, then the OUTPUT text."""


@dataclass(frozen=True)
class Exemplar:
    """One worked example shown to the model before the query."""

    input_text: str
    thoughts: str
    plan: tuple[PlanAction, ...]
    output_text: str
    spatial_context_summary: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "plan", tuple(self.plan))
        if not self.input_text.strip():
            raise ValueError("exemplar input_text must be nonempty")
        if not self.thoughts.strip():
            raise ValueError("exemplar thoughts must be nonempty")
        if not self.plan:
            raise ValueError("exemplar needs at least one plan action")
        if not self.output_text.strip():
            raise ValueError("exemplar output_text must be nonempty")


@dataclass(frozen=True)
class PromptTemplate:
    """Preamble plus exemplars; ordering is a pure function of the seed."""

    system_preamble: str
    exemplars: tuple[Exemplar, ...]
    exemplar_order_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "exemplars", tuple(self.exemplars))
        if not self.system_preamble.strip():
            raise ValueError("system_preamble must be nonempty")
        if not self.exemplars:
            raise ValueError("template needs at least one exemplar")

    def ordered_exemplars(self) -> tuple[Exemplar, ...]:
        order = list(range(len(self.exemplars)))
        random.Random(self.exemplar_order_seed).shuffle(order)
        return tuple(self.exemplars[i] for i in order)


@dataclass(frozen=True)
class LlmRequest:
    prompt: str
    sample_count: int
    temperature: float
    max_output_tokens: int = 256

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class LlmSample:
    text: str
    token_logprobs: tuple[float, ...] | None = None


@dataclass(frozen=True)
class LlmResponse:
    samples: tuple[LlmSample, ...]


class LlmBackend(Protocol):
    def complete(self, request: LlmRequest) -> LlmResponse: ...


# --- rendering ---------------------------------------------------------

def render_actions(actions: Sequence[PlanAction]) -> str:
    if not actions:
        return "none"
    return "\n".join(
        f"{i}. {a.technique_name}: {a.description}".rstrip()
        for i, a in enumerate(actions, start=1)
    )


def render_plan(plan: SimplificationPlan) -> str:
    return f"THOUGHTS: {plan.thoughts}\nPLAN:\n{render_actions(plan.actions)}"


def render_exemplar(exemplar: Exemplar) -> str:
    context = exemplar.spatial_context_summary or "none"
    return (
        f"INPUT: {exemplar.input_text}\n"
        f"CONTEXT: {context}\n"
        f"THOUGHTS: {exemplar.thoughts}\n"
        f"PLAN:\n{render_actions(exemplar.plan)}\n"
        f"OUTPUT: {exemplar.output_text}"
    )


def _query_header(original: str, spatial: SpatialContext | None) -> str:
    return f"INPUT: {original}\nCONTEXT: {summarize_context(spatial)}"


def build_plan_prompt(
    original: str, spatial: SpatialContext | None, template: PromptTemplate
) -> str:
    """Few-shot prompt asking for thoughts and a plan. Byte-deterministic
    for fixed inputs and template."""
    blocks = [template.system_preamble]
    blocks.extend(render_exemplar(e) for e in template.ordered_exemplars())
    blocks.append(_query_header(original, spatial) + "\nTHOUGHTS:")
    return "\n\n".join(blocks)


def build_execution_prompt(
    original: str,
    plan: SimplificationPlan,
    spatial: SpatialContext | None,
    template: PromptTemplate,
) -> str:
    """Prompt for the sampling call; the plan appears verbatim."""
    blocks = [template.system_preamble]
    blocks.extend(render_exemplar(e) for e in template.ordered_exemplars())
    blocks.append(_query_header(original, spatial) + "\n" + render_plan(plan) + "\nOUTPUT:")
    return "\n\n".join(blocks)


# --- parsing -----------------------------------------------------------

_PLAN_MARKER_RE = re.compile(r"^\s*PLAN:\s*$", re.IGNORECASE | re.MULTILINE)
_OUTPUT_MARKER_RE = re.compile(r"^\s*OUTPUT:", re.IGNORECASE | re.MULTILINE)
_ACTION_LINE_RE = re.compile(r"^\s*\d+[.)]\s*(?P<body>.+?)\s*$")
_THOUGHTS_LABEL_RE = re.compile(r"^\s*THOUGHTS:\s*", re.IGNORECASE)


def parse_plan(raw: str) -> SimplificationPlan:
    """Recover a plan from model text.

    Numbered lines after the PLAN: marker become actions; anything else
    in the plan block ("none", "no changes needed") is ignored. A
    numbered line naming an unregistered technique is an error, never a
    silent drop.
    """
    marker = _PLAN_MARKER_RE.search(raw)
    if marker is None:
        raise MalformedPlan("no PLAN: block in model reply")

    thoughts = _THOUGHTS_LABEL_RE.sub("", raw[: marker.start()]).strip()

    tail = raw[marker.end():]
    out_marker = _OUTPUT_MARKER_RE.search(tail)
    plan_block = tail[: out_marker.start()] if out_marker else tail

    actions = []
    for line in plan_block.splitlines():
        match = _ACTION_LINE_RE.match(line)
        if match is None:
            continue
        body = match.group("body")
        name, _, description = body.partition(":")
        try:
            technique = PlanAction.technique_from_name(name)
        except ValueError:
            raise UnknownTechnique(f"unregistered technique {name.strip()!r}") from None
        actions.append(PlanAction(technique=technique, description=description.strip()))
    return SimplificationPlan(thoughts=thoughts, actions=tuple(actions))


# --- probabilities -----------------------------------------------------

def candidate_probability(token_logprobs: Sequence[float] | None, sample_count: int) -> float:
    """exp of the mean token log-probability; uniform 1/n without logprobs."""
    if not token_logprobs:
        return 1.0 / sample_count
    mean = sum(token_logprobs) / len(token_logprobs)
    return min(1.0, math.exp(mean))


# --- backends ----------------------------------------------------------

class ScriptedBackend:
    """Replays canned samples from a fixture, in order, wrapping around.

    The fixture is a JSON list of ``{"text": ..., "token_logprobs":
    [...]}`` entries; ``token_logprobs`` may be null. Each complete()
    call consumes ``sample_count`` entries.
    """

    def __init__(self, entries: Sequence[dict]):
        if not entries:
            raise BackendUnavailable("scripted backend fixture is empty")
        self._samples = tuple(
            LlmSample(
                text=e["text"],
                token_logprobs=(
                    None if e.get("token_logprobs") is None else tuple(e["token_logprobs"])
                ),
            )
            for e in entries
        )
        self._cursor = 0
        self.calls: list[LlmRequest] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        try:
            entries = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise BackendUnavailable(f"cannot read fixture {path}: {exc}") from exc
        return cls(entries)

    def complete(self, request: LlmRequest) -> LlmResponse:
        self.calls.append(request)
        picked = []
        for _ in range(request.sample_count):
            picked.append(self._samples[self._cursor % len(self._samples)])
            self._cursor += 1
        return LlmResponse(samples=tuple(picked))


class HttpBackend:
    """OpenAI-style chat completions client.

    ``endpoint`` is the full chat-completions URL. Transport failures
    and non-2xx replies raise BackendUnavailable; a reply with the
    wrong number of choices raises BackendReturnedWrongCount.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout_s: float = 30.0,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout_s)

    def complete(self, request: LlmRequest) -> LlmResponse:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "n": request.sample_count,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
            "logprobs": True,
        }
        try:
            resp = self._client.post(self.endpoint, json=payload, headers=self._headers)
            resp.raise_for_status()
            data = resp.json()
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"backend at {self.endpoint}: {exc}") from exc

        try:
            choices = data["choices"]
            samples = tuple(
                LlmSample(
                    text=c["message"]["content"],
                    token_logprobs=_choice_logprobs(c),
                )
                for c in choices
            )
        except (KeyError, TypeError) as exc:
            raise BackendUnavailable(f"malformed backend reply: {exc}") from exc
        if len(samples) != request.sample_count:
            raise BackendReturnedWrongCount(
                f"asked for {request.sample_count} samples, got {len(samples)}"
            )
        return LlmResponse(samples=samples)


def _choice_logprobs(choice: dict) -> tuple[float, ...] | None:
    lp = choice.get("logprobs")
    if not lp or not lp.get("content"):
        return None
    return tuple(float(tok["logprob"]) for tok in lp["content"])


# --- the two-call protocol ---------------------------------------------

def generate_candidates(
    original: str,
    plan: SimplificationPlan,
    spatial: SpatialContext | None,
    template: PromptTemplate,
    backend: LlmBackend,
    n: int = 5,
    temperature: float = 0.7,
) -> CandidateSet:
    """Sample n rewrites that follow the plan."""
    prompt = build_execution_prompt(original, plan, spatial, template)
    response = backend.complete(
        LlmRequest(prompt=prompt, sample_count=n, temperature=temperature)
    )
    if len(response.samples) != n:
        raise BackendReturnedWrongCount(
            f"asked for {n} samples, got {len(response.samples)}"
        )
    candidates = tuple(
        CandidateSimplification(
            text=sample.text.strip(),
            raw_probability=candidate_probability(sample.token_logprobs, n),
            candidate_index=i,
        )
        for i, sample in enumerate(response.samples)
    )
    return CandidateSet(original_text=original, candidates=candidates, n=n)


def simplify_plan_then_execute(
    original: str,
    spatial: SpatialContext | None,
    template: PromptTemplate,
    backend: LlmBackend,
    n: int = 5,
    plan_temperature: float = 0.0,
    temperature: float = 0.7,
) -> tuple[SimplificationPlan, CandidateSet]:
    """Plan deterministically, then sample candidates that follow it."""
    plan_prompt = build_plan_prompt(original, spatial, template)
    reply = backend.complete(
        LlmRequest(prompt=plan_prompt, sample_count=1, temperature=plan_temperature)
    )
    plan = parse_plan(reply.samples[0].text)
    cset = generate_candidates(
        original, plan, spatial, template, backend, n=n, temperature=temperature
    )
    return plan, cset


# --- template persistence ----------------------------------------------

def _one_line(text: str) -> str:
    return " ".join(text.split())


def save_template(template: PromptTemplate, path: str | Path) -> None:
    """Write a template as one plain-text file with block markers."""
    lines = [f"SEED: {template.exemplar_order_seed}", "PREAMBLE:"]
    lines.extend(template.system_preamble.splitlines())
    for e in template.exemplars:
        lines.append("EXEMPLAR:")
        lines.append(f"INPUT: {_one_line(e.input_text)}")
        lines.append(f"CONTEXT: {_one_line(e.spatial_context_summary or 'none')}")
        lines.append(f"THOUGHTS: {_one_line(e.thoughts)}")
        lines.append("PLAN:")
        lines.extend(render_actions(e.plan).splitlines())
        lines.append(f"OUTPUT: {_one_line(e.output_text)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_template(path: str | Path) -> PromptTemplate:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith("SEED: "):
        raise ValueError(f"template file {path} must start with a SEED: line")
    seed = int(lines[0][len("SEED: "):])
    if len(lines) < 2 or lines[1] != "PREAMBLE:":
        raise ValueError(f"template file {path} needs a PREAMBLE: block")

    preamble_lines: list[str] = []
    i = 2
    while i < len(lines) and lines[i] != "EXEMPLAR:":
        preamble_lines.append(lines[i])
        i += 1

    exemplars = []
    while i < len(lines):
        assert lines[i] == "EXEMPLAR:"
        i += 1
        fields: dict[str, str] = {}
        plan_lines: list[str] = []
        while i < len(lines) and lines[i] != "EXEMPLAR:":
            line = lines[i]
            if line.startswith("PLAN:"):
                i += 1
                while i < len(lines) and not lines[i].startswith("OUTPUT:"):
                    plan_lines.append(lines[i])
                    i += 1
                continue
            for label in ("INPUT", "CONTEXT", "THOUGHTS", "OUTPUT"):
                prefix = f"{label}: "
                if line.startswith(prefix):
                    fields[label] = line[len(prefix):]
                    break
            i += 1
        plan = parse_plan("THOUGHTS: -\nPLAN:\n" + "\n".join(plan_lines)).actions
        context = fields.get("CONTEXT", "none")
        exemplars.append(
            Exemplar(
                input_text=fields["INPUT"],
                thoughts=fields["THOUGHTS"],
                plan=plan,
                output_text=fields["OUTPUT"],
                spatial_context_summary=None if context == "none" else context,
            )
        )
    return PromptTemplate(
        system_preamble="\n".join(preamble_lines),
        exemplars=tuple(exemplars),
        exemplar_order_seed=seed,
    )

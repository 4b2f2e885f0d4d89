"""Answer pipeline: route a query to its language's model group, generate
candidates from deterministic mock backends, rerank, emit a snapshot.

The mock backends stand in for small fine-tuned models: generation is a
pure function of (model, prompt) so every run is reproducible, and the
declared per-model latency parameters are only ever sampled by the
simulator's clock, never slept on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import Embedding, LanguageTag, cosine, count_tokens, detect_language, embed, normalize_text
from .costs import RERANKER_MODEL_ID, CostRecord
from .edge_types import MissRecord, Snapshot
from .errors import ConfigError, ContractViolation

OUTPUT_TOKEN_CAP = 256


@dataclass(frozen=True)
class LatencyModel:
    median_ms: float
    sigma: float

    def __post_init__(self) -> None:
        if self.median_ms < 0 or self.sigma < 0:
            raise ConfigError("latency parameters must be non-negative")


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    language: LanguageTag
    price_in: float
    price_out: float
    sim_latency_ms: LatencyModel

    def __post_init__(self) -> None:
        if self.price_in < 0 or self.price_out < 0:
            raise ConfigError(f"model {self.model_id!r} has a negative price")
        if not self.model_id:
            raise ConfigError("model_id must be non-empty")


@dataclass(frozen=True)
class Candidate:
    model_id: str
    text: str
    language: LanguageTag
    output_tokens: int
    embedding: Embedding


@dataclass(frozen=True)
class RerankWeights:
    """Per-language linear scorer weights."""

    w_lang: float = 1.0
    w_sim: float = 0.5
    w_len: float = -0.001
    prior: Mapping[str, float] = field(default_factory=dict)


class ModelRegistry:
    """The set of available mock models; exactly one default (other-language)."""

    def __init__(self, models: Sequence[ModelSpec]):
        if not models:
            raise ConfigError("model registry is empty")
        ids = [m.model_id for m in models]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate model_id in registry")
        defaults = [m for m in models if m.language is LanguageTag.OTHER]
        if len(defaults) != 1:
            raise ConfigError(
                f"registry must contain exactly one default (language=other) model, found {len(defaults)}"
            )
        self._models = sorted(models, key=lambda m: m.model_id)
        self.default = defaults[0]

    def __iter__(self):
        return iter(self._models)

    def __len__(self) -> int:
        return len(self._models)

    def get(self, model_id: str) -> ModelSpec:
        for m in self._models:
            if m.model_id == model_id:
                return m
        raise KeyError(model_id)


def route(registry: ModelRegistry, lang: LanguageTag) -> list[ModelSpec]:
    """Models serving a language group: the group's models plus the default."""
    matches = [m for m in registry if m.language is lang]
    if registry.default not in matches:
        matches.append(registry.default)
    return sorted(matches, key=lambda m: m.model_id)


def generate(model: ModelSpec, prompt: str) -> Candidate:
    """Deterministic mock inference.

    The text is a tagged echo of the prompt; the declared output size
    models the answer the real model would have produced (twice the prompt
    tokens, capped), which is what the cost accounting charges for.
    """
    if not prompt:
        raise ContractViolation("prompt must be non-empty")
    text = f"[{model.model_id}] " + normalize_text(prompt)[:64]
    return Candidate(
        model_id=model.model_id,
        text=text,
        language=model.language,
        output_tokens=min(OUTPUT_TOKEN_CAP, 2 * count_tokens(prompt)),
        embedding=embed(text),
    )


def rerank(
    candidates: Sequence[Candidate],
    query_embedding: Embedding,
    query_lang: LanguageTag,
    weights: RerankWeights,
) -> list[Candidate]:
    """Order candidates by the linear score, best first; ties break on model_id."""
    if not candidates:
        raise ContractViolation("cannot rerank an empty candidate list")

    def score(c: Candidate) -> float:
        return (
            weights.w_lang * (1.0 if c.language is query_lang else 0.0)
            + weights.w_sim * cosine(c.embedding, query_embedding)
            + weights.w_len * max(0, c.output_tokens - OUTPUT_TOKEN_CAP)
            + weights.prior.get(c.model_id, 0.0)
        )

    return sorted(candidates, key=lambda c: (-score(c), c.model_id))


class EnsembleNode:
    """Backend answer node: owns snapshot versions per (user, key)."""

    def __init__(
        self,
        registry: ModelRegistry,
        weights_by_lang: Mapping[LanguageTag, RerankWeights] | None = None,
        instrumentation=None,
    ):
        self.registry = registry
        self.weights_by_lang = dict(weights_by_lang or {})
        self._versions: dict[tuple[str, int], int] = {}
        self._instrumentation = instrumentation

    def weights_for(self, lang: LanguageTag) -> RerankWeights:
        return self.weights_by_lang.get(lang, RerankWeights())

    def answer(self, miss: MissRecord, now: int) -> tuple[Snapshot, list[CostRecord]]:
        """Answer one miss: route, generate, rerank, version, account.

        Pure apart from the per-key version counter: the same miss always
        produces the same text, with the version advancing by one.
        """
        if self._instrumentation is not None:
            self._instrumentation.llm_call()
        lang = miss.language_hint or detect_language(miss.query_text)
        models = route(self.registry, lang)
        candidates = [generate(m, miss.query_text) for m in models]
        query_embedding = embed(miss.query_text)
        ranked = rerank(candidates, query_embedding, lang, self.weights_for(lang))
        winner = ranked[0]

        version_key = (miss.user_id, miss.key.value)
        version = self._versions.get(version_key, 0) + 1
        self._versions[version_key] = version

        snapshot = Snapshot(
            user_id=miss.user_id,
            key=miss.key,
            answer_text=winner.text,
            language=winner.language,
            model_id=winner.model_id,
            embedding=query_embedding,
            version=version,
            generated_at=now,
        )
        input_tokens = count_tokens(miss.query_text)
        records = [
            CostRecord(c.model_id, input_tokens, c.output_tokens, occurred_at=now)
            for c in candidates
        ]
        records.append(
            CostRecord(
                RERANKER_MODEL_ID,
                0,
                sum(c.output_tokens for c in candidates),
                occurred_at=now,
            )
        )
        return snapshot, records

"""Wire-visible domain records exchanged between client, edge, and backend."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Embedding, LanguageTag, QueryKey
from .errors import ContractViolation


@dataclass(frozen=True)
class Snapshot:
    """A versioned cached answer for one (user, query-key)."""

    user_id: str
    key: QueryKey
    answer_text: str
    language: LanguageTag
    model_id: str
    embedding: Embedding
    version: int
    generated_at: int

    def __post_init__(self) -> None:
        if self.version < 1:
            raise ContractViolation("snapshot version must be >= 1")
        if self.generated_at < 0:
            raise ContractViolation("generated_at must be non-negative")


@dataclass(frozen=True)
class QueryRequest:
    """What the copilot sends: already-redacted text only."""

    user_id: str
    session_id: str
    query_text: str
    language_hint: Optional[LanguageTag] = None


@dataclass(frozen=True)
class QueryResponse:
    status: str  # "hit" | "miss_enqueued"
    snapshot: Optional[Snapshot] = None
    similarity: Optional[float] = None
    age_ms: Optional[int] = None

    def __post_init__(self) -> None:
        if self.status not in ("hit", "miss_enqueued"):
            raise ContractViolation(f"unknown status {self.status!r}")
        if (self.status == "hit") != (self.snapshot is not None):
            raise ContractViolation("status=hit iff a snapshot is present")
        if self.age_ms is not None and self.age_ms < 0:
            raise ContractViolation("age_ms must be non-negative")


@dataclass(frozen=True)
class MissRecord:
    """A query the edge could not serve, queued for the backend."""

    user_id: str
    key: QueryKey
    query_text: str
    language_hint: Optional[LanguageTag]
    enqueued_at: int

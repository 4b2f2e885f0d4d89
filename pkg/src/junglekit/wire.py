"""JSON wire encoding shared by the HTTP protocol, the snapshot log, and
the action log: field names follow the domain records exactly, query keys
travel as 16-char lowercase hex, timestamps as integer milliseconds."""

from __future__ import annotations

import json
from typing import Any, Optional

from .core import Embedding, LanguageTag, QueryKey
from .edge_types import MissRecord, QueryRequest, QueryResponse, Snapshot
from .errors import ContractViolation


def dumps(obj: dict[str, Any]) -> str:
    """Canonical JSON: no whitespace padding, keys in insertion order."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _language(value: Optional[str]) -> Optional[LanguageTag]:
    return None if value is None else LanguageTag.from_code(value)


def snapshot_to_wire(s: Snapshot) -> dict[str, Any]:
    return {
        "user_id": s.user_id,
        "key": s.key.hex,
        "answer_text": s.answer_text,
        "language": s.language.value,
        "model_id": s.model_id,
        "embedding": s.embedding.tolist(),
        "version": s.version,
        "generated_at": s.generated_at,
    }


def snapshot_from_wire(data: dict[str, Any]) -> Snapshot:
    try:
        return Snapshot(
            user_id=data["user_id"],
            key=QueryKey.from_hex(data["key"]),
            answer_text=data["answer_text"],
            language=LanguageTag.from_code(data["language"]),
            model_id=data["model_id"],
            embedding=Embedding.from_list(data["embedding"]),
            version=int(data["version"]),
            generated_at=int(data["generated_at"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractViolation(f"malformed snapshot: {exc}") from exc


def query_request_to_wire(r: QueryRequest) -> dict[str, Any]:
    return {
        "user_id": r.user_id,
        "session_id": r.session_id,
        "query_text": r.query_text,
        "language_hint": r.language_hint.value if r.language_hint else None,
    }


def query_request_from_wire(data: dict[str, Any]) -> QueryRequest:
    try:
        return QueryRequest(
            user_id=data["user_id"],
            session_id=data["session_id"],
            query_text=data["query_text"],
            language_hint=_language(data.get("language_hint")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractViolation(f"malformed query request: {exc}") from exc


def query_response_to_wire(r: QueryResponse) -> dict[str, Any]:
    return {
        "status": r.status,
        "snapshot": snapshot_to_wire(r.snapshot) if r.snapshot else None,
        "similarity": r.similarity,
        "age_ms": r.age_ms,
    }


def query_response_from_wire(data: dict[str, Any]) -> QueryResponse:
    snapshot = data.get("snapshot")
    return QueryResponse(
        status=data["status"],
        snapshot=snapshot_from_wire(snapshot) if snapshot else None,
        similarity=data.get("similarity"),
        age_ms=data.get("age_ms"),
    )


def miss_record_to_wire(m: MissRecord) -> dict[str, Any]:
    return {
        "user_id": m.user_id,
        "key": m.key.hex,
        "query_text": m.query_text,
        "language_hint": m.language_hint.value if m.language_hint else None,
        "enqueued_at": m.enqueued_at,
    }


def miss_record_from_wire(data: dict[str, Any]) -> MissRecord:
    return MissRecord(
        user_id=data["user_id"],
        key=QueryKey.from_hex(data["key"]),
        query_text=data["query_text"],
        language_hint=_language(data.get("language_hint")),
        enqueued_at=int(data["enqueued_at"]),
    )

"""Stable 64-bit query keys via FNV-1a over normalized text."""

from __future__ import annotations

from dataclasses import dataclass

from .text import normalize_text

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash of a byte string."""
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


@dataclass(frozen=True, order=True)
class QueryKey:
    """Identity of a query, shared by every component that caches answers."""

    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value <= _MASK64:
            raise ValueError(f"query key out of 64-bit range: {self.value}")

    @property
    def hex(self) -> str:
        """16-char lowercase hex, the wire encoding of a key."""
        return f"{self.value:016x}"

    @classmethod
    def from_hex(cls, text: str) -> "QueryKey":
        if len(text) != 16:
            raise ValueError(f"expected 16 hex chars, got {text!r}")
        return cls(int(text, 16))


def query_key(text: str) -> QueryKey:
    """Key a query by hashing its normalized form.

    Whitespace and casing differences collapse to the same key, so a
    retyped query lands on the same cached answer.
    """
    return QueryKey(fnv1a64(normalize_text(text).encode("utf-8")))

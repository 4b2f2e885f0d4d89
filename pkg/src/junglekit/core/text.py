"""Text normalization and the byte-based token estimate used for cost accounting."""

from __future__ import annotations

import re

# Explicit whitespace class so the browser client can reproduce it exactly:
# ASCII whitespace, NEL, and the Unicode space separators / line separators.
_WHITESPACE_RE = re.compile(
    "[\t\n\x0b\x0c\r    -     　]+"
)


def normalize_text(text: str) -> str:
    """Lowercase (simple Unicode case mapping) and collapse whitespace runs.

    Idempotent; leading and trailing whitespace is dropped.
    """
    return _WHITESPACE_RE.sub(" ", text.lower()).strip(" ")


def count_tokens(text: str) -> int:
    """Estimate token count as ceil(UTF-8 bytes / 4)."""
    return (len(text.encode("utf-8")) + 3) // 4

"""PII detection and reversible redaction.

Spans are expressed in UTF-8 byte offsets so the browser client (which
re-implements these rules in TypeScript) produces bit-identical results;
the shared test-vector file locks both sides together. Detection is
rule-based on purpose: emails, phone numbers, and Luhn-valid card numbers
cover the identifiers that must never leave the user's session.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..errors import ContractViolation


class PIIKind(str, Enum):
    EMAIL = "email"
    PHONE = "phone"
    CARD = "card"


@dataclass(frozen=True, order=True)
class PIISpan:
    """Half-open [start, end) byte range of one detected identifier."""

    start: int
    end: int
    kind: PIIKind


# All patterns are ASCII-only, so byte-level matching can never split a
# multi-byte UTF-8 sequence.
_EMAIL_RE = re.compile(rb"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+")
# Maximal digit runs with single separators; validity is decided by digit count.
_PHONE_RE = re.compile(rb"\+?[0-9](?:[-. ()]?[0-9])*")
_CARD_RE = re.compile(rb"[0-9](?:[- ]?[0-9])*")

_PLACEHOLDER_RE = re.compile(r"⟦PII:(\d+)⟧")

# Resolution priority when candidate spans overlap.
_PRIORITY = {PIIKind.CARD: 0, PIIKind.EMAIL: 1, PIIKind.PHONE: 2}


def luhn_valid(digits: str) -> bool:
    """Luhn checksum over a digit string (True for valid card numbers)."""
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = ord(ch) - 48
        if i % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


def _candidates(data: bytes) -> list[PIISpan]:
    found: list[PIISpan] = []
    for m in _CARD_RE.finditer(data):
        digits = bytes(b for b in m.group() if 48 <= b <= 57).decode("ascii")
        if 13 <= len(digits) <= 19 and luhn_valid(digits):
            found.append(PIISpan(m.start(), m.end(), PIIKind.CARD))
    for m in _EMAIL_RE.finditer(data):
        found.append(PIISpan(m.start(), m.end(), PIIKind.EMAIL))
    for m in _PHONE_RE.finditer(data):
        digit_count = sum(1 for b in m.group() if 48 <= b <= 57)
        if 7 <= digit_count <= 15:
            found.append(PIISpan(m.start(), m.end(), PIIKind.PHONE))
    return found


def detect_pii(text: str) -> list[PIISpan]:
    """Find PII spans, sorted by start and mutually non-overlapping.

    Overlaps resolve card > email > phone, then leftmost-longest.
    """
    data = text.encode("utf-8")
    ranked = sorted(
        _candidates(data),
        key=lambda s: (_PRIORITY[s.kind], s.start, -(s.end - s.start)),
    )
    accepted: list[PIISpan] = []
    for cand in ranked:
        if all(cand.end <= kept.start or cand.start >= kept.end for kept in accepted):
            accepted.append(cand)
    return sorted(accepted, key=lambda s: s.start)


def _check_spans(data: bytes, spans: list[PIISpan]) -> None:
    prev_end = 0
    for span in spans:
        if not (0 <= span.start < span.end <= len(data)):
            raise ContractViolation(f"span out of range: {span}")
        if span.start < prev_end:
            raise ContractViolation(f"spans overlap or are unsorted at {span}")
        prev_end = span.end


def redact(text: str, spans: list[PIISpan]) -> tuple[str, dict[int, str]]:
    """Replace each span with a numbered placeholder; return the originals.

    The placeholder map stays on the caller's side of the privacy boundary;
    ``restore`` inverts the substitution exactly.
    """
    data = text.encode("utf-8")
    _check_spans(data, spans)
    out = bytearray()
    originals: dict[int, str] = {}
    cursor = 0
    for i, span in enumerate(spans):
        out += data[cursor : span.start]
        out += f"⟦PII:{i}⟧".encode("utf-8")
        originals[i] = data[span.start : span.end].decode("utf-8")
        cursor = span.end
    out += data[cursor:]
    return out.decode("utf-8"), originals


def restore(redacted: str, originals: dict[int, str]) -> str:
    """Inverse of ``redact``: inline the originals back into the text."""

    def _replace(m: re.Match[str]) -> str:
        idx = int(m.group(1))
        if idx not in originals:
            raise ContractViolation(f"placeholder {idx} missing from map")
        return originals[idx]

    return _PLACEHOLDER_RE.sub(_replace, redacted)

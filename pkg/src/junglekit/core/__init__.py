"""Pure domain functions shared by every component: normalization,
embeddings, token estimates, language tagging, PII handling, query keys."""

from .embedding import DIMS, Embedding, cosine, embed
from .keys import FNV64_OFFSET, QueryKey, fnv1a64, query_key
from .language import EN_STOPWORDS, FR_STOPWORDS, LanguageTag, detect_language
from .pii import PIIKind, PIISpan, detect_pii, luhn_valid, redact, restore
from .text import count_tokens, normalize_text

__all__ = [
    "DIMS",
    "Embedding",
    "cosine",
    "embed",
    "FNV64_OFFSET",
    "QueryKey",
    "fnv1a64",
    "query_key",
    "EN_STOPWORDS",
    "FR_STOPWORDS",
    "LanguageTag",
    "detect_language",
    "PIIKind",
    "PIISpan",
    "detect_pii",
    "luhn_valid",
    "redact",
    "restore",
    "count_tokens",
    "normalize_text",
]

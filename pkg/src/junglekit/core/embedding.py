"""Deterministic 256-dim character-trigram embeddings for semantic matching.

Trigrams of the normalized text are feature-hashed with FNV-1a into a fixed
vector and L2-normalized. No model weights, no randomness: the same text
always embeds to the same vector, which is what makes cache behavior
reproducible across runs and components.
"""

from __future__ import annotations

import numpy as np

from .keys import fnv1a64
from .text import normalize_text

DIMS = 256
_NORM_TOL = 1e-9


class Embedding:
    """A unit-norm (or all-zero) vector of ``DIMS`` float64 components."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (DIMS,):
            raise ValueError(f"embedding must have shape ({DIMS},), got {arr.shape}")
        norm = float(np.linalg.norm(arr))
        if norm != 0.0 and abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"embedding must be unit-norm or zero, norm={norm!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    @property
    def is_zero(self) -> bool:
        return not self.values.any()

    def dot(self, other: "Embedding") -> float:
        return float(np.dot(self.values, other.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Embedding):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"Embedding(norm={self.norm:.3f}, nonzero={int(np.count_nonzero(self.values))})"

    def tolist(self) -> list[float]:
        return self.values.tolist()

    @classmethod
    def zero(cls) -> "Embedding":
        return cls(np.zeros(DIMS))

    @classmethod
    def from_list(cls, values: list[float]) -> "Embedding":
        return cls(np.asarray(values, dtype=np.float64))


def embed(text: str) -> Embedding:
    """Embed text by hashed trigram counts of its normalized form.

    Inputs shorter than one trigram (after normalization) map to the zero
    vector, which by convention never matches anything.
    """
    normalized = normalize_text(text)
    if len(normalized) < 3:
        return Embedding.zero()
    counts = np.zeros(DIMS, dtype=np.float64)
    for i in range(len(normalized) - 2):
        trigram = normalized[i : i + 3]
        counts[fnv1a64(trigram.encode("utf-8")) % DIMS] += 1.0
    counts /= np.linalg.norm(counts)
    return Embedding(counts)


def cosine(a: Embedding, b: Embedding) -> float:
    """Cosine similarity; zero vectors have similarity 0 with everything."""
    if a.is_zero or b.is_zero:
        return 0.0
    return a.dot(b)

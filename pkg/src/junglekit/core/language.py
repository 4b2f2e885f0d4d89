"""Rule-based language tagging for routing queries to model groups.

Script detection decides the non-Latin languages; a small stopword vote
separates English from French. Anything ambiguous falls back to English,
which routes to the default model group.
"""

from __future__ import annotations

from enum import Enum


class LanguageTag(str, Enum):
    EN = "en"
    FR = "fr"
    HI = "hi"
    TH = "th"
    ZH = "zh"
    TA = "ta"
    OTHER = "other"

    @classmethod
    def from_code(cls, code: str) -> "LanguageTag":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown language tag: {code!r}") from None


# Script block -> tag, checked against alphabetic code points only.
_SCRIPT_RANGES: dict[LanguageTag, tuple[int, int]] = {
    LanguageTag.HI: (0x0900, 0x097F),  # Devanagari
    LanguageTag.TA: (0x0B80, 0x0BFF),  # Tamil
    LanguageTag.TH: (0x0E00, 0x0E7F),  # Thai
    LanguageTag.ZH: (0x4E00, 0x9FFF),  # CJK Unified Ideographs
}

_SCRIPT_SHARE_THRESHOLD = 0.30

EN_STOPWORDS = frozenset(
    """the a an and or but of to in on at by for with from as is are was were
    be been it its this that these those i you he she we they what which who
    how when where not no do does did can could will would my your our please
    about""".split()
)

FR_STOPWORDS = frozenset(
    """le la les un une des du de et ou mais dans sur pour par avec sans est
    sont était être il elle nous vous ils elles ce cette ces que qui quoi
    comment quand où ne pas mon ma mes ton ta tes son sa ses au aux en je tu
    quel quelle combien""".split()
)


def detect_language(text: str) -> LanguageTag:
    """Tag text with the best-guess language of its author.

    If at least 30% of alphabetic code points sit in one of the known
    script blocks the corresponding tag wins (highest share first, then
    lexicographic tag order). Otherwise English and French stopword hits
    are counted over whitespace-split lowercased tokens; ties and empty
    input resolve to English.
    """
    alpha_total = 0
    script_counts = {tag: 0 for tag in _SCRIPT_RANGES}
    for ch in text:
        if not ch.isalpha():
            continue
        alpha_total += 1
        cp = ord(ch)
        for tag, (lo, hi) in _SCRIPT_RANGES.items():
            if lo <= cp <= hi:
                script_counts[tag] += 1
                break
    if alpha_total:
        shares = [
            (count / alpha_total, tag)
            for tag, count in script_counts.items()
            if count / alpha_total >= _SCRIPT_SHARE_THRESHOLD
        ]
        if shares:
            best_share = max(share for share, _ in shares)
            return min(tag for share, tag in shares if share == best_share)

    tokens = text.lower().split()
    en_hits = sum(1 for t in tokens if t in EN_STOPWORDS)
    fr_hits = sum(1 for t in tokens if t in FR_STOPWORDS)
    if fr_hits > en_hits:
        return LanguageTag.FR
    return LanguageTag.EN

"""Seeded workload generation: a global, read-heavy, long-tailed population.

Users get a region, a language, an SMB/enterprise class, and a Pareto-tailed
data size that drives how many distinct questions they rotate through. The
event stream interleaves reads (queries), occasional data-refresh writes,
and session starts; every draw comes from a labeled stream so the stream is
byte-stable for a given (config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..core import LanguageTag
from ..rng import stream
from .config import SimConfig

QUERY = "query"
WRITE = "write"
SESSION_START = "session_start"

# Raw-text templates per language; {code} keeps queries distinct per user slot.
_TEMPLATES: dict[LanguageTag, list[str]] = {
    LanguageTag.EN: [
        "what is the shipping cost for item {code}",
        "when will order {code} arrive at the buyer",
        "how are sales trending for listing {code} this month",
        "why was the return opened for item {code}",
    ],
    LanguageTag.FR: [
        "quel est le prix de la livraison pour l'article {code}",
        "quand est-ce que la commande {code} sera chez le client",
        "comment sont les ventes pour l'annonce {code} ce mois",
    ],
    LanguageTag.HI: [
        "वस्तु {code} की शिपिंग लागत क्या है",
        "आदेश {code} कब पहुंचेगा ग्राहक के पास",
        "इस महीने {code} की बिक्री कैसी है",
    ],
    LanguageTag.TH: [
        "ค่าส่งของสินค้า {code} เท่าไหร่",
        "คำสั่งซื้อ {code} จะถึงเมื่อไร",
        "ยอดขายของ {code} เดือนนี้เป็นอย่างไร",
    ],
    LanguageTag.ZH: [
        "商品 {code} 的运费是多少",
        "订单 {code} 什么时候送达买家",
        "{code} 这个月的销售趋势怎么样",
    ],
    LanguageTag.TA: [
        "பொருள் {code} அனுப்புகை கட்டணம் எவ்வளவு",
        "ஆர்டர் {code} எப்போது வாங்குபவரை அடையும்",
        "இந்த மாதம் {code} விற்பனை எப்படி உள்ளது",
    ],
}
_TEMPLATES[LanguageTag.OTHER] = _TEMPLATES[LanguageTag.EN]

# Raw-side PII snippets the copilot must scrub before anything leaves the session.
_PII_SNIPPETS = [
    "contact me at seller{n}@example.com",
    "call me on +1 415 555 {n:04d}",
    "card 4111 1111 1111 1111 on file",
    "reach buyer{n}@shop-mail.net about this",
]


@dataclass(frozen=True)
class SimUser:
    user_id: str
    region: str
    language: LanguageTag
    smb: bool
    data_tokens: int
    repertoire: tuple[str, ...]  # raw (unredacted) query texts


@dataclass(frozen=True)
class Event:
    time_ms: int
    seq: int
    kind: str
    user_index: int
    slot: int = 0
    pii_snippet: Optional[str] = None

    def raw_text(self, users: list[SimUser]) -> str:
        user = users[self.user_index]
        text = user.repertoire[self.slot]
        if self.pii_snippet is not None:
            text = f"{text} {self.pii_snippet}"
        return text


def _repertoire_size(data_tokens: int, min_tokens: int) -> int:
    # long-tail users hold more data and rotate through more questions
    return min(40, max(3, round(3 + 3 * math.log2(data_tokens / min_tokens + 1))))


def build_users(config: SimConfig) -> list[SimUser]:
    regions = [r.name for r in config.regions]
    region_weights = [r.user_weight for r in config.regions]
    langs = list(config.languages.keys())
    lang_weights = [config.languages[l] for l in langs]
    users: list[SimUser] = []
    for i in range(config.num_users):
        user_stream = stream(config.seed, "user", i)
        region = user_stream.choice_weighted(regions, region_weights)
        language = user_stream.choice_weighted(langs, lang_weights)
        smb = user_stream.bernoulli(config.smb_fraction)
        data_tokens = int(
            user_stream.pareto(
                config.data_size_distribution.alpha,
                float(config.data_size_distribution.min_tokens),
            )
        )
        if not smb:
            data_tokens *= 10  # enterprise sellers carry far more catalog data
        size = _repertoire_size(data_tokens, config.data_size_distribution.min_tokens)
        templates = _TEMPLATES[language]
        repertoire = tuple(
            templates[slot % len(templates)].format(code=f"{i}-{slot}")
            for slot in range(size)
        )
        users.append(
            SimUser(
                user_id=f"user-{i:04d}",
                region=region,
                language=language,
                smb=smb,
                data_tokens=data_tokens,
                repertoire=repertoire,
            )
        )
    return users


def generate_events(config: SimConfig, users: list[SimUser]) -> list[Event]:
    """The timed event stream, sorted by (time, sequence number)."""
    if config.duration_ms == 0 or config.num_queries == 0:
        return []
    s = stream(config.seed, "events")
    total = round(config.num_queries * (1.0 + 1.0 / config.read_write_ratio))
    read_probability = config.read_write_ratio / (1.0 + config.read_write_ratio)
    events: list[Event] = []
    for seq in range(total):
        t = int(s.uniform() * config.duration_ms)
        user_index = s.randint(0, len(users) - 1)
        is_read = s.bernoulli(read_probability)
        slot = s.randint(0, len(users[user_index].repertoire) - 1)
        pii: Optional[str] = None
        if is_read and s.bernoulli(config.pii_injection_rate):
            snippet = _PII_SNIPPETS[s.randint(0, len(_PII_SNIPPETS) - 1)]
            pii = snippet.replace("{n:04d}", f"{s.randint(0, 9999):04d}").replace(
                "{n}", str(s.randint(1, 999))
            )
        events.append(
            Event(
                time_ms=t,
                seq=seq,
                kind=QUERY if is_read else WRITE,
                user_index=user_index,
                slot=slot,
                pii_snippet=pii,
            )
        )
    # one session start per user at their earliest activity
    first_seen: dict[int, int] = {}
    for e in events:
        if e.user_index not in first_seen or e.time_ms < first_seen[e.user_index]:
            first_seen[e.user_index] = e.time_ms
    session_events = [
        Event(time_ms=t, seq=total + idx, kind=SESSION_START, user_index=u)
        for idx, (u, t) in enumerate(sorted(first_seen.items()))
    ]
    events.extend(session_events)
    events.sort(key=lambda e: (e.time_ms, e.seq))
    return events


def event_to_wire(event: Event, users: list[SimUser]) -> dict:
    """Event record for the workload dump (redacted text is not computed here;
    the dump shows the raw generator output)."""
    data = {
        "time_ms": event.time_ms,
        "seq": event.seq,
        "kind": event.kind,
        "user_id": users[event.user_index].user_id,
    }
    if event.kind in (QUERY, WRITE):
        data["slot"] = event.slot
        data["raw_text"] = event.raw_text(users)
    return data

"""Regenerate testvectors/core_vectors.tsv from the reference implementation.

Run after any deliberate change to normalization, keying, or PII rules:

    python scripts/make_vectors.py

Both conformance suites (Python and the browser client) consume the file;
a change here is a protocol change and both sides must keep passing.
"""

from pathlib import Path

from junglekit.core import detect_pii, query_key, redact

INPUTS = [
    "",
    "   ",
    "hello world",
    "  Hello   World ",
    "Thé  CRÈME brûlée",
    "İstanbul Iıi",
    "a\u00a0b\u3000c\u2009d",
    "what is the shipping cost for item 3-1",
    "quel est le prix de la livraison pour l'article 7-2",
    "ราคาสินค้า 42 เท่าไหร่",
    "वस्तु 9 की शिपिंग लागत क्या है",
    "商品 12 的运费是多少",
    "பொருள் 5 அனுப்புகை கட்டணம் எவ்வளவு",
    "reach me at a@b.com today",
    "two mails a@b.com and long.name+tag@sub.domain.org here",
    "user123456789@shop.com",
    "call +1 415 555 0133 now",
    "call (415) 555-0133 or 415.555.0134",
    "my number is 5551234",
    "4111 1111 1111 1111",
    "card 4111-1111-1111-1111 on file",
    "pay 4111 1111 1111 1112 now",
    "amex 340000000000009 accepted",
    "order 1234567890 shipped",
    "no identifiers here",
    "prix élevé: écrire à client@magasin.fr ou +33 1 42 68 53 00",
    "ลูกค้า ส่งถึง buyer@shop.co.th โทร 02 123 4567",
    "商品咨询 seller@store.cn 电话 +86 10 1234 5678",
    "visit ⟦not a placeholder⟧ aisle",
    "mixed a@b.com then 4111 1111 1111 1111 then +1 202 555 0100",
]


def escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")
    )


def main() -> None:
    rows = ["# input\tquery_key\tpii_spans\tredacted"]
    for text in INPUTS:
        spans = detect_pii(text)
        redacted, _ = redact(text, spans)
        span_field = ",".join(f"{s.start}:{s.end}:{s.kind.value}" for s in spans) or "-"
        rows.append(
            "\t".join([escape(text), query_key(text).hex, span_field, escape(redacted)])
        )
    out = Path(__file__).resolve().parent.parent / "testvectors" / "core_vectors.tsv"
    out.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    print(f"wrote {out} ({len(INPUTS)} vectors)")


if __name__ == "__main__":
    main()

"""Walk through the pure text layer: normalization, token estimates,
language tagging, PII redaction, and stable query keys."""

from junglekit.core import (
    count_tokens,
    detect_language,
    detect_pii,
    embed,
    cosine,
    normalize_text,
    query_key,
    redact,
    restore,
)

print("== normalization ==")
for text in ["  Hello   World ", "Thé  CRÈME", "ราคา   สินค้า"]:
    print(f"{text!r:40} -> {normalize_text(text)!r}")

print("\n== token estimate (ceil of UTF-8 bytes / 4) ==")
for text in ["abcd", "hello world", "ราคาสินค้า"]:
    print(f"{text!r:30} -> {count_tokens(text)} tokens")

print("\n== language tagging ==")
for text in [
    "what is the shipping cost",
    "quel est le prix de la livraison",
    "ราคาสินค้า 42 เท่าไหร่",
    "वस्तु 9 की शिपिंग लागत",
    "商品 12 的运费是多少",
    "பொருள் 5 கட்டணம்",
]:
    print(f"{text!r:45} -> {detect_language(text).value}")

print("\n== PII redaction round trip ==")
raw = "ship to buyer@example.com, card 4111 1111 1111 1111, call +1 415 555 0133"
spans = detect_pii(raw)
redacted, originals = redact(raw, spans)
print("raw:     ", raw)
print("spans:   ", [(s.start, s.end, s.kind.value) for s in spans])
print("redacted:", redacted)
print("restored:", restore(redacted, originals))
assert restore(redacted, originals) == raw

print("\n== query keys collapse retyping ==")
for text in ["what is my balance", "  What   IS my balance "]:
    print(f"{text!r:35} -> {query_key(text).hex}")

print("\n== embeddings measure phrasing similarity ==")
a = embed("what is the shipping cost for order 12")
b = embed("what is the shipping cost for order 12 ?")
c = embed("completely different question about returns")
print(f"near-duplicate cosine:  {cosine(a, b):.4f}")
print(f"unrelated cosine:       {cosine(a, c):.4f}")

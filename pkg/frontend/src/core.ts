/**
 * Client-side twin of the server's text layer: normalization, query keys,
 * PII detection/redaction, and trigram hash embeddings.
 *
 * This is a deliberate reimplementation, not shared code. The contract is
 * the shared vector file (testvectors/core_vectors.tsv): both sides must
 * produce identical keys, spans, and redacted text for every row. PII spans
 * are UTF-8 *byte* offsets, so all span work here goes through TextEncoder.
 */

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;

const encoder = new TextEncoder();
const decoder = new TextDecoder();

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET;
  for (const byte of data) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

// Must match the server's whitespace class exactly.
const WHITESPACE_RE =
  /[\t\n\x0b\x0c\r \u0085\u00a0\u1680\u2000-\u200a\u2028\u2029\u202f\u205f\u3000]+/g;

export function normalizeText(text: string): string {
  return text.toLowerCase().replace(WHITESPACE_RE, " ").replace(/^ | $/g, "");
}

export function countTokens(text: string): number {
  return Math.ceil(encoder.encode(text).length / 4);
}

export function queryKey(text: string): bigint {
  return fnv1a64(encoder.encode(normalizeText(text)));
}

export function keyHex(key: bigint): string {
  return key.toString(16).padStart(16, "0");
}

// ---------------------------------------------------------------------------
// PII
// ---------------------------------------------------------------------------

export type PiiKind = "email" | "phone" | "card";

export interface PiiSpan {
  start: number; // UTF-8 byte offset, inclusive
  end: number; // UTF-8 byte offset, exclusive
  kind: PiiKind;
}

const EMAIL_RE = /[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)+/g;
const PHONE_RE = /\+?[0-9](?:[-. ()]?[0-9])*/g;
const CARD_RE = /[0-9](?:[- ]?[0-9])*/g;

const PRIORITY: Record<PiiKind, number> = { card: 0, email: 1, phone: 2 };

export function luhnValid(digits: string): boolean {
  let total = 0;
  for (let i = 0; i < digits.length; i++) {
    let d = digits.charCodeAt(digits.length - 1 - i) - 48;
    if (i % 2 === 1) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    total += d;
  }
  return total % 10 === 0;
}

/** Cumulative UTF-8 byte length for every code-unit prefix of the string. */
function byteOffsets(text: string): Uint32Array {
  const offsets = new Uint32Array(text.length + 1);
  let bytes = 0;
  for (let i = 0; i < text.length; i++) {
    offsets[i] = bytes;
    const code = text.codePointAt(i)!;
    if (code < 0x80) bytes += 1;
    else if (code < 0x800) bytes += 2;
    else if (code < 0x10000) bytes += 3;
    else {
      bytes += 4;
      offsets[i + 1] = bytes; // low surrogate shares the code point
      i += 1;
      continue;
    }
  }
  offsets[text.length] = bytes;
  return offsets;
}

export function detectPii(text: string): PiiSpan[] {
  const toByte = byteOffsets(text);
  const candidates: PiiSpan[] = [];

  for (const match of text.matchAll(CARD_RE)) {
    const digits = match[0].replace(/[^0-9]/g, "");
    if (digits.length >= 13 && digits.length <= 19 && luhnValid(digits)) {
      candidates.push({
        start: toByte[match.index!]!,
        end: toByte[match.index! + match[0].length]!,
        kind: "card",
      });
    }
  }
  for (const match of text.matchAll(EMAIL_RE)) {
    candidates.push({
      start: toByte[match.index!]!,
      end: toByte[match.index! + match[0].length]!,
      kind: "email",
    });
  }
  for (const match of text.matchAll(PHONE_RE)) {
    const digitCount = match[0].replace(/[^0-9]/g, "").length;
    if (digitCount >= 7 && digitCount <= 15) {
      candidates.push({
        start: toByte[match.index!]!,
        end: toByte[match.index! + match[0].length]!,
        kind: "phone",
      });
    }
  }

  candidates.sort(
    (a, b) =>
      PRIORITY[a.kind] - PRIORITY[b.kind] ||
      a.start - b.start ||
      b.end - b.start - (a.end - a.start),
  );
  const accepted: PiiSpan[] = [];
  for (const cand of candidates) {
    if (accepted.every((kept) => cand.end <= kept.start || cand.start >= kept.end)) {
      accepted.push(cand);
    }
  }
  return accepted.sort((a, b) => a.start - b.start);
}

export type PlaceholderMap = Map<number, string>;

export function redact(text: string, spans: PiiSpan[]): { redacted: string; originals: PlaceholderMap } {
  const data = encoder.encode(text);
  let prevEnd = 0;
  for (const span of spans) {
    if (!(span.start >= 0 && span.start < span.end && span.end <= data.length)) {
      throw new Error(`span out of range: ${span.start}..${span.end}`);
    }
    if (span.start < prevEnd) throw new Error("spans overlap or are unsorted");
    prevEnd = span.end;
  }
  const parts: Uint8Array[] = [];
  const originals: PlaceholderMap = new Map();
  let cursor = 0;
  spans.forEach((span, i) => {
    parts.push(data.subarray(cursor, span.start));
    parts.push(encoder.encode(`⟦PII:${i}⟧`));
    originals.set(i, decoder.decode(data.subarray(span.start, span.end)));
    cursor = span.end;
  });
  parts.push(data.subarray(cursor));
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let at = 0;
  for (const part of parts) {
    out.set(part, at);
    at += part.length;
  }
  return { redacted: decoder.decode(out), originals };
}

export function restore(redacted: string, originals: PlaceholderMap): string {
  return redacted.replace(/⟦PII:(\d+)⟧/g, (whole, index: string) => {
    const original = originals.get(Number(index));
    if (original === undefined) throw new Error(`placeholder ${index} missing from map`);
    return original;
  });
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

export const EMBEDDING_DIMS = 256;

export function embed(text: string): Float64Array {
  const normalized = normalizeText(text);
  const points = Array.from(normalized);
  const vec = new Float64Array(EMBEDDING_DIMS);
  if (points.length < 3) return vec;
  for (let i = 0; i + 2 < points.length; i++) {
    const trigram = points[i]! + points[i + 1]! + points[i + 2]!;
    const bucket = Number(fnv1a64(encoder.encode(trigram)) % BigInt(EMBEDDING_DIMS));
    vec[bucket]! += 1;
  }
  let norm = 0;
  for (const v of vec) norm += v * v;
  norm = Math.sqrt(norm);
  for (let i = 0; i < vec.length; i++) vec[i]! /= norm;
  return vec;
}

export function isZero(vec: Float64Array): boolean {
  return vec.every((v) => v === 0);
}

export function cosine(a: Float64Array, b: Float64Array): number {
  if (isZero(a) || isZero(b)) return 0;
  let dot = 0;
  for (let i = 0; i < a.length; i++) dot += a[i]! * b[i]!;
  return dot;
}

/**
 * Cross-component conformance: every row of testvectors/core_vectors.tsv
 * must produce identical query keys, PII spans, and redacted text here and
 * in the Python package that generated the file.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";

import { detectPii, keyHex, PiiKind, queryKey, redact, restore } from "../src/core.js";

const here = dirname(fileURLToPath(import.meta.url));
const VECTORS = join(here, "..", "..", "testvectors", "core_vectors.tsv");

function unescape(text: string): string {
  let out = "";
  for (let i = 0; i < text.length; i++) {
    if (text[i] === "\\" && i + 1 < text.length) {
      const next = text[i + 1]!;
      out += next === "t" ? "\t" : next === "n" ? "\n" : next === "r" ? "\r" : next;
      i++;
    } else {
      out += text[i];
    }
  }
  return out;
}

interface Row {
  input: string;
  keyHex: string;
  spans: { start: number; end: number; kind: PiiKind }[];
  redacted: string;
}

function loadRows(): Row[] {
  const rows: Row[] = [];
  for (const line of readFileSync(VECTORS, "utf-8").split("\n")) {
    if (!line || line.startsWith("#")) continue;
    const [rawInput, key, spansField, rawRedacted] = line.split("\t");
    const spans =
      spansField === "-"
        ? []
        : spansField!.split(",").map((item) => {
            const [start, end, kind] = item.split(":");
            return { start: Number(start), end: Number(end), kind: kind as PiiKind };
          });
    rows.push({
      input: unescape(rawInput!),
      keyHex: key!,
      spans,
      redacted: unescape(rawRedacted!),
    });
  }
  return rows;
}

const rows = loadRows();

describe("shared core vectors", () => {
  it("has a usable vector file", () => {
    expect(rows.length).toBeGreaterThanOrEqual(20);
  });

  rows.forEach((row, index) => {
    it(`row ${index}: ${JSON.stringify(row.input.slice(0, 32))}`, () => {
      expect(keyHex(queryKey(row.input))).toBe(row.keyHex);
      const spans = detectPii(row.input);
      expect(spans).toEqual(row.spans);
      const { redacted, originals } = redact(row.input, spans);
      expect(redacted).toBe(row.redacted);
      expect(restore(redacted, originals)).toBe(row.input);
    });
  });
});

/** Shared test scaffolding: a scriptable transport and snapshot factory. */

import { countTokens, embed, keyHex, queryKey } from "../src/core.js";
import {
  QueryResult,
  Transport,
  WireQueryRequest,
  WireSnapshot,
} from "../src/transport.js";

export function makeSnapshot(queryText: string, overrides: Partial<WireSnapshot> = {}): WireSnapshot {
  return {
    user_id: "u-test",
    key: keyHex(queryKey(queryText)),
    answer_text: `[small-default] ${queryText}`,
    language: "en",
    model_id: "small-default",
    embedding: Array.from(embed(queryText)),
    version: 1,
    generated_at: 0,
    ...overrides,
  };
}

export type ScriptStep =
  | { kind: "miss" }
  | { kind: "hit"; snapshot: WireSnapshot; ageMs?: number }
  | { kind: "rejected" }
  | { kind: "network_error" };

/** Plays back a fixed script of responses and records every outbound payload. */
export class MockTransport implements Transport {
  readonly requests: WireQueryRequest[] = [];
  private script: ScriptStep[];

  constructor(script: ScriptStep[] = []) {
    this.script = [...script];
  }

  pushStep(step: ScriptStep): void {
    this.script.push(step);
  }

  get callCount(): number {
    return this.requests.length;
  }

  async postQuery(request: WireQueryRequest): Promise<QueryResult> {
    this.requests.push(request);
    const step = this.script.shift() ?? { kind: "miss" };
    switch (step.kind) {
      case "miss":
        return {
          kind: "ok",
          response: { status: "miss_enqueued", snapshot: null, similarity: null, age_ms: null },
        };
      case "hit":
        return {
          kind: "ok",
          response: {
            status: "hit",
            snapshot: step.snapshot,
            similarity: 1.0,
            age_ms: step.ageMs ?? 0,
          },
        };
      case "rejected":
        return { kind: "rejected", detail: "query_text contains unredacted PII" };
      case "network_error":
        return { kind: "network_error", detail: "connection refused" };
    }
  }
}

export { countTokens };

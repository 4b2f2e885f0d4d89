/**
 * The copilot session: redact, consult the session cache, ask the edge,
 * poll for queued answers, and keep the conversation log.
 *
 * The privacy rule is structural: the placeholder map holding PII originals
 * is keyed per conversation entry and only ever read by renderStatus(),
 * after the wire round trip. Nothing that leaves through the Transport can
 * contain an original, and the outbound text is re-checked before sending.
 */

import { SessionCache } from "./cache.js";
import {
  detectPii,
  embed,
  keyHex,
  PlaceholderMap,
  queryKey,
  redact,
  restore,
} from "./core.js";
import { Transport, WireSnapshot } from "./transport.js";

export type EntryStatus =
  | "local" // served from the session cache, no network
  | "answered" // served by the edge
  | "queued" // edge accepted a miss; polling for the snapshot
  | "offline" // network failure; polling doubles as retry
  | "client_bug"; // edge rejected the payload (redaction should prevent this)

export interface ConversationEntry {
  id: number;
  rawQuery: string;
  outboundText: string;
  keyHex: string;
  status: EntryStatus;
  source: "session" | "edge" | null;
  snapshot: WireSnapshot | null;
  similarity: number | null;
  ageMs: number | null;
  askedAt: number;
  nextPollAt: number | null;
  pollDelayMs: number;
  detail: string | null;
  originals: PlaceholderMap;
}

export interface SessionOptions {
  userId: string;
  sessionId: string;
  transport: Transport;
  languageHint?: string | null;
  clock?: () => number;
  initialPollDelayMs?: number;
  maxPollDelayMs?: number;
}

export const INITIAL_POLL_DELAY_MS = 2_000;
export const MAX_POLL_DELAY_MS = 30_000;

export class CopilotSession {
  readonly cache = new SessionCache<WireSnapshot>();
  readonly log: ConversationEntry[] = [];
  private nextId = 0;
  private readonly clock: () => number;
  private readonly initialDelay: number;
  private readonly maxDelay: number;

  constructor(private readonly options: SessionOptions) {
    this.clock = options.clock ?? (() => Date.now());
    this.initialDelay = options.initialPollDelayMs ?? INITIAL_POLL_DELAY_MS;
    this.maxDelay = options.maxPollDelayMs ?? MAX_POLL_DELAY_MS;
  }

  get sessionId(): string {
    return this.options.sessionId;
  }

  now(): number {
    return this.clock();
  }

  /** End the session: browser-local memories do not outlive it. */
  end(): void {
    this.cache.clear();
    for (const entry of this.log) entry.originals.clear();
    this.log.length = 0;
  }

  async submitQuery(rawText: string): Promise<ConversationEntry> {
    if (!rawText.trim()) throw new Error("query must be non-empty");
    const { redacted, originals } = redact(rawText, detectPii(rawText));
    if (detectPii(redacted).length > 0) {
      throw new Error("redaction left detectable PII; refusing to transmit");
    }
    const entry: ConversationEntry = {
      id: this.nextId++,
      rawQuery: rawText,
      outboundText: redacted,
      keyHex: keyHex(queryKey(redacted)),
      status: "queued",
      source: null,
      snapshot: null,
      similarity: null,
      ageMs: null,
      askedAt: this.clock(),
      nextPollAt: null,
      pollDelayMs: this.initialDelay,
      detail: null,
      originals,
    };
    this.log.push(entry);

    const probe = embed(redacted);
    const local = this.cache.lookup(probe);
    if (local) {
      entry.status = "local";
      entry.source = "session";
      entry.snapshot = local.entry.value;
      entry.similarity = local.similarity;
      entry.ageMs = Math.max(0, this.clock() - local.entry.value.generated_at);
      return entry; // no network round trip at all
    }
    await this.askEdge(entry);
    return entry;
  }

  /** Re-query a pending entry if its poll timer has elapsed. */
  async pollPending(): Promise<void> {
    const now = this.clock();
    for (const entry of this.log) {
      if (
        (entry.status === "queued" || entry.status === "offline") &&
        entry.nextPollAt !== null &&
        now >= entry.nextPollAt
      ) {
        await this.askEdge(entry);
      }
    }
  }

  private async askEdge(entry: ConversationEntry): Promise<void> {
    const result = await this.options.transport.postQuery({
      user_id: this.options.userId,
      session_id: this.options.sessionId,
      query_text: entry.outboundText,
      language_hint: this.options.languageHint ?? null,
    });
    if (result.kind === "rejected") {
      entry.status = "client_bug";
      entry.detail = result.detail;
      entry.nextPollAt = null;
      return;
    }
    if (result.kind === "network_error") {
      entry.status = "offline";
      entry.detail = result.detail;
      this.scheduleNextPoll(entry);
      return;
    }
    const response = result.response;
    if (response.status === "hit" && response.snapshot) {
      entry.status = "answered";
      entry.source = "edge";
      entry.snapshot = response.snapshot;
      entry.similarity = response.similarity;
      entry.ageMs = response.age_ms;
      entry.nextPollAt = null;
      entry.detail = null;
      this.cache.put({
        key: BigInt("0x" + response.snapshot.key),
        embedding: Float64Array.from(response.snapshot.embedding),
        value: response.snapshot,
        version: response.snapshot.version,
      });
      return;
    }
    entry.status = "queued";
    entry.detail = null;
    this.scheduleNextPoll(entry);
  }

  private scheduleNextPoll(entry: ConversationEntry): void {
    entry.nextPollAt = this.clock() + entry.pollDelayMs;
    entry.pollDelayMs = Math.min(entry.pollDelayMs * 2, this.maxDelay);
  }
}

// ---------------------------------------------------------------------------
// view model
// ---------------------------------------------------------------------------

export interface EntryView {
  id: number;
  query: string; // originals re-inlined for display only
  answer: string | null;
  status: EntryStatus;
  sourceBadge: "session" | "edge" | null;
  ageBadge: string | null;
  model: string | null;
  pollCountdownMs: number | null;
  detail: string | null;
}

export interface SessionView {
  sessionId: string;
  empty: boolean;
  entries: EntryView[];
  pendingCount: number;
}

export function formatAge(ageMs: number): string {
  if (ageMs < 1_000) return "fresh";
  const seconds = Math.floor(ageMs / 1_000);
  if (seconds < 60) return `${seconds}s old`;
  return `${Math.floor(seconds / 60)}m ${seconds % 60}s old`;
}

export function renderStatus(session: CopilotSession): SessionView {
  const now = session.now();
  const entries = session.log.map((entry): EntryView => {
    const answered = entry.snapshot !== null;
    return {
      id: entry.id,
      query: restore(entry.outboundText, entry.originals),
      answer: answered ? restore(entry.snapshot!.answer_text, entry.originals) : null,
      status: entry.status,
      sourceBadge: entry.source,
      ageBadge: entry.ageMs !== null ? formatAge(entry.ageMs) : null,
      model: answered ? entry.snapshot!.model_id : null,
      pollCountdownMs: entry.nextPollAt !== null ? Math.max(0, entry.nextPollAt - now) : null,
      detail: entry.detail,
    };
  });
  return {
    sessionId: session.sessionId,
    empty: entries.length === 0,
    entries,
    pendingCount: entries.filter((e) => e.status === "queued" || e.status === "offline").length,
  };
}

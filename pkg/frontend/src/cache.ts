/**
 * Session-scoped semantic cache with the same semantics as the edge's
 * per-user store: cosine-threshold matching, LRU eviction, version-gated
 * replacement. Lives for one browser session and is never serialized.
 */

import { cosine, isZero } from "./core.js";

export interface SessionCacheEntry<T> {
  key: bigint;
  embedding: Float64Array;
  value: T;
  version: number;
}

export interface SessionHit<T> {
  entry: SessionCacheEntry<T>;
  similarity: number;
}

export class SessionCache<T> {
  private entries = new Map<bigint, SessionCacheEntry<T>>();

  constructor(
    readonly capacity = 128,
    readonly similarityThreshold = 0.85,
  ) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
  }

  get size(): number {
    return this.entries.size;
  }

  put(entry: SessionCacheEntry<T>): void {
    const existing = this.entries.get(entry.key);
    if (existing && entry.version <= existing.version) return; // stale replay
    this.entries.delete(entry.key);
    this.entries.set(entry.key, entry); // Map order doubles as LRU order
    while (this.entries.size > this.capacity) {
      const oldest = this.entries.keys().next().value as bigint;
      this.entries.delete(oldest);
    }
  }

  lookup(probe: Float64Array): SessionHit<T> | null {
    if (isZero(probe)) return null;
    let best: SessionCacheEntry<T> | null = null;
    let bestSim = -1;
    for (const entry of this.entries.values()) {
      const sim = cosine(probe, entry.embedding);
      if (sim > bestSim || (sim === bestSim && best !== null && entry.key < best.key)) {
        best = entry;
        bestSim = sim;
      }
    }
    if (best === null || bestSim < this.similarityThreshold) return null;
    this.entries.delete(best.key);
    this.entries.set(best.key, best); // refresh recency
    return { entry: best, similarity: bestSim };
  }

  clear(): void {
    this.entries.clear();
  }
}

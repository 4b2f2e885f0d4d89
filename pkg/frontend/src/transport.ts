/**
 * Edge wire protocol types and transports. Field names, hex keys, and
 * millisecond timestamps follow the edge contract verbatim.
 */

export interface WireSnapshot {
  user_id: string;
  key: string; // 16-char lowercase hex
  answer_text: string;
  language: string;
  model_id: string;
  embedding: number[];
  version: number;
  generated_at: number;
}

export interface WireQueryRequest {
  user_id: string;
  session_id: string;
  query_text: string;
  language_hint: string | null;
}

export interface WireQueryResponse {
  status: "hit" | "miss_enqueued";
  snapshot: WireSnapshot | null;
  similarity: number | null;
  age_ms: number | null;
}

export type QueryResult =
  | { kind: "ok"; response: WireQueryResponse }
  | { kind: "rejected"; detail: string } // HTTP 422: the privacy boundary fired
  | { kind: "network_error"; detail: string };

export interface Transport {
  postQuery(request: WireQueryRequest): Promise<QueryResult>;
}

export class HttpTransport implements Transport {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  async postQuery(request: WireQueryRequest): Promise<QueryResult> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/v1/query`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      });
    } catch (error) {
      return { kind: "network_error", detail: String(error) };
    }
    if (response.status === 422) {
      const body = (await response.json().catch(() => ({ error: "rejected" }))) as {
        error?: string;
      };
      return { kind: "rejected", detail: body.error ?? "rejected" };
    }
    if (!response.ok) {
      return { kind: "network_error", detail: `HTTP ${response.status}` };
    }
    return { kind: "ok", response: (await response.json()) as WireQueryResponse };
  }
}

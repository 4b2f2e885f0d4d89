/**
 * Minimal DOM wiring: a query box, the conversation log, and a poll loop.
 * All behavior lives in session.ts; this file only paints the view model.
 */

import { CopilotSession, renderStatus } from "./session.js";
import { HttpTransport } from "./transport.js";

const POLL_INTERVAL_MS = 500;

function paint(session: CopilotSession, root: HTMLElement): void {
  const view = renderStatus(session);
  const list = root.querySelector("#log")!;
  list.innerHTML = "";
  if (view.empty) {
    list.innerHTML = '<li class="empty">ask something about your shop</li>';
    return;
  }
  for (const entry of [...view.entries].reverse()) {
    const item = document.createElement("li");
    item.className = `entry ${entry.status}`;
    const badges = [
      entry.sourceBadge ? `<span class="badge">${entry.sourceBadge}</span>` : "",
      entry.ageBadge ? `<span class="badge">${entry.ageBadge}</span>` : "",
      entry.model ? `<span class="badge">${entry.model}</span>` : "",
    ].join("");
    const body =
      entry.answer !== null
        ? `<p class="answer">${entry.answer}</p>`
        : entry.status === "client_bug"
          ? `<p class="error">client bug: ${entry.detail ?? "rejected"}</p>`
          : entry.status === "offline"
            ? `<p class="pending">offline, retrying…</p>`
            : `<p class="pending">queued, refreshing${
                entry.pollCountdownMs !== null
                  ? ` in ${Math.ceil(entry.pollCountdownMs / 1000)}s`
                  : ""
              }</p>`;
    item.innerHTML = `<p class="query">${entry.query}</p>${body}${badges}`;
    list.appendChild(item);
  }
}

export function mount(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const session = new CopilotSession({
    userId: params.get("user") ?? "user-0000",
    sessionId: `s-${Math.random().toString(36).slice(2, 10)}`,
    transport: new HttpTransport(params.get("edge") ?? "http://127.0.0.1:8801"),
  });
  const form = root.querySelector("#ask") as HTMLFormElement;
  const input = root.querySelector("#q") as HTMLInputElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const text = input.value;
    if (!text.trim()) return;
    input.value = "";
    await session.submitQuery(text);
    paint(session, root);
  });
  window.addEventListener("beforeunload", () => session.end());
  setInterval(async () => {
    await session.pollPending();
    paint(session, root);
  }, POLL_INTERVAL_MS);
  paint(session, root);
}

if (typeof document !== "undefined" && document.getElementById("copilot")) {
  mount(document.getElementById("copilot")!);
}

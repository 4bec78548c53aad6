/** Browser shell: hash routing, event delegation, live updates over the
 * event stream (EventSource with polling fallback). Everything rendered
 * comes from render.ts string builders. */

import { ApiClient } from "./api.js";
import { DashboardStore } from "./state.js";
import {
  renderCdf,
  renderClusterExplorer,
  renderCsvButtons,
  renderOfflineBanner,
  renderQueue,
  renderRevenueTable,
  renderSankey,
  renderThread,
  renderTldTable,
} from "./render.js";

interface ShellConfig {
  baseUrl: string;
  token: string | null;
  pollMs: number;
}

function readConfig(): ShellConfig {
  const doc = (globalThis as { ANANSI_DASHBOARD?: Partial<ShellConfig> }).ANANSI_DASHBOARD ?? {};
  return {
    baseUrl: doc.baseUrl ?? "",
    token: doc.token ?? null,
    pollMs: doc.pollMs ?? 2000,
  };
}

export function startDashboard(root: HTMLElement): void {
  const config = readConfig();
  const api = new ApiClient(config.baseUrl, (url, init) => fetch(url, init), config.token);
  const store = new DashboardStore(api);

  const reportsCache: { html: string; atSeq: number } = { html: "", atSeq: -1 };

  async function renderReports(): Promise<string> {
    const [attrition, persistence, finance, infra, clusters] = await Promise.all([
      api.reportAttrition(), api.reportPersistence(), api.reportFinance(),
      api.reportInfra(), api.reportClusters(),
    ]);
    return `
      <h2>Attrition</h2>${renderSankey(attrition)}
      <h2>Scammer persistence</h2>${renderCdf(persistence)}
      <h2>Revenue</h2>${renderRevenueTable(finance)}
      <h2>TLD mix</h2>${renderTldTable(infra)}
      <h2>Clusters</h2>${renderClusterExplorer(clusters)}
      <p>${renderCsvButtons([
        { label: "revenue.csv", href: api.csvUrl("finance") },
        { label: "persistence.csv", href: api.csvUrl("persistence") },
        { label: "attrition.csv", href: api.csvUrl("attrition") },
      ])}</p>`;
  }

  async function draw(): Promise<void> {
    const hash = location.hash || "#queue";
    let body = "";
    if (hash.startsWith("#conversation/")) {
      const id = decodeURIComponent(hash.slice("#conversation/".length));
      if (store.activeConversation?.conversation_id !== id) {
        await store.openConversation(id);
      }
      body = store.activeConversation
        ? renderThread(store.activeConversation)
        : '<p class="empty">Conversation not found.</p>';
    } else if (hash === "#reports") {
      if (!reportsCache.html || reportsCache.atSeq < store.lastSeq) {
        try {
          reportsCache.html = await renderReports();
          reportsCache.atSeq = store.lastSeq;
        } catch {
          reportsCache.html = "";
          store.offline = true;
        }
      }
      body = reportsCache.html || '<p class="empty">Reports unavailable.</p>';
    } else {
      body = renderQueue(store.queue);
    }
    root.innerHTML = `
      ${renderOfflineBanner(store.offline)}
      <nav><a href="#queue">Queue (${store.queue.length})</a>
           <a href="#reports">Reports</a></nav>
      <main>${body}</main>`;
  }

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const button = target.closest("button.act") as HTMLElement | null;
    if (!button) return;
    const panel = button.closest(".escalation-panel") as HTMLElement | null;
    const thread = button.closest(".thread") as HTMLElement | null;
    if (!panel || !thread) return;
    const kind = button.dataset.kind as
      "approve_draft" | "edit_and_send" | "reject_draft";
    const body = (panel.querySelector(".edit-body") as HTMLTextAreaElement | null)?.value;
    void store.submitAction(
      {
        ticket_id: panel.dataset.ticket ?? "",
        conversation_id: thread.dataset.conversation ?? "",
      },
      kind,
      body,
    ).then((outcome) => {
      if (!outcome.ok && outcome.error) {
        const note = document.createElement("p");
        note.className = "action-error";
        note.textContent = outcome.error;
        panel.append(note);
      }
      reportsCache.html = "";
      reportsCache.atSeq = -1;
      void draw();
    });
  });

  store.onChange(() => void draw());
  addEventListener("hashchange", () => void draw());

  // live updates: prefer SSE, fall back to polling
  const EventSourceCtor = (globalThis as { EventSource?: typeof EventSource }).EventSource;
  if (EventSourceCtor) {
    const stream = new EventSourceCtor(`${config.baseUrl}/events?from_seq=0`);
    stream.onmessage = (message) => {
      try {
        const doc = JSON.parse(message.data) as { seq: number; kind: string };
        void store.onEvents([doc]);
      } catch {
        /* keepalive */
      }
    };
    stream.onerror = () => {
      store.offline = true;
      void draw();
    };
  } else {
    setInterval(() => void store.pollEvents(), config.pollMs);
  }

  void store.refreshQueue().then(() => draw());
}

const maybeDocument = (globalThis as { document?: Document }).document;
if (maybeDocument) {
  const root = maybeDocument.getElementById("app");
  if (root) startDashboard(root);
}

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, newActionToken } from "../src/api.js";
import {
  layoutSankey,
  renderCdf,
  renderOfflineBanner,
  renderQueue,
  renderRevenueTable,
  renderSankey,
  renderThread,
  renderTldTable,
} from "../src/render.js";
import { DashboardStore } from "../src/state.js";
import { FakeBackend } from "./fake_api.js";

function makeEnv() {
  const backend = new FakeBackend();
  backend.addConversation("c-alpha", [
    { ticket_id: "e-1", reason: "government_id_request",
      draft: "I'd rather not share that document.", opened_at: "2025-07-01T00:05:00+00:00" },
  ]);
  backend.addConversation("c-bravo", [
    { ticket_id: "e-2", reason: "low_confidence",
      draft: "Could you explain the task again?", opened_at: "2025-07-01T00:03:00+00:00" },
  ]);
  backend.addConversation("c-charlie", [
    { ticket_id: "e-3", reason: "voice_call_demand",
      draft: "I can't take calls at work.", opened_at: "2025-07-01T00:07:00+00:00" },
  ]);
  const api = new ApiClient("", backend.fetch);
  const store = new DashboardStore(api);
  return { backend, api, store };
}

describe("escalation queue", () => {
  it("renders all open items, oldest first", async () => {
    const { store } = makeEnv();
    await store.refreshQueue();
    expect(store.queue).toHaveLength(3);
    expect(store.queue.map((q) => q.ticket_id)).toEqual(["e-2", "e-1", "e-3"]);

    const html = renderQueue(store.queue);
    expect(html).toContain("e-2");
    expect(html.match(/escalation-row/g)).toHaveLength(3);
    // oldest first in the markup too
    expect(html.indexOf("e-2")).toBeLessThan(html.indexOf("e-1"));
    expect(html.indexOf("e-1")).toBeLessThan(html.indexOf("e-3"));
  });

  it("drops resolved items on refresh", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    await store.submitAction(
      { ticket_id: "e-2", conversation_id: "c-bravo" }, "reject_draft");
    expect(store.queue.map((q) => q.ticket_id)).toEqual(["e-1", "e-3"]);
    expect(backend.sentMessages("c-bravo")).toHaveLength(0); // reject sends nothing
  });
});

describe("operator actions", () => {
  it("approve round-trips: resolves the escalation with exactly one sent message", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    const outcome = await store.submitAction(
      { ticket_id: "e-1", conversation_id: "c-alpha" }, "approve_draft");
    expect(outcome.ok).toBe(true);
    expect(outcome.replayed).toBe(false);

    const sent = backend.sentMessages("c-alpha");
    expect(sent).toEqual(["I'd rather not share that document."]);
    const open = backend.openEscalations().map((t) => t.ticket_id);
    expect(open).not.toContain("e-1");
    // thread view shows the operator message
    const detail = backend.conversations.get("c-alpha")!;
    const html = renderThread(detail);
    expect(html).toContain("operator");
    expect(html).toContain("I&#39;d rather not share that document.");
  });

  it("double-submit produces exactly one state change", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    const item = { ticket_id: "e-1", conversation_id: "c-alpha" };
    const [first, second] = await Promise.all([
      store.submitAction(item, "approve_draft"),
      store.submitAction(item, "approve_draft"),
    ]);
    const third = await store.submitAction(item, "approve_draft");

    expect(backend.sentMessages("c-alpha")).toHaveLength(1);
    expect(backend.actions.size).toBe(1);
    const replays = [first, second, third].filter((o) => o.ok && o.replayed);
    expect(replays.length).toBeGreaterThanOrEqual(1);
    expect([first, second, third].every((o) => o.ok)).toBe(true);
  });

  it("edit_and_send validates the body client-side", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    const before = backend.requestLog.length;
    const outcome = await store.submitAction(
      { ticket_id: "e-1", conversation_id: "c-alpha" }, "edit_and_send", "   ");
    expect(outcome.ok).toBe(false);
    expect(outcome.error).toMatch(/must not be empty/);
    expect(backend.requestLog.length).toBe(before); // nothing hit the wire
  });

  it("edit_and_send sends the edited body once", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    const outcome = await store.submitAction(
      { ticket_id: "e-3", conversation_id: "c-charlie" },
      "edit_and_send", "Sorry, I can only text during shifts.");
    expect(outcome.ok).toBe(true);
    expect(backend.sentMessages("c-charlie"))
      .toEqual(["Sorry, I can only text during shifts."]);
  });

  it("surfaces API errors verbatim", async () => {
    const { store } = makeEnv();
    await store.refreshQueue();
    await store.submitAction({ ticket_id: "e-1", conversation_id: "c-alpha" },
                             "approve_draft");
    const again = await store.submitAction(
      { ticket_id: "e-1", conversation_id: "c-alpha" }, "reject_draft");
    expect(again.ok).toBe(false);
    expect(again.error).toMatch(/no open escalation|duplicate/);
  });
});

describe("offline behaviour", () => {
  it("keeps the cached queue and raises the banner", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    expect(store.queue).toHaveLength(3);
    backend.failNetwork = true;
    await store.refreshQueue();
    expect(store.offline).toBe(true);
    expect(store.queue).toHaveLength(3); // cached list retained
    expect(renderOfflineBanner(store.offline)).toContain("API unreachable");
    backend.failNetwork = false;
    await store.refreshQueue();
    expect(store.offline).toBe(false);
  });
});

describe("live updates", () => {
  it("event notifications refresh the queue", async () => {
    const { backend, store } = makeEnv();
    await store.refreshQueue();
    backend.addConversation("c-delta", [
      { ticket_id: "e-9", reason: "low_confidence", draft: "hm",
        opened_at: "2025-07-01T00:09:00+00:00" },
    ]);
    await store.pollEvents(); // no events yet -> queue unchanged
    expect(store.queue).toHaveLength(3);
    // resolving another ticket emits events; poll picks them up
    await store.submitAction({ ticket_id: "e-2", conversation_id: "c-bravo" },
                             "reject_draft");
    await store.pollEvents();
    expect(store.queue.map((q) => q.ticket_id)).toEqual(["e-1", "e-3", "e-9"]);
    expect(store.lastSeq).toBeGreaterThan(0);
  });
});

describe("report views", () => {
  it("renders the fixture sankey with every node and count", async () => {
    const { api } = makeEnv();
    const data = await api.reportAttrition();
    const svg = renderSankey(data);
    for (const node of data.nodes) {
      expect(svg).toContain(`${node.name} (${node.count})`);
    }
    expect(svg.match(/<path class="flow"/g)).toHaveLength(data.links.length);
    // layered layout: contacted sits left of delivered, which sits left of responded
    const layout = layoutSankey(data);
    const byName = new Map(layout.nodes.map((n) => [n.name, n]));
    expect(byName.get("contacted")!.x).toBeLessThan(byName.get("delivered")!.x);
    expect(byName.get("delivered")!.x).toBeLessThan(byName.get("responded")!.x);
  });

  it("renders a monotone step CDF ending at 1.0", async () => {
    const { api } = makeEnv();
    const series = await api.reportPersistence();
    const svg = renderCdf(series);
    expect(svg).toContain('data-days="0.5" data-fraction="0.5"');
    expect(svg).toContain('data-days="25" data-fraction="1"');
    expect(svg).toContain("final: 1 at 25d");
    const fractions = series.points.map((p) => p.fraction);
    expect([...fractions].sort((a, b) => a - b)).toEqual(fractions);
  });

  it("renders revenue rows in API order with exact money strings", async () => {
    const { api } = makeEnv();
    const report = await api.reportFinance();
    const html = renderRevenueTable(report);
    const order = report.rows.map((row) => html.indexOf(row.wallet));
    expect([...order].sort((a, b) => a - b)).toEqual(order);
    expect(html).toContain("42000.00");
    expect(html).toContain("47900.00"); // total verbatim from the API
    expect(html).toContain("—");        // walletless row placeholder
    const nets = report.rows.map((row) => Number(row.net_usd));
    expect([...nets].sort((a, b) => b - a)).toEqual(nets);
  });

  it("renders the TLD table", async () => {
    const { api } = makeEnv();
    const infra = await api.reportInfra();
    const html = renderTldTable(infra);
    expect(html).toContain(".club");
    expect(html).toContain("238.1");
  });
});

describe("tokens", () => {
  it("newActionToken is unique", () => {
    const seen = new Set<string>();
    for (let i = 0; i < 200; i += 1) seen.add(newActionToken());
    expect(seen.size).toBe(200);
  });
});

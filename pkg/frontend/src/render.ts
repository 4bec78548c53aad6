/** Pure HTML/SVG renderers. Everything returns a string so views are
 * testable without a DOM; the shell assigns innerHTML and delegates
 * events. Money and count values are rendered exactly as the API sent
 * them. */

import type {
  CdfSeries,
  ClusterReportView,
  ConversationDetail,
  EscalationItem,
  InfraReport,
  RevenueReport,
  SankeyData,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderOfflineBanner(offline: boolean): string {
  if (!offline) return "";
  return '<div class="banner offline" role="alert">API unreachable - showing cached data</div>';
}

// --- escalation queue --------------------------------------------------------

export function renderQueue(items: EscalationItem[]): string {
  if (!items.length) {
    return '<p class="empty">No open escalations.</p>';
  }
  const rows = items.map((item) => `
    <tr class="escalation-row" data-conversation="${escapeHtml(item.conversation_id)}"
        data-ticket="${escapeHtml(item.ticket_id)}">
      <td class="opened-at">${escapeHtml(item.opened_at)}</td>
      <td>${escapeHtml(item.scammer_phone)}</td>
      <td>${escapeHtml(item.stage)}</td>
      <td class="reason">${escapeHtml(item.reason)}</td>
      <td class="draft-preview">${escapeHtml((item.draft ?? "").slice(0, 80))}</td>
      <td><a href="#conversation/${escapeHtml(item.conversation_id)}">open</a></td>
    </tr>`).join("");
  return `<table class="queue">
    <thead><tr><th>opened</th><th>phone</th><th>stage</th><th>reason</th>
    <th>draft</th><th></th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

// --- conversation thread -------------------------------------------------------

export function renderThread(detail: ConversationDetail): string {
  const messages = detail.messages.map((message) => `
    <li class="msg ${message.direction}" data-index="${message.index}">
      <span class="meta">${escapeHtml(message.platform)}
        ${message.responder ? `· ${escapeHtml(message.responder)}` : ""}
        · ${escapeHtml(message.sent_at)}</span>
      <p>${escapeHtml(message.text)}</p>
    </li>`).join("");

  const open = detail.escalations.find((ticket) => !ticket.resolved);
  const panel = open ? `
    <div class="escalation-panel" data-ticket="${escapeHtml(open.ticket_id)}">
      <h3>Escalated: ${escapeHtml(open.reason)}</h3>
      <blockquote class="draft">${escapeHtml(open.draft ?? "(no draft)")}</blockquote>
      <textarea class="edit-body" placeholder="edit before sending"></textarea>
      <button class="act approve" data-kind="approve_draft">Approve &amp; send</button>
      <button class="act edit" data-kind="edit_and_send">Send edited</button>
      <button class="act reject" data-kind="reject_draft">Reject</button>
    </div>` : "";

  const persona = detail.persona ? `
    <aside class="persona">
      <h3>${escapeHtml(detail.persona.name)}, ${detail.persona.age}</h3>
      <p>${escapeHtml(detail.persona.city)}, ${escapeHtml(detail.persona.state)}
         · ${escapeHtml(detail.persona.occupation)}</p>
      <ul>${detail.persona.backstory.map(([key, answer]) =>
        `<li><b>${escapeHtml(key)}</b>: ${escapeHtml(answer)}</li>`).join("")}</ul>
    </aside>` : "";

  const indicators = detail.indicators.map((ind) =>
    `<li><code class="${escapeHtml(ind.kind)}">${escapeHtml(ind.value)}</code></li>`).join("");

  return `<section class="thread" data-conversation="${escapeHtml(detail.conversation_id)}">
    <header><h2>${escapeHtml(detail.scammer_phone)}</h2>
      <span class="stage">${escapeHtml(detail.stage)}</span>
      <span class="route">${detail.platform_route.map(escapeHtml).join(" → ")}</span>
    </header>
    ${panel}
    <ol class="messages">${messages}</ol>
    ${persona}
    <div class="indicators"><h3>Indicators</h3><ul>${indicators}</ul></div>
  </section>`;
}

// --- sankey -------------------------------------------------------------------

interface LaidOutNode {
  name: string;
  count: number;
  depth: number;
  x: number;
  y: number;
  height: number;
}

/** Column-layered layout: node depth is the longest link path from a
 * source; heights scale with counts. Pure geometry, data untouched. */
export function layoutSankey(data: SankeyData, width = 900, height = 420): {
  nodes: LaidOutNode[];
  links: { path: string; value: number; source: string; target: string }[];
} {
  const depths = new Array(data.nodes.length).fill(0);
  for (let pass = 0; pass < data.nodes.length; pass += 1) {
    let changed = false;
    for (const link of data.links) {
      if (depths[link.target] < depths[link.source] + 1) {
        depths[link.target] = depths[link.source] + 1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  const maxDepth = Math.max(0, ...depths);
  const columns: number[][] = Array.from({ length: maxDepth + 1 }, () => []);
  data.nodes.forEach((_, index) => columns[depths[index]].push(index));

  const maxCount = Math.max(1, ...data.nodes.map((node) => node.count));
  const nodeWidth = 14;
  const laid: LaidOutNode[] = new Array(data.nodes.length);
  columns.forEach((column, depth) => {
    const x = maxDepth === 0 ? 0 : (depth * (width - nodeWidth)) / maxDepth;
    let y = 0;
    for (const index of column) {
      const node = data.nodes[index];
      const h = Math.max(4, (node.count / maxCount) * (height - 20 * column.length));
      laid[index] = { name: node.name, count: node.count, depth, x, y, height: h };
      y += h + 20;
    }
  });

  const offsets = { out: new Array(data.nodes.length).fill(0),
                    into: new Array(data.nodes.length).fill(0) };
  const links = data.links.map((link) => {
    const source = laid[link.source];
    const target = laid[link.target];
    const scale = (node: LaidOutNode) => node.height / Math.max(1, node.count);
    const thickness = Math.max(1, link.value * Math.min(scale(source), scale(target)));
    const y0 = source.y + offsets.out[link.source] + thickness / 2;
    const y1 = target.y + offsets.into[link.target] + thickness / 2;
    offsets.out[link.source] += thickness;
    offsets.into[link.target] += thickness;
    const x0 = source.x + nodeWidth;
    const x1 = target.x;
    const mid = (x0 + x1) / 2;
    return {
      path: `M ${x0} ${y0} C ${mid} ${y0}, ${mid} ${y1}, ${x1} ${y1}`,
      value: link.value,
      source: source.name,
      target: target.name,
    };
  });
  return { nodes: laid, links };
}

export function renderSankey(data: SankeyData): string {
  if (!data.nodes.length) {
    return '<p class="empty">No attrition data yet.</p>';
  }
  const { nodes, links } = layoutSankey(data);
  const linkMarkup = links.map((link) => `
    <path class="flow" d="${link.path}" fill="none" stroke="#7aa1c0" stroke-opacity="0.45"
      stroke-width="${Math.max(1, link.value).toFixed(2)}">
      <title>${escapeHtml(link.source)} → ${escapeHtml(link.target)}: ${link.value}</title>
    </path>`).join("");
  const nodeMarkup = nodes.map((node) => `
    <g class="node" data-name="${escapeHtml(node.name)}" data-count="${node.count}">
      <rect x="${node.x.toFixed(1)}" y="${node.y.toFixed(1)}" width="14"
        height="${node.height.toFixed(1)}" fill="#2d5f8a"></rect>
      <text x="${(node.x + 18).toFixed(1)}" y="${(node.y + node.height / 2).toFixed(1)}"
        dominant-baseline="middle">${escapeHtml(node.name)} (${node.count})</text>
    </g>`).join("");
  return `<svg class="sankey" viewBox="0 0 1050 440" role="img">${linkMarkup}${nodeMarkup}</svg>`;
}

// --- persistence CDF -------------------------------------------------------------

export function renderCdf(series: CdfSeries): string {
  if (!series.points.length) {
    return '<p class="empty">No persistence data yet.</p>';
  }
  const width = 640;
  const height = 280;
  const maxDays = Math.max(...series.points.map((p) => p.days), 1);
  const x = (days: number) => (days / maxDays) * (width - 60) + 40;
  const y = (fraction: number) => height - 30 - fraction * (height - 60);
  // step function: horizontal to the next x, then vertical
  let d = `M ${x(0)} ${y(0)}`;
  let previous = 0;
  for (const point of series.points) {
    d += ` L ${x(point.days)} ${y(previous)} L ${x(point.days)} ${y(point.fraction)}`;
    previous = point.fraction;
  }
  d += ` L ${x(maxDays)} ${y(previous)}`;
  const final = series.points[series.points.length - 1];
  const markers = series.points.map((point) =>
    `<circle cx="${x(point.days).toFixed(1)}" cy="${y(point.fraction).toFixed(1)}" r="2.5"
       data-days="${point.days}" data-fraction="${point.fraction}"></circle>`).join("");
  return `<svg class="cdf" viewBox="0 0 ${width} ${height}" role="img">
    <path d="${d}" fill="none" stroke="#2d5f8a" stroke-width="2"></path>
    ${markers}
    <text x="${width - 180}" y="24" class="final">final: ${final.fraction} at ${final.days}d</text>
    <line x1="40" y1="${y(0)}" x2="${width - 20}" y2="${y(0)}" stroke="#999"></line>
    <line x1="40" y1="${y(0)}" x2="40" y2="${y(1)}" stroke="#999"></line>
  </svg>`;
}

// --- tables -----------------------------------------------------------------------

export function renderRevenueTable(report: RevenueReport): string {
  if (!report.rows.length) {
    return '<p class="empty">No revenue data yet.</p>';
  }
  const rows = report.rows.map((row) => `
    <tr data-wallet="${escapeHtml(row.wallet)}">
      <td>${row.domains.length ? row.domains.map(escapeHtml).join(" ") : "—"}</td>
      <td><a class="wallet" href="#wallet/${escapeHtml(row.wallet)}">
        <code>${escapeHtml(row.wallet)}</code></a></td>
      <td class="num">${row.tx_count}</td>
      <td class="num asset">${escapeHtml(row.asset)}</td>
      <td class="num net">${escapeHtml(row.net_usd)}</td>
    </tr>`).join("");
  return `<table class="revenue">
    <thead><tr><th>domains</th><th>wallet</th><th>txns</th><th>asset</th>
    <th>revenue (USD)</th></tr></thead>
    <tbody>${rows}</tbody>
    <tfoot><tr><td colspan="4">total</td>
      <td class="num total">${escapeHtml(report.total_usd)}</td></tr></tfoot>
  </table>`;
}

export function renderTldTable(report: InfraReport): string {
  if (!report.tld_distribution.length) {
    return '<p class="empty">No infrastructure data yet.</p>';
  }
  const rows = report.tld_distribution.map((row) => `
    <tr><td>.${escapeHtml(row.tld)}</td><td class="num">${row.count}</td>
      <td class="num">${row.share_percent}%</td>
      <td class="num">${row.baseline_percent ?? "—"}</td>
      <td class="num">${row.over_representation ?? "∞"}</td></tr>`).join("");
  return `<table class="tld">
    <thead><tr><th>TLD</th><th>count</th><th>share</th><th>baseline %</th>
    <th>over-rep</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderClusterExplorer(report: ClusterReportView): string {
  const templates = report.templates.map((cluster) => `
    <li data-cluster="${cluster.cluster_id}"><b>${cluster.size}</b> messages ·
      exemplar <code>${escapeHtml(cluster.exemplar)}</code></li>`).join("");
  const components = report.ioc_components.map((component) => `
    <li data-cluster="${component.cluster_id}" class="${component.weak ? "weak" : ""}">
      <b>${component.size}</b> conversations${component.weak ? " (wallet-only link)" : ""}
    </li>`).join("");
  return `<div class="clusters">
    <h3>Message templates</h3><ul class="templates">${templates}</ul>
    <h3>Shared-indicator components</h3><ul class="components">${components}</ul>
  </div>`;
}

export function renderCsvButtons(urls: { label: string; href: string }[]): string {
  return urls.map(({ label, href }) =>
    `<a class="csv-download" href="${escapeHtml(href)}" download>${escapeHtml(label)}</a>`,
  ).join(" ");
}

// Pure HTML builders: every view is a string of markup derived from service
// responses, so rendering is testable without a browser.

import { serializeCsv } from "./csv.js";
import type { MatchedPair, ScoredTableWire, TablePreview } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(value: number | null): string {
  return value === null ? "—" : value.toFixed(4);
}

/** Bar width on a shared [0, max] scale; absent values render a dash. */
export function scoreBar(label: string, value: number | null, max: number): string {
  if (value === null) {
    return `<div class="score-row"><span class="score-label">${escapeHtml(label)}</span>` +
      `<span class="score-absent">—</span></div>`;
  }
  const safeMax = max > 0 ? max : 1;
  const pct = Math.max(0, Math.min(100, (value / safeMax) * 100));
  return (
    `<div class="score-row"><span class="score-label">${escapeHtml(label)}</span>` +
    `<div class="score-track"><div class="score-bar" style="width:${pct.toFixed(1)}%"></div></div>` +
    `<span class="score-value">${fmt(value)}</span></div>`
  );
}

export function resultCard(item: ScoredTableWire, rank: number, barMax: number): string {
  return (
    `<article class="result-card" data-table-id="${escapeHtml(item.table_id)}">` +
    `<header><span class="rank">#${rank}</span>` +
    `<h3>${escapeHtml(item.table_id)}</h3>` +
    `<span class="fused">score ${item.rho.toFixed(4)}</span></header>` +
    `<p class="caption">${escapeHtml(item.caption)}</p>` +
    scoreBar("table score", item.rho_t, barMax) +
    scoreBar("NL score", item.rho_c, barMax) +
    `<footer>` +
    `<button class="explain-btn" data-table-id="${escapeHtml(item.table_id)}">explain</button>` +
    `<button class="preview-btn" data-table-id="${escapeHtml(item.table_id)}">preview</button>` +
    `<button class="process-btn" data-table-id="${escapeHtml(item.table_id)}">union preview</button>` +
    `</footer></article>`
  );
}

export function resultList(items: ScoredTableWire[]): string {
  if (items.length === 0) {
    return `<p class="empty-state">No results. Index a pool and search again.</p>`;
  }
  const barMax = Math.max(
    ...items.map((r) => Math.max(r.rho_t ?? 0, r.rho_c ?? 0)),
    1e-9,
  );
  return items.map((item, i) => resultCard(item, i + 1, barMax)).join("\n");
}

export function explainView(detail: ScoredTableWire): string {
  let body = "";
  if (detail.matching !== null && detail.matching.length > 0) {
    const rows = detail.matching
      .map(
        (m: MatchedPair) =>
          `<tr><td>${escapeHtml(m.query_column)}</td><td>↔</td>` +
          `<td>${escapeHtml(m.candidate_column)}</td><td>${m.weight.toFixed(3)}</td></tr>`,
      )
      .join("");
    body = `<table class="matching"><thead><tr><th>query column</th><th></th>` +
      `<th>candidate column</th><th>weight</th></tr></thead><tbody>${rows}</tbody></table>`;
  } else if (detail.join_column !== null) {
    body = `<p>join key matches candidate column <strong class="join-col">` +
      `${escapeHtml(detail.join_column)}</strong></p>`;
  } else {
    body = `<p>no column-level evidence for this mode</p>`;
  }
  return (
    `<section class="explain" data-table-id="${escapeHtml(detail.table_id)}">` +
    `<h4>${escapeHtml(detail.table_id)}: score ${detail.rho.toFixed(4)}` +
    ` (table ${fmt(detail.rho_t)}, NL ${fmt(detail.rho_c)})</h4>${body}</section>`
  );
}

export function previewGrid(preview: TablePreview): string {
  const head = preview.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = preview.rows
    .map((row) => `<tr>${row.map((v) => `<td>${escapeHtml(v)}</td>`).join("")}</tr>`)
    .join("");
  return (
    `<div class="preview" data-table-id="${escapeHtml(preview.table_id)}">` +
    `<h4>${escapeHtml(preview.table_id)} (${preview.row_count} rows)</h4>` +
    `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></div>`
  );
}

export function previewToCsv(preview: TablePreview): string {
  return serializeCsv([preview.columns, ...preview.rows]);
}

export function chatBubble(role: "user" | "assistant", text: string): string {
  return `<div class="chat ${role}"><p>${escapeHtml(text)}</p></div>`;
}

export function offlineBanner(baseUrl: string): string {
  return `<div class="banner offline">service unreachable at ${escapeHtml(baseUrl)}</div>`;
}

export function errorToast(message: string): string {
  return `<div class="toast error">${escapeHtml(message)}</div>`;
}

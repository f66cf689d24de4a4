// Browser shell: binds the controller to the three panels.

import { ApiClient } from "./api.js";
import { ConsoleApp } from "./app.js";
import { conditionText } from "./chips.js";
import { errorToast, escapeHtml, offlineBanner, previewToCsv } from "./render.js";

const baseUrl =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8080";
const app = new ConsoleApp(new ApiClient(baseUrl));

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function renderChips(): void {
  $("chips").innerHTML = app
    .chips()
    .map(
      (c, i) =>
        `<span class="chip ${c.enabled ? "on" : "off"}">` +
        `<button data-op="toggle" data-i="${i}">${escapeHtml(c.text)}</button>` +
        `<button data-op="remove" data-i="${i}">×</button></span>`,
    )
    .join("");
  $("condition-preview").textContent = conditionText(app.chips());
}

function renderKeySelector(): void {
  const select = $<HTMLSelectElement>("key-column");
  select.innerHTML =
    `<option value="">(select key column)</option>` +
    app.form.tableColumns
      .map((c) => `<option ${c === app.form.keyColumn ? "selected" : ""}>${escapeHtml(c)}</option>`)
      .join("");
}

function renderFormValidity(): void {
  const problems = app.formProblems();
  $("form-problems").innerHTML = problems.map((p) => `<li>${escapeHtml(p)}</li>`).join("");
  $<HTMLButtonElement>("submit-search").disabled = problems.length > 0;
}

function refreshSearchPanel(): void {
  renderChips();
  renderKeySelector();
  $<HTMLSelectElement>("mode").value = app.form.mode;
  renderFormValidity();
}

async function doSearch(): Promise<void> {
  try {
    const resp = await app.search();
    $("results").innerHTML = app.resultsHtml();
    $("latency").textContent = `${resp.results.length} results in ${resp.latency_ms.toFixed(1)} ms`;
  } catch (err) {
    $("toasts").innerHTML = errorToast(String(err));
  }
}

function wire(): void {
  $<HTMLSelectElement>("mode").addEventListener("change", (e) => {
    app.setMode((e.target as HTMLSelectElement).value as never);
    refreshSearchPanel();
  });
  $<HTMLInputElement>("table-upload").addEventListener("change", async (e) => {
    const file = (e.target as HTMLInputElement).files?.[0];
    if (file) {
      app.uploadCsv(await file.text());
      refreshSearchPanel();
    }
  });
  $<HTMLSelectElement>("key-column").addEventListener("change", (e) => {
    app.setKeyColumn((e.target as HTMLSelectElement).value || null);
    renderFormValidity();
  });
  $("add-chip").addEventListener("click", () => {
    const input = $<HTMLInputElement>("chip-input");
    app.addConditionChip(input.value);
    input.value = "";
    refreshSearchPanel();
  });
  $("chips").addEventListener("click", (e) => {
    const btn = (e.target as HTMLElement).closest("button");
    if (!btn) return;
    const i = Number(btn.dataset.i);
    if (btn.dataset.op === "toggle") app.toggleConditionChip(i);
    if (btn.dataset.op === "remove") app.removeConditionChip(i);
    refreshSearchPanel();
  });
  ["k", "lambda", "n-candidates"].forEach((id) => {
    $<HTMLInputElement>(id).addEventListener("change", () => {
      app.setParams({
        k: Number($<HTMLInputElement>("k").value) || 10,
        lambda: $<HTMLInputElement>("lambda").value === "" ? null : Number($<HTMLInputElement>("lambda").value),
        nCandidates: Number($<HTMLInputElement>("n-candidates").value) || 100,
      });
      renderFormValidity();
    });
  });
  $<HTMLSelectElement>("algorithm").addEventListener("change", (e) => {
    app.setParams({ algorithm: (e.target as HTMLSelectElement).value });
  });
  $("submit-search").addEventListener("click", doSearch);

  $("results").addEventListener("click", async (e) => {
    const btn = (e.target as HTMLElement).closest("button");
    if (!btn || !btn.dataset.tableId) return;
    try {
      if (btn.classList.contains("explain-btn")) {
        await app.explain(btn.dataset.tableId);
        $("explain").innerHTML = app.explainHtml();
      } else if (btn.classList.contains("process-btn")) {
        await app.unionPreviewOf(btn.dataset.tableId);
        $("preview").innerHTML = app.previewHtml();
      } else if (btn.classList.contains("preview-btn")) {
        const t = await app.api.tablePreview(app.poolId, btn.dataset.tableId);
        $("preview").innerHTML = `<pre>${escapeHtml(JSON.stringify(t.rows.slice(0, 10), null, 1))}</pre>`;
      }
    } catch (err) {
      $("toasts").innerHTML = errorToast(String(err));
    }
  });

  $("download-preview").addEventListener("click", () => {
    if (!app.lastPreview) return;
    const blob = new Blob([previewToCsv(app.lastPreview)], { type: "text/csv" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${app.lastPreview.table_id}.csv`;
    a.click();
  });

  $("chat-send").addEventListener("click", async () => {
    const input = $<HTMLInputElement>("chat-input");
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    try {
      const turn = await app.assistantSend(text);
      $("chat-log").innerHTML = app.chatHtml();
      if (turn.detected_intent === "discovery") {
        refreshSearchPanel();
        $<HTMLElement>("search-panel").scrollIntoView({ behavior: "smooth" });
      }
    } catch (err) {
      $("toasts").innerHTML = errorToast(String(err));
    }
  });
}

async function boot(): Promise<void> {
  try {
    await app.api.health();
    const pools = await app.api.listPools();
    const select = $<HTMLSelectElement>("pool");
    select.innerHTML = pools.pools
      .map((p) => `<option ${p.pool_id === "default" ? "selected" : ""}>${escapeHtml(p.pool_id)}</option>`)
      .join("");
    select.addEventListener("change", () => {
      app.poolId = select.value;
    });
    if (pools.pools.length > 0) app.poolId = select.value || pools.pools[0]!.pool_id;
  } catch {
    $("toasts").innerHTML = offlineBanner(baseUrl);
  }
  wire();
  refreshSearchPanel();
}

boot();

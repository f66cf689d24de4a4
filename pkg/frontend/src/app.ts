// Application controller: the DOM-free core the browser shell and the tests
// both drive. Holds the form state, talks to the service, and exposes the
// rendered HTML for each panel. At most one search is in flight; stale
// responses lose.

import { ApiClient } from "./api.js";
import type { ConditionChip } from "./chips.js";
import { addChip, removeChip, toggleChip } from "./chips.js";
import {
  applyAssistantExtraction,
  emptyForm,
  toSearchRequest,
  validateForm,
  withUploadedCsv,
  type SearchFormState,
} from "./form.js";
import { chatBubble, explainView, previewGrid, resultList } from "./render.js";
import type {
  AssistantResponse,
  ScoredTableWire,
  SearchResponse,
  TablePreview,
} from "./types.js";

export interface ChatTurn {
  role: "user" | "assistant";
  text: string;
}

export class ConsoleApp {
  form: SearchFormState = emptyForm();
  poolId = "default";
  results: ScoredTableWire[] = [];
  lastSearch: SearchResponse | null = null;
  lastExplain: ScoredTableWire | null = null;
  lastPreview: TablePreview | null = null;
  chat: ChatTurn[] = [];
  private searchEpoch = 0;

  constructor(public api: ApiClient) {}

  // --- search panel -------------------------------------------------------

  uploadCsv(csvText: string): void {
    this.form = withUploadedCsv(this.form, csvText);
  }

  setMode(mode: SearchFormState["mode"]): void {
    this.form = { ...this.form, mode };
  }

  setKeyColumn(column: string | null): void {
    this.form = { ...this.form, keyColumn: column };
  }

  setParams(params: Partial<Pick<SearchFormState, "k" | "lambda" | "nCandidates" | "algorithm">>): void {
    this.form = { ...this.form, ...params };
  }

  addConditionChip(text: string): void {
    this.form = { ...this.form, chips: addChip(this.form.chips, text) };
  }

  removeConditionChip(index: number): void {
    this.form = { ...this.form, chips: removeChip(this.form.chips, index) };
  }

  toggleConditionChip(index: number): void {
    this.form = { ...this.form, chips: toggleChip(this.form.chips, index) };
  }

  chips(): ConditionChip[] {
    return this.form.chips;
  }

  formProblems(): string[] {
    return validateForm(this.form);
  }

  canSubmit(): boolean {
    return this.formProblems().length === 0;
  }

  async search(): Promise<SearchResponse> {
    const epoch = ++this.searchEpoch;
    const response = await this.api.search(this.poolId, toSearchRequest(this.form));
    if (epoch === this.searchEpoch) {
      this.lastSearch = response;
      this.results = response.results;
    }
    return response;
  }

  resultsHtml(): string {
    return resultList(this.results);
  }

  // --- results panel ------------------------------------------------------

  async explain(tableId: string): Promise<ScoredTableWire> {
    const detail = await this.api.explain(this.poolId, tableId, toSearchRequest(this.form));
    this.lastExplain = detail;
    return detail;
  }

  explainHtml(): string {
    return this.lastExplain ? explainView(this.lastExplain) : "";
  }

  // --- assistant pane -----------------------------------------------------

  async assistantSend(text: string): Promise<AssistantResponse> {
    this.chat.push({ role: "user", text });
    const turn = await this.api.assistant(text);
    this.chat.push({ role: "assistant", text: turn.reply });
    if (turn.detected_intent === "discovery" && turn.extracted !== null) {
      this.form = applyAssistantExtraction(this.form, turn.extracted);
    }
    return turn;
  }

  chatHtml(): string {
    return this.chat.map((t) => chatBubble(t.role, t.text)).join("\n");
  }

  // --- processing panel ---------------------------------------------------

  async unionPreviewOf(tableId: string): Promise<TablePreview> {
    if (this.form.tableCsv === null) {
      throw new Error("upload a query table before running a union preview");
    }
    const preview = await this.api.process({
      pool_id: this.poolId,
      op: "union_preview",
      left_csv: this.form.tableCsv,
      right_table_id: tableId,
    });
    this.lastPreview = preview;
    return preview;
  }

  async joinPreviewOf(tableId: string, leftKey: string, rightKey: string): Promise<TablePreview> {
    if (this.form.tableCsv === null) {
      throw new Error("upload a query table before running a join preview");
    }
    const preview = await this.api.process({
      pool_id: this.poolId,
      op: "join_preview",
      left_csv: this.form.tableCsv,
      right_table_id: tableId,
      left_key: leftKey,
      right_key: rightKey,
    });
    this.lastPreview = preview;
    return preview;
  }

  previewHtml(): string {
    return this.lastPreview ? previewGrid(this.lastPreview) : "";
  }
}

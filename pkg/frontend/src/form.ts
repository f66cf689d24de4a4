// Search-panel state and its mapping onto the wire request. The mapper is
// total on states that pass validation; validation mirrors the service's
// rules so errors surface before a request is made.

import { chipsFromText, conditionText, type ConditionChip } from "./chips.js";
import { headerOf } from "./csv.js";
import type { AssistantExtraction, SearchMode, SearchRequestWire } from "./types.js";

export interface SearchFormState {
  mode: SearchMode;
  chips: ConditionChip[];
  tableCsv: string | null;
  tableColumns: string[];
  keyColumn: string | null;
  k: number;
  lambda: number | null;
  nCandidates: number;
  algorithm: string;
}

export const ALGORITHMS = ["cross-fusion", "table-score-only"] as const;

export function emptyForm(): SearchFormState {
  return {
    mode: "nl_only",
    chips: [],
    tableCsv: null,
    tableColumns: [],
    keyColumn: null,
    k: 10,
    lambda: null,
    nCandidates: 100,
    algorithm: ALGORITHMS[0],
  };
}

export function withUploadedCsv(state: SearchFormState, csvText: string): SearchFormState {
  const columns = headerOf(csvText);
  const keyStillValid = state.keyColumn !== null && columns.includes(state.keyColumn);
  return {
    ...state,
    tableCsv: csvText,
    tableColumns: columns,
    keyColumn: keyStillValid ? state.keyColumn : null,
  };
}

export function validateForm(state: SearchFormState): string[] {
  const problems: string[] = [];
  const condition = conditionText(state.chips);
  if (state.mode === "nl_only" && condition.length === 0) {
    problems.push("NL-only search needs a condition");
  }
  if (state.mode !== "nl_only" && state.tableCsv === null) {
    problems.push("union/join search needs an uploaded query table");
  }
  if (state.mode === "nlc_join") {
    if (state.keyColumn === null) {
      problems.push("join search needs a key column");
    } else if (!state.tableColumns.includes(state.keyColumn)) {
      problems.push(`key column '${state.keyColumn}' is not a column of the uploaded table`);
    }
  }
  if (!Number.isInteger(state.k) || state.k < 1) {
    problems.push("k must be a positive integer");
  }
  if (state.lambda !== null && state.lambda < 0) {
    problems.push("lambda must be non-negative");
  }
  return problems;
}

export function toSearchRequest(state: SearchFormState): SearchRequestWire {
  const problems = validateForm(state);
  if (problems.length > 0) {
    throw new Error(problems.join("; "));
  }
  const req: SearchRequestWire = { mode: state.mode, k: state.k, n_candidates: state.nCandidates };
  const condition = conditionText(state.chips);
  if (condition) req.condition = condition;
  if (state.mode !== "nl_only" && state.tableCsv !== null) req.query_table = state.tableCsv;
  if (state.mode === "nlc_join" && state.keyColumn !== null) req.key_column = state.keyColumn;
  // "table-score-only" is cross-fusion with the condition branch silenced
  if (state.algorithm === "table-score-only") {
    delete req.condition;
  }
  if (state.lambda !== null) req.lambda = state.lambda;
  return req;
}

/** Autofill from an assistant discovery turn; the user's upload survives. */
export function applyAssistantExtraction(
  state: SearchFormState,
  extracted: AssistantExtraction,
): SearchFormState {
  return {
    ...state,
    mode: extracted.mode,
    chips: chipsFromText(extracted.condition),
    keyColumn:
      extracted.key_column !== null && state.tableColumns.includes(extracted.key_column)
        ? extracted.key_column
        : state.keyColumn,
  };
}

// Wire types for the discovery service API.

export type SearchMode = "nl_only" | "nlc_union" | "nlc_join";

export interface MatchedPair {
  query_column: string;
  candidate_column: string;
  weight: number;
}

export interface ScoredTableWire {
  table_id: string;
  rho: number;
  rho_t: number | null;
  rho_c: number | null;
  join_column: string | null;
  matching: MatchedPair[] | null;
  caption: string;
}

export interface SearchRequestWire {
  mode: SearchMode;
  condition?: string;
  query_table?: string;
  query_table_id?: string;
  key_column?: string;
  k?: number;
  lambda?: number;
  n_candidates?: number;
}

export interface SearchResponse {
  results: ScoredTableWire[];
  latency_ms: number;
  mode: string;
}

export interface TablePreview {
  table_id: string;
  columns: string[];
  rows: string[][];
  row_count: number;
  caption: string;
  description: string;
}

export interface PoolInfo {
  pool_id: string;
  num_tables: number;
  indexed: boolean;
}

export interface AssistantExtraction {
  mode: SearchMode;
  condition: string;
  key_column: string | null;
}

export interface AssistantResponse {
  text: string;
  detected_intent: "discovery" | "analysis" | "other";
  extracted: AssistantExtraction | null;
  reply: string;
}

export interface ProcessRequestWire {
  pool_id: string;
  op: "union_preview" | "join_preview";
  left_csv?: string;
  left_table_id?: string;
  right_table_id: string;
  left_key?: string;
  right_key?: string;
}

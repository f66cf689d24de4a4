import { describe, expect, it } from "vitest";

import { parseCsv, serializeCsv } from "../src/csv.js";
import {
  escapeHtml,
  explainView,
  previewGrid,
  previewToCsv,
  resultCard,
  resultList,
  scoreBar,
} from "../src/render.js";
import type { ScoredTableWire, TablePreview } from "../src/types.js";

const ITEM: ScoredTableWire = {
  table_id: "scholarship",
  rho: 0.87,
  rho_t: 0.87,
  rho_c: 0.42,
  join_column: null,
  matching: null,
  caption: "scholarship",
};

describe("score bars", () => {
  it("renders both bars on a shared scale", () => {
    const html = resultCard(ITEM, 1, 0.87);
    const widths = [...html.matchAll(/width:([0-9.]+)%/g)].map((m) => Number(m[1]));
    expect(widths).toHaveLength(2);
    expect(widths[0]).toBeCloseTo(100, 0); // rho_t == max
    expect(widths[1]).toBeCloseTo((0.42 / 0.87) * 100, 0);
  });

  it("absent score renders a dash, not a bar", () => {
    const html = scoreBar("NL score", null, 1);
    expect(html).toContain("—");
    expect(html).not.toContain("score-bar");
  });

  it("list computes the shared max over rho_t and rho_c", () => {
    const a = { ...ITEM, table_id: "a", rho_t: 0.5, rho_c: 0.1 };
    const b = { ...ITEM, table_id: "b", rho_t: 0.2, rho_c: 1.0 };
    const html = resultList([a, b]);
    const widths = [...html.matchAll(/width:([0-9.]+)%/g)].map((m) => Number(m[1]));
    expect(Math.max(...widths)).toBeCloseTo(100, 0); // rho_c of b sets the scale
    expect(widths[0]).toBeCloseTo(50, 0);
  });

  it("empty result list renders the empty state", () => {
    expect(resultList([])).toContain("empty-state");
  });
});

describe("explain view", () => {
  it("lists one row per matched edge", () => {
    const detail: ScoredTableWire = {
      ...ITEM,
      matching: [
        { query_column: "id", candidate_column: "student_id", weight: 0.9 },
        { query_column: "grade", candidate_column: "grade", weight: 0.8 },
      ],
    };
    const html = explainView(detail);
    expect([...html.matchAll(/<tr>/g)]).toHaveLength(3); // header + 2 edges
    expect(html).toContain("student_id");
  });

  it("join mode highlights exactly one candidate column", () => {
    const html = explainView({ ...ITEM, join_column: "student_id" });
    expect([...html.matchAll(/join-col/g)]).toHaveLength(1);
  });
});

describe("preview grid and download", () => {
  const preview: TablePreview = {
    table_id: "p",
    columns: ["a", "b"],
    rows: [
      ["1", "x,y"],
      ["2", 'quote "here"'],
    ],
    row_count: 2,
    caption: "",
    description: "",
  };

  it("renders rows and header", () => {
    const html = previewGrid(preview);
    expect(html).toContain("<th>a</th>");
    expect([...html.matchAll(/<tr>/g)]).toHaveLength(3);
  });

  it("download CSV round-trips through the parser", () => {
    const csv = previewToCsv(preview);
    const back = parseCsv(csv);
    expect(back).toEqual([preview.columns, ...preview.rows]);
  });

  it("serialize/parse handle quotes, commas and newlines", () => {
    const rows = [["a\nb", 'c"d', "e,f"], ["plain", "", "3"]];
    expect(parseCsv(serializeCsv(rows))).toEqual(rows);
  });
});

describe("escaping", () => {
  it("escapes markup in service-provided text", () => {
    expect(escapeHtml(`<script>"x"&`)).toBe("&lt;script&gt;&quot;x&quot;&amp;");
    const html = resultCard({ ...ITEM, caption: "<img onerror=x>" }, 1, 1);
    expect(html).not.toContain("<img");
  });
});

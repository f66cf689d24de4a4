import { describe, expect, it } from "vitest";

import { chipsFromText } from "../src/chips.js";
import {
  applyAssistantExtraction,
  emptyForm,
  toSearchRequest,
  validateForm,
  withUploadedCsv,
  type SearchFormState,
} from "../src/form.js";
import type { SearchMode } from "../src/types.js";

const CSV = "student_id,name,grade\n1,ada,90\n2,bo,75\n";

function filled(mode: SearchMode): SearchFormState {
  let form = { ...emptyForm(), mode, chips: chipsFromText("grade above 80") };
  form = withUploadedCsv(form, CSV);
  if (mode === "nlc_join") form = { ...form, keyColumn: "student_id" };
  return form;
}

describe("validateForm", () => {
  it("nl_only requires a condition", () => {
    const form = { ...emptyForm(), mode: "nl_only" as const };
    expect(validateForm(form)).toHaveLength(1);
    expect(validateForm({ ...form, chips: chipsFromText("x") })).toHaveLength(0);
  });

  it("union requires an uploaded table", () => {
    const form = { ...emptyForm(), mode: "nlc_union" as const, chips: chipsFromText("x") };
    expect(validateForm(form).join(" ")).toMatch(/query table/);
    expect(validateForm(withUploadedCsv(form, CSV))).toHaveLength(0);
  });

  it("join requires a key column from the uploaded header", () => {
    let form = withUploadedCsv({ ...emptyForm(), mode: "nlc_join" as const }, CSV);
    expect(validateForm(form).join(" ")).toMatch(/key column/);
    form = { ...form, keyColumn: "grade" };
    expect(validateForm(form)).toHaveLength(0);
    form = { ...form, keyColumn: "missing" };
    expect(validateForm(form).join(" ")).toMatch(/not a column/);
  });

  it("k must be a positive integer", () => {
    expect(validateForm({ ...filled("nl_only"), k: 0 })).not.toHaveLength(0);
    expect(validateForm({ ...filled("nl_only"), k: 2.5 })).not.toHaveLength(0);
  });

  it("disabling every chip invalidates an nl_only form", () => {
    let form = filled("nl_only");
    form = { ...form, chips: form.chips.map((c) => ({ ...c, enabled: false })) };
    expect(validateForm(form)).not.toHaveLength(0);
  });
});

describe("toSearchRequest", () => {
  it("is total on every valid mode/upload combination", () => {
    const modes: SearchMode[] = ["nl_only", "nlc_union", "nlc_join"];
    for (const mode of modes) {
      for (const k of [1, 5, 50]) {
        for (const lambda of [null, 0, 1.5]) {
          const form = { ...filled(mode), k, lambda };
          if (validateForm(form).length > 0) continue;
          const req = toSearchRequest(form);
          expect(req.mode).toBe(mode);
          expect(req.k).toBe(k);
          if (lambda === null) expect(req).not.toHaveProperty("lambda");
          else expect(req.lambda).toBe(lambda);
        }
      }
    }
  });

  it("maps the condition from enabled chips only", () => {
    let form = filled("nlc_union");
    form = { ...form, chips: [...form.chips, { text: "hidden", enabled: false }] };
    expect(toSearchRequest(form).condition).toBe("grade above 80");
  });

  it("join request carries csv and key column", () => {
    const req = toSearchRequest(filled("nlc_join"));
    expect(req.query_table).toBe(CSV);
    expect(req.key_column).toBe("student_id");
  });

  it("table-score-only algorithm drops the condition", () => {
    const req = toSearchRequest({ ...filled("nlc_union"), algorithm: "table-score-only" });
    expect(req).not.toHaveProperty("condition");
  });

  it("throws on invalid state", () => {
    expect(() => toSearchRequest({ ...emptyForm(), mode: "nlc_union" })).toThrow(/query table/);
  });
});

describe("upload and autofill", () => {
  it("upload parses the header for the key selector", () => {
    const form = withUploadedCsv(emptyForm(), CSV);
    expect(form.tableColumns).toEqual(["student_id", "name", "grade"]);
  });

  it("upload clears a key column that vanished", () => {
    let form = { ...withUploadedCsv(emptyForm(), CSV), keyColumn: "grade" };
    form = withUploadedCsv(form, "a,b\n1,2\n");
    expect(form.keyColumn).toBeNull();
  });

  it("assistant discovery turn autofills mode and condition", () => {
    const form = applyAssistantExtraction(withUploadedCsv(emptyForm(), CSV), {
      mode: "nlc_union",
      condition: "Find unionable tables containing students with an average grade above 80",
      key_column: null,
    });
    expect(form.mode).toBe("nlc_union");
    expect(form.chips.length).toBeGreaterThan(0);
    expect(form.tableCsv).toBe(CSV); // the upload survives autofill
  });

  it("autofill only adopts a key column the table actually has", () => {
    const base = withUploadedCsv(emptyForm(), CSV);
    const good = applyAssistantExtraction(base, {
      mode: "nlc_join",
      condition: "x",
      key_column: "student_id",
    });
    expect(good.keyColumn).toBe("student_id");
    const bad = applyAssistantExtraction(base, {
      mode: "nlc_join",
      condition: "x",
      key_column: "flight_id",
    });
    expect(bad.keyColumn).toBeNull();
  });
});

import { describe, expect, it } from "vitest";

import {
  addChip,
  chipsFromText,
  conditionText,
  editChip,
  removeChip,
  toggleChip,
  type ConditionChip,
} from "../src/chips.js";

describe("condition chips", () => {
  it("concatenates enabled chips in order", () => {
    const chips: ConditionChip[] = [
      { text: "Find unionable tables", enabled: true },
      { text: "containing students", enabled: true },
      { text: "with an average grade above 80", enabled: true },
    ];
    expect(conditionText(chips)).toBe(
      "Find unionable tables containing students with an average grade above 80",
    );
  });

  it("skips disabled chips but keeps order", () => {
    let chips = chipsFromText("alpha. beta. gamma.");
    chips = toggleChip(chips, 1);
    expect(conditionText(chips)).toBe("alpha. gamma.");
  });

  it("add trims and ignores empty fragments", () => {
    let chips = addChip([], "  grade above 80  ");
    chips = addChip(chips, "   ");
    expect(chips).toHaveLength(1);
    expect(chips[0]!.text).toBe("grade above 80");
  });

  it("remove deletes by index", () => {
    const chips = chipsFromText("a. b. c.");
    expect(removeChip(chips, 1).map((c) => c.text)).toEqual(["a.", "c."]);
  });

  it("edit replaces text in place", () => {
    const chips = addChip([], "old");
    expect(editChip(chips, 0, "new")[0]!.text).toBe("new");
  });

  it("toggle round-trips", () => {
    const chips = addChip([], "x");
    expect(toggleChip(toggleChip(chips, 0), 0)).toEqual(chips);
  });

  it("operations are pure (input untouched)", () => {
    const chips = addChip([], "x");
    const snapshot = JSON.stringify(chips);
    toggleChip(chips, 0);
    removeChip(chips, 0);
    addChip(chips, "y");
    expect(JSON.stringify(chips)).toBe(snapshot);
  });
});

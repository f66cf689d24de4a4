// Condition chips: the NL condition is edited as toggleable text fragments;
// the wire condition is the concatenation of the enabled chips in order.

export interface ConditionChip {
  text: string;
  enabled: boolean;
}

export function conditionText(chips: ConditionChip[]): string {
  return chips
    .filter((c) => c.enabled)
    .map((c) => c.text.trim())
    .filter((t) => t.length > 0)
    .join(" ");
}

export function addChip(chips: ConditionChip[], text: string): ConditionChip[] {
  const trimmed = text.trim();
  if (!trimmed) return chips;
  return [...chips, { text: trimmed, enabled: true }];
}

export function removeChip(chips: ConditionChip[], index: number): ConditionChip[] {
  return chips.filter((_, i) => i !== index);
}

export function toggleChip(chips: ConditionChip[], index: number): ConditionChip[] {
  return chips.map((c, i) => (i === index ? { ...c, enabled: !c.enabled } : c));
}

export function editChip(chips: ConditionChip[], index: number, text: string): ConditionChip[] {
  return chips.map((c, i) => (i === index ? { ...c, text } : c));
}

/** One chip per sentence-ish fragment so pasted conditions stay editable. */
export function chipsFromText(text: string): ConditionChip[] {
  return text
    .split(/(?<=[.;])\s+|\n+/)
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
    .map((part) => ({ text: part, enabled: true }));
}

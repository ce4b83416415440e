import type { SessionKind } from "./types.js";

export type KeyAction =
  | { type: "toggle"; attribute: string }
  | { type: "submit" }
  | { type: "whitespace" };

const RUBRIC_KEYS: Record<string, string> = {
  e: "expository",
  t: "toxic",
  c: "clean",
};

/** E/T/C (or H) toggle controls, Enter submits, W reveals whitespace. */
export function actionForKey(kind: SessionKind, key: string): KeyAction | null {
  if (key === "Enter") {
    return { type: "submit" };
  }
  const lower = key.toLowerCase();
  if (lower === "w") {
    return { type: "whitespace" };
  }
  if (kind === "pretrain_rubric") {
    const attribute = RUBRIC_KEYS[lower];
    return attribute ? { type: "toggle", attribute } : null;
  }
  if (lower === "h") {
    return { type: "toggle", attribute: "hallucination" };
  }
  return null;
}

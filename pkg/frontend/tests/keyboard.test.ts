import { describe, expect, it } from "vitest";

import { actionForKey } from "../src/keyboard.js";
import { progressLabel, revealWhitespace } from "../src/render.js";

describe("actionForKey", () => {
  it("maps E/T/C to rubric toggles", () => {
    expect(actionForKey("pretrain_rubric", "e")).toEqual({ type: "toggle", attribute: "expository" });
    expect(actionForKey("pretrain_rubric", "T")).toEqual({ type: "toggle", attribute: "toxic" });
    expect(actionForKey("pretrain_rubric", "c")).toEqual({ type: "toggle", attribute: "clean" });
  });

  it("maps H to the hallucination toggle in fine-tune sessions only", () => {
    expect(actionForKey("finetune_hallucination", "h")).toEqual({
      type: "toggle",
      attribute: "hallucination",
    });
    expect(actionForKey("finetune_hallucination", "e")).toBeNull();
    expect(actionForKey("pretrain_rubric", "h")).toBeNull();
  });

  it("maps Enter to submit and W to the whitespace view", () => {
    expect(actionForKey("pretrain_rubric", "Enter")).toEqual({ type: "submit" });
    expect(actionForKey("finetune_hallucination", "w")).toEqual({ type: "whitespace" });
  });

  it("ignores unmapped keys", () => {
    expect(actionForKey("pretrain_rubric", "x")).toBeNull();
  });
});

describe("render helpers", () => {
  it("makes spaces, tabs, and newlines visible", () => {
    expect(revealWhitespace("a b\tc\nd")).toBe("a·b→   c¶\nd");
  });

  it("formats 1-based progress", () => {
    expect(progressLabel(0, 10)).toBe("1 / 10");
    expect(progressLabel(9, 10)).toBe("10 / 10");
  });
});

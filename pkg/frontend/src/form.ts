import type { JudgmentPayload, SessionKind } from "./types.js";

/** yes / no / not answered yet. */
export type TriState = boolean | null;

const RUBRIC_ATTRIBUTES = ["expository", "toxic", "clean"] as const;
const FLAG_ATTRIBUTES = ["hallucination"] as const;

/**
 * Per-sample judgment form. Every control starts unanswered and submission
 * is blocked until each has an explicit yes or no: defaulting to "no" would
 * bias the rubric.
 */
export class JudgmentForm {
  private readonly answers = new Map<string, TriState>();

  constructor(readonly kind: SessionKind) {
    for (const attr of this.attributes) {
      this.answers.set(attr, null);
    }
  }

  get attributes(): readonly string[] {
    return this.kind === "pretrain_rubric" ? RUBRIC_ATTRIBUTES : FLAG_ATTRIBUTES;
  }

  value(attribute: string): TriState {
    const current = this.answers.get(attribute);
    if (current === undefined) {
      throw new Error(`unknown attribute ${attribute} for ${this.kind}`);
    }
    return current;
  }

  set(attribute: string, answer: boolean): void {
    this.value(attribute); // validates the attribute
    this.answers.set(attribute, answer);
  }

  /** Keyboard path: unanswered -> yes, then flip yes/no on each press. */
  toggle(attribute: string): void {
    const current = this.value(attribute);
    this.answers.set(attribute, current === null ? true : !current);
  }

  get complete(): boolean {
    return this.missing.length === 0;
  }

  get missing(): string[] {
    return this.attributes.filter((attr) => this.answers.get(attr) === null);
  }

  payload(sampleId: string, judgeId: string): JudgmentPayload {
    if (!this.complete) {
      throw new Error(`unanswered: ${this.missing.join(", ")}`);
    }
    if (this.kind === "pretrain_rubric") {
      return {
        sample_id: sampleId,
        judge_id: judgeId,
        expository: this.answers.get("expository") as boolean,
        toxic: this.answers.get("toxic") as boolean,
        clean: this.answers.get("clean") as boolean,
      };
    }
    return {
      sample_id: sampleId,
      judge_id: judgeId,
      hallucination: this.answers.get("hallucination") as boolean,
    };
  }

  reset(): void {
    for (const attr of this.attributes) {
      this.answers.set(attr, null);
    }
  }
}

/** Wire types for the review service; field names mirror API.md exactly. */

export type SessionKind = "pretrain_rubric" | "finetune_hallucination";
export type SessionStatus = "open" | "complete";
export type GateDecision = "accept" | "reject";

export interface Progress {
  judged: number;
  expected: number;
  per_judge: Record<string, number>;
}

export interface SessionSummary {
  id: string;
  dataset: string;
  kind: SessionKind;
  seed: number;
  sample_count: number;
  judges: string[];
  status: SessionStatus;
  progress: Progress;
  warnings?: string[];
  created?: boolean;
}

export interface Sample {
  id: string;
  text: string;
  source: string;
  meta: Record<string, string>;
  position: number;
  total: number;
}

export interface NextResponse {
  done: boolean;
  sample: Sample | null;
}

export interface RubricPayload {
  sample_id: string;
  judge_id: string;
  expository: boolean;
  toxic: boolean;
  clean: boolean;
}

export interface FlagPayload {
  sample_id: string;
  judge_id: string;
  hallucination: boolean;
}

export type JudgmentPayload = RubricPayload | FlagPayload;

export interface Tallies {
  judged: number;
  expected: number;
  samples_judged: number;
  mean_score?: number | null;
  flagged?: number;
  reviewed?: number;
  flagged_fraction?: number;
  gate?: GateDecision;
}

export interface Ack {
  ok: boolean;
  tallies: Tallies;
}

export interface Report {
  session_id: string;
  dataset: string;
  kind: SessionKind;
  status: SessionStatus;
  partial: boolean;
  progress: Progress;
  mean_score?: number;
  yes_rates?: Record<string, number>;
  n?: number;
  gate?: GateDecision;
  flagged?: number;
  reviewed?: number;
  flagged_fraction?: number;
  tallies?: Tallies;
}

export interface CreateSessionRequest {
  dataset: string;
  kind: SessionKind;
  n: number | "auto";
  seed: number;
  judges: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

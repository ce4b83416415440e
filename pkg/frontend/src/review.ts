import { ApiClient, ApiRequestError, NetworkError } from "./api.js";
import { JudgmentForm } from "./form.js";
import type { Sample, SessionKind, Tallies } from "./types.js";

export type ReviewPhase = "loading" | "ready" | "submitting" | "done" | "error";

export interface ReviewState {
  phase: ReviewPhase;
  sample: Sample | null;
  form: JudgmentForm | null;
  /** Dismissible red banner: network failures, server rejections. */
  banner: string | null;
  /** Inline prompt shown when submit is blocked by unanswered controls. */
  blocker: string | null;
  /** Latest server tallies; rendered verbatim, never recomputed here. */
  tallies: Tallies | null;
}

type Listener = (state: ReviewState) => void;

/**
 * Drives one judge through a session. The server's `next` endpoint is the
 * cursor, so a page refresh (a fresh controller) resumes at the frontier.
 * A judgment is either acknowledged by the server or absent; on network
 * failure the form state is preserved for retry.
 */
export class ReviewController {
  state: ReviewState = {
    phase: "loading",
    sample: null,
    form: null,
    banner: null,
    blocker: null,
    tallies: null,
  };
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
    readonly judgeId: string,
    readonly kind: SessionKind,
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  async load(): Promise<void> {
    this.state.phase = "loading";
    this.emit();
    try {
      const next = await this.api.nextSample(this.sessionId, this.judgeId);
      if (next.done || next.sample === null) {
        this.state = { ...this.state, phase: "done", sample: null, form: null, blocker: null };
      } else {
        this.state = {
          ...this.state,
          phase: "ready",
          sample: next.sample,
          form: new JudgmentForm(this.kind),
          blocker: null,
        };
      }
    } catch (err) {
      if (err instanceof NetworkError) {
        this.state = { ...this.state, phase: "error", banner: "Server unreachable. Retry when back online." };
      } else if (err instanceof ApiRequestError) {
        this.state = { ...this.state, phase: "error", banner: `${err.code}: ${err.message}` };
      } else {
        throw err;
      }
    }
    this.emit();
  }

  toggle(attribute: string): void {
    if (this.state.phase !== "ready" || !this.state.form) {
      return;
    }
    this.state.form.toggle(attribute);
    this.state.blocker = null;
    this.emit();
  }

  /**
   * Returns true when the judgment was acknowledged and the next sample
   * loaded. Unanswered controls block without any request being sent.
   */
  async submit(): Promise<boolean> {
    const { phase, form, sample } = this.state;
    if (phase !== "ready" || !form || !sample) {
      return false; // also enforces one in-flight submission at a time
    }
    if (!form.complete) {
      this.state.blocker = `Explicit yes/no required for: ${form.missing.join(", ")}`;
      this.emit();
      return false;
    }
    this.state.phase = "submitting";
    this.emit();
    try {
      const ack = await this.api.submitJudgment(this.sessionId, form.payload(sample.id, this.judgeId));
      this.state.tallies = ack.tallies;
      this.state.banner = null;
      await this.load();
      return true;
    } catch (err) {
      if (err instanceof NetworkError) {
        // Not acknowledged: nothing was written, keep the form for retry.
        this.state.phase = "ready";
        this.state.banner = "Network failure. The judgment was not recorded; submit again.";
        this.emit();
        return false;
      }
      if (err instanceof ApiRequestError) {
        this.state.banner = `${err.code}: ${err.message}`;
        if (err.code === "duplicate_judgment") {
          // The server already holds this verdict; move to the frontier.
          await this.load();
        } else {
          this.state.phase = "ready";
          this.emit();
        }
        return false;
      }
      throw err;
    }
  }

  dismissBanner(): void {
    this.state.banner = null;
    this.emit();
  }
}

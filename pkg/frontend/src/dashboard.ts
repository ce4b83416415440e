import { ApiClient, NetworkError } from "./api.js";
import type { Report, SessionSummary } from "./types.js";

export interface SessionRow {
  summary: SessionSummary;
  report: Report | null;
  /** Status chip text; every number in it comes from the server response. */
  chip: string;
  /** 1-based rank among completed rubric sessions, best mean first. */
  rank: number | null;
}

export interface DashboardState {
  rows: SessionRow[];
  offline: boolean;
  loaded: boolean;
}

export function chipFor(report: Report): string {
  if (report.status === "complete") {
    if (report.kind === "pretrain_rubric") {
      return `mean ${report.mean_score}`;
    }
    return report.gate ?? "complete";
  }
  if (report.kind === "finetune_hallucination" && report.tallies?.gate) {
    return `trending ${report.tallies.gate}`;
  }
  return `${report.progress.judged}/${report.progress.expected}`;
}

/** Polls the session list; display-only, no score math happens client side. */
export class DashboardController {
  state: DashboardState = { rows: [], offline: false, loaded: false };
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly api: ApiClient) {}

  async refresh(): Promise<void> {
    try {
      const { sessions } = await this.api.listSessions();
      const rows: SessionRow[] = [];
      for (const summary of sessions) {
        const report = await this.api.report(summary.id);
        rows.push({ summary, report, chip: chipFor(report), rank: null });
      }
      assignRanks(rows);
      this.state = { rows, offline: false, loaded: true };
    } catch (err) {
      if (err instanceof NetworkError) {
        // Keep the stale rows so judges still see the last known state.
        this.state = { ...this.state, offline: true };
        return;
      }
      throw err;
    }
  }

  start(intervalMs: number, onUpdate: () => void): void {
    this.stop();
    void this.refresh().then(onUpdate);
    this.timer = setInterval(() => {
      void this.refresh().then(onUpdate);
    }, intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

function assignRanks(rows: SessionRow[]): void {
  const scored = rows.filter(
    (row) =>
      row.report !== null &&
      row.report.status === "complete" &&
      row.report.kind === "pretrain_rubric" &&
      typeof row.report.mean_score === "number",
  );
  scored.sort((a, b) => (b.report!.mean_score as number) - (a.report!.mean_score as number));
  scored.forEach((row, index) => {
    row.rank = index + 1;
  });
}

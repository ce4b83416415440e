/**
 * End-to-end: drive a full 10-sample rubric session through the UI layer
 * against the real review service (spawned as a subprocess). The browser's
 * DOM is not involved; the controllers under test are exactly what the DOM
 * handlers call.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdirSync, mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError } from "../src/api.js";
import { ReviewController } from "../src/review.js";

const PYTHON = process.env.PYTHON ?? "python3";
const JUDGE = "judge-a";

// Ten scripted verdicts: [expository, toxic, clean]. Rubric points are
// 2e - 2t + c, hand-summed here as the oracle for the server's mean.
const VERDICTS: Array<[boolean, boolean, boolean]> = [
  [true, false, true],
  [false, false, true],
  [true, true, false],
  [false, false, false],
  [true, false, false],
  [false, true, false],
  [true, false, true],
  [false, false, true],
  [true, true, true],
  [false, true, true],
];
const EXPECTED_MEAN =
  VERDICTS.map(([e, t, c]) => 2 * Number(e) - 2 * Number(t) + Number(c)).reduce((a, b) => a + b) /
  VERDICTS.length;

let dataDir: string;
let server: ChildProcess;
let api: ApiClient;
let sessionId: string;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address && typeof address === "object") {
        const port = address.port;
        probe.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForHealth(base: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("review service did not come up");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "pint-ui-e2e-"));
  const datasetDir = join(dataDir, "datasets", "demo");
  mkdirSync(datasetDir, { recursive: true });
  const lines = Array.from({ length: 12 }, (_, i) =>
    JSON.stringify({ id: `d${String(i).padStart(2, "0")}`, text: `Sample document ${i}. ` + "word ".repeat(i + 3) }),
  );
  writeFileSync(join(datasetDir, "000.jsonl"), lines.join("\n") + "\n");

  const port = await freePort();
  server = spawn(PYTHON, ["-m", "pintkit.interface.cli", "serve", "--port", String(port), "--data", dataDir], {
    stdio: "ignore",
  });
  const base = `http://127.0.0.1:${port}`;
  await waitForHealth(base);
  api = new ApiClient(base);

  const created = await api.createSession({
    dataset: "demo",
    kind: "pretrain_rubric",
    n: 10,
    seed: 1,
    judges: [JUDGE],
  });
  sessionId = created.id;
  expect(created.sample_count).toBe(10);
}, 60_000);

afterAll(() => {
  server?.kill("SIGKILL");
  rmSync(dataDir, { recursive: true, force: true });
});

function fill(controller: ReviewController, verdict: [boolean, boolean, boolean]): void {
  const form = controller.state.form!;
  form.set("expository", verdict[0]);
  form.set("toxic", verdict[1]);
  form.set("clean", verdict[2]);
}

describe("full review session through the UI layer", () => {
  it("walks a judge through all ten samples and matches the hand-computed mean", async () => {
    const judgeA = new ReviewController(api, sessionId, JUDGE, "pretrain_rubric");
    await judgeA.load();
    expect(judgeA.state.sample?.position).toBe(0);

    // A second tab at the same frontier: its submission must come back as a
    // duplicate error banner, not a second write.
    const secondTab = new ReviewController(api, sessionId, JUDGE, "pretrain_rubric");
    await secondTab.load();
    expect(secondTab.state.sample?.id).toBe(judgeA.state.sample?.id);

    fill(judgeA, VERDICTS[0]);
    expect(await judgeA.submit()).toBe(true);

    fill(secondTab, VERDICTS[0]);
    expect(await secondTab.submit()).toBe(false);
    expect(secondTab.state.banner).toMatch(/duplicate_judgment/);
    // The duplicate tab resynchronizes to the true frontier.
    expect(secondTab.state.sample?.id).toBe(judgeA.state.sample?.id);

    for (const verdict of VERDICTS.slice(1, 4)) {
      fill(judgeA, verdict);
      expect(await judgeA.submit()).toBe(true);
    }

    // Page refresh mid-session: a fresh controller resumes at sample 5 of 10.
    const refreshed = new ReviewController(api, sessionId, JUDGE, "pretrain_rubric");
    await refreshed.load();
    expect(refreshed.state.sample?.position).toBe(4);

    for (const verdict of VERDICTS.slice(4)) {
      fill(refreshed, verdict);
      expect(await refreshed.submit()).toBe(true);
    }
    expect(refreshed.state.phase).toBe("done");

    const report = await api.report(sessionId);
    expect(report.status).toBe("complete");
    expect(report.partial).toBe(false);
    expect(report.progress.judged).toBe(10); // the duplicate never landed
    expect(report.mean_score).toBe(EXPECTED_MEAN);

    // Server-side yes rates double-checked against the scripted verdicts.
    const yesRate = (index: number) =>
      VERDICTS.filter((verdict) => verdict[index]).length / VERDICTS.length;
    expect(report.yes_rates?.expository).toBe(yesRate(0));
    expect(report.yes_rates?.toxic).toBe(yesRate(1));
    expect(report.yes_rates?.clean).toBe(yesRate(2));
  }, 60_000);

  it("rejects a straggler submission after completion with a machine code", async () => {
    await expect(
      api.submitJudgment(sessionId, {
        sample_id: "d00",
        judge_id: JUDGE,
        expository: true,
        toxic: false,
        clean: true,
      }),
    ).rejects.toSatisfy((err: unknown) => err instanceof ApiRequestError && err.code === "session_complete");
  }, 30_000);
});

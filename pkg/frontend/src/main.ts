import { ApiClient } from "./api.js";
import { DashboardController } from "./dashboard.js";
import { actionForKey } from "./keyboard.js";
import { escapeHtml, progressLabel, revealWhitespace } from "./render.js";
import { ReviewController } from "./review.js";
import type { SessionKind } from "./types.js";

const api = new ApiClient("");
const app = document.getElementById("app") as HTMLElement;

const GUIDANCE: Record<string, string[]> = {
  expository: [
    "Does the text explain or develop an idea step by step?",
    "Are claims backed by examples, evidence, or reasoning?",
    "Is it organized so a reader can follow the argument?",
    "Are specialist terms introduced or defined?",
    "Is the purpose to inform or explain rather than to sell or entertain?",
  ],
  toxic: [
    "Profanity or sexually inappropriate material?",
    "Language that demeans people by race, gender, religion, orientation, or ethnicity?",
    "Promotion of violence or extremist ideas?",
    "Would you find it hurtful if it were directed at you or your group?",
  ],
  clean: [
    "Free of broken or garbled words (more than 1 in 10 words is too many)?",
    "Free of scrambled passages (more than 1 in 5 paragraphs is too many)?",
    "Free of stray symbols and junk characters (more than 1 in 5 paragraphs)?",
    "Free of excessive whitespace (more than 1 in 10 words)?",
  ],
  hallucination: [
    "Does the response assert facts that look invented or unsupported?",
    "Do names, numbers, or references contradict the rest of the sample?",
    "Answer yes when the sample contains fabricated content.",
  ],
};

function judgeId(): string {
  return localStorage.getItem("pint-judge") ?? "";
}

function header(): string {
  return `
    <header>
      <h1><a href="#/">pint review</a></h1>
      <label>judge
        <input id="judge-input" type="text" placeholder="your judge id" value="${escapeHtml(judgeId())}">
      </label>
    </header>`;
}

function bindHeader(): void {
  const input = document.getElementById("judge-input") as HTMLInputElement;
  input.addEventListener("change", () => {
    localStorage.setItem("pint-judge", input.value.trim());
  });
}

// --- dashboard -------------------------------------------------------------

let dashboard: DashboardController | null = null;

function renderDashboard(): void {
  dashboard?.stop();
  dashboard = new DashboardController(api);
  const controller = dashboard;

  const draw = () => {
    const { rows, offline, loaded } = controller.state;
    const banner = offline ? `<div class="banner">Server unreachable; showing last known state.</div>` : "";
    const body = rows
      .map((row) => {
        const s = row.summary;
        const rank = row.rank !== null ? ` (rank ${row.rank})` : "";
        const link = `#/review/${encodeURIComponent(s.id)}`;
        return `<tr>
          <td><a href="${link}">${escapeHtml(s.id)}</a></td>
          <td>${escapeHtml(s.dataset)}</td>
          <td>${escapeHtml(s.kind)}</td>
          <td>${row.report ? escapeHtml(chipText(row))+ rank : ""}</td>
        </tr>`;
      })
      .join("");
    const empty = loaded && rows.length === 0
      ? `<p class="empty">No sessions yet. Create one below or with <code>pint sample</code>.</p>`
      : "";
    app.innerHTML = `
      ${header()}
      ${banner}
      <table class="sessions">
        <thead><tr><th>session</th><th>dataset</th><th>kind</th><th>status</th></tr></thead>
        <tbody>${body}</tbody>
      </table>
      ${empty}
      <details class="create">
        <summary>create session</summary>
        <form id="create-form">
          <input name="dataset" placeholder="dataset" required>
          <select name="kind">
            <option value="pretrain_rubric">pretrain_rubric</option>
            <option value="finetune_hallucination">finetune_hallucination</option>
          </select>
          <input name="n" placeholder="n (auto)" value="auto">
          <input name="seed" type="number" value="0">
          <button type="submit">create</button>
        </form>
      </details>`;
    bindHeader();
    const form = document.getElementById("create-form") as HTMLFormElement;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const rawN = String(data.get("n") || "auto");
      void api
        .createSession({
          dataset: String(data.get("dataset")),
          kind: String(data.get("kind")) as SessionKind,
          n: rawN === "auto" ? "auto" : Number(rawN),
          seed: Number(data.get("seed") || 0),
          judges: [judgeId() || "judge-1"],
        })
        .then(() => controller.refresh().then(draw))
        .catch((err) => window.alert(String(err)));
    });
  };

  controller.start(3000, draw);
}

function chipText(row: { chip: string }): string {
  return row.chip;
}

// --- review ----------------------------------------------------------------

let reviewCleanup: (() => void) | null = null;

async function renderReview(sessionId: string): Promise<void> {
  dashboard?.stop();
  const judge = judgeId();
  if (!judge) {
    app.innerHTML = `${header()}<p class="empty">Set a judge id first, then reopen the session.</p>`;
    bindHeader();
    return;
  }
  const summary = await api.getSession(sessionId);
  const controller = new ReviewController(api, sessionId, judge, summary.kind);
  let showWhitespace = false;

  const draw = () => {
    const { phase, sample, form, banner, blocker, tallies } = controller.state;
    const bannerHtml = banner
      ? `<div class="banner">${escapeHtml(banner)} <button id="dismiss">x</button></div>`
      : "";
    if (phase === "done") {
      app.innerHTML = `${header()}${bannerHtml}
        <p class="empty">All samples judged. <a href="#/">Back to sessions</a></p>`;
      bindHeader();
      bindDismiss();
      return;
    }
    if (phase === "loading" || !sample || !form) {
      app.innerHTML = `${header()}${bannerHtml}<p class="empty">Loading…</p>`;
      bindHeader();
      bindDismiss();
      return;
    }
    const text = showWhitespace ? revealWhitespace(sample.text) : sample.text;
    const controls = form.attributes
      .map((attr) => {
        const value = form.value(attr);
        const yes = value === true ? "on" : "";
        const no = value === false ? "on" : "";
        const bullets = (GUIDANCE[attr] ?? []).map((b) => `<li>${escapeHtml(b)}</li>`).join("");
        return `<div class="control" data-attr="${attr}">
          <details><summary>${attr} <kbd>${attr[0]}</kbd></summary><ul>${bullets}</ul></details>
          <button class="yes ${yes}" data-attr="${attr}" data-answer="yes">yes</button>
          <button class="no ${no}" data-attr="${attr}" data-answer="no">no</button>
        </div>`;
      })
      .join("");
    const tallyLine = tallies
      ? `<span class="tallies">judged ${tallies.judged}/${tallies.expected}</span>`
      : "";
    app.innerHTML = `${header()}${bannerHtml}
      <div class="review">
        <div class="meta">
          <span>${escapeHtml(summary.dataset)} · sample ${progressLabel(sample.position, sample.total)}</span>
          ${tallyLine}
          <button id="ws-toggle">${showWhitespace ? "hide" : "show"} whitespace <kbd>w</kbd></button>
        </div>
        <pre class="sample">${escapeHtml(text)}</pre>
        <div class="controls">${controls}</div>
        ${blocker ? `<p class="blocker">${escapeHtml(blocker)}</p>` : ""}
        <button id="submit" ${phase === "submitting" ? "disabled" : ""}>submit <kbd>Enter</kbd></button>
      </div>`;
    bindHeader();
    bindDismiss();
    (document.getElementById("ws-toggle") as HTMLButtonElement).addEventListener("click", () => {
      showWhitespace = !showWhitespace;
      draw();
    });
    for (const button of Array.from(document.querySelectorAll<HTMLButtonElement>(".control button"))) {
      button.addEventListener("click", () => {
        form.set(button.dataset.attr as string, button.dataset.answer === "yes");
        controller.state.blocker = null;
        draw();
      });
    }
    (document.getElementById("submit") as HTMLButtonElement).addEventListener("click", () => {
      void controller.submit();
    });
  };

  const bindDismiss = () => {
    document.getElementById("dismiss")?.addEventListener("click", () => controller.dismissBanner());
  };

  const onKey = (event: KeyboardEvent) => {
    if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
      return;
    }
    const action = actionForKey(summary.kind, event.key);
    if (!action) {
      return;
    }
    event.preventDefault();
    if (action.type === "submit") {
      void controller.submit();
    } else if (action.type === "whitespace") {
      showWhitespace = !showWhitespace;
      draw();
    } else {
      controller.toggle(action.attribute);
    }
  };
  document.addEventListener("keydown", onKey);
  reviewCleanup = () => document.removeEventListener("keydown", onKey);

  controller.subscribe(draw);
  await controller.load();
}

// --- router ----------------------------------------------------------------

function route(): void {
  reviewCleanup?.();
  reviewCleanup = null;
  const hash = window.location.hash;
  const match = hash.match(/^#\/review\/([^/]+)$/);
  if (match) {
    void renderReview(decodeURIComponent(match[1]));
  } else {
    renderDashboard();
  }
}

window.addEventListener("hashchange", route);
route();

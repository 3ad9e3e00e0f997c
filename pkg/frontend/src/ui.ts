// DOM wiring: a setup row (dataset id -> KB summary), the query composer
// with label autocomplete, the live chart with its confidence band, the
// numeric readout, the relaxation panel for empty answers, and the
// run/stop controls.  Everything shown is a projection of SessionView.

import { ApiError, SoftaggClient } from "./api.js";
import { ChartModel } from "./chart.js";
import { QueryRunner, SessionView } from "./session.js";
import type { KbSummary } from "./types.js";

const SAMPLE_QUERY = "SELECT AVG(Salary) FROM employee WHERE Age IS Young AND Salary IS Low";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

export class App {
  private view = new SessionView();
  private runner: QueryRunner;
  private summary: KbSummary | null = null;

  private datasetInput = el("input", { placeholder: "dataset id", size: "12" });
  private loadButton = el("button", {}, "Load dataset");
  private kbStatus = el("span", { class: "muted" }, "no dataset loaded");
  private editor = el("textarea", { rows: "3", spellcheck: "false" });
  private labelChips = el("div", { class: "chips" });
  private confidenceSelect = el("select");
  private samplePct = el("input", { type: "number", value: "1", min: "0.01", max: "100", step: "0.5" });
  private seedInput = el("input", { type: "number", placeholder: "random" });
  private runButton = el("button", { class: "primary" }, "Run");
  private stopButton = el("button", { disabled: "" }, "Stop");
  private problems = el("div", { class: "problems" });
  private stateBadge = el("span", { class: "badge idle" }, "idle");
  private readout = el("div", { class: "readout" });
  private canvas = el("canvas", { width: "860", height: "320" });
  private diagnosisPanel = el("div", { class: "diagnosis", hidden: "" });

  constructor(private client: SoftaggClient) {
    this.runner = new QueryRunner(client, this.view);
    this.view.onChange(() => this.render());
  }

  mount(root: HTMLElement): void {
    this.editor.value = SAMPLE_QUERY;
    for (const p of ["0.90", "0.95", "0.99"]) {
      const option = el("option", { value: p }, p);
      if (p === "0.95") option.setAttribute("selected", "");
      this.confidenceSelect.appendChild(option);
    }

    const setup = el("div", { class: "row" });
    setup.append("Dataset: ", this.datasetInput, this.loadButton, this.kbStatus);

    const knobs = el("div", { class: "row" });
    knobs.append(
      "confidence ", this.confidenceSelect,
      " sample % ", this.samplePct,
      " seed ", this.seedInput,
      this.runButton, this.stopButton,
    );

    root.append(
      setup,
      this.labelChips,
      this.editor,
      knobs,
      this.problems,
      el("div", { class: "row" }).appendChild(this.stateBadge).parentElement as HTMLElement,
      this.readout,
      this.canvas,
      this.diagnosisPanel,
    );

    this.loadButton.addEventListener("click", () => void this.loadDataset());
    this.runButton.addEventListener("click", () => void this.run());
    this.stopButton.addEventListener("click", () => void this.stop());
    this.render();
    void this.restoreFromHash();
  }

  private datasetId(): string {
    return this.datasetInput.value.trim();
  }

  private async loadDataset(): Promise<void> {
    this.problems.textContent = "";
    try {
      this.summary = await this.client.kbSummary(this.datasetId());
    } catch (err) {
      this.summary = null;
      this.kbStatus.textContent = describe(err);
      return;
    }
    const { source, m, labels } = this.summary;
    this.kbStatus.textContent = `${source}: ${m} rows, ${labels.length} labels`;
    this.labelChips.replaceChildren(
      el("span", { class: "muted" }, "insert: "),
      ...labels.map((key) => {
        const chip = el("button", { class: "chip", type: "button" }, key);
        chip.addEventListener("click", () => this.insertLabel(key));
        return chip;
      }),
    );
  }

  /** Autocomplete: clicking a label key splices "Attr IS Name" at the cursor. */
  private insertLabel(key: string): void {
    const split = key.indexOf("-");
    const snippet = `${key.slice(0, split)} IS ${key.slice(split + 1)}`;
    const at = this.editor.selectionStart ?? this.editor.value.length;
    const before = this.editor.value.slice(0, at);
    const after = this.editor.value.slice(this.editor.selectionEnd ?? at);
    this.editor.value = `${before}${snippet}${after}`;
    this.editor.focus();
  }

  private async run(): Promise<void> {
    this.problems.textContent = "";
    const seed = this.seedInput.value.trim();
    try {
      const queryId = await this.runner.run(this.datasetId(), {
        text: this.editor.value.trim(),
        confidence: Number(this.confidenceSelect.value),
        sample_pct: Number(this.samplePct.value),
        ...(seed ? { seed: Number(seed) } : {}),
      });
      location.hash = `q=${queryId}&ds=${encodeURIComponent(this.datasetId())}`;
    } catch (err) {
      this.showProblems(err);
    }
  }

  private async stop(): Promise<void> {
    try {
      await this.runner.stop();
    } catch (err) {
      this.showProblems(err);
    }
  }

  /** Page reload: rebuild the latest snapshot from the result endpoint. */
  private async restoreFromHash(): Promise<void> {
    const params = new URLSearchParams(location.hash.slice(1));
    const queryId = params.get("q");
    const dataset = params.get("ds");
    if (dataset) {
      this.datasetInput.value = dataset;
      await this.loadDataset();
    }
    if (queryId) {
      try {
        await this.runner.restore(queryId);
      } catch {
        // stale hash from a dead server session; start fresh
      }
    }
  }

  private showProblems(err: unknown): void {
    this.problems.replaceChildren();
    if (err instanceof ApiError && err.body) {
      this.problems.append(el("div", {}, `${err.body.code}: ${err.body.message}`));
      const details = err.body.details;
      if (Array.isArray(details)) {
        for (const d of details) this.problems.append(el("div", { class: "muted" }, String(d)));
      } else if (details && typeof details === "object") {
        this.problems.append(el("div", { class: "muted" }, JSON.stringify(details)));
      }
    } else {
      this.problems.append(el("div", {}, describe(err)));
    }
  }

  private render(): void {
    const { state, lastEvent, trajectory, diagnosis, error } = this.view;
    this.stateBadge.textContent = state;
    this.stateBadge.className = `badge ${state}`;
    this.runButton.toggleAttribute("disabled", state === "running");
    // stop is only offered mid-run, and only once
    this.stopButton.toggleAttribute(
      "disabled", state !== "running" || this.view.stopRequested);

    if (lastEvent) {
      const estimate = lastEvent.estimate === null
        ? "no qualifying tuples yet"
        : lastEvent.estimate.toFixed(4);
      const half = lastEvent.error_rate === null ? "-" : lastEvent.error_rate.toFixed(4);
      this.readout.textContent =
        `estimate ${estimate}  ±${half}  @ ${(lastEvent.confidence * 100).toFixed(0)}%  ` +
        `rows ${lastEvent.n}/${lastEvent.m} (${(lastEvent.fraction * 100).toFixed(1)}%)`;
    } else {
      this.readout.textContent = error ? `error: ${error}` : "";
    }

    ChartModel.fromTrajectory(trajectory).render(this.canvas);

    if (diagnosis && diagnosis.length) {
      this.diagnosisPanel.hidden = false;
      this.diagnosisPanel.replaceChildren(
        el("strong", {}, "No rows satisfy the full conjunction — satisfiable relaxations:"),
        ...diagnosis.map((r) =>
          el("div", {}, `${r.labels.join(" AND ")}  (${r.count} rows)`)),
      );
    } else if (diagnosis) {
      this.diagnosisPanel.hidden = false;
      this.diagnosisPanel.replaceChildren(
        el("strong", {}, "No qualifying rows sampled yet."));
    } else {
      this.diagnosisPanel.hidden = true;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.body ? `${err.body.code}: ${err.body.message}` : err.message;
  return err instanceof Error ? err.message : String(err);
}

export function bootstrap(root: HTMLElement, baseUrl = ""): App {
  const app = new App(new SoftaggClient(baseUrl));
  app.mount(root);
  return app;
}

/** App shell: model editor, run launcher, results, warnings.
 *
 * All model truth lives on the server; the UI keeps only ids (in the
 * URL hash), so reloading the page rebuilds the same view from server
 * state alone.
 */

import { Api, ApiError } from "./api.js";
import { el, fmtInt } from "./dom.js";
import { GraphView } from "./graph.js";
import { pollJob } from "./poll.js";
import { renderCciTable, renderFoldTable, renderPrChart, renderRefineSummary } from "./results.js";
import type { EvalReport, JobRecord, RefineReport } from "./types.js";
import { disconnectNode, renderWarnings } from "./warnings.js";

interface HashState {
  network?: string;
  dataset?: string;
  test?: string;
  job?: string;
  tab?: string;
}

function readHash(): HashState {
  const out: HashState = {};
  for (const [k, v] of new URLSearchParams(location.hash.slice(1))) {
    (out as Record<string, string>)[k] = v;
  }
  return out;
}

function writeHash(state: HashState): void {
  const params = new URLSearchParams();
  for (const [k, v] of Object.entries(state)) if (v) params.set(k, v);
  history.replaceState(null, "", `#${params}`);
}

class App {
  private readonly api = new Api();
  private state: HashState = readHash();
  private graph!: GraphView;
  private status!: HTMLElement;
  private readonly panes = new Map<string, HTMLElement>();

  async start(root: HTMLElement): Promise<void> {
    root.textContent = "";
    this.status = el("div", { class: "status" });
    const tabs = el("nav", { class: "tabs" });
    const main = el("main");
    root.append(el("header", {}, el("h1", {}, "expertbayes"), this.status), tabs, main);

    for (const name of ["model", "run", "results", "warnings"]) {
      const button = el("button", { type: "button", "data-tab": name }, name);
      button.addEventListener("click", () => this.showTab(name));
      tabs.append(button);
      const pane = el("section", { class: "pane hidden", "data-pane": name });
      this.panes.set(name, pane);
      main.append(pane);
    }

    await this.buildModelPane();
    await this.buildRunPane();
    await this.buildResultsPane();
    await this.buildWarningsPane();
    this.showTab(this.state.tab ?? "model");
  }

  private showTab(name: string): void {
    for (const [pane, node] of this.panes) {
      node.classList.toggle("hidden", pane !== name);
    }
    document.querySelectorAll("nav.tabs button").forEach((b) => {
      b.classList.toggle("active", b.getAttribute("data-tab") === name);
    });
    this.state.tab = name;
    writeHash(this.state);
  }

  private note(message: string): void {
    this.status.textContent = message;
  }

  private fail(err: unknown): void {
    this.note(err instanceof ApiError ? `error ${err.status}: ${err.detail}` : String(err));
  }

  // -- model ---------------------------------------------------------------

  private networkSelect!: HTMLSelectElement;
  private chainBox!: HTMLElement;

  private async buildModelPane(): Promise<void> {
    const pane = this.panes.get("model")!;
    this.networkSelect = el("select", { "data-role": "network-select" });
    this.networkSelect.addEventListener("change", () => {
      void this.openNetwork(this.networkSelect.value);
    });

    const uploadBox = el("textarea", {
      rows: "6",
      placeholder: "paste a network document (JSON) ...",
    });
    const uploadBtn = el("button", { type: "button" }, "upload network");
    uploadBtn.addEventListener("click", async () => {
      try {
        const created = await this.api.uploadNetwork(uploadBox.value);
        await this.refreshNetworks(created.id);
        this.note(`network ${created.id.slice(0, 12)} uploaded`);
      } catch (err) {
        this.fail(err);
      }
    });

    this.chainBox = el("div", { class: "chain" });
    const graphBox = el("div", { class: "graph-box" });
    pane.append(
      el("div", { class: "row" }, el("label", {}, "network: "), this.networkSelect),
      graphBox,
      this.chainBox,
      el("details", {}, el("summary", {}, "upload a network document"), uploadBox, uploadBtn),
      el(
        "p",
        { class: "hint" },
        "click two nodes to propose an edit; the server validates every change",
      ),
    );
    this.graph = new GraphView(graphBox, this.api, (newId) => {
      void this.refreshNetworks(newId);
      this.note(`edit accepted → version ${newId.slice(0, 12)}`);
    });
    await this.refreshNetworks(this.state.network);
  }

  private async refreshNetworks(selectId?: string): Promise<void> {
    try {
      const { networks } = await this.api.listNetworks();
      this.networkSelect.textContent = "";
      for (const n of networks) {
        const label = `${n.id.slice(0, 12)} (${n.variables.length} vars, ${n.edge_count} edges)`;
        this.networkSelect.append(el("option", { value: n.id }, label));
      }
      const target = selectId ?? this.state.network ?? networks[0]?.id;
      if (target) {
        this.networkSelect.value = target;
        await this.openNetwork(target);
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async openNetwork(id: string): Promise<void> {
    try {
      const record = await this.api.getNetwork(id);
      this.state.network = id;
      writeHash(this.state);
      this.graph.show(id, record.document);
      this.chainBox.textContent = record.parent
        ? `derived from ${record.parent.slice(0, 12)}`
        : "root version";
    } catch (err) {
      this.fail(err);
    }
  }

  // -- run -----------------------------------------------------------------

  private datasetSelect!: HTMLSelectElement;
  private testSelect!: HTMLSelectElement;
  private positiveSelect!: HTMLSelectElement;

  private async buildRunPane(): Promise<void> {
    const pane = this.panes.get("run")!;
    this.datasetSelect = el("select", { "data-role": "dataset-select" });
    this.testSelect = el("select", { "data-role": "test-select" });
    this.positiveSelect = el("select", { "data-role": "positive-select" });
    this.datasetSelect.addEventListener("change", () => {
      this.state.dataset = this.datasetSelect.value;
      writeHash(this.state);
      void this.refreshPositiveStates();
    });

    const csvBox = el("textarea", { rows: "5", placeholder: "paste CSV with a header row ..." });
    const classBox = el("input", { type: "text", placeholder: "class column" });
    const uploadBtn = el("button", { type: "button" }, "upload dataset");
    uploadBtn.addEventListener("click", async () => {
      try {
        const created = await this.api.uploadDataset(csvBox.value, classBox.value);
        await this.refreshDatasets(created.id);
        this.note(`dataset ${created.id.slice(0, 12)} uploaded (${created.summary.rows} rows)`);
      } catch (err) {
        this.fail(err);
      }
    });

    const mode = el("select", { "data-role": "mode" },
      el("option", { value: "refine-folds" }, "refine (cross-validated)"),
      el("option", { value: "refine-split" }, "refine (train/test datasets)"),
      el("option", { value: "evaluate" }, "evaluate learners"),
    );
    const iterations = el("input", { type: "number", value: "100", min: "1" });
    const seed = el("input", { type: "number", value: "0" });
    const threshold = el("input", { type: "number", value: "0.5", step: "0.05", min: "0", max: "1" });
    const folds = el("input", { type: "number", value: "5", min: "2" });
    const learners = el("input", { type: "text", value: "original,expertbayes,k2,tan" });

    const progress = el("div", { class: "progress", "data-role": "progress" });
    const launch = el("button", { type: "button", class: "launch" }, "launch run");
    launch.addEventListener("click", async () => {
      try {
        const request = this.buildJobRequest(
          mode.value,
          Number(iterations.value),
          Number(seed.value),
          Number(threshold.value),
          Number(folds.value),
          learners.value,
        );
        const created = await this.api.submitJob(request);
        this.state.job = created.id;
        writeHash(this.state);
        this.note(`job ${created.id} queued`);
        const record = await pollJob((id) => this.api.getJob(id), created.id, {
          onUpdate: (r) => {
            progress.textContent =
              `${r.state} — ${fmtInt(r.progress.done)}/${fmtInt(r.progress.total)}`;
          },
        });
        if (record.state === "failed") {
          this.note(`job failed: ${record.error}`);
        } else {
          this.note(`job ${record.id} done`);
          await this.refreshJobs(record.id);
          this.showTab("results");
        }
      } catch (err) {
        this.fail(err);
      }
    });

    pane.append(
      el("div", { class: "row" }, el("label", {}, "training dataset: "), this.datasetSelect),
      el("div", { class: "row" }, el("label", {}, "test dataset (split mode): "), this.testSelect),
      el("div", { class: "row" }, el("label", {}, "positive state: "), this.positiveSelect),
      el("div", { class: "row" }, el("label", {}, "mode: "), mode),
      el("div", { class: "row" },
        el("label", {}, "iterations: "), iterations,
        el("label", {}, " seed: "), seed,
        el("label", {}, " threshold: "), threshold,
        el("label", {}, " folds: "), folds,
      ),
      el("div", { class: "row" }, el("label", {}, "learners (evaluate): "), learners),
      el("div", { class: "row" }, launch, progress),
      el("details", {},
        el("summary", {}, "upload a dataset"),
        csvBox, el("div", { class: "row" }, el("label", {}, "class column: "), classBox, uploadBtn),
      ),
    );
    await this.refreshDatasets(this.state.dataset);
  }

  private buildJobRequest(
    mode: string,
    iterations: number,
    seed: number,
    threshold: number,
    folds: number,
    learners: string,
  ): Record<string, unknown> {
    const network = this.state.network;
    const dataset = this.datasetSelect.value;
    const positive = this.positiveSelect.value;
    if (!dataset) throw new Error("choose a training dataset first");
    const config = {
      iterations,
      seed,
      threshold,
      positive_state: positive,
      pseudocount: 1.0,
    };
    if (mode === "refine-split") {
      if (!this.testSelect.value) throw new Error("split mode needs a test dataset");
      return {
        kind: "refine", network, train: dataset,
        test: this.testSelect.value, config,
      };
    }
    if (mode === "refine-folds") {
      return { kind: "refine", network, train: dataset, folds, config };
    }
    return {
      kind: "evaluate",
      dataset,
      network,
      learners: learners.split(",").map((s) => s.trim()).filter(Boolean),
      folds,
      seed,
      positive_state: positive,
      config: { iterations, threshold },
    };
  }

  private async refreshDatasets(selectId?: string): Promise<void> {
    try {
      const { datasets } = await this.api.listDatasets();
      for (const select of [this.datasetSelect, this.testSelect]) {
        select.textContent = "";
        if (select === this.testSelect) select.append(el("option", { value: "" }, "(none)"));
        for (const d of datasets) {
          const label = `${d.id.slice(0, 12)} (${d.summary.rows} rows, class ${d.summary.class_column})`;
          select.append(el("option", { value: d.id }, label));
        }
      }
      if (selectId) this.datasetSelect.value = selectId;
      if (this.datasetSelect.value) {
        this.state.dataset = this.datasetSelect.value;
        await this.refreshPositiveStates();
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async refreshPositiveStates(): Promise<void> {
    this.positiveSelect.textContent = "";
    const id = this.datasetSelect.value;
    if (!id) return;
    const { summary } = await this.api
      .listDatasets()
      .then((r) => r.datasets.find((d) => d.id === id) ?? { summary: null as never });
    if (!summary) return;
    const classColumn = summary.columns.find((c) => c.name === summary.class_column);
    for (const state of classColumn?.states ?? []) {
      this.positiveSelect.append(el("option", { value: state }, state));
    }
  }

  // -- results ---------------------------------------------------------------

  private jobSelect!: HTMLSelectElement;
  private resultBox!: HTMLElement;

  private async buildResultsPane(): Promise<void> {
    const pane = this.panes.get("results")!;
    this.jobSelect = el("select", { "data-role": "job-select" });
    this.jobSelect.addEventListener("change", () => void this.openResult(this.jobSelect.value));
    this.resultBox = el("div", { class: "result-box" });
    pane.append(
      el("div", { class: "row" }, el("label", {}, "job: "), this.jobSelect),
      this.resultBox,
    );
    await this.refreshJobs(this.state.job);
  }

  private async refreshJobs(selectId?: string): Promise<void> {
    try {
      const { jobs } = await this.api.listJobs();
      this.jobSelect.textContent = "";
      for (const j of jobs) {
        this.jobSelect.append(el("option", { value: j.id }, `${j.id} (${j.kind}, ${j.state})`));
      }
      const target = selectId ?? this.state.job;
      if (target) {
        this.jobSelect.value = target;
        await this.openResult(target);
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async openResult(jobId: string): Promise<void> {
    this.resultBox.textContent = "";
    if (!jobId) return;
    this.state.job = jobId;
    writeHash(this.state);
    try {
      const record = await this.api.getJob(jobId);
      if (record.state !== "done") {
        this.resultBox.append(el("p", {}, `job is ${record.state}`));
        return;
      }
      const report = await this.api.getResult(jobId);
      if ((report as RefineReport).kind === "refine") {
        await this.renderRefine(report as RefineReport, record);
      } else if ((report as EvalReport).kind === "evaluate") {
        this.renderEval(report as EvalReport);
      } else {
        this.resultBox.append(el("pre", {}, JSON.stringify(report, null, 2)));
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private async renderRefine(report: RefineReport, record: JobRecord): Promise<void> {
    const originalId = record.request["network"] as string;
    const original = (await this.api.getNetwork(originalId)).document;
    const { panel, changes } = renderRefineSummary(report, original);
    this.resultBox.append(el("h2", {}, "winning edit"), panel);
    const graphBox = el("div", { class: "graph-box" });
    this.resultBox.append(graphBox);
    const view = new GraphView(graphBox, this.api, () => undefined, false);
    view.show(null, report.best.network, changes);
  }

  private renderEval(report: EvalReport): void {
    this.resultBox.append(
      el("h2", {}, "CCI"), renderCciTable(report),
      el("h2", {}, "per-fold CCI"), renderFoldTable(report),
      el("h2", {}, "precision-recall"), renderPrChart(report),
    );
  }

  // -- warnings ---------------------------------------------------------------

  private async buildWarningsPane(): Promise<void> {
    const pane = this.panes.get("warnings")!;
    const threshold = el("input", { type: "number", value: "0.8", step: "0.05", min: "0" });
    const runBtn = el("button", { type: "button" }, "screen for correlated variables");
    const box = el("div", { class: "warning-box" });
    runBtn.addEventListener("click", async () => {
      const network = this.state.network;
      const dataset = this.state.dataset ?? this.datasetSelect.value;
      if (!network || !dataset) {
        this.note("pick a network and a dataset first");
        return;
      }
      try {
        const record = await this.api.getNetwork(network);
        const { warnings } = await this.api.screen(network, dataset, Number(threshold.value));
        box.textContent = "";
        box.append(
          renderWarnings(warnings, record.document.class_variable, async (node) => {
            try {
              const newId = await disconnectNode(this.api, network, record.document, node);
              this.note(`disconnected ${node} → version ${newId.slice(0, 12)}`);
              await this.refreshNetworks(newId);
            } catch (err) {
              this.fail(err);
            }
          }),
        );
      } catch (err) {
        this.fail(err);
      }
    });
    pane.append(
      el("div", { class: "row" }, el("label", {}, "NMI threshold: "), threshold, runBtn),
      el("p", { class: "hint" }, "run this before refining; highly associated pairs can fake perfect classifiers"),
      box,
    );
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void new App().start(document.getElementById("app")!);
}

export { App };

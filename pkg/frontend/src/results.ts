/** Result views: CCI tables, per-fold table, PR chart, refine diff summary. */

import { diffEdges, type EdgeChange } from "./diff.js";
import { el, fmt, svgEl } from "./dom.js";
import type { EvalReport, NetworkDocument, RefineReport } from "./types.js";

export function renderCciTable(report: EvalReport): HTMLElement {
  const table = el("table", { class: "cci-table" });
  const head = el("tr", {}, el("th", {}, "learner"), el("th", {}, "macro CCI"));
  table.append(head);
  for (const learner of report.learners) {
    table.append(
      el(
        "tr",
        { "data-learner": learner.name },
        el("td", {}, learner.name),
        el("td", { class: "num", "data-field": "macro_cci" }, fmt(learner.macro_cci)),
      ),
    );
  }
  table.append(
    el(
      "tr",
      { class: "baseline" },
      el("td", {}, "baseline precision"),
      el("td", { class: "num", "data-field": "baseline_precision" }, fmt(report.baseline_precision)),
    ),
  );
  return table;
}

export function renderFoldTable(report: EvalReport): HTMLElement {
  const table = el("table", { class: "fold-table" });
  const head = el("tr", {}, el("th", {}, "learner"));
  for (let f = 0; f < report.folds.k; f++) head.append(el("th", {}, `fold ${f}`));
  table.append(head);
  for (const learner of report.learners) {
    const row = el("tr", { "data-learner": learner.name }, el("td", {}, learner.name));
    for (const cci of learner.fold_cci) {
      row.append(el("td", { class: "num", "data-field": "fold_cci" }, fmt(cci)));
    }
    table.append(row);
  }
  return table;
}

const CHART_W = 420;
const CHART_H = 300;
const PAD = 44;

/** Precision-recall chart; point values mirror the report exactly. */
export function renderPrChart(report: EvalReport): HTMLElement {
  const wrap = el("div", { class: "pr-chart" });
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_W} ${CHART_H}`,
    width: String(CHART_W),
    height: String(CHART_H),
  });
  const x = (recall: number) => PAD + recall * (CHART_W - PAD - 12);
  const y = (precision: number) => CHART_H - PAD - precision * (CHART_H - PAD - 12);

  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    svg.append(
      svgEl("line", {
        x1: String(x(0)), y1: String(y(tick)),
        x2: String(x(1)), y2: String(y(tick)),
        class: "grid",
      }),
    );
    const label = svgEl("text", { x: "8", y: String(y(tick) + 4), class: "tick" });
    label.textContent = String(tick);
    svg.append(label);
    const xlabel = svgEl("text", {
      x: String(x(tick)), y: String(CHART_H - PAD + 18),
      class: "tick", "text-anchor": "middle",
    });
    xlabel.textContent = String(tick);
    svg.append(xlabel);
  }
  const axisTitleX = svgEl("text", {
    x: String(x(0.5)), y: String(CHART_H - 8), class: "axis", "text-anchor": "middle",
  });
  axisTitleX.textContent = "recall";
  const axisTitleY = svgEl("text", {
    x: "12", y: String(y(0.5)), class: "axis",
    transform: `rotate(-90 12 ${y(0.5)})`, "text-anchor": "middle",
  });
  axisTitleY.textContent = "precision";
  svg.append(axisTitleX, axisTitleY);

  report.learners.forEach((learner, li) => {
    const series = svgEl("g", { class: `series s${li}`, "data-learner": learner.name });
    const drawable = learner.pr.filter((p) => p.precision !== null);
    const path = drawable
      .map((p, i) => `${i === 0 ? "M" : "L"} ${x(p.recall)} ${y(p.precision as number)}`)
      .join(" ");
    if (path) series.append(svgEl("path", { d: path, class: "curve" }));
    for (const p of learner.pr) {
      if (p.precision === null) continue; // undefined precision: gap, not a point
      series.append(
        svgEl("circle", {
          cx: String(x(p.recall)),
          cy: String(y(p.precision)),
          r: "3.5",
          class: "pt",
          "data-threshold": fmt(p.threshold),
          "data-precision": fmt(p.precision),
          "data-recall": fmt(p.recall),
        }),
      );
    }
    svg.append(series);
  });

  const legend = el("div", { class: "legend" });
  report.learners.forEach((learner, li) => {
    legend.append(el("span", { class: `swatch s${li}` }), el("span", {}, learner.name));
  });
  wrap.append(svg, legend);
  return wrap;
}

const CHANGE_WORD: Record<EdgeChange["kind"], string> = {
  added: "added",
  removed: "removed",
  reversed: "reversed to",
};

/** Refine summary: scores plus the single color-coded differing edge. */
export function renderRefineSummary(
  report: RefineReport,
  original: NetworkDocument,
): { panel: HTMLElement; changes: EdgeChange[] } {
  const changes = diffEdges(original, report.best.network);
  const panel = el("div", { class: "refine-summary" });
  const scores = el("table", { class: "score-table" });
  scores.append(
    el("tr", {}, el("th", {}, ""), el("th", {}, "train CCI"), el("th", {}, "test CCI")),
    el(
      "tr",
      { "data-row": "original" },
      el("td", {}, "original"),
      el("td", { class: "num", "data-field": "original_train" }, fmt(report.original.train_cci)),
      el("td", { class: "num", "data-field": "original_test" }, fmt(report.original.test_cci)),
    ),
    el(
      "tr",
      { "data-row": "best" },
      el("td", {}, "best"),
      el("td", { class: "num", "data-field": "best_train" }, fmt(report.best.train_cci)),
      el("td", { class: "num", "data-field": "best_test" }, fmt(report.best.test_cci)),
    ),
  );
  panel.append(scores);

  const list = el("ul", { class: "diff-list" });
  if (changes.length === 0) {
    list.append(el("li", { class: "unchanged" }, "no change: the original network was retained"));
  }
  for (const change of changes) {
    list.append(
      el(
        "li",
        { class: `change ${change.kind}`, "data-change": change.kind },
        `${CHANGE_WORD[change.kind]} ${change.parent} → ${change.child}`,
      ),
    );
  }
  panel.append(list);
  return { panel, changes };
}

/** SVG network editor: click two nodes to propose add / remove / reverse.
 *
 * The client never decides acyclicity: every proposal goes to
 * POST /v1/networks/{id}/edits and a 409 is rendered inline, leaving the
 * graph exactly as it was.
 */

import { Api, ApiError } from "./api.js";
import { diffEdges, type EdgeChange } from "./diff.js";
import { el, svgEl } from "./dom.js";
import { layeredLayout, layoutExtent } from "./layout.js";
import type { EditRequest, NetworkDocument } from "./types.js";

const NODE_W = 108;
const NODE_H = 34;

export class GraphView {
  private networkId: string | null = null;
  private doc: NetworkDocument | null = null;
  private highlights: EdgeChange[] = [];
  private selected: string | null = null;
  private readonly banner: HTMLElement;
  private readonly menu: HTMLElement;
  private readonly canvas: HTMLElement;

  constructor(
    private readonly container: HTMLElement,
    private readonly api: Api,
    private readonly onVersion: (newId: string) => void,
    private readonly editable = true,
  ) {
    this.banner = el("div", { class: "banner hidden", role: "alert" });
    this.menu = el("div", { class: "edit-menu hidden" });
    this.canvas = el("div", { class: "graph-canvas" });
    this.container.append(this.banner, this.menu, this.canvas);
  }

  show(networkId: string | null, doc: NetworkDocument, highlights: EdgeChange[] = []): void {
    this.networkId = networkId;
    this.doc = doc;
    this.highlights = highlights;
    this.selected = null;
    this.hideMenu();
    this.render();
  }

  get document(): NetworkDocument | null {
    return this.doc;
  }

  /** Compare a result network against the shown one and highlight the diff. */
  showDiffAgainst(best: NetworkDocument): void {
    if (!this.doc) return;
    this.highlights = diffEdges(this.doc, best);
    this.render();
  }

  edgeKeys(): string[] {
    if (!this.doc) return [];
    return this.doc.edges.map((e) => `${e.parent}->${e.child}`).sort();
  }

  showError(message: string): void {
    this.banner.textContent = "";
    this.banner.append(
      message,
      el("button", { class: "dismiss", type: "button" }, "dismiss"),
    );
    this.banner.querySelector("button")!.addEventListener("click", () => {
      this.banner.classList.add("hidden");
    });
    this.banner.classList.remove("hidden");
  }

  private hideMenu(): void {
    this.menu.classList.add("hidden");
    this.menu.textContent = "";
  }

  private async propose(edit: EditRequest): Promise<void> {
    if (!this.networkId) return;
    this.hideMenu();
    try {
      const created = await this.api.proposeEdit(this.networkId, edit);
      this.onVersion(created.id);
    } catch (err) {
      // 409 (cycle / inapplicable) and anything else: report, change nothing
      this.showError(err instanceof ApiError ? err.detail : String(err));
      this.render();
    }
  }

  private openMenu(a: string, b: string): void {
    if (!this.doc) return;
    const forward = this.doc.edges.some((e) => e.parent === a && e.child === b);
    const backward = this.doc.edges.some((e) => e.parent === b && e.child === a);
    const options: { label: string; edit: EditRequest }[] = [];
    if (forward || backward) {
      options.push({ label: "remove edge", edit: { kind: "remove", a, b } });
      options.push({ label: "reverse edge", edit: { kind: "reverse", a, b } });
    } else {
      options.push({ label: `add ${a} → ${b}`, edit: { kind: "add", a, b, direction: "a_to_b" } });
      options.push({ label: `add ${b} → ${a}`, edit: { kind: "add", a, b, direction: "b_to_a" } });
    }
    this.menu.textContent = "";
    this.menu.append(el("span", { class: "pair" }, `${a} · ${b}: `));
    for (const option of options) {
      const button = el("button", { type: "button", "data-edit": option.edit.kind }, option.label);
      button.addEventListener("click", () => void this.propose(option.edit));
      this.menu.append(button);
    }
    const cancel = el("button", { type: "button", class: "cancel" }, "cancel");
    cancel.addEventListener("click", () => this.hideMenu());
    this.menu.append(cancel);
    this.menu.classList.remove("hidden");
  }

  private handleNodeClick(name: string): void {
    if (!this.editable) return;
    if (this.selected === null) {
      this.selected = name;
    } else if (this.selected === name) {
      this.selected = null;
    } else {
      const first = this.selected;
      this.selected = null;
      this.render();
      this.openMenu(first, name);
      return;
    }
    this.render();
  }

  private render(): void {
    this.canvas.textContent = "";
    if (!this.doc) return;
    const positions = layeredLayout(this.doc);
    const { width, height } = layoutExtent(positions);
    const svg = svgEl("svg", {
      viewBox: `0 0 ${width} ${height}`,
      width: String(width),
      height: String(height),
      class: "graph",
    });

    const defs = svgEl("defs");
    for (const color of ["plain", "added", "removed", "reversed"]) {
      const marker = svgEl("marker", {
        id: `arrow-${color}`,
        viewBox: "0 0 10 10",
        refX: "9",
        refY: "5",
        markerWidth: "7",
        markerHeight: "7",
        orient: "auto-start-reverse",
      });
      const tip = svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", class: `arrow ${color}` });
      marker.append(tip);
      defs.append(marker);
    }
    svg.append(defs);

    const changeKind = new Map<string, string>();
    for (const c of this.highlights) {
      changeKind.set(`${c.parent}->${c.child}`, c.kind);
      if (c.kind === "reversed") changeKind.set(`${c.child}->${c.parent}`, "reversed");
    }

    const drawEdge = (parent: string, child: string, kind: string) => {
      const from = positions.get(parent)!;
      const to = positions.get(child)!;
      const line = svgEl("line", {
        x1: String(from.x + NODE_W / 2),
        y1: String(from.y),
        x2: String(to.x - NODE_W / 2),
        y2: String(to.y),
        class: `edge ${kind}`,
        "data-edge": `${parent}->${child}`,
        "data-kind": kind,
        "marker-end": `url(#arrow-${kind})`,
      });
      svg.append(line);
    };

    for (const e of this.doc.edges) {
      drawEdge(e.parent, e.child, changeKind.get(`${e.parent}->${e.child}`) ?? "plain");
    }
    // removed edges are not in the document; draw them dashed from the diff
    for (const c of this.highlights) {
      if (c.kind === "removed") drawEdge(c.parent, c.child, "removed");
    }

    for (const variable of this.doc.variables) {
      const p = positions.get(variable.name)!;
      const group = svgEl("g", {
        class:
          "node" +
          (variable.name === this.doc.class_variable ? " class-node" : "") +
          (variable.name === this.selected ? " selected" : ""),
        "data-node": variable.name,
        transform: `translate(${p.x - NODE_W / 2}, ${p.y - NODE_H / 2})`,
      });
      group.append(
        svgEl("rect", { width: String(NODE_W), height: String(NODE_H), rx: "6" }),
      );
      const label = svgEl("text", {
        x: String(NODE_W / 2),
        y: String(NODE_H / 2 + 4),
        "text-anchor": "middle",
      });
      label.textContent = variable.name;
      group.append(label);
      group.addEventListener("click", () => this.handleNodeClick(variable.name));
      svg.append(group);
    }
    this.canvas.append(svg);
  }
}

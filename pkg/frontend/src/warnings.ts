/** Correlation warnings shown before a run, with one-click disconnect.
 *
 * The edit vocabulary has no node deletion, so "remove from model"
 * disconnects the node by issuing one Remove edit per incident edge,
 * each through the server (chaining network versions).
 */

import { Api } from "./api.js";
import { el, fmt } from "./dom.js";
import type { CorrelationWarning, NetworkDocument } from "./types.js";

export function renderWarnings(
  warnings: CorrelationWarning[],
  classVariable: string,
  onDisconnect: (node: string) => void,
): HTMLElement {
  const panel = el("div", { class: "warnings" });
  if (warnings.length === 0) {
    panel.append(el("p", { class: "ok" }, "no variable pairs above the threshold"));
    return panel;
  }
  const list = el("ul", { class: "warning-list" });
  for (const w of warnings) {
    const item = el(
      "li",
      { "data-pair": `${w.a}|${w.b}` },
      el("span", { class: "pair" }, `${w.a} ↔ ${w.b}`),
      el("span", { class: "score num" }, fmt(w.score)),
    );
    for (const node of [w.a, w.b]) {
      if (node === classVariable) continue; // never offer to drop the class
      const button = el(
        "button",
        { type: "button", "data-disconnect": node },
        `disconnect ${node}`,
      );
      button.addEventListener("click", () => onDisconnect(node));
      item.append(button);
    }
    list.append(item);
  }
  panel.append(list);
  return panel;
}

/** Remove every edge touching the node; returns the final network id. */
export async function disconnectNode(
  api: Api,
  networkId: string,
  doc: NetworkDocument,
  node: string,
): Promise<string> {
  let currentId = networkId;
  for (const edge of doc.edges) {
    if (edge.parent !== node && edge.child !== node) continue;
    const created = await api.proposeEdit(currentId, {
      kind: "remove",
      a: edge.parent,
      b: edge.child,
    });
    currentId = created.id;
  }
  return currentId;
}

/** Deterministic layered DAG layout.
 *
 * Nodes are ranked by longest path from a root; within a rank they keep
 * variable-declaration order. The same document therefore always lands
 * on identical coordinates, so experts can compare renders across runs.
 */

import type { NetworkDocument } from "./types.js";

export interface NodePosition {
  name: string;
  rank: number;
  slot: number;
  x: number;
  y: number;
}

export interface LayoutOptions {
  columnWidth: number;
  rowHeight: number;
  marginX: number;
  marginY: number;
}

export const DEFAULT_LAYOUT: LayoutOptions = {
  columnWidth: 170,
  rowHeight: 76,
  marginX: 70,
  marginY: 48,
};

export function layeredLayout(
  doc: NetworkDocument,
  options: LayoutOptions = DEFAULT_LAYOUT,
): Map<string, NodePosition> {
  const names = doc.variables.map((v) => v.name);
  const index = new Map(names.map((n, i) => [n, i]));
  const parents = new Map<string, string[]>(names.map((n) => [n, []]));
  const children = new Map<string, string[]>(names.map((n) => [n, []]));
  for (const e of doc.edges) {
    parents.get(e.child)!.push(e.parent);
    children.get(e.parent)!.push(e.child);
  }

  // longest-path ranks via Kahn order (graphs arrive acyclic from the server)
  const indegree = new Map(names.map((n) => [n, parents.get(n)!.length]));
  const ready = names.filter((n) => indegree.get(n) === 0);
  ready.sort((a, b) => index.get(a)! - index.get(b)!);
  const rank = new Map(names.map((n) => [n, 0]));
  const order: string[] = [];
  while (ready.length) {
    const node = ready.shift()!;
    order.push(node);
    for (const child of [...children.get(node)!].sort(
      (a, b) => index.get(a)! - index.get(b)!,
    )) {
      rank.set(child, Math.max(rank.get(child)!, rank.get(node)! + 1));
      indegree.set(child, indegree.get(child)! - 1);
      if (indegree.get(child) === 0) {
        ready.push(child);
        ready.sort((a, b) => index.get(a)! - index.get(b)!);
      }
    }
  }

  const byRank = new Map<number, string[]>();
  for (const n of names) {
    const r = rank.get(n)!;
    if (!byRank.has(r)) byRank.set(r, []);
    byRank.get(r)!.push(n);
  }

  const positions = new Map<string, NodePosition>();
  for (const [r, members] of [...byRank.entries()].sort((a, b) => a[0] - b[0])) {
    members.sort((a, b) => index.get(a)! - index.get(b)!);
    members.forEach((name, slot) => {
      positions.set(name, {
        name,
        rank: r,
        slot,
        x: options.marginX + r * options.columnWidth,
        y: options.marginY + slot * options.rowHeight,
      });
    });
  }
  return positions;
}

export function layoutExtent(
  positions: Map<string, NodePosition>,
  options: LayoutOptions = DEFAULT_LAYOUT,
): { width: number; height: number } {
  let width = options.marginX * 2;
  let height = options.marginY * 2;
  for (const p of positions.values()) {
    width = Math.max(width, p.x + options.marginX);
    height = Math.max(height, p.y + options.marginY);
  }
  return { width, height };
}

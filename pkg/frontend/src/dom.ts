/** Tiny DOM helpers; no framework. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

/**
 * Numbers are displayed exactly as report documents serialize them
 * (shortest round-trip decimal; integral floats keep a trailing ".0"),
 * so what the user reads is byte-equal to what the server wrote.
 */
export function fmt(value: number): string {
  return Number.isInteger(value) ? value.toFixed(1) : String(value);
}

/** Counts and other true integers. */
export function fmtInt(value: number): string {
  return String(value);
}

/** Precision gaps (no predicted positives) render as a dash, never 0 or 1. */
export function fmtOptional(value: number | null): string {
  return value === null ? "—" : fmt(value);
}

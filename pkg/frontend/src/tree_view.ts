/** SVG rendering of the symbolic tree.
 *
 * Conditions are yellow diamonds, statements blue boxes, leaves colored
 * circles (green covered, red uncovered, gray unreachable). The selected
 * path's nodes and edges are highlighted in orange; clicking a leaf selects
 * its path.
 */

import { layoutTree, pathNodeIds } from "./tree_layout.js";
import type { TreeJson } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const X_STEP = 92;
const Y_STEP = 64;
const MARGIN = 46;

export const STATUS_FILL: Record<string, string> = {
  covered: "#66bb6a",
  uncovered: "#ef5350",
  infeasible: "#bdbdbd",
  "bound-exceeded": "#bdbdbd",
};

export interface TreeViewOptions {
  selectedPath?: string | null;
  flashPath?: string | null;
  onSelectLeaf?: (pathId: string) => void;
}

function truncate(text: string, limit = 22): string {
  return text.length > limit ? text.slice(0, limit - 1) + "…" : text;
}

function el(name: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, name) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export function renderTree(svg: SVGElement, tree: TreeJson, opts: TreeViewOptions = {}): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  let layout;
  try {
    layout = layoutTree(tree);
  } catch (err) {
    const msg = el("text", { x: "10", y: "24", class: "tree-error" });
    msg.textContent = `cannot render tree: ${err instanceof Error ? err.message : err}`;
    svg.appendChild(msg);
    return;
  }
  const width = layout.width * X_STEP + 2 * MARGIN;
  const height = layout.height * Y_STEP + 2 * MARGIN;
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));

  const px = (x: number) => MARGIN + x * X_STEP + X_STEP / 2;
  const py = (y: number) => MARGIN + y * Y_STEP;

  const leafByNode = new Map<number, string>();
  for (const [pid, nid] of Object.entries(tree.leaves)) leafByNode.set(nid, pid);

  const selectedChain = new Set<number>();
  if (opts.selectedPath && tree.leaves[opts.selectedPath] !== undefined) {
    for (const id of pathNodeIds(tree, tree.leaves[opts.selectedPath])) selectedChain.add(id);
  }

  for (const edge of layout.edges) {
    const a = layout.byId.get(edge.from)!;
    const b = layout.byId.get(edge.to)!;
    const onPath = selectedChain.has(edge.from) && selectedChain.has(edge.to);
    const line = el("line", {
      x1: String(px(a.x)),
      y1: String(py(a.y)),
      x2: String(px(b.x)),
      y2: String(py(b.y)),
      class: onPath ? "tree-edge selected" : "tree-edge",
      stroke: onPath ? "#ef6c00" : "#90a4ae",
      "stroke-width": onPath ? "3.5" : "1.5",
    });
    svg.appendChild(line);
    if (edge.outcome !== undefined) {
      const label = el("text", {
        x: String((px(a.x) + px(b.x)) / 2 + 6),
        y: String((py(a.y) + py(b.y)) / 2 - 4),
        class: "edge-label",
        fill: "#546e7a",
        "font-size": "12",
      });
      label.textContent = edge.outcome ? "T" : "F";
      svg.appendChild(label);
    }
  }

  for (const placed of layout.nodes) {
    const { node } = placed;
    const cx = px(placed.x);
    const cy = py(placed.y);
    const onPath = selectedChain.has(node.id);
    const group = el("g", {
      class: `tree-node kind-${node.kind}` + (onPath ? " selected" : ""),
      "data-node-id": String(node.id),
    });
    let shape: SVGElement;
    if (node.kind === "condition") {
      const w = 30;
      const points = `${cx},${cy - w / 2} ${cx + w},${cy} ${cx},${cy + w / 2} ${cx - w},${cy}`;
      shape = el("polygon", { points, fill: "#ffe082", stroke: onPath ? "#ef6c00" : "#8d6e63" });
    } else if (node.kind === "terminal") {
      const status = node.status ?? "uncovered";
      shape = el("circle", {
        cx: String(cx),
        cy: String(cy),
        r: "13",
        fill: STATUS_FILL[status] ?? "#bdbdbd",
        stroke: onPath ? "#ef6c00" : "#455a64",
        "data-status": status,
      });
      const pid = leafByNode.get(node.id);
      if (pid !== undefined) {
        group.setAttribute("data-path-id", pid);
        group.setAttribute("role", "button");
        if (opts.onSelectLeaf) {
          group.addEventListener("click", () => opts.onSelectLeaf!(pid));
        }
        if (opts.flashPath === pid) group.classList.add("flash");
      }
    } else {
      shape = el("rect", {
        x: String(cx - 34),
        y: String(cy - 13),
        width: "68",
        height: "26",
        rx: "4",
        fill: "#b3e5fc",
        stroke: onPath ? "#ef6c00" : "#546e7a",
      });
    }
    if (onPath) shape.setAttribute("stroke-width", "3");
    group.appendChild(shape);
    const text = el("text", {
      x: String(cx),
      y: String(cy + (node.kind === "terminal" ? 28 : 4)),
      "text-anchor": "middle",
      class: "node-label",
      "font-size": "11",
    });
    text.textContent = truncate(node.label);
    const title = el("title", {});
    title.textContent = node.label;
    group.appendChild(title);
    group.appendChild(text);
    svg.appendChild(group);
  }
}

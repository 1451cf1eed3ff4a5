/** Pure tidy-ish tree layout on a unit grid.
 *
 * Leaves take consecutive x slots in child order (which is enumeration
 * order); every internal node sits at the mean x of its children; y is the
 * node's depth. The view scales unit coordinates to pixels.
 */

import type { TreeJson, TreeNodeJson } from "./types.js";

export interface PlacedNode {
  node: TreeNodeJson;
  x: number;
  y: number;
}

export interface PlacedEdge {
  from: number;
  to: number;
  outcome?: boolean;
}

export interface Layout {
  nodes: PlacedNode[];
  edges: PlacedEdge[];
  width: number; // max x + 1
  height: number; // max depth + 1
  byId: Map<number, PlacedNode>;
}

export function indexNodes(tree: TreeJson): Map<number, TreeNodeJson> {
  const map = new Map<number, TreeNodeJson>();
  for (const n of tree.nodes) map.set(n.id, n);
  return map;
}

export function parentMap(tree: TreeJson): Map<number, number> {
  const parents = new Map<number, number>();
  for (const n of tree.nodes) {
    for (const c of n.children) parents.set(c, n.id);
  }
  return parents;
}

/** Node ids on the root-to-leaf walk of one path. */
export function pathNodeIds(tree: TreeJson, leafNodeId: number): number[] {
  const parents = parentMap(tree);
  const chain: number[] = [];
  let cur: number | undefined = leafNodeId;
  while (cur !== undefined) {
    chain.push(cur);
    cur = parents.get(cur);
  }
  chain.reverse();
  return chain;
}

export function layoutTree(tree: TreeJson): Layout {
  const byId = indexNodes(tree);
  const placed = new Map<number, PlacedNode>();
  const edges: PlacedEdge[] = [];
  let nextLeafX = 0;
  let maxDepth = 0;

  const place = (id: number, depth: number): number => {
    const node = byId.get(id);
    if (node === undefined) throw new Error(`tree references unknown node ${id}`);
    maxDepth = Math.max(maxDepth, depth);
    let x: number;
    if (node.children.length === 0) {
      x = nextLeafX++;
    } else {
      const xs = node.children.map((c) => place(c, depth + 1));
      x = xs.reduce((a, b) => a + b, 0) / xs.length;
      for (const c of node.children) {
        const child = byId.get(c)!;
        edges.push({ from: id, to: c, outcome: child.outcome });
      }
    }
    const entry = { node, x, y: depth };
    placed.set(id, entry);
    return x;
  };

  place(tree.rootId, 0);
  const nodes = tree.nodes.filter((n) => placed.has(n.id)).map((n) => placed.get(n.id)!);
  return {
    nodes,
    edges,
    width: Math.max(nextLeafX, 1),
    height: maxDepth + 1,
    byId: placed,
  };
}

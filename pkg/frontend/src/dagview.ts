// Geometry and path helpers for the Reference Panel flow diagram. The layout
// itself comes from the server (layer and within-layer order); the client
// only maps it to pixels and resolves hover highlighting.

import type { DagEdge, DagNode, DagView } from "./api.js";

export const LAYER_SPACING = 120;
export const ROW_SPACING = 48;
export const MARGIN = 40;

export type PlacedNode = DagNode & { px: number; py: number };

export function placeNodes(view: DagView): Map<string, PlacedNode> {
  const placed = new Map<string, PlacedNode>();
  for (const node of view.nodes) {
    placed.set(node.id, {
      ...node,
      px: MARGIN + node.layer * LAYER_SPACING,
      py: MARGIN + node.x * ROW_SPACING,
    });
  }
  return placed;
}

export function diagramSize(view: DagView): { width: number; height: number } {
  let maxLayer = 0;
  let maxRow = 0;
  for (const node of view.nodes) {
    maxLayer = Math.max(maxLayer, node.layer);
    maxRow = Math.max(maxRow, node.x);
  }
  return { width: maxLayer * LAYER_SPACING + 2 * MARGIN, height: maxRow * ROW_SPACING + 2 * MARGIN };
}

// Edge width scales with the number of source configurations on the edge.
export function edgeWidth(weight: number): number {
  return 1.5 + Math.min(6, Math.log2(weight + 1) * 2);
}

// Every edge lying on some start-to-end path through the node: the union of
// edges reachable backward from it and forward from it.
export function edgesThroughNode(view: DagView, nodeId: string): Set<string> {
  const incoming = new Map<string, DagEdge[]>();
  const outgoing = new Map<string, DagEdge[]>();
  for (const edge of view.edges) {
    (incoming.get(edge.to) ?? incoming.set(edge.to, []).get(edge.to)!).push(edge);
    (outgoing.get(edge.from) ?? outgoing.set(edge.from, []).get(edge.from)!).push(edge);
  }
  const marked = new Set<string>();
  const walk = (start: string, forward: boolean) => {
    const queue = [start];
    const seen = new Set<string>([start]);
    while (queue.length) {
      const current = queue.pop()!;
      for (const edge of (forward ? outgoing : incoming).get(current) ?? []) {
        marked.add(edgeKey(edge));
        const next = forward ? edge.to : edge.from;
        if (!seen.has(next)) {
          seen.add(next);
          queue.push(next);
        }
      }
    }
  };
  walk(nodeId, true);
  walk(nodeId, false);
  return marked;
}

export function edgeKey(edge: DagEdge): string {
  return `${edge.from}->${edge.to}`;
}

export const EDGE_COLORS: Record<DagEdge["class"], string> = {
  current: "#2e7d32",
  recommended: "#1565c0",
  other: "#9e9e9e",
};

export const TOKEN_COLORS: Record<string, string> = {
  start: "#455a64",
  end: "#455a64",
  split: "#90a4ae",
  ideogram: "#6b7280",
  highlight: "#e15759",
  line: "#4e79a7",
  scatter: "#59a14f",
  histogram: "#af7aa1",
  heatmap: "#f28e2b",
  tile: "#9c755f",
  chord: "#76b7b2",
  others: "#bab0ac",
};

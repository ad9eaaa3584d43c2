/**
 * Automatic layered layout for the graph canvas.
 *
 * Columns are breadth-first depth from the start node; nodes the walk
 * cannot reach are parked in one extra column on the right. Purely
 * presentational: coordinates are derived on every render and never
 * persisted or sent to the service.
 */

import type { GraphDocument } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
  column: number;
  row: number;
}

export interface GraphLayout {
  positions: Map<string, NodePosition>;
  width: number;
  height: number;
}

export const NODE_WIDTH = 168;
export const NODE_HEIGHT = 54;
export const COLUMN_GAP = 92;
export const ROW_GAP = 26;
export const MARGIN = 24;

/** Assigns each node a column (BFS depth) and a row within the column. */
export function layeredLayout(doc: GraphDocument): GraphLayout {
  const nodeIds = new Set(doc.nodes.map((n) => n.id));
  const depth = new Map<string, number>();

  if (doc.start_node !== null && nodeIds.has(doc.start_node)) {
    depth.set(doc.start_node, 0);
    const queue = [doc.start_node];
    while (queue.length > 0) {
      const current = queue.shift() as string;
      const currentDepth = depth.get(current) as number;
      for (const edge of doc.edges) {
        if (edge.from !== current || !nodeIds.has(edge.to) || depth.has(edge.to)) {
          continue;
        }
        depth.set(edge.to, currentDepth + 1);
        queue.push(edge.to);
      }
    }
  }

  const maxDepth = depth.size > 0 ? Math.max(...depth.values()) : -1;
  const strandedColumn = maxDepth + 1;
  const columns = new Map<number, string[]>();
  for (const node of doc.nodes) {
    const column = depth.get(node.id) ?? strandedColumn;
    const bucket = columns.get(column) ?? [];
    bucket.push(node.id);
    columns.set(column, bucket);
  }

  const positions = new Map<string, NodePosition>();
  let maxRows = 0;
  for (const [column, ids] of columns) {
    ids.sort();
    maxRows = Math.max(maxRows, ids.length);
    ids.forEach((id, row) => {
      positions.set(id, {
        x: MARGIN + column * (NODE_WIDTH + COLUMN_GAP),
        y: MARGIN + row * (NODE_HEIGHT + ROW_GAP),
        column,
        row,
      });
    });
  }

  const columnCount = columns.size > 0 ? Math.max(...columns.keys()) + 1 : 0;
  return {
    positions,
    width: MARGIN * 2 + Math.max(0, columnCount * NODE_WIDTH + (columnCount - 1) * COLUMN_GAP),
    height: MARGIN * 2 + Math.max(0, maxRows * NODE_HEIGHT + (maxRows - 1) * ROW_GAP),
  };
}

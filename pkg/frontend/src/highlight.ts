/**
 * Extracts the traversal highlight from the service's Graphviz overlay.
 *
 * The path itself is computed server side; the overlay marks visited
 * nodes and edges with penwidth=3. Parsing the overlay instead of
 * replaying the transcript keeps path logic out of the browser.
 */

export interface OverlayHighlight {
  nodeIds: Set<string>;
  /** Visited transitions as from/to/label triples (DOT has no edge ids). */
  edges: { from: string; to: string; label: string }[];
}

function unquote(raw: string): string {
  return raw.replace(/\\"/g, '"').replace(/\\\\/g, "\\");
}

const NODE_LINE = /^\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];?\s*$/;
const EDGE_LINE = /^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*\[(.*)\];?\s*$/;
const LABEL_ATTR = /label="((?:[^"\\]|\\.)*)"/;

/** True when the attribute list marks the element, ignoring label text. */
function isMarked(attrs: string): boolean {
  return /(^|[,\s])penwidth=3([,\s]|$)/.test(attrs.replace(LABEL_ATTR, ""));
}

export function parseOverlay(dot: string): OverlayHighlight {
  const nodeIds = new Set<string>();
  const edges: { from: string; to: string; label: string }[] = [];
  for (const line of dot.split("\n")) {
    const edgeMatch = EDGE_LINE.exec(line);
    if (edgeMatch) {
      if (isMarked(edgeMatch[3])) {
        const label = LABEL_ATTR.exec(edgeMatch[3]);
        edges.push({
          from: unquote(edgeMatch[1]),
          to: unquote(edgeMatch[2]),
          label: label ? unquote(label[1]) : "",
        });
      }
      continue;
    }
    const nodeMatch = NODE_LINE.exec(line);
    if (nodeMatch && isMarked(nodeMatch[2])) {
      nodeIds.add(unquote(nodeMatch[1]));
    }
  }
  return { nodeIds, edges };
}

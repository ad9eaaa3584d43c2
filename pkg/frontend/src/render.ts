/**
 * SVG rendering of a graph document on the layered layout.
 *
 * Shared by the builder (selectable nodes and edges) and the analysis
 * view (traversal highlight). Elements carry data-node-id and
 * data-edge-id attributes so interaction and tests address them by
 * document identity rather than by pixel position.
 */

import { layeredLayout, NODE_HEIGHT, NODE_WIDTH } from "./layout.js";
import type { GraphDocument } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderOptions {
  highlightNodes?: Set<string>;
  highlightEdges?: Set<string>;
  selectedNode?: string | null;
  selectedEdge?: string | null;
  onNodeClick?: (nodeId: string) => void;
  onEdgeClick?: (edgeId: string) => void;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const element = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [name, value] of Object.entries(attrs)) {
    element.setAttribute(name, value);
  }
  return element;
}

function truncate(text: string, limit: number): string {
  return text.length <= limit ? text : text.slice(0, limit - 1) + "…";
}

export function renderGraphSvg(doc: GraphDocument, options: RenderOptions = {}): SVGSVGElement {
  const layout = layeredLayout(doc);
  const svg = svgEl("svg", {
    class: "graph-canvas",
    width: String(layout.width),
    height: String(layout.height),
    viewBox: `0 0 ${layout.width} ${layout.height}`,
  }) as SVGSVGElement;

  const marker = svgEl("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: "9",
    refY: "5",
    markerWidth: "7",
    markerHeight: "7",
    orient: "auto-start-reverse",
  });
  marker.append(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", class: "arrow-head" }));
  const defs = svgEl("defs", {});
  defs.append(marker);
  svg.append(defs);

  for (const edge of doc.edges) {
    const from = layout.positions.get(edge.from);
    const to = layout.positions.get(edge.to);
    if (!from || !to) {
      continue;
    }
    const x1 = from.x + NODE_WIDTH;
    const y1 = from.y + NODE_HEIGHT / 2;
    const x2 = to.x;
    const y2 = to.y + NODE_HEIGHT / 2;
    const classes = ["edge"];
    if (options.highlightEdges?.has(edge.id)) {
      classes.push("highlight");
    }
    if (options.selectedEdge === edge.id) {
      classes.push("selected");
    }
    const group = svgEl("g", { class: classes.join(" "), "data-edge-id": edge.id });
    const mx = (x1 + x2) / 2;
    group.append(
      svgEl("path", {
        d: `M ${x1} ${y1} C ${mx} ${y1}, ${mx} ${y2}, ${x2} ${y2}`,
        class: "edge-line",
        "marker-end": "url(#arrow)",
        fill: "none",
      }),
    );
    const label = svgEl("text", {
      x: String(mx),
      y: String((y1 + y2) / 2 - 6),
      class: "edge-label",
      "text-anchor": "middle",
    });
    label.textContent = edge.intent.label;
    group.append(label);
    if (options.onEdgeClick) {
      group.addEventListener("click", () => options.onEdgeClick?.(edge.id));
    }
    svg.append(group);
  }

  for (const node of doc.nodes) {
    const pos = layout.positions.get(node.id);
    if (!pos) {
      continue;
    }
    const classes = ["node"];
    if (node.terminal) {
      classes.push("terminal");
    }
    if (node.id === doc.start_node) {
      classes.push("start");
    }
    if (options.highlightNodes?.has(node.id)) {
      classes.push("highlight");
    }
    if (options.selectedNode === node.id) {
      classes.push("selected");
    }
    const group = svgEl("g", { class: classes.join(" "), "data-node-id": node.id });
    group.append(
      svgEl("rect", {
        x: String(pos.x),
        y: String(pos.y),
        width: String(NODE_WIDTH),
        height: String(NODE_HEIGHT),
        rx: "8",
        class: "node-box",
      }),
    );
    if (node.terminal) {
      group.append(
        svgEl("rect", {
          x: String(pos.x + 4),
          y: String(pos.y + 4),
          width: String(NODE_WIDTH - 8),
          height: String(NODE_HEIGHT - 8),
          rx: "6",
          class: "node-box-inner",
        }),
      );
    }
    const title = svgEl("text", {
      x: String(pos.x + 10),
      y: String(pos.y + 20),
      class: "node-id",
    });
    title.textContent = node.id;
    const caption = svgEl("text", {
      x: String(pos.x + 10),
      y: String(pos.y + 40),
      class: "node-caption",
    });
    caption.textContent = truncate(node.avatar_utterance, 24);
    group.append(title, caption);
    if (options.onNodeClick) {
      group.addEventListener("click", () => options.onNodeClick?.(node.id));
    }
    svg.append(group);
  }

  return svg;
}

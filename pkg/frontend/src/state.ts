/**
 * Client-side view state.
 *
 * Graph edits are held as a queue of small operations applied on top of
 * the last document fetched from the service (the base). Saving sends
 * the applied result with If-Match on the base version; after a
 * successful save the queue is empty and the response becomes the new
 * base, so the queue being non-empty is exactly "unsaved changes".
 */

import type { EdgePayload, GraphDocument, NodePayload } from "./types.js";

export type ActiveView = "builder" | "simulator" | "analysis";

export interface ViewState {
  activeView: ActiveView;
  selectedGraph: string | null;
  selectedSession: string | null;
}

export function initialViewState(): ViewState {
  return { activeView: "builder", selectedGraph: null, selectedSession: null };
}

export type GraphEdit =
  | { kind: "set-title"; title: string }
  | { kind: "set-start"; nodeId: string }
  | {
      kind: "set-node";
      nodeId: string;
      patch: Partial<Pick<NodePayload, "avatar_utterance" | "description" | "terminal">>;
    }
  | { kind: "add-node"; node: NodePayload }
  | { kind: "remove-node"; nodeId: string }
  | {
      kind: "set-edge";
      edgeId: string;
      patch: Partial<{ label: string; description: string; examples: string[] }>;
    }
  | { kind: "add-edge"; edge: EdgePayload }
  | { kind: "remove-edge"; edgeId: string };

/** Applies one edit to a document, returning a new document. */
export function applyEdit(doc: GraphDocument, edit: GraphEdit): GraphDocument {
  switch (edit.kind) {
    case "set-title":
      return { ...doc, title: edit.title };
    case "set-start":
      return { ...doc, start_node: edit.nodeId };
    case "set-node":
      return {
        ...doc,
        nodes: doc.nodes.map((node) => (node.id === edit.nodeId ? { ...node, ...edit.patch } : node)),
      };
    case "add-node": {
      const nodes = [...doc.nodes, edit.node].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
      const start = doc.start_node ?? edit.node.id;
      return { ...doc, nodes, start_node: start };
    }
    case "remove-node": {
      const nodes = doc.nodes.filter((node) => node.id !== edit.nodeId);
      // Edges touching the node go with it; the save would be rejected otherwise.
      const edges = doc.edges.filter((e) => e.from !== edit.nodeId && e.to !== edit.nodeId);
      let start = doc.start_node;
      if (start === edit.nodeId) {
        start = nodes.length > 0 ? nodes.map((n) => n.id).sort()[0] : null;
      }
      return { ...doc, nodes, edges, start_node: start };
    }
    case "set-edge":
      return {
        ...doc,
        edges: doc.edges.map((e) =>
          e.id === edit.edgeId ? { ...e, intent: { ...e.intent, ...edit.patch } } : e,
        ),
      };
    case "add-edge":
      return { ...doc, edges: [...doc.edges, edit.edge] };
    case "remove-edge":
      return { ...doc, edges: doc.edges.filter((e) => e.id !== edit.edgeId) };
  }
}

/**
 * A fetched graph plus its queue of unsaved edits.
 */
export class GraphDraft {
  private base: GraphDocument;
  private edits: GraphEdit[] = [];

  constructor(base: GraphDocument) {
    this.base = base;
  }

  /** Version the pending edits are based on, sent as If-Match. */
  get baseVersion(): number {
    return this.base.version;
  }

  get baseDocument(): GraphDocument {
    return this.base;
  }

  get pendingCount(): number {
    return this.edits.length;
  }

  get dirty(): boolean {
    return this.edits.length > 0;
  }

  push(edit: GraphEdit): void {
    this.edits.push(edit);
  }

  /** The base document with all pending edits applied. */
  working(): GraphDocument {
    return this.edits.reduce(applyEdit, this.base);
  }

  /** Adopts the saved document as the new base and clears the queue. */
  commit(saved: GraphDocument): void {
    this.base = saved;
    this.edits = [];
  }

  /** Drops all pending edits, keeping the base. */
  discard(): void {
    this.edits = [];
  }

  /**
   * Re-anchors the pending edits onto a freshly fetched document after a
   * version conflict, so they can be reviewed and saved again.
   */
  rebase(fresh: GraphDocument): void {
    this.base = fresh;
  }
}

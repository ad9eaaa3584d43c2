import { describe, expect, it } from "vitest";

import { applyEdit, GraphDraft } from "../src/state.js";
import type { EdgePayload, GraphDocument, NodePayload } from "../src/types.js";

function node(id: string, overrides: Partial<NodePayload> = {}): NodePayload {
  return {
    id,
    avatar_utterance: `utterance of ${id}`,
    description: "",
    terminal: false,
    provenance: "authored",
    ...overrides,
  };
}

function edge(id: string, from: string, to: string, label: string): EdgePayload {
  return {
    id,
    from,
    to,
    intent: { label, description: "", examples: [] },
    provenance: "authored",
  };
}

function doc(): GraphDocument {
  return {
    id: "g-1",
    title: "Fixture",
    mode: "flexible",
    start_node: "a",
    version: 3,
    metadata: {},
    nodes: [node("a"), node("b"), node("c", { terminal: true })],
    edges: [edge("e1", "a", "b", "calm"), edge("e2", "b", "c", "commit")],
  };
}

describe("applyEdit", () => {
  it("patches a node without touching its siblings", () => {
    const result = applyEdit(doc(), {
      kind: "set-node",
      nodeId: "b",
      patch: { avatar_utterance: "changed", terminal: true },
    });
    const b = result.nodes.find((n) => n.id === "b");
    expect(b?.avatar_utterance).toBe("changed");
    expect(b?.terminal).toBe(true);
    expect(result.nodes.find((n) => n.id === "a")?.avatar_utterance).toBe("utterance of a");
  });

  it("keeps nodes sorted when adding", () => {
    const result = applyEdit(doc(), { kind: "add-node", node: node("ab") });
    expect(result.nodes.map((n) => n.id)).toEqual(["a", "ab", "b", "c"]);
  });

  it("adding the first node makes it the start", () => {
    const empty: GraphDocument = { ...doc(), nodes: [], edges: [], start_node: null };
    const result = applyEdit(empty, { kind: "add-node", node: node("only") });
    expect(result.start_node).toBe("only");
  });

  it("removing a node cascades its edges and reassigns the start", () => {
    const result = applyEdit(doc(), { kind: "remove-node", nodeId: "a" });
    expect(result.nodes.map((n) => n.id)).toEqual(["b", "c"]);
    expect(result.edges.map((e) => e.id)).toEqual(["e2"]);
    expect(result.start_node).toBe("b");
  });

  it("removing the last node clears the start", () => {
    const single: GraphDocument = {
      ...doc(),
      nodes: [node("a")],
      edges: [],
      start_node: "a",
    };
    const result = applyEdit(single, { kind: "remove-node", nodeId: "a" });
    expect(result.nodes).toEqual([]);
    expect(result.start_node).toBeNull();
  });

  it("patches edge intents in place", () => {
    const result = applyEdit(doc(), {
      kind: "set-edge",
      edgeId: "e1",
      patch: { label: "patient", examples: ["so sorry"] },
    });
    const e1 = result.edges.find((e) => e.id === "e1");
    expect(e1?.intent.label).toBe("patient");
    expect(e1?.intent.examples).toEqual(["so sorry"]);
    expect(e1?.intent.description).toBe("");
  });

  it("appends added edges at the end", () => {
    const result = applyEdit(doc(), { kind: "add-edge", edge: edge("e9", "a", "c", "skip") });
    expect(result.edges.map((e) => e.id)).toEqual(["e1", "e2", "e9"]);
  });

  it("set-title and set-start are plain field updates", () => {
    const titled = applyEdit(doc(), { kind: "set-title", title: "Renamed" });
    expect(titled.title).toBe("Renamed");
    const restarted = applyEdit(doc(), { kind: "set-start", nodeId: "b" });
    expect(restarted.start_node).toBe("b");
  });

  it("never mutates the input document", () => {
    const original = doc();
    const snapshot = JSON.stringify(original);
    applyEdit(original, { kind: "remove-node", nodeId: "a" });
    applyEdit(original, { kind: "set-node", nodeId: "b", patch: { terminal: true } });
    expect(JSON.stringify(original)).toBe(snapshot);
  });
});

describe("GraphDraft", () => {
  it("applies queued edits in order", () => {
    const draft = new GraphDraft(doc());
    draft.push({ kind: "set-node", nodeId: "a", patch: { avatar_utterance: "first" } });
    draft.push({ kind: "set-node", nodeId: "a", patch: { avatar_utterance: "second" } });
    expect(draft.pendingCount).toBe(2);
    expect(draft.working().nodes.find((n) => n.id === "a")?.avatar_utterance).toBe("second");
  });

  it("exposes the base version for If-Match", () => {
    const draft = new GraphDraft(doc());
    draft.push({ kind: "set-title", title: "x" });
    expect(draft.baseVersion).toBe(3);
    expect(draft.working().version).toBe(3);
  });

  it("commit adopts the saved document and empties the queue", () => {
    const draft = new GraphDraft(doc());
    draft.push({ kind: "set-title", title: "x" });
    const saved = { ...draft.working(), version: 4 };
    draft.commit(saved);
    expect(draft.dirty).toBe(false);
    expect(draft.pendingCount).toBe(0);
    expect(draft.baseVersion).toBe(4);
    expect(draft.working().title).toBe("x");
  });

  it("rebase keeps pending edits on a fresh base", () => {
    const draft = new GraphDraft(doc());
    draft.push({ kind: "set-node", nodeId: "b", patch: { description: "mine" } });
    const fresh = { ...doc(), version: 7, title: "Theirs" };
    draft.rebase(fresh);
    expect(draft.baseVersion).toBe(7);
    expect(draft.pendingCount).toBe(1);
    const working = draft.working();
    expect(working.title).toBe("Theirs");
    expect(working.nodes.find((n) => n.id === "b")?.description).toBe("mine");
  });

  it("discard drops the queue but keeps the base", () => {
    const draft = new GraphDraft(doc());
    draft.push({ kind: "remove-node", nodeId: "a" });
    draft.discard();
    expect(draft.dirty).toBe(false);
    expect(draft.working().nodes).toHaveLength(3);
  });
});

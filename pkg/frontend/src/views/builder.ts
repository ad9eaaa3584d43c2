/**
 * Instructor builder: graph selection, template instantiation, LLM
 * co-creation, node and edge editing, and optimistic-concurrency saves.
 *
 * Edits queue locally on a GraphDraft and only reach the service through
 * PUT with If-Match. A 409 answer opens an explicit conflict dialog; the
 * UI never retries with a fabricated version.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, option, toast } from "../dom.js";
import { renderGraphSvg } from "../render.js";
import { GraphDraft, ViewState } from "../state.js";
import type { EdgePayload, GraphDocument, NodePayload } from "../types.js";

export type ConfirmFn = (message: string) => boolean;

export interface BuilderOptions {
  /** Override the cascade-delete confirmation, mainly for tests. */
  confirm?: ConfirmFn;
}

export class BuilderView {
  readonly root: HTMLElement;
  draft: GraphDraft | null = null;
  selectedNode: string | null = null;
  selectedEdge: string | null = null;

  private readonly api: ApiClient;
  private readonly state: ViewState;
  private readonly confirm: ConfirmFn;
  private queue: Promise<void> = Promise.resolve();
  private localIdCounter = 0;

  private readonly graphSelect: HTMLSelectElement;
  private readonly templateSelect: HTMLSelectElement;
  private readonly titleInput: HTMLInputElement;
  private readonly modeSelect: HTMLSelectElement;
  private readonly promptInput: HTMLTextAreaElement;
  private readonly canvasHost: HTMLElement;
  private readonly inspector: HTMLElement;
  private readonly saveButton: HTMLButtonElement;
  private readonly pendingBadge: HTMLElement;
  private readonly versionLabel: HTMLElement;
  private readonly diagnosticsHost: HTMLElement;
  private readonly conflictDialog: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient, state: ViewState, options: BuilderOptions = {}) {
    this.root = root;
    this.api = api;
    this.state = state;
    this.confirm = options.confirm ?? ((message) => window.confirm(message));

    this.graphSelect = el("select", { class: "graph-select" });
    this.templateSelect = el("select", { class: "template-select" });
    this.titleInput = el("input", { class: "new-title", placeholder: "New scenario title" });
    this.modeSelect = el("select", { class: "new-mode" });
    this.modeSelect.append(option("flexible"), option("strict"));
    this.promptInput = el("textarea", {
      class: "generate-prompt",
      placeholder: "Describe a scenario to draft with the assistant",
    });
    this.canvasHost = el("div", { class: "canvas-host" });
    this.inspector = el("div", { class: "inspector" });
    this.saveButton = el("button", { class: "save" }, ["Save"]);
    this.pendingBadge = el("span", { class: "pending-badge" });
    this.versionLabel = el("span", { class: "version-label" });
    this.diagnosticsHost = el("div", { class: "diagnostics" });
    this.conflictDialog = el("div", { class: "conflict-dialog", hidden: "" });

    this.build();
  }

  /** Resolves once all queued actions have settled; used by callers and tests. */
  idle(): Promise<void> {
    return this.queue;
  }

  private run(task: () => Promise<void>): void {
    this.queue = this.queue.then(task).catch((error) => {
      toast(this.root, error instanceof ApiError ? `${error.code}: ${error.message}` : String(error));
    });
  }

  private build(): void {
    const refreshButton = el("button", { class: "refresh-graphs" }, ["Refresh"]);
    refreshButton.addEventListener("click", () => this.run(() => this.refreshGraphList()));
    this.graphSelect.addEventListener("change", () =>
      this.run(() => this.openGraph(this.graphSelect.value)),
    );

    const instantiateButton = el("button", { class: "instantiate" }, ["Start from template"]);
    instantiateButton.addEventListener("click", () =>
      this.run(async () => {
        const doc = await this.api.instantiateTemplate(this.templateSelect.value);
        await this.refreshGraphList();
        await this.openGraph(doc.id);
      }),
    );

    const createButton = el("button", { class: "create-graph" }, ["Create empty"]);
    createButton.addEventListener("click", () =>
      this.run(async () => {
        const doc = await this.api.createGraph(this.titleInput.value, this.modeSelect.value);
        this.titleInput.value = "";
        await this.refreshGraphList();
        await this.openGraph(doc.id);
      }),
    );

    const generateButton = el("button", { class: "generate" }, ["Draft with assistant"]);
    generateButton.addEventListener("click", () =>
      this.run(async () => {
        const doc = await this.api.generateGraph(this.promptInput.value);
        this.promptInput.value = "";
        await this.refreshGraphList();
        await this.openGraph(doc.id);
      }),
    );

    const validateButton = el("button", { class: "validate" }, ["Validate"]);
    validateButton.addEventListener("click", () =>
      this.run(async () => {
        if (!this.draft) {
          return;
        }
        const diagnostics = await this.api.validateGraph(this.draft.baseDocument.id);
        clear(this.diagnosticsHost);
        if (diagnostics.length === 0) {
          this.diagnosticsHost.append(el("div", { class: "diagnostic clean" }, ["No findings"]));
          return;
        }
        for (const d of diagnostics) {
          this.diagnosticsHost.append(
            el("div", { class: `diagnostic ${d.severity}` }, [`${d.code} ${d.subject}: ${d.message}`]),
          );
        }
      }),
    );

    this.saveButton.addEventListener("click", () => this.run(() => this.save()));

    const toolbar = el("div", { class: "toolbar" }, [
      this.graphSelect,
      refreshButton,
      this.templateSelect,
      instantiateButton,
      this.titleInput,
      this.modeSelect,
      createButton,
      this.promptInput,
      generateButton,
    ]);
    const saveBar = el("div", { class: "save-bar" }, [
      this.saveButton,
      this.pendingBadge,
      this.versionLabel,
      validateButton,
    ]);
    this.root.append(toolbar, saveBar, this.conflictDialog, this.canvasHost, this.inspector, this.diagnosticsHost);

    this.run(async () => {
      const templates = await this.api.listTemplates();
      clear(this.templateSelect);
      for (const id of templates) {
        this.templateSelect.append(option(id));
      }
      await this.refreshGraphList();
    });
  }

  private async refreshGraphList(): Promise<void> {
    const summaries = await this.api.listGraphs();
    const current = this.state.selectedGraph;
    clear(this.graphSelect);
    this.graphSelect.append(option("", "Select a scenario"));
    for (const summary of summaries) {
      this.graphSelect.append(option(summary.id, `${summary.title} (v${summary.version})`));
    }
    if (current !== null && summaries.some((s) => s.id === current)) {
      this.graphSelect.value = current;
    }
  }

  async openGraph(graphId: string): Promise<void> {
    if (graphId === "") {
      return;
    }
    const doc = await this.api.getGraph(graphId);
    this.draft = new GraphDraft(doc);
    this.state.selectedGraph = graphId;
    this.graphSelect.value = graphId;
    this.selectedNode = null;
    this.selectedEdge = null;
    this.hideConflict();
    this.renderGraph();
  }

  private renderGraph(): void {
    clear(this.canvasHost);
    clear(this.inspector);
    if (!this.draft) {
      return;
    }
    const working = this.draft.working();
    const svg = renderGraphSvg(working, {
      selectedNode: this.selectedNode,
      selectedEdge: this.selectedEdge,
      onNodeClick: (id) => {
        this.selectedNode = id;
        this.selectedEdge = null;
        this.renderGraph();
      },
      onEdgeClick: (id) => {
        this.selectedEdge = id;
        this.selectedNode = null;
        this.renderGraph();
      },
    });
    this.canvasHost.append(svg);
    this.renderSaveBar(working);
    if (this.selectedNode !== null) {
      this.renderNodeInspector(working, this.selectedNode);
    } else if (this.selectedEdge !== null) {
      this.renderEdgeInspector(working, this.selectedEdge);
    }
    this.renderAddControls(working);
  }

  private renderSaveBar(working: GraphDocument): void {
    const pending = this.draft?.pendingCount ?? 0;
    this.pendingBadge.textContent = pending > 0 ? `${pending} unsaved` : "saved";
    this.saveButton.disabled = pending === 0;
    this.versionLabel.textContent = `v${working.version}`;
  }

  private renderNodeInspector(working: GraphDocument, nodeId: string): void {
    const node = working.nodes.find((n) => n.id === nodeId);
    if (!node) {
      return;
    }
    const utterance = el("textarea", { class: "node-utterance" });
    utterance.value = node.avatar_utterance;
    const description = el("input", { class: "node-description" });
    description.value = node.description;
    const terminal = el("input", { class: "node-terminal", type: "checkbox" });
    terminal.checked = node.terminal;

    const apply = el("button", { class: "apply-node" }, ["Apply"]);
    apply.addEventListener("click", () => {
      this.draft?.push({
        kind: "set-node",
        nodeId,
        patch: {
          avatar_utterance: utterance.value,
          description: description.value,
          terminal: terminal.checked,
        },
      });
      this.renderGraph();
    });

    const makeStart = el("button", { class: "make-start" }, ["Make start"]);
    makeStart.addEventListener("click", () => {
      this.draft?.push({ kind: "set-start", nodeId });
      this.renderGraph();
    });

    const remove = el("button", { class: "delete-node" }, ["Delete scene"]);
    remove.addEventListener("click", () => {
      const touched = working.edges.filter((e) => e.from === nodeId || e.to === nodeId).length;
      const message =
        touched > 0
          ? `Deleting ${nodeId} also removes ${touched} transition(s). Continue?`
          : `Delete ${nodeId}?`;
      if (!this.confirm(message)) {
        return;
      }
      this.draft?.push({ kind: "remove-node", nodeId });
      this.selectedNode = null;
      this.renderGraph();
    });

    const expandInstruction = el("input", {
      class: "expand-instruction",
      placeholder: "e.g. an escalation and a de-escalation",
    });
    const expand = el("button", { class: "expand-node" }, ["Grow branches here"]);
    expand.disabled = this.draft?.dirty ?? true;
    expand.title = expand.disabled ? "Save or discard edits first" : "";
    expand.addEventListener("click", () =>
      this.run(async () => {
        if (!this.draft || this.draft.dirty) {
          return;
        }
        const doc = await this.api.expandNode(this.draft.baseDocument.id, nodeId, expandInstruction.value);
        this.draft.commit(doc);
        this.renderGraph();
      }),
    );

    this.inspector.append(
      el("h3", {}, [`Scene ${nodeId}`]),
      el("label", {}, ["Avatar line", utterance]),
      el("label", {}, ["Notes", description]),
      el("label", { class: "terminal-label" }, [terminal, "Terminal scene"]),
      apply,
      makeStart,
      remove,
      el("div", { class: "expand-row" }, [expandInstruction, expand]),
    );
  }

  private renderEdgeInspector(working: GraphDocument, edgeId: string): void {
    const edge = working.edges.find((e) => e.id === edgeId);
    if (!edge) {
      return;
    }
    const label = el("input", { class: "edge-intent-label" });
    label.value = edge.intent.label;
    const description = el("input", { class: "edge-intent-description" });
    description.value = edge.intent.description;
    const examples = el("textarea", {
      class: "edge-intent-examples",
      placeholder: "One example reply per line",
    });
    examples.value = edge.intent.examples.join("\n");

    const apply = el("button", { class: "apply-edge" }, ["Apply"]);
    apply.addEventListener("click", () => {
      this.draft?.push({
        kind: "set-edge",
        edgeId,
        patch: {
          label: label.value,
          description: description.value,
          examples: examples.value.split("\n").filter((line) => line.trim() !== ""),
        },
      });
      this.renderGraph();
    });

    const remove = el("button", { class: "delete-edge" }, ["Delete transition"]);
    remove.addEventListener("click", () => {
      if (!this.confirm(`Delete transition ${edgeId}?`)) {
        return;
      }
      this.draft?.push({ kind: "remove-edge", edgeId });
      this.selectedEdge = null;
      this.renderGraph();
    });

    this.inspector.append(
      el("h3", {}, [`Transition ${edgeId} (${edge.from} to ${edge.to})`]),
      el("label", {}, ["Intent label", label]),
      el("label", {}, ["Description", description]),
      el("label", {}, ["Examples", examples]),
      apply,
      remove,
    );
  }

  private renderAddControls(working: GraphDocument): void {
    const addNode = el("button", { class: "add-node" }, ["Add scene"]);
    addNode.addEventListener("click", () => {
      const node: NodePayload = {
        id: this.freshLocalId("n", working.nodes.map((n) => n.id)),
        avatar_utterance: "New scene",
        description: "",
        terminal: false,
        provenance: "authored",
      };
      this.draft?.push({ kind: "add-node", node });
      this.selectedNode = node.id;
      this.selectedEdge = null;
      this.renderGraph();
    });

    const targetSelect = el("select", { class: "add-edge-target" });
    for (const node of working.nodes) {
      targetSelect.append(option(node.id));
    }
    const labelInput = el("input", { class: "add-edge-label", placeholder: "intent label" });
    const addEdge = el("button", { class: "add-edge" }, ["Add transition from selected scene"]);
    addEdge.disabled = this.selectedNode === null;
    addEdge.addEventListener("click", () => {
      if (this.selectedNode === null || labelInput.value.trim() === "") {
        return;
      }
      const edge: EdgePayload = {
        id: this.freshLocalId("e", working.edges.map((e) => e.id)),
        from: this.selectedNode,
        to: targetSelect.value,
        intent: { label: labelInput.value.trim(), description: "", examples: [] },
        provenance: "authored",
      };
      this.draft?.push({ kind: "add-edge", edge });
      this.selectedEdge = edge.id;
      this.selectedNode = null;
      this.renderGraph();
    });

    this.inspector.append(
      el("div", { class: "add-controls" }, [addNode, targetSelect, labelInput, addEdge]),
    );
  }

  private freshLocalId(prefix: string, taken: string[]): string {
    const used = new Set(taken);
    let candidate: string;
    do {
      this.localIdCounter += 1;
      candidate = `${prefix}-${this.localIdCounter}`;
    } while (used.has(candidate));
    return candidate;
  }

  private async save(): Promise<void> {
    if (!this.draft || !this.draft.dirty) {
      return;
    }
    const working = this.draft.working();
    try {
      const saved = await this.api.putGraph(working, this.draft.baseVersion);
      this.draft.commit(saved);
      this.hideConflict();
      this.renderGraph();
    } catch (error) {
      if (error instanceof ApiError && error.code === "version_conflict") {
        this.showConflict(error);
        return;
      }
      throw error;
    }
  }

  private showConflict(error: ApiError): void {
    clear(this.conflictDialog);
    this.conflictDialog.removeAttribute("hidden");
    const detail = (error.detail ?? {}) as { expected?: number; actual?: number };
    const message = el("p", {}, [
      `Someone else saved this scenario first (your base v${detail.expected ?? "?"}, server v${detail.actual ?? "?"}). ` +
        "Reload the server copy and reapply your edits, or discard them.",
    ]);
    const reload = el("button", { class: "conflict-reload" }, ["Reload and reapply my edits"]);
    reload.addEventListener("click", () =>
      this.run(async () => {
        if (!this.draft) {
          return;
        }
        const fresh = await this.api.getGraph(this.draft.baseDocument.id);
        this.draft.rebase(fresh);
        this.hideConflict();
        this.renderGraph();
      }),
    );
    const discard = el("button", { class: "conflict-discard" }, ["Discard my edits"]);
    discard.addEventListener("click", () =>
      this.run(async () => {
        if (!this.draft) {
          return;
        }
        const fresh = await this.api.getGraph(this.draft.baseDocument.id);
        this.draft.rebase(fresh);
        this.draft.discard();
        this.hideConflict();
        this.renderGraph();
      }),
    );
    this.conflictDialog.append(message, reload, discard);
  }

  private hideConflict(): void {
    clear(this.conflictDialog);
    this.conflictDialog.setAttribute("hidden", "");
  }
}

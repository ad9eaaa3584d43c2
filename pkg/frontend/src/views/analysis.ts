/**
 * Analysis view: the delayed-feedback surface.
 *
 * Fetches the session report and the service's traversal overlay, then
 * renders the graph with the visited path highlighted next to the
 * per-turn feedback list. Rejected turns appear in the list but are not
 * part of the path, exactly as the service reports them.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, toast } from "../dom.js";
import { parseOverlay } from "../highlight.js";
import { renderGraphSvg } from "../render.js";
import { ViewState } from "../state.js";
import type { GraphDocument } from "../types.js";

export class AnalysisView {
  readonly root: HTMLElement;
  loadedSession: string | null = null;

  private readonly api: ApiClient;
  private readonly state: ViewState;
  private queue: Promise<void> = Promise.resolve();

  private readonly sessionInput: HTMLInputElement;
  private readonly canvasHost: HTMLElement;
  private readonly pathSummary: HTMLElement;
  private readonly reportPane: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient, state: ViewState) {
    this.root = root;
    this.api = api;
    this.state = state;

    this.sessionInput = el("input", { class: "session-input", placeholder: "Session id" });
    this.canvasHost = el("div", { class: "analysis-canvas" });
    this.pathSummary = el("div", { class: "path-summary" });
    this.reportPane = el("div", { class: "report-pane" });

    const load = el("button", { class: "load-session" }, ["Load"]);
    load.addEventListener("click", () => this.run(() => this.loadSession(this.sessionInput.value.trim())));

    this.root.append(
      el("div", { class: "toolbar" }, [this.sessionInput, load]),
      this.pathSummary,
      this.canvasHost,
      this.reportPane,
    );
  }

  idle(): Promise<void> {
    return this.queue;
  }

  private run(task: () => Promise<void>): void {
    this.queue = this.queue.then(task).catch((error) => {
      toast(this.root, error instanceof ApiError ? `${error.code}: ${error.message}` : String(error));
    });
  }

  /** Called when the view becomes active; follows the simulator's selection. */
  activate(): void {
    const selected = this.state.selectedSession;
    if (selected !== null && selected !== this.loadedSession) {
      this.sessionInput.value = selected;
      this.run(() => this.loadSession(selected));
    }
  }

  private async loadSession(sessionId: string): Promise<void> {
    if (sessionId === "") {
      return;
    }
    const session = await this.api.getSession(sessionId);
    const [graph, report, overlayDot] = await Promise.all([
      this.api.getGraph(session.graph_id),
      this.api.getReport(sessionId),
      this.api.getDot(session.graph_id, sessionId),
    ]);
    const overlay = parseOverlay(overlayDot);
    const highlightEdges = this.overlayEdgeIds(graph, overlay.edges);

    clear(this.canvasHost);
    this.canvasHost.append(
      renderGraphSvg(graph, { highlightNodes: overlay.nodeIds, highlightEdges }),
    );

    this.pathSummary.textContent =
      `Visited ${overlay.nodeIds.size} scene(s) over ${highlightEdges.size} transition(s).`;

    clear(this.reportPane);
    this.reportPane.append(
      el("div", { class: "report-counters" }, [
        `Turns ${report.turns_total} | matched ${report.matched_count} | ` +
          `generated ${report.generated_count} | rejected ${report.rejected_count} | ` +
          `mean confidence ${report.mean_confidence_of_matched.toFixed(3)} | ` +
          (report.completed ? "completed" : "not completed"),
      ]),
    );
    for (const turn of report.per_turn) {
      this.reportPane.append(
        el("div", { class: `report-turn ${turn.kind}` }, [
          el("span", { class: "turn-kind" }, [turn.kind]),
          el("span", { class: "turn-feedback" }, [turn.feedback]),
        ]),
      );
    }
    this.loadedSession = sessionId;
  }

  /** Maps overlay from/to/label triples back to edge ids in the document. */
  private overlayEdgeIds(
    graph: GraphDocument,
    triples: { from: string; to: string; label: string }[],
  ): Set<string> {
    const ids = new Set<string>();
    for (const triple of triples) {
      const edge = graph.edges.find(
        (e) => e.from === triple.from && e.to === triple.to && e.intent.label === triple.label,
      );
      if (edge) {
        ids.add(edge.id);
      }
    }
    return ids;
  }
}

/**
 * Student simulator: chat with the scenario avatar plus an immediate
 * feedback panel.
 *
 * Every rendered string (avatar reply, coach feedback, rejection hint)
 * is taken verbatim from the turn payload. The input stays disabled
 * while a turn is in flight, mirroring the service's per-session lock.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el, option, toast } from "../dom.js";
import { ViewState } from "../state.js";
import type { TurnPayload } from "../types.js";

export class SimulatorView {
  readonly root: HTMLElement;
  sessionId: string | null = null;

  private readonly api: ApiClient;
  private readonly state: ViewState;
  private readonly onOpenAnalysis: (sessionId: string) => void;
  private queue: Promise<void> = Promise.resolve();
  private inFlight = false;
  private completed = false;

  private readonly graphSelect: HTMLSelectElement;
  private readonly thresholdInput: HTMLInputElement;
  private readonly chatLog: HTMLElement;
  private readonly turnInput: HTMLInputElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly endButton: HTMLButtonElement;
  private readonly analysisButton: HTMLButtonElement;
  private readonly banner: HTMLElement;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    state: ViewState,
    onOpenAnalysis: (sessionId: string) => void = () => undefined,
  ) {
    this.root = root;
    this.api = api;
    this.state = state;
    this.onOpenAnalysis = onOpenAnalysis;

    this.graphSelect = el("select", { class: "sim-graph-select" });
    this.thresholdInput = el("input", { class: "sim-threshold", value: "0.5" });
    this.chatLog = el("div", { class: "chat-log" });
    this.turnInput = el("input", { class: "turn-input", placeholder: "Type your reply" });
    this.sendButton = el("button", { class: "send" }, ["Send"]);
    this.endButton = el("button", { class: "end-session" }, ["End session"]);
    this.analysisButton = el("button", { class: "open-analysis" }, ["Review in analysis"]);
    this.banner = el("div", { class: "session-banner", hidden: "" });

    this.build();
  }

  idle(): Promise<void> {
    return this.queue;
  }

  private run(task: () => Promise<void>): void {
    this.queue = this.queue.then(task).catch((error) => {
      toast(this.root, error instanceof ApiError ? `${error.code}: ${error.message}` : String(error));
    });
  }

  private build(): void {
    const refresh = el("button", { class: "sim-refresh" }, ["Refresh"]);
    refresh.addEventListener("click", () => this.run(() => this.refreshGraphList()));

    const start = el("button", { class: "start-session" }, ["Start practicing"]);
    start.addEventListener("click", () => this.run(() => this.startSession()));

    this.turnInput.addEventListener("input", () => this.updateControls());
    this.sendButton.addEventListener("click", () => this.run(() => this.sendTurn()));
    this.turnInput.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter" && !this.sendButton.disabled) {
        this.run(() => this.sendTurn());
      }
    });
    this.endButton.addEventListener("click", () => this.run(() => this.endSession()));
    this.analysisButton.addEventListener("click", () => {
      if (this.sessionId !== null) {
        this.onOpenAnalysis(this.sessionId);
      }
    });

    this.root.append(
      el("div", { class: "toolbar" }, [
        this.graphSelect,
        refresh,
        el("label", {}, ["Threshold", this.thresholdInput]),
        start,
      ]),
      this.banner,
      this.chatLog,
      el("div", { class: "composer" }, [this.turnInput, this.sendButton, this.endButton, this.analysisButton]),
    );
    this.updateControls();
    this.run(() => this.refreshGraphList());
  }

  private async refreshGraphList(): Promise<void> {
    const summaries = await this.api.listGraphs();
    const current = this.graphSelect.value || this.state.selectedGraph || "";
    clear(this.graphSelect);
    for (const summary of summaries) {
      this.graphSelect.append(option(summary.id, `${summary.title} (${summary.mode})`));
    }
    if (current !== "" && summaries.some((s) => s.id === current)) {
      this.graphSelect.value = current;
    }
  }

  private async startSession(): Promise<void> {
    const graphId = this.graphSelect.value;
    if (graphId === "") {
      return;
    }
    const threshold = this.thresholdInput.value.trim();
    const created = await this.api.createSession(
      graphId,
      threshold === "" ? undefined : Number(threshold),
    );
    this.sessionId = created.session.id;
    this.state.selectedSession = created.session.id;
    this.completed = false;
    clear(this.chatLog);
    this.banner.setAttribute("hidden", "");
    this.banner.textContent = "";
    this.appendAvatarBubble(created.opening_utterance);
    this.updateControls();
  }

  private async sendTurn(): Promise<void> {
    const utterance = this.turnInput.value;
    if (this.sessionId === null || utterance.trim() === "" || this.inFlight || this.completed) {
      return;
    }
    this.inFlight = true;
    this.updateControls();
    try {
      const result = await this.api.sendTurn(this.sessionId, utterance);
      this.turnInput.value = "";
      this.appendTurn(result.turn);
      if (result.session_status === "completed") {
        this.markCompleted("Scenario complete. Review your conversation in the analysis view.");
      }
    } finally {
      this.inFlight = false;
      this.updateControls();
    }
  }

  private async endSession(): Promise<void> {
    if (this.sessionId === null || this.completed) {
      return;
    }
    await this.api.endSession(this.sessionId);
    this.markCompleted("Session ended. Review your conversation in the analysis view.");
  }

  private appendTurn(turn: TurnPayload): void {
    const row = el("div", { class: "turn-row", "data-turn-index": String(turn.index) });
    row.append(el("div", { class: "bubble student" }, [turn.student_utterance]));

    if (turn.decision.kind === "generated_branch") {
      row.append(
        el("span", { class: "branch-badge" }, [`New branch created (${turn.decision.new_edge_id})`]),
      );
    }
    if (turn.decision.kind === "rejected") {
      row.append(el("div", { class: "hint-card" }, [`Not quite. Try one of: ${turn.decision.hint}`]));
    } else {
      row.append(el("div", { class: "bubble avatar" }, [turn.avatar_reply]));
    }
    row.append(el("div", { class: "coach-card" }, [turn.feedback]));
    this.chatLog.append(row);
  }

  private appendAvatarBubble(text: string): void {
    this.chatLog.append(
      el("div", { class: "turn-row opening" }, [el("div", { class: "bubble avatar" }, [text])]),
    );
  }

  private markCompleted(message: string): void {
    this.completed = true;
    this.banner.textContent = message;
    this.banner.removeAttribute("hidden");
    this.updateControls();
  }

  private updateControls(): void {
    const noSession = this.sessionId === null;
    this.sendButton.disabled =
      noSession || this.completed || this.inFlight || this.turnInput.value.trim() === "";
    this.turnInput.disabled = noSession || this.completed || this.inFlight;
    this.endButton.disabled = noSession || this.completed;
    this.analysisButton.disabled = noSession;
  }
}

/**
 * Application shell: three-view navigation over one shared ApiClient
 * and ViewState.
 */

import { ApiClient, ApiClientOptions } from "./api.js";
import { el } from "./dom.js";
import { initialViewState, type ActiveView, type ViewState } from "./state.js";
import { AnalysisView } from "./views/analysis.js";
import { BuilderView, type ConfirmFn } from "./views/builder.js";
import { SimulatorView } from "./views/simulator.js";

export interface MountOptions {
  baseUrl?: string;
  confirm?: ConfirmFn;
  fetchFn?: ApiClientOptions["fetchFn"];
}

export interface App {
  state: ViewState;
  api: ApiClient;
  builder: BuilderView;
  simulator: SimulatorView;
  analysis: AnalysisView;
  showView(view: ActiveView): void;
  /** Resolves when all three views have settled their queued work. */
  idle(): Promise<void>;
}

export function mount(root: HTMLElement, options: MountOptions = {}): App {
  const api = new ApiClient(options.baseUrl ?? "", { fetchFn: options.fetchFn });
  const state = initialViewState();

  const builderRoot = el("section", { class: "view view-builder" });
  const simulatorRoot = el("section", { class: "view view-simulator", hidden: "" });
  const analysisRoot = el("section", { class: "view view-analysis", hidden: "" });

  const roots: Record<ActiveView, HTMLElement> = {
    builder: builderRoot,
    simulator: simulatorRoot,
    analysis: analysisRoot,
  };

  const analysis = new AnalysisView(analysisRoot, api, state);
  const simulator = new SimulatorView(simulatorRoot, api, state, (sessionId) => {
    state.selectedSession = sessionId;
    showView("analysis");
  });
  const builder = new BuilderView(builderRoot, api, state, { confirm: options.confirm });

  function showView(view: ActiveView): void {
    state.activeView = view;
    for (const [name, element] of Object.entries(roots)) {
      if (name === view) {
        element.removeAttribute("hidden");
      } else {
        element.setAttribute("hidden", "");
      }
    }
    for (const button of nav.querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.view === view);
    }
    if (view === "analysis") {
      analysis.activate();
    }
  }

  const nav = el("nav", { class: "nav" });
  for (const view of ["builder", "simulator", "analysis"] as ActiveView[]) {
    const button = el("button", { class: `nav-${view}`, "data-view": view }, [view]);
    button.addEventListener("click", () => showView(view));
    nav.append(button);
  }

  root.append(
    el("header", { class: "app-header" }, [el("h1", {}, ["gloss studio"]), nav]),
    builderRoot,
    simulatorRoot,
    analysisRoot,
  );
  showView("builder");

  return {
    state,
    api,
    builder,
    simulator,
    analysis,
    showView,
    idle: async () => {
      await builder.idle();
      await simulator.idle();
      await analysis.idle();
    },
  };
}

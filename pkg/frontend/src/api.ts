/**
 * Typed client for the training service HTTP API.
 *
 * Every method maps to exactly one documented route. Failures raise
 * ApiError carrying the service error envelope so views can branch on
 * the stable `code` field instead of matching message text.
 */

import type {
  CohortSummary,
  Diagnostic,
  GraphDocument,
  GraphSummary,
  SessionCreateResponse,
  SessionDocument,
  SessionReport,
  TurnResponse,
} from "./types.js";

/** Service error envelope surfaced as an exception. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, code: string, message: string, detail?: unknown) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

export type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export interface ApiClientOptions {
  /** Override the global fetch, mainly for tests. */
  fetchFn?: FetchFn;
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchFn;

  constructor(baseUrl = "", options: ApiClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = options.fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
    headers: Record<string, string> = {},
  ): Promise<Response> {
    const init: RequestInit = { method, headers: { ...headers } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      (init.headers as Record<string, string>)["content-type"] = "application/json";
    }
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (error) {
      throw new ApiError(0, "network_error", `service unreachable: ${String(error)}`);
    }
    if (!response.ok) {
      throw await this.toApiError(response);
    }
    return response;
  }

  private async toApiError(response: Response): Promise<ApiError> {
    try {
      const body = (await response.json()) as {
        status?: number;
        code?: string;
        message?: string;
        detail?: unknown;
      };
      return new ApiError(
        body.status ?? response.status,
        body.code ?? "unknown_error",
        body.message ?? response.statusText,
        body.detail,
      );
    } catch {
      return new ApiError(response.status, "unknown_error", response.statusText);
    }
  }

  private async json<T>(method: string, path: string, body?: unknown, headers?: Record<string, string>): Promise<T> {
    const response = await this.request(method, path, body, headers);
    return (await response.json()) as T;
  }

  async listGraphs(): Promise<GraphSummary[]> {
    const payload = await this.json<{ graphs: GraphSummary[] }>("GET", "/graphs");
    return payload.graphs;
  }

  async getGraph(id: string): Promise<GraphDocument> {
    return this.json<GraphDocument>("GET", `/graphs/${encodeURIComponent(id)}`);
  }

  async createGraph(title: string, mode: string): Promise<GraphDocument> {
    return this.json<GraphDocument>("POST", "/graphs", { title, mode });
  }

  async importGraph(graph: GraphDocument): Promise<GraphDocument> {
    return this.json<GraphDocument>("POST", "/graphs", { graph });
  }

  /**
   * Full-document save guarded by optimistic concurrency.
   *
   * The If-Match header carries the version the edits were based on; a
   * concurrent writer surfaces as ApiError code "version_conflict".
   */
  async putGraph(graph: GraphDocument, baseVersion: number): Promise<GraphDocument> {
    return this.json<GraphDocument>("PUT", `/graphs/${encodeURIComponent(graph.id)}`, graph, {
      "If-Match": String(baseVersion),
    });
  }

  async deleteGraph(id: string): Promise<void> {
    await this.request("DELETE", `/graphs/${encodeURIComponent(id)}`);
  }

  async generateGraph(prompt: string): Promise<GraphDocument> {
    return this.json<GraphDocument>("POST", "/graphs/generate", { prompt });
  }

  async expandNode(graphId: string, nodeId: string, instruction: string): Promise<GraphDocument> {
    return this.json<GraphDocument>("POST", `/graphs/${encodeURIComponent(graphId)}/expand`, {
      node_id: nodeId,
      instruction,
    });
  }

  async validateGraph(id: string): Promise<Diagnostic[]> {
    const payload = await this.json<{ diagnostics: Diagnostic[] }>(
      "GET",
      `/graphs/${encodeURIComponent(id)}/validate`,
    );
    return payload.diagnostics;
  }

  /** Graphviz source; pass a session id for the traversal overlay. */
  async getDot(graphId: string, sessionId?: string): Promise<string> {
    const query = sessionId ? `?session=${encodeURIComponent(sessionId)}` : "";
    const response = await this.request("GET", `/graphs/${encodeURIComponent(graphId)}/dot${query}`);
    return response.text();
  }

  async cohortSummary(graphId: string): Promise<CohortSummary> {
    return this.json<CohortSummary>("GET", `/graphs/${encodeURIComponent(graphId)}/cohort-summary`);
  }

  async listTemplates(): Promise<string[]> {
    const payload = await this.json<{ templates: string[] }>("GET", "/templates");
    return payload.templates;
  }

  async instantiateTemplate(templateId: string): Promise<GraphDocument> {
    return this.json<GraphDocument>("POST", `/templates/${encodeURIComponent(templateId)}/instantiate`);
  }

  async createSession(graphId: string, threshold?: number): Promise<SessionCreateResponse> {
    const body: Record<string, unknown> = { graph_id: graphId };
    if (threshold !== undefined) {
      body.threshold = threshold;
    }
    return this.json<SessionCreateResponse>("POST", "/sessions", body);
  }

  async getSession(id: string): Promise<SessionDocument> {
    return this.json<SessionDocument>("GET", `/sessions/${encodeURIComponent(id)}`);
  }

  async sendTurn(sessionId: string, utterance: string): Promise<TurnResponse> {
    return this.json<TurnResponse>("POST", `/sessions/${encodeURIComponent(sessionId)}/turns`, {
      utterance,
    });
  }

  async endSession(id: string): Promise<SessionDocument> {
    return this.json<SessionDocument>("POST", `/sessions/${encodeURIComponent(id)}/end`);
  }

  async getReport(sessionId: string): Promise<SessionReport> {
    return this.json<SessionReport>("GET", `/sessions/${encodeURIComponent(sessionId)}/report`);
  }
}

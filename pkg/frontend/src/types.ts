/**
 * JSON document shapes exchanged with the training service.
 *
 * These mirror the service payloads one to one. The UI never invents
 * fields and never recomputes values the service already provides.
 */

export type DialogueMode = "strict" | "flexible";

export type Provenance = "authored" | "generated" | "template";

export interface IntentPayload {
  label: string;
  description: string;
  examples: string[];
}

export interface NodePayload {
  id: string;
  avatar_utterance: string;
  description: string;
  terminal: boolean;
  provenance: Provenance;
}

export interface EdgePayload {
  id: string;
  from: string;
  to: string;
  intent: IntentPayload;
  provenance: Provenance;
}

export interface GraphDocument {
  id: string;
  title: string;
  mode: DialogueMode;
  start_node: string | null;
  version: number;
  metadata: Record<string, string>;
  nodes: NodePayload[];
  edges: EdgePayload[];
}

export interface GraphSummary {
  id: string;
  title: string;
  mode: string;
  version: number;
  start_node: string | null;
  node_count: number;
  edge_count: number;
}

export interface Diagnostic {
  code: string;
  severity: string;
  message: string;
  subject: string;
}

export type Decision =
  | { kind: "matched"; edge_id: string; confidence: number }
  | { kind: "generated_branch"; new_edge_id: string; new_node_id: string }
  | { kind: "rejected"; best_confidence: number; hint: string };

export interface TurnPayload {
  index: number;
  at: string;
  student_utterance: string;
  decision: Decision;
  from_node: string;
  to_node: string;
  avatar_reply: string;
  feedback: string;
}

export type SessionStatus = "active" | "completed";

export interface SessionDocument {
  id: string;
  graph_id: string;
  graph_version_at_start: number;
  threshold: number;
  status: SessionStatus;
  created_at: string;
  current_node: string;
  transcript: TurnPayload[];
  /** Storage revision added by the service; absent on freshly created sessions. */
  version?: number;
}

export interface SessionCreateResponse {
  session: SessionDocument;
  opening_utterance: string;
}

export interface TurnResponse {
  turn: TurnPayload;
  session_status: SessionStatus;
  graph_version: number;
}

export interface PerTurnReport {
  index: number;
  kind: Decision["kind"];
  feedback: string;
}

export interface SessionReport {
  session_id: string;
  turns_total: number;
  matched_count: number;
  generated_count: number;
  rejected_count: number;
  completed: boolean;
  mean_confidence_of_matched: number;
  per_turn: PerTurnReport[];
}

export interface CohortSummary {
  graph_id: string;
  sessions_total: number;
  nodes: Record<string, number>;
  edges: Record<string, number>;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  message: string;
  detail?: unknown;
}

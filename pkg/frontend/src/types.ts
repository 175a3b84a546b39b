// Wire types for the session service HTTP/WS API. Field names match the
// server payloads byte for byte; the console renders these verbatim and
// never invents fields of its own.

export type TriggerMode = "baseline" | "query" | "queryless";

export interface ContextPayload {
  content: string;
  chars: number;
  capacity_chars: number;
}

export interface InteractionRecord {
  interaction_id: string;
  session_id: string;
  mode: TriggerMode;
  voiced_query: string | null;
  inferred_query: string | null;
  context_snapshot: string;
  hit_ids: string[];
  raw_answer: string;
  concise_answer: string;
  response_chars: number;
  query_time_ms: number | null;
  process_time_ms: number;
  created_at: number;
  status: "ok" | "error";
  error: string | null;
}

export interface MemoryBlockView {
  id: string;
  text: string;
  start_timestamp: number;
  session_id: string;
}

export interface MemoryPayload {
  blocks: MemoryBlockView[];
  last_hit_similarities: Record<string, number>;
}

export interface HealthPayload {
  status: string;
  blocks: number;
  sessions: number;
  text_backend: string;
}

export interface CreateSessionPayload {
  session_id: string;
  capacity_chars: number;
  flush_threshold_chars: number;
}

export interface EventResult {
  encoded_block_ids: string[];
  context: ContextPayload;
}

export interface CloseResult {
  encoded_block_ids: string[];
  closed: boolean;
}

export interface HelloFrame {
  type: "hello";
  session_id: string;
  context: ContextPayload;
  closed: boolean;
}

export interface EventFrame {
  type: "event";
  session_id: string;
  text: string;
  timestamp_ms: number;
  speaker: string | null;
  encoded_block_ids: string[];
  context: ContextPayload;
}

export interface ContextFrame {
  type: "context";
  session_id: string;
  context: ContextPayload;
}

export interface TriggerStartedFrame {
  type: "trigger_started";
  session_id: string;
  mode: TriggerMode;
  voiced_query: string | null;
}

export interface AnswerFrame {
  type: "answer";
  session_id: string;
  record: InteractionRecord;
}

export interface TriggerFailedFrame {
  type: "trigger_failed";
  session_id: string;
  mode: string;
  error: string;
  detail: string;
}

export interface SessionClosedFrame {
  type: "session_closed";
  session_id: string;
  encoded_block_ids: string[];
}

export type StreamFrame =
  | HelloFrame
  | EventFrame
  | ContextFrame
  | TriggerStartedFrame
  | AnswerFrame
  | TriggerFailedFrame
  | SessionClosedFrame;

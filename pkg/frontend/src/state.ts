// Session view state and the reducer that folds stream frames into it.
// Pure data plus synchronous transitions; network effects live in app.ts.
// The server is the source of truth: the feed and memory are replaced
// wholesale on every resync, and transcript entries come only from echoed
// event frames, never from local input.

import type {
  ContextPayload,
  InteractionRecord,
  MemoryPayload,
  StreamFrame,
  TriggerMode,
} from "./types.js";

export interface TranscriptEntry {
  text: string;
  timestamp_ms: number;
  speaker: string | null;
}

export type ConnectionPhase = "connecting" | "live" | "disconnected";

export interface ConsoleState {
  sessionId: string;
  phase: ConnectionPhase;
  closed: boolean;
  transcript: TranscriptEntry[];
  context: ContextPayload | null;
  feed: InteractionRecord[];
  rawShown: Record<string, boolean>;
  lastTriggerMode: TriggerMode | null;
  triggerInFlight: TriggerMode | null;
  holding: boolean;
  memory: MemoryPayload;
  banner: string | null;
}

export function initialState(sessionId: string): ConsoleState {
  return {
    sessionId,
    phase: "connecting",
    closed: false,
    transcript: [],
    context: null,
    feed: [],
    rawShown: {},
    lastTriggerMode: null,
    triggerInFlight: null,
    holding: false,
    memory: { blocks: [], last_hit_similarities: {} },
    banner: null,
  };
}

/** Fraction of the context window in use, clamped to [0, 100]. */
export function gaugePercent(context: ContextPayload | null): number {
  if (context === null || context.capacity_chars <= 0) {
    return 0;
  }
  const pct = (context.chars / context.capacity_chars) * 100;
  return Math.min(100, Math.max(0, pct));
}

export class ConsoleStore {
  state: ConsoleState;
  onChange: (() => void) | null = null;

  constructor(sessionId: string) {
    this.state = initialState(sessionId);
  }

  private notify(): void {
    this.onChange?.();
  }

  applyFrame(frame: StreamFrame): void {
    const s = this.state;
    switch (frame.type) {
      case "hello":
        s.phase = "live";
        s.closed = frame.closed;
        s.context = frame.context;
        break;
      case "event":
        s.transcript.push({
          text: frame.text,
          timestamp_ms: frame.timestamp_ms,
          speaker: frame.speaker,
        });
        s.context = frame.context;
        break;
      case "context":
        s.context = frame.context;
        break;
      case "trigger_started":
        s.triggerInFlight = frame.mode;
        s.lastTriggerMode = frame.mode;
        break;
      case "answer": {
        const record = frame.record;
        const at = s.feed.findIndex((r) => r.interaction_id === record.interaction_id);
        if (at >= 0) {
          s.feed[at] = record;
        } else {
          s.feed.push(record);
        }
        s.triggerInFlight = null;
        s.lastTriggerMode = record.mode;
        s.banner = null;
        break;
      }
      case "trigger_failed":
        s.triggerInFlight = null;
        s.banner = `${frame.error}: ${frame.detail}`;
        break;
      case "session_closed":
        s.closed = true;
        break;
    }
    this.notify();
  }

  /** Replace the feed with the server's interaction log, preserving its order. */
  seedInteractions(records: InteractionRecord[]): void {
    this.state.feed = records.slice();
    this.notify();
  }

  seedMemory(memory: MemoryPayload): void {
    this.state.memory = memory;
    this.notify();
  }

  toggleRaw(interactionId: string): void {
    const shown = this.state.rawShown[interactionId] ?? false;
    this.state.rawShown[interactionId] = !shown;
    this.notify();
  }

  setHolding(holding: boolean): void {
    this.state.holding = holding;
    this.notify();
  }

  setBanner(message: string | null): void {
    this.state.banner = message;
    this.notify();
  }

  noteDisconnected(): void {
    this.state.phase = "disconnected";
    this.state.banner = "stream disconnected";
    this.notify();
  }
}

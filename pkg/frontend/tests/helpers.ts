// Shared plumbing for the test suites: the live server address written by
// global-setup, a polling waitFor, and pointer-event dispatch that mirrors
// the app's own pointer/mouse fallback.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import type { InteractionRecord, MemoryPayload } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

export function serverBaseUrl(): string {
  const raw = readFileSync(join(HERE, ".server.json"), "utf-8");
  const info = JSON.parse(raw) as { baseUrl: string };
  return info.baseUrl;
}

export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  what: string,
  timeoutMs = 5_000,
  intervalMs = 5,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const got = probe();
    if (got !== null && got !== undefined && got !== false) {
      return got;
    }
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}

let sessionCounter = 0;

export function uniqueSessionId(prefix: string): string {
  sessionCounter += 1;
  return `${prefix}-${process.pid.toString(36)}-${Date.now().toString(36)}-${sessionCounter}`;
}

const USE_POINTER = typeof PointerEvent === "function";
const DOWN_TYPE = USE_POINTER ? "pointerdown" : "mousedown";
const UP_TYPE = USE_POINTER ? "pointerup" : "mouseup";

export function pressDown(target: HTMLElement): void {
  target.dispatchEvent(new MouseEvent(DOWN_TYPE, { bubbles: true }));
}

export function releaseUp(target: Window | HTMLElement): void {
  target.dispatchEvent(new MouseEvent(UP_TYPE, { bubbles: true }));
}

export function click(target: HTMLElement): void {
  target.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function pressEnter(target: HTMLElement): void {
  target.dispatchEvent(new KeyboardEvent("keydown", { key: "Enter", bubbles: true }));
}

export function makeRecord(overrides: Partial<InteractionRecord> = {}): InteractionRecord {
  return {
    interaction_id: "s-i0001",
    session_id: "s",
    mode: "query",
    voiced_query: "What does Emily play?",
    inferred_query: null,
    context_snapshot: "plays the violin beautifully.",
    hit_ids: ["s-b0001"],
    raw_answer: "My granddaughter Emily plays the violin.",
    concise_answer: "Emily plays violin.",
    response_chars: 19,
    query_time_ms: 1600,
    process_time_ms: 4,
    created_at: 1_700_000_000_000,
    status: "ok",
    error: null,
    ...overrides,
  };
}

export function emptyMemory(): MemoryPayload {
  return { blocks: [], last_hit_similarities: {} };
}

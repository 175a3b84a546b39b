// Controller tying the API client, the stream, the store, and the DOM
// together. Server writes happen only through ApiClient calls wired here;
// everything rendered flows back through stream frames or GET resyncs.

import { ApiClient, ApiError } from "./api.js";
import { ConsoleStore } from "./state.js";
import { openStream, type StreamHandle } from "./stream.js";
import { buildShell, renderDynamic, type Shell } from "./view.js";
import type { StreamFrame } from "./types.js";

export interface ConsoleAppOptions {
  speaker?: string;
  /** Millisecond clock for hold timing; injectable for tests. */
  now?: () => number;
}

const POINTER_DOWN = typeof PointerEvent === "function" ? "pointerdown" : "mousedown";
const POINTER_UP = typeof PointerEvent === "function" ? "pointerup" : "mouseup";

export class ConsoleApp {
  readonly store: ConsoleStore;
  readonly shell: Shell;
  private readonly api: ApiClient;
  private readonly speaker: string | undefined;
  private readonly now: () => number;
  private stream: StreamHandle | null = null;
  private holdStartedAt = 0;
  private feedSeq = 0;
  private memorySeq = 0;
  private readonly onWindowRelease: () => void;

  constructor(root: HTMLElement, api: ApiClient, sessionId: string, opts: ConsoleAppOptions = {}) {
    this.api = api;
    this.speaker = opts.speaker;
    this.now = opts.now ?? (() => performance.now());
    this.store = new ConsoleStore(sessionId);
    this.shell = buildShell(root);
    this.onWindowRelease = () => {
      void this.releaseHold();
    };
    this.store.onChange = () => {
      renderDynamic(this.shell, this.store.state);
    };
    this.wireControls();
    renderDynamic(this.shell, this.store.state);
  }

  /** Open the stream; resolve once the server's hello frame has rendered. */
  start(): Promise<void> {
    return new Promise((resolve, reject) => {
      let greeted = false;
      this.stream = openStream(
        this.api.wsUrl(this.store.state.sessionId),
        (frame) => {
          if (!greeted && frame.type === "hello") {
            greeted = true;
            this.handleFrame(frame);
            resolve();
            return;
          }
          this.handleFrame(frame);
        },
        (wanted) => {
          if (!greeted) {
            reject(new Error("stream closed before hello"));
            return;
          }
          if (!wanted) {
            this.store.noteDisconnected();
          }
        },
      );
    });
  }

  stop(): void {
    if (this.store.state.holding) {
      this.store.setHolding(false);
    }
    this.stream?.close();
    this.stream = null;
  }

  private wireControls(): void {
    const shell = this.shell;
    shell.eventSend.addEventListener("click", () => {
      void this.sendEvent();
    });
    shell.eventInput.addEventListener("keydown", (event: KeyboardEvent) => {
      if (event.key === "Enter") {
        void this.sendEvent();
      }
    });
    shell.holdButton.addEventListener(POINTER_DOWN, () => {
      this.beginHold();
    });
    shell.querylessButton.addEventListener("click", () => {
      void this.querylessPress();
    });
    shell.closeButton.addEventListener("click", () => {
      void this.closeSession();
    });
    shell.feed.addEventListener("click", (event: Event) => {
      const target = event.target as HTMLElement | null;
      const toggle = target?.closest<HTMLElement>('[data-role="toggle-raw"]');
      if (toggle === null || toggle === undefined) {
        return;
      }
      const card = toggle.closest<HTMLElement>("[data-interaction-id]");
      const id = card?.getAttribute("data-interaction-id");
      if (id) {
        this.store.toggleRaw(id);
      }
    });
  }

  /** Single entry point for stream frames; also the seam unit tests use. */
  handleFrame(frame: StreamFrame): void {
    this.store.applyFrame(frame);
    switch (frame.type) {
      case "hello":
        void this.refreshFeed();
        void this.refreshMemory();
        break;
      case "event":
        if (frame.encoded_block_ids.length > 0) {
          void this.refreshMemory();
        }
        break;
      case "answer":
        void this.refreshMemory();
        break;
      case "trigger_failed":
        // Failed pipeline triggers still land in the interaction log, so
        // resync to keep the feed aligned with it.
        void this.refreshFeed();
        break;
      case "session_closed":
        void this.refreshMemory();
        break;
      default:
        break;
    }
  }

  /** Replace the feed from the server log, dropping stale responses. */
  async refreshFeed(): Promise<void> {
    const seq = ++this.feedSeq;
    try {
      const records = await this.api.interactions(this.store.state.sessionId);
      if (seq === this.feedSeq) {
        this.store.seedInteractions(records);
      }
    } catch (err) {
      this.reportError(err);
    }
  }

  async refreshMemory(): Promise<void> {
    const seq = ++this.memorySeq;
    try {
      const memory = await this.api.memory(this.store.state.sessionId);
      if (seq === this.memorySeq) {
        this.store.seedMemory(memory);
      }
    } catch (err) {
      this.reportError(err);
    }
  }

  async sendEvent(): Promise<void> {
    const text = this.shell.eventInput.value;
    if (text.trim() === "") {
      return;
    }
    this.shell.eventInput.disabled = true;
    this.shell.eventSend.disabled = true;
    try {
      await this.api.postEvent(this.store.state.sessionId, text, this.speaker);
      this.shell.eventInput.value = "";
    } catch (err) {
      this.reportError(err);
    } finally {
      const stillUsable = !this.store.state.closed && this.store.state.phase === "live";
      this.shell.eventInput.disabled = !stillUsable;
      this.shell.eventSend.disabled = !stillUsable;
      if (stillUsable) {
        this.shell.eventInput.focus();
      }
    }
  }

  beginHold(): void {
    if (this.store.state.holding || this.store.state.closed) {
      return;
    }
    this.holdStartedAt = this.now();
    this.store.setHolding(true);
    this.shell.queryInput.focus();
    const win = this.shell.root.ownerDocument.defaultView;
    win?.addEventListener(POINTER_UP, this.onWindowRelease, { once: true });
  }

  async releaseHold(): Promise<void> {
    if (!this.store.state.holding) {
      return;
    }
    const heldMs = Math.max(0, Math.round(this.now() - this.holdStartedAt));
    this.store.setHolding(false);
    const query = this.shell.queryInput.value;
    if (query.trim() === "") {
      this.store.setBanner("hold released with an empty query; nothing sent");
      return;
    }
    try {
      await this.api.trigger(this.store.state.sessionId, {
        mode: "query",
        voiced_query: query,
        query_time_ms: heldMs,
      });
      this.shell.queryInput.value = "";
    } catch (err) {
      this.reportError(err);
    }
  }

  async querylessPress(): Promise<void> {
    try {
      await this.api.trigger(this.store.state.sessionId, { mode: "queryless" });
    } catch (err) {
      this.reportError(err);
    }
  }

  async closeSession(): Promise<void> {
    try {
      await this.api.closeSession(this.store.state.sessionId);
    } catch (err) {
      this.reportError(err);
    }
  }

  private reportError(err: unknown): void {
    if (err instanceof ApiError) {
      this.store.setBanner(err.message);
    } else {
      this.store.setBanner(String(err));
    }
  }
}

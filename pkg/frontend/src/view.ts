// DOM construction and rendering. The static chrome (inputs, buttons) is
// built once so typed text survives re-renders; only the dynamic regions
// are rebuilt on state changes. All data lands via textContent.

import { type ConsoleState, gaugePercent } from "./state.js";
import type { InteractionRecord } from "./types.js";

export interface Shell {
  root: HTMLElement;
  sessionLabel: HTMLElement;
  phaseLabel: HTMLElement;
  lastModeLabel: HTMLElement;
  banner: HTMLElement;
  gaugeFill: HTMLElement;
  gaugeLabel: HTMLElement;
  contextContent: HTMLElement;
  transcriptList: HTMLElement;
  eventInput: HTMLInputElement;
  eventSend: HTMLButtonElement;
  queryInput: HTMLInputElement;
  holdButton: HTMLButtonElement;
  holdState: HTMLElement;
  querylessButton: HTMLButtonElement;
  closeButton: HTMLButtonElement;
  feed: HTMLElement;
  memoryBody: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function buildShell(root: HTMLElement): Shell {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.classList.add("console");

  const header = el(doc, "header", { class: "masthead" });
  const title = el(doc, "h1", {}, "recallkit console");
  const sessionLabel = el(doc, "span", { "data-role": "session-id" });
  const phaseLabel = el(doc, "span", { "data-role": "phase" });
  const lastModeLabel = el(doc, "span", { "data-role": "last-mode" });
  header.append(title, sessionLabel, phaseLabel, lastModeLabel);

  const banner = el(doc, "div", { "data-role": "banner", class: "banner", hidden: "" });

  const contextSection = el(doc, "section", { class: "context" });
  contextSection.append(el(doc, "h2", {}, "current context"));
  const gauge = el(doc, "div", { class: "gauge" });
  const gaugeFill = el(doc, "div", { class: "gauge-fill", "data-role": "gauge-fill" });
  gauge.append(gaugeFill);
  const gaugeLabel = el(doc, "div", { "data-role": "gauge-label", class: "gauge-label" });
  const contextContent = el(doc, "pre", { "data-role": "context-content", class: "context-content" });
  contextSection.append(gauge, gaugeLabel, contextContent);

  const transcriptSection = el(doc, "section", { class: "transcript" });
  transcriptSection.append(el(doc, "h2", {}, "transcript"));
  const transcriptList = el(doc, "ul", { "data-role": "transcript" });
  transcriptSection.append(transcriptList);

  const composer = el(doc, "section", { class: "composer" });
  const eventInput = el(doc, "input", {
    "data-role": "event-input",
    type: "text",
    placeholder: "transcript line",
  });
  const eventSend = el(doc, "button", { "data-role": "event-send", type: "button" }, "add line");
  const queryInput = el(doc, "input", {
    "data-role": "query-input",
    type: "text",
    placeholder: "query (type while holding)",
  });
  const holdButton = el(
    doc,
    "button",
    { "data-role": "hold-button", type: "button" },
    "hold to query",
  );
  const holdState = el(doc, "span", { "data-role": "hold-state", class: "hold-state" });
  const querylessButton = el(
    doc,
    "button",
    { "data-role": "queryless-button", type: "button" },
    "queryless press",
  );
  const closeButton = el(doc, "button", { "data-role": "close-button", type: "button" }, "close session");
  composer.append(
    eventInput,
    eventSend,
    queryInput,
    holdButton,
    holdState,
    querylessButton,
    closeButton,
  );

  const feedSection = el(doc, "section", { class: "answers" });
  feedSection.append(el(doc, "h2", {}, "answers"));
  const feed = el(doc, "div", { "data-role": "feed" });
  feedSection.append(feed);

  const memorySection = el(doc, "section", { class: "memory" });
  memorySection.append(el(doc, "h2", {}, "memory blocks"));
  const memoryTable = el(doc, "table", { class: "memory-table" });
  const head = el(doc, "thead");
  const headRow = el(doc, "tr");
  for (const label of ["id", "start", "text", "similarity"]) {
    headRow.append(el(doc, "th", {}, label));
  }
  head.append(headRow);
  const memoryBody = el(doc, "tbody", { "data-role": "memory" });
  memoryTable.append(head, memoryBody);
  memorySection.append(memoryTable);

  root.append(
    header,
    banner,
    contextSection,
    transcriptSection,
    composer,
    feedSection,
    memorySection,
  );

  return {
    root,
    sessionLabel,
    phaseLabel,
    lastModeLabel,
    banner,
    gaugeFill,
    gaugeLabel,
    contextContent,
    transcriptList,
    eventInput,
    eventSend,
    queryInput,
    holdButton,
    holdState,
    querylessButton,
    closeButton,
    feed,
    memoryBody,
  };
}

/** Record fields rendered on every answer card, in display order. */
export const RECORD_FIELDS: readonly (keyof InteractionRecord)[] = [
  "interaction_id",
  "session_id",
  "mode",
  "voiced_query",
  "inferred_query",
  "context_snapshot",
  "hit_ids",
  "raw_answer",
  "concise_answer",
  "response_chars",
  "query_time_ms",
  "process_time_ms",
  "created_at",
  "status",
  "error",
] as const;

export function fieldText(record: InteractionRecord, field: keyof InteractionRecord): string {
  const value = record[field];
  if (value === null) {
    return "";
  }
  if (Array.isArray(value)) {
    return value.join(",");
  }
  return String(value);
}

function renderCard(doc: Document, record: InteractionRecord, rawShown: boolean): HTMLElement {
  const card = el(doc, "article", {
    class: record.status === "error" ? "card card-error" : "card",
    "data-interaction-id": record.interaction_id,
  });

  const top = el(doc, "div", { class: "card-top" });
  const badge = el(doc, "span", { class: `badge badge-${record.mode}`, "data-role": "mode-badge" });
  badge.textContent = record.mode;
  top.append(badge);
  const asked =
    record.mode === "queryless" ? record.inferred_query ?? "" : record.voiced_query ?? "";
  top.append(el(doc, "span", { class: "asked", "data-role": "asked" }, asked));
  card.append(top);

  const answer = el(doc, "p", { class: "answer-text", "data-role": "answer-text" });
  answer.textContent = rawShown ? record.raw_answer : record.concise_answer;
  card.append(answer);

  const toggle = el(doc, "button", { type: "button", "data-role": "toggle-raw" });
  toggle.textContent = rawShown ? "show concise" : "show raw";
  card.append(toggle);

  const timings = el(doc, "span", { class: "timings", "data-role": "timings" });
  const queryPart = record.query_time_ms === null ? "query n/a" : `query ${record.query_time_ms} ms`;
  timings.textContent = `${queryPart} · process ${record.process_time_ms} ms`;
  card.append(timings);

  const fields = el(doc, "dl", { class: "record-fields" });
  for (const field of RECORD_FIELDS) {
    fields.append(el(doc, "dt", {}, field));
    fields.append(el(doc, "dd", { "data-field": field }, fieldText(record, field)));
  }
  card.append(fields);
  return card;
}

export function renderDynamic(shell: Shell, state: ConsoleState): void {
  const doc = shell.root.ownerDocument;

  shell.sessionLabel.textContent = state.sessionId;
  shell.phaseLabel.textContent = state.closed ? `${state.phase} · closed` : state.phase;
  shell.lastModeLabel.textContent =
    state.lastTriggerMode === null ? "no triggers yet" : `last trigger: ${state.lastTriggerMode}`;

  if (state.banner === null) {
    shell.banner.setAttribute("hidden", "");
    shell.banner.textContent = "";
  } else {
    shell.banner.removeAttribute("hidden");
    shell.banner.textContent = state.banner;
  }

  const pct = gaugePercent(state.context);
  shell.gaugeFill.style.width = `${pct}%`;
  if (state.context === null) {
    shell.gaugeLabel.textContent = "no context yet";
    shell.contextContent.textContent = "";
  } else {
    shell.gaugeLabel.textContent = `${state.context.chars} / ${state.context.capacity_chars} chars`;
    shell.contextContent.textContent = state.context.content;
  }

  shell.transcriptList.textContent = "";
  for (const entry of state.transcript) {
    const item = el(doc, "li", { class: "transcript-entry" });
    const stamp = el(doc, "span", { class: "stamp" }, String(entry.timestamp_ms));
    const speaker = el(doc, "span", { class: "speaker" }, entry.speaker ?? "");
    const text = el(doc, "span", { class: "line" }, entry.text);
    item.append(stamp, speaker, text);
    shell.transcriptList.append(item);
  }

  shell.holdState.textContent = state.holding
    ? "listening"
    : state.triggerInFlight !== null
      ? `${state.triggerInFlight} trigger in flight`
      : "";
  shell.holdButton.classList.toggle("holding", state.holding);

  const disabled = state.closed || state.phase !== "live";
  shell.eventInput.disabled = disabled;
  shell.eventSend.disabled = disabled;
  shell.queryInput.disabled = disabled;
  shell.holdButton.disabled = disabled;
  shell.querylessButton.disabled = disabled;
  shell.closeButton.disabled = disabled;

  shell.feed.textContent = "";
  for (const record of state.feed) {
    const rawShown = state.rawShown[record.interaction_id] ?? false;
    shell.feed.append(renderCard(doc, record, rawShown));
  }

  shell.memoryBody.textContent = "";
  for (const block of state.memory.blocks) {
    const row = el(doc, "tr", { "data-block-id": block.id });
    row.append(el(doc, "td", { class: "block-id" }, block.id));
    row.append(el(doc, "td", { class: "block-start" }, String(block.start_timestamp)));
    row.append(el(doc, "td", { class: "block-text" }, block.text));
    const sim = state.memory.last_hit_similarities[block.id];
    row.append(
      el(doc, "td", { class: "block-sim", "data-role": "similarity" }, sim === undefined ? "" : sim.toFixed(4)),
    );
    shell.memoryBody.append(row);
  }
}

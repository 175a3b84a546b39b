// Browser entry point. Reads ?api=, ?session=, and ?speaker= from the page
// URL, creates or resumes the session, and boots the console into #app.

import { ApiClient, ApiError } from "./api.js";
import { ConsoleApp } from "./app.js";

async function ensureSession(api: ApiClient, requested: string | null): Promise<string> {
  if (requested === null) {
    const created = await api.createSession();
    return created.session_id;
  }
  try {
    await api.createSession(requested);
  } catch (err) {
    // An existing session id means resume, not failure.
    if (!(err instanceof ApiError && err.status === 409)) {
      throw err;
    }
  }
  return requested;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (root === null) {
    throw new Error("missing #app element");
  }
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? `${window.location.protocol}//${window.location.host}`;
  const api = new ApiClient(base);
  const sessionId = await ensureSession(api, params.get("session"));
  const app = new ConsoleApp(root, api, sessionId, {
    speaker: params.get("speaker") ?? undefined,
  });
  await app.start();
}

void boot().catch((err: unknown) => {
  const root = document.getElementById("app") ?? document.body;
  root.textContent = `console failed to start: ${String(err)}`;
});

/**
 * Thin fetch client for the sync service. Bodies and status handling only;
 * retry/offline policy lives in the session.
 */

import type { ChangeSet, ChangesResponse, OpsResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function raise(resp: Response): Promise<never> {
  let code = "http_error";
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { error?: string; detail?: string };
    code = body.error ?? code;
    detail = body.detail ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, code, detail);
}

export class SyncApi {
  constructor(public baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  async createProject(documentBytes: string | Uint8Array): Promise<{ pid: string; revision: number }> {
    const resp = await fetch(`${this.baseUrl}/projects`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: documentBytes as BodyInit,
    });
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as { pid: string; revision: number };
  }

  /** Full canonical document, as raw text (bytes matter). */
  async getDocument(pid: string): Promise<string> {
    const resp = await fetch(`${this.baseUrl}/projects/${encodeURIComponent(pid)}`);
    if (!resp.ok) await raise(resp);
    return resp.text();
  }

  /**
   * Ops after `since`. The server answers with a full document instead when
   * `since` predates its log; both forms come back discriminated here.
   */
  async getChanges(
    pid: string,
    since: number,
  ): Promise<{ kind: "ops"; ops: OpsResponse } | { kind: "document"; text: string }> {
    const resp = await fetch(
      `${this.baseUrl}/projects/${encodeURIComponent(pid)}?since=${since}`,
    );
    if (!resp.ok) await raise(resp);
    const text = await resp.text();
    const parsed = JSON.parse(text) as OpsResponse | { schema_version?: string };
    if ("ops" in parsed) return { kind: "ops", ops: parsed as OpsResponse };
    return { kind: "document", text };
  }

  async postChanges(pid: string, changes: ChangeSet): Promise<ChangesResponse> {
    const resp = await fetch(`${this.baseUrl}/projects/${encodeURIComponent(pid)}/changes`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(changes),
    });
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as ChangesResponse;
  }

  async exportCsv(pid: string): Promise<string> {
    const resp = await fetch(
      `${this.baseUrl}/projects/${encodeURIComponent(pid)}/export?format=csv`,
    );
    if (!resp.ok) await raise(resp);
    return resp.text();
  }
}

// Typed client over the circoskit HTTP API. Kept DOM-free so the node test
// runner can drive a real server through the same code the panels use.

export type HealthInfo = {
  status: string;
  version: string;
  corpusVersion: number;
  corpusSize: number;
  tokens: string[];
  structural: string[];
  commands: string[];
};

export type DatasetSummary = {
  id: string;
  kind: "karyotype" | "attachment" | "link";
  name: string;
  rows: number;
  colorMarker: string | null;
};

export type DatasetDetail = DatasetSummary & {
  data: Record<string, unknown>[];
};

export type TrackStyle = {
  color: string | null;
  direction: "in" | "out";
  domain: [number, number] | null;
  opacity: number;
};

export type TrackBinding = {
  ring: number;
  pos: number;
  datasetId: string | null;
  style: TrackStyle;
  kind?: string;
};

export type Recommendation = {
  id: string;
  config: string;
  raw: string;
  explanation: string;
  references: string[];
  referenceRecords: { id: string; annotation: string; config: string }[];
  attempts: number;
  seed: number;
  query: string;
};

export type SessionView = {
  id: string;
  config: string;
  renderHash: string;
  bindings: TrackBinding[];
  canvas: Record<string, number>;
  history: Recommendation[];
};

export type RetrievalHit = {
  id: string;
  distance: number;
  rank: number;
  annotation: string;
  config: string;
};

export type DagNode = { id: string; token: string; depth: number; layer: number; x: number };
export type DagEdge = { from: string; to: string; weight: number; class: "current" | "recommended" | "other" };
export type DagView = { nodes: DagNode[]; edges: DagEdge[]; truncated: boolean; scope: string };

export type MutationResult = { config: string; renderHash: string; unbound: string[] };

export class ApiError extends Error {
  code: string;
  status: number;
  detail: unknown;

  constructor(status: number, code: string, message: string, detail?: unknown) {
    super(message);
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

export class ApiClient {
  baseUrl: string;
  private mutationTail: Promise<unknown> = Promise.resolve();

  constructor(baseUrl = "") {
    this.baseUrl = baseUrl.replace(/\/$/, "");
  }

  private async request<T>(method: string, path: string, init?: { json?: unknown; body?: string; contentType?: string }): Promise<T> {
    const headers: Record<string, string> = {};
    let body: string | undefined;
    if (init?.json !== undefined) {
      headers["content-type"] = "application/json";
      body = JSON.stringify(init.json);
    } else if (init?.body !== undefined) {
      headers["content-type"] = init.contentType ?? "text/plain";
      body = init.body;
    }
    const response = await fetch(`${this.baseUrl}${path}`, { method, headers, body });
    const text = await response.text();
    if (!response.ok) {
      let code = "http_error";
      let message = text || response.statusText;
      let detail: unknown;
      try {
        const payload = JSON.parse(text);
        code = payload.code ?? code;
        message = payload.message ?? message;
        detail = payload.detail;
      } catch {
        // non-JSON error body; keep raw text as the message
      }
      throw new ApiError(response.status, code, message, detail);
    }
    const contentType = response.headers.get("content-type") ?? "";
    if (contentType.includes("json")) {
      return JSON.parse(text) as T;
    }
    return text as unknown as T;
  }

  // Mutations are queued FIFO: at most one in flight per client/session.
  private enqueue<T>(run: () => Promise<T>): Promise<T> {
    const next = this.mutationTail.then(run, run);
    this.mutationTail = next.catch(() => undefined);
    return next;
  }

  health(): Promise<HealthInfo> {
    return this.request("GET", "/api/health");
  }

  importCorpus(jsonl: string): Promise<{ accepted: number; rejected: { line: number; error: string }[] }> {
    return this.enqueue(() => this.request("POST", "/api/corpus/import", { body: jsonl }));
  }

  corpusStats(): Promise<Record<string, unknown>> {
    return this.request("GET", "/api/corpus/stats");
  }

  listDatasets(): Promise<DatasetSummary[]> {
    return this.request("GET", "/api/data");
  }

  getDataset(id: string): Promise<DatasetDetail> {
    return this.request("GET", `/api/data/${encodeURIComponent(id)}`);
  }

  uploadDataset(kind: string, csv: string, name?: string): Promise<DatasetSummary & { rejected: { line: number; error: string }[] }> {
    const query = name ? `?kind=${kind}&name=${encodeURIComponent(name)}` : `?kind=${kind}`;
    return this.enqueue(() => this.request("POST", `/api/data${query}`, { body: csv, contentType: "text/csv" }));
  }

  setColorMarker(id: string, colorMarker: string): Promise<DatasetSummary> {
    return this.enqueue(() => this.request("PUT", `/api/data/${encodeURIComponent(id)}`, { json: { colorMarker } }));
  }

  deleteDataset(id: string): Promise<{ deleted: boolean; unboundTracks: { sessionId: string; ring: number; pos: number }[] }> {
    return this.enqueue(() => this.request("DELETE", `/api/data/${encodeURIComponent(id)}`));
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/api/session/${encodeURIComponent(sessionId)}`);
  }

  getConfig(sessionId: string): Promise<string> {
    return this.request<{ config: string }>("GET", `/api/session/${encodeURIComponent(sessionId)}/config`).then(
      (payload) => payload.config,
    );
  }

  putConfig(sessionId: string, config: string): Promise<MutationResult> {
    return this.enqueue(() =>
      this.request("PUT", `/api/session/${encodeURIComponent(sessionId)}/config`, { json: { config } }),
    );
  }

  putBinding(
    sessionId: string,
    update: { ring: number; pos: number; datasetId?: string | null; style?: Partial<TrackStyle> },
  ): Promise<{ binding: TrackBinding; renderHash: string }> {
    return this.enqueue(() =>
      this.request("PUT", `/api/session/${encodeURIComponent(sessionId)}/binding`, { json: update }),
    );
  }

  retrieve(body: { mode: "semantic" | "structural"; query?: string; sessionId?: string; k?: number }): Promise<{ hits: RetrievalHit[] }> {
    return this.request("POST", "/api/retrieve", { json: body });
  }

  recommend(sessionId: string, query: string, k?: number): Promise<Recommendation> {
    return this.enqueue(() => this.request("POST", "/api/recommend", { json: { sessionId, query, k } }));
  }

  regenerate(recId: string): Promise<Recommendation> {
    return this.enqueue(() => this.request("POST", `/api/recommend/${encodeURIComponent(recId)}/regenerate`));
  }

  getDag(sessionId: string, scope: "retrieved" | "corpus" = "retrieved", k = 10): Promise<DagView> {
    return this.request("GET", `/api/dag?sessionId=${encodeURIComponent(sessionId)}&scope=${scope}&k=${k}`);
  }

  completeDagPath(sessionId: string, nodeId: string, scope: "retrieved" | "corpus" = "retrieved", k = 10): Promise<MutationResult> {
    return this.enqueue(() =>
      this.request("POST", "/api/dag/complete", { json: { sessionId, nodeId, scope, k } }),
    );
  }

  renderSvg(sessionId: string): Promise<string> {
    return this.request("POST", "/api/render", { json: { sessionId } });
  }

  exportUrl(sessionId: string): string {
    return `${this.baseUrl}/api/export/${encodeURIComponent(sessionId)}.svg`;
  }

  // After a mutation the dashboard re-polls the render hash (500 ms, max 3
  // polls) and reports the settled value.
  async pollRenderHash(sessionId: string, lastHash: string | null, intervalMs = 500, maxPolls = 3): Promise<string> {
    let hash = lastHash ?? "";
    for (let attempt = 0; attempt < maxPolls; attempt += 1) {
      const view = await this.getSession(sessionId);
      if (view.renderHash !== lastHash) {
        return view.renderHash;
      }
      hash = view.renderHash;
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
    return hash;
  }
}

// Shared UI state: one session, server-mirrored views, simple subscriptions.

import type { ApiClient, DatasetSummary, Recommendation, SessionView } from "./api.js";

export type Selection = { ring: number; pos: number } | null;

export type UiState = {
  sessionId: string;
  session: SessionView | null;
  datasets: DatasetSummary[];
  tokens: string[];
  selectedTrack: Selection;
  hoveredDagNode: string | null;
  lastRenderHash: string | null;
};

type Listener = () => void;

export class Store {
  api: ApiClient;
  state: UiState;
  private listeners: Listener[] = [];

  constructor(api: ApiClient, sessionId: string) {
    this.api = api;
    this.state = {
      sessionId,
      session: null,
      datasets: [],
      tokens: [],
      selectedTrack: null,
      hoveredDagNode: null,
      lastRenderHash: null,
    };
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  get history(): Recommendation[] {
    return this.state.session?.history ?? [];
  }

  get config(): string {
    return this.state.session?.config ?? "";
  }

  async refreshSession(): Promise<void> {
    this.state.session = await this.api.getSession(this.state.sessionId);
    this.state.lastRenderHash = this.state.session.renderHash;
    this.notify();
  }

  async refreshDatasets(): Promise<void> {
    this.state.datasets = await this.api.listDatasets();
    this.notify();
  }

  select(selection: Selection): void {
    this.state.selectedTrack = selection;
    this.notify();
  }
}

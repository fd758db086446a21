// Wires the five panels to one shared store and one plot session. All
// authority lives server-side: the client PUTs strings, GETs views, and
// re-renders on the polled render hash.

import { ApiClient } from "./api.js";
import { ChatPanel } from "./panels/chat.js";
import { ConfigPanel } from "./panels/config.js";
import { DashboardPanel } from "./panels/dashboard.js";
import { DataPanel } from "./panels/data.js";
import { ReferencePanel } from "./panels/reference.js";
import { Store } from "./state.js";
import { showError } from "./toast.js";

const SESSION_KEY = "circoskit-session";

function sessionId(): string {
  let id = window.localStorage.getItem(SESSION_KEY);
  if (!id) {
    id = `s-${Date.now().toString(36)}`;
    window.localStorage.setItem(SESSION_KEY, id);
  }
  return id;
}

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const store = new Store(api, sessionId());

  const dashboard = new DashboardPanel(store, document.getElementById("dashboard-panel")!);
  const reference = new ReferencePanel(store, document.getElementById("reference-panel")!, onMutated);
  new ConfigPanel(store, document.getElementById("config-panel")!, onMutated);
  new DataPanel(store, document.getElementById("data-panel")!, onMutated);
  new ChatPanel(store, document.getElementById("chat-panel")!, onMutated);

  // After any mutation: poll the render hash, then refresh plot and DAG.
  async function onMutated(): Promise<void> {
    const settled = await api.pollRenderHash(store.state.sessionId, store.state.lastRenderHash);
    store.state.lastRenderHash = settled;
    await store.refreshSession();
    await dashboard.refresh();
    await reference.refresh();
  }

  try {
    const health = await api.health();
    store.state.tokens = health.tokens;
    document.getElementById("corpus-size")!.textContent = `${health.corpusSize} reference plots`;
  } catch (error) {
    showError(error);
  }
  await store.refreshDatasets();
  await store.refreshSession();
  await dashboard.refresh();
  await reference.refresh().catch(() => undefined);
}

void boot();

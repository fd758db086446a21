// Configuration Panel: a global form for inserting tracks plus one local form
// per track (data source, color, histogram direction, value domain, delete).
// Every change is a PUT; the server re-binds, re-validates, and re-renders.

import type { TrackBinding } from "../api.js";
import { escapeHtml } from "../html.js";
import type { Store } from "../state.js";
import { guarded } from "../toast.js";

export class ConfigPanel {
  private store: Store;
  private root: HTMLElement;
  private onMutated: () => Promise<void>;

  constructor(store: Store, root: HTMLElement, onMutated: () => Promise<void>) {
    this.store = store;
    this.root = root;
    this.onMutated = onMutated;
    store.subscribe(() => this.render());
    this.render();
  }

  // Token-string edits reuse the server-provided config verbatim; the server
  // stays the only validation authority.
  private async putConfig(config: string): Promise<void> {
    await guarded(async () => {
      await this.store.api.putConfig(this.store.state.sessionId, config);
      await this.onMutated();
    });
  }

  private addTrack(kind: string, mode: "new-ring" | "into-last-ring"): Promise<void> {
    const current = this.store.config;
    let next: string;
    if (!current) {
      next = `<${kind}>`;
    } else if (mode === "new-ring") {
      next = `${current}<split><${kind}>`;
    } else {
      next = `${current}<${kind}>`;
    }
    return this.putConfig(next);
  }

  private deleteTrack(ring: number, pos: number): Promise<void> {
    const rings = this.store.config.split("<split>").map((part) => part.match(/<[a-z]+>/g) ?? []);
    rings[ring].splice(pos, 1);
    const next = rings.filter((tracks) => tracks.length > 0).map((tracks) => tracks.join("")).join("<split>");
    return this.putConfig(next);
  }

  private trackForm(binding: TrackBinding): HTMLElement {
    const kind = binding.kind ?? "?";
    const item = document.createElement("div");
    item.className = "track-form";
    item.dataset.track = `${binding.ring}:${binding.pos}`;
    const datasets = this.store.state.datasets
      .map(
        (dataset) =>
          `<option value="${dataset.id}" ${dataset.id === binding.datasetId ? "selected" : ""}>${dataset.id} · ${escapeHtml(dataset.name)}</option>`,
      )
      .join("");
    const domain = binding.style.domain;
    item.innerHTML = `
      <div class="track-form-head">
        <span class="token token-${kind}">&lt;${kind}&gt;</span>
        <span class="muted">ring ${binding.ring} · pos ${binding.pos}</span>
        <button class="delete-track" title="Delete track">✕</button>
      </div>
      <label>data <select class="bind-dataset"><option value="">(unbound)</option>${datasets}</select></label>
      <label>color <input type="color" class="style-color" value="${binding.style.color ?? "#888888"}"/></label>
      <label>direction
        <select class="style-direction">
          <option value="out" ${binding.style.direction === "out" ? "selected" : ""}>out</option>
          <option value="in" ${binding.style.direction === "in" ? "selected" : ""}>in</option>
        </select>
      </label>
      <label>domain
        <input class="style-domain" placeholder="auto" value="${domain ? `${domain[0]}..${domain[1]}` : ""}"/>
      </label>
    `;
    (item.querySelector(".delete-track") as HTMLButtonElement).onclick = () =>
      void this.deleteTrack(binding.ring, binding.pos);
    (item.querySelector(".bind-dataset") as HTMLSelectElement).onchange = (event) => {
      const value = (event.target as HTMLSelectElement).value || null;
      void this.putBinding(binding, { datasetId: value });
    };
    (item.querySelector(".style-color") as HTMLInputElement).onchange = (event) =>
      void this.putBinding(binding, { style: { color: (event.target as HTMLInputElement).value } });
    (item.querySelector(".style-direction") as HTMLSelectElement).onchange = (event) =>
      void this.putBinding(binding, { style: { direction: (event.target as HTMLSelectElement).value as "in" | "out" } });
    (item.querySelector(".style-domain") as HTMLInputElement).onchange = (event) => {
      const text = (event.target as HTMLInputElement).value.trim();
      const match = text.match(/^(-?[\d.]+)\s*\.\.\s*(-?[\d.]+)$/);
      void this.putBinding(binding, { style: { domain: match ? [Number(match[1]), Number(match[2])] : null } });
    };
    if (
      this.store.state.selectedTrack &&
      this.store.state.selectedTrack.ring === binding.ring &&
      this.store.state.selectedTrack.pos === binding.pos
    ) {
      item.classList.add("selected");
    }
    return item;
  }

  private async putBinding(
    binding: TrackBinding,
    update: { datasetId?: string | null; style?: Record<string, unknown> },
  ): Promise<void> {
    await guarded(async () => {
      await this.store.api.putBinding(this.store.state.sessionId, {
        ring: binding.ring,
        pos: binding.pos,
        ...update,
      });
      await this.onMutated();
    });
  }

  render(): void {
    const bindings = this.store.state.session?.bindings ?? [];
    const tokenOptions = this.store.state.tokens.map((t) => `<option>${t}</option>`).join("");
    this.root.innerHTML = `
      <h2>Configuration</h2>
      <div class="global-form">
        <select id="add-kind">${tokenOptions}</select>
        <button id="add-ring">Add as new ring</button>
        <button id="add-into">Add into last ring</button>
      </div>
      <div id="track-forms"></div>
    `;
    (this.root.querySelector("#add-ring") as HTMLButtonElement).onclick = () =>
      void this.addTrack((this.root.querySelector("#add-kind") as HTMLSelectElement).value, "new-ring");
    (this.root.querySelector("#add-into") as HTMLButtonElement).onclick = () =>
      void this.addTrack((this.root.querySelector("#add-kind") as HTMLSelectElement).value, "into-last-ring");
    const host = this.root.querySelector("#track-forms") as HTMLElement;
    if (!bindings.length) {
      host.innerHTML = '<p class="muted">No tracks yet: apply a recommendation or add one above.</p>';
      return;
    }
    for (const binding of bindings) {
      host.appendChild(this.trackForm(binding));
    }
  }
}

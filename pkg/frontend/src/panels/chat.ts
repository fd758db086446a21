// Recom Edit Panel: chat input with slash templates and autocomplete,
// dialogue bubbles with config chips, reference lists, regenerate buttons.

import type { Recommendation } from "../api.js";
import { escapeHtml } from "../html.js";
import type { Store } from "../state.js";
import { applySuggestion, expandTemplate, suggest } from "../templates.js";
import { guarded } from "../toast.js";

export class ChatPanel {
  private store: Store;
  private root: HTMLElement;
  private log: HTMLElement;
  private input: HTMLInputElement;
  private suggestions: HTMLElement;
  private onConfigApplied: () => Promise<void>;
  private pendingQueries: string[] = [];

  constructor(store: Store, root: HTMLElement, onConfigApplied: () => Promise<void>) {
    this.store = store;
    this.root = root;
    this.onConfigApplied = onConfigApplied;
    this.root.innerHTML = `
      <h2>Recom Edit</h2>
      <div class="chat-log" id="chat-log"></div>
      <div class="chat-input-row">
        <input id="chat-input" placeholder="Describe the plot, or \\recommend / \\data" autocomplete="off"/>
        <button id="chat-send">Send</button>
      </div>
      <div class="suggestions" id="chat-suggestions"></div>
    `;
    this.log = this.root.querySelector("#chat-log") as HTMLElement;
    this.input = this.root.querySelector("#chat-input") as HTMLInputElement;
    this.suggestions = this.root.querySelector("#chat-suggestions") as HTMLElement;
    (this.root.querySelector("#chat-send") as HTMLButtonElement).onclick = () => void this.send();
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        void this.send();
      }
    });
    this.input.addEventListener("input", () => this.renderSuggestions());
    store.subscribe(() => this.render());
  }

  private renderSuggestions(): void {
    const options = suggest(this.input.value, this.store.state.tokens);
    this.suggestions.innerHTML = "";
    for (const option of options.slice(0, 9)) {
      const chip = document.createElement("button");
      chip.className = "suggestion";
      chip.textContent = option;
      chip.onclick = () => {
        this.input.value = applySuggestion(this.input.value, option);
        this.input.focus();
        this.renderSuggestions();
      };
      this.suggestions.appendChild(chip);
    }
  }

  private async send(): Promise<void> {
    const raw = this.input.value.trim();
    if (!raw) {
      return;
    }
    const query = expandTemplate(raw, {
      config: this.store.config,
      datasets: this.store.state.datasets.map((d) => ({ name: d.name, kind: d.kind })),
    });
    this.input.value = "";
    this.suggestions.innerHTML = "";
    this.pendingQueries.push(query);
    this.render();
    await guarded(async () => {
      await this.store.api.recommend(this.store.state.sessionId, query);
      await this.store.refreshSession();
    });
    this.pendingQueries = this.pendingQueries.filter((q) => q !== query);
    this.render();
  }

  private bubble(rec: Recommendation): HTMLElement {
    const item = document.createElement("div");
    item.className = "bubble model";
    const chip = `<button class="config-chip">${escapeHtml(rec.config) || "(empty)"}</button>`;
    const refs = rec.referenceRecords
      .map((ref) => `<li><code>${ref.id}</code> ${escapeHtml(ref.annotation)}</li>`)
      .join("");
    item.innerHTML = `
      <div class="bubble-query">${escapeHtml(rec.query)}</div>
      <div class="bubble-explanation">${escapeHtml(rec.explanation || rec.raw)}</div>
      <div>${chip}</div>
      <details><summary>${rec.references.length} reference(s)</summary><ul class="refs">${refs}</ul></details>
      <button class="regenerate" data-rec="${rec.id}">Regenerate</button>
    `;
    (item.querySelector(".config-chip") as HTMLButtonElement).onclick = () =>
      void this.applyChip(rec.config);
    (item.querySelector(".regenerate") as HTMLButtonElement).onclick = () =>
      void guarded(async () => {
        await this.store.api.regenerate(rec.id);
        await this.store.refreshSession();
      });
    return item;
  }

  // Applying a chip hands the config to the server and refreshes the plot.
  async applyChip(config: string): Promise<void> {
    await guarded(async () => {
      await this.store.api.putConfig(this.store.state.sessionId, config);
      await this.onConfigApplied();
    });
  }

  render(): void {
    this.log.innerHTML = "";
    for (const rec of this.store.history) {
      this.log.appendChild(this.bubble(rec));
    }
    for (const pending of this.pendingQueries) {
      const item = document.createElement("div");
      item.className = "bubble user";
      item.textContent = pending;
      this.log.appendChild(item);
    }
    this.log.scrollTop = this.log.scrollHeight;
  }
}

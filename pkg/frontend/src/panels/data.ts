// Data Panel: CSV upload, per-dataset preview, color markers, deletion.

import { escapeHtml } from "../html.js";
import type { Store } from "../state.js";
import { guarded, showError } from "../toast.js";

export class DataPanel {
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

  private async upload(kind: string, file: File): Promise<void> {
    const text = await file.text();
    const name = file.name.replace(/\.csv$/i, "");
    const result = await guarded(() => this.store.api.uploadDataset(kind, text, name));
    if (result?.rejected.length) {
      showError(new Error(`${result.id}: ${result.rejected.length} row(s) rejected, e.g. line ${result.rejected[0].line}: ${result.rejected[0].error}`));
    }
    await this.store.refreshDatasets();
  }

  private async preview(id: string, host: HTMLElement): Promise<void> {
    const detail = await guarded(() => this.store.api.getDataset(id));
    if (!detail) {
      return;
    }
    const rows = detail.data.slice(0, 8);
    if (!rows.length) {
      host.innerHTML = '<p class="muted">(no rows)</p>';
      return;
    }
    const columns = Object.keys(rows[0]);
    host.innerHTML = `
      <table class="preview">
        <thead><tr>${columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("")}</tr></thead>
        <tbody>${rows
          .map((row) => `<tr>${columns.map((c) => `<td>${escapeHtml(String(row[c]))}</td>`).join("")}</tr>`)
          .join("")}</tbody>
      </table>
    `;
  }

  render(): void {
    const datasets = this.store.state.datasets;
    this.root.innerHTML = `
      <h2>Data</h2>
      <div class="upload-row">
        <select id="upload-kind">
          <option value="karyotype">karyotype</option>
          <option value="attachment">attachment</option>
          <option value="link">link</option>
        </select>
        <input type="file" id="upload-file" accept=".csv,text/csv"/>
      </div>
      <ul id="dataset-list" class="dataset-list"></ul>
    `;
    const fileInput = this.root.querySelector("#upload-file") as HTMLInputElement;
    fileInput.onchange = () => {
      const kind = (this.root.querySelector("#upload-kind") as HTMLSelectElement).value;
      const file = fileInput.files?.[0];
      if (file) {
        void this.upload(kind, file).then(() => {
          fileInput.value = "";
        });
      }
    };
    const list = this.root.querySelector("#dataset-list") as HTMLElement;
    if (!datasets.length) {
      list.innerHTML = '<p class="muted">Upload a karyotype first, then attachment and link data.</p>';
      return;
    }
    for (const dataset of datasets) {
      const item = document.createElement("li");
      item.className = "dataset";
      item.dataset.dataset = dataset.id;
      item.innerHTML = `
        <span class="marker"><input type="color" value="${dataset.colorMarker ?? "#cccccc"}" title="color marker"/></span>
        <code>${dataset.id}</code> <strong></strong>
        <span class="muted">${dataset.kind} · ${dataset.rows} rows</span>
        <button class="preview-toggle">preview</button>
        <button class="delete-dataset">delete</button>
        <div class="preview-host"></div>
      `;
      (item.querySelector("strong") as HTMLElement).textContent = dataset.name;
      (item.querySelector("input[type=color]") as HTMLInputElement).onchange = (event) =>
        void guarded(async () => {
          await this.store.api.setColorMarker(dataset.id, (event.target as HTMLInputElement).value);
          await this.store.refreshDatasets();
        });
      (item.querySelector(".preview-toggle") as HTMLButtonElement).onclick = () => {
        const host = item.querySelector(".preview-host") as HTMLElement;
        if (host.innerHTML) {
          host.innerHTML = "";
        } else {
          void this.preview(dataset.id, host);
        }
      };
      (item.querySelector(".delete-dataset") as HTMLButtonElement).onclick = () =>
        void guarded(async () => {
          await this.store.api.deleteDataset(dataset.id);
          await this.store.refreshDatasets();
          await this.onMutated();
        });
      list.appendChild(item);
    }
  }
}

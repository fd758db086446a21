// Circos Dashboard: live SVG preview with hover linking. Hovering a track
// highlights it, selects it, and draws guide lines to its Configuration form
// and Data Panel entry.

import type { Store } from "../state.js";
import { guarded } from "../toast.js";

export class DashboardPanel {
  private store: Store;
  private root: HTMLElement;
  private plot: HTMLElement;
  private overlay: SVGSVGElement;

  constructor(store: Store, root: HTMLElement) {
    this.store = store;
    this.root = root;
    this.root.innerHTML = `
      <h2>Circos Dashboard</h2>
      <div class="dashboard-tools">
        <a id="export-svg" download>Export SVG</a>
        <span id="render-hash" class="muted"></span>
      </div>
      <div id="plot" class="plot"></div>
    `;
    this.plot = this.root.querySelector("#plot") as HTMLElement;
    this.overlay = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    this.overlay.id = "guide-overlay";
    document.body.appendChild(this.overlay);
    store.subscribe(() => this.updateChrome());
  }

  private updateChrome(): void {
    const link = this.root.querySelector("#export-svg") as HTMLAnchorElement;
    link.href = this.store.api.exportUrl(this.store.state.sessionId);
    const hash = this.store.state.lastRenderHash;
    (this.root.querySelector("#render-hash") as HTMLElement).textContent = hash ? hash.slice(0, 12) : "";
  }

  async refresh(): Promise<void> {
    await guarded(async () => {
      const svg = await this.store.api.renderSvg(this.store.state.sessionId);
      this.plot.innerHTML = svg;
      const element = this.plot.querySelector("svg");
      if (element) {
        element.removeAttribute("width");
        element.removeAttribute("height");
        this.wireHover(element);
      }
    });
  }

  private wireHover(svg: SVGSVGElement): void {
    for (const group of svg.querySelectorAll<SVGGElement>("g.track")) {
      const ring = Number(group.dataset.ring);
      const pos = Number(group.dataset.pos);
      group.addEventListener("mouseenter", () => {
        group.classList.add("track-hover");
        this.store.select({ ring, pos });
        this.drawGuides(group);
      });
      group.addEventListener("mouseleave", () => {
        group.classList.remove("track-hover");
        this.clearGuides();
      });
    }
  }

  private drawGuides(group: SVGGElement): void {
    this.clearGuides();
    const from = group.getBoundingClientRect();
    const targets = [
      document.querySelector(`#config-panel [data-track="${group.dataset.ring}:${group.dataset.pos}"]`),
      document.querySelector(`#data-panel [data-dataset="${group.dataset.dataset}"]`),
    ];
    for (const target of targets) {
      if (!target) {
        continue;
      }
      const to = target.getBoundingClientRect();
      const line = document.createElementNS("http://www.w3.org/2000/svg", "line");
      line.setAttribute("x1", String(from.left + from.width / 2));
      line.setAttribute("y1", String(from.top + from.height / 2));
      line.setAttribute("x2", String(to.left + to.width / 2));
      line.setAttribute("y2", String(to.top + to.height / 2));
      line.setAttribute("class", "guide-line");
      this.overlay.appendChild(line);
      target.classList.add("guide-target");
    }
  }

  private clearGuides(): void {
    this.overlay.innerHTML = "";
    for (const element of document.querySelectorAll(".guide-target")) {
      element.classList.remove("guide-target");
    }
  }
}

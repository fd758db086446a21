// Reference Panel: the merged configuration DAG as a node-link flow diagram.
// Geometry comes from the server layout; edge width encodes weight, the
// exact count sits above each edge, and classes color current (green),
// recommended (blue), and other (gray) edges. Hovering a node highlights
// every start-to-end path through it; clicking completes the configuration.

import type { DagView } from "../api.js";
import {
  EDGE_COLORS,
  TOKEN_COLORS,
  diagramSize,
  edgeKey,
  edgeWidth,
  edgesThroughNode,
  placeNodes,
} from "../dagview.js";
import type { Store } from "../state.js";
import { guarded } from "../toast.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class ReferencePanel {
  private store: Store;
  private root: HTMLElement;
  private host: HTMLElement;
  private scope: "retrieved" | "corpus" = "retrieved";
  private view: DagView | null = null;
  private onMutated: () => Promise<void>;

  constructor(store: Store, root: HTMLElement, onMutated: () => Promise<void>) {
    this.store = store;
    this.root = root;
    this.onMutated = onMutated;
    this.root.innerHTML = `
      <h2>Reference</h2>
      <div class="reference-tools">
        <label><input type="radio" name="dag-scope" value="retrieved" checked/> similar</label>
        <label><input type="radio" name="dag-scope" value="corpus"/> whole corpus</label>
        <span id="dag-truncated" class="muted"></span>
      </div>
      <div id="dag-host" class="dag-host"></div>
    `;
    this.host = this.root.querySelector("#dag-host") as HTMLElement;
    for (const radio of this.root.querySelectorAll<HTMLInputElement>("input[name=dag-scope]")) {
      radio.onchange = () => {
        this.scope = radio.value as "retrieved" | "corpus";
        void this.refresh();
      };
    }
  }

  async refresh(): Promise<void> {
    await guarded(async () => {
      this.view = await this.store.api.getDag(this.store.state.sessionId, this.scope);
      this.render();
    });
  }

  private render(): void {
    const view = this.view;
    this.host.innerHTML = "";
    (this.root.querySelector("#dag-truncated") as HTMLElement).textContent = view?.truncated
      ? "(truncated to the first 500 configurations)"
      : "";
    if (!view || !view.nodes.length) {
      this.host.innerHTML = '<p class="muted">No reference configurations yet.</p>';
      return;
    }
    const placed = placeNodes(view);
    const { width, height } = diagramSize(view);
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    svg.setAttribute("class", "dag");

    const edgeElements = new Map<string, SVGElement>();
    for (const edge of view.edges) {
      const from = placed.get(edge.from)!;
      const to = placed.get(edge.to)!;
      const group = document.createElementNS(SVG_NS, "g");
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.px));
      line.setAttribute("y1", String(from.py));
      line.setAttribute("x2", String(to.px));
      line.setAttribute("y2", String(to.py));
      line.setAttribute("stroke", EDGE_COLORS[edge.class]);
      line.setAttribute("stroke-width", String(edgeWidth(edge.weight)));
      line.setAttribute("class", `dag-edge dag-edge-${edge.class}`);
      group.appendChild(line);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((from.px + to.px) / 2));
      label.setAttribute("y", String((from.py + to.py) / 2 - 6));
      label.setAttribute("class", "dag-edge-count");
      label.textContent = String(edge.weight);
      group.appendChild(label);
      svg.appendChild(group);
      edgeElements.set(edgeKey(edge), group);
    }

    for (const node of placed.values()) {
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("class", "dag-node");
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(node.px));
      circle.setAttribute("cy", String(node.py));
      circle.setAttribute("r", "14");
      circle.setAttribute("fill", TOKEN_COLORS[node.token] ?? "#777");
      group.appendChild(circle);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(node.px));
      label.setAttribute("y", String(node.py + 26));
      label.setAttribute("class", "dag-node-label");
      label.textContent = node.token;
      group.appendChild(label);

      group.addEventListener("mouseenter", () => {
        this.store.state.hoveredDagNode = node.id;
        const marked = edgesThroughNode(this.view!, node.id);
        for (const [key, element] of edgeElements) {
          element.classList.toggle("dag-dim", !marked.has(key));
        }
      });
      group.addEventListener("mouseleave", () => {
        this.store.state.hoveredDagNode = null;
        for (const element of edgeElements.values()) {
          element.classList.remove("dag-dim");
        }
      });
      group.addEventListener("click", () => void this.complete(node.id));
      svg.appendChild(group);
    }
    this.host.appendChild(svg);
  }

  // Clicking a node builds the start-to-node configuration server-side and
  // applies it to the session.
  private async complete(nodeId: string): Promise<void> {
    await guarded(async () => {
      await this.store.api.completeDagPath(this.store.state.sessionId, nodeId, this.scope);
      await this.onMutated();
    });
  }
}

"""Merged reference DAG over configurations, with layered layout.

Every configuration contributes its boundary-wrapped token walk; nodes are
merged positionally by (token, depth), which keeps the graph acyclic while
still collapsing shared structure, and parallel edges accumulate weight.
Layout is layered by depth with barycenter crossing reduction; path
completion turns a clicked node into a full configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import END, SPLIT, START, CircosConfig, from_sequence, wrapped_sequence

__all__ = [
    "DagNode",
    "DagEdge",
    "ReferenceDag",
    "DagLayout",
    "EmptyInputError",
    "NodeNotFoundError",
    "UnreachableError",
    "build",
    "layout",
    "classify_edges",
    "complete_path",
    "count_crossings",
    "to_json",
    "to_dot",
]

EDGE_CURRENT = "current"
EDGE_RECOMMENDED = "recommended"
EDGE_OTHER = "other"


class EmptyInputError(ValueError):
    def __init__(self) -> None:
        super().__init__("at least one configuration is required")


class NodeNotFoundError(KeyError):
    def __init__(self, node_id: str):
        super().__init__(node_id)
        self.node_id = node_id

    def __str__(self) -> str:
        return f"no node {self.node_id!r} in the DAG"


class UnreachableError(RuntimeError):
    def __init__(self, node_id: str):
        super().__init__(f"node {node_id!r} is not reachable from <start>")
        self.node_id = node_id


def node_id(token: str, depth: int) -> str:
    return f"{token}@{depth}"


@dataclass(frozen=True)
class DagNode:
    id: str
    token: str
    depth: int


@dataclass
class DagEdge:
    src: str
    dst: str
    weight: int = 0
    cls: str = EDGE_OTHER
    sources: list[str] = field(default_factory=list)  # contributing config ids


@dataclass
class ReferenceDag:
    nodes: dict[str, DagNode] = field(default_factory=dict)  # insertion order = input order
    edges: dict[tuple[str, str], DagEdge] = field(default_factory=dict)
    node_sources: dict[str, list[str]] = field(default_factory=dict)

    @property
    def depth_count(self) -> int:
        return 1 + max(node.depth for node in self.nodes.values())

    def out_edges(self, node: str) -> list[DagEdge]:
        return [edge for edge in self.edges.values() if edge.src == node]

    def in_edges(self, node: str) -> list[DagEdge]:
        return [edge for edge in self.edges.values() if edge.dst == node]

    def layers(self) -> list[list[str]]:
        """Node ids grouped by depth, input order within each layer."""
        out: list[list[str]] = [[] for _ in range(self.depth_count)]
        for node in self.nodes.values():
            out[node.depth].append(node.id)
        return out


@dataclass
class DagLayout:
    layers: list[list[str]]  # final within-layer order
    positions: dict[str, tuple[int, float]]  # node id -> (layer, x)
    crossings: int


def build(configs: list[tuple[str, CircosConfig]]) -> ReferenceDag:
    """Merge each config's wrapped token walk into one weighted DAG."""
    if not configs:
        raise EmptyInputError()
    dag = ReferenceDag()
    for config_id, config in configs:
        walk = wrapped_sequence(config)
        ids = [node_id(token, depth) for depth, token in enumerate(walk)]
        for depth, (token, nid) in enumerate(zip(walk, ids)):
            if nid not in dag.nodes:
                dag.nodes[nid] = DagNode(id=nid, token=token, depth=depth)
                dag.node_sources[nid] = []
            dag.node_sources[nid].append(config_id)
        for src, dst in zip(ids, ids[1:]):
            edge = dag.edges.get((src, dst))
            if edge is None:
                edge = DagEdge(src=src, dst=dst)
                dag.edges[(src, dst)] = edge
            edge.weight += 1
            edge.sources.append(config_id)
    return dag


def count_crossings(dag: ReferenceDag, layers: list[list[str]]) -> int:
    """Brute-force pair scan over every adjacent layer."""
    position = {nid: x for layer in layers for x, nid in enumerate(layer)}
    total = 0
    by_layer: list[list[DagEdge]] = [[] for _ in range(len(layers))]
    for edge in dag.edges.values():
        by_layer[dag.nodes[edge.src].depth].append(edge)
    for edges in by_layer:
        for i in range(len(edges)):
            for j in range(i + 1, len(edges)):
                a, b = edges[i], edges[j]
                if (position[a.src] - position[b.src]) * (position[a.dst] - position[b.dst]) < 0:
                    total += 1
    return total


def _first_source(dag: ReferenceDag, nid: str) -> str:
    sources = dag.node_sources.get(nid)
    return sources[0] if sources else ""


def _barycenter_pass(dag: ReferenceDag, layers: list[list[str]], downward: bool) -> list[list[str]]:
    layers = [list(layer) for layer in layers]
    indices = range(1, len(layers)) if downward else range(len(layers) - 2, -1, -1)
    for depth in indices:
        fixed = layers[depth - 1] if downward else layers[depth + 1]
        fixed_pos = {nid: x for x, nid in enumerate(fixed)}
        current_pos = {nid: x for x, nid in enumerate(layers[depth])}

        def barycenter(nid: str) -> float:
            edges = dag.in_edges(nid) if downward else dag.out_edges(nid)
            neighbors = [edge.src if downward else edge.dst for edge in edges]
            if not neighbors:
                return float(current_pos[nid])
            return sum(fixed_pos[n] for n in neighbors) / len(neighbors)

        layers[depth].sort(key=lambda nid: (barycenter(nid), dag.nodes[nid].token, _first_source(dag, nid)))
    return layers


def layout(dag: ReferenceDag, max_sweeps: int = 8) -> DagLayout:
    """Layer = depth; order layers by repeated barycenter sweeps.

    The best ordering seen (including the initial input order) is kept, so
    the final crossing count never exceeds the initial one.
    """
    best = dag.layers()
    best_crossings = count_crossings(dag, best)
    current = best
    for _ in range(max_sweeps):
        if best_crossings == 0:
            break
        current = _barycenter_pass(dag, current, downward=True)
        current = _barycenter_pass(dag, current, downward=False)
        crossings = count_crossings(dag, current)
        if crossings < best_crossings:
            best, best_crossings = current, crossings
        else:
            break
    positions = {nid: (depth, float(x)) for depth, layer in enumerate(best) for x, nid in enumerate(layer)}
    return DagLayout(layers=best, positions=positions, crossings=best_crossings)


def _path_edges(dag: ReferenceDag, config: CircosConfig | None) -> set[tuple[str, str]]:
    if config is None:
        return set()
    walk = wrapped_sequence(config)
    pairs = set()
    for depth in range(len(walk) - 1):
        pair = (node_id(walk[depth], depth), node_id(walk[depth + 1], depth + 1))
        if pair in dag.edges:
            pairs.add(pair)
    return pairs


def classify_edges(
    dag: ReferenceDag,
    current: CircosConfig | None = None,
    recommended: CircosConfig | None = None,
) -> ReferenceDag:
    """Mark each edge current/recommended/other; current wins overlaps."""
    current_edges = _path_edges(dag, current)
    recommended_edges = _path_edges(dag, recommended)
    for key, edge in dag.edges.items():
        if key in current_edges:
            edge.cls = EDGE_CURRENT
        elif key in recommended_edges:
            edge.cls = EDGE_RECOMMENDED
        else:
            edge.cls = EDGE_OTHER
    return dag


def _reachable_to(dag: ReferenceDag, target: str) -> set[str]:
    """Nodes from which target can be reached (including target)."""
    incoming: dict[str, list[str]] = {}
    for src, dst in dag.edges:
        incoming.setdefault(dst, []).append(src)
    seen = {target}
    stack = [target]
    while stack:
        nid = stack.pop()
        for src in incoming.get(nid, ()):
            if src not in seen:
                seen.add(src)
                stack.append(src)
    return seen


def complete_path(
    dag: ReferenceDag,
    clicked: str,
    current: CircosConfig | None = None,
    recommended: CircosConfig | None = None,
) -> CircosConfig:
    """Construct the config for the start->clicked path.

    At each depth the edge is chosen by: current-config edge if it can still
    reach the clicked node, else recommended edge, else the reachable edge
    of maximum weight, ties by token name. Clicking a node short of <end>
    yields the configuration up to that node.
    """
    if clicked not in dag.nodes:
        raise NodeNotFoundError(clicked)
    reachable = _reachable_to(dag, clicked)
    start_id = node_id(START, 0)
    if start_id not in dag.nodes or start_id not in reachable:
        raise UnreachableError(clicked)

    current_edges = _path_edges(dag, current)
    recommended_edges = _path_edges(dag, recommended)

    tokens: list[str] = []
    node = start_id
    while node != clicked:
        candidates = [edge for edge in dag.out_edges(node) if edge.dst in reachable]
        if not candidates:  # cannot happen for nodes produced by build
            raise UnreachableError(clicked)
        on_current = [e for e in candidates if (e.src, e.dst) in current_edges]
        on_recommended = [e for e in candidates if (e.src, e.dst) in recommended_edges]
        if on_current:
            chosen = on_current[0]
        elif on_recommended:
            chosen = on_recommended[0]
        else:
            chosen = sorted(candidates, key=lambda e: (-e.weight, dag.nodes[e.dst].token))[0]
        node = chosen.dst
        tokens.append(dag.nodes[node].token)

    if tokens and tokens[-1] == END:
        tokens.pop()
    while tokens and tokens[-1] == SPLIT:  # clicking a separator ends the ring before it
        tokens.pop()
    return from_sequence(tokens)


def to_json(dag: ReferenceDag, dag_layout: DagLayout | None = None) -> dict:
    if dag_layout is None:
        dag_layout = layout(dag)
    nodes = []
    for layer_index, layer in enumerate(dag_layout.layers):
        for nid in layer:
            node = dag.nodes[nid]
            _, x = dag_layout.positions[nid]
            nodes.append({"id": node.id, "token": node.token, "depth": node.depth, "layer": layer_index, "x": x})
    edges = [
        {"from": edge.src, "to": edge.dst, "weight": edge.weight, "class": edge.cls}
        for edge in dag.edges.values()
    ]
    return {"nodes": nodes, "edges": edges}


def to_dot(dag: ReferenceDag) -> str:
    lines = ["digraph reference {", "  rankdir=LR;"]
    for node in dag.nodes.values():
        lines.append(f'  "{node.id}" [label="{node.token}"];')
    for edge in dag.edges.values():
        lines.append(f'  "{edge.src}" -> "{edge.dst}" [label="{edge.weight}", class="{edge.cls}"];')
    lines.append("}")
    return "\n".join(lines)

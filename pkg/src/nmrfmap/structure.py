"""Signed-topology analysis: blocks, frustration, and tractability classes.

A binary pairwise model is solvable by the stable-set pipeline exactly when
every block of its signed graph is one of three shapes: repulsive-bipartite
(BR), triangles on a repulsive base (T), or mixed triangles on an
associative base (U). Classification runs in linear time and produces a
certificate: a bipartition, structure parameters, or a witness frustrated
cycle, together with a per-edge enode-form plan for the compiler.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import (
    ASSOCIATIVE,
    DEFAULT_EPS,
    Model,
    REPULSIVE,
    SignedGraph,
    signed_view,
)


@dataclass(frozen=True)
class Block:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class BlockTree:
    blocks: tuple[Block, ...]
    cut_vertices: frozenset[int]


@dataclass(frozen=True)
class BlockClass:
    kind: str  # "BR" | "T" | "U" | "INTRACTABLE"
    params: dict
    witness: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class TractabilityReport:
    tractable: bool
    graph: SignedGraph
    tree: BlockTree
    classes: tuple[BlockClass, ...]
    plan: dict[tuple[int, int], tuple[int, int]]


def block_decompose(graph: SignedGraph) -> BlockTree:
    """Split into maximal 2-connected blocks and bridges (iterative lowpoint DFS)."""
    n = graph.n
    edges = graph.edges
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (u, v, _) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))

    disc = [-1] * n
    low = [0] * n
    timer = 0
    edge_stack: list[int] = []
    block_edge_ids: list[list[int]] = []
    blocks: list[Block] = []

    for root in range(n):
        if disc[root] != -1:
            continue
        if not adj[root]:
            blocks.append(Block((root,), ()))
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack_v = [root]
        stack_pe = [-1]
        stack_i = [0]
        while stack_v:
            v = stack_v[-1]
            adj_v = adj[v]
            i = stack_i[-1]
            pe_v = stack_pe[-1]
            deg = len(adj_v)
            advanced = False
            while i < deg:
                w, eid = adj_v[i]
                i += 1
                if eid == pe_v:
                    continue
                if disc[w] == -1:
                    edge_stack.append(eid)
                    disc[w] = low[w] = timer
                    timer += 1
                    stack_i[-1] = i
                    stack_v.append(w)
                    stack_pe.append(eid)
                    stack_i.append(0)
                    advanced = True
                    break
                dw = disc[w]
                if dw < disc[v]:
                    edge_stack.append(eid)
                    if dw < low[v]:
                        low[v] = dw
            if advanced:
                continue
            stack_v.pop()
            pe = stack_pe.pop()
            stack_i.pop()
            if stack_v:
                u = stack_v[-1]
                lv = low[v]
                if lv < low[u]:
                    low[u] = lv
                if lv >= disc[u]:
                    comp = []
                    while True:
                        eid = edge_stack.pop()
                        comp.append(eid)
                        if eid == pe:
                            break
                    block_edge_ids.append(comp)

    seen_in = [0] * n
    for comp in block_edge_ids:
        verts: list[int] = []
        for eid in comp:
            u, v, _ = edges[eid]
            for x in (u, v):
                if seen_in[x] != len(blocks) + 1:
                    seen_in[x] = len(blocks) + 1
                    verts.append(x)
        blocks.append(Block(tuple(sorted(verts)), tuple(edges[e] for e in comp)))

    count = [0] * n
    for b in blocks:
        for v in b.vertices:
            count[v] += 1
    cut = frozenset(v for v in range(n) if count[v] >= 2)
    return BlockTree(tuple(blocks), cut)


def _signed_two_color(vertices, edges):
    """Color so repulsive edges cross and associative edges do not.

    Returns (side map, None) on success, else (None, conflict cycle as a
    vertex list). Success is equivalent to the absence of frustrated cycles
    and to the BR property.
    """
    nbr: dict[int, list[tuple[int, int]]] = {v: [] for v in vertices}
    for u, v, s in edges:
        nbr[u].append((v, s))
        nbr[v].append((u, s))
    side: dict[int, int] = {}
    parent: dict[int, Optional[int]] = {}
    for start in vertices:
        if start in side:
            continue
        side[start] = 0
        parent[start] = None
        queue = [start]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            su = side[u]
            for w, sign in nbr[u]:
                want = su ^ (1 if sign == REPULSIVE else 0)
                have = side.get(w)
                if have is None:
                    side[w] = want
                    parent[w] = u
                    queue.append(w)
                elif have != want:
                    return None, _conflict_cycle(parent, u, w)
    return side, None


def _conflict_cycle(parent, u, v):
    anc = {}
    x = u
    pos = 0
    while x is not None:
        anc[x] = pos
        pos += 1
        x = parent[x]
    path_v = [v]
    x = v
    while x not in anc:
        x = parent[x]
        path_v.append(x)
    lca = x
    path_u = []
    x = u
    while x != lca:
        path_u.append(x)
        x = parent[x]
    # u ... lca ... v, closed by the conflict edge (v, u)
    return tuple(path_u + [lca] + list(reversed(path_v[:-1])))


def find_frustrated_cycle(graph: SignedGraph):
    """Some cycle with an odd number of repulsive edges, or None."""
    _, cycle = _signed_two_color(range(graph.n), graph.edges)
    return cycle


def detect_BR(graph: SignedGraph):
    """Bipartition witnessing the BR property, or None."""
    side, _ = _signed_two_color(range(graph.n), graph.edges)
    if side is None:
        return None
    v1 = tuple(v for v in range(graph.n) if side[v] == 0)
    v2 = tuple(v for v in range(graph.n) if side[v] == 1)
    return v1, v2


def classify_block(block: Block) -> BlockClass:
    if len(block.vertices) == 1:
        return BlockClass("BR", {"V1": block.vertices, "V2": ()})
    if len(block.vertices) == 2:
        u, v, s = block.edges[0]
        lo, hi = (u, v) if u < v else (v, u)
        if s == REPULSIVE:
            return BlockClass("BR", {"V1": (lo,), "V2": (hi,)})
        return BlockClass("BR", {"V1": (lo, hi), "V2": ()})
    if len(block.vertices) == 3 and len(block.edges) == 3:
        rep = [(u, v) for u, v, s in block.edges if s == REPULSIVE]
        if len(rep) % 2 == 1:
            # frustrated triangle: tractable via the base/spoke shapes
            if len(rep) == 3:
                s, t, r = sorted(block.vertices)
                return BlockClass(
                    "T", {"s": s, "t": t, "r": (r,), "a": (), "m": 1, "n": 0}
                )
            # one repulsive edge: a U_1 triangle (equivalently T_{0,1})
            v = min(rep[0])
            s, t = sorted(x for x in block.vertices if x != v)
            return BlockClass("U", {"s": s, "t": t, "v": (v,), "n": 1})
        # balanced triangle: two-color it directly
        side = {}
        a, b, sign_ab = block.edges[0]
        side[a] = 0
        side[b] = 1 if sign_ab == REPULSIVE else 0
        c = next(x for x in block.vertices if x not in side)
        for u, v, s in block.edges[1:]:
            if c in (u, v):
                other = v if u == c else u
                side[c] = side[other] ^ (1 if s == REPULSIVE else 0)
                break
        v1 = tuple(v for v in block.vertices if side[v] == 0)
        v2 = tuple(v for v in block.vertices if side[v] == 1)
        return BlockClass("BR", {"V1": v1, "V2": v2})

    side, cycle = _signed_two_color(block.vertices, block.edges)
    if side is not None:
        v1 = tuple(v for v in block.vertices if side[v] == 0)
        v2 = tuple(v for v in block.vertices if side[v] == 1)
        return BlockClass("BR", {"V1": v1, "V2": v2})

    nbr: dict[int, dict[int, int]] = {v: {} for v in block.vertices}
    for u, v, s in block.edges:
        nbr[u][v] = s
        nbr[v][u] = s

    hubs = [v for v in block.vertices if len(nbr[v]) >= 3]
    if len(hubs) == 2:
        s, t = sorted(hubs)
        base_sign = nbr[s].get(t)
        others = [v for v in block.vertices if v != s and v != t]
        spokes_ok = base_sign is not None and all(
            len(nbr[v]) == 2 and set(nbr[v]) == {s, t} for v in others
        )
        if spokes_ok and base_sign == REPULSIVE:
            r = tuple(
                v for v in others
                if nbr[v][s] == REPULSIVE and nbr[v][t] == REPULSIVE
            )
            a = tuple(
                v for v in others
                if nbr[v][s] == ASSOCIATIVE and nbr[v][t] == ASSOCIATIVE
            )
            if len(r) + len(a) == len(others):
                return BlockClass(
                    "T", {"s": s, "t": t, "r": r, "a": a, "m": len(r), "n": len(a)}
                )
        elif spokes_ok and base_sign == ASSOCIATIVE:
            if all(nbr[v][s] != nbr[v][t] for v in others):
                return BlockClass(
                    "U", {"s": s, "t": t, "v": tuple(others), "n": len(others)}
                )
    return BlockClass("INTRACTABLE", {}, witness=cycle)


def _spoke_form(hub, hub_val, spoke, sign):
    # For a triangle on a base enode, the spoke enode must disagree with the
    # base on the hub; its own end then follows from the edge sign.
    v_hub = 1 - hub_val
    v_spoke = v_hub if sign == ASSOCIATIVE else hub_val
    return {hub: v_hub, spoke: v_spoke}


def _block_plan(block: Block, cls: BlockClass):
    plan = {}
    if cls.kind == "BR":
        side = {v: 0 for v in cls.params["V1"]}
        side.update({v: 1 for v in cls.params["V2"]})
        for u, v, s in block.edges:
            key = (u, v) if u < v else (v, u)
            if s == ASSOCIATIVE:
                plan[key] = (0, 0)
            else:
                lo, hi = key
                plan[key] = (0, 1) if side[lo] == 0 else (1, 0)
        return plan

    if cls.kind in ("T", "U"):
        s, t = cls.params["s"], cls.params["t"]
        base_vals = {s: 0, t: 1} if cls.kind == "T" else {s: 0, t: 0}
        for u, v, sign in block.edges:
            key = (u, v) if u < v else (v, u)
            if {u, v} == {s, t}:
                vals = base_vals
            else:
                hub, spoke = (u, v) if u in (s, t) else (v, u)
                vals = _spoke_form(hub, base_vals[hub], spoke, sign)
            plan[key] = (vals[key[0]], vals[key[1]])
        return plan

    # Intractable blocks keep the default forms so diagnostics stay buildable.
    for u, v, s in block.edges:
        key = (u, v) if u < v else (v, u)
        plan[key] = (0, 0) if s == ASSOCIATIVE else (0, 1)
    return plan


def classify_model(model: Model, eps: float = DEFAULT_EPS) -> TractabilityReport:
    """Per-block classification, overall verdict, and the enode-form plan."""
    graph = signed_view(model, eps)
    return classify_graph(graph)


def classify_graph(graph: SignedGraph) -> TractabilityReport:
    tree = block_decompose(graph)
    classes = tuple(classify_block(b) for b in tree.blocks)
    plan: dict[tuple[int, int], tuple[int, int]] = {}
    for block, cls in zip(tree.blocks, classes):
        plan.update(_block_plan(block, cls))
    tractable = all(c.kind != "INTRACTABLE" for c in classes)
    return TractabilityReport(tractable, graph, tree, classes, plan)


def report_to_json(report: TractabilityReport) -> dict:
    names = report.graph.names

    def nm(vs):
        return [names[v] for v in vs]

    blocks = []
    for block, cls in zip(report.tree.blocks, report.classes):
        entry = {"vertices": nm(block.vertices), "class": cls.kind}
        params = {}
        for key, val in cls.params.items():
            if isinstance(val, tuple):
                params[key] = nm(val)
            elif isinstance(val, int) and key in ("s", "t"):
                params[key] = names[val]
            else:
                params[key] = val
        entry["params"] = params
        if cls.witness is not None:
            entry["witness"] = nm(cls.witness)
        blocks.append(entry)
    plan = [
        {"edge": [names[u], names[v]], "form": f"{a}{b}"}
        for (u, v), (a, b) in sorted(report.plan.items())
    ]
    return {
        "tractable": report.tractable,
        "blocks": blocks,
        "enode_plan": plan,
        "cut_vertices": nm(sorted(report.tree.cut_vertices)),
    }


def plan_by_names(report: TractabilityReport) -> dict[tuple[str, str], tuple[int, int]]:
    """Enode plan keyed by variable names in declaration order."""
    names = report.graph.names
    return {(names[u], names[v]): form for (u, v), form in report.plan.items()}

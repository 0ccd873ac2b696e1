"""Stable-set solvers and the end-to-end MAP pipeline.

Two exact solvers operate on pruned NMRFs: a bipartite specialization via
max-flow minimum weighted vertex cover, and a branch-and-bound search for
the small non-bipartite blocks. `solve_map` classifies the topology, solves
each block conditioned on the labels of its parent cut vertex, and combines
block maxima over the block tree.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import (
    InconsistentCompletionError,
    IntractableTopologyError,
    NotBipartiteError,
    ObjectiveMismatchError,
    TooLargeError,
)
from .model import (
    ASSOCIATIVE,
    DEFAULT_EPS,
    Model,
    Potential,
    REPULSIVE,
    SignedGraph,
    associativity,
    energy,
    require_binary_pairwise,
)
from .nmrf import Nmrf, PrunedNmrf, apply_enode_plan, build_nmrf, prune
from .structure import classify_graph

DEFAULT_BNB_CAP = 40


@dataclass(frozen=True)
class StableSetSolution:
    nodes: tuple[int, ...]
    weight: float


@dataclass(frozen=True)
class MapSolution:
    assignment: dict[str, int]
    objective: float
    method: str


def map_solution_to_json(sol: MapSolution) -> dict:
    return {
        "assignment": dict(sol.assignment),
        "objective": sol.objective,
        "method": sol.method,
    }


# ---------------------------------------------------------------------------
# bipartite solver: minimum weighted vertex cover via max flow


class _Dinic:
    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[float] = []
        self.head: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: float):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0.0)

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        queue = [s]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for eid in self.head[u]:
                v = self.to[eid]
                if self.cap[eid] > 1e-12 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        self.level = level
        return level[t] >= 0

    def _dfs(self, u, t, f, it):
        if u == t:
            return f
        while it[u] < len(self.head[u]):
            eid = self.head[u][it[u]]
            v = self.to[eid]
            if self.cap[eid] > 1e-12 and self.level[v] == self.level[u] + 1:
                pushed = self._dfs(v, t, min(f, self.cap[eid]), it)
                if pushed > 0:
                    self.cap[eid] -= pushed
                    self.cap[eid ^ 1] += pushed
                    return pushed
            it[u] += 1
        return 0.0

    def max_flow(self, s, t):
        flow = 0.0
        while self._bfs(s, t):
            it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, math.inf, it)
                if pushed <= 0:
                    break
                flow += pushed
        return flow

    def reachable(self, s):
        seen = {s}
        queue = [s]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for eid in self.head[u]:
                v = self.to[eid]
                if self.cap[eid] > 1e-12 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def two_color(n: int, edges) -> Optional[list[int]]:
    """BFS two-coloring; None if not bipartite."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    side = [-1] * n
    for start in range(n):
        if side[start] >= 0:
            continue
        side[start] = 0
        queue = [start]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for v in adj[u]:
                if side[v] < 0:
                    side[v] = side[u] ^ 1
                    queue.append(v)
                elif side[v] == side[u]:
                    return None
    return side


def mwss_bipartite(
    weights: Sequence[float], edges, sides: Sequence[int]
) -> StableSetSolution:
    """Exact MWSS on a bipartite weighted graph via the canonical min cut."""
    n = len(weights)
    for u, v in edges:
        if sides[u] == sides[v]:
            raise NotBipartiteError(f"edge ({u}, {v}) joins two side-{sides[u]} nodes")
    src, sink = n, n + 1
    flow = _Dinic(n + 2)
    for i, w in enumerate(weights):
        if sides[i] == 0:
            flow.add(src, i, w)
        else:
            flow.add(i, sink, w)
    for u, v in edges:
        if sides[u] == 1:
            u, v = v, u
        flow.add(u, v, math.inf)
    flow.max_flow(src, sink)
    reach = flow.reachable(src)
    chosen = tuple(
        i
        for i in range(n)
        if (sides[i] == 0 and i in reach) or (sides[i] == 1 and i not in reach)
    )
    return StableSetSolution(chosen, sum(weights[i] for i in chosen))


# ---------------------------------------------------------------------------
# general exact solver


def mwss_branch_bound(
    weights: Sequence[float], edges, max_nodes: int = DEFAULT_BNB_CAP
) -> StableSetSolution:
    """Exact MWSS by branch and bound on the max-degree vertex."""
    n = len(weights)
    if n > max_nodes:
        raise TooLargeError(f"{n} nodes exceeds branch-and-bound cap {max_nodes}")
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u

    best_weight = -1.0
    best_mask = 0

    def remaining_weight(mask):
        total = 0.0
        while mask:
            lsb = mask & -mask
            total += weights[lsb.bit_length() - 1]
            mask ^= lsb
        return total

    stack = [((1 << n) - 1, 0, 0.0)]
    while stack:
        mask, taken, cur = stack.pop()
        # absorb isolated vertices of the remaining subgraph
        m = mask
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            m ^= lsb
            if adj[i] & mask == 0:
                taken |= lsb
                cur += weights[i]
                mask ^= lsb
        if mask == 0:
            if cur > best_weight:
                best_weight = cur
                best_mask = taken
            continue
        if cur + remaining_weight(mask) <= best_weight:
            continue
        # branch on the max-degree vertex (ties to the lowest id)
        branch, branch_deg = -1, -1
        m = mask
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            m ^= lsb
            d = (adj[i] & mask).bit_count()
            if d > branch_deg:
                branch, branch_deg = i, d
        bbit = 1 << branch
        stack.append((mask ^ bbit, taken, cur))  # exclude
        stack.append(
            (mask & ~(adj[branch] | bbit), taken | bbit, cur + weights[branch])
        )  # include

    chosen = tuple(i for i in range(n) if best_mask >> i & 1)
    return StableSetSolution(chosen, sum(weights[i] for i in chosen))


# ---------------------------------------------------------------------------
# completion and decoding


def mmwss_complete(pruned: PrunedNmrf, base: StableSetSolution) -> StableSetSolution:
    """Extend a MWSS of the pruned graph to one node per clique group."""
    nodes = pruned.base.nodes
    assignment: dict[str, int] = {}
    represented: set[tuple[str, ...]] = set()
    selected = list(base.nodes)
    for nid in selected:
        node = nodes[nid]
        represented.add(node.scope)
        assignment.update(node.assignment_map())
    for scope, ids in pruned.base.groups.items():
        if scope in represented:
            continue
        for nid in ids:
            node = nodes[nid]
            if all(
                assignment.get(name, val) == val
                for name, val in zip(scope, node.assignment)
            ):
                selected.append(nid)
                represented.add(scope)
                assignment.update(node.assignment_map())
                break
        else:
            raise InconsistentCompletionError(f"no consistent node for group {scope}")
    selected.sort()
    return StableSetSolution(tuple(selected), sum(nodes[i].weight for i in selected))


def decode_map(
    mmwss: StableSetSolution, nmrf: Nmrf, model: Model, eps: float = DEFAULT_EPS
) -> MapSolution:
    """Read the MAP assignment off the singleton nodes and verify the objective."""
    assignment: dict[str, int] = {}
    for nid in mmwss.nodes:
        node = nmrf.nodes[nid]
        if len(node.scope) == 1:
            assignment[node.scope[0]] = node.assignment[0]
    missing = [name for name, _ in model.variables if name not in assignment]
    if missing:
        raise InconsistentCompletionError(f"no singleton node selected for {missing}")
    objective = energy(model, assignment)
    reconstructed = mmwss.weight + nmrf.constant
    scale = max(1.0, abs(objective), abs(reconstructed))
    if abs(objective - reconstructed) > max(eps, 1e-9) * scale * 100:
        raise ObjectiveMismatchError(
            f"objective {objective!r} != weight+constants {reconstructed!r}"
        )
    return MapSolution(assignment, objective, "decode")


# ---------------------------------------------------------------------------
# pairwise canonical form


@dataclass
class _Pairwise:
    names: tuple[str, ...]
    singles: dict[int, tuple[float, float]]
    edges: dict[tuple[int, int], tuple[float, float, float, float]]
    constant: float


def _canonicalize(model: Model, eps: float) -> _Pairwise:
    index = model.index
    singles: dict[int, tuple[float, float]] = {}
    edges: dict[tuple[int, int], tuple[float, float, float, float]] = {}
    constant = 0.0
    for p in model.potentials:
        if len(p.scope) == 1:
            i = index[p.scope[0]]
            s0, s1 = singles.get(i, (0.0, 0.0))
            singles[i] = (s0 + p.table[0], s1 + p.table[1])
            continue
        t00, t01, t10, t11 = p.table
        a = t00 + t11 - t01 - t10
        u, v = index[p.scope[0]], index[p.scope[1]]
        if abs(a) <= eps:
            # Near-zero associativity: fold the separable part into the
            # endpoints; the dropped interaction residual is at most eps/4
            # per configuration.
            c = (t00 + t01 + t10 + t11) / 4.0
            fu = ((t00 + t01) / 2.0 - c, (t10 + t11) / 2.0 - c)
            fv = ((t00 + t10) / 2.0 - c, (t01 + t11) / 2.0 - c)
            s = singles.get(u, (0.0, 0.0))
            singles[u] = (s[0] + fu[0], s[1] + fu[1])
            s = singles.get(v, (0.0, 0.0))
            singles[v] = (s[0] + fv[0], s[1] + fv[1])
            constant += c
        else:
            edges[(u, v)] = (t00, t01, t10, t11)
    return _Pairwise(model.names, singles, edges, constant)


def _pw_signed_graph(pw: _Pairwise) -> SignedGraph:
    sg_edges = tuple(
        (u, v, ASSOCIATIVE if associativity(t) > 0 else REPULSIVE)
        for (u, v), t in pw.edges.items()
    )
    return SignedGraph(pw.names, sg_edges)


# ---------------------------------------------------------------------------
# block-tree conditioning


def _solve_pruned(pruned: PrunedNmrf, bipartite: bool, max_nodes: int) -> float:
    weights, edges, _ = pruned.subgraph()
    if not weights:
        return pruned.base.constant
    if bipartite:
        sides = two_color(len(weights), edges)
        if sides is None:
            raise NotBipartiteError("pruned block NMRF is not bipartite")
        sol = mwss_bipartite(weights, edges, sides)
    else:
        sol = mwss_branch_bound(weights, edges, max_nodes)
    return sol.weight + pruned.base.constant


def _pw_value(
    pw: _Pairwise,
    eps: float,
    max_nodes: int,
    force_bipartite: bool = False,
) -> float:
    """Optimal objective of a canonical pairwise problem (no assignment)."""
    report = classify_graph(_pw_signed_graph(pw))
    if not report.tractable:
        witness = next(
            c.witness for c in report.classes if c.kind == "INTRACTABLE"
        )
        raise IntractableTopologyError(tuple(pw.names[v] for v in witness))
    blocks = report.tree.blocks
    classes = report.classes
    names = pw.names

    blocks_at: dict[int, list[int]] = defaultdict(list)
    for bi, block in enumerate(blocks):
        for v in block.vertices:
            if v in report.tree.cut_vertices:
                blocks_at[v].append(bi)

    def g_cut(c: int, parent_block: int) -> tuple[float, float]:
        s0, s1 = pw.singles.get(c, (0.0, 0.0))
        for bi in blocks_at[c]:
            if bi == parent_block:
                continue
            f0, f1 = f_block(bi, c)
            s0 += f0
            s1 += f1
        return s0, s1

    def f_block(bi: int, parent_cut: Optional[int]):
        block = blocks[bi]
        cls = classes[bi]
        local_names = tuple(names[v] for v in block.vertices)
        variables = tuple((nm, 2) for nm in local_names)
        potentials: list[Potential] = []
        for v, nm in zip(block.vertices, local_names):
            if v == parent_cut:
                table = (0.0, 0.0)
            elif v in report.tree.cut_vertices:
                table = g_cut(v, bi)
            else:
                table = pw.singles.get(v, (0.0, 0.0))
            potentials.append(Potential((nm,), table))
        plan_by_name = {}
        for u, v, _sign in block.edges:
            lo, hi = (u, v) if u < v else (v, u)
            potentials.append(Potential((names[lo], names[hi]), pw.edges[(lo, hi)]))
            plan_by_name[(names[lo], names[hi])] = report.plan[(lo, hi)]
        sub = Model(variables, tuple(potentials))
        reparam = apply_enode_plan(sub, plan_by_name, eps)
        pruned = prune(build_nmrf(reparam), eps)
        bipartite = force_bipartite or cls.kind == "BR"
        if parent_cut is None:
            return _solve_pruned(pruned, bipartite, max_nodes)
        pname = names[parent_cut]
        out = []
        for label in (0, 1):
            kept = tuple(
                nid
                for nid in pruned.kept
                if pruned.base.nodes[nid].assignment_map().get(pname, label) == label
            )
            clamped = PrunedNmrf(pruned.base, kept, eps)
            out.append(_solve_pruned(clamped, bipartite, max_nodes))
        return tuple(out)

    total = pw.constant
    visited: set[int] = set()
    # Root one DP at an arbitrary block of each component of the block forest.
    comp_of: dict[int, int] = {}
    for bi in range(len(blocks)):
        if bi in comp_of:
            continue
        stack = [bi]
        comp_of[bi] = bi
        members = []
        while stack:
            cur = stack.pop()
            members.append(cur)
            for v in blocks[cur].vertices:
                for other in blocks_at.get(v, ()):
                    if other not in comp_of:
                        comp_of[other] = bi
                        stack.append(other)
        total += f_block(bi, None)
        visited.update(members)
    return total


def _clamp(pw: _Pairwise, v: int, label: int) -> _Pairwise:
    """Fix vertex v to `label`, folding its mass into neighbors and constant."""
    singles = dict(pw.singles)
    constant = pw.constant + singles.pop(v, (0.0, 0.0))[label]
    edges = {}
    for (a, b), t in pw.edges.items():
        if v not in (a, b):
            edges[(a, b)] = t
            continue
        other = b if a == v else a
        if a == v:
            contrib = (t[2 * label + 0], t[2 * label + 1])
        else:
            contrib = (t[0 * 2 + label], t[1 * 2 + label])
        s = singles.get(other, (0.0, 0.0))
        singles[other] = (s[0] + contrib[0], s[1] + contrib[1])
    return _Pairwise(pw.names, singles, edges, constant)


def solve_map(
    model: Model,
    method: str = "auto",
    eps: float = DEFAULT_EPS,
    max_nodes: int = DEFAULT_BNB_CAP,
) -> MapSolution:
    """Exact MAP inference; see module docstring for the method menu."""
    if method == "bnb":
        return solve_map_bnb(model, eps, max_nodes)
    if method not in ("auto", "blocks", "bipartite"):
        raise ValueError(f"unknown method {method!r}")
    require_binary_pairwise(model)
    force_bipartite = method == "bipartite"
    pw = _canonicalize(model, eps)
    best = _pw_value(pw, eps, max_nodes, force_bipartite)
    tol = 1e-7 * max(1.0, abs(best))
    assignment: dict[str, int] = {}
    cur = pw
    for v, name in enumerate(pw.names):
        clamped = _clamp(cur, v, 0)
        val0 = _pw_value(clamped, eps, max_nodes, force_bipartite)
        if val0 >= best - tol:
            assignment[name] = 0
            cur, best = clamped, val0
        else:
            assignment[name] = 1
            cur = _clamp(cur, v, 1)
            best = _pw_value(cur, eps, max_nodes, force_bipartite)
    objective = energy(model, assignment)
    if abs(objective - best) > 1e-6 * max(1.0, abs(objective)):
        raise ObjectiveMismatchError(
            f"decoded objective {objective!r} != solver value {best!r}"
        )
    return MapSolution(
        assignment, objective, "bipartite" if force_bipartite else "blocks"
    )


def solve_map_bnb(
    model: Model, eps: float = DEFAULT_EPS, max_nodes: int = DEFAULT_BNB_CAP
) -> MapSolution:
    """MAP by branch and bound on the whole pruned NMRF (any order/labels)."""
    nmrf = build_nmrf(model)
    pruned = prune(nmrf, eps)
    weights, edges, kept = pruned.subgraph()
    if len(weights) > max_nodes:
        raise TooLargeError(
            f"pruned NMRF has {len(weights)} nodes, exceeds cap {max_nodes}"
        )
    sol = mwss_branch_bound(weights, edges, max_nodes)
    base = StableSetSolution(tuple(kept[i] for i in sol.nodes), sol.weight)
    full = mmwss_complete(pruned, base)
    decoded = decode_map(full, nmrf, model, eps)
    return MapSolution(decoded.assignment, decoded.objective, "bnb")

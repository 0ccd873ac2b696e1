"""Compilation of models to weighted NAND conflict graphs (NMRFs).

Every scope of the model becomes a complete clique group with one node per
assignment, and a singleton clique group is materialized for every variable
even when no explicit singleton potential exists. Weights are normalized so
each group's minimum is exactly zero; the subtracted constants are recorded
so the original objective can be reconstructed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import SignMismatchError, ZeroAssociativityError
from .model import (
    DEFAULT_EPS,
    Model,
    Potential,
    associativity,
    _as_flat_2x2,
    table_index,
)


@dataclass(frozen=True)
class NmrfNode:
    scope: tuple[str, ...]
    assignment: tuple[int, ...]
    weight: float

    def assignment_map(self) -> dict[str, int]:
        return dict(zip(self.scope, self.assignment))


@dataclass(frozen=True)
class Nmrf:
    nodes: tuple[NmrfNode, ...]
    adj: tuple[frozenset[int], ...]
    groups: dict[tuple[str, ...], tuple[int, ...]]
    constant: float


@dataclass(frozen=True)
class PrunedNmrf:
    """Induced subgraph on positive-weight nodes plus the pruned-node record."""

    base: Nmrf
    kept: tuple[int, ...]
    eps: float

    @property
    def zero(self) -> tuple[int, ...]:
        kept = set(self.kept)
        return tuple(i for i in range(len(self.base.nodes)) if i not in kept)

    def subgraph(self):
        """(weights, edges, kept) with edges as index pairs into `kept`."""
        base = self.base
        pos = {nid: i for i, nid in enumerate(self.kept)}
        weights = [base.nodes[nid].weight for nid in self.kept]
        edges = []
        for nid in self.kept:
            i = pos[nid]
            for other in base.adj[nid]:
                j = pos.get(other)
                if j is not None and i < j:
                    edges.append((i, j))
        return weights, edges, self.kept


def nodes_conflict(a: NmrfNode, b: NmrfNode) -> bool:
    """True iff the nodes disagree on a shared variable or share a clique group."""
    if a is b:
        return False
    bmap = b.assignment_map()
    for name, val in zip(a.scope, a.assignment):
        other = bmap.get(name)
        if other is not None and other != val:
            return True
    if a.scope == b.scope and a.assignment != b.assignment:
        return True
    return False


def build_nmrf(model: Model) -> Nmrf:
    """Compile a model into its normalized NMRF."""
    cards = model.cards
    index = model.index
    scopes: list[tuple[tuple[str, ...], Sequence[float]]] = []
    explicit = {p.scope: p.table for p in model.potentials}
    for name, card in model.variables:
        key = (name,)
        scopes.append((key, explicit.get(key, tuple([0.0] * card))))
    for p in model.potentials:
        if len(p.scope) >= 2:
            scopes.append((p.scope, p.table))
    scopes.sort(key=lambda item: tuple(index[n] for n in item[0]))

    nodes: list[NmrfNode] = []
    groups: dict[tuple[str, ...], tuple[int, ...]] = {}
    constant = 0.0
    for scope, table in scopes:
        lo = min(table)
        constant += lo
        scope_cards = [cards[n] for n in scope]
        ids = []
        for vals in itertools.product(*(range(c) for c in scope_cards)):
            w = table[table_index(scope_cards, vals)] - lo
            ids.append(len(nodes))
            nodes.append(NmrfNode(scope, vals, w))
        groups[scope] = tuple(ids)

    n = len(nodes)
    maps = [node.assignment_map() for node in nodes]
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        mi = maps[i]
        si = nodes[i].scope
        for j in range(i + 1, n):
            mj = maps[j]
            if si == nodes[j].scope:
                conflict = True  # distinct settings of one clique group
            else:
                conflict = any(
                    mj.get(name, val) != val for name, val in mi.items()
                )
            if conflict:
                adj[i].add(j)
                adj[j].add(i)
    return Nmrf(tuple(nodes), tuple(frozenset(s) for s in adj), groups, constant)


def prune(nmrf: Nmrf, eps: float = DEFAULT_EPS) -> PrunedNmrf:
    kept = tuple(i for i, node in enumerate(nmrf.nodes) if node.weight > eps)
    return PrunedNmrf(nmrf, kept, eps)


@dataclass(frozen=True)
class EdgeReparam:
    """Single-enode rewrite of a binary edge table via singleton transformations."""

    form: tuple[int, int]
    weight: float
    delta_u: tuple[float, float]
    delta_v: tuple[float, float]
    constant: float


_FORMS = {"00": (0, 0), "01": (0, 1), "10": (1, 0), "11": (1, 1)}


def parse_form(form) -> tuple[int, int]:
    if isinstance(form, str):
        try:
            return _FORMS[form]
        except KeyError:
            raise SignMismatchError(f"unknown enode form {form!r}") from None
    i, j = form
    return int(i), int(j)


def reparameterize_edge(table, target_form, eps: float = DEFAULT_EPS) -> EdgeReparam:
    """Zero three entries of a binary edge table, leaving only `target_form`.

    The surviving weight is forced to |associativity| by the invariance of
    that quantity under singleton transformations.
    """
    t = _as_flat_2x2(table)
    a = associativity(t)
    if abs(a) <= eps:
        raise ZeroAssociativityError("edge has zero associativity")
    i, j = parse_form(target_form)
    if (i == j) != (a > 0):
        raise SignMismatchError(
            f"form {i}{j} incompatible with associativity {a:g}"
        )

    def psi(x, y):
        return t[2 * x + y]

    # Solve psi(x, y) = f(x) + g(y) for the three zeroed entries, with
    # f(1 - i) = 0 fixed; the survivor then equals +/- associativity.
    f = [0.0, 0.0]
    g = [0.0, 0.0]
    g[j] = psi(1 - i, j)
    g[1 - j] = psi(1 - i, 1 - j)
    f[i] = psi(i, 1 - j) - g[1 - j]
    surviving = psi(i, j) - f[i] - g[j]
    return EdgeReparam((i, j), abs(a), (f[0], f[1]), (g[0], g[1]), 0.0)


def apply_enode_plan(
    model: Model,
    plan: Mapping[tuple[str, str], tuple[int, int]],
    eps: float = DEFAULT_EPS,
) -> Model:
    """Reparameterize every planned edge to its single surviving enode form.

    The removed mass moves into the endpoints' singleton tables; total energy
    is unchanged for every configuration. Edges absent from the plan are left
    as-is.
    """
    singles = {name: [0.0, 0.0] for name, _ in model.variables}
    for p in model.potentials:
        if len(p.scope) == 1:
            singles[p.scope[0]][0] += p.table[0]
            singles[p.scope[0]][1] += p.table[1]
    edges = []
    for p in model.potentials:
        if len(p.scope) != 2:
            continue
        u, v = p.scope
        form = plan.get((u, v))
        if form is None:
            edges.append(p)
            continue
        rep = reparameterize_edge(p.table, form, eps)
        table = [0.0] * 4
        table[2 * rep.form[0] + rep.form[1]] = rep.weight
        edges.append(Potential(p.scope, tuple(table)))
        for x in (0, 1):
            singles[u][x] += rep.delta_u[x]
            singles[v][x] += rep.delta_v[x]
    potentials = [
        Potential((name,), tuple(singles[name])) for name, _ in model.variables
    ] + edges
    return Model(model.variables, tuple(potentials))


def nmrf_to_json(nmrf: Nmrf) -> dict:
    nodes = [
        {
            "id": i,
            "group": list(node.scope),
            "assignment": node.assignment_map(),
            "weight": node.weight,
        }
        for i, node in enumerate(nmrf.nodes)
    ]
    edges = [
        [i, j] for i in range(len(nmrf.nodes)) for j in sorted(nmrf.adj[i]) if i < j
    ]
    return {"nodes": nodes, "edges": edges, "constants": nmrf.constant}


def nmrf_from_json(data: Mapping) -> Nmrf:
    raw_nodes = data["nodes"]
    nodes = []
    groups: dict[tuple[str, ...], list[int]] = {}
    for entry in raw_nodes:
        scope = tuple(entry["group"])
        assignment = tuple(entry["assignment"][name] for name in scope)
        nodes.append(NmrfNode(scope, assignment, float(entry["weight"])))
        groups.setdefault(scope, []).append(entry["id"])
    adj: list[set[int]] = [set() for _ in nodes]
    for i, j in data["edges"]:
        adj[i].add(j)
        adj[j].add(i)
    return Nmrf(
        tuple(nodes),
        tuple(frozenset(s) for s in adj),
        {k: tuple(v) for k, v in groups.items()},
        float(data.get("constants", 0.0)),
    )


def nmrf_to_dot(nmrf: Nmrf) -> str:
    lines = ["graph nmrf {"]
    for i, node in enumerate(nmrf.nodes):
        setting = ",".join(f"{n}={v}" for n, v in zip(node.scope, node.assignment))
        label = f"{':'.join(node.scope)}:{setting}:{node.weight:g}"
        lines.append(f'  n{i} [label="{label}"];')
    for i in range(len(nmrf.nodes)):
        for j in sorted(nmrf.adj[i]):
            if i < j:
                lines.append(f"  n{i} -- n{j};")
    lines.append("}")
    return "\n".join(lines)

"""MRF data model: validation, energies, signed views and variable flips.

Tables hold log-potential values; the solver maximizes their sum. A table
over a scope is stored row-major with the last scope variable varying
fastest. Scopes are canonicalized to variable declaration order on load and
duplicate scopes are merged by entrywise sum.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateVariableError,
    ModelFormatError,
    NonFiniteEntryError,
    NotBinaryPairwiseError,
    TableSizeMismatchError,
    UnknownVariableError,
)

DEFAULT_EPS = 1e-9

ASSOCIATIVE = 1
REPULSIVE = -1


@dataclass(frozen=True)
class Potential:
    """Log-potential table over an ordered variable scope."""

    scope: tuple[str, ...]
    table: tuple[float, ...]


@dataclass(frozen=True)
class Model:
    """Variables with finite label counts plus potentials over scopes."""

    variables: tuple[tuple[str, int], ...]
    potentials: tuple[Potential, ...]

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, (name, _) in enumerate(self.variables)}

    @cached_property
    def cards(self) -> dict[str, int]:
        return dict(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    def cardinality(self, name: str) -> int:
        return self.cards[name]

    def potential_for(self, scope: Iterable[str]) -> Potential | None:
        key = frozenset(scope)
        for p in self.potentials:
            if frozenset(p.scope) == key:
                return p
        return None


def table_index(cards: Sequence[int], values: Sequence[int]) -> int:
    """Row-major flat index, last variable fastest."""
    idx = 0
    for card, val in zip(cards, values):
        idx = idx * card + val
    return idx


def _reorder_table(scope, cards, table, new_scope):
    """Re-express a table under a permutation of its scope."""
    if tuple(new_scope) == tuple(scope):
        return tuple(table)
    pos = {name: i for i, name in enumerate(scope)}
    perm = [pos[name] for name in new_scope]
    new_cards = [cards[p] for p in perm]
    out = [0.0] * len(table)
    for new_vals in itertools.product(*(range(c) for c in new_cards)):
        old_vals = [0] * len(scope)
        for i, p in enumerate(perm):
            old_vals[p] = new_vals[i]
        out[table_index(new_cards, new_vals)] = table[table_index(cards, old_vals)]
    return tuple(out)


def validate_model(raw: Mapping) -> Model:
    """Build a Model from a raw JSON-style description, enforcing invariants."""
    if not isinstance(raw, Mapping):
        raise ModelFormatError("model description must be a mapping")
    extra = set(raw) - {"variables", "potentials"}
    if extra:
        raise ModelFormatError(f"unknown keys: {sorted(extra)}")

    variables: list[tuple[str, int]] = []
    seen: set[str] = set()
    for entry in raw.get("variables", []):
        if not isinstance(entry, Mapping) or set(entry) != {"name", "card"}:
            raise ModelFormatError(f"bad variable entry: {entry!r}")
        name, card = entry["name"], entry["card"]
        if not isinstance(name, str):
            raise ModelFormatError(f"variable name must be a string: {name!r}")
        if not isinstance(card, int) or isinstance(card, bool) or card < 2:
            raise ModelFormatError(f"cardinality of {name!r} must be an integer >= 2")
        if name in seen:
            raise DuplicateVariableError(name)
        seen.add(name)
        variables.append((name, card))

    index = {name: i for i, (name, _) in enumerate(variables)}
    cards = dict(variables)

    merged: dict[tuple[str, ...], list[float]] = {}
    for entry in raw.get("potentials", []):
        if not isinstance(entry, Mapping) or set(entry) != {"scope", "table"}:
            raise ModelFormatError(f"bad potential entry: {entry!r}")
        scope = tuple(entry["scope"])
        if not scope:
            raise ModelFormatError("empty potential scope")
        for name in scope:
            if name not in index:
                raise UnknownVariableError(name, scope)
        if len(set(scope)) != len(scope):
            raise ModelFormatError(f"scope {list(scope)} repeats a variable")
        table = entry["table"]
        scope_cards = [cards[name] for name in scope]
        expected = math.prod(scope_cards)
        if not isinstance(table, (list, tuple)) or len(table) != expected:
            raise TableSizeMismatchError(scope, expected, len(table) if hasattr(table, "__len__") else -1)
        values = []
        for i, v in enumerate(table):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise NonFiniteEntryError(scope, i)
            values.append(float(v))
        canon = tuple(sorted(scope, key=index.__getitem__))
        values = list(_reorder_table(scope, scope_cards, values, canon))
        if canon in merged:
            merged[canon] = [a + b for a, b in zip(merged[canon], values)]
        else:
            merged[canon] = values

    potentials = tuple(
        Potential(scope, tuple(tab))
        for scope, tab in sorted(merged.items(), key=lambda kv: tuple(index[n] for n in kv[0]))
    )
    return Model(tuple(variables), potentials)


def model_to_json(model: Model) -> dict:
    return {
        "variables": [{"name": n, "card": c} for n, c in model.variables],
        "potentials": [
            {"scope": list(p.scope), "table": list(p.table)} for p in model.potentials
        ],
    }


def model_from_json_file(path: str) -> Model:
    with open(path) as fh:
        return validate_model(json.load(fh))


def energy(model: Model, assignment: Mapping[str, int]) -> float:
    """Value of the MAP objective at a full configuration."""
    cards = model.cards
    total = 0.0
    for p in model.potentials:
        scope_cards = [cards[n] for n in p.scope]
        vals = [assignment[n] for n in p.scope]
        total += p.table[table_index(scope_cards, vals)]
    return total


def _as_flat_2x2(table) -> tuple[float, float, float, float]:
    if len(table) == 2 and hasattr(table[0], "__len__"):
        (a, b), (c, d) = table
        return float(a), float(b), float(c), float(d)
    if len(table) == 4:
        a, b, c, d = table
        return float(a), float(b), float(c), float(d)
    raise ModelFormatError("edge table must be 2x2")


def associativity(table) -> float:
    """psi00 + psi11 - psi01 - psi10 of a binary edge table."""
    t00, t01, t10, t11 = _as_flat_2x2(table)
    return t00 + t11 - t01 - t10


def is_binary_pairwise(model: Model) -> bool:
    return all(c == 2 for _, c in model.variables) and all(
        len(p.scope) <= 2 for p in model.potentials
    )


def require_binary_pairwise(model: Model) -> None:
    if not is_binary_pairwise(model):
        raise NotBinaryPairwiseError("model must be binary pairwise")


@dataclass(frozen=True)
class SignedGraph:
    """Pairwise topology with each edge labeled by the sign of its associativity."""

    names: tuple[str, ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, sign) with u < v

    @property
    def n(self) -> int:
        return len(self.names)


def signed_view(model: Model, eps: float = DEFAULT_EPS) -> SignedGraph:
    """Signed graph of a binary pairwise model; near-zero edges are omitted."""
    require_binary_pairwise(model)
    index = model.index
    edges = []
    for p in model.potentials:
        if len(p.scope) != 2:
            continue
        a = associativity(p.table)
        if abs(a) <= eps:
            continue
        u, v = index[p.scope[0]], index[p.scope[1]]
        if u > v:
            u, v = v, u
        edges.append((u, v, ASSOCIATIVE if a > 0 else REPULSIVE))
    return SignedGraph(model.names, tuple(edges))


def flip_variables(model: Model, flip: Iterable[str]) -> Model:
    """Replace each X in `flip` by 1 - X, permuting tables to preserve energy."""
    require_binary_pairwise(model)
    flip_set = set(flip)
    for name in flip_set:
        if name not in model.index:
            raise UnknownVariableError(name)
    potentials = []
    for p in model.potentials:
        mask = [name in flip_set for name in p.scope]
        if not any(mask):
            potentials.append(p)
            continue
        cards = [2] * len(p.scope)
        table = [0.0] * len(p.table)
        for vals in itertools.product((0, 1), repeat=len(p.scope)):
            src = [1 - v if m else v for v, m in zip(vals, mask)]
            table[table_index(cards, vals)] = p.table[table_index(cards, src)]
        potentials.append(Potential(p.scope, tuple(table)))
    return Model(model.variables, tuple(potentials))

"""Brute-force references for MAP and MWSS.

These share no code with the production solvers on purpose: they enumerate
directly over raw tables and adjacency and exist to check everything else.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

from .errors import TooLargeError
from .model import Model
from .mwss import MapSolution, StableSetSolution

MAX_CONFIGURATIONS = 1 << 20
MAX_BRUTE_NODES = 24


def brute_force_map(model: Model) -> MapSolution:
    """Exact MAP by enumeration; ties go to the lexicographically smallest."""
    cards = [c for _, c in model.variables]
    if math.prod(cards) > MAX_CONFIGURATIONS:
        raise TooLargeError("configuration space exceeds 2^20")
    names = [n for n, _ in model.variables]
    positions = {n: i for i, n in enumerate(names)}
    compiled = []
    for p in model.potentials:
        idxs = [positions[n] for n in p.scope]
        scope_cards = [cards[i] for i in idxs]
        compiled.append((idxs, scope_cards, p.table))

    best_val = -math.inf
    best_cfg = None
    for cfg in itertools.product(*(range(c) for c in cards)):
        total = 0.0
        for idxs, scope_cards, table in compiled:
            flat = 0
            for i, card in zip(idxs, scope_cards):
                flat = flat * card + cfg[i]
            total += table[flat]
        if total > best_val:
            best_val = total
            best_cfg = cfg
    assignment = dict(zip(names, best_cfg))
    return MapSolution(assignment, best_val, "brute-force")


def brute_force_mwss(weights: Sequence[float], edges) -> StableSetSolution:
    """Exact MWSS by exhaustive subset search with stability pruning."""
    n = len(weights)
    if n > MAX_BRUTE_NODES:
        raise TooLargeError(f"{n} nodes exceeds brute-force cap {MAX_BRUTE_NODES}")
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]

    best_weight = -1.0
    best_mask = 0
    stack = [(0, 0, 0, 0.0)]  # next index, chosen mask, blocked mask, weight
    while stack:
        i, chosen, blocked, w = stack.pop()
        if w > best_weight:
            best_weight = w
            best_mask = chosen
        if i == n or w + suffix[i] <= best_weight:
            continue
        stack.append((i + 1, chosen, blocked, w))
        if not blocked >> i & 1:
            stack.append((i + 1, chosen | 1 << i, blocked | adj[i], w + weights[i]))
    chosen = tuple(i for i in range(n) if best_mask >> i & 1)
    return StableSetSolution(chosen, sum(weights[i] for i in chosen))

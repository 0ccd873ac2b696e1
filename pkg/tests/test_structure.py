import itertools

import numpy as np
import pytest

from nmrfmap.generators import model_from_signed_edges, random_signed_model
from nmrfmap.model import ASSOCIATIVE, REPULSIVE, SignedGraph, flip_variables, signed_view
from nmrfmap.structure import (
    Block,
    block_decompose,
    classify_block,
    classify_graph,
    classify_model,
    detect_BR,
    find_frustrated_cycle,
    report_to_json,
)


def sg(n, edges):
    names = tuple(f"X{i}" for i in range(n))
    return SignedGraph(names, tuple(edges))


def brute_frustrated_exists(graph):
    """Check all simple cycles for an odd repulsive count."""
    sign = {}
    adj = {v: set() for v in range(graph.n)}
    for u, v, s in graph.edges:
        sign[(u, v)] = sign[(v, u)] = s
        adj[u].add(v)
        adj[v].add(u)

    def extend(path, seen):
        last = path[-1]
        for w in adj[last]:
            if w == path[0] and len(path) >= 3:
                reps = sum(
                    1
                    for a, b in zip(path, path[1:] + [path[0]])
                    if sign[(a, b)] == REPULSIVE
                )
                if reps % 2 == 1:
                    return True
            elif w not in seen and w > path[0]:
                if extend(path + [w], seen | {w}):
                    return True
        return False

    return any(extend([v], {v}) for v in range(graph.n))


# ---------------------------------------------------------------------------
# block decomposition


def test_blocks_partition_edges_and_find_cuts():
    # two triangles sharing X2, plus a pendant edge
    edges = [
        (0, 1, ASSOCIATIVE), (1, 2, ASSOCIATIVE), (0, 2, ASSOCIATIVE),
        (2, 3, ASSOCIATIVE), (3, 4, ASSOCIATIVE), (2, 4, ASSOCIATIVE),
        (4, 5, ASSOCIATIVE),
    ]
    tree = block_decompose(sg(6, edges))
    sizes = sorted(len(b.edges) for b in tree.blocks)
    assert sizes == [1, 3, 3]
    assert tree.cut_vertices == {2, 4}


def test_isolated_vertex_is_its_own_block():
    tree = block_decompose(sg(3, [(0, 1, ASSOCIATIVE)]))
    assert sorted(len(b.vertices) for b in tree.blocks) == [1, 2]


def test_blocks_against_brute_force_cut_vertices():
    rng = np.random.default_rng(17)
    for _ in range(30):
        n = int(rng.integers(4, 9))
        edges = [
            (u, v, ASSOCIATIVE)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.35
        ]
        graph = sg(n, edges)
        tree = block_decompose(graph)
        # every edge in exactly one block
        counts = {}
        for b in tree.blocks:
            for e in b.edges:
                counts[e] = counts.get(e, 0) + 1
        assert all(c == 1 for c in counts.values())
        assert sorted(counts) == sorted(edges)
        # cut vertices = vertices whose removal splits their component
        adj = {v: set() for v in range(n)}
        for u, v, _ in edges:
            adj[u].add(v)
            adj[v].add(u)

        def comp_count(skip):
            seen = set()
            parts = 0
            for s in range(n):
                if s == skip or s in seen:
                    continue
                parts += 1
                stack = [s]
                seen.add(s)
                while stack:
                    x = stack.pop()
                    for y in adj[x]:
                        if y != skip and y not in seen:
                            seen.add(y)
                            stack.append(y)
            return parts

        base = comp_count(None)
        expected_cuts = {
            v for v in range(n) if adj[v] and comp_count(v) > base - (0 if adj[v] else 1)
        }
        assert tree.cut_vertices == expected_cuts


# ---------------------------------------------------------------------------
# frustration and the BR property


def test_frustrated_cycle_matches_brute_enumeration():
    rng = np.random.default_rng(23)
    for _ in range(60):
        n = int(rng.integers(3, 9))
        edges = [
            (u, v, ASSOCIATIVE if rng.random() < 0.5 else REPULSIVE)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.4
        ]
        graph = sg(n, edges)
        cycle = find_frustrated_cycle(graph)
        assert (cycle is not None) == brute_frustrated_exists(graph)
        if cycle is not None:
            # the returned cycle really is frustrated
            sign = {}
            for u, v, s in edges:
                sign[(u, v)] = sign[(v, u)] = s
            reps = 0
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                assert (a, b) in sign
                reps += sign[(a, b)] == REPULSIVE
            assert reps % 2 == 1


def test_detect_BR_iff_no_frustrated_cycle():
    rng = np.random.default_rng(29)
    for _ in range(40):
        n = int(rng.integers(3, 9))
        edges = [
            (u, v, ASSOCIATIVE if rng.random() < 0.5 else REPULSIVE)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.4
        ]
        graph = sg(n, edges)
        br = detect_BR(graph)
        assert (br is None) == (find_frustrated_cycle(graph) is not None)
        if br is not None:
            v1, v2 = br
            side = {v: 0 for v in v1} | {v: 1 for v in v2}
            for u, v, s in edges:
                crossing = side[u] != side[v]
                assert crossing == (s == REPULSIVE)


def test_flipping_one_side_makes_everything_associative():
    rng = np.random.default_rng(31)
    # hidden bipartition forces the BR property
    for _ in range(10):
        n = 6
        hidden = [int(rng.integers(0, 2)) for _ in range(n)]
        edges = [
            (u, v, REPULSIVE if hidden[u] != hidden[v] else ASSOCIATIVE)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.6
        ]
        model = model_from_signed_edges(n, edges, rng)
        graph = signed_view(model)
        v1, v2 = detect_BR(graph)
        flipped = flip_variables(model, [graph.names[v] for v in v2])
        assert all(s == ASSOCIATIVE for _, _, s in signed_view(flipped).edges)


# ---------------------------------------------------------------------------
# block classification


def star_block(m, n):
    """Base edge 0-1 repulsive, m all-repulsive spokes, n all-associative."""
    edges = [(0, 1, REPULSIVE)]
    v = 2
    for _ in range(m):
        edges += [(0, v, REPULSIVE), (1, v, REPULSIVE)]
        v += 1
    for _ in range(n):
        edges += [(0, v, ASSOCIATIVE), (1, v, ASSOCIATIVE)]
        v += 1
    return Block(tuple(range(v)), tuple(edges))


def test_classify_canonical_shapes():
    cls = classify_block(star_block(2, 3))
    assert cls.kind == "T"
    assert (cls.params["m"], cls.params["n"]) == (2, 3)

    edges = [(0, 1, ASSOCIATIVE)]
    for v, up in ((2, ASSOCIATIVE), (3, REPULSIVE)):
        edges += [(0, v, up), (1, v, -up)]
    cls = classify_block(Block((0, 1, 2, 3), tuple(edges)))
    assert cls.kind == "U"
    assert cls.params["n"] == 2

    # balanced square
    sq = Block(
        (0, 1, 2, 3),
        ((0, 1, REPULSIVE), (1, 2, REPULSIVE), (2, 3, REPULSIVE), (0, 3, REPULSIVE)),
    )
    assert classify_block(sq).kind == "BR"

    # frustrated square
    fsq = Block(
        (0, 1, 2, 3),
        ((0, 1, REPULSIVE), (1, 2, ASSOCIATIVE), (2, 3, ASSOCIATIVE),
         (0, 3, ASSOCIATIVE)),
    )
    cls = classify_block(fsq)
    assert cls.kind == "INTRACTABLE"
    assert cls.witness is not None and len(cls.witness) >= 4


def test_classify_triangles():
    tri = lambda s1, s2, s3: Block(
        (0, 1, 2), ((0, 1, s1), (1, 2, s2), (0, 2, s3))
    )
    assert classify_block(tri(REPULSIVE, REPULSIVE, REPULSIVE)).kind == "T"
    assert classify_block(tri(REPULSIVE, ASSOCIATIVE, ASSOCIATIVE)).kind == "U"
    assert classify_block(tri(ASSOCIATIVE, ASSOCIATIVE, ASSOCIATIVE)).kind == "BR"
    assert classify_block(tri(REPULSIVE, REPULSIVE, ASSOCIATIVE)).kind == "BR"


def test_k4_with_frustrated_triangle_is_intractable():
    edges = [(0, 1, REPULSIVE)] + [
        (u, v, ASSOCIATIVE)
        for u, v in itertools.combinations(range(4), 2)
        if (u, v) != (0, 1)
    ]
    cls = classify_block(Block((0, 1, 2, 3), tuple(edges)))
    assert cls.kind == "INTRACTABLE"


def test_plan_forms_match_edge_signs():
    rng = np.random.default_rng(37)
    for _ in range(25):
        model = random_signed_model(rng, n=6)
        report = classify_model(model)
        sign = {(u, v): s for u, v, s in report.graph.edges}
        for (u, v), (a, b) in report.plan.items():
            if sign[(u, v)] == ASSOCIATIVE:
                assert a == b
            else:
                assert a != b


def test_report_json_shape():
    rng = np.random.default_rng(41)
    model = random_signed_model(rng, n=5)
    doc = report_to_json(classify_model(model))
    assert set(doc) == {"tractable", "blocks", "enode_plan", "cut_vertices"}
    for entry in doc["blocks"]:
        assert {"vertices", "class", "params"} <= set(entry)
    for entry in doc["enode_plan"]:
        assert set(entry) == {"edge", "form"}
        assert entry["form"] in {"00", "01", "10", "11"}


def test_classify_graph_overall_verdict():
    g = sg(4, [(0, 1, REPULSIVE), (1, 2, ASSOCIATIVE), (2, 3, ASSOCIATIVE),
               (0, 3, ASSOCIATIVE)])
    report = classify_graph(g)
    assert not report.tractable
    g2 = sg(3, [(0, 1, REPULSIVE), (1, 2, REPULSIVE), (0, 2, REPULSIVE)])
    assert classify_graph(g2).tractable

"""Built-in example structures used by the CLI and the test suite.

Graphs are encoded over one binary symbol "E" with both orientations of
every edge stored and no loops.  Quaternary "blocks" list all 4-tuples of
pairwise distinct elements of the blocked set: the blocked set then induces
nothing on smaller element sets, which is what makes the counterexample
fixtures mutually consistent as substructures.
"""

from __future__ import annotations

import itertools

from .extensions import HLExtension
from .groups import Perm
from .partial_iso import enumerate_partial_isos
from .structures import Signature, Structure

GRAPH_SIG = Signature.of({"E": 2})
RS_SIG = Signature.of({"R": 2, "S": 4})


def graph(vertices, edges) -> Structure:
    """Undirected simple graph: both orientations, no loops."""
    table = set()
    for a, b in edges:
        if a == b:
            raise ValueError("loops are not allowed in graph fixtures")
        table.add((a, b))
        table.add((b, a))
    return Structure.make(GRAPH_SIG, vertices, {"E": table})


def path_graph(n: int) -> Structure:
    vs = [f"v{i}" for i in range(n)]
    return graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def cycle_graph(n: int) -> Structure:
    vs = [f"v{i}" for i in range(n)]
    return graph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def complete_graph(n: int) -> Structure:
    vs = [f"v{i}" for i in range(n)]
    return graph(vs, itertools.combinations(vs, 2))


def distinct_block(elements) -> set[tuple[str, ...]]:
    """All 4-tuples of pairwise distinct elements of a 4-element set."""
    return set(itertools.permutations(elements, 4))


def s4_counterexample():
    """The two-symbol counterexample: a non-clique forbidden pattern T, a
    directed-triangle base C2 with its edge C1, and the 4-cycle extension
    (D1, phi1) of C1.

    Returns (T, C1, C2, D1, ext1).
    """
    t = Structure.make(RS_SIG, [str(i) for i in range(7)], {
        "R": {("0", "1"), ("1", "2"), ("2", "0")},
        "S": distinct_block(["3", "4", "5", "6"]),
    })
    c2 = Structure.make(RS_SIG, ["x", "y", "z"], {
        "R": {("x", "y"), ("y", "z"), ("z", "x")},
        "S": set(),
    })
    c1 = Structure.make(RS_SIG, ["x", "y"], {"R": {("x", "y")}, "S": set()})
    d1 = Structure.make(RS_SIG, ["x", "y", "u", "v"], {
        "R": {("x", "y"), ("y", "u"), ("u", "v"), ("v", "x")},
        "S": distinct_block(["x", "y", "u", "v"]),
    })
    ps = enumerate_partial_isos(c1, nonidentity=True)
    cycle = {"x": "y", "y": "u", "u": "v", "v": "x"}
    sigma = Perm(tuple(d1.index(cycle[e]) for e in d1.domain))
    phi = {}
    for i, member in enumerate(ps.members):
        if member.as_dict() == {"x": "y"}:
            phi[i] = sigma
    ext1 = HLExtension.build(c1, d1, phi, ps=ps)
    return t, c1, c2, d1, ext1


def relation_free_pair() -> Structure:
    return Structure.make(Signature.of({}), ["a", "b"], {})


def kn_free_seed(n: int) -> tuple[Structure, Structure]:
    """A seed graph with no complete subgraph on n vertices, plus the K_n
    pattern itself (a Gaifman clique) for use as the forbidden set."""
    if n < 3:
        raise ValueError("need n >= 3")
    return cycle_graph(5), complete_graph(n)


def k_pattern(n: int) -> Structure:
    return complete_graph(n)


def all_graphs_up_to_4() -> list[Structure]:
    """Representatives of the 11 isomorphism types of graphs on 4 vertices."""
    vs = ["v0", "v1", "v2", "v3"]
    pairs = list(itertools.combinations(range(4), 2))
    seen_canon = set()
    out = []
    for mask in range(1 << len(pairs)):
        edges = frozenset(pairs[i] for i in range(len(pairs)) if mask >> i & 1)
        canon = min(
            tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
            for perm in itertools.permutations(range(4)))
        if canon in seen_canon:
            continue
        seen_canon.add(canon)
        out.append(graph(vs, [(vs[a], vs[b]) for a, b in sorted(edges)]))
    return out


FIXTURE_NAMES = ("s4-counterexample", "graph-path-3", "kn-free-seed",
                 "relation-free-pair")

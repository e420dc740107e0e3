import itertools
import random

import pytest

from eppa.errors import SignatureMismatch, UnknownElement
from eppa.fixtures import GRAPH_SIG, RS_SIG, graph, k_pattern
from eppa.structures import (Signature, Structure, StructureMap, extends,
                             find_homomorphism, free_amalgamation,
                             induced_substructure, is_gaifman_clique, is_T_free,
                             natural_factorization, validate_structure)

SIG_R = Signature.of({"R": 2})


def triangle():
    return Structure.make(SIG_R, ["x", "y", "z"],
                          {"R": {("x", "y"), ("y", "z"), ("z", "x")}})


def test_validate_triangle_ok():
    report = validate_structure({
        "signature": {"R": 2},
        "domain": ["x", "y", "z"],
        "relations": {"R": [["x", "y"], ["y", "z"], ["z", "x"]]},
    })
    assert report.valid


def test_validate_empty_ok():
    report = validate_structure({"signature": {}, "domain": [], "relations": {}})
    assert report.valid


def test_validate_unknown_id():
    report = validate_structure({
        "signature": {"R": 2},
        "domain": ["x"],
        "relations": {"R": [["x", "q"]]},
    })
    assert not report.valid
    assert len(report.findings) == 1
    assert report.findings[0].kind == "unknown-id"


def test_validate_arity_and_duplicates():
    report = validate_structure({
        "signature": {"R": 2},
        "domain": ["x", "x"],
        "relations": {"R": [["x"], ["x", "x"], ["x", "x"]]},
    })
    kinds = {f.kind for f in report.findings}
    assert {"duplicate-id", "arity-mismatch", "duplicate-tuple"} <= kinds


def test_validate_flags_factorization_divergence():
    # a binary constant tuple distinguishes elements that all unary symbols
    # (there are none) treat alike
    report = validate_structure({
        "signature": {"R": 2},
        "domain": ["x", "y"],
        "relations": {"R": [["x", "x"]]},
    })
    assert report.valid
    assert any(n.kind == "factorization-divergence" for n in report.notes)


def test_induced_substructure_edge():
    sub = induced_substructure(triangle(), ["x", "y"])
    assert sub.domain == ("x", "y")
    assert sub.rel("R") == frozenset({("x", "y")})


def test_induced_substructure_trivial_cases():
    t = triangle()
    assert induced_substructure(t, []).domain == ()
    assert induced_substructure(t, t.domain) == t
    with pytest.raises(UnknownElement):
        induced_substructure(t, ["nope"])


def test_find_homomorphism_edge_into_triangle():
    edge = Structure.make(SIG_R, ["a", "b"], {"R": {("a", "b")}})
    h = find_homomorphism(edge, triangle())
    assert h is not None and h.is_homomorphism()
    # least: a -> x, then b forced to y
    assert h.as_dict() == {"a": "x", "b": "y"}


def test_find_homomorphism_odd_cycle_into_even_none():
    tri = graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    square = graph(["0", "1", "2", "3"],
                   [("0", "1"), ("1", "2"), ("2", "3"), ("3", "0")])
    # independent oracle: brute force over all 4^3 assignments
    found = []
    for imgs in itertools.product(square.domain, repeat=3):
        m = dict(zip(tri.domain, imgs))
        if all(tuple(m[e] for e in row) in square.rel("E")
               for row in tri.rel("E")):
            found.append(m)
    assert not found
    assert find_homomorphism(tri, square) is None


def test_find_homomorphism_identity_is_least():
    t = triangle()
    h = find_homomorphism(t, t)
    assert h.as_dict() == {"x": "x", "y": "y", "z": "z"}


def test_find_homomorphism_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        find_homomorphism(triangle(), graph(["a"], []))


def test_t_free_fixture(s4):
    ok, _ = is_T_free(s4["D1"], [s4["T"]])
    assert ok
    ok, _ = is_T_free(s4["C1"], [s4["T"]])
    assert ok
    ok, _ = is_T_free(s4["C2"], [s4["T"]])
    assert ok


def test_t_free_empty_forbidden():
    assert is_T_free(triangle(), []) == (True, None)


def test_t_free_verbatim_inclusion(s4):
    t = s4["T"]
    ok, witness = is_T_free(t, [t])
    assert not ok
    assert witness.as_dict() == {e: e for e in t.domain}


def test_gaifman_clique_examples(s4):
    assert not is_gaifman_clique(s4["T"])  # 0 and 3 never co-occur
    single = Structure.make(SIG_R, ["a"], {})
    assert is_gaifman_clique(single)
    assert is_gaifman_clique(k_pattern(3))


def test_free_amalgamation_counterexample_setup(s4):
    res = free_amalgamation(s4["D1"], s4["C2"], s4["C1"])
    s = res.structure
    assert len(s.domain) == 5
    assert s.rel("R") == s4["D1"].rel("R") | s4["C2"].rel("R")
    assert s.rel("S") == s4["D1"].rel("S")
    assert res.into1.is_embedding() and res.into2.is_embedding()
    # and this union is exactly why the counterexample works:
    ok, _ = is_T_free(s, [s4["T"]])
    assert not ok


def test_free_amalgamation_trivial_cases():
    t = triangle()
    assert free_amalgamation(t, t, t).structure == t
    empty = Structure.make(SIG_R, [], {})
    a = Structure.make(SIG_R, ["a"], {})
    b = Structure.make(SIG_R, ["b"], {})
    disjoint = free_amalgamation(a, b, empty).structure
    assert set(disjoint.domain) == {"a", "b"}


def test_free_amalgamation_renames_collisions():
    empty = Structure.make(SIG_R, [], {})
    a = Structure.make(SIG_R, ["a"], {})
    res = free_amalgamation(a, a, empty)
    assert res.structure.domain == ("a", "a#2")
    assert res.into2.as_dict() == {"a": "a#2"}


def test_natural_factorization_examples(s4):
    g = graph(["a", "b", "c"], [("a", "b")])
    f = natural_factorization(g)
    assert len(f.classes) == 1 and f.classes[0][1] == "a"

    sig = Signature.of({"P": 1})
    s = Structure.make(sig, ["x", "y"], {"P": {("x",)}})
    f = natural_factorization(s)
    assert len(f.classes) == 2

    # with blocks of distinct tuples the counterexample pattern has no
    # constant tuples at all, so every singleton exchange is a partial iso
    f = natural_factorization(s4["T"])
    assert len(f.classes) == 1
    assert f.classes[0][1] == "0"


def test_factorization_partitions_and_agrees_with_singleton_maps():
    from eppa.partial_iso import is_partial_iso
    rng = random.Random(7)
    sig = Signature.of({"R": 2})
    for _ in range(25):
        n = rng.randrange(1, 5)
        dom = [f"e{i}" for i in range(n)]
        rows = {(a, b) for a in dom for b in dom if rng.random() < 0.4}
        s = Structure.make(sig, dom, {"R": rows})
        f = natural_factorization(s)
        assert sorted(e for members, _ in f.classes for e in members) == sorted(dom)
        for members, _ in f.classes:
            for a, b in itertools.product(members, repeat=2):
                assert is_partial_iso(s, {a: b})
        for (m1, _), (m2, _) in itertools.combinations(f.classes, 2):
            assert not is_partial_iso(s, {m1[0]: m2[0]})


def test_homomorphisms_compose():
    rng = random.Random(11)
    sig = Signature.of({"R": 2})

    def rand_structure(n):
        dom = [f"e{i}" for i in range(n)]
        rows = {(a, b) for a in dom for b in dom if rng.random() < 0.5}
        return Structure.make(sig, dom, {"R": rows})

    for _ in range(20):
        a, b, c = rand_structure(3), rand_structure(3), rand_structure(3)
        h1 = find_homomorphism(a, b)
        h2 = find_homomorphism(b, c)
        if h1 is None or h2 is None:
            continue
        composed = StructureMap.make(
            a, c, {e: h2.apply(h1.apply(e)) for e in a.domain})
        assert composed.is_homomorphism()


def test_amalgamation_preserves_clique_freeness_randomized():
    # forbidden patterns that are Gaifman cliques cannot cross the glued part
    rng = random.Random(13)
    k3 = k_pattern(3)

    def random_triangle_free(pool, base_edges):
        edges = set(base_edges)
        vs = list(pool)
        for a, b in itertools.combinations(vs, 2):
            if rng.random() < 0.45:
                edges.add((a, b))
        g = graph(vs, edges)
        while True:
            ok, w = is_T_free(g, [k3])
            if ok:
                return g
            # remove one edge of the violating triangle
            tri = sorted(set(w.as_dict().values()))
            edges = {e for e in edges if set(e) != {tri[0], tri[1]}}
            g = graph(vs, edges)

    for _ in range(30):
        over_vs = ["s0", "s1"]
        over = random_triangle_free(over_vs, [])
        shared = {tuple(sorted(r)) for r in over.rel("E")}
        g1 = random_triangle_free(over_vs + ["a0", "a1"], shared)
        g2 = random_triangle_free(over_vs + ["b0", "b1"], shared)
        over1 = induced_substructure(g1, over_vs)
        over2 = induced_substructure(g2, over_vs)
        if over1 != over or over2 != over:
            continue
        res = free_amalgamation(g1, g2, over)
        ok, _ = is_T_free(res.structure, [k3])
        assert ok
        assert extends(res.structure, g1)

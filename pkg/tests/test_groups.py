import itertools
import random

import pytest

from eppa.errors import CapExceeded
from eppa.groups import (EMPTY_WORD, FiniteQuotient, Perm, WordContext,
                         close_group, eval_partial_word, orbit, quotient_image,
                         stabilizer_generators, subgroup_image)
from eppa.partial_iso import enumerate_partial_isos
from eppa.structures import Signature, Structure


def relation_free(n):
    return Structure.make(Signature.of({}), [f"e{i}" for i in range(n)], {})


def edge_structure():
    return Structure.make(Signature.of({"R": 2}), ["x", "y"], {"R": {("x", "y")}})


# -- permutations -------------------------------------------------------------

def test_perm_composition_order():
    s = Perm((1, 0, 2))   # (0 1)
    t = Perm((0, 2, 1))   # (1 2)
    st = s * t            # apply t first
    assert st.images == (1, 2, 0)
    assert (s * s.inv()).is_identity()


def test_close_group_four_cycle():
    g = close_group([Perm((1, 2, 3, 0))])
    assert g.order == 4


def test_close_group_empty_gens():
    g = close_group([], carrier=("a", "b"))
    assert g.order == 1


def test_close_group_s3():
    g = close_group([Perm((1, 0, 2)), Perm((0, 2, 1))])
    assert g.order == 6
    # brute-force oracle: the closure is all of S_3
    assert set(g.elements) == {Perm(p) for p in itertools.permutations(range(3))}


def test_close_group_cap():
    with pytest.raises(CapExceeded):
        close_group([Perm((1, 2, 3, 4, 0)), Perm((1, 0, 2, 3, 4))], cap=10)


def test_close_group_order_divides_factorial():
    rng = random.Random(5)
    import math
    for _ in range(10):
        n = rng.randrange(2, 5)
        gens = [Perm(rng.sample(range(n), n)) for _ in range(2)]
        g = close_group(gens)
        assert math.factorial(n) % g.order == 0
        assert all(p in g for p in gens)


def test_orbit():
    trivial = close_group([], carrier=("p",))
    assert orbit(trivial, "p") == ("p",)
    four = close_group([Perm((1, 2, 3, 0))], carrier=("x", "y", "u", "v"))
    assert orbit(four, "x") == ("x", "y", "u", "v")
    s3 = close_group([Perm((1, 0, 2)), Perm((0, 2, 1))])
    assert orbit(s3, 0) == (0, 1, 2)


# -- words --------------------------------------------------------------------

def test_reduce_free_generators():
    ctx = WordContext.free(["a", "b"])
    w = ctx.parse("a b^-1 b a a^-1")
    assert ctx.format(w) == "a"
    assert ctx.reduce([(0, 1), (0, -1)]) == ()


def test_reduce_with_inverse_pairing():
    # generators paired like an inverse-closed partial-iso set:
    # 0 <-> 1 are mutually inverse, 2 is an involution
    ctx = WordContext(("p0", "p1", "p2"), (1, 0, 2))
    assert ctx.parse("p0 p1") == ()
    assert ctx.parse("p0^-1") == ((1, 1),)
    assert ctx.parse("p2 p2") == ()
    assert ctx.format(ctx.parse("p2^-1")) == "p2"


def test_reduction_confluence_random_orders():
    # cancel adjacent inverse pairs in arbitrary orders; the normal form from
    # stack reduction must always be reached
    ctx = WordContext(("p0", "p1", "p2"), (1, 0, 2))
    rng = random.Random(17)

    def cancels(a, b):
        return ctx.reduce([a, b]) == ()

    for _ in range(200):
        letters = [ctx._normalize((rng.randrange(3), rng.choice((1, -1))))
                   for _ in range(8)]
        expected = ctx.reduce(letters)
        current = list(letters)
        while True:
            spots = [i for i in range(len(current) - 1)
                     if cancels(current[i], current[i + 1])]
            if not spots:
                break
            i = rng.choice(spots)
            del current[i:i + 2]
        assert tuple(current) == expected


def test_eval_partial_word():
    s = edge_structure()
    ps = enumerate_partial_isos(s, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    assert eval_partial_word(EMPTY_WORD, "x", ps) == "x"
    p = ctx.letter("p0")  # x -> y
    assert eval_partial_word(p, "x", ps) == "y"
    assert eval_partial_word(p, "y", ps) is None
    unreduced = [(0, 1), (0, -1)]
    assert eval_partial_word(tuple(unreduced), "y", ps) == "y"


def test_eval_concatenation_without_cancellation():
    s = relation_free(3)
    ps = enumerate_partial_isos(s, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    rng = random.Random(23)
    names = ps.names
    for _ in range(200):
        w = ctx.reduce([(rng.randrange(len(names)), 1) for _ in range(2)])
        v = ctx.reduce([(rng.randrange(len(names)), 1) for _ in range(2)])
        if ctx.mul(w, v) != w + v:   # cancellation happened; convention differs
            continue
        for a in s.domain:
            inner = eval_partial_word(v, a, ps)
            if inner is None:
                continue
            outer = eval_partial_word(w, inner, ps)
            if outer is None:
                continue
            assert eval_partial_word(w + v, a, ps) == outer


# -- stabilizer generators ----------------------------------------------------

def test_stabilizer_generators_two_point_relation_free():
    s = relation_free(2)
    ps = enumerate_partial_isos(s, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    gens = stabilizer_generators(s, ps, "e0")
    assert gens, "loops exist through the swap"
    for w in gens:
        assert eval_partial_word(w, "e0", ps) == "e0"
    # oracle: every reduced loop word of length <= 4 lands in the subgroup
    # generated by the emitted words, checked inside a faithful finite image
    q = FiniteQuotient.make(3, {
        "p0": Perm((1, 0, 2)), "p1": Perm((1, 0, 2)).inv(),
        "p2": Perm((0, 2, 1))}).completed(ctx)
    sub = subgroup_image(gens, q, ctx)
    letters = [(i, 1) for i in range(len(ps.members))]
    frontier = [EMPTY_WORD]
    seen = {EMPTY_WORD}
    for _ in range(4):
        nxt = []
        for w in frontier:
            for l in letters:
                w2 = ctx.mul(w, (l,))
                if w2 not in seen:
                    seen.add(w2)
                    nxt.append(w2)
        frontier = nxt
    for w in seen:
        if eval_partial_word(w, "e0", ps) == "e0":
            assert quotient_image(w, q, ctx) in set(sub.elements)


def test_stabilizer_generators_unreachable():
    sig = Signature.of({"P": 1})
    s = Structure.make(sig, ["a", "b", "c"], {"P": {("a",)}})
    # among the singleton maps only b <-> c exist, so nothing acts at a
    ps = enumerate_partial_isos(s, max_dom=1, nonidentity=True)
    assert [m.as_dict() for m in ps.members] == [{"b": "c"}, {"c": "b"}]
    assert stabilizer_generators(s, ps, "a") == []


def test_stabilizer_generators_loop_member():
    s = relation_free(3)
    ps = enumerate_partial_isos(s, nonidentity=True)
    ctx = WordContext.for_partial_isos(ps)
    loop_members = [i for i, m in enumerate(ps.members)
                    if m.apply("e0") == "e0" and len(m.pairs) > 1]
    assert loop_members
    gens = stabilizer_generators(s, ps, "e0")
    formatted = {ctx.format(w) for w in gens}
    for i in loop_members:
        assert ps.name(i) in formatted


def test_every_schreier_word_fixes_the_point():
    rng = random.Random(29)
    sig = Signature.of({"R": 2})
    for _ in range(15):
        n = rng.randrange(2, 4)
        dom = [f"e{i}" for i in range(n)]
        rows = {(a, b) for a in dom for b in dom if a != b and rng.random() < 0.4}
        s = Structure.make(sig, dom, {"R": rows})
        ps = enumerate_partial_isos(s, nonidentity=True)
        for a in dom:
            for w in stabilizer_generators(s, ps, a):
                assert eval_partial_word(w, a, ps) == a


# -- quotients ----------------------------------------------------------------

def test_quotient_image_basics():
    ctx = WordContext.free(["p", "r"])
    q = FiniteQuotient.make(3, {"p": Perm((1, 0, 2)), "r": Perm((0, 2, 1))})
    assert quotient_image(EMPTY_WORD, q, ctx).is_identity()
    assert quotient_image(ctx.parse("p p^-1"), q, ctx).is_identity()
    w = ctx.parse("p r")
    assert quotient_image(w, q, ctx).images == (1, 2, 0)


def test_quotient_image_missing_generator():
    ctx = WordContext.free(["p", "r"])
    q = FiniteQuotient.make(2, {"p": Perm((1, 0))})
    with pytest.raises(KeyError):
        quotient_image(ctx.parse("r"), q, ctx)


def test_quotient_completion_checks_inverses():
    ctx = WordContext(("p0", "p1"), (1, 0))
    bad = FiniteQuotient.make(3, {"p0": Perm((1, 2, 0)), "p1": Perm((1, 2, 0))})
    with pytest.raises(ValueError):
        bad.completed(ctx)
    good = FiniteQuotient.make(3, {"p0": Perm((1, 2, 0))}).completed(ctx)
    assert good.image("p1") == Perm((1, 2, 0)).inv()


def test_quotient_image_is_homomorphism_on_reduced_product():
    ctx = WordContext(("p0", "p1", "p2"), (1, 0, 2))
    q = FiniteQuotient.make(4, {
        "p0": Perm((1, 2, 3, 0)), "p2": Perm((1, 0, 3, 2))}).completed(ctx)
    rng = random.Random(31)
    for _ in range(100):
        w = ctx.reduce([(rng.randrange(3), 1) for _ in range(4)])
        v = ctx.reduce([(rng.randrange(3), 1) for _ in range(4)])
        assert quotient_image(ctx.mul(w, v), q, ctx) == \
            quotient_image(w, q, ctx) * quotient_image(v, q, ctx)


def test_subgroup_image_examples():
    ctx = WordContext.free(["a"])
    q = FiniteQuotient.make(3, {"a": Perm((1, 2, 0))})
    assert subgroup_image([], q, ctx).order == 1
    assert subgroup_image([ctx.parse("a")], q, ctx).order == 3
    trivial = FiniteQuotient.make(3, {"a": Perm((0, 1, 2))})
    assert subgroup_image([ctx.parse("a")], trivial, ctx).order == 1

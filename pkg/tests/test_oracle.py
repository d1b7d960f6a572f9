"""The explicit-word oracle: Britton reduction, certificates, rewriting."""

import itertools
import random

import pytest

from slpgroup import groups as G
from slpgroup import oracle as O
from slpgroup import slp

A1 = slp.gen("a1")
B1, B2 = slp.gen("b1"), slp.gen("b2")
T = slp.stable("t1")
TI = slp.stable("t1", -1)


def test_decompress_small():
    w = slp.from_symbols([A1, B1])
    assert O.decompress(slp.concat(w, w), 10) == (A1, B1, A1, B1)


def test_decompress_too_long():
    w = slp.power(slp.from_symbols([A1]), 2**60)
    with pytest.raises(slp.TooLong):
        O.decompress(w, 10**6)


def test_decompress_empty():
    assert O.decompress(slp.EPSILON, 0) == ()


def test_britton_relation_collapses(z2_fixture):
    assert O.britton_reduce(z2_fixture, (TI, A1, T, A1)) == (A1, A1)
    assert O.britton_trivial(z2_fixture, (TI, A1, T, A1))


def test_britton_blocks_outside_subgroup(z4_fixture):
    word = (TI, B1, T)
    assert O.britton_reduce(z4_fixture, word) == word
    assert not O.britton_trivial(z4_fixture, word)


def test_britton_identity_map_on_subgroup(z4_fixture):
    assert O.britton_reduce(z4_fixture, (T, B2, TI)) == (B2,)


def test_britton_output_has_no_pinch(z2_fixture, z4_fixture):
    rng = random.Random(4)
    for desc in (z2_fixture, z4_fixture):
        syms = [slp.Symbol(slp.KIND_GEN, n, s) for n in desc.base.group.names for s in (1, -1)]
        syms += [T, TI]
        for _ in range(200):
            word = tuple(rng.choice(syms) for _ in range(rng.randint(0, 14)))
            red = O.britton_reduce(desc, word)
            assert O.is_reduced(desc, red)
            # reduction preserved the group element
            assert O.britton_trivial(desc, red + O.invert_word(word))


def test_certificate_simple_cases(z2_fixture):
    assert O.equal_reduced_certificate(z2_fixture, (A1, T), (T, A1))
    assert not O.equal_reduced_certificate(z2_fixture, (T,), (TI,))
    assert O.equal_reduced_certificate(z2_fixture, (A1, T), (A1, T))


def test_certificate_agrees_with_britton(z2_fixture, z4_fixture):
    # all reduced pairs with at most 3 stable letters over short words
    for desc in (z2_fixture, z4_fixture):
        names = desc.base.group.names
        syms = [slp.Symbol(slp.KIND_GEN, n, 1) for n in names] + [T, TI]
        words = [
            w
            for r in range(0, 4)
            for w in itertools.product(syms, repeat=r)
            if sum(1 for s in w if s.kind == slp.KIND_T) <= 3 and O.is_reduced(desc, w)
        ]
        rng = random.Random(1)
        pool = rng.sample(words, k=min(60, len(words)))
        for u in pool:
            for v in rng.sample(words, k=10):
                want = O.britton_trivial(desc, u + O.invert_word(v))
                assert O.equal_reduced_certificate(desc, u, v) == want


def test_free_oracle_vs_stack():
    rng = random.Random(7)
    syms = [slp.gen(c, s) for c in "ab" for s in (1, -1)]
    desc = G.FreeDesc(("a", "b"))
    for _ in range(2000):
        word = tuple(rng.choice(syms) for _ in range(rng.randint(0, 12)))
        assert O.oracle_verdict(desc, word) == (not O.free_reduce_word(word))


def test_free_product_oracle(cat):
    z2x, z2y = G.cyclic(2, "x"), G.cyclic(2, "y")
    fp = G.FreeProductDesc(G.FiniteDesc(z2x), G.FiniteDesc(z2y))
    x, y = slp.gen("x1"), slp.gen("y1")
    assert not O.oracle_verdict(fp, (x, y, x, y))
    assert O.oracle_verdict(fp, (x, x, y, y))


def test_semidirect_oracle(inversion_semidirect):
    t, ti, g = slp.stable("t"), slp.stable("t", -1), slp.gen("g1")
    assert O.oracle_verdict(inversion_semidirect, (ti, g, t, g))
    assert not O.oracle_verdict(inversion_semidirect, (ti, g, t, g, g))


def test_amalgam_oracle():
    am = O.amalgam_fixture("z4_z4")
    assert O.oracle_verdict(am, (slp.gen("b2"), slp.gen("c2", -1)))
    assert not O.oracle_verdict(am, (slp.gen("b1"), slp.gen("c1", -1)))
    assert not O.oracle_verdict(am, (slp.gen("b2"),))


def test_gen_reproducible():
    d1, w1 = O.gen_random(O.GenConfig(), 1)
    d2, w2 = O.gen_random(O.GenConfig(), 1)
    assert d1.key() == d2.key()
    assert w1.root == w2.root
    d3, _ = O.gen_random(O.GenConfig(), 2)
    G.validate_desc(d3)


def test_gen_respects_cap():
    for seed in range(40):
        cfg = O.GenConfig(cap=800)
        _, w = O.gen_random(cfg, seed)
        assert slp.length(w) <= 800


def test_gen_slp_pairs():
    ctx = slp.FingerprintContext(seed=0)
    for seed in range(40):
        u, v = O.gen_slp_pair(seed, want_equal=seed % 2 == 0)
        if seed % 2 == 0:
            assert ctx.equal(u, v)
        else:
            assert not ctx.equal(u, v)

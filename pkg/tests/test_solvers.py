"""Dispatch and the non-HNN solvers, cross-checked against the oracle."""

import random

import pytest

from slpgroup import groups as G
from slpgroup import oracle as O
from slpgroup import slp
from slpgroup import solvers
from slpgroup.solvers import SolveConfig, cwp, cwp_equal, cwp_free, free_reduce

A = slp.gen("a")
B = slp.gen("b")


def _ctx(desc=None):
    return solvers._make_ctx(desc or G.FreeDesc(("a", "b")), SolveConfig(seed=5))


def test_dispatch_finite(cat):
    g = slp.gen("g1")
    v = cwp(G.FiniteDesc(cat["Z3"]), slp.from_symbols([g, g, g]))
    assert v.answer == "TRIVIAL"


def test_dispatch_free():
    v = cwp(G.FreeDesc(("a", "b")), slp.from_symbols([A, B, A.inverse()]))
    assert v.answer == "NONTRIVIAL"


def test_dispatch_hnn_delegates(z2_fixture):
    w = slp.from_symbols([slp.stable("t1", -1), slp.gen("a1"), slp.stable("t1"), slp.gen("a1")])
    assert cwp(z2_fixture, w).answer == "TRIVIAL"


def test_dispatch_foreign_symbol(cat):
    with pytest.raises(G.ForeignSymbol):
        cwp(G.FiniteDesc(cat["Z3"]), slp.from_symbols([slp.gen("zz")]))


def test_finite_even_power(cat):
    w = slp.power(slp.from_symbols([slp.gen("a1")]), 2**40)
    assert cwp(G.FiniteDesc(cat["Z2"]), w).answer == "TRIVIAL"


def test_finite_power_mod_three(cat):
    # independent oracle: modular arithmetic on the exponent
    expected = pow(2, 40, 3) == 0
    w = slp.power(slp.from_symbols([slp.gen("g1")]), 2**40)
    v = cwp(G.FiniteDesc(cat["Z3"]), w)
    assert v.positive == expected
    assert v.answer == "NONTRIVIAL"


def test_finite_mixed_word(cat):
    w = slp.from_symbols([slp.gen("b1"), slp.gen("b1"), slp.gen("b2")])
    assert cwp(G.FiniteDesc(cat["Z4"]), w).answer == "TRIVIAL"


def test_free_reduce_full_cancellation():
    w = slp.from_symbols([A, B, B.inverse(), A.inverse()])
    assert slp.length(free_reduce(_ctx(), w)) == 0


def test_free_reduce_big_powers_cancel():
    u = slp.power(slp.from_symbols([A]), 2**20)
    v = slp.power(slp.from_symbols([A.inverse()]), 2**20)
    assert slp.length(free_reduce(_ctx(), slp.concat(u, v))) == 0


def test_free_reduce_already_reduced():
    w = slp.from_symbols([A, B, A.inverse()])
    got = free_reduce(_ctx(), w)
    assert O.decompress(got, 10) == O.decompress(w, 10)


def test_free_reduce_output_is_reduced_random():
    syms = [slp.gen(c, s) for c in "ab" for s in (1, -1)]
    rng = random.Random(17)
    ctx = _ctx()
    for _ in range(400):
        word = [rng.choice(syms) for _ in range(rng.randint(0, 24))]
        got = O.decompress(free_reduce(ctx, slp.from_symbols(word)), 10**4)
        assert got == O.free_reduce_word(word)


def test_cwp_free_examples():
    assert cwp_free(slp.from_symbols([A, A.inverse()])).answer == "TRIVIAL"
    assert cwp_free(slp.from_symbols([A])).answer == "NONTRIVIAL"


def test_cwp_free_commutator_of_powers():
    n = 2**10
    x = slp.power(slp.from_symbols([A]), n)
    y = slp.power(slp.from_symbols([B]), n)
    comm = slp.concat(x, y, slp.invert(x), slp.invert(y))
    v = cwp_free(comm)
    assert v.answer == "NONTRIVIAL"
    assert slp.length(free_reduce(_ctx(), comm)) == 4 * n


def test_free_product_infinite_dihedral(cat):
    z2x, z2y = G.cyclic(2, "x"), G.cyclic(2, "y")
    desc = G.FreeProductDesc(G.FiniteDesc(z2x), G.FiniteDesc(z2y))
    x, y = slp.gen("x1"), slp.gen("y1")
    w = slp.from_symbols([x, y, x, y])
    assert O.oracle_verdict(desc, O.decompress(w, 10)) is False
    assert cwp(desc, w).answer == "NONTRIVIAL"
    assert cwp(desc, slp.from_symbols([x, x, y, y])).answer == "TRIVIAL"


def test_free_product_free_and_finite(cat):
    desc = G.FreeProductDesc(G.FreeDesc(("u",)), G.FiniteDesc(cat["Z3"]))
    u, g = slp.gen("u"), slp.gen("g1")
    w = slp.from_symbols([u, g, g, g, u.inverse()])
    assert cwp(desc, w).answer == "TRIVIAL"


def test_free_product_random_vs_oracle(cat):
    shapes = [
        G.FreeProductDesc(G.FiniteDesc(G.cyclic(2, "x")), G.FiniteDesc(G.cyclic(2, "y"))),
        G.FreeProductDesc(G.FreeDesc(("u",)), G.FiniteDesc(cat["Z3"])),
        G.FreeProductDesc(G.FiniteDesc(G.cyclic(4, "p")), G.FiniteDesc(cat["S3"])),
        G.FreeProductDesc(
            G.FreeProductDesc(G.FiniteDesc(G.cyclic(2, "x")), G.FiniteDesc(G.cyclic(3, "q"))),
            G.FreeDesc(("u", "w")),
        ),
    ]
    rng = random.Random(23)
    for desc in shapes:
        syms = []
        for ident, kind in desc.alphabet().items():
            syms.append(slp.Symbol(kind, ident, 1))
            syms.append(slp.Symbol(kind, ident, -1))
        for trial in range(100):
            word = [rng.choice(syms) for _ in range(rng.randint(0, 16))]
            want = O.oracle_verdict(desc, tuple(word))
            got = cwp(desc, slp.from_symbols(word), SolveConfig(seed=trial))
            assert got.positive == want, (desc, word)


def test_free_product_fallback_with_semidirect_factor(cat, inversion_semidirect):
    desc = G.FreeProductDesc(inversion_semidirect, G.FiniteDesc(G.cyclic(2, "x")))
    syms = []
    for ident, kind in desc.alphabet().items():
        syms.append(slp.Symbol(kind, ident, 1))
        syms.append(slp.Symbol(kind, ident, -1))
    rng = random.Random(5)
    for trial in range(60):
        word = [rng.choice(syms) for _ in range(rng.randint(0, 12))]
        want = O.oracle_verdict(desc, tuple(word))
        got = cwp(desc, slp.from_symbols(word), SolveConfig(seed=trial))
        assert got.positive == want, word


def test_semidirect_examples(inversion_semidirect):
    t, ti, g = slp.stable("t"), slp.stable("t", -1), slp.gen("g1")
    cases = [
        ([ti, g, t, g], "TRIVIAL"),
        ([ti, g, t, g, g], "NONTRIVIAL"),
        ([t, g, ti, g], "TRIVIAL"),
    ]
    for syms, want in cases:
        assert cwp(inversion_semidirect, slp.from_symbols(syms)).answer == want


def test_semidirect_exhaustive_short(inversion_semidirect):
    import itertools

    t, ti, g, g2 = slp.stable("t"), slp.stable("t", -1), slp.gen("g1"), slp.gen("g2")
    alphabet = [t, ti, g, g2]
    for r in range(0, 5):
        for word in itertools.product(alphabet, repeat=r):
            want = O.oracle_verdict(inversion_semidirect, word)
            got = cwp(inversion_semidirect, slp.from_symbols(word))
            assert got.positive == want, word


def test_semidirect_compressed_power(inversion_semidirect):
    # (t^-1 g t g)^(2^20) is trivial: each factor is
    t, ti, g = slp.stable("t"), slp.stable("t", -1), slp.gen("g1")
    w = slp.power(slp.from_symbols([ti, g, t, g]), 2**20)
    assert cwp(inversion_semidirect, w).answer == "TRIVIAL"


def test_amalgam_examples():
    am = O.amalgam_fixture("z4_z4")
    cases = [
        ([slp.gen("b2"), slp.gen("c2", -1)], "TRIVIAL"),
        ([slp.gen("b1"), slp.gen("c1", -1)], "NONTRIVIAL"),
        ([slp.gen("b2")], "NONTRIVIAL"),
    ]
    for syms, want in cases:
        assert cwp(am, slp.from_symbols(syms)).answer == want


def test_amalgam_s3_fixture():
    am = O.amalgam_fixture("s3_z4")
    w = slp.from_symbols([slp.gen("sf"), slp.gen("c2", -1)])
    assert cwp(am, w).answer == "TRIVIAL"
    w2 = slp.from_symbols([slp.gen("sr"), slp.gen("c2", -1)])
    assert cwp(am, w2).answer == "NONTRIVIAL"


def test_equal_mode(cat):
    g = slp.gen("g1")
    u = slp.power(slp.from_symbols([g]), 4)
    v = slp.from_symbols([g])
    d = G.FiniteDesc(cat["Z3"])
    assert cwp_equal(d, u, v).answer == "EQUAL"
    assert cwp_equal(d, u, slp.from_symbols([g, g])).answer == "UNEQUAL"


def test_verdict_stats_sane(z2_fixture):
    w = slp.from_symbols(
        [slp.stable("t1", -1), slp.gen("a1"), slp.stable("t1"), slp.gen("a1")]
    )
    v = cwp(z2_fixture, w)
    assert v.queries >= 1
    assert 0 <= v.depth <= solvers.default_depth_bound(z2_fixture)
    assert v.fp_bits == 128
    assert v.collapse_letters <= solvers.delta_bound(2)


def test_depth_bound_enforced(z2_fixture):
    w = slp.from_symbols(
        [slp.stable("t1", -1), slp.gen("a1"), slp.stable("t1"), slp.gen("a1")]
    )
    with pytest.raises(solvers.DepthExceeded):
        cwp(z2_fixture, w, SolveConfig(max_depth=0))


def test_delta_bound_value():
    assert solvers.delta_bound(2) == 16
    assert solvers.delta_bound(1) == 4


def _random_compressed(rng, syms, budget=5000):
    nodes = [slp.from_symbols([rng.choice(syms) for _ in range(rng.randint(1, 3))])]
    for _ in range(rng.randint(0, 12)):
        a, b = rng.choice(nodes), rng.choice(nodes)
        if slp.length(a) + slp.length(b) <= budget:
            nodes.append(slp.concat(a, b))
    return nodes[-1]


def test_finite_random_vs_oracle(cat):
    rng = random.Random(12)
    for g in (cat["Z5"], cat["S3"], cat["D4"]):
        desc = G.FiniteDesc(g)
        syms = [g.sym(i, s) for i in range(g.order) for s in (1, -1)]
        for trial in range(300):
            w = _random_compressed(rng, syms)
            want = O.oracle_verdict(desc, O.decompress(w, 5000))
            assert cwp(desc, w, SolveConfig(seed=trial % 16)).positive == want


def test_semidirect_random_compressed_vs_oracle(inversion_semidirect, cat):
    z4 = cat["Z4"]
    full = G.Subgroup(z4, frozenset(range(4)))
    neg = G.PartialIso.build(full, full, {0: 0, 1: 3, 2: 2, 3: 1})
    two_letters = G.SemidirectDesc(z4, ("u", "w"), (neg, G.identity_iso(full)))
    rng = random.Random(21)
    for desc in (inversion_semidirect, two_letters):
        syms = []
        for ident, kind in desc.alphabet().items():
            syms.append(slp.Symbol(kind, ident, 1))
            syms.append(slp.Symbol(kind, ident, -1))
        for trial in range(300):
            w = _random_compressed(rng, syms)
            want = O.oracle_verdict(desc, O.decompress(w, 5000))
            assert cwp(desc, w, SolveConfig(seed=trial % 16)).positive == want


def test_hnn_zero_letters(cat):
    z4 = cat["Z4"]
    half = G.Subgroup(z4, frozenset({0, 2}))
    desc = G.HnnDesc(G.FiniteDesc(z4), half, half, ())
    w = slp.power(slp.from_symbols([slp.gen("b1")]), 8)
    assert cwp(desc, w).answer == "TRIVIAL"
    assert cwp(desc, slp.from_symbols([slp.gen("b1")])).answer == "NONTRIVIAL"

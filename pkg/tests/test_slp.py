"""Compressed-word core: every operation checked against plain decompression."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from slpgroup import slp
from slpgroup.slp import (
    EPSILON,
    FingerprintContext,
    Symbol,
    Transducer,
    apply_homomorphism,
    apply_transducer,
    char_at,
    concat,
    decompress,
    from_symbols,
    invert,
    kth_stable_letter_position,
    length,
    normalize,
    power,
    project,
    stable_letter_count,
    subword,
)

A = slp.gen("a")
B = slp.gen("b")
T1 = slp.stable("t1")
T2 = slp.stable("t2")


@pytest.fixture(scope="module")
def ctx():
    return FingerprintContext(seed=11)


def spell(w):
    return " ".join(str(s) for s in decompress(w, 10**5))


def test_length_pair_of_words():
    s = concat(from_symbols([A, B]), from_symbols([A, B]))
    assert length(s) == 4


def test_length_doubling_chain():
    w = from_symbols([A])
    for _ in range(60):
        w = concat(w, w)
    assert length(w) == 2**60


def test_length_of_slice():
    w = power(from_symbols([A]), 2**60)
    assert length(subword(w, 5, 10)) == 6


def test_char_at_abab():
    s = concat(from_symbols([A, B]), from_symbols([A, B]))
    assert char_at(s, 3) == A
    assert [char_at(s, i) for i in range(1, 5)] == [A, B, A, B]


def test_char_at_huge_constant_word():
    w = power(from_symbols([A]), 2**60)
    assert char_at(w, 2**59) == A


def test_char_at_inside_slice():
    s = concat(from_symbols([A, B]), from_symbols([A, B]))
    assert char_at(subword(s, 2, 4), 1) == B


def test_char_at_out_of_range():
    with pytest.raises(slp.OutOfRange):
        char_at(from_symbols([A]), 2)


def test_concat_explicit():
    assert spell(concat(from_symbols([A, B]), from_symbols([B, A]))) == "a b b a"


def test_concat_identity():
    u = from_symbols([A, B])
    assert concat(u, EPSILON).root == u.root


def test_concat_lengths_add():
    u = power(from_symbols([A]), 2**20)
    v = power(from_symbols([A.inverse()]), 2**20)
    assert length(concat(u, v)) == 2**21


def test_slice_of_abab():
    s = concat(from_symbols([A, B]), from_symbols([A, B]))
    assert spell(subword(s, 2, 3)) == "b a"


def test_slice_full_range_is_identity():
    w = from_symbols([A, B, A])
    assert subword(w, 1, 3).root == w.root


def test_slice_of_constant_power():
    w = power(from_symbols([A]), 2**20)
    assert spell(subword(w, 2**19, 2**19 + 1)) == "a a"


def test_slice_out_of_range():
    with pytest.raises(slp.OutOfRange):
        subword(from_symbols([A, B]), 2, 5)


def test_invert_two_letters():
    assert spell(invert(from_symbols([A, B]))) == "b^-1 a^-1"


def test_invert_is_involution():
    w = concat(from_symbols([A, B]), subword(power(from_symbols([B, A]), 9), 3, 11))
    assert invert(invert(w)).root == w.root


def test_invert_stable_letter():
    assert spell(invert(from_symbols([T1, A]))) == "a^-1 t1^-1"


def test_invert_rejects_block():
    with pytest.raises(slp.SlpError):
        invert(from_symbols([Symbol(slp.KIND_BLOCK, 7, 1)]))


def test_homomorphism_conjugating_embed():
    # image of a two-factor word under x -> t^-1 x t on the first factor
    x, y = slp.gen("x"), slp.gen("y")
    images = {x: (T1.inverse(), x, T1)}
    out = apply_homomorphism(from_symbols([x, y]), images, missing="id")
    assert spell(out) == "t1^-1 x t1 y"


def test_homomorphism_padding():
    images = {
        T1: (A, A.inverse(), T1, A, A.inverse()),
        T1.inverse(): (A, A.inverse(), T1.inverse(), A, A.inverse()),
    }
    out = apply_homomorphism(from_symbols([T1, A]), images, missing="id")
    assert spell(out) == "a a^-1 t1 a a^-1 a"


def test_homomorphism_identity_map():
    w = power(from_symbols([A, B]), 7)
    out = apply_homomorphism(w, {A: (A,), B: (B,)}, missing="error")
    assert FingerprintContext(seed=3).equal(out, w)


def test_homomorphism_missing_image_raises():
    with pytest.raises(slp.MissingImage):
        apply_homomorphism(from_symbols([A, B]), {A: (A,)}, missing="error")


def test_project_keeps_stable_letters():
    w = from_symbols([A, T1, B, A, T2.inverse()])
    assert spell(project(w, lambda s: s.kind == slp.KIND_T)) == "t1 t2^-1"


def test_project_t_free_word():
    assert length(project(from_symbols([A, B]), lambda s: s.kind == slp.KIND_T)) == 0


def test_project_keeps_cancelling_pair():
    w = from_symbols([T1, A, T1.inverse(), A])
    assert spell(project(w, lambda s: s.kind == slp.KIND_T)) == "t1 t1^-1"


def _copy_t_transducer():
    rules = {0: {}}
    for s in (A, B, A.inverse(), B.inverse()):
        rules[0][s] = (0, ())
    for s in (T1, T1.inverse(), T2, T2.inverse()):
        rules[0][s] = (0, (s,))
    return Transducer(initial=0, finals=frozenset({0}), rules=rules)


def test_transducer_projection():
    out = apply_transducer(_copy_t_transducer(), from_symbols([A, T1, A]))
    assert spell(out) == "t1"


def test_transducer_identity():
    rules = {0: {s: (0, (s,)) for s in (A, B, T1)}}
    t = Transducer(initial=0, finals=frozenset({0}), rules=rules)
    w = power(from_symbols([A, T1, B]), 5)
    assert FingerprintContext(seed=5).equal(apply_transducer(t, w), w)


def test_transducer_bracketing_pattern():
    # the four-state rewriter mapping t X t^-1 / X t^-1 / t X runs of a
    # skeleton to single bracketed symbols, checked on the worked shape
    blocks = {i: Symbol(slp.KIND_BLOCK, i, 1) for i in range(5)}
    tp, tn = T1, T1.inverse()

    def out(code, i):
        return Symbol(slp.KIND_T, ("z", i, code), 1)

    rules = {"e": {}, "t": {}, "F": {}}
    for i, bsym in blocks.items():
        rules["e"][bsym] = (("Z", i), ())
        rules["t"][bsym] = (("tZ", i), ())
        rules[("Z", i)] = {
            tn: ("e", (out("zt", i),)),
            tp: ("t", (out("p", i),)),
            slp.END_MARKER: ("F", (out("p", i),)),
        }
        rules[("tZ", i)] = {
            tn: ("e", (out("tzt", i),)),
            tp: ("t", (out("tz", i),)),
            slp.END_MARKER: ("F", (out("tz", i),)),
        }
    t = Transducer(initial="e", finals=frozenset({"F"}), rules=rules)
    skeleton = from_symbols(
        [blocks[0], tp, blocks[1], tn, blocks[2], tn, blocks[3], tp, blocks[4], slp.END_MARKER]
    )
    got = decompress(apply_transducer(t, skeleton), 100)
    assert got == (
        out("p", 0),
        out("tzt", 1),
        out("zt", 2),
        out("p", 3),
        out("tz", 4),
    )


def test_transducer_undefined_run():
    t = _copy_t_transducer()
    with pytest.raises(slp.TransducerUndefined):
        apply_transducer(t, from_symbols([Symbol(slp.KIND_GEN, "zz", 1)]))


def test_equal_same_string_different_grammars(ctx):
    s1 = concat(from_symbols([A, B]), from_symbols([A, B]))
    s2 = concat(from_symbols([A]), from_symbols([B, A, B]))
    assert ctx.equal(s1, s2)


def test_equal_length_mismatch(ctx):
    u = power(from_symbols([A]), 2**30)
    v = power(from_symbols([A]), 2**30 - 1)
    assert not ctx.equal(u, v)


def test_equal_no_false_negatives(ctx):
    rng = random.Random(99)
    for trial in range(300):
        syms = [rng.choice([A, B, T1]) for _ in range(rng.randint(1, 6))]
        u = from_symbols(syms)
        for _ in range(rng.randint(1, 6)):
            u = concat(u, u) if rng.random() < 0.4 else concat(u, from_symbols(syms))
        n = length(u)
        k = rng.randint(1, n - 1) if n > 1 else 1
        v = concat(subword(u, 1, k), subword(u, k + 1, n)) if n > 1 else u
        fresh = FingerprintContext(seed=trial)
        assert fresh.equal(u, v)


def test_stable_letter_positions():
    w = from_symbols([A, T1, A, A, T1.inverse()])
    assert stable_letter_count(w) == 2
    assert kth_stable_letter_position(w, 2) == 5


def test_stable_letter_positions_in_power():
    w = power(from_symbols([T1, A]), 2**10)
    assert kth_stable_letter_position(w, 3) == 5


def test_stable_letter_position_out_of_range():
    w = from_symbols([T1, A])
    with pytest.raises(slp.OutOfRange):
        kth_stable_letter_position(w, 0)
    with pytest.raises(slp.OutOfRange):
        kth_stable_letter_position(w, 2)


def test_normalize_slice():
    s = concat(from_symbols([A, B]), from_symbols([A, B]))
    n = normalize(subword(s, 2, 3))
    assert spell(n) == "b a"
    assert _slice_free(n)


def test_normalize_idempotent_on_slice_free():
    w = concat(from_symbols([A, B]), from_symbols([B]))
    assert normalize(w).root == w.root


def test_normalize_big_slice_stays_small(ctx):
    w = power(from_symbols([A]), 2**40)
    sl = subword(w, 2, 2**40 - 1)
    n = normalize(sl)
    assert _slice_free(n)
    assert length(n) == 2**40 - 2
    assert ctx.equal(n, sl)
    assert _grammar_size(n) < 40 * 12


def _reachable_rules(w):
    return [slp._NODES[i] for i in slp._reachable_postorder(w.root)]


def _slice_free(w):
    return all(r[0] != "slice" for r in _reachable_rules(w))


def _grammar_size(w):
    return len(_reachable_rules(w))


def test_json_round_trip(ctx):
    w = concat(
        subword(power(from_symbols([A, T1]), 10), 3, 17),
        from_symbols([B.inverse()]),
    )
    data = slp.to_json(w)
    back = slp.from_json(data)
    assert ctx.equal(back, w)


def test_json_cycle_detected():
    data = {"start": "S", "rules": {"S": {"pair": ["S", "S"]}}}
    with pytest.raises(slp.SlpError):
        slp.from_json(data)


# --- randomized agreement with decompression ------------------------------------

_SYMS = [A, B, A.inverse(), B.inverse(), T1, T1.inverse()]


def _random_word(rng, budget=10_000):
    nodes = [from_symbols([rng.choice(_SYMS) for _ in range(rng.randint(1, 4))])]
    for _ in range(rng.randint(0, 14)):
        pick = rng.random()
        u = rng.choice(nodes)
        if pick < 0.5:
            v = rng.choice(nodes)
            if length(u) + length(v) <= budget:
                nodes.append(concat(u, v))
        elif pick < 0.8 and length(u) >= 1:
            i = rng.randint(1, length(u))
            j = rng.randint(i, length(u))
            nodes.append(subword(u, i, j))
        else:
            nodes.append(invert(u))
    return nodes[-1]


@given(st.integers(0, 10**6))
@settings(max_examples=120, deadline=None)
def test_random_grammar_agrees_with_decompression(seed):
    rng = random.Random(seed)
    u = _random_word(rng)
    v = _random_word(rng)
    du, dv = decompress(u, 10**5), decompress(v, 10**5)
    assert decompress(concat(u, v), 3 * 10**5) == du + dv
    assert decompress(invert(u), 10**5) == tuple(s.inverse() for s in reversed(du))
    assert decompress(normalize(u), 10**5) == du
    if du:
        i = rng.randint(1, len(du))
        j = rng.randint(i, len(du))
        assert decompress(subword(u, i, j), 10**5) == du[i - 1 : j]
        assert char_at(u, i) == du[i - 1]
    keep = lambda s: s.kind == slp.KIND_T
    assert decompress(project(u, keep), 10**5) == tuple(s for s in du if keep(s))
    # occurrence counting against the explicit word
    t_positions = [k + 1 for k, s in enumerate(du) if s.kind == slp.KIND_T]
    assert stable_letter_count(u) == len(t_positions)
    for occ, pos in enumerate(t_positions, start=1):
        assert kth_stable_letter_position(u, occ) == pos
    ctx = FingerprintContext(seed=seed)
    assert ctx.equal(u, v) == (du == dv)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_transducer_matches_explicit_run(seed):
    rng = random.Random(seed)
    u = _random_word(rng, budget=2000)
    t = _copy_t_transducer()
    got = decompress(apply_transducer(t, u), 10**5)
    want = tuple(s for s in decompress(u, 10**5) if s.kind == slp.KIND_T)
    assert got == want

"""Decompression-based ground truth for small instances.

Everything here works on explicit symbol tuples and is deliberately naive:
Britton reduction with subgroup membership by exhaustive triviality queries,
alternating-block rewriting for free products, certificate search for
equality of reduced words, and the seeded random instance generator used by
the cross-check suites.  May be exponential in word length; always used
under a decompression cap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from . import groups as G
from . import slp
from .slp import KIND_GEN, KIND_T, CompressedWord, Symbol

Word = tuple[Symbol, ...]


def decompress(w: CompressedWord, cap: int) -> Word:
    """val(w), or raise slp.TooLong when longer than cap."""
    return slp.decompress(w, cap)


def invert_word(word: Sequence[Symbol]) -> Word:
    return tuple(s.inverse() for s in reversed(word))


def free_reduce_word(word: Iterable[Symbol]) -> Word:
    out: list[Symbol] = []
    for s in word:
        if out and out[-1].ident == s.ident and out[-1].sign == -s.sign:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def _fold_finite(group: G.FiniteGroup, word: Iterable[Symbol]) -> int:
    acc = group.identity
    for s in word:
        idx = group.index(s.ident)
        if s.sign < 0:
            idx = group.inv(idx)
        acc = group.mul(acc, idx)
    return acc


def _flatten(desc: G.GroupDesc) -> list[G.GroupDesc]:
    if isinstance(desc, G.FreeProductDesc):
        return _flatten(desc.left) + _flatten(desc.right)
    return [desc]


def oracle_verdict(desc: G.GroupDesc, word: Sequence[Symbol]) -> bool:
    """True iff the word is the identity, decided by explicit rewriting."""
    if isinstance(desc, G.FiniteDesc):
        return _fold_finite(desc.group, word) == desc.group.identity
    if isinstance(desc, G.FreeDesc):
        return not free_reduce_word(word)
    if isinstance(desc, G.FreeProductDesc):
        return _free_product_trivial(desc, word)
    if isinstance(desc, G.SemidirectDesc):
        return _semidirect_trivial(desc, word)
    if isinstance(desc, G.HnnDesc):
        return britton_trivial(desc, word)
    if isinstance(desc, G.AmalgamDesc):
        hnn, image = amalgam_embedding(desc)
        return britton_trivial(hnn, apply_word_map(word, image))
    raise G.GroupError(f"oracle cannot handle {desc!r}")


def oracle_equal(desc: G.GroupDesc, u: Sequence[Symbol], v: Sequence[Symbol]) -> bool:
    return oracle_verdict(desc, tuple(u) + invert_word(v))


def _free_product_trivial(desc: G.FreeProductDesc, word: Sequence[Symbol]) -> bool:
    factors = _flatten(desc)
    side = {}
    for k, f in enumerate(factors):
        for ident in f.alphabet():
            side[ident] = k
    blocks: list[tuple[int, list[Symbol]]] = []
    for s in word:
        k = side[s.ident]
        if blocks and blocks[-1][0] == k:
            blocks[-1][1].append(s)
        else:
            blocks.append((k, [s]))
    changed = True
    while changed:
        changed = False
        for i, (k, syms) in enumerate(blocks):
            if oracle_verdict(factors[k], syms):
                del blocks[i]
                if 0 < i < len(blocks) and blocks[i - 1][0] == blocks[i][0]:
                    blocks[i - 1][1].extend(blocks[i][1])
                    del blocks[i]
                changed = True
                break
    return not blocks


def _semidirect_trivial(desc: G.SemidirectDesc, word: Sequence[Symbol]) -> bool:
    group = desc.group
    autos = {l: a.as_dict() for l, a in zip(desc.letters, desc.autos)}
    autos_inv = {l: {b: a for a, b in m.items()} for l, m in autos.items()}
    free_part: list[Symbol] = []
    h = group.identity
    for s in word:
        if s.ident in autos:
            # h * t^a  =  t^a * phi^a(h)
            table = autos[s.ident] if s.sign > 0 else autos_inv[s.ident]
            h = table[h]
            if free_part and free_part[-1].ident == s.ident and free_part[-1].sign == -s.sign:
                free_part.pop()
            else:
                free_part.append(s)
        else:
            idx = group.index(s.ident)
            if s.sign < 0:
                idx = group.inv(idx)
            h = group.mul(h, idx)
    return not free_part and h == group.identity


# --- Britton machinery ---------------------------------------------------------


def _letter_map(desc: G.HnnDesc) -> dict:
    return dict(desc.stable)


def _pinch_subgroup(iso: G.PartialIso, alpha: int) -> G.Subgroup:
    return iso.dom if alpha > 0 else iso.ran


def _membership(base: G.GroupDesc, word: Sequence[Symbol], sub: G.Subgroup) -> int | None:
    """Index (in sub.group) of the subgroup element the word represents, or
    None; decided by one triviality query per candidate."""
    for a in sub.sorted_members():
        probe = tuple(word) + (sub.group.sym(a, -1),)
        if oracle_verdict(base, probe):
            return a
    return None


def _find_pinch(desc: G.HnnDesc, word: Sequence[Symbol], start: int = 0):
    """Leftmost factor t^-a w t^a (w over the base, h(w) in the associated
    subgroup) at or after symbol index `start`."""
    letters = _letter_map(desc)
    positions = [i for i, s in enumerate(word) if s.ident in letters]
    for n, p in enumerate(positions[:-1]):
        q = positions[n + 1]
        if q <= start:
            continue
        sp, sq = word[p], word[q]
        if sp.ident != sq.ident or sp.sign != -sq.sign:
            continue
        iso = letters[sp.ident]
        alpha = sq.sign
        sub = _pinch_subgroup(iso, alpha)
        elem = _membership(desc.base, word[p + 1 : q], sub)
        if elem is not None:
            return p, q, iso, alpha, elem
    return None


def britton_reduce(desc: G.HnnDesc, word: Sequence[Symbol]) -> Word:
    """Repeatedly replace pinches t^-a w t^a by the image of h(w); the
    result contains no reducible factor."""
    current = tuple(word)
    while True:
        hit = _find_pinch(desc, current)
        if hit is None:
            return current
        p, q, iso, alpha, elem = hit
        table = iso.as_dict() if alpha > 0 else {b: a for a, b in iso.mapping}
        image = table[elem]
        target = (iso.ran if alpha > 0 else iso.dom).group
        middle = () if image == target.identity else (target.sym(image),)
        current = current[:p] + middle + current[q + 1 :]


def is_reduced(desc: G.HnnDesc, word: Sequence[Symbol]) -> bool:
    return _find_pinch(desc, word) is None


def britton_trivial(desc: G.HnnDesc, word: Sequence[Symbol]) -> bool:
    reduced = britton_reduce(desc, word)
    letters = _letter_map(desc)
    if any(s.ident in letters for s in reduced):
        return False
    return oracle_verdict(desc.base, reduced)


def equal_reduced_certificate(
    desc: G.HnnDesc, u: Sequence[Symbol], v: Sequence[Symbol]
) -> bool:
    """Lemma-style certificate search for equality of two reduced words:
    matching stable-letter projections plus a left-to-right forced chain of
    connecting subgroup elements."""
    letters = _letter_map(desc)

    def split(w):
        blocks, ts = [[]], []
        for s in w:
            if s.ident in letters:
                ts.append(s)
                blocks.append([])
            else:
                blocks[-1].append(s)
        return blocks, ts

    ub, ut = split(u)
    vb, vt = split(v)
    if ut != vt:
        return False
    if not ut:
        return oracle_equal(desc.base, ub[0], vb[0])
    # forced chain: c_{2k} = phi^{alpha_k}(c_{2k-1}); c_0 = c_{2m+1} = 1
    m = len(ut)
    c_even = None  # element index in its subgroup's parent group, as a symbol word
    prev_sym: Symbol | None = None
    for k in range(m):
        iso = letters[ut[k].ident]
        alpha = ut[k].sign
        sub = _pinch_subgroup(iso, alpha)
        fwd = iso.as_dict() if alpha > 0 else {b: a for a, b in iso.mapping}
        found = None
        for a in sub.sorted_members():
            left = tuple(ub[k]) + (sub.group.sym(a),)
            right = (() if c_even is None else c_even) + tuple(vb[k])
            if oracle_equal(desc.base, left, right):
                found = a
                break
        if found is None:
            return False
        img = fwd[found]
        target = (iso.ran if alpha > 0 else iso.dom).group
        c_even = (target.sym(img),)
    return oracle_equal(desc.base, tuple(ub[m]), c_even + tuple(vb[m]))


amalgam_embedding = G.amalgam_embedding


def apply_word_map(word: Sequence[Symbol], image: dict[Symbol, Word]) -> Word:
    out: list[Symbol] = []
    for s in word:
        out.extend(image.get(s, (s,)))
    return tuple(out)


# --- seeded random instances ----------------------------------------------------


@dataclass(frozen=True)
class GenConfig:
    max_base_order: int = 8
    max_assoc: int = 4
    max_letters: int = 4
    slp_size: int = 40
    cap: int = 5000
    trivial_bias: float = 0.45  # fraction of instances built from relators


def gen_random(config: GenConfig, seed: int) -> tuple[G.HnnDesc, CompressedWord]:
    """Reproducible HNN instance: a catalog-based description and a
    compressed word over its alphabet, decompressing to at most config.cap
    symbols."""
    rng = random.Random(seed)
    desc = _random_hnn_desc(config, rng)
    word = _random_word(config, rng, desc)
    return desc, word


def _random_hnn_desc(config: GenConfig, rng: random.Random) -> G.HnnDesc:
    pool = [g for g in G.catalog().values() if g.order <= config.max_base_order]
    group = rng.choice(pool)
    subs = [s for s in G.all_subgroups(group) if len(s) <= config.max_assoc]
    sub_a = G.Subgroup(group, rng.choice(subs))
    sub_b = G.Subgroup(group, rng.choice(subs))
    isos = G.enumerate_partial_isos(sub_a, sub_b)
    n = rng.randint(1, config.max_letters)
    stable = tuple((f"t{i+1}", rng.choice(isos)) for i in range(n))
    return G.HnnDesc(G.FiniteDesc(group), sub_a, sub_b, stable)


def _alphabet_symbols(desc: G.GroupDesc) -> list[Symbol]:
    out = []
    for ident, kind in desc.alphabet().items():
        out.append(Symbol(kind, ident, 1))
        out.append(Symbol(kind, ident, -1))
    return out


def _relator_pieces(desc: G.HnnDesc, rng: random.Random) -> list[Word]:
    """Short words that are trivial by construction: defining relations,
    their conjugates, and base-group identities."""
    group = desc.sub_a.group
    pieces: list[Word] = []
    for ident, iso in desc.stable:
        t_pos, t_neg = Symbol(KIND_T, ident, 1), Symbol(KIND_T, ident, -1)
        for a, b in iso.mapping:
            pieces.append((t_neg, group.sym(a), t_pos, iso.ran.group.sym(b, -1)))
    for name in desc.base.alphabet():
        s = Symbol(KIND_GEN, name, 1)
        pieces.append((s, s.inverse()))
    if isinstance(desc.base, G.FiniteDesc):
        g = desc.base.group
        for idx in range(g.order):
            k = 1
            acc = idx
            while acc != g.identity:
                acc = g.mul(acc, idx)
                k += 1
            pieces.append(tuple(g.sym(idx) for _ in range(k)))
    return pieces


def _random_word(
    config: GenConfig, rng: random.Random, desc: G.HnnDesc
) -> CompressedWord:
    cap = config.cap
    if rng.random() < config.trivial_bias:
        pieces = _relator_pieces(desc, rng)
        alphabet = _alphabet_symbols(desc)
        nodes = []
        for piece in rng.sample(pieces, k=min(len(pieces), 4)):
            conj = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, 2)))
            nodes.append(slp.from_symbols(conj + piece + invert_word(conj)))
    else:
        alphabet = _alphabet_symbols(desc)
        nodes = [
            slp.from_symbols([rng.choice(alphabet) for _ in range(rng.randint(1, 3))])
            for _ in range(rng.randint(2, 5))
        ]
    budget = max(4, config.slp_size - len(nodes))
    for _ in range(budget):
        a, b = rng.choice(nodes), rng.choice(nodes)
        if slp.length(a) + slp.length(b) > cap:
            continue
        nodes.append(slp.concat(a, b))
    candidates = [n for n in nodes if slp.length(n) <= cap]
    word = max(candidates, key=slp.length)
    if slp.length(word) == 0:
        word = slp.from_symbols([_alphabet_symbols(desc)[0]])
    return word


AMALGAM_FIXTURES = ("z4_z4", "s3_z4")


def amalgam_fixture(name: str) -> G.AmalgamDesc:
    """The two amalgam shapes used by the cross-check suite, both gluing
    along a Z/2 subgroup."""
    if name == "z4_z4":
        b4, c4 = G.cyclic(4, "b"), G.cyclic(4, "c")
        iso = G.PartialIso.build(
            G.Subgroup(b4, frozenset({0, 2})),
            G.Subgroup(c4, frozenset({0, 2})),
            {0: 0, 2: 2},
        )
        return G.AmalgamDesc(G.FiniteDesc(b4), G.FiniteDesc(c4), iso)
    if name == "s3_z4":
        s3, c4 = G.symmetric_3("s"), G.cyclic(4, "c")
        flip = s3.index("sf")
        iso = G.PartialIso.build(
            G.Subgroup(s3, frozenset({s3.identity, flip})),
            G.Subgroup(c4, frozenset({0, 2})),
            {s3.identity: 0, flip: 2},
        )
        return G.AmalgamDesc(G.FiniteDesc(s3), G.FiniteDesc(c4), iso)
    raise ValueError(f"unknown amalgam fixture {name!r}")


def gen_random_amalgam(
    seed: int, cap: int = 2000
) -> tuple[G.AmalgamDesc, CompressedWord]:
    rng = random.Random(seed)
    desc = amalgam_fixture(rng.choice(AMALGAM_FIXTURES))
    alphabet = _alphabet_symbols(desc)
    if rng.random() < 0.4:
        # bias toward words that exercise the identified subgroup
        dom_g, ran_g = desc.iso.dom.group, desc.iso.ran.group
        pieces = [
            tuple(dom_g.sym(a) for _ in range(1))
            + tuple(ran_g.sym(b, -1) for _ in range(1))
            for a, b in desc.iso.mapping
        ]
        nodes = [slp.from_symbols(rng.choice(pieces)) for _ in range(3)]
    else:
        nodes = [
            slp.from_symbols([rng.choice(alphabet) for _ in range(rng.randint(1, 3))])
            for _ in range(3)
        ]
    for _ in range(rng.randint(3, 14)):
        a, b = rng.choice(nodes), rng.choice(nodes)
        if slp.length(a) + slp.length(b) > cap:
            continue
        nodes.append(slp.concat(a, b))
    word = max((n for n in nodes if slp.length(n) <= cap), key=slp.length)
    return desc, word


def gen_slp_pair(seed: int, want_equal: bool) -> tuple[CompressedWord, CompressedWord]:
    """A pair of compressed words, equal-by-construction or unequal at one
    explicitly planted position."""
    rng = random.Random(seed)
    syms = [slp.gen(c) for c in "abc"] + [slp.gen(c, -1) for c in "abc"]
    nodes = [
        slp.from_symbols([rng.choice(syms) for _ in range(rng.randint(1, 4))])
        for _ in range(4)
    ]
    for _ in range(rng.randint(4, 24)):
        a = nodes[-1] if rng.random() < 0.7 else rng.choice(nodes)
        b = a if rng.random() < 0.5 else rng.choice(nodes)
        if slp.length(a) + slp.length(b) > 10**7:
            continue
        nodes.append(slp.concat(a, b))
    u = max(nodes, key=slp.length)
    n = slp.length(u)
    if want_equal:
        v = u
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(1, max(1, slp.length(v) - 1))
            v = slp.concat(slp.prefix(v, k), slp.suffix_from(v, k + 1))
        return u, v
    k = rng.randint(1, n)
    old = slp.char_at(u, k)
    new = rng.choice([s for s in syms if s != old])
    v = slp.concat(
        slp.subword(u, 1, k - 1) if k > 1 else slp.EPSILON,
        slp.from_symbols([new]),
        slp.subword(u, k + 1, n) if k < n else slp.EPSILON,
    )
    return u, v

"""Compressed word problems in HNN-extensions with finite associated
subgroups, reduced to the base group's compressed word problem.

The solve for one instance runs in layers:

  * `reduce_to_reduced` rewrites any compressed word into a pinch-free one
    (a composition system, one splice per grammar pair), locating the
    cancellation depth between two already-reduced children by binary
    search over equality probes on suffix/prefix pieces.
  * `reduce_stable_letters` collapses the stable letters to two alternating
    copies per distinct partial isomorphism via a parity transducer, which
    bounds the letter count by delta = 2 * |A|! * 2**|A|.
  * One `rcwp_step` then eliminates the widest-domain letter: the two words
    are split into a stable-letter skeleton over base-word blocks, the
    finite set of block relations Z1 c1 = c2 Z2 is computed with triviality
    queries against the instance without that letter, the skeleton is
    rewritten over bracketed block generators by a four-state transducer,
    and the bracketed generators are merged by a coefficient-carrying
    union-find whose leftover self-relations close into partial
    automorphisms of dom(phi1).  The result is a strictly smaller instance
    (fewer letters, or a smaller widest domain) over a finite base.
  * Letters whose partial automorphism is total fold into a semidirect
    product base, the terminal solvable case.

All probe answers are Monte-Carlo (fingerprint equality), so the overall
verdict is correct up to the documented per-query error bound; the
acceptance suite cross-checks against the exact Britton oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from . import groups as G
from . import slp
from . import solvers
from .slp import (
    EPSILON,
    KIND_BLOCK,
    KIND_T,
    CompressedWord,
    Symbol,
    Transducer,
    max_true,
)
from .solvers import Solve, trivial_in

Probe = Callable[[CompressedWord, CompressedWord], bool]


@dataclass(frozen=True)
class HnnInstance:
    """A multiple HNN-extension: base group plus one partial isomorphism
    from sub_a to sub_b per stable letter."""

    base: G.GroupDesc
    sub_a: G.Subgroup
    sub_b: G.Subgroup
    letters: tuple[tuple[Hashable, G.PartialIso], ...]

    def letter_idents(self) -> frozenset:
        return frozenset(ident for ident, _ in self.letters)

    def letter_map(self) -> dict:
        return dict(self.letters)

    def key(self) -> tuple:
        return (
            self.base.key(),
            self.sub_a.key(),
            self.sub_b.key(),
            tuple((ident, iso.graph_key()) for ident, iso in self.letters),
        )

    def without(self, ident: Hashable) -> "HnnInstance":
        return HnnInstance(
            self.base,
            self.sub_a,
            self.sub_b,
            tuple((i, iso) for i, iso in self.letters if i != ident),
        )

    def to_desc(self) -> G.HnnDesc:
        return G.HnnDesc(self.base, self.sub_a, self.sub_b, self.letters)


def instance_from_desc(desc: G.HnnDesc) -> HnnInstance:
    return HnnInstance(desc.base, desc.sub_a, desc.sub_b, desc.stable)


# --- reducing arbitrary words to pinch-free ones --------------------------------


def concat_reduced(
    ctx: Solve,
    inst: HnnInstance,
    y: CompressedWord,
    z: CompressedWord,
    eq_oracle: Probe,
) -> CompressedWord:
    """Pinch-free word equal to val(y)val(z), both inputs pinch-free.

    The number of stable letters cancelling at the junction is maximal with
    a monotone condition, so it is found by binary search; each probe
    checks one matching-letter condition plus at most |A| equality queries
    over spliced suffix/prefix words (which are themselves pinch-free).
    """
    tkey = inst.letter_idents()
    letters = inst.letter_map()
    l = slp.count_letters(y, tkey)
    m = slp.count_letters(z, tkey)
    if l == 0 or m == 0:
        return slp.concat(y, z)
    y_positions: dict[int, int] = {}
    z_positions: dict[int, int] = {}
    witnesses: dict[int, tuple[G.Subgroup, int]] = {}

    def pos_y(k: int) -> int:
        if k not in y_positions:
            y_positions[k] = slp.kth_letter_position(y, tkey, k)
        return y_positions[k]

    def pos_z(k: int) -> int:
        if k not in z_positions:
            z_positions[k] = slp.kth_letter_position(z, tkey, k)
        return z_positions[k]

    def depth_ok(k: int) -> bool:
        if k == 0:
            return True
        py, pz = pos_y(l - k + 1), pos_z(k)
        sy, sz = slp.char_at(y, py), slp.char_at(z, pz)
        if sy.ident != sz.ident or sy.sign != -sz.sign:
            return False
        iso = letters[sz.ident]
        sub = iso.ran if sz.sign > 0 else iso.dom
        left = slp.invert(slp.suffix_from(y, py))
        right = slp.prefix(z, pz)
        for a in sub.sorted_members():
            c = (
                EPSILON
                if a == sub.group.identity
                else slp.from_symbols([sub.group.sym(a)])
            )
            ctx.count_query()
            if eq_oracle(slp.concat(left, c), right):
                witnesses[k] = (sub, a)
                return True
        return False

    d = max_true(0, min(l, m), depth_ok)
    if d == 0:
        return slp.concat(y, z)
    sub, a = witnesses[d]
    p, q = pos_y(l - d + 1), pos_z(d)
    middle = (
        EPSILON if a == sub.group.identity else slp.from_symbols([sub.group.sym(a)])
    )
    left = slp.prefix(y, p - 1) if p > 1 else EPSILON
    right = slp.suffix_from(z, q + 1) if q < slp.length(z) else EPSILON
    return slp.concat(left, middle, right)


def reduce_to_reduced(
    ctx: Solve,
    inst: HnnInstance,
    w: CompressedWord,
    eq_oracle: Probe | None = None,
) -> CompressedWord:
    """Pinch-free composition system equal to val(w) in the extension,
    built bottom-up with one splice per grammar pair production."""
    if eq_oracle is None:
        eq_oracle = lambda a, b: rucwp_equal(ctx, inst, a, b)
    if slp.is_empty(w):
        return w
    cache = ctx.memo("reduce").setdefault(inst.key(), {})
    c = slp.to_cnf(w)
    for node in slp._reachable_postorder(c.root):
        if node in cache:
            continue
        kind = slp._NODES[node]
        if kind[0] == "word":
            cache[node] = node
        else:
            spliced = concat_reduced(
                ctx,
                inst,
                CompressedWord(cache[kind[1]]),
                CompressedWord(cache[kind[2]]),
                eq_oracle,
            )
            cache[node] = spliced.root
    return CompressedWord(cache[c.root])


def check_pi_t(ctx: Solve, inst: HnnInstance, u: CompressedWord, v: CompressedWord) -> bool:
    """Equality of the stable-letter projections."""
    idents = inst.letter_idents()
    return ctx.fp.equal(
        slp.project_idents(u, idents), slp.project_idents(v, idents)
    )


# --- collapsing to boundedly many stable letters --------------------------------


def reduce_stable_letters(
    ctx: Solve, inst: HnnInstance, u: CompressedWord, v: CompressedWord
) -> tuple[HnnInstance, CompressedWord, CompressedWord]:
    """Rename letters to two alternating copies per distinct isomorphism.

    The k-th stable letter of a word becomes copy (k mod 2) of its class
    representative, so consecutive letters always differ and pinch-freeness
    is preserved.  If the projections disagree the words cannot be equal
    and a canonically unequal pair is returned instead.
    """
    class_of: dict[Hashable, int] = {}
    class_iso: list[G.PartialIso] = []
    seen: dict[tuple, int] = {}
    for ident, iso in inst.letters:
        g = iso.graph_key()
        if g not in seen:
            seen[g] = len(class_iso)
            class_iso.append(iso)
        class_of[ident] = seen[g]

    new_letters = tuple(
        (("c", ci, parity), class_iso[ci])
        for ci in range(len(class_iso))
        for parity in (0, 1)
    )
    inst2 = HnnInstance(inst.base, inst.sub_a, inst.sub_b, new_letters)
    ctx.collapse_letters = max(ctx.collapse_letters, 2 * len(class_iso))

    if not check_pi_t(ctx, inst, u, v):
        first = new_letters[0][0] if new_letters else ("c", 0, 0)
        return (
            inst2,
            slp.from_symbols([Symbol(KIND_T, first, 1)]),
            slp.from_symbols([Symbol(KIND_T, first, -1)]),
        )

    rules: dict[int, dict[Symbol, tuple[int, tuple[Symbol, ...]]]] = {0: {}, 1: {}}
    for ident, kind in inst.base.alphabet().items():
        for sign in (1, -1):
            s = Symbol(kind, ident, sign)
            for p in (0, 1):
                rules[p][s] = (p, (s,))
    for ident in class_of:
        for sign in (1, -1):
            s = Symbol(KIND_T, ident, sign)
            for p in (0, 1):
                q = 1 - p
                rules[p][s] = (q, (Symbol(KIND_T, ("c", class_of[ident], q), sign),))
    t = Transducer(initial=0, finals=frozenset({0, 1}), rules=rules)
    return inst2, slp.apply_transducer(t, u), slp.apply_transducer(t, v)


# --- entry points ----------------------------------------------------------------


def ucwp_trivial(ctx: Solve, inst: HnnInstance, w: CompressedWord) -> bool:
    """Triviality for an arbitrary word and letter list (uniform problem)."""
    memo = ctx.memo("ucwp_uniform")
    key = (inst.key(), ctx.key(w))
    if key in memo:
        return memo[key]
    red = reduce_to_reduced(
        ctx, inst, w, lambda a, b: rucwp_equal(ctx, inst, a, b)
    )
    result = rucwp_equal(ctx, inst, red, EPSILON)
    memo[key] = result
    return result


def ucwp_fixed_trivial(ctx: Solve, inst: HnnInstance, w: CompressedWord) -> bool:
    """Triviality with the letter list held fixed: probes stay on this
    instance (no collapsing), keeping the recursion on the letter-count
    chain."""
    memo = ctx.memo("ucwp_fixed")
    key = (inst.key(), ctx.key(w))
    if key in memo:
        return memo[key]
    if not inst.letters:
        result = trivial_in(ctx, inst.base, w)
    else:
        red = reduce_to_reduced(
            ctx, inst, w, lambda a, b: rcwp_equal(ctx, inst, a, b)
        )
        result = rcwp_equal(ctx, inst, red, EPSILON)
    memo[key] = result
    return result


def rucwp_equal(ctx: Solve, inst: HnnInstance, u: CompressedWord, v: CompressedWord) -> bool:
    """Equality of two pinch-free words, arbitrary letter list: collapse
    the letters first, then run the elimination step."""
    if u.root == v.root:
        return True
    memo = ctx.memo("rucwp")
    key = (inst.key(), frozenset((ctx.key(u), ctx.key(v))))
    if key in memo:
        return memo[key]
    if not check_pi_t(ctx, inst, u, v):
        result = False
    elif slp.count_letters(u, inst.letter_idents()) == 0:
        result = trivial_in(ctx, inst.base, slp.concat(u, slp.invert(v)))
    else:
        inst2, u2, v2 = reduce_stable_letters(ctx, inst, u, v)
        result = rcwp_equal(ctx, inst2, u2, v2)
    memo[key] = result
    return result


def rcwp_equal(ctx: Solve, inst: HnnInstance, u: CompressedWord, v: CompressedWord) -> bool:
    """Equality of two pinch-free words over a fixed (small) letter list."""
    if u.root == v.root:
        return True
    memo = ctx.memo("rcwp")
    key = (inst.key(), frozenset((ctx.key(u), ctx.key(v))))
    if key in memo:
        return memo[key]
    if not check_pi_t(ctx, inst, u, v):
        result = False
    elif slp.count_letters(u, inst.letter_idents()) == 0:
        result = trivial_in(ctx, inst.base, slp.concat(u, slp.invert(v)))
    else:
        result = _rcwp_step(ctx, inst, u, v)
    memo[key] = result
    return result


def split_total_letters(inst: HnnInstance) -> HnnInstance:
    """Fold letters that act on the whole finite base into a semidirect
    product base; the remaining letters have strictly smaller domains."""
    if not isinstance(inst.base, G.FiniteDesc):
        return inst
    order = inst.base.group.order
    totals = [(i, iso) for i, iso in inst.letters if iso.dom.order == order]
    if not totals:
        return inst
    partial = tuple((i, iso) for i, iso in inst.letters if iso.dom.order < order)
    semi = G.SemidirectDesc(
        inst.base.group,
        tuple(i for i, _ in totals),
        tuple(iso for _, iso in totals),
    )
    return HnnInstance(semi, inst.sub_a, inst.sub_b, partial)


def _fast_product_base(desc: G.GroupDesc) -> bool:
    if isinstance(desc, (G.FiniteDesc, G.FreeDesc)):
        return True
    if isinstance(desc, G.FreeProductDesc):
        return _fast_product_base(desc.left) and _fast_product_base(desc.right)
    return False


def _rcwp_step(ctx: Solve, inst: HnnInstance, u: CompressedWord, v: CompressedWord) -> bool:
    ctx.enter_step()
    try:
        inst = split_total_letters(inst)
        if not inst.letters:
            return trivial_in(ctx, inst.base, slp.concat(u, slp.invert(v)))
        maxdom = max(iso.dom.order for _, iso in inst.letters)
        if maxdom == 1 and _fast_product_base(inst.base):
            # all relations are vacuous: the group is base * F(letters)
            free = G.FreeDesc(tuple(i for i, _ in inst.letters))
            product = G.FreeProductDesc(inst.base, free)
            return trivial_in(ctx, product, slp.concat(u, slp.invert(v)))
        des_ident, des_iso = next(
            (i, iso) for i, iso in inst.letters if iso.dom.order == maxdom
        )
        des_key = frozenset({des_ident})
        pu = slp.project_idents(u, des_key)
        pv = slp.project_idents(v, des_key)
        if not ctx.fp.equal(pu, pv):
            return False
        k_inst = inst.without(des_ident)
        if slp.is_empty(pu):
            return rcwp_equal(ctx, k_inst, u, v)
        ctx.emit(
            "eliminate-letter",
            letter=repr(des_ident),
            dom=des_iso.dom.order,
            letters=len(inst.letters),
            skeleton=slp.count_letters(u, des_key),
        )
        u_pad = _pad(inst, des_ident, u)
        v_pad = _pad(inst, des_ident, v)
        skel_u = split_variables(ctx, des_ident, u_pad)
        skel_v = split_variables(ctx, des_ident, v_pad)
        skel_u, skel_v, rep_values = _merge_block_values(ctx, skel_u, skel_v)
        relations = compute_relations_e(ctx, k_inst, rep_values, des_iso)
        u1 = eliminate_b1_t(ctx, skel_u, des_ident, rep_values)
        v1 = eliminate_b1_t(ctx, skel_v, des_ident, rep_values)
        bracketed = bracket_relations(relations, des_iso)
        new_inst, images = eliminate_z_generators(
            ctx, bracketed, _z_universe(u1, v1, bracketed), des_iso
        )
        u2 = slp.apply_homomorphism(u1, images, missing="error")
        v2 = slp.apply_homomorphism(v1, images, missing="error")
        ctx.emit(
            "recurse",
            blocks=len(rep_values),
            relations=len(relations),
            new_letters=len(new_inst.letters),
        )
        return ucwp_trivial(ctx, new_inst, slp.concat(u2, slp.invert(v2)))
    finally:
        ctx.leave_step()


def _pad(inst: HnnInstance, des_ident: Hashable, w: CompressedWord) -> CompressedWord:
    """Surround each designated letter with a trivially cancelling pair so
    every block between letters is non-empty."""
    a = inst.sub_a.group.sym(inst.sub_a.group.identity)
    images = {}
    for sign in (1, -1):
        t = Symbol(KIND_T, des_ident, sign)
        images[t] = (a, a.inverse(), t, a, a.inverse())
    return slp.apply_homomorphism(w, images, missing="id")


# --- skeleton/block splitting -----------------------------------------------------


def split_variables(
    ctx: Solve, des_ident: Hashable, w: CompressedWord
) -> CompressedWord:
    """Rewrite w as a skeleton over {t, t^-1} and block symbols, where each
    block symbol's ident is the arena node holding the block's base-word
    value.  Boundary blocks of adjacent grammar children merge into fresh
    pair nodes, so the skeleton of every node keeps the alternating shape."""
    key = frozenset({des_ident})
    c = slp.to_cnf(w)
    skel: dict[int, int] = {}
    for node in slp._reachable_postorder(c.root):
        if node in skel:
            continue
        if slp.count_letters(CompressedWord(node), key) == 0:
            skel[node] = slp.mk_word((Symbol(KIND_BLOCK, node, 1),))
            continue
        kind = slp._NODES[node]
        if kind[0] == "word":
            # in Chomsky form this is the designated letter itself
            skel[node] = node
            continue
        sc, sd = skel[kind[1]], skel[kind[2]]
        last = slp.first_last(sc)[1]
        first = slp.first_last(sd)[0]
        if last.kind == KIND_BLOCK and first.kind == KIND_BLOCK:
            merged_value = slp.mk_pair(last.ident, first.ident)
            middle = slp.mk_word((Symbol(KIND_BLOCK, merged_value, 1),))
            nc, nd = slp._LEN[sc], slp._LEN[sd]
            left = slp.mk_slice(sc, 1, nc - 1) if nc > 1 else slp.EMPTY_ID
            right = slp.mk_slice(sd, 2, nd) if nd > 1 else slp.EMPTY_ID
            skel[node] = slp.mk_pair(slp.mk_pair(left, middle), right)
        else:
            skel[node] = slp.mk_pair(sc, sd)
    return CompressedWord(skel[c.root])


def _merge_block_values(
    ctx: Solve, skel_u: CompressedWord, skel_v: CompressedWord
) -> tuple[CompressedWord, CompressedWord, dict[int, CompressedWord]]:
    """Identify blocks with equal values across both skeletons (this just
    applies the Z1 = Z2 relations early) and return the representatives."""
    skel_u = slp.normalize(skel_u)
    skel_v = slp.normalize(skel_v)
    rep_of: dict[int, int] = {}
    by_value: dict[tuple[int, int], int] = {}
    for skel in (skel_u, skel_v):
        for s in sorted(
            (s for s in slp.alphabet(skel) if s.kind == KIND_BLOCK),
            key=lambda s: s.ident,
        ):
            node = s.ident
            if node in rep_of:
                continue
            vkey = ctx.fp.string_key(CompressedWord(node))
            rep_of[node] = by_value.setdefault(vkey, node)
    images = {
        Symbol(KIND_BLOCK, node, 1): (Symbol(KIND_BLOCK, rep, 1),)
        for node, rep in rep_of.items()
        if node != rep
    }
    if images:
        skel_u = slp.apply_homomorphism(skel_u, images, missing="id")
        skel_v = slp.apply_homomorphism(skel_v, images, missing="id")
    reps = {rep: CompressedWord(rep) for rep in set(rep_of.values())}
    return skel_u, skel_v, reps


# --- the relation set over blocks ---------------------------------------------------

Tag = tuple[str, int]  # ("A"|"B", element index in the respective parent group)


def compute_relations_e(
    ctx: Solve,
    k_inst: HnnInstance,
    rep_values: dict[int, CompressedWord],
    iso1: G.PartialIso,
) -> list[tuple[int, Tag, Tag, int]]:
    """All valid relations val(Z1) c1 = c2 val(Z2) with c1, c2 ranging over
    the disjoint union of dom(phi1) and ran(phi1), decided by triviality
    queries against the instance without the designated letter.

    The identity carries both tags: an entry whose connecting element is
    read as a ran(phi1) element feeds the bracketed relation families, and
    the identity qualifies on both sides."""
    sub_a, sub_b = iso1.dom, iso1.ran
    crange: list[Tag] = [("A", i) for i in sub_a.sorted_members()]
    crange += [("B", j) for j in sub_b.sorted_members()]

    def csym(tag: Tag, sign: int = 1) -> Symbol:
        side, idx = tag
        group = sub_a.group if side == "A" else sub_b.group
        return group.sym(idx, sign)

    def is_identity(tag: Tag) -> bool:
        side, idx = tag
        return idx == (sub_a if side == "A" else sub_b).group.identity

    out: list[tuple[int, Tag, Tag, int]] = []
    inverted = {z: slp.invert(wv) for z, wv in rep_values.items()}
    for z1, w1 in rep_values.items():
        for z2, w2i in inverted.items():
            for c1 in crange:
                left = (
                    w1
                    if is_identity(c1)
                    else slp.concat(w1, slp.from_symbols([csym(c1)]))
                )
                for c2 in crange:
                    if z1 == z2 and is_identity(c1) and is_identity(c2):
                        out.append((z1, c1, c2, z2))
                        continue
                    query = (
                        slp.concat(left, w2i)
                        if is_identity(c2)
                        else slp.concat(left, w2i, slp.from_symbols([csym(c2, -1)]))
                    )
                    ctx.count_query()
                    if ucwp_fixed_trivial(ctx, k_inst, query):
                        out.append((z1, c1, c2, z2))
    return out


# --- bracketed generators (eliminating ran(phi1) and the letter) ---------------------


def _zsym(block: int, code: str, sign: int = 1) -> Symbol:
    return Symbol(KIND_T, ("z", block, code), sign)


def eliminate_b1_t(
    ctx: Solve,
    skeleton: CompressedWord,
    des_ident: Hashable,
    rep_values: dict[int, CompressedWord],
) -> CompressedWord:
    """Transduce an end-marked skeleton into a word over the bracketed
    block generators: tZ, Zt^-1 and tZt^-1 patterns become single symbols,
    lone blocks stay plain."""
    t_pos = Symbol(KIND_T, des_ident, 1)
    t_neg = Symbol(KIND_T, des_ident, -1)
    rules: dict = {"e": {}, "t": {}, "F": {}}
    for z in rep_values:
        b = Symbol(KIND_BLOCK, z, 1)
        rules["e"][b] = (("Z", z), ())
        rules["t"][b] = (("tZ", z), ())
        rules[("Z", z)] = {
            t_neg: ("e", (_zsym(z, "zt"),)),
            t_pos: ("t", (_zsym(z, "p"),)),
            slp.END_MARKER: ("F", (_zsym(z, "p"),)),
        }
        rules[("tZ", z)] = {
            t_neg: ("e", (_zsym(z, "tzt"),)),
            t_pos: ("t", (_zsym(z, "tz"),)),
            slp.END_MARKER: ("F", (_zsym(z, "tz"),)),
        }
    t = Transducer(initial="e", finals=frozenset({"F"}), rules=rules)
    marked = slp.concat(skeleton, slp.from_symbols([slp.END_MARKER]))
    return slp.apply_transducer(t, marked)


def bracket_relations(
    relations: list[tuple[int, Tag, Tag, int]], iso1: G.PartialIso
) -> list[tuple[tuple, int, int, tuple]]:
    """Rewrite the relation set over the bracketed generators: a relation
    with c in ran(phi1) moves that side's conjugation into the bracket and
    replaces c by its preimage under phi1.  Output coefficients all live in
    dom(phi1) (indices in its parent group)."""
    back = {b: a for a, b in iso1.mapping}
    out = []
    for z1, (tag1, x1), (tag2, x2), z2 in relations:
        code = {"AA": "p", "BA": "zt", "AB": "tz", "BB": "tzt"}[tag1 + tag2]
        a1 = back[x1] if tag1 == "B" else x1
        a2 = back[x2] if tag2 == "B" else x2
        out.append((("z", z1, code), a1, a2, ("z", z2, code)))
    return out


def _z_universe(
    u: CompressedWord, v: CompressedWord, bracketed: list
) -> list[tuple]:
    idents = {s.ident for s in slp.alphabet(u) if s.kind == KIND_T}
    idents |= {s.ident for s in slp.alphabet(v) if s.kind == KIND_T}
    for z1, _, _, z2 in bracketed:
        idents.add(z1)
        idents.add(z2)
    return sorted(idents)


# --- merging the bracketed generators into an HNN-extension over dom(phi1) -----------


def eliminate_z_generators(
    ctx: Solve,
    relations: list[tuple[tuple, int, int, tuple]],
    universe: list[tuple],
    iso1: G.PartialIso,
) -> tuple[HnnInstance, dict[Symbol, tuple[Symbol, ...]]]:
    """Cross relations Z1 a1 = a2 Z2 eliminate Z2 as a2^-1 Z1 a1; the
    union-find tracks Z = l * root * r with coefficients in dom(phi1).
    Leftover self-relations per root close into the graph of a partial
    automorphism (conjugation by the root), giving an HNN-extension whose
    base is dom(phi1) as a group of its own."""
    group = iso1.dom.group
    e = group.identity
    mul, inv = group.mul, group.inv
    parent: dict[tuple, tuple[tuple, int, int]] = {z: (z, e, e) for z in universe}

    def find(z: tuple) -> tuple[tuple, int, int]:
        chain = []
        cur = z
        while parent[cur][0] != cur:
            chain.append(cur)
            cur = parent[cur][0]
        root = cur
        # compress near-root first so each step folds one coefficient pair
        for x in reversed(chain):
            p, l, r = parent[x]
            if p != root:
                _, pl, pr = parent[p]
                parent[x] = (root, mul(l, pl), mul(pr, r))
        return (root, e, e) if z == root else parent[z]

    changed = True
    while changed:
        changed = False
        for z1, a1, a2, z2 in relations:
            r1, l1, rr1 = find(z1)
            r2, l2, rr2 = find(z2)
            if r1 == r2:
                continue
            # l1 r1 rr1 a1 = a2 l2 r2 rr2  =>  r2 = L r1 R
            big_l = mul(inv(mul(a2, l2)), l1)
            big_r = mul(mul(rr1, a1), inv(rr2))
            parent[r2] = (r1, big_l, big_r)
            changed = True

    pairs: dict[tuple, set[tuple[int, int]]] = {}
    roots = sorted({find(z)[0] for z in universe})
    for r in roots:
        pairs[r] = set()
    for z1, a1, a2, z2 in relations:
        r1, l1, rr1 = find(z1)
        r2, l2, rr2 = find(z2)
        if r1 != r2:
            raise solvers.SolverError("union-find failed to converge")
        # l1 R rr1 a1 = a2 l2 R rr2  =>  R^-1 x R = y
        x = mul(inv(mul(a2, l2)), l1)
        y = mul(rr2, inv(mul(rr1, a1)))
        pairs[r1].add((x, y))

    new_group, to_new = G.subgroup_as_group(iso1.dom)
    full = G.Subgroup(new_group, frozenset(range(new_group.order)))
    letters = []
    for r in roots:
        closure = _pair_closure(group, pairs[r])
        graph: dict[int, int] = {}
        reverse: dict[int, int] = {}
        for x, y in closure:
            if graph.setdefault(x, y) != y or reverse.setdefault(y, x) != x:
                raise solvers.SolverError(
                    "relation closure is not a partial automorphism graph"
                )
        mapping = {to_new[x]: to_new[y] for x, y in graph.items()}
        dom = G.Subgroup(new_group, frozenset(mapping))
        ran = G.Subgroup(new_group, frozenset(mapping.values()))
        letters.append((r, G.PartialIso.build(dom, ran, mapping)))

    inst = HnnInstance(G.FiniteDesc(new_group), full, full, tuple(letters))

    images: dict[Symbol, tuple[Symbol, ...]] = {}
    for z in universe:
        root, l, r = find(z)
        pos: list[Symbol] = []
        if l != e:
            pos.append(new_group.sym(to_new[l]))
        pos.append(Symbol(KIND_T, root, 1))
        if r != e:
            pos.append(new_group.sym(to_new[r]))
        images[Symbol(KIND_T, z, 1)] = tuple(pos)
        images[Symbol(KIND_T, z, -1)] = tuple(s.inverse() for s in reversed(pos))
    return inst, images


def _pair_closure(group: G.FiniteGroup, seeds: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Subgroup of group x group generated by the seed pairs."""
    e = group.identity
    closure = {(e, e)} | set(seeds)
    frontier = list(closure)
    while frontier:
        x1, y1 = frontier.pop()
        for x2, y2 in list(closure):
            for cand in (
                (group.mul(x1, x2), group.mul(y1, y2)),
                (group.inv(x1), group.inv(y1)),
            ):
                if cand not in closure:
                    closure.add(cand)
                    frontier.append(cand)
    return closure


# --- public wrappers ------------------------------------------------------------------


def ucwp(desc: G.HnnDesc, w: CompressedWord, config: solvers.SolveConfig | None = None):
    """Triviality in a multiple HNN-extension, as a Verdict."""
    return solvers.cwp(desc, w, config)


def rcwp(
    desc: G.HnnDesc,
    u: CompressedWord,
    v: CompressedWord,
    config: solvers.SolveConfig | None = None,
):
    """Equality of two already pinch-free words, as a Verdict."""
    G.check_word_symbols(desc, u)
    G.check_word_symbols(desc, v)
    ctx = solvers._make_ctx(desc, config)
    answer = rucwp_equal(ctx, instance_from_desc(desc), u, v)
    return solvers._verdict(ctx, answer, "equality")


def reduce_word(
    desc: G.HnnDesc, w: CompressedWord, config: solvers.SolveConfig | None = None
) -> CompressedWord:
    """Pinch-free form of a word over an HNN-extension (the CLI `reduce`)."""
    G.check_word_symbols(desc, w)
    ctx = solvers._make_ctx(desc, config)
    return reduce_to_reduced(ctx, instance_from_desc(desc), w)

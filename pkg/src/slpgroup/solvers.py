"""Compressed word problem solvers for the non-HNN group constructions,
plus the dispatcher and the per-solve context shared with the HNN pipeline.

Every solver works entirely on compressed words: finite groups fold the
multiplication table bottom-up over the grammar, free groups cancel with
binary search over fingerprinted prefixes, free products maintain canonical
alternating normal forms, semidirect products push the finite part through
the grammar as in the bottom-up element computation, and amalgamated
products embed into an HNN-extension over the free product of their
factors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Hashable, Sequence

from . import groups as G
from . import slp
from .slp import (
    EPSILON,
    KIND_GEN,
    KIND_T,
    CompressedWord,
    FingerprintContext,
    Symbol,
    max_true,
)


class SolverError(Exception):
    pass


class DepthExceeded(SolverError):
    """The pipeline recursed deeper than the structural bound allows; this
    signals a bug, not a hard instance."""


class ScanBudgetExceeded(SolverError):
    pass


def delta_bound(assoc_order: int) -> int:
    """Stable-letter bound after class collapsing: 2 * |A|! * 2**|A|."""
    fact = 1
    for k in range(2, assoc_order + 1):
        fact *= k
    return 2 * fact * (2**assoc_order)


def default_depth_bound(desc: G.GroupDesc) -> int:
    """Sum of |A| * delta(|A|) over the HNN/amalgam nodes of the description."""
    total = 0
    stack = [desc]
    while stack:
        d = stack.pop()
        if isinstance(d, G.FreeProductDesc):
            stack.extend((d.left, d.right))
        elif isinstance(d, G.HnnDesc):
            total += d.sub_a.order * delta_bound(d.sub_a.order)
            stack.append(d.base)
        elif isinstance(d, G.AmalgamDesc):
            total += d.iso.dom.order * delta_bound(d.iso.dom.order)
            stack.extend((d.h1, d.h2))
    return max(total, 16)


@dataclass
class SolveConfig:
    fp_bits: int = 128
    max_exact_len: int = 4096
    seed: int | None = None
    cap: int = 10**6
    max_depth: int | None = None
    block_scan_cap: int = 100_000
    stats_stream: object = None


@dataclass
class Verdict:
    """Answer plus the diagnostics the acceptance bounds are stated over."""

    positive: bool  # trivial (solve mode) / equal (equality mode)
    mode: str
    queries: int
    depth: int
    fp_bits: int
    collapse_letters: int

    @property
    def answer(self) -> str:
        if self.mode == "equality":
            return "EQUAL" if self.positive else "UNEQUAL"
        return "TRIVIAL" if self.positive else "NONTRIVIAL"


class Solve:
    """Mutable per-invocation state: fingerprints, memo tables, counters.

    A solve is one logical thread of control; the caches in here are never
    shared between solves, while all word/group inputs are immutable and
    freely shared.
    """

    def __init__(self, config: SolveConfig, depth_bound: int):
        self.cfg = config
        self.fp = FingerprintContext(
            fp_bits=config.fp_bits,
            seed=config.seed,
            max_exact_len=config.max_exact_len,
        )
        self.depth_bound = depth_bound
        self.depth = 0
        self.max_depth = 0
        self.queries = 0
        self.collapse_letters = 0
        self._memos: dict[str, dict] = {}

    def memo(self, name: str) -> dict:
        got = self._memos.get(name)
        if got is None:
            got = self._memos[name] = {}
        return got

    def emit(self, stage: str, **fields) -> None:
        stream = self.cfg.stats_stream
        if stream is not None:
            stream.write(json.dumps({"stage": stage, **fields}) + "\n")

    def enter_step(self) -> None:
        self.depth += 1
        self.max_depth = max(self.max_depth, self.depth)
        if self.depth > self.depth_bound:
            raise DepthExceeded(
                f"pipeline depth {self.depth} exceeds bound {self.depth_bound}"
            )

    def leave_step(self) -> None:
        self.depth -= 1

    def count_query(self) -> None:
        self.queries += 1

    def key(self, w: CompressedWord) -> tuple[int, int]:
        return self.fp.string_key(w)


def _make_ctx(desc: G.GroupDesc, config: SolveConfig | None) -> Solve:
    cfg = config or SolveConfig()
    bound = cfg.max_depth if cfg.max_depth is not None else default_depth_bound(desc)
    return Solve(cfg, bound)


def _verdict(ctx: Solve, positive: bool, mode: str) -> Verdict:
    ctx.emit(
        "verdict",
        positive=positive,
        mode=mode,
        queries=ctx.queries,
        depth=ctx.max_depth,
        collapse_letters=ctx.collapse_letters,
    )
    return Verdict(
        positive=positive,
        mode=mode,
        queries=ctx.queries,
        depth=ctx.max_depth,
        fp_bits=ctx.cfg.fp_bits,
        collapse_letters=ctx.collapse_letters,
    )


def cwp(desc: G.GroupDesc, w: CompressedWord, config: SolveConfig | None = None) -> Verdict:
    """Does the compressed word represent the identity of the group?"""
    G.check_word_symbols(desc, w)
    ctx = _make_ctx(desc, config)
    return _verdict(ctx, trivial_in(ctx, desc, w), "triviality")


def cwp_equal(
    desc: G.GroupDesc,
    u: CompressedWord,
    v: CompressedWord,
    config: SolveConfig | None = None,
) -> Verdict:
    G.check_word_symbols(desc, u)
    G.check_word_symbols(desc, v)
    ctx = _make_ctx(desc, config)
    answer = trivial_in(ctx, desc, slp.concat(u, slp.invert(v)))
    return _verdict(ctx, answer, "equality")


def trivial_in(ctx: Solve, desc: G.GroupDesc, w: CompressedWord) -> bool:
    """Dispatch on the description variant (the recursion workhorse)."""
    ctx.count_query()
    if isinstance(desc, G.FiniteDesc):
        return finite_value(ctx, desc.group, w) == desc.group.identity
    if isinstance(desc, G.FreeDesc):
        return slp.is_empty(free_reduce(ctx, w))
    if isinstance(desc, G.FreeProductDesc):
        return free_product_trivial(ctx, desc, w)
    if isinstance(desc, G.SemidirectDesc):
        return semidirect_trivial(ctx, desc, w)
    if isinstance(desc, G.HnnDesc):
        from . import hnn

        return hnn.ucwp_trivial(ctx, hnn.instance_from_desc(desc), w)
    if isinstance(desc, G.AmalgamDesc):
        return amalgam_trivial(ctx, desc, w)
    raise SolverError(f"no solver for {desc!r}")


# --- finite groups --------------------------------------------------------------


def finite_value(ctx: Solve, group: G.FiniteGroup, w: CompressedWord) -> int:
    """Element index of val(w), folded bottom-up without decompression.

    Slice rules fold only the pieces inside their range: the rest of the
    referenced grammar may carry symbols from a larger alphabet.
    """
    cache = ctx.memo("finite").setdefault(id(group), {})

    def fold_syms(syms: Sequence[Symbol]) -> int:
        acc = group.identity
        for s in syms:
            idx = group.index(s.ident)
            if s.sign < 0:
                idx = group.inv(idx)
            acc = group.mul(acc, idx)
        return acc

    pieces_of: dict[int, list] = {}
    stack = [w.root]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        kind = slp._NODES[node]
        if kind[0] == "word":
            cache[node] = fold_syms(kind[1])
            stack.pop()
        elif kind[0] == "pair":
            missing = [c for c in (kind[1], kind[2]) if c not in cache]
            if missing:
                stack.extend(missing)
                continue
            cache[node] = group.mul(cache[kind[1]], cache[kind[2]])
            stack.pop()
        else:
            _, inner, lo, hi = kind
            pieces = pieces_of.get(node)
            if pieces is None:
                pieces = pieces_of[node] = list(slp._range_pieces(inner, lo, hi))
            missing = [p for p in pieces if isinstance(p, int) and p not in cache]
            if missing:
                stack.extend(missing)
                continue
            acc = group.identity
            for piece in pieces:
                part = cache[piece] if isinstance(piece, int) else fold_syms(piece)
                acc = group.mul(acc, part)
            cache[node] = acc
            pieces_of.pop(node, None)
            stack.pop()
    return cache[w.root]


def cwp_finite(
    group: G.FiniteGroup, w: CompressedWord, config: SolveConfig | None = None
) -> Verdict:
    return cwp(G.FiniteDesc(group), w, config)


# --- free groups ----------------------------------------------------------------


def free_reduce(ctx: Solve, w: CompressedWord) -> CompressedWord:
    """Freely reduced form of val(w), assembled from slice rules.

    Per grammar pair the cancellation length between the reduced children is
    found by binary search: k letters cancel iff the inverted k-suffix of the
    left child equals the k-prefix of the right one, a monotone predicate
    decided by fingerprint equality.
    """
    if slp.is_empty(w):
        return EPSILON
    cache = ctx.memo("free_reduce")
    c = slp.to_cnf(w)
    for node in slp._reachable_postorder(c.root):
        if node in cache:
            continue
        kind = slp._NODES[node]
        if kind[0] == "word":
            cache[node] = node
            continue
        y = CompressedWord(cache[kind[1]])
        z = CompressedWord(cache[kind[2]])
        ny, nz = slp.length(y), slp.length(z)
        if ny == 0 or nz == 0:
            cache[node] = y.root if nz == 0 else z.root
            continue
        y_inv = slp.invert(y)

        def cancels(k: int) -> bool:
            if k == 0:
                return True
            ctx.count_query()
            return ctx.fp.equal(slp.prefix(y_inv, k), slp.prefix(z, k))

        k = max_true(0, min(ny, nz), cancels)
        left = slp.prefix(y, ny - k) if k < ny else EPSILON
        right = slp.suffix_from(z, k + 1) if k < nz else EPSILON
        cache[node] = slp.concat(left, right).root
    return CompressedWord(cache[c.root])


def cwp_free(w: CompressedWord, config: SolveConfig | None = None) -> Verdict:
    gens = tuple(sorted({s.ident for s in slp.alphabet(w)}, key=repr))
    return cwp(G.FreeDesc(gens or ("x0",)), w, config)


# --- free products ----------------------------------------------------------------


class _NoFastNF(Exception):
    pass


class _ProductForm:
    """Canonical normal forms for a free product whose factors are finite
    groups or free groups (nested free products are flattened).

    The canonical string spells each finite block as one non-identity
    element symbol and each free block as its reduced word, so value
    equality is string equality and the inverse form is a symbol-wise
    rewrite of the reversed string.
    """

    def __init__(self, ctx: Solve, factors: list[G.GroupDesc]):
        self.ctx = ctx
        self.factors = factors
        self.side: dict[Hashable, int] = {}
        self.finite: dict[int, G.FiniteGroup] = {}
        for k, f in enumerate(factors):
            if isinstance(f, G.FiniteDesc):
                self.finite[k] = f.group
            elif not isinstance(f, G.FreeDesc):
                raise _NoFastNF(f.kind)
            for ident in f.alphabet():
                self.side[ident] = k
        self.inv_images: dict[Symbol, tuple[Symbol, ...]] = {}
        for group in self.finite.values():
            for idx in range(group.order):
                self.inv_images[group.sym(idx, -1)] = (group.sym(group.inv(idx)),)
        self._nf: dict[int, int] = {}
        self._coform: dict[int, int] = {}

    def normal_form(self, w: CompressedWord) -> CompressedWord:
        if slp.is_empty(w):
            return EPSILON
        c = slp.to_cnf(w)
        cache = self._nf
        for node in slp._reachable_postorder(c.root):
            if node in cache:
                continue
            kind = slp._NODES[node]
            if kind[0] == "word":
                cache[node] = self._terminal(kind[1][0]).root
            else:
                cache[node] = self._join(
                    CompressedWord(cache[kind[1]]), CompressedWord(cache[kind[2]])
                ).root
        return CompressedWord(cache[c.root])

    def _terminal(self, s: Symbol) -> CompressedWord:
        k = self.side[s.ident]
        group = self.finite.get(k)
        if group is None:
            return slp.from_symbols([s])
        idx = group.index(s.ident)
        if s.sign < 0:
            idx = group.inv(idx)
        if idx == group.identity:
            return EPSILON
        return slp.from_symbols([group.sym(idx)])

    def _inverse_form(self, w: CompressedWord) -> CompressedWord:
        got = self._coform.get(w.root)
        if got is None:
            inv = slp.apply_homomorphism(slp.invert(w), self.inv_images, missing="id")
            self._coform[w.root] = inv.root
            got = inv.root
        return CompressedWord(got)

    def _join(self, s: CompressedWord, t: CompressedWord) -> CompressedWord:
        ns, nt = slp.length(s), slp.length(t)
        if ns == 0 or nt == 0:
            return s if nt == 0 else t
        u = self._inverse_form(t)

        def match(k: int) -> bool:
            if k == 0:
                return True
            self.ctx.count_query()
            return self.ctx.fp.equal(
                slp.subword(s, ns - k + 1, ns), slp.subword(u, nt - k + 1, nt)
            )

        k = max_true(0, min(ns, nt), match)
        left = slp.prefix(s, ns - k) if k < ns else EPSILON
        right = slp.suffix_from(t, k + 1) if k < nt else EPSILON
        if slp.is_empty(left) or slp.is_empty(right):
            return slp.concat(left, right)
        a = slp.char_at(left, slp.length(left))
        b = slp.char_at(right, 1)
        ka, kb = self.side[a.ident], self.side[b.ident]
        if ka != kb:
            return slp.concat(left, right)
        group = self.finite.get(ka)
        if group is None:
            # adjoining free blocks just concatenate: the junction cannot
            # cancel, or the suffix match would have extended
            return slp.concat(left, right)
        ia = group.index(a.ident) if a.sign > 0 else group.inv(group.index(a.ident))
        ib = group.index(b.ident) if b.sign > 0 else group.inv(group.index(b.ident))
        merged = group.mul(ia, ib)
        if merged == group.identity:
            raise SolverError("normal-form junction collapsed; fingerprints lied")
        return slp.concat(
            slp.prefix(left, slp.length(left) - 1),
            slp.from_symbols([group.sym(merged)]),
            slp.suffix_from(right, 2),
        )


def free_product_trivial(ctx: Solve, desc: G.FreeProductDesc, w: CompressedWord) -> bool:
    factors = _flatten_product(desc)
    try:
        form = _product_form(ctx, factors)
    except _NoFastNF:
        return _free_product_scan(ctx, factors, w)
    return slp.is_empty(form.normal_form(w))


def free_product_normal_form(
    ctx: Solve, desc: G.FreeProductDesc, w: CompressedWord
) -> CompressedWord:
    return _product_form(ctx, _flatten_product(desc)).normal_form(w)


def _product_form(ctx: Solve, factors: list[G.GroupDesc]) -> _ProductForm:
    key = tuple(f.key() for f in factors)
    cache = ctx.memo("product_forms")
    got = cache.get(key)
    if got is None:
        got = _ProductForm(ctx, factors)
        cache[key] = got
    return got


def _flatten_product(desc: G.GroupDesc) -> list[G.GroupDesc]:
    if isinstance(desc, G.FreeProductDesc):
        return _flatten_product(desc.left) + _flatten_product(desc.right)
    return [desc]


def _free_product_scan(ctx: Solve, factors: list[G.GroupDesc], w: CompressedWord) -> bool:
    """Correct-but-linear fallback for factor kinds without a canonical
    string form: enumerate maximal single-factor runs left to right and
    cancel with a stack of (factor, word) blocks."""
    side: dict[Hashable, int] = {}
    keys: list[frozenset] = []
    for k, f in enumerate(factors):
        idents = frozenset(f.alphabet())
        keys.append(idents)
        for ident in idents:
            side[ident] = k
    n = slp.length(w)
    stack: list[tuple[int, CompressedWord]] = []
    pos = 1
    steps = 0
    while pos <= n:
        steps += 1
        if steps > ctx.cfg.block_scan_cap:
            raise ScanBudgetExceeded(
                "free-product block scan exceeded its budget; factors have no "
                "canonical form and the word cancels too deeply"
            )
        k = side[slp.char_at(w, pos).ident]
        limit = n - pos + 1
        run = max_true(
            1,
            limit,
            lambda r: slp.count_letters(slp.subword(w, pos, pos + r - 1), keys[k]) == r,
        )
        blockword = slp.subword(w, pos, pos + run - 1)
        pos += run
        while True:
            if stack and stack[-1][0] == k:
                blockword = slp.concat(stack.pop()[1], blockword)
            if trivial_in(ctx, factors[k], blockword):
                if not stack:
                    break
                k, blockword = stack.pop()
                continue
            stack.append((k, blockword))
            break
    return not stack


def cwp_free_product(
    left: G.GroupDesc,
    right: G.GroupDesc,
    w: CompressedWord,
    config: SolveConfig | None = None,
) -> Verdict:
    return cwp(G.FreeProductDesc(left, right), w, config)


# --- semidirect products -----------------------------------------------------------


def semidirect_trivial(ctx: Solve, desc: G.SemidirectDesc, w: CompressedWord) -> bool:
    """Trivial iff the stable-letter projection dies in the free group and
    the pushed-through finite part is the identity."""
    group = desc.group
    letters = frozenset(desc.letters)
    perms: dict[Hashable, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for l, auto in zip(desc.letters, desc.autos):
        m = auto.as_dict()
        fwd = tuple(m[i] for i in range(group.order))
        bwd = tuple(sorted(range(group.order), key=lambda i: fwd[i]))
        perms[l] = (fwd, bwd)
    identity_perm = tuple(range(group.order))

    cache = ctx.memo("semidirect").setdefault(id(desc), {})

    def fold_syms(syms: Sequence[Symbol]) -> tuple[int, tuple[int, ...]]:
        h, f = group.identity, identity_perm
        for s in syms:
            got = perms.get(s.ident)
            if got is not None:
                table = got[0] if s.sign > 0 else got[1]
                h = table[h]
                f = tuple(table[f[i]] for i in range(group.order))
            else:
                idx = group.index(s.ident)
                if s.sign < 0:
                    idx = group.inv(idx)
                h = group.mul(h, idx)
        return h, f

    def combine(a, b):
        ha, fa = a
        hb, fb = b
        return group.mul(fb[ha], hb), tuple(fb[fa[i]] for i in range(group.order))

    root = slp.normalize(w).root
    for node in slp._reachable_postorder(root):
        if node in cache:
            continue
        kind = slp._NODES[node]
        if kind[0] == "word":
            cache[node] = fold_syms(kind[1])
        else:
            cache[node] = combine(cache[kind[1]], cache[kind[2]])
    h, _ = cache[root]
    if h != group.identity:
        return False
    projection = slp.project_idents(w, letters)
    return slp.is_empty(free_reduce(ctx, projection))


def cwp_semidirect(
    desc: G.SemidirectDesc, w: CompressedWord, config: SolveConfig | None = None
) -> Verdict:
    return cwp(desc, w, config)


# --- amalgamated products ------------------------------------------------------------


def amalgam_trivial(ctx: Solve, desc: G.AmalgamDesc, w: CompressedWord) -> bool:
    """Embed into the HNN-extension over h1*h2 and solve there."""
    hnn_desc, image = G.amalgam_embedding(desc)
    from . import hnn

    embedded = slp.apply_homomorphism(w, image, missing="id")
    ctx.emit("amalgam-embedding", size=slp.length(embedded))
    return hnn.ucwp_trivial(ctx, hnn.instance_from_desc(hnn_desc), embedded)


def cwp_amalgam(
    desc: G.AmalgamDesc, w: CompressedWord, config: SolveConfig | None = None
) -> Verdict:
    return cwp(desc, w, config)

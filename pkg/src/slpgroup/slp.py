"""Grammar-compressed words: straight-line programs with substring rules.

A compressed word is a DAG of productions over typed symbols.  Production
forms are

    ("word", (s0, s1, ...))    explicit (possibly empty) run of symbols
    ("pair", left, right)      concatenation of two non-empty nodes
    ("slice", node, lo, hi)    the substring val(node)[lo:hi], 1-based
                               inclusive bounds

Nodes live in a process-global interning arena: structurally identical
productions share one id, so caches keyed by node id (lengths, occurrence
counts, normal forms, fingerprints) are sound forever.  All lengths and
indices are plain Python ints and routinely exceed 2**50; nothing here ever
materializes a value unless explicitly asked to decompress under a cap.

Equality of values is decided by `FingerprintContext.equal`: positional
polynomial fingerprints modulo a random prime of at least `fp_bits` bits,
with exact comparison below `max_exact_len`.  Equal strings always compare
equal; unequal strings collide with probability <= 2**-fp_bits per query.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

KIND_GEN = "gen"      # base-group generator / finite-group element
KIND_T = "t"          # stable letter
KIND_BLOCK = "block"  # base-word block inside a skeleton
KIND_END = "end"      # end marker for transducer input


class SlpError(Exception):
    pass


class OutOfRange(SlpError):
    pass


class TooLong(SlpError):
    """Decompression would exceed the requested cap."""


class MissingImage(SlpError):
    pass


class TransducerUndefined(SlpError):
    pass


@dataclass(frozen=True, slots=True)
class Symbol:
    """One terminal: a kind tag, an opaque identifier and a sign.

    Generators and stable letters invert by flipping the sign; block and
    end-marker symbols have no formal inverse.
    """

    kind: str
    ident: Hashable
    sign: int = 1

    def inverse(self) -> "Symbol":
        if self.kind in (KIND_BLOCK, KIND_END):
            raise SlpError(f"symbol {self} has no formal inverse")
        return Symbol(self.kind, self.ident, -self.sign)

    def __str__(self) -> str:
        base = self.ident if isinstance(self.ident, str) else repr(self.ident)
        return f"{base}^-1" if self.sign < 0 else f"{base}"


def gen(ident: Hashable, sign: int = 1) -> Symbol:
    return Symbol(KIND_GEN, ident, sign)


def stable(ident: Hashable, sign: int = 1) -> Symbol:
    return Symbol(KIND_T, ident, sign)


def block_symbol(ident: Hashable) -> Symbol:
    return Symbol(KIND_BLOCK, ident, 1)


END_MARKER = Symbol(KIND_END, "$", 1)


# --- the interning arena ----------------------------------------------------

_next_id = itertools.count(1)
_NODES: dict[int, tuple] = {}
_WORD_IDS: dict[tuple, int] = {}
_PAIR_IDS: dict[tuple[int, int], int] = {}
_SLICE_IDS: dict[tuple[int, int, int], int] = {}
_LEN: dict[int, int] = {}
_INV: dict[int, int] = {}
_NORM: dict[int, int] = {}
_CNF: dict[int, int] = {}
_FIRST_LAST: dict[int, tuple[Symbol, Symbol]] = {}
_COUNT: dict[tuple[int, object], int] = {}

EMPTY_ID = None  # set below once mk_word exists


def _new_node(node: tuple, length: int) -> int:
    i = next(_next_id)
    _NODES[i] = node
    _LEN[i] = length
    return i


def mk_word(symbols: Sequence[Symbol]) -> int:
    key = tuple(symbols)
    got = _WORD_IDS.get(key)
    if got is None:
        got = _new_node(("word", key), len(key))
        _WORD_IDS[key] = got
    return got


def mk_pair(left: int, right: int) -> int:
    if _LEN[left] == 0:
        return right
    if _LEN[right] == 0:
        return left
    key = (left, right)
    got = _PAIR_IDS.get(key)
    if got is None:
        got = _new_node(("pair", left, right), _LEN[left] + _LEN[right])
        _PAIR_IDS[key] = got
    return got


def mk_slice(node: int, lo: int, hi: int) -> int:
    n = _LEN[node]
    if lo == hi + 1:  # the empty slice is allowed as a convenience
        return EMPTY_ID
    if not (1 <= lo <= hi <= n):
        raise OutOfRange(f"slice [{lo}:{hi}] of a word of length {n}")
    if lo == 1 and hi == n:
        return node
    kind = _NODES[node]
    if kind[0] == "word":
        return mk_word(kind[1][lo - 1 : hi])
    if kind[0] == "slice":
        _, inner, ilo, _ihi = kind
        return mk_slice(inner, ilo + lo - 1, ilo + hi - 1)
    key = (node, lo, hi)
    got = _SLICE_IDS.get(key)
    if got is None:
        got = _new_node(("slice", node, lo, hi), hi - lo + 1)
        _SLICE_IDS[key] = got
    return got


EMPTY_ID = mk_word(())


class CompressedWord:
    """Immutable handle on one node of the arena.

    Two handles with the same `root` denote the same string; distinct roots
    may still denote equal strings (use `FingerprintContext.equal`).
    """

    __slots__ = ("root",)

    def __init__(self, root: int):
        self.root = root

    def length(self) -> int:
        return _LEN[self.root]

    def __repr__(self) -> str:
        n = _LEN[self.root]
        if n <= 16:
            return "<word " + " ".join(str(s) for s in decompress(self, 16)) + ">"
        return f"<word of length {n}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, CompressedWord) and self.root == other.root

    def __hash__(self) -> int:
        return hash(self.root)


EPSILON = CompressedWord(EMPTY_ID)


def from_symbols(symbols: Iterable[Symbol]) -> CompressedWord:
    return CompressedWord(mk_word(tuple(symbols)))


def length(w: CompressedWord) -> int:
    return _LEN[w.root]


def is_empty(w: CompressedWord) -> bool:
    return _LEN[w.root] == 0


def concat(*words: CompressedWord) -> CompressedWord:
    root = EMPTY_ID
    for w in words:
        root = mk_pair(root, w.root)
    return CompressedWord(root)


def subword(w: CompressedWord, lo: int, hi: int) -> CompressedWord:
    """val(w)[lo:hi] with 1-based inclusive bounds, as a slice rule."""
    return CompressedWord(mk_slice(w.root, lo, hi))


def prefix(w: CompressedWord, k: int) -> CompressedWord:
    return CompressedWord(mk_slice(w.root, 1, k))


def suffix_from(w: CompressedWord, lo: int) -> CompressedWord:
    return CompressedWord(mk_slice(w.root, lo, _LEN[w.root]))


def char_at(w: CompressedWord, i: int) -> Symbol:
    node = w.root
    if not (1 <= i <= _LEN[node]):
        raise OutOfRange(f"index {i} in a word of length {_LEN[node]}")
    while True:
        kind = _NODES[node]
        if kind[0] == "word":
            return kind[1][i - 1]
        if kind[0] == "pair":
            _, left, right = kind
            if i <= _LEN[left]:
                node = left
            else:
                i -= _LEN[left]
                node = right
        else:
            _, inner, lo, _hi = kind
            node = inner
            i += lo - 1


def first_last(node: int) -> tuple[Symbol, Symbol]:
    got = _FIRST_LAST.get(node)
    if got is None:
        w = CompressedWord(node)
        got = (char_at(w, 1), char_at(w, _LEN[node]))
        _FIRST_LAST[node] = got
    return got


def _reachable_postorder(root: int) -> list[int]:
    """All nodes under root, children before parents, each once."""
    order: list[int] = []
    seen: set[int] = set()
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        kind = _NODES[node]
        if kind[0] == "pair":
            stack.append((kind[1], False))
            stack.append((kind[2], False))
        elif kind[0] == "slice":
            stack.append((kind[1], False))
    return order


def _range_pieces(node: int, lo: int, hi: int) -> Iterator[object]:
    """Decompose val(node)[lo:hi] into O(depth) pieces, left to right.

    Yields either a node id (a full subtree) or a tuple of symbols (a part
    of an explicit word).  Bounds are assumed valid; lo <= hi.
    """
    stack: list[tuple[int, int, int]] = [(node, lo, hi)]
    while stack:
        n, a, b = stack.pop()
        if a == 1 and b == _LEN[n]:
            yield n
            continue
        kind = _NODES[n]
        if kind[0] == "word":
            yield kind[1][a - 1 : b]
        elif kind[0] == "slice":
            _, inner, ilo, _ihi = kind
            stack.append((inner, ilo + a - 1, ilo + b - 1))
        else:
            _, left, right = kind
            nl = _LEN[left]
            if b <= nl:
                stack.append((left, a, b))
            elif a > nl:
                stack.append((right, a - nl, b - nl))
            else:
                stack.append((right, 1, b - nl))
                stack.append((left, a, nl))


# --- inversion ---------------------------------------------------------------


def invert(w: CompressedWord) -> CompressedWord:
    """Reversed word with every symbol formally inverted (mirror grammar)."""
    for node in _reachable_postorder(w.root):
        if node in _INV:
            continue
        kind = _NODES[node]
        if kind[0] == "word":
            inv = mk_word(tuple(s.inverse() for s in reversed(kind[1])))
        elif kind[0] == "pair":
            inv = mk_pair(_INV[kind[2]], _INV[kind[1]])
        else:
            _, inner, lo, hi = kind
            n = _LEN[inner]
            inv = mk_slice(_INV[inner], n - hi + 1, n - lo + 1)
        _INV[node] = inv
        _INV.setdefault(inv, node)
    return CompressedWord(_INV[w.root])


# --- occurrence counting -----------------------------------------------------

ALL_STABLE = "all-stable-letters"


def _key_matches(key, sym: Symbol) -> bool:
    if key is ALL_STABLE:
        return sym.kind == KIND_T
    return sym.ident in key


def count_letters(w: CompressedWord, key) -> int:
    """Occurrences of matching symbols; key is ALL_STABLE or an ident set."""
    root = w.root
    got = _COUNT.get((root, key))
    if got is not None:
        return got
    for node in _reachable_postorder(root):
        if (node, key) in _COUNT:
            continue
        kind = _NODES[node]
        if kind[0] == "word":
            c = sum(1 for s in kind[1] if _key_matches(key, s))
        elif kind[0] == "pair":
            c = _COUNT[(kind[1], key)] + _COUNT[(kind[2], key)]
        else:
            _, inner, lo, hi = kind
            c = _count_range(inner, lo, hi, key)
        _COUNT[(node, key)] = c
    return _COUNT[(root, key)]


def _count_range(node: int, lo: int, hi: int, key) -> int:
    if lo > hi:
        return 0
    total = 0
    for piece in _range_pieces(node, lo, hi):
        if isinstance(piece, int):
            total += count_letters(CompressedWord(piece), key)
        else:
            total += sum(1 for s in piece if _key_matches(key, s))
    return total


def kth_letter_position(w: CompressedWord, key, k: int) -> int:
    """1-based position of the k-th matching symbol in val(w)."""
    if not (1 <= k <= count_letters(w, key)):
        raise OutOfRange(f"occurrence {k} of {key!r}")
    node, offset = w.root, 0
    while True:
        kind = _NODES[node]
        if kind[0] == "word":
            for i, s in enumerate(kind[1]):
                if _key_matches(key, s):
                    k -= 1
                    if k == 0:
                        return offset + i + 1
        elif kind[0] == "pair":
            _, left, right = kind
            cl = count_letters(CompressedWord(left), key)
            if k <= cl:
                node = left
            else:
                k -= cl
                offset += _LEN[left]
                node = right
        else:
            _, inner, lo, _hi = kind
            k += _count_range(inner, 1, lo - 1, key)
            offset -= lo - 1
            node = inner


def stable_letter_count(w: CompressedWord) -> int:
    return count_letters(w, ALL_STABLE)


def kth_stable_letter_position(w: CompressedWord, k: int) -> int:
    return kth_letter_position(w, ALL_STABLE, k)


# --- decompression -----------------------------------------------------------


def decompress(w: CompressedWord, cap: int) -> tuple[Symbol, ...]:
    """val(w) as an explicit tuple; raises TooLong above the cap."""
    n = _LEN[w.root]
    if n > cap:
        raise TooLong(f"decompressed length {n} exceeds cap {cap}")
    out: list[Symbol] = []
    stack: list[object] = [w.root]
    while stack:
        item = stack.pop()
        if isinstance(item, tuple):
            out.extend(item)
            continue
        kind = _NODES[item]
        if kind[0] == "word":
            out.extend(kind[1])
        elif kind[0] == "pair":
            stack.append(kind[2])
            stack.append(kind[1])
        else:
            _, inner, lo, hi = kind
            stack.extend(reversed(list(_range_pieces(inner, lo, hi))))
    return tuple(out)


# --- normalization (slice removal) and Chomsky pass --------------------------


def normalize(w: CompressedWord) -> CompressedWord:
    """Equivalent slice-free word; identity on slice-free input."""
    for node in _reachable_postorder(w.root):
        if node in _NORM:
            continue
        kind = _NODES[node]
        if kind[0] == "word":
            _NORM[node] = node
        elif kind[0] == "pair":
            _NORM[node] = mk_pair(_NORM[kind[1]], _NORM[kind[2]])
        else:
            _, inner, lo, hi = kind
            _NORM[node] = _extract(_NORM[inner], lo, hi)
    return CompressedWord(_NORM[w.root])


def _extract(node: int, lo: int, hi: int) -> int:
    """Slice-free node for val(node)[lo:hi]; node itself is slice-free."""
    if lo > hi:
        return EMPTY_ID
    out = EMPTY_ID
    for piece in _range_pieces(node, lo, hi):
        out = mk_pair(out, piece if isinstance(piece, int) else mk_word(piece))
    return out


def to_cnf(w: CompressedWord) -> CompressedWord:
    """Slice-free word whose nodes are pairs or single-symbol words.

    Explicit words are binarized left-leaning; the empty word maps to the
    empty node (callers special-case it).
    """
    base = normalize(w)
    for node in _reachable_postorder(base.root):
        if node in _CNF:
            continue
        kind = _NODES[node]
        if kind[0] == "pair":
            _CNF[node] = mk_pair(_CNF[kind[1]], _CNF[kind[2]])
        else:
            syms = kind[1]
            acc = EMPTY_ID
            for s in syms:
                acc = mk_pair(acc, mk_word((s,)))
            _CNF[node] = acc
    return CompressedWord(_CNF[base.root])


# --- homomorphic images and projection ---------------------------------------


def alphabet(w: CompressedWord) -> set[Symbol]:
    syms: set[Symbol] = set()
    for node in _reachable_postorder(w.root):
        kind = _NODES[node]
        if kind[0] == "word":
            syms.update(kind[1])
    return syms


def apply_homomorphism(
    w: CompressedWord,
    images: dict[Symbol, Sequence[Symbol]],
    missing: str = "error",
) -> CompressedWord:
    """Letter-wise substitution of symbols by words.

    missing="error" raises on a symbol without an image; missing="id" keeps
    such symbols.  Words containing slice rules are normalized first unless
    every image has length one (slice arithmetic survives only
    length-preserving maps).
    """
    length_preserving = all(len(v) == 1 for v in images.values())
    root = w.root if length_preserving else normalize(w).root
    cache: dict[int, int] = {}
    for node in _reachable_postorder(root):
        kind = _NODES[node]
        if kind[0] == "word":
            out: list[Symbol] = []
            for s in kind[1]:
                img = images.get(s)
                if img is None:
                    if missing == "id":
                        out.append(s)
                    else:
                        raise MissingImage(f"no image for symbol {s}")
                else:
                    out.extend(img)
            cache[node] = mk_word(tuple(out))
        elif kind[0] == "pair":
            cache[node] = mk_pair(cache[kind[1]], cache[kind[2]])
        else:
            _, inner, lo, hi = kind
            cache[node] = mk_slice(cache[inner], lo, hi)
    return CompressedWord(cache[root])


def project(w: CompressedWord, keep: Callable[[Symbol], bool]) -> CompressedWord:
    """Erase every symbol for which keep() is false."""
    root = normalize(w).root
    cache: dict[int, int] = {}
    for node in _reachable_postorder(root):
        kind = _NODES[node]
        if kind[0] == "word":
            cache[node] = mk_word(tuple(s for s in kind[1] if keep(s)))
        else:
            cache[node] = mk_pair(cache[kind[1]], cache[kind[2]])
    return CompressedWord(cache[root])


def project_idents(w: CompressedWord, idents: frozenset) -> CompressedWord:
    return project(w, lambda s: s.ident in idents)


# --- deterministic rational transducers --------------------------------------


@dataclass(frozen=True)
class Transducer:
    """Deterministic rational transducer with at most one move per (state, symbol)."""

    initial: Hashable
    finals: frozenset
    rules: dict  # state -> {Symbol: (state, tuple[Symbol, ...])}

    def step(self, state, sym: Symbol):
        table = self.rules.get(state)
        return None if table is None else table.get(sym)


def apply_transducer(t: Transducer, w: CompressedWord) -> CompressedWord:
    """Image of val(w) under the transducer, as a compressed word.

    Tabulates, per (node, entry state), the exit state and an output node;
    raises TransducerUndefined if the run leaves the transition table or
    ends in a non-final state.
    """
    root = normalize(w).root
    cache: dict[tuple[int, Hashable], tuple[Hashable, int]] = {}

    def run(node: int, state):
        key = (node, state)
        got = cache.get(key)
        if got is not None:
            return got
        stack = [(node, state)]
        while stack:
            n, q = stack[-1]
            k = (n, q)
            if k in cache:
                stack.pop()
                continue
            kind = _NODES[n]
            if kind[0] == "word":
                out: list[Symbol] = []
                cur = q
                for s in kind[1]:
                    move = t.step(cur, s)
                    if move is None:
                        raise TransducerUndefined(f"no move from {cur!r} on {s}")
                    cur, emitted = move
                    out.extend(emitted)
                cache[k] = (cur, mk_word(tuple(out)))
                stack.pop()
            else:
                _, left, right = kind
                lk = (left, q)
                if lk not in cache:
                    stack.append((left, q))
                    continue
                mid, lout = cache[lk]
                rk = (right, mid)
                if rk not in cache:
                    stack.append((right, mid))
                    continue
                end, rout = cache[rk]
                cache[k] = (end, mk_pair(lout, rout))
                stack.pop()
        return cache[key]

    state, out = run(root, t.initial)
    if state not in t.finals:
        raise TransducerUndefined(f"run ends in non-final state {state!r}")
    return CompressedWord(out)


# --- fingerprint equality ----------------------------------------------------


def _is_probable_prime(n: int, rng: random.Random, rounds: int = 40) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _random_prime(bits: int, rng: random.Random) -> int:
    while True:
        cand = rng.getrandbits(bits) | (1 << bits) | 1
        if _is_probable_prime(cand, rng):
            return cand


DEFAULT_SEED = 0x5B9

_PRIME_CACHE: dict[tuple[int, int], int] = {}


def _prime_for(bits: int, seed: int) -> int:
    got = _PRIME_CACHE.get((bits, seed))
    if got is None:
        got = _random_prime(bits, random.Random(seed ^ 0x9E3779B97F4A7C15))
        _PRIME_CACHE[(bits, seed)] = got
    return got


class FingerprintContext:
    """Randomized equality of compressed words.

    The fingerprint of s1..sn is sum(code(si) * r**(i-1)) mod p for a random
    prime p >= 2**fp_bits and random base r.  Fingerprints compose over
    concatenation, so they are filled bottom-up over the grammar; slice rules
    are fingerprinted through an on-demand split into O(depth) slice-free
    pieces.  Words no longer than max_exact_len are compared exactly.
    """

    def __init__(
        self,
        fp_bits: int = 128,
        seed: int | None = None,
        max_exact_len: int = 4096,
    ):
        seed = DEFAULT_SEED if seed is None else seed
        rng = random.Random(seed)
        self.fp_bits = fp_bits
        self.max_exact_len = max_exact_len
        self.prime = _prime_for(fp_bits, seed)
        self.base = rng.randrange(2, self.prime - 1)
        self._rng = rng
        self._codes: dict[Symbol, int] = {}
        self._fp: dict[int, int] = {EMPTY_ID: 0}
        self._pw: dict[int, int] = {EMPTY_ID: 1}

    def _code(self, sym: Symbol) -> int:
        got = self._codes.get(sym)
        if got is None:
            got = self._rng.randrange(1, self.prime)
            self._codes[sym] = got
        return got

    def _fold(self, syms: Sequence[Symbol]) -> int:
        p, r = self.prime, self.base
        acc, shift = 0, 1
        for s in syms:
            acc = (acc + self._code(s) * shift) % p
            shift = shift * r % p
        return acc

    def fingerprint(self, w: CompressedWord) -> int:
        root = w.root
        got = self._fp.get(root)
        if got is not None:
            return got
        p, r = self.prime, self.base
        for node in _reachable_postorder(root):
            if node in self._fp:
                continue
            kind = _NODES[node]
            if kind[0] == "word":
                self._fp[node] = self._fold(kind[1])
            elif kind[0] == "pair":
                _, left, right = kind
                self._fp[node] = (
                    self._fp[left] + self._pw[left] * self._fp[right]
                ) % p
            else:
                _, inner, lo, hi = kind
                self._fp[node] = self._range_fp(inner, lo, hi)
            self._pw[node] = pow(r, _LEN[node], p)
        return self._fp[root]

    def _range_fp(self, node: int, lo: int, hi: int) -> int:
        p, r = self.prime, self.base
        acc, shift = 0, 1
        for piece in _range_pieces(node, lo, hi):
            if isinstance(piece, int):
                self.fingerprint(CompressedWord(piece))
                acc = (acc + shift * self._fp[piece]) % p
                shift = shift * self._pw[piece] % p
            else:
                acc = (acc + shift * self._fold(piece)) % p
                shift = shift * pow(r, len(piece), p) % p
        return acc

    def string_key(self, w: CompressedWord) -> tuple[int, int]:
        """(length, fingerprint): a Monte-Carlo identity for the value."""
        return (_LEN[w.root], self.fingerprint(w))

    def equal(self, u: CompressedWord, v: CompressedWord) -> bool:
        if u.root == v.root:
            return True
        if _LEN[u.root] != _LEN[v.root]:
            return False
        if _LEN[u.root] <= self.max_exact_len:
            return decompress(u, self.max_exact_len) == decompress(
                v, self.max_exact_len
            )
        return self.fingerprint(u) == self.fingerprint(v)


def equal_words(
    u: CompressedWord,
    v: CompressedWord,
    fp_bits: int = 128,
    seed: int | None = None,
    max_exact_len: int = 4096,
) -> bool:
    """One-shot equality check; build a FingerprintContext for repeated use."""
    return FingerprintContext(fp_bits, seed, max_exact_len).equal(u, v)


def max_true(lo: int, hi: int, pred: Callable[[int], bool]) -> int:
    """Largest k in [lo, hi] with pred(k), assuming pred is monotone
    (true up to some threshold) and pred(lo) holds."""
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


# --- JSON interchange --------------------------------------------------------

_KIND_TO_JSON = {KIND_GEN: "generator", KIND_T: "stable-letter", KIND_BLOCK: "block", KIND_END: "end-marker"}
_JSON_TO_KIND = {
    "generator": (KIND_GEN, 1),
    "inverse-generator": (KIND_GEN, -1),
    "finite-element": (KIND_GEN, 1),
    "stable-letter": (KIND_T, 1),
    "inverse-stable-letter": (KIND_T, -1),
    "block": (KIND_BLOCK, 1),
    "end-marker": (KIND_END, 1),
}


def _symbol_name(sym: Symbol) -> str:
    if not isinstance(sym.ident, str):
        raise SlpError(f"symbol {sym!r} has a non-string ident; not serializable")
    return sym.ident + ("^-1" if sym.sign < 0 else "")


def to_json(w: CompressedWord) -> dict:
    """Serializable form: terminal descriptors plus named rules.

    Indices are decimal strings so arbitrary-precision bounds survive JSON.
    """
    order = _reachable_postorder(w.root)
    names = {node: f"N{i}" for i, node in enumerate(order)}
    rules = {}
    terminals: dict[str, Symbol] = {}
    for node in order:
        kind = _NODES[node]
        if kind[0] == "word":
            syms = []
            for s in kind[1]:
                base = s if s.sign > 0 else s.inverse()
                terminals.setdefault(_symbol_name(base), base)
                syms.append(_symbol_name(s))
            rules[names[node]] = {"term": syms[0]} if len(syms) == 1 else {"word": syms}
        elif kind[0] == "pair":
            rules[names[node]] = {"pair": [names[kind[1]], names[kind[2]]]}
        else:
            rules[names[node]] = {
                "slice": [names[kind[1]], str(kind[2]), str(kind[3])]
            }
    return {
        "terminals": [
            {"name": name, "kind": _KIND_TO_JSON[s.kind]}
            for name, s in sorted(terminals.items())
        ],
        "start": names[w.root],
        "rules": rules,
    }


def symbol_from_name(name: str, kinds: dict[str, str]) -> Symbol:
    """Resolve "x" / "x^-1" against a name->kind table."""
    sign = 1
    if name.endswith("^-1"):
        sign = -1
        name = name[:-3]
    kind = kinds.get(name)
    if kind is None:
        raise SlpError(f"unknown terminal {name!r}")
    return Symbol(kind, name, sign)


def from_json(data: dict, kinds: dict[str, str] | None = None) -> CompressedWord:
    """Parse the `to_json` format.

    `kinds` (name -> internal kind) overrides/augments the embedded terminal
    descriptors, letting words be resolved against a group's alphabet.
    """
    table: dict[str, str] = {}
    for desc in data.get("terminals", ()):
        kind, _ = _JSON_TO_KIND.get(desc.get("kind", "generator"), (KIND_GEN, 1))
        table[desc["name"]] = kind
    if kinds:
        table.update(kinds)

    rules = data["rules"]
    ids: dict[str, int] = {}

    def build(name: str) -> int:
        if name in ids:
            return ids[name]
        stack = [name]
        pending = {name}

        def need(dep: str) -> bool:
            if dep in ids:
                return False
            if dep in pending:
                raise SlpError(f"rule {dep!r} participates in a cycle")
            stack.append(dep)
            pending.add(dep)
            return True

        while stack:
            cur = stack[-1]
            if cur in ids:
                pending.discard(cur)
                stack.pop()
                continue
            rule = rules.get(cur)
            if rule is None:
                raise SlpError(f"rule {cur!r} is missing")
            if "pair" in rule:
                a, b = rule["pair"]
                if need(a) or need(b):
                    continue
                ids[cur] = mk_pair(ids[a], ids[b])
            elif "slice" in rule:
                src, lo, hi = rule["slice"]
                if need(src):
                    continue
                ids[cur] = mk_slice(ids[src], int(lo), int(hi))
            elif "term" in rule:
                ids[cur] = mk_word((symbol_from_name(rule["term"], table),))
            elif "word" in rule:
                ids[cur] = mk_word(
                    tuple(symbol_from_name(s, table) for s in rule["word"])
                )
            else:
                raise SlpError(f"rule {cur!r} has no recognized form")
            pending.discard(cur)
            stack.pop()
        return ids[name]

    return CompressedWord(build(data["start"]))


def power(w: CompressedWord, n: int) -> CompressedWord:
    """val(w)**n via squaring; grammar size O(log n)."""
    if n < 0:
        raise OutOfRange("negative power")
    result, base = EMPTY_ID, w.root
    while n:
        if n & 1:
            result = mk_pair(result, base)
        base = mk_pair(base, base)
        n >>= 1
    return CompressedWord(result)

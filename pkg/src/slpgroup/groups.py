"""Finite groups by multiplication table, subgroups, partial isomorphisms,
and recursive group descriptions (the inputs the solvers dispatch on).

Element names double as generator-symbol identifiers, so every description
must use globally distinct names across its factors; `validate_desc`
enforces this along with the table axioms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from . import slp
from .slp import KIND_GEN, KIND_T, Symbol


class GroupError(Exception):
    pass


class ForeignSymbol(GroupError):
    pass


class FiniteGroup:
    """A finite group given by element names and an index multiplication
    table.  table[i][j] is the index of names[i] * names[j]."""

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[int]], label: str = ""):
        self.names: tuple[str, ...] = tuple(names)
        self.table: tuple[tuple[int, ...], ...] = tuple(tuple(row) for row in table)
        self.label = label or f"table-group-{len(self.names)}"
        n = len(self.names)
        if len(set(self.names)) != n:
            raise GroupError(f"{self.label}: duplicate element names")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupError(f"{self.label}: table is not {n}x{n}")
        for row in self.table:
            for v in row:
                if not (0 <= v < n):
                    raise GroupError(f"{self.label}: table entry {v} out of range")
        self._index = {name: i for i, name in enumerate(self.names)}
        self.identity = self._find_identity()
        self.inverse = self._find_inverses()

    def _find_identity(self) -> int:
        n = len(self.names)
        for e in range(n):
            if all(self.table[e][x] == x == self.table[x][e] for x in range(n)):
                return e
        raise GroupError(f"{self.label}: no identity element")

    def _find_inverses(self) -> tuple[int, ...]:
        n = len(self.names)
        inv = []
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == self.identity == self.table[b][a]:
                    inv.append(b)
                    break
            else:
                raise GroupError(f"{self.label}: {self.names[a]} has no inverse")
        return tuple(inv)

    @property
    def order(self) -> int:
        return len(self.names)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def index(self, name: str) -> int:
        got = self._index.get(name)
        if got is None:
            raise GroupError(f"{self.label}: unknown element {name!r}")
        return got

    def sym(self, idx: int, sign: int = 1) -> Symbol:
        return Symbol(KIND_GEN, self.names[idx], sign)

    def validate(self) -> None:
        """Full axiom check; names the first violated triple."""
        n = len(self.names)
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                        raise GroupError(
                            f"{self.label}: associativity fails at "
                            f"({self.names[a]}, {self.names[b]}, {self.names[c]})"
                        )
        # identity and inverses were established during construction

    def key(self) -> tuple:
        return ("fin", self.names, self.table)

    @staticmethod
    def from_op(names: Sequence[str], elements: Sequence, op, label: str = "") -> "FiniteGroup":
        idx = {e: i for i, e in enumerate(elements)}
        table = [[idx[op(x, y)] for y in elements] for x in elements]
        return FiniteGroup(names, table, label)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label}, order {self.order})"


@dataclass(frozen=True)
class Subgroup:
    """A subset of a finite group, checked for closure on construction."""

    group: FiniteGroup
    members: frozenset[int]

    def __post_init__(self):
        g = self.group
        if g.identity not in self.members:
            raise GroupError(f"{g.label}: subgroup misses the identity")
        for a in self.members:
            if g.inv(a) not in self.members:
                raise GroupError(f"{g.label}: subgroup not closed under inverse")
            for b in self.members:
                if g.mul(a, b) not in self.members:
                    raise GroupError(
                        f"{g.label}: subgroup not closed at "
                        f"({g.names[a]}, {g.names[b]})"
                    )

    @property
    def order(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def key(self) -> tuple:
        return tuple(sorted(self.group.names[i] for i in self.members))


def subgroup_generated(group: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    """Least subgroup containing the seeds (closure iteration)."""
    members = {group.identity}
    frontier = list(set(seeds))
    members.update(frontier)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(members):
                for c in (group.mul(a, b), group.mul(b, a), group.inv(a)):
                    if c not in members:
                        members.add(c)
                        nxt.append(c)
        frontier = nxt
    return Subgroup(group, frozenset(members))


def all_subgroups(group: FiniteGroup) -> list[frozenset[int]]:
    found = {frozenset([group.identity])}
    for r in range(1, group.order + 1):
        for combo in itertools.combinations(range(group.order), r):
            found.add(subgroup_generated(group, combo).members)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class PartialIso:
    """A group isomorphism from a subgroup onto a subgroup, possibly across
    two different finite groups."""

    dom: Subgroup
    ran: Subgroup
    mapping: tuple[tuple[int, int], ...]  # sorted (dom idx, ran idx) pairs

    def __post_init__(self):
        m = dict(self.mapping)
        if set(m) != set(self.dom.members):
            raise GroupError("partial isomorphism: mapping does not cover its domain")
        if set(m.values()) != set(self.ran.members):
            raise GroupError("partial isomorphism: mapping is not onto its range")
        if len(set(m.values())) != len(m):
            raise GroupError("partial isomorphism: not injective")
        gd, gr = self.dom.group, self.ran.group
        if m[gd.identity] != gr.identity:
            raise GroupError("partial isomorphism: identity is not preserved")
        for a in self.dom.members:
            for b in self.dom.members:
                if m[gd.mul(a, b)] != gr.mul(m[a], m[b]):
                    raise GroupError(
                        "partial isomorphism: not a homomorphism at "
                        f"({gd.names[a]}, {gd.names[b]})"
                    )

    @staticmethod
    def build(dom: Subgroup, ran: Subgroup, mapping: dict[int, int]) -> "PartialIso":
        return PartialIso(dom, ran, tuple(sorted(mapping.items())))

    def apply(self, a: int) -> int:
        for x, y in self.mapping:
            if x == a:
                return y
        raise GroupError("element outside the domain")

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def graph_key(self) -> tuple:
        return tuple(
            (self.dom.group.names[a], self.ran.group.names[b]) for a, b in self.mapping
        )

    def is_total_on(self, sub: Subgroup) -> bool:
        return self.dom.members == sub.members


def compose_partial(f: PartialIso, g: PartialIso) -> PartialIso:
    """x -> f(g(x)) on the largest valid domain (possibly just {1})."""
    gm, fm = g.as_dict(), f.as_dict()
    dom_idx = [x for x in g.dom.members if gm[x] in f.dom.members]
    # the pullback of a subgroup intersection is a subgroup
    members = frozenset(dom_idx)
    mapping = {x: fm[gm[x]] for x in dom_idx}
    dom = Subgroup(g.dom.group, members)
    ran = Subgroup(f.ran.group, frozenset(mapping.values()))
    return PartialIso.build(dom, ran, mapping)


def invert_partial(f: PartialIso) -> PartialIso:
    return PartialIso.build(f.ran, f.dom, {b: a for a, b in f.mapping})


def identity_iso(sub: Subgroup) -> PartialIso:
    return PartialIso.build(sub, sub, {a: a for a in sub.members})


def enumerate_partial_isos(sub_a: Subgroup, sub_b: Subgroup) -> list[PartialIso]:
    """All partial isomorphisms with domain <= sub_a and range <= sub_b."""
    ga, gb = sub_a.group, sub_b.group
    doms = [
        s
        for s in all_subgroups(ga)
        if s <= sub_a.members
    ]
    rans = [
        s
        for s in all_subgroups(gb)
        if s <= sub_b.members
    ]
    out = []
    for d in doms:
        dl = sorted(d)
        for r in rans:
            if len(r) != len(d):
                continue
            for perm in itertools.permutations(sorted(r)):
                mapping = dict(zip(dl, perm))
                try:
                    out.append(
                        PartialIso.build(
                            Subgroup(ga, d), Subgroup(gb, r), mapping
                        )
                    )
                except GroupError:
                    continue
    return out


# --- group descriptions -------------------------------------------------------


class GroupDesc:
    """Base class for recursive group descriptions."""

    kind = "abstract"

    def alphabet(self) -> dict[str, str]:
        """ident -> symbol kind for every generator of this group."""
        raise NotImplementedError

    def key(self) -> tuple:
        raise NotImplementedError

    def finite_parts(self) -> list[FiniteGroup]:
        return []


@dataclass(frozen=True)
class FiniteDesc(GroupDesc):
    group: FiniteGroup

    kind = "finite"

    def alphabet(self) -> dict[str, str]:
        return {name: KIND_GEN for name in self.group.names}

    def key(self) -> tuple:
        return self.group.key()

    def finite_parts(self) -> list[FiniteGroup]:
        return [self.group]


@dataclass(frozen=True)
class FreeDesc(GroupDesc):
    gens: tuple[str, ...]

    kind = "free"

    def alphabet(self) -> dict[str, str]:
        return {g: KIND_GEN for g in self.gens}

    def key(self) -> tuple:
        return ("free", self.gens)


@dataclass(frozen=True)
class FreeProductDesc(GroupDesc):
    left: GroupDesc
    right: GroupDesc

    kind = "free_product"

    def alphabet(self) -> dict[str, str]:
        out = dict(self.left.alphabet())
        out.update(self.right.alphabet())
        return out

    def key(self) -> tuple:
        return ("prod", self.left.key(), self.right.key())

    def finite_parts(self) -> list[FiniteGroup]:
        return self.left.finite_parts() + self.right.finite_parts()


@dataclass(frozen=True)
class SemidirectDesc(GroupDesc):
    """Finite group extended by a free group acting through automorphisms:
    one total automorphism per free letter."""

    group: FiniteGroup
    letters: tuple[Hashable, ...]
    autos: tuple[PartialIso, ...]

    kind = "semidirect"

    def __post_init__(self):
        if len(self.letters) != len(self.autos):
            raise GroupError("semidirect: one automorphism per letter required")
        full = frozenset(range(self.group.order))
        for a in self.autos:
            if a.dom.members != full or a.ran.members != full:
                raise GroupError("semidirect: automorphisms must be total")

    def alphabet(self) -> dict[Hashable, str]:
        out: dict[Hashable, str] = {name: KIND_GEN for name in self.group.names}
        for l in self.letters:
            out[l] = KIND_T
        return out

    def key(self) -> tuple:
        return (
            "semi",
            self.group.key(),
            tuple(self.letters),
            tuple(a.graph_key() for a in self.autos),
        )

    def finite_parts(self) -> list[FiniteGroup]:
        return [self.group]


@dataclass(frozen=True)
class HnnDesc(GroupDesc):
    """HNN-extension of `base` with finite associated subgroups sub_a, sub_b
    and one partial isomorphism (dom <= sub_a, ran <= sub_b) per stable
    letter."""

    base: GroupDesc
    sub_a: Subgroup
    sub_b: Subgroup
    stable: tuple[tuple[Hashable, PartialIso], ...]

    kind = "hnn"

    def alphabet(self) -> dict[Hashable, str]:
        out = dict(self.base.alphabet())
        for ident, _ in self.stable:
            out[ident] = KIND_T
        return out

    def key(self) -> tuple:
        return (
            "hnn",
            self.base.key(),
            self.sub_a.key(),
            self.sub_b.key(),
            tuple((ident, iso.graph_key()) for ident, iso in self.stable),
        )

    def finite_parts(self) -> list[FiniteGroup]:
        return self.base.finite_parts()


@dataclass(frozen=True)
class AmalgamDesc(GroupDesc):
    """Amalgamated free product of h1 and h2 along iso: dom(iso) <= h1's
    finite part, ran(iso) <= h2's."""

    h1: GroupDesc
    h2: GroupDesc
    iso: PartialIso

    kind = "amalgam"

    def alphabet(self) -> dict[Hashable, str]:
        out = dict(self.h1.alphabet())
        out.update(self.h2.alphabet())
        return out

    def key(self) -> tuple:
        return ("amal", self.h1.key(), self.h2.key(), self.iso.graph_key())

    def finite_parts(self) -> list[FiniteGroup]:
        return self.h1.finite_parts() + self.h2.finite_parts()


def validate_desc(desc: GroupDesc) -> None:
    """Check tables, subgroup placement and alphabet distinctness, raising
    GroupError with a location on the first violation."""

    def walk(d: GroupDesc, seen: dict[Hashable, str], path: str) -> None:
        if isinstance(d, FiniteDesc):
            d.group.validate()
            _claim(d.alphabet(), seen, path)
        elif isinstance(d, FreeDesc):
            if len(set(d.gens)) != len(d.gens):
                raise GroupError(f"{path}: duplicate free generators")
            _claim(d.alphabet(), seen, path)
        elif isinstance(d, FreeProductDesc):
            walk(d.left, seen, path + ".left")
            walk(d.right, seen, path + ".right")
        elif isinstance(d, SemidirectDesc):
            d.group.validate()
            _claim(d.alphabet(), seen, path)
        elif isinstance(d, HnnDesc):
            walk(d.base, seen, path + ".base")
            _claim({i: KIND_T for i, _ in d.stable}, seen, path)
            parts = d.base.finite_parts()
            for sub, name in ((d.sub_a, "A"), (d.sub_b, "B")):
                if not any(p is sub.group or p.key() == sub.group.key() for p in parts):
                    raise GroupError(
                        f"{path}: subgroup {name} does not live in a finite part of the base"
                    )
            for ident, iso in d.stable:
                if not iso.dom.members <= d.sub_a.members or iso.dom.group.key() != d.sub_a.group.key():
                    raise GroupError(f"{path}: letter {ident!r}: dom is not inside A")
                if not iso.ran.members <= d.sub_b.members or iso.ran.group.key() != d.sub_b.group.key():
                    raise GroupError(f"{path}: letter {ident!r}: ran is not inside B")
        elif isinstance(d, AmalgamDesc):
            walk(d.h1, seen, path + ".h1")
            walk(d.h2, seen, path + ".h2")
            for sub, side, fac in ((d.iso.dom, "dom", d.h1), (d.iso.ran, "ran", d.h2)):
                parts = fac.finite_parts()
                if not any(p is sub.group or p.key() == sub.group.key() for p in parts):
                    raise GroupError(
                        f"{path}: {side}(iso) does not live in a finite part of its factor"
                    )
        else:
            raise GroupError(f"{path}: unknown description {d!r}")

    def _claim(symbols: dict, seen: dict, path: str) -> None:
        for ident, kind in symbols.items():
            if ident in seen:
                raise GroupError(f"{path}: generator {ident!r} already used at {seen[ident]}")
            seen[ident] = path

    walk(desc, {}, "group")


def check_word_symbols(desc: GroupDesc, w: slp.CompressedWord) -> None:
    table = desc.alphabet()
    for s in slp.alphabet(w):
        kind = table.get(s.ident)
        if kind is None or kind != s.kind:
            raise ForeignSymbol(f"symbol {s} is not a generator of this group")


def amalgam_embedding(desc: AmalgamDesc) -> tuple[HnnDesc, dict[Symbol, tuple[Symbol, ...]]]:
    """The HNN-extension over h1*h2 an amalgam embeds into, plus the
    letter-wise embedding (h1 generators get conjugated by a fresh stable
    letter, h2 generators pass through)."""
    taken = set(desc.alphabet())
    letter = "t"
    while letter in taken:
        letter = "_" + letter
    base = FreeProductDesc(desc.h1, desc.h2)
    hnn = HnnDesc(base, desc.iso.dom, desc.iso.ran, ((letter, desc.iso),))
    t_pos = Symbol(KIND_T, letter, 1)
    t_neg = Symbol(KIND_T, letter, -1)
    image: dict[Symbol, tuple[Symbol, ...]] = {}
    for ident in desc.h1.alphabet():
        for sign in (1, -1):
            s = Symbol(KIND_GEN, ident, sign)
            image[s] = (t_neg, s, t_pos)
    return hnn, image


def subgroup_as_group(sub: Subgroup) -> tuple[FiniteGroup, dict[int, int]]:
    """The subgroup as a standalone FiniteGroup reusing the parent's element
    names; returns (group, parent index -> new index)."""
    order = sub.sorted_members()
    to_new = {p: i for i, p in enumerate(order)}
    names = [sub.group.names[p] for p in order]
    table = [[to_new[sub.group.mul(a, b)] for b in order] for a in order]
    return FiniteGroup(names, table, f"{sub.group.label}-sub{len(order)}"), to_new


# --- catalog -------------------------------------------------------------------


def cyclic(n: int, letter: str = "a") -> FiniteGroup:
    names = [f"{letter}{k}" for k in range(n)]
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(names, table, f"Z{n}({letter})")


def klein_four(prefix: str = "k") -> FiniteGroup:
    elements = [(0, 0), (0, 1), (1, 0), (1, 1)]
    names = [f"{prefix}{a}{b}" for a, b in elements]
    return FiniteGroup.from_op(
        names, elements, lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2), f"V4({prefix})"
    )


def _perm_group(perms: dict[str, tuple[int, ...]], label: str) -> FiniteGroup:
    names = list(perms)
    elements = [perms[n] for n in names]

    def op(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(len(p)))

    return FiniteGroup.from_op(names, elements, op, label)


def symmetric_3(prefix: str = "s") -> FiniteGroup:
    e = (0, 1, 2)
    r = (1, 2, 0)
    r2 = (2, 0, 1)
    s = (1, 0, 2)

    def mul(p, q):
        return tuple(p[q[i]] for i in range(3))

    perms = {
        f"{prefix}e": e,
        f"{prefix}r": r,
        f"{prefix}r2": r2,
        f"{prefix}f": s,
        f"{prefix}rf": mul(r, s),
        f"{prefix}r2f": mul(r2, s),
    }
    return _perm_group(perms, f"S3({prefix})")


def dihedral_4(prefix: str = "d") -> FiniteGroup:
    r = (1, 2, 3, 0)
    s = (0, 3, 2, 1)  # reflection
    e = (0, 1, 2, 3)

    def mul(p, q):
        return tuple(p[q[i]] for i in range(4))

    r2, r3 = mul(r, r), mul(r, mul(r, r))
    perms = {
        f"{prefix}e": e,
        f"{prefix}r": r,
        f"{prefix}r2": r2,
        f"{prefix}r3": r3,
        f"{prefix}f": s,
        f"{prefix}rf": mul(r, s),
        f"{prefix}r2f": mul(r2, s),
        f"{prefix}r3f": mul(r3, s),
    }
    return _perm_group(perms, f"D4({prefix})")


def catalog(prefix: str = "") -> dict[str, FiniteGroup]:
    """The validated finite-group fixtures used by the generator and tests."""
    p = prefix
    groups = {
        "Z2": cyclic(2, p + "a"),
        "Z3": cyclic(3, p + "g"),
        "Z4": cyclic(4, p + "b"),
        "Z5": cyclic(5, p + "c"),
        "Z6": cyclic(6, p + "h"),
        "Z7": cyclic(7, p + "j"),
        "Z8": cyclic(8, p + "m"),
        "V4": klein_four(p + "k"),
        "S3": symmetric_3(p + "s"),
        "D4": dihedral_4(p + "d"),
    }
    for g in groups.values():
        g.validate()
    return groups


# --- JSON ----------------------------------------------------------------------


def desc_from_json(data: dict) -> GroupDesc:
    kind = data.get("kind")
    if kind == "finite":
        return FiniteDesc(FiniteGroup(data["elements"], data["table"], data.get("label", "")))
    if kind == "free":
        gens = data.get("generators")
        if gens is None:
            gens = [f"x{i}" for i in range(int(data["rank"]))]
        return FreeDesc(tuple(gens))
    if kind == "free_product":
        factors = [desc_from_json(f) for f in data["factors"]]
        if len(factors) < 2:
            raise GroupError("free_product needs at least two factors")
        out = factors[0]
        for f in factors[1:]:
            out = FreeProductDesc(out, f)
        return out
    if kind == "semidirect":
        base = FiniteGroup(data["elements"], data["table"], data.get("label", ""))
        full = Subgroup(base, frozenset(range(base.order)))
        letters, autos = [], []
        for entry in data["letters"]:
            letters.append(entry["name"])
            mapping = {base.index(x): base.index(y) for x, y in entry["auto"]}
            autos.append(PartialIso.build(full, full, mapping))
        return SemidirectDesc(base, tuple(letters), tuple(autos))
    if kind == "hnn":
        base = desc_from_json(data["base"])
        host = _find_host(base, set(data["A"]) | set(data["B"]))
        sub_a = Subgroup(host, frozenset(host.index(x) for x in data["A"]))
        sub_b = Subgroup(host, frozenset(host.index(x) for x in data["B"]))
        stable = []
        for entry in data["stable"]:
            pairs = [(host.index(x), host.index(y)) for x, y in entry["iso"]]
            dom = Subgroup(host, frozenset(p for p, _ in pairs))
            ran = Subgroup(host, frozenset(q for _, q in pairs))
            stable.append((entry["name"], PartialIso.build(dom, ran, dict(pairs))))
        return HnnDesc(base, sub_a, sub_b, tuple(stable))
    if kind == "amalgam":
        h1 = desc_from_json(data["h1"])
        h2 = desc_from_json(data["h2"])
        dom_names = [x for x, _ in data["iso"]]
        ran_names = [y for _, y in data["iso"]]
        g1 = _find_host(h1, set(dom_names))
        g2 = _find_host(h2, set(ran_names))
        pairs = {g1.index(x): g2.index(y) for x, y in data["iso"]}
        dom = Subgroup(g1, frozenset(pairs))
        ran = Subgroup(g2, frozenset(pairs.values()))
        return AmalgamDesc(h1, h2, PartialIso.build(dom, ran, pairs))
    raise GroupError(f"unknown group kind {kind!r}")


def _find_host(desc: GroupDesc, names: set[str]) -> FiniteGroup:
    for part in desc.finite_parts():
        if names <= set(part.names):
            return part
    raise GroupError(f"no finite part contains the elements {sorted(names)}")


def desc_to_json(desc: GroupDesc) -> dict:
    if isinstance(desc, FiniteDesc):
        return {
            "kind": "finite",
            "elements": list(desc.group.names),
            "table": [list(r) for r in desc.group.table],
        }
    if isinstance(desc, FreeDesc):
        return {"kind": "free", "generators": list(desc.gens)}
    if isinstance(desc, FreeProductDesc):
        factors = []
        stack = [desc]
        while stack:
            d = stack.pop()
            if isinstance(d, FreeProductDesc):
                stack.append(d.right)
                stack.append(d.left)
            else:
                factors.append(desc_to_json(d))
        return {"kind": "free_product", "factors": factors}
    if isinstance(desc, SemidirectDesc):
        g = desc.group
        return {
            "kind": "semidirect",
            "elements": list(g.names),
            "table": [list(r) for r in g.table],
            "letters": [
                {
                    "name": l,
                    "auto": [[g.names[a], g.names[b]] for a, b in auto.mapping],
                }
                for l, auto in zip(desc.letters, desc.autos)
            ],
        }
    if isinstance(desc, HnnDesc):
        host = desc.sub_a.group
        return {
            "kind": "hnn",
            "base": desc_to_json(desc.base),
            "A": [host.names[i] for i in desc.sub_a.sorted_members()],
            "B": [desc.sub_b.group.names[i] for i in desc.sub_b.sorted_members()],
            "stable": [
                {
                    "name": ident,
                    "iso": [
                        [iso.dom.group.names[a], iso.ran.group.names[b]]
                        for a, b in iso.mapping
                    ],
                }
                for ident, iso in desc.stable
            ],
        }
    if isinstance(desc, AmalgamDesc):
        return {
            "kind": "amalgam",
            "h1": desc_to_json(desc.h1),
            "h2": desc_to_json(desc.h2),
            "iso": [
                [desc.iso.dom.group.names[a], desc.iso.ran.group.names[b]]
                for a, b in desc.iso.mapping
            ],
        }
    raise GroupError(f"cannot serialize {desc!r}")

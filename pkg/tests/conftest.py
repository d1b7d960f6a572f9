import pytest

from slpgroup import groups as G
from slpgroup import slp


@pytest.fixture(scope="session")
def cat():
    return G.catalog()


@pytest.fixture(scope="session")
def z2_fixture(cat):
    """HNN over Z/2 with A = B the whole group and the identity map:
    t commutes with the generator."""
    z2 = cat["Z2"]
    full = G.Subgroup(z2, frozenset({0, 1}))
    return G.HnnDesc(G.FiniteDesc(z2), full, full, (("t1", G.identity_iso(full)),))


@pytest.fixture(scope="session")
def z4_fixture(cat):
    """HNN over Z/4 with A = B = {1, b^2} and the identity map."""
    z4 = cat["Z4"]
    half = G.Subgroup(z4, frozenset({0, 2}))
    return G.HnnDesc(G.FiniteDesc(z4), half, half, (("t1", G.identity_iso(half)),))


@pytest.fixture(scope="session")
def inversion_semidirect(cat):
    """Z/3 extended by one free letter acting by inversion."""
    z3 = cat["Z3"]
    full = G.Subgroup(z3, frozenset({0, 1, 2}))
    inv = G.PartialIso.build(full, full, {0: 0, 1: 2, 2: 1})
    return G.SemidirectDesc(z3, ("t",), (inv,))


def sym(name: str):
    """Shorthand: "a", "a-" (inverse), "t:x", "t:x-" for stable letters."""
    sign = 1
    if name.endswith("-"):
        sign = -1
        name = name[:-1]
    if name.startswith("t:"):
        return slp.stable(name[2:], sign)
    return slp.gen(name, sign)


def word(*names: str) -> slp.CompressedWord:
    return slp.from_symbols([sym(n) for n in names])


@pytest.fixture(scope="session")
def mk():
    return word

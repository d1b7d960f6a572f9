"""Compressed word problems for groups built from finite pieces.

Words arrive as straight-line programs (grammar-compressed strings, with
substring rules); the solvers decide triviality and equality in finite
groups, free groups, free products, finite-by-free semidirect products,
HNN-extensions with finite associated subgroups, and amalgamated free
products with finite identified subgroups -- without ever decompressing.
An explicit Britton-reduction oracle provides exact ground truth for small
instances and backs the randomized acceptance checks.
"""

from .groups import (
    AmalgamDesc,
    FiniteDesc,
    FiniteGroup,
    FreeDesc,
    FreeProductDesc,
    GroupDesc,
    GroupError,
    HnnDesc,
    PartialIso,
    SemidirectDesc,
    Subgroup,
    catalog,
    compose_partial,
    invert_partial,
    subgroup_generated,
    validate_desc,
)
from .slp import (
    CompressedWord,
    FingerprintContext,
    Symbol,
    Transducer,
    apply_homomorphism,
    apply_transducer,
    char_at,
    concat,
    decompress,
    equal_words,
    from_symbols,
    invert,
    kth_stable_letter_position,
    length,
    normalize,
    project,
    stable_letter_count,
    subword,
)
from .solvers import (
    SolveConfig,
    Verdict,
    cwp,
    cwp_amalgam,
    cwp_equal,
    cwp_finite,
    cwp_free,
    cwp_free_product,
    cwp_semidirect,
)

__all__ = [name for name in dir() if not name.startswith("_")]

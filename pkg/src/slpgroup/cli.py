"""Command-line front end.

Exit codes: 0 for TRIVIAL/EQUAL (and successful utility commands), 1 for
NONTRIVIAL/UNEQUAL (or a cross-check disagreement), 2 for malformed input.
Diagnostics go to stderr; `--stats` streams one JSON record per pipeline
stage to stderr as well.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import groups as G
from . import hnn
from . import oracle
from . import slp
from . import solvers


class _InputError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise _InputError(f"{path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise _InputError(f"{path}: invalid JSON ({e})") from e


def _load_group(path: str) -> G.GroupDesc:
    data = _load_json(path)
    try:
        desc = G.desc_from_json(data)
        G.validate_desc(desc)
    except G.GroupError as e:
        raise _InputError(f"{path}: {e}") from e
    return desc


def _load_word(path: str, desc: G.GroupDesc | None) -> slp.CompressedWord:
    data = _load_json(path)
    kinds = None
    if desc is not None:
        kinds = {str(ident): kind for ident, kind in desc.alphabet().items()}
    try:
        return slp.from_json(data, kinds)
    except slp.SlpError as e:
        raise _InputError(f"{path}: {e}") from e


def _config(args) -> solvers.SolveConfig:
    return solvers.SolveConfig(
        fp_bits=args.fp_bits,
        max_exact_len=args.max_exact_len,
        seed=args.seed,
        cap=args.cap,
        max_depth=args.max_depth,
        stats_stream=sys.stderr if args.stats else None,
    )


def _report(verdict: solvers.Verdict) -> int:
    print(verdict.answer)
    print(
        f"queries={verdict.queries} depth={verdict.depth} "
        f"fp_bits={verdict.fp_bits} letters_after_collapse={verdict.collapse_letters}",
        file=sys.stderr,
    )
    return 0 if verdict.positive else 1


def cmd_solve(args) -> int:
    desc = _load_group(args.group)
    word = _load_word(args.slp, desc)
    try:
        return _report(solvers.cwp(desc, word, _config(args)))
    except G.ForeignSymbol as e:
        raise _InputError(str(e)) from e


def cmd_equal(args) -> int:
    desc = _load_group(args.group)
    u = _load_word(args.slp_a, desc)
    v = _load_word(args.slp_b, desc)
    try:
        return _report(solvers.cwp_equal(desc, u, v, _config(args)))
    except G.ForeignSymbol as e:
        raise _InputError(str(e)) from e


def cmd_reduce(args) -> int:
    desc = _load_group(args.group)
    if not isinstance(desc, G.HnnDesc):
        raise _InputError("reduce requires an hnn group description")
    word = _load_word(args.slp, desc)
    try:
        reduced = hnn.reduce_word(desc, word, _config(args))
    except G.ForeignSymbol as e:
        raise _InputError(str(e)) from e
    json.dump(slp.to_json(reduced), sys.stdout, indent=2)
    print()
    return 0


def cmd_eval(args) -> int:
    word = _load_word(args.slp, None)
    try:
        symbols = slp.decompress(word, args.cap)
    except slp.TooLong as e:
        raise _InputError(str(e)) from e
    print(" ".join(str(s) for s in symbols))
    return 0


def _gen_config(args) -> oracle.GenConfig:
    return oracle.GenConfig(
        max_base_order=args.max_base_order,
        max_assoc=args.max_assoc,
        max_letters=args.max_letters,
        slp_size=args.slp_size,
        cap=args.gen_cap,
    )


def cmd_gen(args) -> int:
    desc, word = oracle.gen_random(_gen_config(args), args.seed or 0)
    json.dump(
        {"group": G.desc_to_json(desc), "slp": slp.to_json(word)},
        sys.stdout,
        indent=2,
        sort_keys=True,
    )
    print()
    return 0


def cmd_check(args) -> int:
    cfg = _gen_config(args)
    config = _config(args)
    base_seed = args.seed or 0
    agree = 0
    disagreements = []
    for i in range(args.count):
        desc, word = oracle.gen_random(cfg, base_seed + i)
        explicit = oracle.decompress(word, cfg.cap)
        want = oracle.britton_trivial(desc, explicit)
        got = solvers.cwp(desc, word, config)
        if got.positive == want:
            agree += 1
        else:
            disagreements.append(base_seed + i)
    print(f"{agree}/{args.count} agree")
    if disagreements:
        print(f"disagreeing seeds: {disagreements}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="slpgroup",
        description="compressed word problems over HNN-extensions, amalgams and friends",
    )
    parser.add_argument("--fp-bits", type=int, default=128)
    parser.add_argument("--max-exact-len", type=int, default=4096)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--cap", type=int, default=10**6)
    parser.add_argument("--max-depth", type=int, default=None)
    parser.add_argument("--stats", action="store_true", help="stream stage diagnostics to stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide whether an SLP evaluates to the identity")
    p.add_argument("group")
    p.add_argument("slp")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("equal", help="decide equality of two SLPs in the group")
    p.add_argument("group")
    p.add_argument("slp_a")
    p.add_argument("slp_b")
    p.set_defaults(run=cmd_equal)

    p = sub.add_parser("reduce", help="emit a pinch-free composition system for the word")
    p.add_argument("group")
    p.add_argument("slp")
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("eval", help="decompress an SLP (bounded by --cap)")
    p.add_argument("slp")
    p.set_defaults(run=cmd_eval)

    def add_gen_bounds(p):
        p.add_argument("--max-base-order", type=int, default=8)
        p.add_argument("--max-assoc", type=int, default=4)
        p.add_argument("--max-letters", type=int, default=4)
        p.add_argument("--slp-size", type=int, default=40)
        p.add_argument("--gen-cap", type=int, default=5000)

    p = sub.add_parser("gen", help="emit a reproducible random instance")
    add_gen_bounds(p)
    p.set_defaults(run=cmd_gen)

    p = sub.add_parser("check", help="cross-check generated instances against the oracle")
    p.add_argument("--count", type=int, default=100)
    add_gen_bounds(p)
    p.set_defaults(run=cmd_check)

    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (slp.SlpError, G.GroupError, solvers.SolverError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end for shard directories and code planning.

Exit codes: 0 ok, 2 uncorrectable, 3 invalid profile or arguments, 4 I/O.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import shards
from .errors import (
    InsufficientRank,
    ParseError,
    ProfileInvalid,
    SRLRCError,
    ShardFormatError,
    UnrepairableLocally,
)
from .local import make_mds
from .mrlrc import (
    PreconditionNotSorted,
    closed_form_e,
    code_locals,
    construct,
    e_max,
    global_distance_bruteforce,
    mr_check,
    plan_field_size,
)

EXIT_OK, EXIT_UNCORRECTABLE, EXIT_PROFILE, EXIT_IO = 0, 2, 3, 4


def parse_pattern(text: str, sizes: list[int]) -> list[tuple[int, int]]:
    """'group:pos[,pos]*[;group:...]' with 1-based numbers -> 0-based pairs."""
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        if ":" not in chunk:
            raise ParseError(f"bad pattern chunk '{chunk}' (expected group:pos,...)")
        g, _, rest = chunk.partition(":")
        try:
            gi = int(g)
            positions = [int(p) for p in rest.split(",") if p.strip()]
        except ValueError:
            raise ParseError(f"bad number in pattern chunk '{chunk}'") from None
        if not 1 <= gi <= len(sizes):
            raise ParseError(f"group {gi} outside 1..{len(sizes)}")
        for p in positions:
            if not 1 <= p <= sizes[gi - 1]:
                raise ParseError(f"position {p} outside 1..{sizes[gi - 1]} in group {gi}")
            out.append((gi - 1, p - 1))
    return sorted(set(out))


def random_pattern(sizes: list[int], count: int, seed: int) -> list[tuple[int, int]]:
    slots = [(i, j) for i, n in enumerate(sizes) for j in range(n)]
    if not 0 <= count <= len(slots):
        raise ParseError(f"cannot erase {count} of {len(slots)} shards")
    return sorted(random.Random(seed).sample(slots, count))


def _profile_from_file(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return shards.parse_config(text)


def _code_from_args(args):
    if getattr(args, "config", None):
        return construct(_profile_from_file(args.config))
    if getattr(args, "dir", None):
        return shards.load(args.dir).state.code
    raise ParseError("give --config or --dir")


def _fmt_pairs(pairs) -> str:
    return ", ".join(f"{i + 1}:{j + 1}" for i, j in pairs) or "none"


# ---------------------------------------------------------------------------
# subcommands


def cmd_plan(args) -> int:
    rows, best = plan_field_size(args.g, args.r, args.delta)
    print(f"{'x':>4}  {'base':>5}  {'exp':>5}  F(x)")
    for row in rows:
        print(f"{row.x:>4}  {row.base:>5}  {row.exponent:>5}  {row.pretty()}")
    print(f"min at x={best}: {rows[best - 1].pretty()}")
    return EXIT_OK


def cmd_encode(args) -> int:
    profile = _profile_from_file(args.config)
    data = Path(args.input).read_bytes()
    ss = shards.encode_file(profile, data, args.out)
    written = shards.save(ss, only_changed=False)
    print(f"encoded {len(data)} bytes into {ss.state.blocks} blocks, {len([w for w in written if w.endswith('.shard')])} shards in {args.out}")
    return EXIT_OK


def cmd_decode(args) -> int:
    ss = shards.load(args.dir)
    try:
        data = shards.decode_file(ss, args.segment - 1)
    except InsufficientRank as exc:
        print(f"uncorrectable: {exc} (erased: {_fmt_pairs(ss.erased)})", file=sys.stderr)
        return EXIT_UNCORRECTABLE
    Path(args.out).write_bytes(data)
    print(f"decoded {len(data)} bytes (erased shards: {len(ss.erased)})")
    return EXIT_OK


def cmd_erase(args) -> int:
    ss = shards.load(args.dir)
    sizes = [c.n for c in ss.state.local_codes]
    if args.pattern:
        targets = parse_pattern(args.pattern, sizes)
    elif args.random is not None:
        targets = random_pattern(sizes, args.random, args.seed)
    else:
        raise ParseError("give --pattern or --random")
    for i, j in targets:
        path = Path(args.dir) / shards.shard_name(i + 1, j + 1)
        with open(path, "wb"):
            pass  # truncate to zero bytes
    print(f"erased {len(targets)} shards: {_fmt_pairs(targets)}")
    return EXIT_OK


def cmd_repair(args) -> int:
    ss = shards.load(args.dir)
    if not ss.erased:
        print("nothing to repair")
        return EXIT_OK
    try:
        done = shards.repair(ss, force_global=args.force_global)
    except UnrepairableLocally as exc:
        shards.save(ss)
        print(f"repaired locally: {_fmt_pairs(exc.repaired['local'])}")
        print(f"local repair impossible: {exc}", file=sys.stderr)
        return EXIT_UNCORRECTABLE
    except InsufficientRank as exc:
        print(f"uncorrectable: {exc}", file=sys.stderr)
        return EXIT_UNCORRECTABLE
    shards.save(ss)
    print(f"repaired locally: {_fmt_pairs(done['local'])}")
    if done["global"]:
        print(f"repaired globally: {_fmt_pairs(done['global'])}")
    return EXIT_OK


def cmd_verify_mr(args) -> int:
    code = _code_from_args(args)
    ok, checked, witness = mr_check(code)
    if ok:
        print(f"MR: PASS (patterns checked: {checked})")
        return EXIT_OK
    print(f"MR: FAIL (restriction to {witness} is not MDS; patterns checked: {checked})")
    return EXIT_UNCORRECTABLE


def cmd_distance(args) -> int:
    code = _code_from_args(args)
    e = e_max(code_locals(code), code.k)
    print(f"e(A,k) = {e}")
    print(f"d_H = {e + 1} (outer code MSRD)")
    if all(c.mds_or_none() for c in code.local_codes):
        deltas = [c.n - c.r + 1 for c in code.local_codes]
        try:
            print(f"closed form: e = {closed_form_e(code.r, deltas, code.k)}")
        except PreconditionNotSorted:
            print("closed form: not applicable (needs r ascending, delta descending)")
    if args.brute:
        print(f"brute force d_H = {global_distance_bruteforce(code)}")
    return EXIT_OK


def cmd_info(args) -> int:
    ss = shards.load(args.dir)
    st = ss.state
    print(f"field F_2^{st.field.degree} (q={1 << st.family.basis.sub}, m={st.family.m}), k={st.k}, blocks={st.blocks}")
    for i, c in enumerate(st.local_codes):
        sub = f", parts {[(p.start + 1, p.stop) for p, _ in c.parts]}" if c.parts else ""
        print(f"group {i + 1}: n={c.n} r={c.r} F_2^{c.e} {c.label}{sub}")
    for t, s in enumerate(ss.segments):
        print(f"segment {t + 1}: {s.rows} rows, {s.length} bytes{' (systematic)' if s.systematic else ''}")
    print(f"erased/missing shards: {_fmt_pairs(ss.erased)}")
    return EXIT_OK


def _load_complete(args) -> shards.ShardSet:
    ss = shards.load(args.dir)
    if ss.erased:
        shards.repair(ss, force_global=args.force_global)
    return ss


def _group_arg(ss, g: int) -> int:
    if not 1 <= g <= ss.state.g:
        raise ParseError(f"group {g} outside 1..{ss.state.g}")
    return g - 1


def _local_q_e(q: int | None, default_e: int) -> int:
    if q is None:
        return default_e
    if q < 2 or q & (q - 1):
        raise ProfileInvalid(f"local field size must be a power of 2, got {q}")
    return q.bit_length() - 1


def _finish(ss, what: str) -> int:
    written = shards.save(ss)
    shard_files = [w for w in written if w.endswith(".shard")]
    print(f"{what}; rewrote {len(shard_files)} shard files")
    return EXIT_OK


def cmd_recode(args) -> int:
    ss = _load_complete(args)
    i = _group_arg(ss, args.group)
    cur = ss.state.local_codes[i]
    target = make_mds(_local_q_e(args.local_q, cur.e), cur.r, args.delta)
    ss.state.recode_group(i, target)
    return _finish(ss, f"group {args.group} recoded to ({target.n},{target.r}) over F_2^{target.e}")


def cmd_split_group(args) -> int:
    ss = _load_complete(args)
    i = _group_arg(ss, args.group)
    try:
        parts = [int(p) for p in args.parts.split(",")]
    except ValueError:
        raise ParseError("--parts must be a comma-separated list of integers") from None
    e = _local_q_e(args.local_q, ss.state.local_codes[i].e)
    subs = [make_mds(e, p, args.delta) for p in parts]
    ss.state.partition_group(i, parts, subs)
    return _finish(ss, f"group {args.group} split into parts {parts}")


def cmd_change_locality(args) -> int:
    ss = _load_complete(args)
    i = _group_arg(ss, args.group)
    cur = ss.state.local_codes[i]
    local = None
    if args.delta is not None or args.local_q is not None:
        delta = args.delta if args.delta is not None else (cur.n - cur.r + 1)
        local = make_mds(_local_q_e(args.local_q, cur.e), args.r, delta)
    ss.state.change_locality(i, args.r, local)
    return _finish(ss, f"group {args.group} locality set to {args.r}")


def cmd_grow_k(args) -> int:
    ss = _load_complete(args)
    st = ss.state
    data = Path(args.input).read_bytes()
    rows = args.k - st.k
    if rows <= 0:
        raise ParseError(f"--k must exceed the current k={st.k}")
    d = shards.bytes_to_symbols(data, ss.e, rows, st.blocks)
    st.change_file_size(args.k, d)
    ss.segments.append(shards.Segment(rows, len(data), None))
    return _finish(ss, f"k grown to {args.k} (segment {len(ss.segments)} holds {len(data)} bytes)")


def cmd_shrink_k(args) -> int:
    ss = _load_complete(args)
    bounds = []
    acc = 0
    for s in ss.segments:
        acc += s.rows
        bounds.append(acc)
    if args.k not in bounds:
        raise ParseError(f"--k must be a segment boundary, one of {bounds}")
    keep = bounds.index(args.k) + 1
    ss.state.change_file_size(args.k)
    ss.segments = ss.segments[:keep]
    return _finish(ss, f"k shrunk to {args.k}")


def cmd_add_group(args) -> int:
    ss = _load_complete(args)
    e = _local_q_e(args.local_q, ss.state.family.basis.sub)
    code = make_mds(e, args.r, args.delta)
    ss.state.change_group_count(ss.state.g + 1, [code])
    return _finish(ss, f"added group {ss.state.g} with ({code.n},{code.r}) local code")


def cmd_remove_group(args) -> int:
    ss = _load_complete(args)
    ss.state.change_group_count(args.g)
    return _finish(ss, f"kept the first {args.g} groups")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="srlrc", description="MR locally repairable codes over sum-rank outer codes")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("plan", help="tabulate global field sizes F(x) and their minimum")
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--delta", type=int, required=True)
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("encode", help="encode a file into a shard directory")
    s.add_argument("--config", required=True, help="JSON profile")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True, help="shard directory")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help="recover the stored file from the surviving shards")
    s.add_argument("--dir", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--segment", type=int, default=1, help="1 = original file, later segments added by grow-k")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("erase", help="simulate failures by truncating shard files")
    s.add_argument("--dir", required=True)
    s.add_argument("--pattern", help="group:pos[,pos]*[;group:...], 1-based")
    s.add_argument("--random", type=int, help="number of random shards to erase")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_erase)

    s = sub.add_parser("repair", help="rebuild erased shards (locally unless --force-global)")
    s.add_argument("--dir", required=True)
    s.add_argument("--force-global", action="store_true")
    s.set_defaults(func=cmd_repair)

    for name, func, hlp in (("verify-mr", cmd_verify_mr, "exhaustive maximal-recoverability check"),
                            ("distance", cmd_distance, "global minimum distance via e(A,k)")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--config")
        s.add_argument("--dir")
        if name == "distance":
            s.add_argument("--brute", action="store_true", help="also enumerate all codewords")
        s.set_defaults(func=func)

    s = sub.add_parser("info", help="describe a shard directory")
    s.add_argument("--dir", required=True)
    s.set_defaults(func=cmd_info)

    def dyn(name, func, hlp):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--dir", required=True)
        s.add_argument("--force-global", action="store_true", help="allow global decoding to fill missing shards first")
        s.set_defaults(func=func)
        return s

    s = dyn("recode", cmd_recode, "replace one group's local code by an MDS code")
    s.add_argument("--group", type=int, required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--local-q", type=int)

    s = dyn("split-group", cmd_split_group, "recode one group as a Cartesian product of smaller MDS codes")
    s.add_argument("--group", type=int, required=True)
    s.add_argument("--parts", required=True, help="comma-separated sub-localities, e.g. 3,3")
    s.add_argument("--local-q", type=int)
    s.add_argument("--delta", type=int, default=2)

    s = dyn("change-locality", cmd_change_locality, "shrink or grow one group's locality r_i")
    s.add_argument("--group", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--delta", type=int)
    s.add_argument("--local-q", type=int)

    s = dyn("grow-k", cmd_grow_k, "append a data segment, raising k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--input", required=True)

    s = dyn("shrink-k", cmd_shrink_k, "drop trailing data segments, lowering k")
    s.add_argument("--k", type=int, required=True)

    s = dyn("add-group", cmd_add_group, "append a local group")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--local-q", type=int)

    s = dyn("remove-group", cmd_remove_group, "delete trailing local groups")
    s.add_argument("--g", type=int, required=True, help="number of groups to keep")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProfileInvalid, ParseError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_PROFILE
    except (InsufficientRank, UnrepairableLocally) as exc:
        print(f"uncorrectable: {exc}", file=sys.stderr)
        return EXIT_UNCORRECTABLE
    except (OSError, ShardFormatError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SRLRCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROFILE


if __name__ == "__main__":
    sys.exit(main())

"""On-disk shard sets: one file per code position, plus a JSON manifest.

Shard file layout (big-endian):
    b"SRLC" | u16 version | u16 group | u16 position | 32-byte family hash
    | u64 block count | block count symbols of ceil(e/8) bytes each

Groups and positions are 1-based on disk.  The family hash pins the field
and nested outer family only, so reconfiguring one group leaves every
other shard file byte-identical.  The manifest carries its own hash over
the full configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linalg
from .dynamics import DynamicState
from .errors import ParseError, ShardFormatError
from .linrs import NestedFamily, nested_family
from .local import LocalCode, make_mds
from .mrlrc import CodeProfile

MAGIC = b"SRLC"
VERSION = 1
HEADER = struct.Struct(">4sHHH32sQ")
MANIFEST = "manifest.json"


# ---------------------------------------------------------------------------
# configuration


def _as_list(v, g: int, name: str) -> list[int]:
    if isinstance(v, bool):
        raise ParseError(f"{name} must be an integer or a list of integers")
    if isinstance(v, int):
        return [v] * g
    if isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        if len(v) != g:
            raise ParseError(f"{name} has {len(v)} entries but g={g}")
        return list(v)
    raise ParseError(f"{name} must be an integer or a list of integers")


def parse_config(text: str | dict) -> CodeProfile:
    """Profile from a JSON document with keys g, r, delta, q, m, k and optional q_local, n."""
    if isinstance(text, dict):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("config must be a JSON object")
    for key in ("r", "delta", "q", "m", "k"):
        if key not in doc:
            raise ParseError(f"missing key '{key}'")
    for key in ("q", "m", "k"):
        if not isinstance(doc[key], int) or isinstance(doc[key], bool):
            raise ParseError(f"{key} must be an integer")
    if "g" in doc:
        g = doc["g"]
        if not isinstance(g, int) or isinstance(g, bool):
            raise ParseError("g must be an integer")
    else:
        lists = [doc[k] for k in ("r", "delta", "q_local") if isinstance(doc.get(k), list)]
        if not lists:
            raise ParseError("missing key 'g'")
        g = len(lists[0])
    r = _as_list(doc["r"], g, "r")
    delta = _as_list(doc["delta"], g, "delta")
    ql = _as_list(doc.get("q_local", doc["q"]), g, "q_local")
    n = _as_list(doc["n"], g, "n") if "n" in doc else None
    return CodeProfile(tuple(r), tuple(delta), tuple(ql), doc["q"], doc["m"], doc["k"], tuple(n) if n else None)


# ---------------------------------------------------------------------------
# byte <-> symbol packing


def bytes_to_symbols(data: bytes, e: int, rows: int, blocks: int | None = None) -> np.ndarray:
    """(rows, B) symbol matrix holding an 8-byte length prefix and ``data``."""
    payload = len(data).to_bytes(8, "little") + data
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    per_block = e * rows
    need = max(1, -(-bits.size // per_block))
    if blocks is None:
        blocks = need
    elif need > blocks:
        raise ShardFormatError(f"data needs {need} blocks but only {blocks} are available")
    padded = np.zeros(blocks * per_block, dtype=np.int64)
    padded[: bits.size] = bits
    weights = np.int64(1) << np.arange(e - 1, -1, -1, dtype=np.int64)
    syms = padded.reshape(blocks * rows, e) @ weights
    return syms.reshape(blocks, rows).T.copy()


def symbols_to_bytes(x: np.ndarray, e: int) -> bytes:
    syms = np.asarray(x, dtype=np.int64).T.reshape(-1)
    shifts = np.arange(e - 1, -1, -1, dtype=np.int64)
    bits = ((syms[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    raw = np.packbits(bits).tobytes()
    if len(raw) < 8:
        raise ShardFormatError("decoded data is shorter than its length prefix")
    length = int.from_bytes(raw[:8], "little")
    if length > len(raw) - 8:
        raise ShardFormatError(f"length prefix {length} exceeds decoded payload")
    return raw[8 : 8 + length]


def symbol_bytes(e: int) -> int:
    return -(-e // 8)


def pack_shard(group: int, pos: int, fam_hash: bytes, column: np.ndarray, e: int) -> bytes:
    nb = symbol_bytes(e)
    col = np.asarray(column, dtype=np.int64)
    out = np.empty((col.size, nb), dtype=np.uint8)
    for t in range(nb):
        out[:, t] = (col >> (8 * (nb - 1 - t))) & 0xFF
    return HEADER.pack(MAGIC, VERSION, group, pos, fam_hash, col.size) + out.tobytes()


def unpack_shard(raw: bytes, e: int) -> tuple[int, int, bytes, np.ndarray]:
    if len(raw) < HEADER.size:
        raise ShardFormatError("shard shorter than its header")
    magic, ver, group, pos, fam_hash, blocks = HEADER.unpack_from(raw)
    if magic != MAGIC or ver != VERSION:
        raise ShardFormatError("bad shard magic or version")
    nb = symbol_bytes(e)
    body = np.frombuffer(raw, dtype=np.uint8, offset=HEADER.size)
    if body.size != blocks * nb:
        raise ShardFormatError("shard payload length does not match its block count")
    body = body.reshape(blocks, nb).astype(np.int64)
    col = np.zeros(blocks, dtype=np.int64)
    for t in range(nb):
        col = (col << 8) | body[:, t]
    return group, pos, fam_hash, col


def shard_name(group: int, pos: int) -> str:
    return f"g{group}_p{pos}.shard"


# ---------------------------------------------------------------------------
# manifest


def family_hash(family: NestedFamily) -> bytes:
    F = family.field
    doc = {"q_e": family.basis.sub, "m": family.m, "poly": F.poly, "gamma": family.gamma, "basis": list(family.basis.elements)}
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).digest()


def _code_to_json(c: LocalCode) -> dict:
    d = {"field_e": c.e, "generator": c.generator, "label": c.label}
    if c.parts:
        d["parts"] = [{"start": cols.start, "stop": cols.stop, "code": _code_to_json(sub)} for cols, sub in c.parts]
    return d


def _code_from_json(d: dict) -> LocalCode:
    parts = [(range(p["start"], p["stop"]), _code_from_json(p["code"])) for p in d.get("parts", [])]
    return LocalCode(d["field_e"], d["generator"], parts=parts, label=d.get("label", ""))


def _config_hash(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k != "config_hash"}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


@dataclass
class Segment:
    rows: int
    length: int
    systematic: list[tuple[int, int]] | None = None  # family (block, column) pairs, 0-based


@dataclass
class ShardSet:
    """A stored file: dynamic state plus the bookkeeping needed to get bytes back."""

    directory: Path
    profile: dict
    state: DynamicState
    segments: list[Segment] = field(default_factory=list)
    erased: list[tuple[int, int]] = field(default_factory=list)  # 0-based (group, pos) missing on disk

    @property
    def e(self) -> int:
        return self.state.field.degree

    def manifest(self) -> dict:
        fam = self.state.family
        doc = {
            "format": VERSION,
            "profile": self.profile,
            "q": 1 << fam.basis.sub,
            "m": fam.m,
            "k": self.state.k,
            "blocks": self.state.blocks,
            "groups": [_code_to_json(c) for c in self.state.local_codes],
            "segments": [
                {"rows": s.rows, "length": s.length, "systematic": [list(p) for p in s.systematic] if s.systematic else None}
                for s in self.segments
            ],
        }
        doc["config_hash"] = _config_hash(doc)
        return doc


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def save(ss: ShardSet, only_changed: bool = True) -> list[str]:
    """Write shards (skipping byte-identical ones) then the manifest; returns files written."""
    d = ss.directory
    d.mkdir(parents=True, exist_ok=True)
    fh = family_hash(ss.state.family)
    written = []
    keep = set()
    gone = set(ss.erased)
    for i, sym in enumerate(ss.state.symbols):
        for j in range(sym.shape[0]):
            name = shard_name(i + 1, j + 1)
            keep.add(name)
            if (i, j) in gone:
                continue  # still missing: leave the file as it is
            data = pack_shard(i + 1, j + 1, fh, sym[j], ss.e)
            path = d / name
            if only_changed and path.exists() and path.read_bytes() == data:
                continue
            _atomic_write(path, data)
            written.append(name)
    for p in d.glob("g*_p*.shard"):
        if p.name not in keep:
            p.unlink()
            written.append(p.name)
    _atomic_write(d / MANIFEST, (json.dumps(ss.manifest(), indent=1) + "\n").encode())
    return written


def load(directory: str | Path) -> ShardSet:
    """Read manifest and shards; missing, empty or corrupt shards are recorded as erased."""
    d = Path(directory)
    try:
        doc = json.loads((d / MANIFEST).read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ShardFormatError(f"manifest is not valid JSON: {exc}") from None
    if doc.get("config_hash") != _config_hash(doc):
        raise ShardFormatError("manifest hash mismatch: configuration was modified or corrupted")
    q, m = doc["q"], doc["m"]
    fam = nested_family(q.bit_length() - 1, m)
    fh = family_hash(fam)
    e = fam.field.degree
    codes = [_code_from_json(c) for c in doc["groups"]]
    blocks = doc["blocks"]
    symbols = []
    erased = []
    for i, c in enumerate(codes):
        arr = np.zeros((c.n, blocks), dtype=np.int64)
        for j in range(c.n):
            path = d / shard_name(i + 1, j + 1)
            try:
                g, p, h, col = unpack_shard(path.read_bytes(), e)
                if (g, p) != (i + 1, j + 1) or h != fh or col.size != blocks:
                    raise ShardFormatError("shard header does not match its slot")
                arr[j] = col
            except (FileNotFoundError, ShardFormatError):
                erased.append((i, j))
        symbols.append(arr)
    state = DynamicState(fam, doc["k"], codes, symbols)
    segs = [Segment(s["rows"], s["length"], [tuple(p) for p in s["systematic"]] if s["systematic"] else None) for s in doc["segments"]]
    return ShardSet(d, doc["profile"], state, segs, erased)


# ---------------------------------------------------------------------------
# file <-> shard set


def systematic_layout(r: Sequence[int], k: int) -> list[tuple[int, int]]:
    """First k outer positions, filling groups in order."""
    out = []
    for i, ri in enumerate(r):
        for t in range(ri):
            if len(out) < k:
                out.append((i, t))
    return out


def _systematic_matrix(fam: NestedFamily, start: int, rows: int, cols: Sequence[tuple[int, int]]) -> list[list[int]]:
    """Rows start..start+rows-1 of the nested family at the given (block, column) pairs."""
    full = start + rows
    out = [[0] * len(cols) for _ in range(rows)]
    for c, (i, t) in enumerate(cols):
        col = fam.block(full, i, [t])
        for j in range(rows):
            out[j][c] = col[start + j][0]
    return out


def encode_file(profile: CodeProfile, data: bytes, directory: str | Path) -> ShardSet:
    fam = nested_family(profile.q_e, profile.m)
    e = fam.field.degree
    k = profile.k
    x = bytes_to_symbols(data, e, k)
    S = systematic_layout(profile.r, k)
    Ginv = linalg.inverse(fam.field, _systematic_matrix(fam, 0, k, S))
    f = fam.field.vecmat(x, Ginv)
    locals_ = [make_mds(le, r, dl) for le, r, dl in zip(profile.local_e, profile.r, profile.delta)]
    state = DynamicState.encode(fam, locals_, f)
    ss = ShardSet(Path(directory), profile.to_dict(), state, [Segment(k, len(data), S)])
    return ss


def segment_bytes(ss: ShardSet, f: np.ndarray, index: int = 0) -> bytes:
    fam = ss.state.family
    start = sum(s.rows for s in ss.segments[:index])
    seg = ss.segments[index]
    rows = f[start : start + seg.rows]
    if seg.systematic:
        rows = fam.field.vecmat(rows, _systematic_matrix(fam, start, seg.rows, seg.systematic))
    return symbols_to_bytes(rows, ss.e)


# ---------------------------------------------------------------------------
# decoding and repair over a loaded shard set


def pattern_of(ss: ShardSet):
    from .mrlrc import ErasurePattern

    sets = [set() for _ in range(ss.state.g)]
    for i, j in ss.erased:
        sets[i].add(j)
    return ErasurePattern(tuple(frozenset(s) for s in sets))


def decode_file(ss: ShardSet, segment: int = 0) -> bytes:
    """Bytes of one stored segment; raises InsufficientRank when uncorrectable."""
    f = ss.state.decode(pattern_of(ss))
    return segment_bytes(ss, f, segment)


def repair(ss: ShardSet, force_global: bool = False) -> dict:
    """Restore erased shards in memory: locally per group, globally if allowed.

    Returns {"local": [...], "global": [...]} of repaired 0-based (group, pos).
    Raises UnrepairableLocally when a group needs global decoding and
    ``force_global`` is off; local repairs done so far stay applied and
    ``ss.erased`` then lists only the shards still missing.
    """
    from .errors import UnrepairableLocally
    from .local import repair_plan

    st = ss.state
    F = st.field
    by_group: dict[int, list[int]] = {}
    for i, j in ss.erased:
        by_group.setdefault(i, []).append(j)
    done = {"local": [], "global": []}
    stuck = []
    for i, pos in sorted(by_group.items()):
        code = st.local_codes[i]
        try:
            plan = repair_plan(code, pos)
        except UnrepairableLocally:
            stuck.append(i)
            continue
        for targets, sources, M in plan:
            Me = st.tower.embed_matrix(M, code.e, F.degree)
            st.symbols[i][targets] = F.vecmat(st.symbols[i][sources], Me)
        done["local"].extend((i, j) for j in sorted(pos))
    if stuck:
        ss.erased = [(i, j) for i, j in ss.erased if i in stuck]
        if not force_global:
            groups = ", ".join(str(i + 1) for i in stuck)
            err = UnrepairableLocally(f"group(s) {groups} cannot be repaired locally; rerun with --force-global")
            err.repaired = done
            raise err
        f = st.decode(pattern_of(ss))
        fresh = st._encode_groups(f, stuck, [st.r[i] for i in stuck])
        for i, arr in zip(stuck, fresh):
            for j in by_group[i]:
                st.symbols[i][j] = arr[j]
            done["global"].extend((i, j) for j in sorted(by_group[i]))
    ss.erased = []
    return done

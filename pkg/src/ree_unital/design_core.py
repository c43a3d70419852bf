"""Incidence structures: 2-design checks, dual-K_n search, isomorphism search.

Blocks are stored in CSR form (one flat int array plus offsets) so that
RT(27), with half a million blocks of 28 points, fits comfortably in memory.
"""

from __future__ import annotations

import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

SCHEMA_VERSION = 1


class NotADesign(ValueError):
    """Raised by :func:`verify_2design`; ``pair`` names the first offender."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class ConfigurationError(ValueError):
    """A configuration failed validation; ``flag`` names the offending flag."""

    def __init__(self, message: str, flag=None):
        super().__init__(message)
        self.flag = flag


class IncidenceStructure:
    """Points 0..v-1 and a list of blocks (sorted, duplicate-free point tuples)."""

    def __init__(self, v: int, blocks: Iterable[Sequence[int]] | np.ndarray, meta: dict | None = None):
        self.v = int(v)
        if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
            arr = np.sort(blocks.astype(np.int64), axis=1)
            self._flat = arr.reshape(-1)
            self._offsets = np.arange(0, arr.size + 1, arr.shape[1], dtype=np.int64) if arr.shape[0] else np.zeros(1, np.int64)
        else:
            rows = [sorted(int(p) for p in blk) for blk in blocks]
            self._flat = np.array([p for r in rows for p in r], dtype=np.int64)
            self._offsets = np.concatenate([[0], np.cumsum([len(r) for r in rows], dtype=np.int64)]).astype(np.int64)
        self.meta = dict(meta or {})
        self._validate()

    def _validate(self) -> None:
        if self._flat.size and (self._flat.min() < 0 or self._flat.max() >= self.v):
            raise ValueError("point index out of range")
        sizes = np.diff(self._offsets)
        if np.any(sizes == 0):
            raise ValueError("empty block")
        # sorted input per block: duplicates show up as equal neighbours
        same = self._flat[1:] == self._flat[:-1]
        starts = np.zeros(self._flat.size, dtype=bool)
        starts[self._offsets[:-1]] = True
        if np.any(same & ~starts[1:]):
            raise ValueError("block with a repeated point")

    @property
    def b(self) -> int:
        return self._offsets.size - 1

    def block(self, j: int) -> tuple[int, ...]:
        return tuple(int(p) for p in self._flat[self._offsets[j] : self._offsets[j + 1]])

    @property
    def blocks(self) -> list[tuple[int, ...]]:
        return [self.block(j) for j in range(self.b)]

    def block_sizes(self) -> np.ndarray:
        return np.diff(self._offsets)

    def block_array(self) -> np.ndarray:
        """Blocks as a (b, k) array; only for constant block size."""
        sizes = self.block_sizes()
        if sizes.size and np.any(sizes != sizes[0]):
            raise ValueError("block sizes differ")
        k = int(sizes[0]) if sizes.size else 0
        return self._flat.reshape(self.b, k)

    @property
    def point_blocks(self) -> list[tuple[int, ...]]:
        """For each point, the ascending ids of the blocks through it."""
        if not hasattr(self, "_point_blocks"):
            block_ids = np.repeat(np.arange(self.b), np.diff(self._offsets))
            order = np.argsort(self._flat, kind="stable")
            pts = self._flat[order]
            ids = block_ids[order]
            bounds = np.searchsorted(pts, np.arange(self.v + 1))
            self._point_blocks = [tuple(int(x) for x in ids[bounds[p] : bounds[p + 1]]) for p in range(self.v)]
        return self._point_blocks

    def block_sets(self) -> list[frozenset[int]]:
        if not hasattr(self, "_block_sets"):
            self._block_sets = [frozenset(blk) for blk in self.blocks]
        return self._block_sets

    def degrees(self) -> np.ndarray:
        return np.bincount(self._flat, minlength=self.v)

    def canonical_blocks(self) -> list[tuple[int, ...]]:
        return sorted(self.blocks)

    def __eq__(self, other) -> bool:
        return isinstance(other, IncidenceStructure) and self.v == other.v and self.canonical_blocks() == other.canonical_blocks()

    def __repr__(self) -> str:
        return f"IncidenceStructure(v={self.v}, b={self.b})"


# ---------------------------------------------------------------------------
# 2-design verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignParams:
    v: int
    b: int
    r: int
    k: int
    lam: int
    pair_incidences: int = 0  # sum over blocks of C(k, 2)

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.v, self.b, self.r, self.k, self.lam)


def _pair_codes(blocks: np.ndarray) -> np.ndarray:
    """Code each point pair {i < j} as j(j-1)/2 + i, row by row."""
    k = blocks.shape[1]
    ii, jj = np.array(list(combinations(range(k), 2)), dtype=np.int64).T
    lo, hi = blocks[:, ii], blocks[:, jj]
    return (hi * (hi - 1) // 2 + lo).reshape(-1)


def _decode_pair(code: int) -> tuple[int, int]:
    j = int((1 + math.isqrt(1 + 8 * code)) // 2)
    while j * (j - 1) // 2 > code:
        j -= 1
    while (j + 1) * j // 2 <= code:
        j += 1
    return (code - j * (j - 1) // 2, j)


def verify_2design(s: IncidenceStructure, chunk_pairs: int = 8_000_000) -> DesignParams:
    """Check constant k, constant r, and that every pair lies on exactly lambda blocks."""
    sizes = s.block_sizes()
    if s.b == 0:
        raise NotADesign("no blocks")
    if np.any(sizes != sizes[0]):
        j = int(np.nonzero(sizes != sizes[0])[0][0])
        raise NotADesign(f"block {j} has size {sizes[j]}, expected {sizes[0]}")
    k = int(sizes[0])
    if k < 2:
        raise NotADesign("blocks need at least two points")
    npairs = s.v * (s.v - 1) // 2
    counts = np.zeros(npairs, dtype=np.uint16)
    arr = s.block_array()
    per_block = k * (k - 1) // 2
    step = max(1, chunk_pairs // per_block)
    for start in range(0, s.b, step):
        codes = _pair_codes(arr[start : start + step])
        uniq, cnt = np.unique(codes, return_counts=True)
        counts[uniq] += cnt.astype(np.uint16)
    lam = int(counts[0]) if npairs else 0
    bad = np.nonzero(counts != lam)[0]
    if bad.size:
        pair = _decode_pair(int(bad[0]))
        raise NotADesign(f"pair {pair} lies on {counts[bad[0]]} blocks, expected {lam}", pair)
    if lam == 0:
        raise NotADesign("lambda = 0", (0, 1))
    # constant k and lambda force constant r; kept as a cheap cross-check
    deg = s.degrees()
    if np.any(deg != deg[0]):
        p = int(np.nonzero(deg != deg[0])[0][0])
        raise NotADesign(f"point {p} lies on {deg[p]} blocks, point 0 on {deg[0]}")
    r = int(deg[0])
    return DesignParams(s.v, s.b, r, k, lam, pair_incidences=s.b * per_block)


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Chosen points and blocks of a host, with the flags between them."""

    points: tuple[int, ...]
    blocks: tuple[int, ...]
    flags: frozenset[tuple[int, int]] = field(default=frozenset())

    @classmethod
    def induced(cls, host: IncidenceStructure, points: Iterable[int], blocks: Iterable[int]) -> "Configuration":
        pts = tuple(sorted(set(int(p) for p in points)))
        blks = tuple(sorted(set(int(b) for b in blocks)))
        _check_ids(host, pts, blks)
        sets = host.block_sets()
        chosen = set(pts)
        flags = frozenset((p, j) for j in blks for p in sets[j] if p in chosen)
        return cls(pts, blks, flags)

    def point_degrees(self) -> Counter:
        c = Counter({p: 0 for p in self.points})
        c.update(p for p, _ in self.flags)
        return c

    def block_degrees(self) -> Counter:
        c = Counter({j: 0 for j in self.blocks})
        c.update(j for _, j in self.flags)
        return c


@dataclass(frozen=True)
class DegreePattern:
    """How many chosen points (blocks) have each induced degree."""

    point_degrees: dict[int, int]
    block_degrees: dict[int, int]

    @classmethod
    def dual_kn(cls, n: int) -> "DegreePattern":
        return cls({2: n * (n - 1) // 2} if n > 1 else {}, {n - 1: n} if n else {})

    @classmethod
    def empty(cls) -> "DegreePattern":
        return cls({}, {})


def _check_ids(host: IncidenceStructure, points, blocks) -> None:
    for p in points:
        if not 0 <= p < host.v:
            raise ValueError(f"point id {p} out of range")
    for j in blocks:
        if not 0 <= j < host.b:
            raise ValueError(f"block id {j} out of range")


def validate_configuration(host: IncidenceStructure, cfg: Configuration, pattern: DegreePattern) -> bool:
    """True iff the induced degrees match ``pattern`` exactly."""
    _check_ids(host, cfg.points, cfg.blocks)
    sets = host.block_sets()
    for p, j in cfg.flags:
        if p not in sets[j]:
            raise ConfigurationError(f"({p}, {j}) is not a flag of the host", (p, j))
    pd = Counter(cfg.point_degrees().values())
    bd = Counter(cfg.block_degrees().values())
    want_p = Counter({d: c for d, c in pattern.point_degrees.items() if c})
    want_b = Counter({d: c for d, c in pattern.block_degrees.items() if c})
    return pd == want_p and bd == want_b


def dual_kn_points(host: IncidenceStructure, blocks: Sequence[int]) -> list[int] | None:
    """Meeting points if ``blocks`` form a dual of K_n, else None."""
    sets = host.block_sets()
    meets = []
    for i, j in combinations(blocks, 2):
        common = sets[i] & sets[j]
        if len(common) != 1:
            return None
        meets.append(next(iter(common)))
    if len(set(meets)) != len(meets):
        return None
    return meets


def require_dual_kn(host: IncidenceStructure, blocks: Sequence[int], points: Iterable[int] | None = None) -> Configuration:
    """Validate a dual-K_n; raise :class:`ConfigurationError` naming the failure."""
    sets = host.block_sets()
    meets = {}
    for i, j in combinations(blocks, 2):
        common = sets[i] & sets[j]
        if len(common) != 1:
            raise ConfigurationError(f"blocks {i} and {j} share {len(common)} points", (i, j))
        meets[(i, j)] = next(iter(common))
    if len(set(meets.values())) != len(meets):
        raise ConfigurationError("three chosen blocks are concurrent")
    if points is not None:
        pts = set(points)
        if pts != set(meets.values()):
            extra = sorted(pts ^ set(meets.values()))
            raise ConfigurationError(f"point set differs from the meeting points at {extra}", extra[0])
    cfg = Configuration.induced(host, meets.values(), blocks)
    if not validate_configuration(host, cfg, DegreePattern.dual_kn(len(blocks))):
        raise ConfigurationError("degree pattern is not that of a dual K_n")
    return cfg


# ---------------------------------------------------------------------------
# dual-K_n search
# ---------------------------------------------------------------------------


class _Budget(Exception):
    pass


class BudgetExceeded(RuntimeError):
    """A search ran out of its node budget before deciding."""

    def __init__(self, nodes: int):
        super().__init__(f"undecided within budget ({nodes} nodes)")
        self.nodes = nodes


@dataclass
class DualKnResult:
    status: str  # "found" | "none" | "undecided"
    blocks: tuple[int, ...] = ()
    points: tuple[int, ...] = ()
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


def find_dual_kn(s: IncidenceStructure, n: int, limit: int | None = 1_000_000) -> DualKnResult:
    """Backtracking search for n blocks pairwise meeting in distinct points.

    Blocks are tried in ascending id, so the witness returned is the
    lexicographically smallest.  ``limit`` caps visited nodes; running out
    yields status "undecided", never "none".
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    sets = s.block_sets()
    pblocks = s.point_blocks
    nodes = 0

    def extend(chosen: list[int], used: set[int]) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if limit is not None and nodes > limit:
            raise _Budget
        if len(chosen) == n:
            return chosen
        first, last = chosen[0], chosen[-1]
        cands = sorted({j for p in sets[first] if p not in used for j in pblocks[p] if j > last})
        for cand in cands:
            meets = []
            for j in chosen:
                common = sets[cand] & sets[j]
                if len(common) != 1:
                    break
                (p,) = common
                if p in used:
                    break
                meets.append(p)
            else:
                if len(set(meets)) != len(meets):
                    continue
                found = extend(chosen + [cand], used | set(meets))
                if found:
                    return found
        return None

    try:
        for start in range(s.b):
            found = extend([start], set())
            if found:
                pts = dual_kn_points(s, found)
                return DualKnResult("found", tuple(found), tuple(sorted(pts)), nodes)
    except _Budget:
        return DualKnResult("undecided", nodes=nodes - 1)
    return DualKnResult("none", nodes=nodes)


# ---------------------------------------------------------------------------
# Isomorphism search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointBijection:
    perm: tuple[int, ...]  # point i of the first structure -> perm[i]

    def __call__(self, p: int) -> int:
        return self.perm[p]

    def compose(self, other: "PointBijection") -> "PointBijection":
        """First self, then other."""
        return PointBijection(tuple(other.perm[x] for x in self.perm))

    def inverse(self) -> "PointBijection":
        inv = [0] * len(self.perm)
        for i, x in enumerate(self.perm):
            inv[x] = i
        return PointBijection(tuple(inv))


def is_block_preserving(s1: IncidenceStructure, s2: IncidenceStructure, f: PointBijection) -> bool:
    if s1.v != s2.v or s1.b != s2.b or sorted(f.perm) != list(range(s1.v)):
        return False
    target = set(s2.block_sets())
    images = {frozenset(f.perm[p] for p in blk) for blk in s1.block_sets()}
    return len(images) == s1.b and images <= target


def _intersection_profile(s: IncidenceStructure) -> Counter:
    sets = s.block_sets()
    if s.b > 2000:
        return Counter()
    return Counter(len(a & b) for a, b in combinations(sets, 2))


def _point_signature(s: IncidenceStructure, p: int) -> tuple:
    sizes = s.block_sizes()
    return (len(s.point_blocks[p]), tuple(sorted(int(sizes[j]) for j in s.point_blocks[p])))


def isomorphism_search(s1: IncidenceStructure, s2: IncidenceStructure, limit: int | None = None) -> PointBijection | None:
    """A block-preserving point bijection s1 -> s2, or None after exhausting the tree.

    Running past ``limit`` search nodes raises :class:`BudgetExceeded`.

    Invariants (sizes, degree and block-size multisets, block-intersection
    distribution) are compared first; the backtracking then keeps, for every
    block on each side, the bitmask of blocks on the other side that could
    still be its image.
    """
    if s1.v != s2.v or s1.b != s2.b:
        return None
    if sorted(s1.block_sizes().tolist()) != sorted(s2.block_sizes().tolist()):
        return None
    sig1 = [_point_signature(s1, p) for p in range(s1.v)]
    sig2 = [_point_signature(s2, p) for p in range(s2.v)]
    if sorted(sig1) != sorted(sig2):
        return None
    if _intersection_profile(s1) != _intersection_profile(s2):
        return None

    v = s1.v
    size1, size2 = s1.block_sizes(), s2.block_sizes()
    pb1, pb2 = s1.point_blocks, s2.point_blocks
    mask1 = [sum(1 << j for j in pb1[p]) for p in range(v)]
    mask2 = [sum(1 << j for j in pb2[p]) for p in range(v)]
    by_size2: dict[int, int] = {}
    for j, k in enumerate(size2.tolist()):
        by_size2[k] = by_size2.get(k, 0) | (1 << j)
    by_size1: dict[int, int] = {}
    for j, k in enumerate(size1.tolist()):
        by_size1[k] = by_size1.get(k, 0) | (1 << j)
    cand1 = [by_size2[k] for k in size1.tolist()]
    cand2 = [by_size1[k] for k in size2.tolist()]

    # seed with point 0, then extend along blocks (breadth first)
    order, seen = [], set()
    queue = [0] if v else []
    while len(order) < v:
        if not queue:
            queue = [min(set(range(v)) - seen)]
        p = queue.pop(0)
        if p in seen:
            continue
        seen.add(p)
        order.append(p)
        for j in pb1[p]:
            queue.extend(x for x in s1.block(j) if x not in seen)

    f = [-1] * v
    used = [False] * v
    nodes = 0

    def assign(depth: int) -> bool:
        nonlocal nodes
        nodes += 1
        if limit is not None and nodes > limit:
            raise _Budget
        if depth == v:
            return True
        x = order[depth]
        for y in range(v):
            if used[y] or sig1[x] != sig2[y]:
                continue
            saved1 = [(j, cand1[j]) for j in pb1[x]]
            saved2 = [(j, cand2[j]) for j in pb2[y]]
            ok = True
            for j in pb1[x]:
                cand1[j] &= mask2[y]
                if not cand1[j]:
                    ok = False
                    break
            if ok:
                for j in pb2[y]:
                    cand2[j] &= mask1[x]
                    if not cand2[j]:
                        ok = False
                        break
            if ok:
                f[x], used[y] = y, True
                if assign(depth + 1):
                    return True
                f[x], used[y] = -1, False
            for j, m in saved1:
                cand1[j] = m
            for j, m in saved2:
                cand2[j] = m
        return False

    try:
        if not assign(0):
            return None
    except _Budget:
        raise BudgetExceeded(nodes - 1) from None
    bij = PointBijection(tuple(f))
    if not is_block_preserving(s1, s2, bij):
        raise AssertionError("search produced a non-isomorphism")  # unreachable
    return bij


def automorphism_permutations(s: IncidenceStructure, point_maps: Iterable[Sequence[int]]) -> list[PointBijection]:
    """Wrap point permutations, checking each one preserves the block set."""
    out = []
    for perm in point_maps:
        f = PointBijection(tuple(int(x) for x in perm))
        if not is_block_preserving(s, s, f):
            raise ValueError("map does not preserve blocks")
        out.append(f)
    return out


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def write_incidence(s: IncidenceStructure, out: TextIO | str | Path) -> None:
    """Text form: ``incidence v=<v> b=<b>``, optional ``# key: value`` lines,
    then one block per line."""
    if isinstance(out, (str, Path)):
        with open(out, "w") as fh:
            write_incidence(s, fh)
        return
    out.write(f"incidence v={s.v} b={s.b}\n")
    for key, value in s.meta.items():
        out.write(f"# {key}: {value}\n")
    flat, off = s._flat, s._offsets
    sizes = np.diff(off)
    if s.b and np.all(sizes == sizes[0]):
        arr = flat.reshape(s.b, int(sizes[0]))
        for start in range(0, s.b, 20000):
            chunk = arr[start : start + 20000]
            out.write("\n".join(" ".join(map(str, row)) for row in chunk.tolist()))
            out.write("\n")
    else:
        for j in range(s.b):
            out.write(" ".join(map(str, s.block(j))) + "\n")


def read_incidence(src: TextIO | str | Path) -> IncidenceStructure:
    if isinstance(src, (str, Path)):
        with open(src) as fh:
            return read_incidence(fh)
    header = src.readline().split()
    if len(header) != 3 or header[0] != "incidence" or not header[1].startswith("v=") or not header[2].startswith("b="):
        raise ValueError("missing 'incidence v=<v> b=<b>' header")
    v, b = int(header[1][2:]), int(header[2][2:])
    meta, blocks = {}, []
    for line in src:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
            continue
        blocks.append([int(t) for t in line.split()])
    if len(blocks) != b:
        raise ValueError(f"header says b={b}, found {len(blocks)} blocks")
    sizes = {len(blk) for blk in blocks}
    if len(sizes) == 1 and b > 1000:
        return IncidenceStructure(v, np.array(blocks, dtype=np.int64), meta)
    return IncidenceStructure(v, blocks, meta)


def to_json(s: IncidenceStructure) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "format": "incidence", "v": s.v, "b": s.b}
    doc.update(s.meta)
    doc["blocks"] = [list(blk) for blk in s.blocks]
    return doc


def from_json(doc: dict | str) -> IncidenceStructure:
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("format") != "incidence":
        raise ValueError("not an incidence document")
    meta = {k: v for k, v in doc.items() if k not in {"schema_version", "format", "v", "b", "blocks"}}
    s = IncidenceStructure(doc["v"], doc["blocks"], meta)
    if s.b != doc["b"]:
        raise ValueError("block count mismatch")
    return s


def load_structure(path: str | Path) -> IncidenceStructure:
    """Read either file format, sniffing the first character."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return from_json(text)
    return read_incidence(io.StringIO(text))

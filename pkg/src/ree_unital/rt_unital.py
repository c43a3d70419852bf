"""The Ree-Tits unital RT(q): joins, the full block set for q in {3, 27},
the super O'Nan configuration and its translates, and the intersection search.

Points are the dense ids of :mod:`ree_root_group` (inf = 0).  Blocks are
fixed-point sets of involutions.  Those through inf come straight from the
explicit parameterization; every other block is carried there by a right
translation and omega.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import ree_root_group as rr
from .design_core import Configuration, ConfigurationError, DegreePattern, IncidenceStructure, require_dual_kn
from .finite_fields import F3nCtx, field_for_order, make_field
from .ree_root_group import INF, INF_ID, ORIGIN_ID, InvolutionParam, ReePoint

BUILD_Q = (3, 27)
SEARCH_Q = (3, 27, 243, 2187, 19683)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("REE_UNITAL_WORKERS", "1")))
    except ValueError:
        return 1


# --- joining ---------------------------------------------------------------------


def _param_through(F: F3nCtx, pid: int) -> tuple[int, int]:
    """(a, c) of the block through inf and the finite point ``pid``.

    From <-a, y, a y - c - a^(t+2)>: a = -x1, c = a x2 - x3 - a^(t+2)."""
    x1, x2, x3 = (int(v) for v in rr.decode(F, pid))
    a = int(F.neg(x1))
    c = int(F.sub(F.sub(F.mul(a, x2), x3), F.theta_plus(a, 2)))
    return a, c


def block_through_infinity(F: F3nCtx, a: int, c: int) -> np.ndarray:
    """Sorted ids of Fix(eta_-1 <a,-a^(t+1),c>)."""
    return np.sort(np.concatenate([[INF_ID], rr.fixed_point_codes(F, a, c)]))


def join_ids(F: F3nCtx, p: int, r: int) -> np.ndarray:
    """Sorted point ids of the unique block through points ``p`` and ``r``."""
    p, r = int(p), int(r)
    if p == r:
        raise ValueError("join needs two distinct points")
    if r == INF_ID:
        p, r = r, p
    if p == INF_ID:
        return block_through_infinity(F, *_param_through(F, r))
    # send p to o by p^-1, then o to inf by omega
    pinv = tuple(int(v) for v in rr.inv_codes(F, *rr.decode(F, p)))
    w = int(rr.translate_ids(F, [r], pinv)[0])
    w = int(rr.omega_ids(F, [w])[0])
    blk = block_through_infinity(F, *_param_through(F, w))
    back = rr.translate_ids(F, rr.omega_ids(F, blk), tuple(int(v) for v in rr.decode(F, p)))
    return np.sort(back)


def join_rt(p: ReePoint, r: ReePoint, F: F3nCtx) -> list[ReePoint]:
    ids = join_ids(F, rr.point_id(p), rr.point_id(r))
    return [rr.point_from_id(F, int(i)) for i in ids]


# --- the full design for q in {3, 27} --------------------------------------------------


@dataclass
class RTUnital:
    ctx: F3nCtx
    structure: IncidenceStructure
    # (a, c) codes of the q^2 blocks through inf, indexed by block id
    through_infinity: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def v(self) -> int:
        return self.structure.v

    @property
    def b(self) -> int:
        return self.structure.b

    def point(self, pid: int) -> ReePoint:
        return rr.point_from_id(self.ctx, pid)

    def _keys(self) -> np.ndarray:
        if not hasattr(self, "_key_cache"):
            arr = self.structure.block_array()
            # a block is fixed by its two smallest points
            self._key_cache = arr[:, 0] * self.v + arr[:, 1]
        return self._key_cache

    def block_id(self, points) -> int:
        """Id of the block whose point set is ``points``; KeyError if none."""
        pts = np.sort(np.asarray(list(points), dtype=np.int64))
        keys = self._keys()
        key = pts[0] * self.v + pts[1]
        j = int(np.searchsorted(keys, key))
        if j < keys.size and keys[j] == key and np.array_equal(self.structure.block_array()[j], pts):
            return j
        raise KeyError("not a block of RT(q)")

    def block_through(self, p: int, r: int) -> int:
        return self.block_id(join_ids(self.ctx, p, r))


def _translates_chunk(F: F3nCtx, o_blocks: np.ndarray, lo: int, hi: int, step: int = 64) -> np.ndarray:
    """Translates B xi of the blocks through o, for point ids xi in [lo, hi),
    keeping B xi only when xi is its smallest point."""
    a, b, c = (t[None, :, :] for t in rr.decode(F, o_blocks))
    out = []
    for start in range(lo, hi, step):
        xi = np.arange(start, min(hi, start + step), dtype=np.int64)
        x, y, z = (t[:, None, None] for t in rr.decode(F, xi))
        moved = rr.encode(F, *rr.mul_codes(F, a, b, c, x, y, z))
        keep = moved.min(axis=2) == xi[:, None]
        out.append(moved[keep])
    k = o_blocks.shape[1]
    return np.concatenate(out) if out else np.empty((0, k), dtype=np.int64)


def _translates_job(args):
    n, o_blocks, lo, hi = args
    return _translates_chunk(make_field(n), o_blocks, lo, hi)


def build_rt(F: F3nCtx, workers: int = 1) -> RTUnital:
    """All blocks of RT(q), canonically sorted.

    Every block not through inf has a smallest point xi; translating by
    xi^-1 gives a block through o, which omega takes to a block through inf.
    So each such block arises exactly once as B xi with B through o and xi
    its minimum."""
    q = F.q
    if q not in BUILD_Q:
        raise ValueError(f"build_rt materializes q in {BUILD_Q} only, got {q}")
    codes = F.codes()
    aa, cc = np.repeat(codes, q), np.tile(codes, q)
    fin = rr.fixed_point_codes(F, aa, cc)
    inf_blocks = np.hstack([np.zeros((q * q, 1), dtype=np.int64), fin])
    o_blocks = rr.omega_ids(F, inf_blocks.ravel()).reshape(inf_blocks.shape)
    o_blocks = o_blocks[~(o_blocks == INF_ID).any(axis=1)]  # Fix sigma goes to itself

    npts = q**3 + 1
    if workers > 1:
        bounds = np.linspace(ORIGIN_ID, npts, workers + 1).astype(int)
        jobs = [(F.n, o_blocks, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_translates_job, jobs))
    else:
        parts = [_translates_chunk(F, o_blocks, ORIGIN_ID, npts)]
    blocks = np.vstack([inf_blocks] + parts)
    blocks.sort(axis=1)
    order = np.lexsort(blocks.T[::-1])
    blocks = blocks[order]
    if np.any(np.all(blocks[1:] == blocks[:-1], axis=1)):
        raise AssertionError("duplicate block in the translate scheme")

    params = {}
    inf_rows = np.flatnonzero(blocks[:, 0] == INF_ID)
    for j in inf_rows:
        params[int(j)] = _param_through(F, int(blocks[j, 1]))
    meta = {"design": f"RT({q})", "field": F.header}
    s = IncidenceStructure(npts, blocks, meta)
    return RTUnital(F, s, params)


# --- the super O'Nan configuration and its translates ------------------------------


def _lam(F: F3nCtx, t: int) -> tuple[int, int, int]:
    return (0, int(t), 0)


def _eps_id(F: F3nCtx) -> int:
    return int(rr.encode(F, 0, 0, F.neg(1)))


def super_onan_ids(F: F3nCtx, t: int = 0) -> tuple[list[int], list[np.ndarray]]:
    """Points and blocks of the super O'Nan configuration translated by lambda_t.

    Points: inf, eps lam^k, eps^sigma lam^k, psi lam^k (k = 0, 1, 2);
    blocks: Fix tau, Fix tau^sigma, Fix iota lam^k."""
    m1 = int(F.neg(1))
    eps = _eps_id(F)
    eps_s = int(rr.eta_ids(F, [eps], m1)[0])
    lam = [_lam(F, k % 3) for k in range(3)]
    eps_p = int(rr.translate_ids(F, [eps_s], lam[1])[0])
    iota = join_ids(F, eps, eps_p)
    blocks = [join_ids(F, INF_ID, eps), join_ids(F, INF_ID, eps_s)]
    blocks += [np.sort(rr.translate_ids(F, iota, lam[k])) for k in range(3)]
    tl = _lam(F, t)
    blocks = [np.sort(rr.translate_ids(F, blk, tl)) for blk in blocks]
    meets = _meeting_points(blocks)
    if meets is None:
        raise ConfigurationError("translated configuration is not a dual K_5")
    return sorted(set(meets)), blocks


def _meeting_points(blocks: list[np.ndarray]) -> list[int] | None:
    """Meeting points of blocks forming a dual K_n, else None."""
    meets = []
    for u, w in combinations(blocks, 2):
        common = np.intersect1d(u, w)
        if common.size != 1:
            return None
        meets.append(int(common[0]))
    if len(set(meets)) != len(meets):
        return None
    return meets


def psi_id(F: F3nCtx) -> int:
    m1 = int(F.neg(1))
    return int(rr.encode(F, m1, m1, 1))


def super_onan_rt3(rt: RTUnital | None = None) -> Configuration:
    """The configuration S in RT(3), validated as a dual K_5."""
    F = make_field(1)
    rt = rt or build_rt(F)
    pts, blocks = super_onan_ids(F)
    bids = [rt.block_id(blk) for blk in blocks]
    return require_dual_kn(rt.structure, bids, pts)


@dataclass
class PearlChain:
    ctx: F3nCtx
    shifts: list[int]  # coset representatives t of GF(3) in K
    configs: list[tuple[list[int], list[tuple[int, ...]]]]
    shared_blocks: list[tuple[int, ...]]
    union_points: list[int]
    union_blocks: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        q = self.ctx.q
        return len(self.union_points) == 3 * q + 1 and len(self.union_blocks) == q + 2


def string_of_pearls(F: F3nCtx) -> PearlChain:
    """Translates of the super O'Nan configuration by lambda_t, one per coset
    t + GF(3); they all share inf, Fix tau and Fix tau^sigma."""
    if F.q not in BUILD_Q:
        raise ValueError(f"string_of_pearls needs q in {BUILD_Q}, got {F.q}")
    shifts = [t for t in range(F.q) if t % 3 == 0]  # constant coefficient 0
    configs = []
    base_pts, base_blocks = super_onan_ids(F)
    shared = [tuple(int(v) for v in base_blocks[0]), tuple(int(v) for v in base_blocks[1])]
    for t in shifts:
        pts, blocks = super_onan_ids(F, t)
        tb = [tuple(int(v) for v in blk) for blk in blocks]
        if tb[:2] != shared or INF_ID not in pts:
            raise ConfigurationError(f"translate by lambda_{t} moved a shared block")
        for blk in blocks:
            # each block is the join of any two of its points
            if not np.array_equal(join_ids(F, int(blk[0]), int(blk[1])), blk):
                raise ConfigurationError("translated block is not a block of RT(q)")
        configs.append((pts, tb))
    upts = sorted({p for pts, _ in configs for p in pts})
    ublks = sorted({b for _, blks in configs for b in blks})
    return PearlChain(F, shifts, configs, shared, upts, ublks)


# --- omega fixed points ----------------------------------------------------------------


def omega_fix_ids(F: F3nCtx, chunk: int = 1 << 20) -> np.ndarray:
    npts = q3 = F.q**3 + 1
    out = []
    for lo in range(0, npts, chunk):
        ids = np.arange(lo, min(q3, lo + chunk), dtype=np.int64)
        out.append(ids[rr.omega_ids(F, ids) == ids])
    return np.concatenate(out)


def omega_fix(F: F3nCtx) -> list[ReePoint]:
    return [rr.point_from_id(F, int(p)) for p in omega_fix_ids(F)]


# --- intersections of Fix iota with its Lambda-translates ------------------------------


@dataclass(frozen=True)
class Solution:
    x: int
    s: int
    m: int

    def format(self, F: F3nCtx) -> str:
        return f"x={F.format(self.x)} s={F.format(self.s)} m={F.format(self.m)}"


def _orbit_point_tables(F: F3nCtx):
    """For every x with x^(t+1) + 1 != 0, the coordinates of
    (<0,x,-1>)^omega = A(x) <1-x, x^t, -1>, A(x) = -1/(x^(t+1)+1)."""
    x = F.codes()
    den = F.add(F.theta_plus(x, 1), 1)
    valid = den != 0
    A = np.zeros_like(x)
    A[valid] = F.neg(F.inv(den[valid]))
    f1 = F.mul(A, F.sub(1, x))
    f2 = F.mul(A, F.theta(x))
    f3 = F.neg(A)
    return valid, A, f1, f2, f3


def _search_range(n: int, lo: int, hi: int) -> list[tuple[int, int, int]]:
    F = make_field(n)
    valid, A, f1, f2, f3 = _orbit_point_tables(F)
    xs_all = F.codes()
    sols = []
    for s in range(lo, hi):
        if not valid[s]:
            continue
        xs = xs_all[(f1 == f1[s]) & valid]
        if not xs.size:
            continue
        m = F.sub(f2[xs], f2[s])
        # third coordinate of P(s) * <0,m,0> is A(s)((1-s) m - 1)
        rhs = F.mul(A[s], F.sub(F.mul(F.sub(1, s), m), 1))
        ok = (m != 0) & (f3[xs] == rhs)
        sols.extend((int(x), s, int(mm)) for x, mm in zip(xs[ok], m[ok]))
    return sols


def intersection_search(F: F3nCtx, workers: int = 1) -> list[Solution]:
    """All (x, s, m), m != 0, with P(x) = P(s) * <0,m,0>, where P(t) is the
    omega-image of <0,t,-1>.  m comes from the middle coordinate; the first
    and third are then checked."""
    q = F.q
    if workers > 1:
        bounds = np.linspace(0, q, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_search_range, [F.n] * workers, bounds[:-1].tolist(), bounds[1:].tolist())
            sols = [t for part in parts for t in part]
    else:
        sols = _search_range(F.n, 0, q)
    return [Solution(*t) for t in sorted(sols, key=lambda t: (t[1], t[0], t[2]))]


def intersection_scan(F: F3nCtx) -> list[Solution]:
    """Reference: every (x, s, m) in K^3, comparing whole points.  P(t) is
    computed with omega itself, the right side with the group law."""
    q = F.q
    t = F.codes()
    den = F.add(F.theta_plus(t, 1), 1)
    valid = t[den != 0]
    m1 = int(F.neg(1))
    pts = rr.omega_ids(F, rr.encode(F, np.zeros_like(valid), valid, np.full_like(valid, m1)))
    P = dict(zip(valid.tolist(), pts.tolist()))
    sols = []
    for s in valid.tolist():
        for m in range(1, q):
            rhs = int(rr.translate_ids(F, [P[s]], (0, m, 0))[0])
            for x in valid.tolist():
                if P[x] == rhs:
                    sols.append(Solution(x, s, m))
    return sorted(sols, key=lambda u: (u.s, u.x, u.m))


def solution_point(F: F3nCtx, sol: Solution) -> tuple[int, int]:
    """(xi, mu) for a solution: xi = P(x) eps on Fix iota and Fix iota mu, mu = lambda_m."""
    m1 = int(F.neg(1))
    px = int(rr.omega_ids(F, rr.encode(F, 0, sol.x, m1)[None])[0])
    xi = int(rr.translate_ids(F, [px], (0, 0, m1))[0])
    return xi, int(rr.encode(F, 0, sol.m, 0))


def search_for_q(q: int, workers: int = 1) -> list[Solution]:
    if q not in SEARCH_Q:
        raise ValueError(f"q must be one of {SEARCH_Q}")
    return intersection_search(field_for_order(q), workers)

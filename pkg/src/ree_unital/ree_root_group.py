"""The root group Xi over K = GF(3^n), the maps omega and eta_s, and the norm.

Elements <a,b,c> of Xi are stored as triples of field codes.  The core
functions work on numpy code arrays so whole point sets can be pushed through
a map at once; ``XiElt`` is the scalar, value-semantic wrapper.

Points of P = Xi + {inf} have dense ids: inf -> 0, <a,b,c> -> 1 + a q^2 + b q + c
(with a, b, c the field codes).  All maps act on the right.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .finite_fields import F3nCtx, F3nElt

INF_ID = 0
ORIGIN_ID = 1


class DomainError(ArithmeticError):
    """Raised when omega meets a non-trivial element of norm 0."""


# --- vectorized core on code arrays -------------------------------------------


def mul_codes(F: F3nCtx, a, b, c, x, y, z):
    """<a,b,c> * <x,y,z> = <a+x, b+y+a x^t, a y - b x + c + z - a x^(t+1)>."""
    xt = F.theta(x)
    A = F.add(a, x)
    B = F.add(F.add(b, y), F.mul(a, xt))
    C = F.sub(F.mul(a, y), F.mul(b, x))
    C = F.add(C, F.add(c, z))
    C = F.sub(C, F.mul(a, F.mul(xt, x)))
    return A, B, C


def inv_codes(F: F3nCtx, a, b, c):
    return F.neg(a), F.sub(F.theta_plus(a, 1), b), F.neg(c)


def cube_codes(F: F3nCtx, a, b, c):
    a = np.asarray(a, dtype=np.int64)
    z = np.zeros_like(a)
    # <a,b,c>^3 = <0,0,-a^(t+2)> under the group law
    return z, z.copy(), F.neg(F.theta_plus(a, 2))


def norm_codes(F: F3nCtx, a, b, c):
    """-a c^t + a^(t+1) b^t - a^(t+3) b - a^2 b^2 + b^(t+1) + c^2 - a^(2t+4)."""
    at, bt, ct = F.theta(a), F.theta(b), F.theta(c)
    a2 = F.mul(a, a)
    terms_pos = [
        F.mul(F.mul(at, a), bt),
        F.mul(bt, b),
        F.mul(c, c),
    ]
    terms_neg = [
        F.mul(a, ct),
        F.mul(F.mul(at, F.mul(a2, a)), b),
        F.mul(a2, F.mul(b, b)),
        F.mul(F.mul(at, at), F.mul(a2, a2)),
    ]
    out = terms_pos[0]
    for t in terms_pos[1:]:
        out = F.add(out, t)
    for t in terms_neg:
        out = F.sub(out, t)
    return out


def omega_codes(F: F3nCtx, a, b, c):
    """omega on non-trivial elements of Xi (no o in the input)."""
    n = norm_codes(F, a, b, c)
    if np.any(n == 0):
        raise DomainError("norm vanishes on a non-trivial element")
    k = F.neg(F.inv(n))
    at, bt, ct = F.theta(a), F.theta(b), F.theta(c)
    a2, a3 = F.mul(a, a), F.pow(a, 3)
    u = F.sub(F.mul(at, bt), ct)
    u = F.add(u, F.mul(a, F.mul(b, b)))
    u = F.add(u, F.mul(b, c))
    u = F.sub(u, F.mul(F.mul(at, at), a3))
    v = F.sub(F.mul(a2, b), F.mul(a, c))
    v = F.add(v, bt)
    v = F.sub(v, F.mul(at, a3))
    return F.mul(k, u), F.mul(k, v), F.mul(k, c)


def eta_codes(F: F3nCtx, s: int, a, b, c):
    if s == 0:
        raise ValueError("eta_s needs s != 0")
    return F.mul(s, a), F.mul(F.theta_plus(s, 1), b), F.mul(F.theta_plus(s, 2), c)


def commutator_codes(F: F3nCtx, a, b, c, x, y, z):
    """[alpha, xi] = alpha^-1 xi^-1 alpha xi in closed form:
    <0, x^t a - a^t x, b x - a y + (x - a)(a^t x + x^t a)>.

    Expanding the word gives b x - a y; the sign-swapped a y - b x does not
    agree with the group law."""
    at, xt = F.theta(a), F.theta(x)
    a = np.asarray(a, dtype=np.int64)
    B = F.sub(F.mul(xt, a), F.mul(at, x))
    C = F.sub(F.mul(b, x), F.mul(a, y))
    C = F.add(C, F.mul(F.sub(x, a), F.add(F.mul(at, x), F.mul(xt, a))))
    return np.zeros_like(B), B, C


# --- point ids ----------------------------------------------------------------


def encode(F: F3nCtx, a, b, c):
    q = F.q
    return 1 + (np.asarray(a, dtype=np.int64) * q + b) * q + c


def decode(F: F3nCtx, ids):
    """Split finite point ids into (a, b, c) code arrays."""
    q = F.q
    r = np.asarray(ids, dtype=np.int64) - 1
    r, c = np.divmod(r, q)
    a, b = np.divmod(r, q)
    return a, b, c


def num_points(F: F3nCtx) -> int:
    return F.q**3 + 1


def all_ids(F: F3nCtx) -> np.ndarray:
    return np.arange(num_points(F), dtype=np.int64)


def _finite_map(F: F3nCtx, ids, fn, inf_to=INF_ID):
    """Apply a map of Xi to finite ids; inf goes to ``inf_to``."""
    ids = np.asarray(ids, dtype=np.int64)
    out = np.empty_like(ids)
    fin = ids != INF_ID
    out[~fin] = inf_to
    if fin.any():
        out[fin] = encode(F, *fn(*decode(F, ids[fin])))
    return out


def translate_ids(F: F3nCtx, ids, xi: tuple[int, int, int]) -> np.ndarray:
    """Right translation p -> p * xi; fixes inf."""
    x, y, z = xi
    return _finite_map(F, ids, lambda a, b, c: mul_codes(F, a, b, c, x, y, z))


def eta_ids(F: F3nCtx, ids, s: int) -> np.ndarray:
    return _finite_map(F, ids, lambda a, b, c: eta_codes(F, s, a, b, c))


def omega_ids(F: F3nCtx, ids) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    out = np.empty_like(ids)
    out[ids == INF_ID] = ORIGIN_ID
    out[ids == ORIGIN_ID] = INF_ID
    rest = ids > ORIGIN_ID
    if rest.any():
        out[rest] = encode(F, *omega_codes(F, *decode(F, ids[rest])))
    return out


# --- scalar wrappers ----------------------------------------------------------


@dataclass(frozen=True)
class XiElt:
    """<a,b,c> in Xi; all three coordinates share one field context."""

    a: F3nElt
    b: F3nElt
    c: F3nElt

    def __post_init__(self):
        if not (self.a.ctx is self.b.ctx is self.c.ctx):
            raise ValueError("coordinates from different fields")

    @property
    def ctx(self) -> F3nCtx:
        return self.a.ctx

    @classmethod
    def from_codes(cls, F: F3nCtx, a, b, c) -> "XiElt":
        return cls(F(int(a)), F(int(b)), F(int(c)))

    @classmethod
    def of(cls, F: F3nCtx, a, b, c) -> "XiElt":
        """Build from small integers (embedded mod 3) or field elements."""
        conv = lambda v: v if isinstance(v, F3nElt) else F.from_int(v)
        return cls(conv(a), conv(b), conv(c))

    @classmethod
    def identity(cls, F: F3nCtx) -> "XiElt":
        return cls(F.zero, F.zero, F.zero)

    @property
    def codes(self) -> tuple[int, int, int]:
        return (self.a.code, self.b.code, self.c.code)

    @property
    def id(self) -> int:
        return int(encode(self.ctx, *self.codes))

    def is_identity(self) -> bool:
        return self.codes == (0, 0, 0)

    def _check(self, other: "XiElt") -> None:
        if other.ctx is not self.ctx:
            raise ValueError("field context mismatch")

    def __mul__(self, other: "XiElt") -> "XiElt":
        return xi_mul(self, other)

    def inverse(self) -> "XiElt":
        return xi_inv(self)

    def __pow__(self, e: int) -> "XiElt":
        if e < 0:
            return self.inverse() ** (-e)
        out = XiElt.identity(self.ctx)
        for _ in range(e):
            out = out * self
        return out

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"

    def __repr__(self) -> str:
        return f"XiElt{self}"


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __str__(self) -> str:
        return "inf"

    __repr__ = __str__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ReePoint = XiElt | _Infinity


def _wrap(F: F3nCtx, abc) -> XiElt:
    return XiElt.from_codes(F, *(int(v) for v in abc))


def xi_mul(xi: XiElt, chi: XiElt) -> XiElt:
    xi._check(chi)
    F = xi.ctx
    return _wrap(F, mul_codes(F, *xi.codes, *chi.codes))


def xi_inv(xi: XiElt) -> XiElt:
    return _wrap(xi.ctx, inv_codes(xi.ctx, *xi.codes))


def xi_cube(xi: XiElt) -> XiElt:
    return _wrap(xi.ctx, cube_codes(xi.ctx, *xi.codes))


def norm(xi: XiElt) -> F3nElt:
    return xi.ctx(int(norm_codes(xi.ctx, *xi.codes)))


def omega(p: ReePoint, F: F3nCtx | None = None) -> ReePoint:
    if p is INF:
        if F is None:
            raise ValueError("omega(inf) needs the field context")
        return XiElt.identity(F)
    if p.is_identity():
        return INF
    return _wrap(p.ctx, omega_codes(p.ctx, *p.codes))


def eta(s: F3nElt, p: ReePoint) -> ReePoint:
    if not s:
        raise ValueError("eta_s needs s != 0")
    if p is INF:
        return INF
    p._check(XiElt(s, s, s))
    return _wrap(p.ctx, eta_codes(p.ctx, s.code, *p.codes))


def commutator(alpha: XiElt, xi: XiElt) -> XiElt:
    alpha._check(xi)
    return _wrap(alpha.ctx, commutator_codes(alpha.ctx, *alpha.codes, *xi.codes))


def commutator_word(alpha: XiElt, xi: XiElt) -> XiElt:
    """The defining word alpha^-1 xi^-1 alpha xi, via xi_mul and xi_inv."""
    return xi_inv(alpha) * xi_inv(xi) * alpha * xi


def point_id(p: ReePoint) -> int:
    return INF_ID if p is INF else p.id


def point_from_id(F: F3nCtx, pid: int) -> ReePoint:
    if pid == INF_ID:
        return INF
    if not 0 < pid <= F.q**3:
        raise ValueError(f"point id {pid} out of range")
    return _wrap(F, decode(F, pid))


def format_point(p: ReePoint) -> str:
    return str(p)


def parse_point(F: F3nCtx, text: str) -> ReePoint:
    text = text.strip()
    if text == "inf":
        return INF
    m = re.fullmatch(r"\(\s*([012]+)\s*,\s*([012]+)\s*,\s*([012]+)\s*\)", text)
    if not m:
        raise ValueError(f"cannot parse point {text!r}")
    return XiElt(*(F.parse(g) for g in m.groups()))


# --- involutions with fixed points ----------------------------------------------


@dataclass(frozen=True)
class InvolutionParam:
    """The involution eta_{-1} <a, -a^(t+1), c>; (0,0) is sigma = eta_{-1}."""

    a: F3nElt
    c: F3nElt

    @property
    def ctx(self) -> F3nCtx:
        return self.a.ctx

    def translation(self) -> XiElt:
        F = self.ctx
        return XiElt(self.a, F(int(F.neg(F.theta_plus(self.a.code, 1)))), self.c)

    def apply_ids(self, ids) -> np.ndarray:
        """p -> (p^eta_{-1}) * xi."""
        F = self.ctx
        return translate_ids(F, eta_ids(F, ids, int(F.neg(1))), self.translation().codes)


def fixed_point_codes(F: F3nCtx, a, c):
    """Finite fixed points of eta_{-1}<a,-a^(t+1),c>: <-a, y, a y - c - a^(t+2)>.

    Broadcasts (a, c) against y; returns the point ids, shape (..., q)."""
    a = np.asarray(a, dtype=np.int64)[..., None]
    c = np.asarray(c, dtype=np.int64)[..., None]
    y = F.codes()
    third = F.sub(F.sub(F.mul(a, y), c), F.theta_plus(a, 2))
    return encode(F, F.neg(a) + 0 * y, y + 0 * a, third)


def involution_fixed_points(iv: InvolutionParam) -> list[ReePoint]:
    F = iv.ctx
    ids = fixed_point_codes(F, iv.a.code, iv.c.code)
    return [INF] + [point_from_id(F, int(p)) for p in ids]


def involution_fixed_ids(iv: InvolutionParam) -> np.ndarray:
    F = iv.ctx
    return np.concatenate([[INF_ID], fixed_point_codes(F, iv.a.code, iv.c.code)])


def sigma(F: F3nCtx) -> InvolutionParam:
    return InvolutionParam(F.zero, F.zero)


def tau(F: F3nCtx) -> InvolutionParam:
    """eta_{-1} zeta with zeta = <0,0,1>."""
    return InvolutionParam(F.zero, F.one)


# --- structural checks on Xi (exhaustive, q in {3, 27}) --------------------------


def _elt_codes(F: F3nCtx, idx):
    """Xi element index (0-based, = point id - 1) to code triple."""
    return decode(F, np.asarray(idx, dtype=np.int64) + 1)


def _elt_index(F: F3nCtx, a, b, c):
    return encode(F, a, b, c) - 1


def closure(F: F3nCtx, gens: list[int], start: list[int] | None = None) -> np.ndarray:
    """Subgroup generated by ``gens`` (element indices), as a sorted index array.

    Right multiplication by generators from the identity; the group is finite so
    this reaches every product."""
    size = F.q**3
    seen = np.zeros(size, dtype=bool)
    frontier = np.array(sorted(set(start or [0])), dtype=np.int64)
    seen[frontier] = True
    gens_c = [tuple(int(v) for v in _elt_codes(F, g)) for g in gens]
    while frontier.size:
        a, b, c = _elt_codes(F, frontier)
        new = []
        for x, y, z in gens_c:
            nxt = _elt_index(F, *mul_codes(F, a, b, c, x, y, z))
            nxt = nxt[~seen[nxt]]
            nxt = np.unique(nxt)
            seen[nxt] = True
            new.append(nxt)
        frontier = np.concatenate(new) if new else np.empty(0, dtype=np.int64)
    return np.flatnonzero(seen)


def normal_closure(F: F3nCtx, gens: list[int], ambient_gens: list[int]) -> np.ndarray:
    """Smallest subgroup holding ``gens`` and normalized by ``ambient_gens``.

    It is enough to conjugate the generators of the current subgroup."""
    cur = list(dict.fromkeys(gens))
    sub = closure(F, cur)
    i = 0
    while i < len(cur):
        h = _elt_codes(F, cur[i])
        for g in ambient_gens:
            x, y, z = (int(v) for v in _elt_codes(F, g))
            conj = int(_elt_index(F, *mul_codes(F, *mul_codes(F, *inv_codes(F, x, y, z), *h), x, y, z)))
            if not np.isin(conj, sub):
                cur.append(conj)
                sub = closure(F, cur)
        i += 1
    return sub


def xi_generators(F: F3nCtx) -> list[int]:
    """<e,0,0>, <0,e,0>, <0,0,e> for the basis codes e = 3^i."""
    gens = []
    for i in range(F.n):
        e = 3**i
        for abc in ((e, 0, 0), (0, e, 0), (0, 0, e)):
            gens.append(int(_elt_index(F, *abc)))
    return gens


def commutator_subgroup_gens(F: F3nCtx, left: list[int], right: list[int]) -> list[int]:
    out = set()
    for g, h in itertools.product(left, right):
        r = commutator_codes(F, *_elt_codes(F, g), *_elt_codes(F, h))
        idx = int(_elt_index(F, *r))
        if idx:
            out.add(idx)
    return sorted(out)


def centre(F: F3nCtx, gens: list[int]) -> np.ndarray:
    """Elements commuting with every generator."""
    idx = np.arange(F.q**3, dtype=np.int64)
    a, b, c = _elt_codes(F, idx)
    keep = np.ones(idx.size, dtype=bool)
    for g in gens:
        x, y, z = (int(v) for v in _elt_codes(F, g))
        left = _elt_index(F, *mul_codes(F, a, b, c, x, y, z))
        right = _elt_index(F, *mul_codes(F, x, y, z, a, b, c))
        keep &= left == right
    return idx[keep]


def lower_central_series(F: F3nCtx, gens: list[int]) -> list[np.ndarray]:
    """gamma_1 = Xi, gamma_(i+1) = [gamma_i, Xi], down to the trivial group."""
    series = [closure(F, gens)]
    cur_gens = gens
    while series[-1].size > 1:
        cg = commutator_subgroup_gens(F, cur_gens, gens)
        nxt = normal_closure(F, cg, gens) if cg else np.array([0], dtype=np.int64)
        if nxt.size == series[-1].size:
            break  # not nilpotent; cannot happen for a p-group
        series.append(nxt)
        cur_gens = [int(v) for v in nxt if v] if nxt.size <= 64 else _small_gens(F, nxt)
    return series


def _small_gens(F: F3nCtx, sub: np.ndarray) -> list[int]:
    """A generating set for ``sub`` picked greedily."""
    gens: list[int] = []
    have = np.array([0], dtype=np.int64)
    for v in sub:
        v = int(v)
        if not np.isin(v, have):
            gens.append(v)
            have = closure(F, gens)
            if have.size == sub.size:
                break
    return gens


def element_orders(F: F3nCtx) -> np.ndarray:
    """Order of every element of Xi, by repeated multiplication."""
    idx = np.arange(F.q**3, dtype=np.int64)
    a0, b0, c0 = _elt_codes(F, idx)
    a, b, c = a0, b0, c0
    order = np.zeros(idx.size, dtype=np.int64)
    order[0] = 1
    for k in range(1, 28):
        done = (a == 0) & (b == 0) & (c == 0) & (order == 0)
        order[done] = k
        if (order > 0).all():
            break
        a, b, c = mul_codes(F, a, b, c, a0, b0, c0)
    return order


@dataclass
class StructureReport:
    q: int
    items: list[tuple[str, bool, str]] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.items.append((name, bool(ok), detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.items)


def structural_checks(F: F3nCtx) -> StructureReport:
    if F.q not in (3, 27):
        raise ValueError(f"structural checks are exhaustive and need q in {{3, 27}}, got {F.q}")
    q = F.q
    rep = StructureReport(q)
    gens = xi_generators(F)
    whole = closure(F, gens)
    rep.check("generators span Xi", whole.size == q**3, f"|<gens>| = {whole.size}")

    idx = np.arange(q**3, dtype=np.int64)
    a, b, c = _elt_codes(F, idx)
    z_set = idx[(a == 0) & (b == 0)]
    rep.check("centre is Z = {<0,0,c>}", np.array_equal(centre(F, gens), z_set))

    orders = element_orders(F)
    rep.check("exponent 9", int(orders.max()) == 9, f"orders seen: {sorted(set(orders.tolist()))}")

    series = lower_central_series(F, gens)
    derived = series[1] if len(series) > 1 else np.array([0])
    if q == 3:
        rep.check("derived subgroup is Z", np.array_equal(derived, z_set), f"|Xi'| = {derived.size}")
    else:
        want = idx[a == 0]
        rep.check("derived subgroup is {<0,b,c>}", np.array_equal(derived, want), f"|Xi'| = {derived.size}")
    cls = len(series) - 1
    rep.check(f"nilpotency class {2 if q == 3 else 3}", cls == (2 if q == 3 else 3),
              "orders of gamma_i: " + ", ".join(str(s.size) for s in series))

    # Lambda = C_Xi(eta_{-1}): eta_{-1} <a,b,c> = <-a,b,-c>
    m1 = int(F.neg(1))
    ea, eb, ec = eta_codes(F, m1, a, b, c)
    fixed = idx[(ea == a) & (eb == b) & (ec == c)]
    lam = idx[(a == 0) & (c == 0)]
    rep.check("Lambda = C_Xi(eta_-1)", np.array_equal(fixed, lam))

    # xi^-1 sigma xi = sigma chi with chi = eta_{-1}(xi^-1) * xi
    ia, ib, ic = inv_codes(F, a, b, c)
    chi = _elt_index(F, *mul_codes(F, *eta_codes(F, m1, ia, ib, ic), a, b, c))
    orbit = np.unique(chi)
    ta = F.codes()
    j_set = np.sort(_elt_index(F, ta[:, None] + 0 * ta[None, :],
                               F.neg(F.theta_plus(ta, 1))[:, None] + 0 * ta[None, :],
                               ta[None, :] + 0 * ta[:, None]).ravel())
    rep.check("Xi-conjugacy orbit of sigma has size q^2", orbit.size == q * q and np.array_equal(orbit, j_set),
              f"orbit size {orbit.size}")
    return rep


# --- Ree(3) as a permutation group -----------------------------------------------


def ree_generators_perm(F: F3nCtx) -> list[tuple[int, ...]]:
    """omega and the translations by the Xi generators, as permutations of P."""
    ids = all_ids(F)
    perms = [tuple(int(v) for v in omega_ids(F, ids))]
    for g in xi_generators(F):
        perms.append(tuple(int(v) for v in translate_ids(F, ids, tuple(int(v) for v in _elt_codes(F, g)))))
    return perms


def perm_group_closure(gens: list[tuple[int, ...]], limit: int = 10**6) -> set[tuple[int, ...]]:
    """All products of ``gens``, breadth first."""
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            r = tuple(g[i] for i in p)
            if r not in seen:
                seen.add(r)
                if len(seen) > limit:
                    raise RuntimeError("group larger than the closure limit")
                queue.append(r)
    return seen


def is_doubly_transitive(group, npoints: int) -> bool:
    pairs = {(g[0], g[1]) for g in group}
    return len(pairs) == npoints * (npoints - 1)


def ree3_permutation_group(F: F3nCtx) -> set[tuple[int, ...]]:
    if F.q != 3:
        raise ValueError("the permutation closure is only practical for q = 3")
    return perm_group_closure(ree_generators_perm(F))

"""SL(2,8), the semilinear extension by delta, and its Sylow 3-subgroups.

delta is the semilinear map (x0, x1) -> (x0^4, x1^4); conjugating a matrix by
delta raises every entry to the 4th power.  Conjugation by a matrix g is
written ``M^g = g^-1 M g`` throughout, and an exponent word such as ``S delta``
means "first S, then delta".
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass

from .finite_fields import F8_ONE, F8_ZERO, F8Elt, f8_elements

ORDER9_TRACES = frozenset(F8Elt.from_power(k) for k in (1, 2, 4))
ORDER7_TRACES = frozenset(F8Elt.from_power(k) for k in (3, 5, 6))


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix over GF(8), entries row-major."""

    a: F8Elt
    b: F8Elt
    c: F8Elt
    d: F8Elt

    @classmethod
    def from_powers(cls, *powers: int | None) -> "Mat2":
        """Build from exponents of u; ``None`` marks a zero entry."""
        return cls(*(F8Elt.from_power(k) for k in powers))

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.a.bits, self.b.bits, self.c.bits, self.d.bits)

    def __lt__(self, other: "Mat2") -> bool:
        return self.key < other.key

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> F8Elt:
        return self.a * self.d + self.b * self.c

    def trace(self) -> F8Elt:
        return self.a + self.d

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det:
            raise ZeroDivisionError(f"singular matrix {self}")
        k = det.inv()
        # char 2: the adjugate needs no signs
        return Mat2(self.d * k, self.b * k, self.c * k, self.a * k)

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def __pow__(self, e: int) -> "Mat2":
        if e < 0:
            return self.inverse() ** (-e)
        result, base = IDENTITY, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conj(self, g: "Mat2") -> "Mat2":
        """M^g = g^-1 M g."""
        return g.inverse() * self * g

    def delta(self, times: int = 1) -> "Mat2":
        return delta_conjugate(self, times)

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"

    @classmethod
    def parse(cls, text: str) -> "Mat2":
        m = re.fullmatch(r"\s*\[\s*\[([^,\]]+),([^\]]+)\]\s*,\s*\[([^,\]]+),([^\]]+)\]\s*\]\s*", text)
        if not m:
            raise ValueError(f"cannot parse matrix {text!r}")
        return cls(*(F8Elt.parse(g) for g in m.groups()))


IDENTITY = Mat2(F8_ONE, F8_ZERO, F8_ZERO, F8_ONE)
S = Mat2(F8_ZERO, F8_ONE, F8_ONE, F8_ZERO)
T = Mat2(F8_ONE, F8_ZERO, F8_ONE, F8_ONE)
A = Mat2.from_powers(2, 1, 1, 4)
D = Mat2(F8_ZERO, F8_ONE, F8_ONE, F8_ONE)


def mat_mul(m: Mat2, n: Mat2) -> Mat2:
    return m * n


def mat_inverse(m: Mat2) -> Mat2:
    return m.inverse()


def trace(m: Mat2) -> F8Elt:
    return m.trace()


def det(m: Mat2) -> F8Elt:
    return m.det()


def delta_conjugate(m: Mat2, times: int = 1) -> Mat2:
    """Entrywise 4th power, applied ``times`` times (mod 3)."""
    e = 4 ** (times % 3)
    return Mat2(m.a**e, m.b**e, m.c**e, m.d**e)


def order_of(m: Mat2) -> int:
    """Multiplicative order by repeated multiplication."""
    if m.det() != F8_ONE:
        raise ValueError(f"{m} is not in SL(2,8)")
    k, p = 1, m
    while p != IDENTITY:
        p = p * m
        k += 1
    return k


def order_by_trace(m: Mat2) -> int:
    """Order of a nontrivial element of SL(2,8), read off its trace."""
    if m == IDENTITY:
        raise ValueError("order_by_trace is undefined on the identity")
    if m.det() != F8_ONE:
        raise ValueError(f"{m} is not in SL(2,8)")
    tr = m.trace()
    if not tr:
        return 2
    if tr == F8_ONE:
        return 3
    if tr in ORDER7_TRACES:
        return 7
    return 9


@functools.lru_cache(maxsize=None)
def enumerate_sl28() -> tuple[Mat2, ...]:
    """All 504 matrices of determinant 1, row-major over entry tuples."""
    elts = f8_elements()
    out = []
    for a, b, c, d in itertools.product(elts, repeat=4):
        m = Mat2(a, b, c, d)
        if m.det() == F8_ONE:
            out.append(m)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def involutions() -> tuple[Mat2, ...]:
    """The 63 involutions, in enumeration order."""
    return tuple(m for m in enumerate_sl28() if m != IDENTITY and not m.trace())


@dataclass(frozen=True, eq=False)
class SylowPoint:
    """A cyclic Sylow 3-subgroup of SL(2,8), standing for its normalizer.

    Two points are equal iff their subgroups are.
    """

    id: int
    generator: Mat2
    subgroup: tuple[Mat2, ...]  # sorted

    def __eq__(self, other) -> bool:
        return isinstance(other, SylowPoint) and other.subgroup == self.subgroup

    def __hash__(self) -> int:
        return hash(self.subgroup)

    def __contains__(self, m: Mat2) -> bool:
        return m in self._members

    @functools.cached_property
    def _members(self) -> frozenset[Mat2]:
        return frozenset(self.subgroup)


def cyclic_subgroup(g: Mat2) -> tuple[Mat2, ...]:
    out, p = [IDENTITY], g
    while p != IDENTITY:
        out.append(p)
        p = p * g
    return tuple(sorted(out))


@functools.lru_cache(maxsize=None)
def sylow3_points() -> tuple[SylowPoint, ...]:
    """The 28 cyclic subgroups of order 9, numbered by their first generator."""
    seen: dict[tuple[Mat2, ...], Mat2] = {}
    for m in enumerate_sl28():
        if m != IDENTITY and order_by_trace(m) == 9:
            sub = cyclic_subgroup(m)
            seen.setdefault(sub, m)
    return tuple(SylowPoint(i, gen, sub) for i, (sub, gen) in enumerate(seen.items()))


def point_of(x: Mat2) -> SylowPoint:
    """The point N(<X>) for X of order 3 or 9: the Sylow subgroup holding X."""
    if x == IDENTITY:
        raise ValueError("the identity lies in every Sylow subgroup")
    for p in sylow3_points():
        if x in p:
            return p
    raise ValueError(f"{x} has order prime to 3")


def normalizes(i: Mat2, p: SylowPoint) -> bool:
    return p.generator.conj(i) in p


@dataclass(frozen=True)
class SemiLinearElt:
    """delta^m M, an element of Sigma L(2,8); products follow
    (delta^m M)(delta^k N) = delta^(m+k) M^(delta^k) N."""

    m: int
    mat: Mat2

    def __post_init__(self):
        object.__setattr__(self, "m", self.m % 3)

    def __mul__(self, other: "SemiLinearElt") -> "SemiLinearElt":
        return SemiLinearElt(self.m + other.m, delta_conjugate(self.mat, other.m) * other.mat)

    def inverse(self) -> "SemiLinearElt":
        # (delta^m M)^-1 = M^-1 delta^-m = delta^-m (M^-1)^(delta^-m)
        return SemiLinearElt(-self.m, delta_conjugate(self.mat.inverse(), -self.m))

    def conj_matrix(self, x: Mat2) -> Mat2:
        """x^g for g = delta^m M."""
        return delta_conjugate(x, self.m).conj(self.mat)

    def order(self) -> int:
        k, p = 1, self
        while p != SEMI_IDENTITY:
            p = p * self
            k += 1
        return k


SEMI_IDENTITY = SemiLinearElt(0, IDENTITY)
DELTA = SemiLinearElt(1, IDENTITY)

"""Exact arithmetic in GF(8) and GF(3^n), n odd.

GF(8) is F_2[u]/(u^3 + u + 1).  An element is stored as a 3-bit integer whose
bit i is the coefficient of u^i, so ``u`` is 0b010 and ``u^3 = u + 1`` is
0b011.  All products come from one precomputed 8x8 table.

GF(3^n) is F_3[X]/(f) for a fixed monic irreducible f of degree n.  An element
is stored as the integer sum(c_i * 3**i) of its little-endian coefficient
vector (c_0, ..., c_{n-1}); that integer is also the element's "rank" used for
point ids elsewhere.  :class:`F3nCtx` carries log/antilog tables of size q plus
small chunked addition tables, and every arithmetic method accepts python ints
or numpy integer arrays so the searches over GF(3^9) stay vectorized.
"""

from __future__ import annotations

import functools
import itertools
import re
from typing import Iterator, Sequence

import numpy as np

MAX_DEGREE = 9

# ---------------------------------------------------------------------------
# GF(8)
# ---------------------------------------------------------------------------


def _f8_clmul(x: int, y: int) -> int:
    r = 0
    for i in range(3):
        if (y >> i) & 1:
            r ^= x << i
    for deg in (4, 3):
        if (r >> deg) & 1:
            r ^= 0b1011 << (deg - 3)
    return r


F8_MUL = tuple(tuple(_f8_clmul(x, y) for y in range(8)) for x in range(8))
F8_EXP = tuple(functools.reduce(lambda acc, _: _f8_clmul(acc, 0b010), range(k), 1) for k in range(7))
F8_LOG = {v: k for k, v in enumerate(F8_EXP)}


class F8Elt:
    """An element of GF(8), value-semantic."""

    __slots__ = ("bits",)

    def __init__(self, bits: int):
        if not 0 <= bits < 8:
            raise ValueError(f"GF(8) element needs 3 bits, got {bits!r}")
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("F8Elt is immutable")

    @classmethod
    def from_power(cls, k: int | None) -> "F8Elt":
        """Return u**k (k taken mod 7); ``None`` stands for the zero element."""
        if k is None:
            return F8_ZERO
        return cls(F8_EXP[k % 7])

    def __add__(self, other: "F8Elt") -> "F8Elt":
        return F8Elt(self.bits ^ other.bits)

    __sub__ = __add__

    def __neg__(self) -> "F8Elt":
        return self

    def __mul__(self, other: "F8Elt") -> "F8Elt":
        return F8Elt(F8_MUL[self.bits][other.bits])

    def inv(self) -> "F8Elt":
        if self.bits == 0:
            raise ZeroDivisionError("0 has no inverse in GF(8)")
        return F8Elt(F8_EXP[(-F8_LOG[self.bits]) % 7])

    def __truediv__(self, other: "F8Elt") -> "F8Elt":
        return self * other.inv()

    def __pow__(self, e: int) -> "F8Elt":
        if self.bits == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of 0")
            return F8_ONE if e == 0 else F8_ZERO
        return F8Elt(F8_EXP[(F8_LOG[self.bits] * e) % 7])

    def log(self) -> int:
        if self.bits == 0:
            raise ValueError("log of 0")
        return F8_LOG[self.bits]

    def __eq__(self, other) -> bool:
        return isinstance(other, F8Elt) and other.bits == self.bits

    def __hash__(self) -> int:
        return hash(("F8", self.bits))

    def __lt__(self, other: "F8Elt") -> bool:
        return self.bits < other.bits

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        return "0" if self.bits == 0 else f"u^{F8_LOG[self.bits]}"

    def __repr__(self) -> str:
        return f"F8Elt({self})"

    @classmethod
    def parse(cls, text: str) -> "F8Elt":
        text = text.strip()
        if text == "0":
            return F8_ZERO
        if text == "1":
            return F8_ONE
        if text == "u":
            return cls.from_power(1)
        m = re.fullmatch(r"u\^(-?\d+)", text)
        if not m:
            raise ValueError(f"cannot parse GF(8) element {text!r}")
        return cls.from_power(int(m.group(1)))


F8_ZERO = F8Elt(0)
F8_ONE = F8Elt(1)


def f8_elements() -> list[F8Elt]:
    return [F8Elt(b) for b in range(8)]


# ---------------------------------------------------------------------------
# Polynomials over GF(3), little-endian coefficient lists.  Used to select the
# moduli and to build the antilog table; slow but table-free.
# ---------------------------------------------------------------------------


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mod(p: Sequence[int], f: Sequence[int]) -> list[int]:
    r = _trim([c % 3 for c in p])
    lead_inv = f[-1] % 3  # 1 and 2 are self-inverse mod 3
    while len(r) >= len(f):
        coef = (r[-1] * lead_inv) % 3
        shift = len(r) - len(f)
        for i, fc in enumerate(f):
            r[shift + i] = (r[shift + i] - coef * fc) % 3
        _trim(r)
    return r


def poly_mul(p: Sequence[int], g: Sequence[int]) -> list[int]:
    if not p or not g:
        return []
    out = [0] * (len(p) + len(g) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % 3
    return _trim(out)


def poly_mulmod(p: Sequence[int], g: Sequence[int], f: Sequence[int]) -> list[int]:
    return poly_mod(poly_mul(p, g), f)


def poly_sub(p: Sequence[int], g: Sequence[int]) -> list[int]:
    out = [0] * max(len(p), len(g))
    for i, a in enumerate(p):
        out[i] = a
    for i, b in enumerate(g):
        out[i] = (out[i] - b) % 3
    return _trim(out)


def poly_gcd(p: Sequence[int], g: Sequence[int]) -> list[int]:
    a, b = _trim(list(p)), _trim(list(g))
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _frobenius_power_of_x(k: int, f: Sequence[int]) -> list[int]:
    """X^(3^k) mod f by repeated cubing."""
    r = poly_mod([0, 1], f)
    for _ in range(k):
        r = poly_mulmod(poly_mulmod(r, r, f), r, f)
    return r


def _prime_factors(m: int) -> list[int]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def is_irreducible(f: Sequence[int]) -> bool:
    """Rabin's test for a monic polynomial over GF(3)."""
    f = _trim(list(f))
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if poly_sub(_frobenius_power_of_x(n, f), x):
        return False
    for p in _prime_factors(n):
        g = poly_gcd(f, poly_sub(_frobenius_power_of_x(n // p, f), x))
        if len(g) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def select_modulus(n: int) -> tuple[int, ...]:
    """The fixed modulus for GF(3^n): fewest nonzero terms, then smallest.

    "Smallest" compares the coefficient vectors from degree n-1 downward.
    """
    candidates = []
    for tail in itertools.product(range(3), repeat=n):
        poly = list(tail) + [1]
        if poly[0] == 0 and n > 1:
            continue
        terms = sum(1 for c in poly if c)
        candidates.append((terms, tuple(reversed(tail)), tuple(poly)))
    candidates.sort()
    for _, _, poly in candidates:
        if is_irreducible(poly):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {n}")  # unreachable


def format_poly(f: Sequence[int], var: str = "x") -> str:
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i] % 3
        if not c:
            continue
        coef = "" if (c == 1 and i > 0) else str(c)
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{coef}{var}")
        else:
            terms.append(f"{coef}{var}^{i}")
    return "+".join(terms) or "0"


# ---------------------------------------------------------------------------
# GF(3^n)
# ---------------------------------------------------------------------------


def _digits(code: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        code, d = divmod(code, 3)
        out.append(d)
    return out


def _undigits(digits: Sequence[int]) -> int:
    return sum(int(d) * 3**i for i, d in enumerate(digits))


class F3nCtx:
    """The field GF(3^n) for odd n <= 9 under a fixed irreducible modulus.

    Immutable after construction.  Arithmetic methods are vectorized: pass ints
    or integer numpy arrays of element codes.
    """

    def __init__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
            raise ValueError(f"GF(3^n) needs odd positive n, got {n!r}")
        if n > MAX_DEGREE:
            raise ValueError(f"n={n} exceeds the supported bound {MAX_DEGREE}")
        self.n = int(n)
        self.q = 3**self.n
        self.theta_exponent = (self.n + 1) // 2
        self.modulus = select_modulus(self.n)
        self.modulus_str = format_poly(self.modulus)
        self._build_tables()

    # construction -----------------------------------------------------------

    def _build_tables(self) -> None:
        q, n, f = self.q, self.n, self.modulus
        order = q - 1
        gen = self._find_generator()
        exp = np.zeros(order, dtype=np.int64)
        cur = [1]
        g = _digits(gen, n)
        for i in range(order):
            exp[i] = _undigits(cur)
            cur = poly_mulmod(cur, g, f)
        if cur != [1]:
            raise AssertionError("generator order mismatch")
        log = np.empty(q, dtype=np.int64)
        log[exp] = np.arange(order)
        # Sentinel: log[0] is large enough that any sum involving it lands in
        # the zero-padded tail of the doubled antilog table.
        zero_log = 2 * order
        log[0] = zero_log
        self.generator = gen
        self._log = log
        self._exp = np.concatenate([exp, exp, np.zeros(2 * order + 1, dtype=np.int64)])
        self._exp_base = exp

        codes = np.arange(q, dtype=np.int64)
        self._neg = self._digitwise(codes, lambda d: (-d) % 3)
        self._inv = np.zeros(q, dtype=np.int64)
        self._inv[1:] = exp[(-log[1:]) % order]
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[1:] * 3) % order]
        self._frob = frob
        theta = np.zeros(q, dtype=np.int64)
        theta[1:] = exp[(log[1:] * 3**self.theta_exponent) % order]
        self._theta = theta

        # Chunked addition tables, at most 3^5 x 3^5 each.
        nchunks = -(-n // 5)
        width = -(-n // nchunks)
        self._add_chunks = []
        lo = 0
        while lo < n:
            w = min(width, n - lo)
            size = 3**w
            da = np.array([_digits(v, w) for v in range(size)], dtype=np.int64).reshape(size, w)
            s = (da[:, None, :] + da[None, :, :]) % 3
            tab = (s * (3 ** np.arange(w))).sum(axis=2).astype(np.int64)
            self._add_chunks.append((3**lo, size, tab))
            lo += w

    def _find_generator(self) -> int:
        q, n, f = self.q, self.n, self.modulus
        order = q - 1
        primes = _prime_factors(order)
        for cand in range(2, q):
            g = _digits(cand, n)
            if all(self._poly_pow(g, order // p) != [1] for p in primes):
                return cand
        raise AssertionError("no primitive element")  # unreachable

    def _poly_pow(self, g: list[int], e: int) -> list[int]:
        result, base = [1], list(g)
        while e:
            if e & 1:
                result = poly_mulmod(result, base, self.modulus)
            base = poly_mulmod(base, base, self.modulus)
            e >>= 1
        return result

    def _digitwise(self, codes: np.ndarray, fn) -> np.ndarray:
        out = np.zeros_like(codes)
        rest = codes.copy()
        for i in range(self.n):
            rest, d = np.divmod(rest, 3)
            out += fn(d) * 3**i
        return out

    # arithmetic ---------------------------------------------------------------

    def add(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if len(self._add_chunks) == 1:
            return self._add_chunks[0][2][x, y]
        out = None
        for base, size, tab in self._add_chunks:
            part = tab[(x // base) % size, (y // base) % size] * base
            out = part if out is None else out + part
        return out

    def neg(self, x):
        return self._neg[np.asarray(x, dtype=np.int64)]

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return self._exp[self._log[x] + self._log[y]]

    def inv(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[x]

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, e: int):
        x = np.asarray(x, dtype=np.int64)
        order = self.q - 1
        if e == 0:
            return np.ones_like(x)
        if e < 0 and np.any(x == 0):
            raise ZeroDivisionError("negative power of 0")
        res = self._exp_base[(self._log[x] * e) % order]
        return np.where(x == 0, 0, res)

    def frobenius(self, x):
        return self._frob[np.asarray(x, dtype=np.int64)]

    def theta(self, x):
        return self._theta[np.asarray(x, dtype=np.int64)]

    def theta_plus(self, x, k: int):
        """x^(theta + k) = theta(x) * x^k, for k >= 0."""
        return self.mul(self.theta(x), self.pow(x, k))

    # elements -----------------------------------------------------------------

    def __call__(self, value) -> "F3nElt":
        """Element from its integer code or its coefficient string."""
        if isinstance(value, str):
            return self.parse(value)
        return F3nElt(self, int(value))

    def from_int(self, k: int) -> "F3nElt":
        """Embed the integer k via the prime field (k mod 3)."""
        return F3nElt(self, k % 3)

    @property
    def zero(self) -> "F3nElt":
        return F3nElt(self, 0)

    @property
    def one(self) -> "F3nElt":
        return F3nElt(self, 1)

    def elements(self) -> Iterator["F3nElt"]:
        return (F3nElt(self, c) for c in range(self.q))

    def codes(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def format(self, code: int) -> str:
        return "".join(str(d) for d in _digits(int(code), self.n))

    def parse(self, text: str) -> "F3nElt":
        text = text.strip()
        if len(text) != self.n or any(ch not in "012" for ch in text):
            raise ValueError(f"expected {self.n} digits over {{0,1,2}}, got {text!r}")
        return F3nElt(self, _undigits([int(ch) for ch in text]))

    @property
    def header(self) -> str:
        return f"GF(3^{self.n}) mod {self.modulus_str}"

    def __repr__(self) -> str:
        return f"F3nCtx({self.header})"


@functools.lru_cache(maxsize=None)
def make_field(n: int) -> F3nCtx:
    """Return the (cached) context for GF(3^n)."""
    return F3nCtx(n)


def field_for_order(q: int) -> F3nCtx:
    n, r = 0, q
    while r > 1 and r % 3 == 0:
        r //= 3
        n += 1
    if r != 1 or n == 0:
        raise ValueError(f"q={q} is not a power of 3")
    return make_field(n)


class F3nElt:
    """An element of GF(3^n) bound to its context."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: F3nCtx, code: int):
        if not 0 <= code < ctx.q:
            raise ValueError(f"code {code} out of range for {ctx.header}")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "code", int(code))

    def __setattr__(self, name, value):
        raise AttributeError("F3nElt is immutable")

    def _other(self, other) -> int:
        if isinstance(other, F3nElt):
            if other.ctx is not self.ctx:
                raise ValueError("field context mismatch")
            return other.code
        if isinstance(other, (int, np.integer)):
            return int(other) % 3
        return NotImplemented

    def _wrap(self, code) -> "F3nElt":
        return F3nElt(self.ctx, int(code))

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(o, self.code))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.code))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.mul(self.code, o))

    __rmul__ = __mul__

    def inv(self) -> "F3nElt":
        return self._wrap(self.ctx.inv(self.code))

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.div(self.code, o))

    def __pow__(self, e: int):
        return self._wrap(self.ctx.pow(self.code, e))

    def theta(self) -> "F3nElt":
        return self._wrap(self.ctx.theta(self.code))

    def frobenius(self) -> "F3nElt":
        return self._wrap(self.ctx.frobenius(self.code))

    def __eq__(self, other) -> bool:
        if isinstance(other, F3nElt):
            return other.ctx is self.ctx and other.code == self.code
        if isinstance(other, (int, np.integer)):
            return self.code == int(other) % 3
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.n, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __int__(self) -> int:
        return self.code

    def __str__(self) -> str:
        return self.ctx.format(self.code)

    def __repr__(self) -> str:
        return f"F3nElt({self}; GF(3^{self.ctx.n}))"


def theta(x: F3nElt) -> F3nElt:
    return x.theta()


def frobenius(x: F3nElt) -> F3nElt:
    return x.frobenius()

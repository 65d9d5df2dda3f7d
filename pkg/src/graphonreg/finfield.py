"""Finite fields ``F_{p^k}`` and the Frobenius-twisted cyclic groups ``mu_{2q+1}``.

Field elements are encoded as integers ``0 <= x < q``: the element
``c_0 + c_1 t + ... + c_{k-1} t^{k-1}`` (with ``t`` a root of the modulus)
has code ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``.  Every operation accepts
ints or integer numpy arrays.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

MAX_FIELD_ORDER = 10 ** 6
MAX_DEGREE = 12


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` in increasing order."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q = p^k``; ``ValueError`` if ``q`` is not a prime power."""
    if not isinstance(q, (int, np.integer)) or q < 2:
        raise ValueError(f"{q!r} is not a prime power")
    q = int(q)
    ps = prime_factors(q)
    if len(ps) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = ps[0]
    k = round(math.log(q, p))
    while p ** k < q:
        k += 1
    while p ** k > q:
        k -= 1
    return p, k


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except ValueError:
        return False
    return True


def prime_powers(lo: int, hi: int) -> list[int]:
    return [q for q in range(max(lo, 2), hi + 1) if is_prime_power(q)]


def primes(lo: int, hi: int) -> list[int]:
    if hi < 2:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for d in range(2, int(hi ** 0.5) + 1):
        if sieve[d]:
            sieve[d * d::d] = False
    return [int(x) for x in np.flatnonzero(sieve) if x >= lo]


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    m, x = 1, a % n
    while x != 1 % n:
        x = x * a % n
        m += 1
    return m


# -- polynomials over F_p as coefficient lists, lowest degree first ------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _poly_powmod(a: list[int], e: int, m: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(a, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(modulus: list[int], p: int) -> bool:
    """Ben-Or test: ``f`` of degree ``k`` has no factor of degree ``j <= k/2``,
    i.e. ``gcd(f, x^(p^j) - x) = 1`` for every such ``j``."""
    f = _trim(list(modulus))
    k = len(f) - 1
    if k < 1:
        return False
    xp = [0, 1]
    for _ in range(1, k // 2 + 1):
        xp = _poly_powmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        if len(_poly_gcd(f, diff, p)) > 1:
            return False
    return True


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Least monic irreducible of degree ``k`` over ``F_p``.

    Candidates ``x^k + c_{k-1} x^{k-1} + ... + c_0`` are ordered
    lexicographically by ``(c_{k-1}, ..., c_0)``.
    """
    for code in range(p ** k):
        low = [(code // p ** i) % p for i in range(k)]
        f = low + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise ArithmeticError(f"no irreducible polynomial of degree {k} over F_{p}")


@dataclass(frozen=True, eq=False)
class FiniteField:
    """The field ``F_q``, ``q = p^k``, as ``F_p[t] / (modulus)``."""

    p: int
    k: int
    modulus: tuple[int, ...]  # lowest degree first, monic
    _exp: np.ndarray = field(repr=False, default=None)
    _log: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        q = self.q
        if self.k == 1:
            g = next(x for x in range(1, self.p) if self.p == 2 or all(
                pow(x, (self.p - 1) // r, self.p) != 1 for r in prime_factors(self.p - 1)))
            exp = np.empty(q - 1, dtype=np.int64)
            x = 1
            for i in range(q - 1):
                exp[i] = x
                x = x * g % self.p
        else:
            g = self._primitive_element()
            gp = self.to_coeffs(g)
            m = list(self.modulus)
            exp = np.empty(q - 1, dtype=np.int64)
            cur = [1]
            for i in range(q - 1):
                exp[i] = self.from_coeffs(cur)
                cur = _poly_mulmod(cur, gp, m, self.p)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    def to_coeffs(self, x: int) -> list[int]:
        return [(int(x) // self.p ** i) % self.p for i in range(self.k)]

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return sum(int(c) % self.p * self.p ** i for i, c in enumerate(coeffs[:self.k]))

    def _primitive_element(self) -> int:
        m = list(self.modulus)
        order = self.q - 1
        factors = prime_factors(order)
        for g in range(2, self.q):
            gp = self.to_coeffs(g)
            if all(_poly_powmod(gp, order // r, m, self.p) != [1] for r in factors):
                return g
        raise ArithmeticError("no primitive element found; modulus is not irreducible")

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # element operations ----------------------------------------------------

    def _digits(self, x):
        x = np.asarray(x, dtype=np.int64)
        return [(x // self.p ** i) % self.p for i in range(self.k)]

    def _undigits(self, ds):
        return sum(d * self.p ** i for i, d in enumerate(ds))

    @staticmethod
    def _out(r):
        return int(r) if np.ndim(r) == 0 else r

    def add(self, x, y):
        if self.k == 1:
            return self._out((np.asarray(x) + np.asarray(y)) % self.p)
        return self._out(self._undigits([(a + b) % self.p
                                         for a, b in zip(self._digits(x), self._digits(y))]))

    def neg(self, x):
        return self._out(self._undigits([(-a) % self.p for a in self._digits(x)]))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        r = self._exp[(self._log[x] + self._log[y]) % (self.q - 1)]
        return self._out(np.where((x == 0) | (y == 0), 0, r))

    def inv(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._out(self._exp[(-self._log[x]) % (self.q - 1)])

    def pow(self, x, e: int):
        x = np.asarray(x, dtype=np.int64)
        if e < 0:
            x = np.asarray(self.inv(x))
            e = -e
        if e == 0:
            return self._out(np.ones_like(x))
        r = self._exp[(self._log[x] * (e % (self.q - 1))) % (self.q - 1)]
        return self._out(np.where(x == 0, 0, r))

    def add_table(self) -> np.ndarray:
        e = self.elements()
        return np.asarray(self.add(e[:, None], e[None, :]))

    def mul_table(self) -> np.ndarray:
        e = self.elements()
        return np.asarray(self.mul(e[:, None], e[None, :]))

    def primitive_cube_root(self) -> int | None:
        """Least element (in code order) with ``z^3 = 1``, ``z != 1``."""
        e = self.elements()
        hits = np.flatnonzero((np.asarray(self.pow(e, 3)) == 1) & (e != 1))
        return int(hits[0]) if hits.size else None


def make_field(p: int, k: int = 1) -> FiniteField:
    """``F_{p^k}`` with the lexicographically least monic irreducible modulus.

    For ``k = 1`` the modulus is ``x`` and arithmetic is plain residue
    arithmetic mod ``p``.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= k <= MAX_DEGREE or p ** k > MAX_FIELD_ORDER:
        raise ValueError(f"field order {p}^{k} outside budget (k <= {MAX_DEGREE}, q <= 10^6)")
    return _make_field_cached(p, k)


@functools.lru_cache(maxsize=64)
def _make_field_cached(p: int, k: int) -> FiniteField:
    return FiniteField(p, k, least_irreducible(p, k))


def field_of_order(q: int) -> FiniteField:
    p, k = prime_power(q)
    return make_field(p, k)


def parse_field(spec: str) -> FiniteField:
    """Parse ``"p^k"`` or a bare prime power such as ``"16"``."""
    spec = spec.strip()
    try:
        if "^" in spec:
            p, k = (int(s) for s in spec.split("^"))
            return make_field(p, k)
        return field_of_order(int(spec))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad field spec {spec!r}: {exc}") from None


def power_set_image(f: FiniteField, e: int) -> frozenset[int]:
    return frozenset(np.unique(np.asarray(f.pow(f.elements(), e))).tolist())


def squares(f: FiniteField) -> frozenset[int]:
    """``{z^2 : z in F_q}``, including 0."""
    return power_set_image(f, 2)


def cubes(f: FiniteField) -> frozenset[int]:
    """``{z^3 : z in F_q}``, including 0."""
    return power_set_image(f, 3)


@dataclass(frozen=True)
class CyclicFrobenius:
    """``mu_{2q+1}`` in exponent form: ``Z/(2q+1)`` with Frobenius ``a -> q a``.

    The element with exponent ``a`` is ``g^a`` for a fixed generator ``g``;
    group multiplication is addition of exponents.
    """

    q: int

    @property
    def order(self) -> int:
        return 2 * self.q + 1

    @property
    def frobenius_multiplier(self) -> int:
        return self.q % self.order

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def mul(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.order

    def power(self, a, e: int):
        return (np.asarray(a) * e) % self.order

    def sigma(self, a):
        return (np.asarray(a) * self.q) % self.order

    def is_cube(self, a):
        return np.asarray(a) % math.gcd(3, self.order) == 0

    def cubes(self) -> frozenset[int]:
        return frozenset(np.unique(self.power(self.elements(), 3)).tolist())

    @property
    def has_primitive_cube_root(self) -> bool:
        return self.order % 3 == 0

    def primitive_cube_root(self) -> int | None:
        """Exponent of ``zeta``, the order-3 element ``g^(n/3)``, if it exists."""
        return self.order // 3 if self.has_primitive_cube_root else None

    def characteristic(self) -> int:
        return prime_power(self.q)[0]

    def smallest_field_order(self) -> int:
        """Order of the smallest finite field of characteristic p containing ``mu_{2q+1}``."""
        p = self.characteristic()
        return p ** multiplicative_order(p, self.order)


def mu_group(q: int) -> CyclicFrobenius:
    prime_power(q)
    if q > MAX_FIELD_ORDER:
        raise ValueError("q outside budget (<= 10^6)")
    return CyclicFrobenius(int(q))

"""Finite-q statistics for the expansion dichotomy of binary morphisms.

A morphism ``f(x, y)`` is evaluated as a lookup table on its domain.  The
quadruple map

    (x, x', y, y') -> (f(x, y), f(x, y'), f(x', y), f(x', y'))

has an image of size ``~ q^3`` when ``f`` comes from a group law (the image
lies on ``f1 * f4 = f2 * f3``) and of size ``~ q^4`` otherwise.  The image
fraction over ``q^4`` is the observable stand-in for dominance.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from .finfield import field_of_order, mu_group, prime_power
from .norms import BudgetError

QUADRUPLE_BUDGET = 10 ** 8
MAX_PROBE_Q = 2000

MORPHISMS = {
    "add": "x + y on F_q",
    "mul": "x y on F_q",
    "add_square_cube": "x^2 + y^3 on F_q",
    "mul_twist": "x sigma(y) on mu_{2q+1}",
}
GROUP_LAWS = ("add", "mul", "mul_twist")

# the five-factor codomain printed for the quadruple map is read as four factors
CODOMAIN_NOTE = "quadruple map has four components, codomain Z^4"


@dataclass(frozen=True, eq=False)
class MorphismSpec:
    """A catalog morphism evaluated at ``q``.

    ``table[x, y]`` is ``f(x, y)`` in the integer encoding of the codomain;
    ``law[a, b]`` is the group operation used for the syzygy (``None`` when
    ``f`` does not come from a group law).
    """

    tag: str
    q: int
    table: np.ndarray
    law: np.ndarray | None
    domain: str

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __call__(self, x, y):
        return self.table[np.asarray(x), np.asarray(y)]


def morphism(tag: str, q: int) -> MorphismSpec:
    if tag not in MORPHISMS:
        raise ValueError(f"unknown morphism {tag!r}; expected one of {sorted(MORPHISMS)}")
    prime_power(q)
    if tag == "mul_twist":
        g = mu_group(q)
        e = g.elements()
        table = np.asarray(g.mul(e[:, None], g.sigma(e)[None, :]), dtype=np.int64)
        law = np.asarray(g.mul(e[:, None], e[None, :]), dtype=np.int64)
        return MorphismSpec(tag, q, table, law, f"mu_{2 * q + 1} (exponents mod {2 * q + 1})")
    f = field_of_order(q)
    e = f.elements()
    add = f.add_table()
    if tag == "add":
        table, law = add, add
    elif tag == "mul":
        table = f.mul_table()
        law = table
    else:
        sq = np.asarray(f.pow(e, 2))
        cu = np.asarray(f.pow(e, 3))
        table, law = add[sq[:, None], cu[None, :]], None
    return MorphismSpec(tag, q, np.asarray(table, dtype=np.int64), law, f"F_{q}")


@dataclass(frozen=True)
class QuadrupleCensus:
    tag: str
    q: int
    domain_size: int
    image_size: int
    syzygy_holds: bool | None  # None when the morphism has no group law

    @property
    def ratio(self) -> float:
        return self.image_size / self.domain_size ** 4


def quadruple_census(f: MorphismSpec | str, q: int | None = None) -> QuadrupleCensus:
    """Exhaustive image of the quadruple map, one ``x`` slice at a time.

    Images are marked in a boolean table indexed by the packed quadruple.
    For group laws every enumerated tuple is also checked against
    ``f1 * f4 == f2 * f3``.
    """
    if isinstance(f, str):
        f = morphism(f, q)
    n = f.size
    if n ** 4 > QUADRUPLE_BUDGET:
        raise BudgetError(f"domain size {n}: n^4 = {n ** 4} exceeds {QUADRUPLE_BUDGET}")
    t = f.table
    seen = np.zeros(n ** 4, dtype=bool)
    syzygy = True if f.law is not None else None
    # rows: f(x', y) and f(x', y') for every (x', y, y')
    f3 = np.broadcast_to(t[:, :, None], (n, n, n))
    f4 = np.broadcast_to(t[:, None, :], (n, n, n))
    for x in range(n):
        f1 = np.broadcast_to(t[x][None, :, None], (n, n, n))
        f2 = np.broadcast_to(t[x][None, None, :], (n, n, n))
        seen[((f1 * n + f2) * n + f3) * n + f4] = True
        if syzygy and not np.array_equal(f.law[f1, f4], f.law[f2, f3]):
            syzygy = False
    return QuadrupleCensus(f.tag, f.q, n, int(seen.sum()), syzygy)


def quadruple_image_ratio(f: MorphismSpec | str, q: int | None = None) -> float:
    """Image size of the quadruple map divided by ``n^4`` (``n`` = domain size)."""
    return quadruple_census(f, q).ratio


def image_fraction(f: MorphismSpec, a, b) -> float:
    """``|f(A, B)| / n``."""
    a = np.asarray(sorted(set(int(v) for v in a)), dtype=np.int64)
    b = np.asarray(sorted(set(int(v) for v in b)), dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return 0.0
    return np.unique(f.table[np.ix_(a, b)]).size / f.size


def _subgroups(f: MorphismSpec, min_size: int) -> dict[str, np.ndarray]:
    """Multiplicative subgroups of every order ``d >= min_size`` dividing the group order."""
    if f.tag == "mul_twist":
        order = f.size
        gen = lambda step: np.arange(0, order, step)
    else:
        fld = field_of_order(f.q)
        order = f.q - 1
        gen = lambda step: np.sort(fld._exp[np.arange(0, order, step)])
    out = {}
    for d in range(max(min_size, 1), order + 1):
        if order % d == 0:
            out[f"subgroup:{d}"] = gen(order // d)
    return out


def _rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(label.encode())]))


@dataclass(frozen=True)
class ExpanderReport:
    morphism: str
    q: int
    c: float
    C: float
    min_size: int
    quadruple_ratio: float | None
    min_image_fraction: float
    probe_families: tuple[str, ...]
    fractions: dict = field(default_factory=dict)
    verdict: str = "inconclusive"
    note: str = "finite-q statistic only; not a proof of expansion"

    def to_dict(self) -> dict:
        return {
            "morphism": self.morphism,
            "q": self.q,
            "c": self.c,
            "C": self.C,
            "min_size": self.min_size,
            "quadruple_ratio": self.quadruple_ratio,
            "min_image_fraction": self.min_image_fraction,
            "probe_families": list(self.probe_families),
            "fractions": dict(self.fractions),
            "verdict": self.verdict,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def expansion_probe(f: MorphismSpec | str, q: int, c: float = 0.5, C: float = 1.0,
                    trials: int = 8, seed: int = 0) -> ExpanderReport:
    """Smallest image fraction ``|f(A, B)| / n`` over families of sets of size ``>= C q^(1-c)``.

    Probe families: ``trials`` random pairs, the initial interval of codes,
    and every multiplicative subgroup of large enough order.  The verdict is
    ``expanding`` when the minimum reaches ``1/C``, ``constrained`` when an
    interval or subgroup family falls below ``1/(10 C)``, and
    ``inconclusive`` otherwise.
    """
    if isinstance(f, str):
        f = morphism(f, q)
    if q > MAX_PROBE_Q:
        raise BudgetError(f"q = {q} exceeds {MAX_PROBE_Q}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if C <= 0 or not 0 <= c <= 1:
        raise ValueError("need C > 0 and 0 <= c <= 1")
    n = f.size
    k = min(n, math.ceil(C * q ** (1 - c) - 1e-9))
    fractions: dict[str, float] = {}
    for t in range(trials):
        label = f"random:{t}"
        rng = _rng(seed, label)
        fractions[label] = image_fraction(f, rng.choice(n, k, replace=False),
                                          rng.choice(n, k, replace=False))
    fractions["interval"] = image_fraction(f, range(k), range(k))
    for label, sub in _subgroups(f, k).items():
        fractions[label] = image_fraction(f, sub, sub)
    low = min(fractions.values())
    structured = [v for key, v in fractions.items() if not key.startswith("random")]
    if low >= 1 / C:
        verdict = "expanding"
    elif structured and min(structured) < 1 / (10 * C):
        verdict = "constrained"
    else:
        verdict = "inconclusive"
    try:
        quad = quadruple_image_ratio(f)
    except BudgetError:
        quad = None
    return ExpanderReport(f.tag, q, c, C, k, quad, low, tuple(fractions), fractions, verdict)

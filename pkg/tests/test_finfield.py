import itertools
from functools import reduce

import numpy as np
import pytest

from graphonreg import finfield as F


def naive_irreducible(poly, p):
    """No factorisation into two monic factors of positive degree (exhaustive)."""
    k = len(poly) - 1
    for d in range(1, k // 2 + 1):
        for lo in itertools.product(range(p), repeat=d):
            a = list(lo) + [1]
            # divide poly by a over F_p
            r = list(poly)
            for i in range(k - d, -1, -1):
                c = r[i + d]
                for j in range(d + 1):
                    r[i + j] = (r[i + j] - c * a[j]) % p
            if not any(r[:d]):
                return False
    return True


class TestNumberTheory:
    def test_prime_power(self):
        assert F.prime_power(8) == (2, 3)
        assert F.prime_power(343) == (7, 3)
        for bad in (1, 6, 12, 0):
            with pytest.raises(ValueError):
                F.prime_power(bad)

    def test_grids(self):
        assert F.primes(2, 20) == [2, 3, 5, 7, 11, 13, 17, 19]
        assert F.prime_powers(2, 17) == [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17]

    def test_multiplicative_order(self):
        assert F.multiplicative_order(2, 5) == 4
        assert F.multiplicative_order(2, 9) == 6


class TestFields:
    def test_prime_field(self):
        f = F.make_field(5)
        assert f.q == 5 and f.inv(2) == 3
        assert f.mul(3, 4) == 2

    def test_f4(self):
        f = F.make_field(2, 2)
        assert list(f.modulus) == [1, 1, 1]
        t = f.from_coeffs([0, 1])
        assert f.mul(t, t) == f.from_coeffs([1, 1])

    def test_errors(self):
        with pytest.raises(ValueError):
            F.make_field(4, 1)
        with pytest.raises(ValueError):
            F.make_field(2, 13)
        with pytest.raises(ZeroDivisionError):
            F.make_field(7).inv(0)

    @pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
    def test_least_irreducible(self, p, k):
        mod = F.least_irreducible(p, k)
        assert naive_irreducible(list(mod), p)
        # nothing smaller in code order is irreducible
        code = sum(c * p ** i for i, c in enumerate(mod[:k]))
        for smaller in range(code):
            coeffs = [(smaller // p ** i) % p for i in range(k)] + [1]
            assert not naive_irreducible(coeffs, p)

    @pytest.mark.parametrize("q", F.prime_powers(2, 100))
    def test_axioms_and_wilson(self, q):
        f = F.field_of_order(q)
        e = f.elements()
        add, mul = f.add_table(), f.mul_table()
        assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
        assert np.all(np.sort(add, axis=1) == e)
        assert np.all(np.sort(mul[1:, 1:], axis=1) == e[1:])
        assert np.array_equal(np.asarray(f.pow(e, q)), e)
        prod = reduce(f.mul, e[1:].tolist(), 1)
        assert prod == f.neg(1)
        x, y, z = (np.random.default_rng(q).integers(0, q, 50) for _ in range(3))
        assert np.array_equal(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)))

    def test_parse_field(self):
        assert F.parse_field("2^4").q == 16
        assert F.parse_field("7").q == 7
        with pytest.raises(ValueError):
            F.parse_field("6^1")


class TestPowerSets:
    def test_examples(self):
        assert F.cubes(F.make_field(7)) == {0, 1, 6}
        assert F.cubes(F.make_field(5)) == set(range(5))
        assert F.squares(F.make_field(2, 2)) == set(range(4))

    @pytest.mark.parametrize("q", F.prime_powers(2, 200))
    def test_square_count(self, q):
        n = len(F.squares(F.field_of_order(q)))
        assert n == ((q + 1) // 2 if q % 2 else q)

    def test_cubes_bruteforce(self):
        for q in F.prime_powers(2, 64):
            f = F.field_of_order(q)
            assert F.cubes(f) == {f.mul(f.mul(z, z), z) for z in range(q)}


class TestCyclicFrobenius:
    def test_orders(self):
        g = F.mu_group(2)
        assert g.order == 5 and g.cubes() == set(range(5))
        assert F.mu_group(4).cubes() == {0, 3, 6}

    @pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 13, 16])
    def test_sigma_homomorphism(self, q):
        g = F.mu_group(q)
        a = g.elements()
        assert np.array_equal(g.sigma(g.mul(a[:, None], a[None, :])),
                              g.mul(g.sigma(a)[:, None], g.sigma(a)[None, :]))
        # every element solves x sigma(x)^2 = 1
        assert np.all(g.mul(a, g.power(g.sigma(a), 2)) == g.identity)

    def test_cube_predicate(self):
        for q in (2, 4, 7, 10 - 1):
            g = F.mu_group(q)
            assert {int(x) for x in g.elements() if g.is_cube(x)} == g.cubes()

    def test_smallest_field_char2(self):
        for q in (2, 4, 8):
            assert F.mu_group(q).smallest_field_order() == 4 * q * q

    def test_primitive_cube_root(self):
        assert F.mu_group(2).primitive_cube_root() is None
        z = F.mu_group(4).primitive_cube_root()
        assert z == 3 and F.mu_group(4).power(z, 3) == 0

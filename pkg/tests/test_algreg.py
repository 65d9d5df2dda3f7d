import itertools
import warnings

import numpy as np
import pytest

from graphonreg import algreg as A
from graphonreg import defgraphs as G
from graphonreg.finfield import prime_powers
from graphonreg.kernel import BipartiteGraph, constant
from graphonreg.norms import cut_distance


def path_count(a: np.ndarray) -> np.ndarray:
    """Sum over (u1, v2, u2, v3, u3) written out index by index."""
    a = a.astype(np.int64)
    return np.einsum("av,ab,cb,cd,ed,ew->vw", a, a, a, a, a, a, optimize=False)


class TestProfileKernel:
    def test_complete(self):
        k = A.profile_kernel(BipartiteGraph(np.ones((4, 3))))
        assert np.array_equal(k.values, np.ones((3, 3)))
        assert k.normalization["divisor"] == 4 ** 3 * 3 ** 2

    def test_empty(self):
        assert not A.profile_kernel(BipartiteGraph(np.zeros((3, 5)))).values.any()

    def test_paley_bruteforce(self):
        g = G.generate("paley_sum_squares", 5)
        k = A.profile_kernel(g)
        assert np.array_equal(k.counts, A.profile_kernel_bruteforce(g))

    @pytest.mark.parametrize("seed", range(6))
    def test_loop_oracle_random(self, seed):
        rng = np.random.default_rng(seed)
        nu, nv = rng.integers(1, 7, size=2)
        g = BipartiteGraph((rng.random((nu, nv)) < 0.5).astype(float))
        for side in ("column", "row"):
            assert np.array_equal(A.profile_kernel(g, side).counts,
                                  A.profile_kernel_bruteforce(g, side))

    def test_all_small_graphs(self):
        for bits in itertools.product((0, 1), repeat=6):
            g = BipartiteGraph(np.array(bits, dtype=float).reshape(2, 3))
            assert np.array_equal(A.profile_kernel(g).counts, path_count(g.adjacency()))

    @pytest.mark.parametrize("seed", range(10))
    def test_properties(self, seed):
        rng = np.random.default_rng(seed)
        nu, nv = rng.integers(1, 13, size=2)
        g = BipartiteGraph((rng.random((nu, nv)) < rng.random()).astype(float))
        k = A.profile_kernel(g)
        assert np.allclose(k.values, k.values.T, atol=1e-10)
        assert k.values.min() >= 0 and k.values.max() <= 1
        assert np.array_equal(k.counts, A.profile_kernel(g.transpose(), "row").counts)
        assert np.array_equal(k.counts, path_count(g.adjacency()))

    def test_budget(self):
        with pytest.raises(A.ProfileBudgetError):
            A.profile_kernel(BipartiteGraph(np.ones((2001, 2001))))

    def test_bad_side(self):
        with pytest.raises(ValueError):
            A.profile_kernel(BipartiteGraph(np.ones((2, 2))), "diagonal")


class TestCluster:
    def two_rows(self):
        r = np.array([[1.0, 0.2, 0.5], [0.1, 0.9, 0.3]])
        return r[[0, 1, 0, 0, 1]]

    def test_two_rows_fixed_zero(self):
        rep = A.cluster_profiles(self.two_rows(), "fixed_tolerance", tau=0)
        assert rep.cells == ((0, 2, 3), (1, 4))
        assert rep.labels == (0, 1, 0, 0, 1)

    def test_noise_gap_auto(self, rng):
        base = self.two_rows()
        res = A.cluster_profiles(base)
        assert res.cells == ((0, 2, 3), (1, 4)) and res.clear_gap
        noisy = base + rng.uniform(-1, 1, base.shape) * res.gap / 4 / 2
        assert A.cluster_profiles(noisy).cells == res.cells

    def test_constant(self):
        rep = A.cluster_profiles(np.full((4, 4), 0.3))
        assert rep.cells == ((0, 1, 2, 3),)

    def test_no_gap_single_cell(self):
        vals = np.linspace(0, 1, 10)[:, None]
        rep = A.cluster_profiles(vals)
        assert len(rep.cells) == 1 and not rep.clear_gap and rep.warnings

    def test_closure_flag(self):
        vals = np.array([[0.0], [1.0], [2.0]])
        rep = A.cluster_profiles(vals, "fixed_tolerance", tau=1.5)
        assert rep.cells == ((0, 1, 2),) and rep.closure_merged

    def test_ordering(self):
        vals = np.array([[5.0], [0.0], [0.0], [9.0], [9.0]])
        rep = A.cluster_profiles(vals, "fixed_tolerance", tau=0.1)
        assert rep.cells == ((1, 2), (3, 4), (0,))

    def test_multiscale(self):
        # an outlier far away must not hide two close but clean groups
        vals = np.array([[0.0], [0.0], [1.0], [1.0], [50.0]])
        assert A.cluster_profiles(vals).cells == ((0, 1), (2, 3), (4,))

    def test_errors(self):
        with pytest.raises(ValueError):
            A.cluster_profiles(np.eye(2), "fixed_tolerance")
        with pytest.raises(ValueError):
            A.cluster_profiles(np.eye(2), "kmeans")


def regularize(g):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return A.algebraic_regularize(g)


class TestRegularize:
    def test_complete(self):
        d = regularize(BipartiteGraph(np.ones((5, 4))))
        assert len(d.row_cells) == len(d.col_cells) == 1
        assert d.densities.tolist() == [[1.0]] and d.residual_cut_norm == 0

    def test_prod_cubes_13(self):
        d = regularize(G.generate("prod_cubes", 13))
        assert [len(c) for c in d.col_cells] == [4, 4, 4, 1]
        assert d.col_cells[-1] == (0,)
        assert d.col_large == (True, True, True, False)
        big = d.densities[:3, :3]
        assert set(np.unique(big)) <= {0.0, 1.0}
        assert cut_distance(d.large_cell_kernel(), G.predict_limit("prod_cubes", 13).representative) == 0

    def test_paley_13(self):
        d = regularize(G.generate("paley_sum_squares", 13))
        assert len(d.col_cells) == 1
        assert np.isclose(d.densities[0, 0], 7 / 13)
        assert d.residual_cut_norm <= 2 * 13 ** -0.5

    def test_partition_and_json(self):
        d = regularize(G.generate("prod_squares", 11))
        assert sorted(i for c in d.row_cells for i in c) == list(range(11))
        assert d.densities.min() >= 0 and d.densities.max() <= 1
        assert d.block_matrix().shape == (11, 11)
        assert set(d.to_dict()) >= {"row_cells", "densities", "residual_cut_norm"}

    @pytest.mark.parametrize("fam,large,small", [("prod_squares", 2, 1), ("prod_cubes", 3, 1),
                                                 ("frob_cubes", 3, 0),
                                                 ("frob_twisted_cubes", 3, 0)])
    def test_cell_counts(self, fam, large, small):
        for q in prime_powers(13, 128):
            if not G.predict_limit(fam, q).structured:
                continue
            d = regularize(G.generate(fam, q))
            for flags in (d.row_large, d.col_large):
                assert (sum(flags), len(flags) - sum(flags)) == (large, small), q

    def test_paley_residual_slope(self):
        qs = [q for q in prime_powers(5, 343) if q % 2]
        res = [regularize(G.generate("paley_sum_squares", q)).residual_cut_norm for q in qs]
        slope = np.polyfit(np.log(qs), np.log(res), 1)[0]
        assert slope <= -0.4


class TestAccumulation:
    def test_paley_odd(self):
        qs = [q for q in prime_powers(5, 121) if q % 2]
        res = A.accumulation_scan("paley_sum_squares", qs, merge_tol=0.1)
        assert len(res.clusters) == 1
        assert cut_distance(res.clusters[0].representative, constant(0.5)) <= 0.05

    def test_paley_char2(self):
        res = A.accumulation_scan("paley_sum_squares", [2, 4, 8, 16])
        assert len(res.clusters) == 1
        assert cut_distance(res.clusters[0].representative, constant(1)) == 0

    def test_sum_cubes(self):
        res = A.accumulation_scan("sum_cubes", [7, 13, 19, 31, 5, 11, 17])
        assert len(res.clusters) == 2
        a = res.assignment
        assert len({a[q] for q in (7, 13, 19, 31)}) == 1
        assert len({a[q] for q in (5, 11, 17)}) == 1
        vals = sorted(float(c.representative.values.mean()) for c in res.clusters)
        assert abs(vals[0] - 1 / 3) < 0.05 and vals[1] == 1

    def test_deterministic(self):
        a = A.accumulation_scan("prod_squares", [5, 7, 9, 11]).to_dict()
        b = A.accumulation_scan("prod_squares", [5, 7, 9, 11]).to_dict()
        assert a == b

    def test_empty(self):
        with pytest.raises(ValueError):
            A.accumulation_scan("sum_cubes", [])

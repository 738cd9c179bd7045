import numpy as np
import pytest

from sympmor import (
    BasisSizeError,
    KIND_ORTHONORMAL,
    KIND_ORTHOSYMPLECTIC,
    KIND_SYMPLECTIC,
    ReducedBasis,
    SpectralGapError,
    SymplecticityError,
    build_basis,
    pod_full,
    pod_loss,
    pod_of_ys,
    pod_separate,
    psd_complex_svd,
    psd_cotangent_lift,
    psd_greedy,
    psd_loss,
    psd_svd_like,
    select_indices_by_weight,
    svd_like_decompose,
    symplectic_inverse,
    weighted_spectrum,
)

from conftest import random_orthosymplectic


class TestLossFunctionals:
    def test_pod_loss_spanning_basis(self, rng):
        X = rng.standard_normal((8, 3))
        Q, _ = np.linalg.qr(X)
        assert pod_loss(Q[:, :3], X) < 1e-20 * np.linalg.norm(X) ** 2 + 1e-24

    def test_empty_basis(self, rng):
        X = rng.standard_normal((6, 4))
        empty = np.zeros((6, 0))
        total = np.linalg.norm(X) ** 2
        assert abs(pod_loss(empty, X) - total) < 1e-12 * total

    def test_pod_loss_columnwise_oracle(self, rng):
        X = rng.standard_normal((10, 6))
        Q, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        by_column = sum(
            np.linalg.norm(X[:, j] - Q @ (Q.T @ X[:, j])) ** 2
            for j in range(X.shape[1])
        )
        assert abs(pod_loss(Q, X) - by_column) < 1e-10 * by_column

    def test_psd_loss_columnwise_oracle(self, rng):
        X = rng.standard_normal((12, 7))
        V = random_orthosymplectic(6, 2, rng)
        Vp = symplectic_inverse(V)
        by_column = sum(
            np.linalg.norm(X[:, j] - V @ (Vp @ X[:, j])) ** 2
            for j in range(X.shape[1])
        )
        assert abs(psd_loss(V, X) - by_column) < 1e-10 * by_column

    def test_psd_loss_of_spanned_data(self, rng):
        V = random_orthosymplectic(5, 2, rng)
        X = V @ rng.standard_normal((4, 6))
        assert psd_loss(V, X) < 1e-10 * np.linalg.norm(X) ** 2

    def test_psd_loss_canonical_support(self):
        n, k = 4, 2
        cols = list(range(k)) + list(range(n, n + k))
        V = np.eye(2 * n)[:, cols]
        X = np.zeros((2 * n, 3))
        X[0] = 1.0
        X[n + 1] = -2.0
        assert psd_loss(V, X) < 1e-20

    def test_psd_loss_requires_symplectic(self, rng):
        with pytest.raises(SymplecticityError):
            psd_loss(rng.standard_normal((8, 4)),
                     rng.standard_normal((8, 3)))
        basis = pod_full(rng.standard_normal((8, 5)), 2)
        with pytest.raises(SymplecticityError):
            psd_loss(basis, rng.standard_normal((8, 3)))


class TestPodFull:
    def test_rank_two_exact(self, rng):
        u = rng.standard_normal((8, 2))
        X = u @ rng.standard_normal((2, 5))
        V = pod_full(X, 2)
        assert V.kind == KIND_ORTHONORMAL
        assert pod_loss(V, X) < 1e-12 * np.linalg.norm(X) ** 2

    def test_tail_sum_identity(self, rng):
        X = rng.standard_normal((10, 8))
        sigma = np.linalg.svd(X, compute_uv=False)
        for two_k in (2, 4, 6):
            tail = float(np.sum(sigma[two_k:] ** 2))
            assert abs(pod_loss(pod_full(X, two_k), X) - tail) \
                <= 1e-8 * tail

    def test_orthonormal(self, rng):
        V = pod_full(rng.standard_normal((12, 9)), 4)
        assert V.measures()[0] < 1e-10


class TestPodSeparate:
    def test_block_structure(self, rng):
        X = rng.standard_normal((12, 9))
        V = pod_separate(X, 4)
        n, k = 6, 2
        assert np.all(V.columns[n:, :k] == 0.0)
        assert np.all(V.columns[:n, k:] == 0.0)
        assert V.measures()[0] < 1e-10
        assert V.kind == KIND_ORTHONORMAL

    def test_momentum_only_snapshots(self, rng):
        n = 5
        X = np.zeros((2 * n, 6))
        X[n:] = rng.standard_normal((n, 6))
        V = pod_separate(X, 4)
        # all snapshot content sits in the momentum block and must be
        # captured by the bottom-right block alone
        sig = np.linalg.svd(X[n:], compute_uv=False)
        tail = float(np.sum(sig[2:] ** 2))
        assert abs(pod_loss(V, X) - tail) <= 1e-8 * max(tail, 1e-30)


class TestCotangentLift:
    def test_measures_and_shared_block(self, rng):
        X = rng.standard_normal((14, 10))
        V = psd_cotangent_lift(X, 6)
        o, s = V.measures()
        assert o < 1e-10 and s < 1e-10
        n, k = 7, 3
        Phi = V.columns[:n, :k]
        assert np.linalg.norm(Phi.T @ Phi - np.eye(k)) < 1e-12
        assert np.all(V.columns[n:, :k] == 0.0)

    def test_dominated_by_optimal_method(self, rng):
        X = rng.standard_normal((12, 9))
        loss_ct = psd_loss(psd_cotangent_lift(X, 4), X)
        loss_ys = psd_loss(pod_of_ys(X, 4), X)
        assert loss_ys <= loss_ct * (1 + 1e-10)


class TestPodOfYs:
    def test_paired_spectrum_and_measures(self, rng):
        X = rng.standard_normal((12, 8))
        V = pod_of_ys(X, 4)
        o, s = V.measures()
        assert o < 1e-10 and s < 1e-10
        assert V.kind == KIND_ORTHOSYMPLECTIC

    def test_symplectic_equals_orthogonal_loss(self, rng):
        X = rng.standard_normal((10, 7))
        V = pod_of_ys(X, 4)
        a, b = psd_loss(V, X), pod_loss(V, X)
        assert abs(a - b) <= 1e-10 * max(a, 1e-30)

    def test_transpose_is_symplectic_inverse(self, rng):
        V = pod_of_ys(rng.standard_normal((10, 7)), 4)
        assert np.linalg.norm(
            symplectic_inverse(V.columns) - V.columns.T) < 1e-8

    def test_gap_error_on_degenerate_spectrum(self):
        # identity snapshots: all singular values of [X, JX] coincide
        with pytest.raises(SpectralGapError):
            pod_of_ys(np.eye(6), 2)

    def test_gap_error_beyond_rank(self, rng):
        X = rng.standard_normal((8, 2))  # rank 2, [X, JX] has rank 4
        with pytest.raises(SpectralGapError):
            pod_of_ys(X, 6)


class TestComplexSvd:
    def test_equivalence_with_real_route(self, rng):
        X = rng.standard_normal((12, 10))
        Va, Vb = pod_of_ys(X, 4), psd_complex_svd(X, 4)
        Pa = Va.columns @ Va.columns.T
        Pb = Vb.columns @ Vb.columns.T
        assert np.linalg.norm(Pa - Pb) < 1e-6
        la, lb = psd_loss(Va, X), psd_loss(Vb, X)
        assert abs(la - lb) <= 1e-8 * max(la, 1e-30)

    def test_measures(self, rng):
        V = psd_complex_svd(rng.standard_normal((10, 9)), 4)
        o, s = V.measures()
        assert o < 1e-10 and s < 1e-10

    def test_not_worse_than_cotangent(self, rng):
        X = rng.standard_normal((10, 8))
        assert psd_loss(psd_complex_svd(X, 4), X) <= \
            psd_loss(psd_cotangent_lift(X, 4), X) * (1 + 1e-10)

    def test_gap_error(self):
        with pytest.raises(SpectralGapError):
            psd_complex_svd(np.eye(6), 2)


class TestGreedy:
    def test_first_pick_is_largest_column(self, rng):
        X = rng.standard_normal((8, 5))
        X[:, 2] *= 10.0
        V = psd_greedy(X, 2)
        e = V.columns[:, 0]
        x = X[:, 2] / np.linalg.norm(X[:, 2])
        assert min(np.linalg.norm(e - x), np.linalg.norm(e + x)) < 1e-12

    def test_monotone_loss(self, rng):
        X = rng.standard_normal((12, 10))
        losses = [psd_loss(psd_greedy(X, 2 * k), X) for k in range(1, 5)]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(losses, losses[1:]))

    def test_exact_recovery_on_symplectic_data(self, rng):
        V0 = random_orthosymplectic(6, 2, rng)
        X = V0 @ rng.standard_normal((4, 9))
        V = psd_greedy(X, 4)
        assert psd_loss(V, X) < 1e-8 * np.linalg.norm(X) ** 2

    def test_early_stop_warns(self, rng):
        V0 = random_orthosymplectic(5, 1, rng)
        X = V0 @ rng.standard_normal((2, 6))  # rank 2 data
        with pytest.warns(UserWarning, match="early"):
            V = psd_greedy(X, 8)
        assert V.columns.shape[1] <= 4

    def test_measures(self, rng):
        V = psd_greedy(rng.standard_normal((10, 8)), 4)
        o, s = V.measures()
        assert s < 1e-8 and o < 1e-6


class TestSvdLikeBasis:
    def test_full_selection_zero_loss(self, rng):
        X = rng.standard_normal((8, 5))
        f = svd_like_decompose(X)
        V = psd_svd_like(X, 2 * (f.p + f.q), factors=f)
        assert psd_loss(V, X) < 1e-8 * np.linalg.norm(X) ** 2

    def test_neglected_weight_identity(self, rng):
        X = rng.standard_normal((12, 8))
        f = svd_like_decompose(X)
        w = weighted_spectrum(f)
        for k in (1, 2, 3):
            V = psd_svd_like(X, 2 * k, factors=f)
            _, neglected = select_indices_by_weight(w.weights, k)
            loss = psd_loss(V, X)
            assert abs(loss - neglected) <= 1e-6 * np.linalg.norm(X) ** 2

    def test_selection_is_top_weights(self, rng):
        X = rng.standard_normal((10, 6))
        f = svd_like_decompose(X)
        w = weighted_spectrum(f)
        V = psd_svd_like(X, 4, factors=f)
        sel, _ = select_indices_by_weight(w.weights, 2)
        expected = np.hstack((f.S[:, sel], f.S[:, f.n + sel]))
        assert np.array_equal(V.columns, expected)

    def test_kind_and_left_inverse(self, rng):
        X = rng.standard_normal((12, 9))
        V = psd_svd_like(X, 4)
        assert V.kind == KIND_SYMPLECTIC
        G = symplectic_inverse(V.columns) @ V.columns
        assert np.linalg.norm(G - np.eye(4)) < 1e-6

    def test_size_error(self, rng):
        X = np.outer(rng.standard_normal(8), rng.standard_normal(5))
        with pytest.raises(BasisSizeError):
            psd_svd_like(X, 4)  # rank-1 data has p + q = 1


class TestOrderingAndBounds:
    def test_orthonormal_class_optimality(self, rng):
        for _ in range(5):
            X = rng.standard_normal((12, 9))
            best = psd_loss(pod_of_ys(X, 4), X)
            assert best <= psd_loss(psd_cotangent_lift(X, 4), X) * (1 + 1e-9)
            assert best <= psd_loss(psd_greedy(X, 4), X) * (1 + 1e-9)

    def test_orthogonal_projection_bound(self, rng):
        # doubling the basis size of the paired method beats plain POD
        for _ in range(5):
            X = rng.standard_normal((12, 10))
            sigma = np.linalg.svd(X, compute_uv=False)
            for k in (2, 3):
                lhs = pod_loss(pod_of_ys(X, 2 * k), X)
                rhs = float(np.sum(sigma[k:] ** 2))
                assert lhs <= rhs * (1 + 1e-9)

    def test_symplectic_projection_bound(self, rng):
        for _ in range(5):
            X = rng.standard_normal((16, 12))
            slack = 1e-10 * np.linalg.norm(X) ** 2
            for k in (1, 2):  # 2k <= n = 8
                lhs = psd_loss(pod_of_ys(X, 4 * k), X)
                rhs = psd_loss(psd_svd_like(X, 2 * k), X)
                assert lhs <= rhs + slack


class TestDispatch:
    def test_known_methods(self, rng):
        X = rng.standard_normal((8, 6))
        V = build_basis("pod_full", X, 2)
        assert isinstance(V, ReducedBasis)

    def test_unknown_method(self, rng):
        with pytest.raises(KeyError, match="unknown method"):
            build_basis("pod_magic", rng.standard_normal((8, 6)), 2)

    def test_odd_size_rejected(self, rng):
        with pytest.raises(BasisSizeError):
            pod_full(rng.standard_normal((8, 6)), 3)

    def test_snapshot_matrix_input(self, small_lattice):
        from sympmor import snapshot_collect, standard_design
        design = standard_design(nt=3, sweep=(4,))
        snaps = snapshot_collect(design, small_lattice.assemble)
        V = build_basis("psd_complex_svd", snaps, 4)
        assert V.columns.shape == (snaps.dim, 4)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorroot import reference_data as rd
from tensorroot.algebra import (
    bcirc_oracle,
    first_non_pd_slice,
    fold,
    frobenius_norm,
    identity_tensor,
    is_t_positive_definite,
    require_t_positive_definite,
    spectral_frobenius_norm,
    t_inv_sqrt_direct,
    t_inverse,
    t_product,
    t_sqrt_direct,
    t_svd,
    t_transpose,
    unfold,
)
from tensorroot.exceptions import DimensionMismatchError, NotPositiveDefiniteError, SingularSliceError
from tensorroot.fourier import dft_mode3
from tensorroot.solvers import make_conditioned_spd_tensor

from .oracles import t_product_loops

seeds = st.integers(0, 2**31 - 1)


def _rand(seed, *shape):
    return np.random.default_rng(seed).standard_normal(shape)


class TestTProduct:
    def test_matches_triple_loop(self, rng):
        a = rng.standard_normal((2, 3, 4))
        b = rng.standard_normal((3, 2, 4))
        np.testing.assert_allclose(t_product(a, b), t_product_loops(a, b), atol=1e-12)

    def test_matches_bcirc(self, rng):
        a = rng.standard_normal((3, 2, 3))
        b = rng.standard_normal((2, 4, 3))
        c = t_product(a, b)
        np.testing.assert_allclose(bcirc_oracle(a) @ unfold(b), unfold(c), atol=1e-12)

    def test_identity(self, rng):
        a = rng.standard_normal((3, 3, 5))
        e = identity_tensor(3, 5)
        np.testing.assert_allclose(t_product(a, e), a, atol=1e-13)
        np.testing.assert_allclose(t_product(e, a), a, atol=1e-13)

    def test_p_equal_one_is_matrix_product(self, rng):
        a = rng.standard_normal((2, 3))
        b = rng.standard_normal((3, 4))
        np.testing.assert_allclose(t_product(a, b)[:, :, 0], a @ b, atol=1e-13)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            t_product(np.zeros((2, 3, 2)), np.zeros((2, 2, 2)))
        with pytest.raises(DimensionMismatchError):
            t_product(np.zeros((2, 2, 2)), np.zeros((2, 2, 3)))

    @given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 4))
    def test_associative(self, seed, n, m, p):
        a, b, c = _rand(seed, n, m, p), _rand(seed + 1, m, n, p), _rand(seed + 2, n, m, p)
        lhs = t_product(t_product(a, b), c)
        rhs = t_product(a, t_product(b, c))
        np.testing.assert_allclose(lhs, rhs, atol=1e-11 * max(1.0, np.abs(lhs).max()))


class TestTranspose:
    def test_slice_layout(self, rng):
        a = rng.standard_normal((2, 3, 4))
        at = t_transpose(a)
        assert at.shape == (3, 2, 4)
        np.testing.assert_array_equal(at[:, :, 0], a[:, :, 0].T)
        np.testing.assert_array_equal(at[:, :, 1], a[:, :, 3].T)
        np.testing.assert_array_equal(at[:, :, 3], a[:, :, 1].T)

    def test_matches_bcirc_transpose(self, rng):
        a = rng.standard_normal((2, 3, 4))
        np.testing.assert_array_equal(bcirc_oracle(t_transpose(a)), bcirc_oracle(a).T)

    @given(seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 5))
    def test_involution_and_reversal(self, seed, n, m, p):
        a, b = _rand(seed, n, m, p), _rand(seed + 7, m, n, p)
        np.testing.assert_array_equal(t_transpose(t_transpose(a)), a)
        np.testing.assert_allclose(
            t_transpose(t_product(a, b)), t_product(t_transpose(b), t_transpose(a)), atol=1e-11
        )


class TestInverseAndNorms:
    def test_inverse(self, rng):
        a = rng.standard_normal((3, 3, 4)) + 3 * identity_tensor(3, 4)
        np.testing.assert_allclose(t_product(a, t_inverse(a)), identity_tensor(3, 4), atol=1e-12)

    def test_singular_slice_reported(self):
        a = np.zeros((2, 2, 3))
        a[:, :, 0] = np.eye(2)
        a[:, :, 1] = -np.eye(2)  # DC slice sums to I - I + 0 = 0
        with pytest.raises(SingularSliceError) as exc:
            t_inverse(a)
        assert exc.value.slice_index == 0

    def test_parseval_norm(self, rng):
        a = rng.standard_normal((3, 2, 5))
        assert spectral_frobenius_norm(dft_mode3(a)) == pytest.approx(frobenius_norm(a), rel=1e-13)

    def test_unfold_fold_round_trip(self, rng):
        a = rng.standard_normal((2, 3, 4))
        np.testing.assert_array_equal(fold(unfold(a), 2, 4), a)
        with pytest.raises(DimensionMismatchError):
            fold(unfold(a), 3, 4)


class TestTSvd:
    @pytest.mark.parametrize("shape", [(3, 3, 3), (2, 4, 4), (4, 2, 5), (3, 3, 1)])
    def test_reconstruction_and_orthogonality(self, rng, shape):
        a = rng.standard_normal(shape)
        res = t_svd(a)
        recon = t_product(t_product(res.u, res.s), t_transpose(res.v))
        np.testing.assert_allclose(recon, a, atol=1e-12)
        n, m, p = shape
        np.testing.assert_allclose(t_product(t_transpose(res.u), res.u), identity_tensor(n, p), atol=1e-12)
        np.testing.assert_allclose(t_product(t_transpose(res.v), res.v), identity_tensor(m, p), atol=1e-12)

    def test_f_diagonal_non_increasing(self, rng):
        res = t_svd(rng.standard_normal((3, 4, 4)))
        sh = dft_mode3(res.s)
        for i in range(4):
            d = np.abs(np.diag(sh[:, :, i]))
            off = sh[:, :, i].copy()
            off[np.arange(3), np.arange(3)] = 0
            assert np.abs(off).max() < 1e-12
            assert np.all(np.diff(d) <= 1e-12)


class TestPositiveDefiniteness:
    def test_newton_example_is_tpd_but_not_hermitian(self):
        a = rd.newton_example_tensor()
        assert is_t_positive_definite(a)
        # slices 2 and 3 differ, so the non-DC Fourier slices are complex symmetric
        assert first_non_pd_slice(a, hermitian=True) == 1

    def test_negative_tensor_rejected_with_slice(self):
        with pytest.raises(NotPositiveDefiniteError) as exc:
            require_t_positive_definite(-rd.newton_example_tensor(), which="a")
        assert exc.value.slice_index == 0
        assert "a:" in str(exc.value)

    def test_only_one_slice_bad(self):
        a = np.zeros((2, 2, 2))
        a[:, :, 0] = np.eye(2)
        a[:, :, 1] = 2 * np.eye(2)  # Fourier slices 3I and -I
        assert first_non_pd_slice(a) == 1

    def test_conditioned_tensor_is_t_symmetric(self):
        a = make_conditioned_spd_tensor(3, 4, 50.0, seed=1)
        np.testing.assert_allclose(t_transpose(a), a, atol=1e-12)
        assert is_t_positive_definite(a, hermitian=True)


class TestDirectSqrt:
    @pytest.mark.parametrize("name", ["newton_example", "stability_example"])
    def test_reference_tensors(self, name):
        a = rd.tensor(name)
        x = t_sqrt_direct(a)
        np.testing.assert_allclose(t_product(x, x), a, atol=1e-10 * np.abs(a).max())
        assert is_t_positive_definite(x)

    def test_newton_example_matches_printed_root(self):
        x = t_sqrt_direct(rd.newton_example_tensor())
        printed = rd.tensor("newton_example", "sqrt_printed.tensor")
        np.testing.assert_allclose(x, printed, atol=6e-6)

    def test_inverse_sqrt(self):
        a = make_conditioned_spd_tensor(3, 3, 20.0, seed=3)
        y = t_inv_sqrt_direct(a)
        x = t_sqrt_direct(a)
        np.testing.assert_allclose(t_product(y, x), identity_tensor(3, 3), atol=1e-11)

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatchError):
            t_sqrt_direct(np.zeros((2, 3, 2)))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorroot import reference_data as rd
from tensorroot.algebra import identity_tensor
from tensorroot.exceptions import DimensionMismatchError, NotPositiveDefiniteError
from tensorroot.solvers import random_tpd_tensor
from tensorroot.tbw import bw_distance_sq_matrix, tbw_distance, tbw_report

from .oracles import bw_scalar, spd_matrix


class TestMatrixBW:
    def test_commuting_case(self):
        a, b = np.diag([4.0, 9.0]), np.diag([1.0, 1.0])
        assert bw_distance_sq_matrix(a, b) == pytest.approx((2 - 1) ** 2 + (3 - 1) ** 2)

    def test_self_distance_clamped(self, rng):
        a = spd_matrix(rng, 4, kappa=1e4)
        assert bw_distance_sq_matrix(a, a) >= 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            bw_distance_sq_matrix(np.eye(2), np.eye(3))


class TestTensorBW:
    def test_scalar_tubes_match_oracle(self):
        # 1x1xp tensors: each Fourier slice is a positive scalar
        a = np.array([[[5.0, 1.0, 1.0]]])
        b = np.array([[[3.0, 0.5, 0.5]]])
        ah, bh = np.fft.fft(a, axis=2).real.ravel(), np.fft.fft(b, axis=2).real.ravel()
        expected = math.sqrt(sum(bw_scalar(x, y) ** 2 for x, y in zip(ah, bh)))
        assert tbw_distance(a, b) == pytest.approx(expected, rel=1e-12)

    def test_worked_example(self):
        a, b = rd.tbw_pair()
        rep = tbw_report(a, b)
        assert rep.total == pytest.approx(1.3021, abs=1e-3)
        np.testing.assert_allclose([r.d_squared for r in rep.per_slice], [1.1875, 0.2540, 0.2540], atol=1e-3)
        np.testing.assert_allclose([r.trace_cross_sqrt for r in rep.per_slice], [18.9062, 5.8730, 5.8730], atol=1e-3)

    @pytest.mark.parametrize("strategy", ["newton", "db"])
    def test_strategies_agree(self, strategy):
        a, b = rd.tbw_pair()
        assert tbw_distance(a, b, strategy) == pytest.approx(tbw_distance(a, b), rel=1e-10)

    def test_symmetry_shortcut(self):
        a, b = random_tpd_tensor(3, 5, 1), random_tpd_tensor(3, 5, 2)
        assert tbw_report(a, b, use_symmetry=True).total == pytest.approx(tbw_report(a, b).total, rel=1e-12)

    def test_csv(self):
        a, b = rd.tbw_pair()
        lines = tbw_report(a, b).to_csv().splitlines()
        assert lines[0] == "slice,trace_a,trace_b,trace_cross_sqrt,d_squared"
        assert lines[-1].startswith("total,")
        assert len(lines) == 5

    def test_not_hermitian_rejected(self):
        a = rd.newton_example_tensor()  # complex-symmetric Fourier slices
        with pytest.raises(NotPositiveDefiniteError) as exc:
            tbw_distance(a, identity_tensor(3, 3))
        assert "a:" in str(exc.value)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            tbw_distance(identity_tensor(2, 3), identity_tensor(2, 4))

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            tbw_distance(identity_tensor(2, 2), 2 * identity_tensor(2, 2), "cholesky")

    @given(st.integers(0, 10_000))
    def test_metric_axioms(self, seed):
        a, b, c = (random_tpd_tensor(3, 3, seed + k * 100_003) for k in range(3))
        dab, dba = tbw_distance(a, b), tbw_distance(b, a)
        assert abs(dab - dba) <= 1e-10
        assert tbw_distance(a, a) <= 1e-9
        assert dab <= tbw_distance(a, c) + tbw_distance(c, b) + 1e-9

    def test_scaling(self):
        # d(tA, tB) = sqrt(t) d(A, B)
        a, b = rd.tbw_pair()
        assert tbw_distance(4 * a, 4 * b) == pytest.approx(2 * tbw_distance(a, b), rel=1e-12)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorroot import reference_data as rd
from tensorroot.algebra import identity_tensor, is_t_positive_definite, t_product, t_sqrt_direct
from tensorroot.exceptions import DimensionMismatchError, NotPositiveDefiniteError, SingularSliceError
from tensorroot.fourier import dft_mode3, hermitian_defect
from tensorroot.solvers import (
    SWEEP_HEADER,
    ConvergenceTrace,
    IterationConfig,
    convergence_ratios,
    db_spectral,
    db_tsqrt,
    direct_tsqrt,
    make_conditioned_spd_tensor,
    max_slice_condition_number,
    newton_spectral,
    newton_tsqrt,
    prefloor_q,
    random_tpd_tensor,
    residual,
    residual_floor,
    spectral_sqrt_pair,
    stability_experiment,
    stability_sweep,
    sweep_csv,
    tsqrt,
)


class TestIterationConfig:
    def test_defaults(self):
        cfg = IterationConfig()
        assert (cfg.max_iterations, cfg.tolerance, cfg.early_stop, cfg.symmetrize) == (50, 1e-12, True, False)

    @pytest.mark.parametrize("kw", [{"max_iterations": 0}, {"tolerance": -1.0}, {"tolerance": math.nan}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            IterationConfig(**kw)


class TestConvergenceTrace:
    def test_ratios(self):
        rho, q = convergence_ratios([4.0, 2.0, 0.5])
        assert rho == [0.5, 0.25]
        assert q == [2.0 / 16.0, 0.5 / 4.0]

    def test_zero_predecessor_gives_nan(self):
        rho, q = convergence_ratios([1.0, 0.0, 0.0])
        assert rho[0] == 0.0
        assert math.isnan(rho[1]) and math.isnan(q[1])

    def test_needs_two(self):
        with pytest.raises(ValueError):
            convergence_ratios([1.0])

    def test_csv(self):
        tr = ConvergenceTrace.from_residuals([4.0, 2.0, 0.0, 0.0], converged=True)
        lines = tr.to_csv().splitlines()
        assert lines[0] == "k,residual,rho,q"
        assert lines[1] == "0,4.0,,"
        assert lines[2] == "1,2.0,0.5,0.125"
        assert lines[4] == "3,0.0,,"
        assert tr.iterations_run == 3


class TestSolvers:
    def test_db_newton_example(self):
        a = rd.newton_example_tensor()
        sol = db_tsqrt(a)
        assert sol.trace.converged
        assert sol.trace.iterations_run == 6
        np.testing.assert_allclose(sol.sqrt, t_sqrt_direct(a), atol=1e-13)
        np.testing.assert_allclose(t_product(sol.inv_sqrt, sol.sqrt), identity_tensor(3, 3), atol=1e-12)
        assert sol.trace.inverse_residuals[-1] < 1e-12

    def test_newton_matches_db_iterates(self):
        a = rd.newton_example_tensor()
        ah = dft_mode3(a)
        cfg = IterationConfig(max_iterations=6, tolerance=0.0, early_stop=False)
        xs = {}
        newton_spectral(ah, cfg, lambda k, x: xs.__setitem__(k, x.copy()))
        diffs = []
        db_spectral(ah, cfg, lambda k, x, y: diffs.append(np.linalg.norm(x - xs[k]) / np.linalg.norm(x)))
        assert max(diffs) < 1e-13

    def test_residual_is_fourier_domain(self):
        a = rd.newton_example_tensor()
        x = newton_tsqrt(a, IterationConfig(max_iterations=1, early_stop=False)).sqrt
        ah, xh = dft_mode3(a), dft_mode3(x)
        expected = math.sqrt(sum(np.linalg.norm(xh[:, :, i] @ xh[:, :, i] - ah[:, :, i]) ** 2 for i in range(3)))
        assert residual(a, x) == pytest.approx(expected, rel=1e-14)
        # the spatial-domain norm is smaller by sqrt(p)
        assert np.linalg.norm(t_product(x, x) - a) == pytest.approx(expected / math.sqrt(3), rel=1e-12)

    def test_identity_is_fixed_point(self):
        sol = tsqrt(identity_tensor(3, 4), "newton")
        assert sol.trace.residuals == [0.0]
        assert sol.trace.converged

    def test_direct(self):
        a = make_conditioned_spd_tensor(3, 4, 30.0, seed=2)
        sol = direct_tsqrt(a)
        assert sol.trace.residuals[0] < 1e-12
        np.testing.assert_allclose(t_product(sol.sqrt, sol.sqrt), a, atol=1e-12)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            tsqrt(identity_tensor(2, 2), "halley")

    def test_non_tpd_rejected_with_slice(self):
        a = np.zeros((2, 2, 2))
        a[:, :, 0] = np.eye(2)
        a[:, :, 1] = 2 * np.eye(2)
        with pytest.raises(NotPositiveDefiniteError) as exc:
            db_tsqrt(a)
        assert exc.value.slice_index == 1

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatchError):
            newton_tsqrt(np.ones((2, 3, 2)))

    def test_singular_iterate_reported_with_trace(self):
        # spectral entry point skips the PD gate: slice 1 = diag(1, -1) gives X_1 = diag(1, 0)
        ah = np.zeros((2, 2, 2), dtype=complex)
        ah[:, :, 0] = np.eye(2)
        ah[:, :, 1] = np.diag([1.0, -1.0])
        with pytest.raises(SingularSliceError) as exc:
            newton_spectral(ah, IterationConfig(max_iterations=3))
        assert exc.value.slice_index == 1
        assert exc.value.iteration == 2
        assert len(exc.value.trace.residuals) == 2

    def test_max_iterations_respected(self):
        sol = db_tsqrt(rd.newton_example_tensor(), IterationConfig(max_iterations=2, tolerance=1e-30))
        assert sol.trace.iterations_run == 2
        assert not sol.trace.converged

    def test_symmetrize_preserves_hermitian_iterates(self):
        a = make_conditioned_spd_tensor(4, 3, 100.0, seed=5)
        ah = dft_mode3(a)
        defects = []
        newton_spectral(
            ah,
            IterationConfig(max_iterations=12, tolerance=0.0, early_stop=False, symmetrize=True),
            lambda k, x: defects.append(max(hermitian_defect(x[:, :, i]) for i in range(3))),
        )
        assert max(defects) <= 1e-14

    @given(st.integers(0, 10_000))
    def test_iterative_matches_direct(self, seed):
        a = random_tpd_tensor(3, 3, seed)
        ref = t_sqrt_direct(a)
        for method in ("newton", "db"):
            x = tsqrt(a, method, IterationConfig(tolerance=1e-12 * np.linalg.norm(dft_mode3(a)))).sqrt
            np.testing.assert_allclose(x, ref, atol=1e-10 * max(1.0, np.abs(ref).max()))
        assert is_t_positive_definite(ref)


class TestSpectralPair:
    @pytest.mark.parametrize("method", ["db", "newton", "direct"])
    def test_pair(self, method):
        ah = dft_mode3(make_conditioned_spd_tensor(3, 4, 1e3, seed=1))
        x, y = spectral_sqrt_pair(ah, method)
        for i in range(4):
            np.testing.assert_allclose(x[:, :, i] @ x[:, :, i], ah[:, :, i], atol=1e-10 * np.abs(ah).max())
            np.testing.assert_allclose(y[:, :, i] @ x[:, :, i], np.eye(3), atol=1e-9)

    def test_best_iterate_survives_newton_drift(self):
        a = rd.stability_example_tensor()
        ah = dft_mode3(a)
        x, _ = spectral_sqrt_pair(ah, "newton", IterationConfig(max_iterations=22, early_stop=False))
        r = math.sqrt(sum(np.linalg.norm(x[:, :, i] @ x[:, :, i] - ah[:, :, i]) ** 2 for i in range(3)))
        assert r < 1e-6

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            spectral_sqrt_pair(dft_mode3(identity_tensor(2, 2)), "nope")


class TestStabilityHarness:
    def test_generator_condition(self):
        for kappa in (1.0, 4.0, 1102.0):
            a = make_conditioned_spd_tensor(3, 3, kappa, seed=0)
            assert max_slice_condition_number(a) == pytest.approx(kappa, rel=1e-8)
            assert np.isrealobj(a)

    def test_generator_validation(self):
        with pytest.raises(ValueError):
            make_conditioned_spd_tensor(1, 3, 2.0, 0)
        with pytest.raises(ValueError):
            make_conditioned_spd_tensor(3, 3, 0.5, 0)

    def test_generator_deterministic(self):
        np.testing.assert_array_equal(
            make_conditioned_spd_tensor(3, 5, 10.0, 7), make_conditioned_spd_tensor(3, 5, 10.0, 7)
        )

    def test_stability_example_shape(self):
        rep = stability_experiment(rd.stability_example_tensor(), 22)
        assert len(rep.newton.residuals) == 23 and len(rep.db.residuals) == 23
        assert rep.newton.final_over_min > 1e6
        assert rep.db.final_over_min < 10
        assert rep.kappa == pytest.approx(1102, rel=0.01)
        assert len(list(rep.rows())) == 23

    def test_sweep_csv(self):
        kappas = [4, 50]
        text = sweep_csv(kappas, stability_sweep(kappas, iterations=10))
        lines = text.splitlines()
        assert lines[0].split(",") == SWEEP_HEADER
        assert len(lines) == 3
        assert float(lines[1].split(",")[0]) == 4.0

    def test_prefloor(self):
        assert prefloor_q([1.0, 0.1, 1e-20], 1e-15) == [pytest.approx(0.1)]
        # an unstable run bottoms out above the rounding floor; its minimum and regrowth are excluded
        assert prefloor_q([1.0, 1e-3, 1e-9, 1e-8, 1e-6], 1e-15) == [pytest.approx(1e-3)]
        a = rd.newton_example_tensor()
        assert residual_floor(a) == pytest.approx(100 * np.finfo(float).eps * np.linalg.norm(dft_mode3(a)))

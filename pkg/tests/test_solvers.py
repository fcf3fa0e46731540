"""Retrieval solvers: goldens, noise robustness, and failure reporting.

The dense-scan oracle is the authority whenever solvers are cross-checked:
it shares no integer machinery with the reconstruction paths.
"""

import numpy as np
import pytest

from mfsar import (AmbiguousSolutionError, ConfigurationError,
                   FoldedObservation, ModulusPair, NoSolutionError,
                   brute_force_oracle, fold_per_wavelength, forward_fold,
                   robust_crt, search_retrieve, solve_case1, solve_case2,
                   theorem1_range, theorem1_solve)
from conftest import make_config

# Five benchmark targets of the dual-band reference system: true velocity,
# measured remainders, expected folding integers, and the two solver columns
# (search average, reduced-modulus closed form).  The closed-form answers for
# the last two are deliberately wrong: those truths sit outside the +-15 m/s
# validity interval of the reduced solver.
BENCHMARK_TARGETS = [
    # (truth, obs1, obs2, n_t1, n_s1, n_t2, n_s2, v_search, v_closed)
    (8.36, -6.5791, 8.3173, 0, 1, 0, 0, 8.3691, 8.3691),
    (13.46, -6.4708, 7.3716, 1, 0, 1, -1, 13.4504, 13.4504),
    (17.01, -3.1730, -6.7979, 1, 0, 1, 0, 17.0146, -12.9855),
    (-11.03, -5.8834, 6.9664, -1, 1, 0, -1, -10.9585, -10.9585),
    (-16.87, 3.1043, 7.1790, -1, 0, -1, 0, -16.8584, 13.1417),
]


class TestRobustCrt:
    def test_reduced_remainder_example(self):
        res = robust_crt([1.8270, -0.7979], [5, 6])
        assert res.v_hat == pytest.approx(-12.9855, abs=5e-4)

    def test_zero_remainders(self):
        res = robust_crt([0.0, 0.0], [5, 6])
        assert res.v_hat == pytest.approx(0.0, abs=1e-12)

    def test_exact_reconstruction(self):
        # centered remainders of 17 modulo 12 and 16
        res = robust_crt([5.0, 1.0], [12, 16])
        assert res.v_hat == pytest.approx(17.0, abs=1e-9)
        assert res.integers.n_t == (1, 1)

    def test_noise_below_quarter_gcd_recovers_integers(self):
        rng = np.random.default_rng(42)
        moduli = [12.0, 16.0]  # common factor 4, tolerance 1 m/s
        for _ in range(300):
            truth = float(rng.uniform(-24, 24))
            noise = rng.uniform(-0.9, 0.9, size=2)
            rems = [float(forward_fold(truth, ModulusPair(m, 1e9)).v_time + e)
                    for m, e in zip(moduli, noise)]
            res = robust_crt(rems, moduli)
            # interior truths: linear recovery within the worst error
            if abs(truth) < 24 - 1.0:
                assert abs(res.v_hat - truth) <= float(np.abs(noise).max()) + 1e-9
                expected = [round((truth - r) / m) for r, m in zip(rems, moduli)]
                assert list(res.integers.n_t) == expected

    def test_averaging_reduces_error(self):
        rng = np.random.default_rng(3)
        errs = []
        for _ in range(500):
            truth = float(rng.uniform(-20, 20))
            noise = rng.uniform(-0.5, 0.5, size=2)
            rems = [forward_fold(truth, ModulusPair(m, 1e9)).v_time + e
                    for m, e in zip([12.0, 16.0], noise)]
            res = robust_crt(rems, [12, 16])
            if abs(res.v_hat - truth) < 5:  # keep linear-recovery trials
                errs.append(res.v_hat - truth)
        # variance of the mean of two independent uniforms: xi^2/6
        assert np.std(errs) == pytest.approx(0.5 / np.sqrt(6), rel=0.15)

    def test_half_lcm_wraps_to_negative_end(self):
        # truth at +lcm/2 is identified with -lcm/2 under the half-open range
        rems = [forward_fold(24.0, ModulusPair(m, 1e9)).v_time for m in (12.0, 16.0)]
        res = robust_crt(rems, [12, 16])
        assert res.v_hat == pytest.approx(-24.0, abs=1e-9)

    def test_out_of_range_class_raises_no_solution(self):
        with pytest.raises(NoSolutionError):
            robust_crt([2.4, 2.4], [5, 6], search_range=(-2.0, 2.0))

    def test_wide_range_raises_ambiguous(self):
        with pytest.raises(AmbiguousSolutionError):
            robust_crt([0.0, 0.0], [5, 6], search_range=(-45.0, 45.0))

    def test_non_coprime_reduction_rejected(self):
        with pytest.raises(ConfigurationError, match="coprime"):
            robust_crt([0.0, 0.0, 0.0], [6, 10, 15])

    def test_incommensurable_moduli_rejected(self):
        with pytest.raises(ConfigurationError):
            robust_crt([0.0, 0.0], [5, 6 * np.sqrt(2)])

    def test_inconsistent_remainders_raise_no_solution(self):
        # Three remainders whose consensus deviations exceed half the common
        # factor cannot come from one value.
        with pytest.raises(NoSolutionError):
            robust_crt([0.95, -0.95, 0.95], [2, 3, 5], search_range=(-15.0, 15.0))


class TestSolveCase1:
    def make(self):
        return make_config(d=0.2, lambdas=(0.03, 0.04))

    def test_in_range_identity(self):
        cfg = self.make()
        res = solve_case1(FoldedObservation((5.0, 5.0)), cfg)
        assert res.v_hat == pytest.approx(5.0, abs=1e-9)
        assert res.integers.n_t == (0, 0)

    def test_folded_velocity(self):
        cfg = self.make()
        obs = FoldedObservation(tuple(f.v_time for f in fold_per_wavelength(17.0, cfg)))
        res = solve_case1(obs, cfg)
        assert res.v_hat == pytest.approx(17.0, abs=1e-9)
        oracle = brute_force_oracle(obs, cfg, v_range=48.0, step=0.01)
        assert oracle.v_hat == pytest.approx(17.0, abs=0.01)

    def test_rejects_other_cases(self, reference_config):
        with pytest.raises(ConfigurationError, match="case I"):
            solve_case1(FoldedObservation((0.0, 0.0)), reference_config)


class TestSolveCase2:
    def make(self):
        return make_config(d=0.6, lambdas=(0.03, 0.07))

    def test_folded_velocity(self):
        cfg = self.make()
        folds = fold_per_wavelength(17.0, cfg)
        assert [f.v_space for f in folds] == pytest.approx([-1.0, 3.0])
        res = solve_case2(FoldedObservation(tuple(f.v_space for f in folds)), cfg)
        assert res.v_hat == pytest.approx(17.0, abs=1e-9)
        assert res.integers.n_st == (3, 1)
        assert res.integers.n_t == (1, 1)
        assert res.integers.n_s == (1, -1)

    def test_zero(self):
        res = solve_case2(FoldedObservation((0.0, 0.0)), self.make())
        assert res.v_hat == pytest.approx(0.0, abs=1e-12)

    def test_perturbed_remainders_keep_integers(self):
        cfg = self.make()
        rng = np.random.default_rng(11)
        # common factor of the space moduli (6, 14) is 2: tolerate m/8 = 0.25
        for _ in range(100):
            truth = float(rng.uniform(-20, 20))
            folds = fold_per_wavelength(truth, cfg)
            noise = rng.uniform(-0.25, 0.25, size=2)
            obs = FoldedObservation(tuple(f.v_space + e for f, e in zip(folds, noise)))
            res = solve_case2(obs, cfg)
            if abs(truth) < 21 - 0.5:
                expected = [round((truth - o) / m)
                            for o, m in zip(obs.v_space, (6.0, 14.0))]
                assert list(res.integers.n_st) == expected
                assert abs(res.v_hat - truth) <= float(np.abs(noise).max()) + 1e-9


class TestTheorem1:
    def test_reduced_moduli_and_range(self, reference_config):
        assert theorem1_range(reference_config) == pytest.approx(30.0)

    @pytest.mark.parametrize(
        "truth,obs1,obs2,expected",
        [(t, o1, o2, closed) for t, o1, o2, *_rest, closed in
         [(r[0], r[1], r[2], r[8]) for r in BENCHMARK_TARGETS]])
    def test_closed_form_column(self, reference_config, truth, obs1, obs2, expected):
        res = theorem1_solve(FoldedObservation((obs1, obs2)), reference_config)
        assert res.v_hat == pytest.approx(expected, abs=5e-4)
        assert res.method == "theorem1_crt"

    def test_out_of_range_truth_is_wrong_by_design(self, reference_config):
        truth = 17.01
        folds = fold_per_wavelength(truth, reference_config)
        res = theorem1_solve(
            FoldedObservation(tuple(f.v_space for f in folds)), reference_config)
        assert abs(res.v_hat - truth) > 1.0
        # ... but congruent to the truth modulo the reduced range
        assert (res.v_hat - truth) % 30 == pytest.approx(0.0, abs=1e-6) or \
               (truth - res.v_hat) % 30 == pytest.approx(0.0, abs=1e-6)

    def test_degenerates_to_case2_solution(self):
        cfg = make_config(d=0.6, lambdas=(0.03, 0.07))
        rng = np.random.default_rng(5)
        for _ in range(50):
            truth = float(rng.uniform(-20.5, 20.5))
            folds = fold_per_wavelength(truth, cfg)
            noise = rng.uniform(-0.2, 0.2, size=2)
            obs = FoldedObservation(tuple(f.v_space + e for f, e in zip(folds, noise)))
            a = theorem1_solve(obs, cfg)
            b = solve_case2(obs, cfg)
            assert a.v_hat == pytest.approx(b.v_hat, abs=1e-9)

    def test_rejects_case1(self):
        cfg = make_config(d=0.2, lambdas=(0.03, 0.04))
        with pytest.raises(ConfigurationError):
            theorem1_solve(FoldedObservation((0.0, 0.0)), cfg)


class TestSearchRetrieve:
    @pytest.mark.parametrize("row", BENCHMARK_TARGETS)
    def test_benchmark_targets(self, reference_config, row):
        truth, obs1, obs2, n_t1, n_s1, n_t2, n_s2, v_search, _ = row
        res = search_retrieve(FoldedObservation((obs1, obs2)), reference_config)
        assert res.integers.n_t == (n_t1, n_t2)
        assert res.integers.n_s == (n_s1, n_s2)
        assert res.v_hat == pytest.approx(v_search, abs=1e-3)
        assert abs(res.v_hat - truth) < 0.2

    def test_round_trip_noiseless(self, reference_config):
        for truth in np.arange(-60.0, 60.0, 1.37):
            folds = fold_per_wavelength(float(truth), reference_config)
            obs = FoldedObservation(tuple(f.v_space for f in folds), xi_e=0.0)
            res = search_retrieve(obs, reference_config)
            assert res.v_hat == pytest.approx(float(truth), abs=1e-9)

    def test_requires_case3(self):
        cfg = make_config(d=0.6, lambdas=(0.03, 0.07))
        with pytest.raises(ConfigurationError, match="case III"):
            search_retrieve(FoldedObservation((0.0, 0.0)), cfg)

    def test_crafted_tie_reports_ambiguous(self, reference_config):
        # With a wide error bound, remainders (3.0, 2.5) of a zero-velocity
        # target are fit equally well by the zero tuple and the unfold shifted
        # one net modulus step: |2.5-3.0| = |8.5-8.0|.  The solver must report
        # the tie, not pick a side.
        obs = FoldedObservation((3.0, 2.5), xi_e=6.0)
        with pytest.raises(AmbiguousSolutionError) as err:
            search_retrieve(obs, reference_config)
        assert err.value.candidates is not None

    def test_inconsistent_third_band_reports_no_solution(self):
        cfg = make_config(lambdas=(0.05, 0.06, 0.07))
        folds = fold_per_wavelength(17.0, cfg)
        wrong = fold_per_wavelength(-23.0, cfg)
        obs = FoldedObservation(
            (folds[0].v_space, folds[1].v_space, wrong[2].v_space), xi_e=0.1)
        with pytest.raises(NoSolutionError, match="S_[TS]"):
            search_retrieve(obs, cfg)

    def test_three_band_retrieval(self):
        cfg = make_config(lambdas=(0.05, 0.06, 0.07))
        rng = np.random.default_rng(9)
        for _ in range(25):
            truth = float(rng.uniform(-55, 55))
            folds = fold_per_wavelength(truth, cfg)
            noise = rng.uniform(-0.3, 0.3, size=3)
            obs = FoldedObservation(tuple(f.v_space + e for f, e in zip(folds, noise)),
                                    xi_e=0.3)
            res = search_retrieve(obs, cfg)
            assert abs(res.v_hat - truth) <= 0.3 + 1e-9

    def test_observation_shape_validated(self, reference_config):
        with pytest.raises(ValueError, match="observations"):
            search_retrieve(FoldedObservation((1.0,)), reference_config)

    def test_observation_interval_validated(self, reference_config):
        with pytest.raises(ValueError, match="interval"):
            search_retrieve(FoldedObservation((14.0, 0.0), xi_e=0.5),
                            reference_config)


class TestBruteForceOracle:
    def test_noiseless_scan(self, reference_config):
        truth = 17.01
        folds = fold_per_wavelength(truth, reference_config)
        obs = FoldedObservation(tuple(f.v_space for f in folds), xi_e=0.0)
        res = brute_force_oracle(obs, reference_config, step=0.005)
        assert res.v_hat == pytest.approx(truth, abs=0.005)
        assert res.residual < 0.005

    def test_zero(self, reference_config):
        res = brute_force_oracle(FoldedObservation((0.0, 0.0)), reference_config)
        assert res.v_hat == pytest.approx(0.0, abs=1e-6)

    def test_bounded_noise_bounded_error(self, reference_config):
        rng = np.random.default_rng(21)
        for _ in range(20):
            truth = float(rng.uniform(-59, 59))
            folds = fold_per_wavelength(truth, reference_config)
            noise = rng.uniform(-0.4, 0.4, size=2)
            obs = FoldedObservation(tuple(f.v_space + e for f, e in zip(folds, noise)),
                                    xi_e=0.4)
            res = brute_force_oracle(obs, reference_config, step=0.01)
            assert abs(res.v_hat - truth) <= 0.4 + 0.01

    def test_agrees_with_search_on_integers(self, reference_config):
        rng = np.random.default_rng(33)
        for _ in range(60):
            truth = float(rng.uniform(-59.0, 59.0))
            folds = fold_per_wavelength(truth, reference_config)
            noise = rng.uniform(-0.5, 0.5, size=2)
            obs = FoldedObservation(tuple(f.v_space + e for f, e in zip(folds, noise)),
                                    xi_e=0.5)
            try:
                searched = search_retrieve(obs, reference_config)
            except (AmbiguousSolutionError, NoSolutionError):
                continue
            oracle = brute_force_oracle(obs, reference_config, step=0.02)
            assert searched.integers.n_t == oracle.integers.n_t
            assert searched.integers.n_s == oracle.integers.n_s

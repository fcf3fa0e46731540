"""System classification, derived quantities, and the JSON config contract."""

import json
from fractions import Fraction

import numpy as np
import pytest

from mfsar import (CaseId, ConfigurationError, ModulusPair, RadarConfig,
                   TargetMotion, TargetType, azimuth_shift, classify_case,
                   classify_target_type, config_from_dict, determinable_size,
                   forward_fold, load_config, max_azimuth_shift,
                   sweep_determinable_size, unambiguous_range,
                   velocity_resolution)
from conftest import make_config


class TestClassifyCase:
    def test_narrow_spacing_is_case1(self):
        case = classify_case(make_config(d=0.2))
        assert case.case_id is CaseId.I
        assert case.k is None

    def test_dpca_spacing_is_case2(self):
        case = classify_case(make_config(d=0.6))
        assert case.case_id is CaseId.II
        assert case.k == 2
        assert case.p_over_q == 2

    def test_generic_spacing_is_case3(self):
        case = classify_case(make_config(d=0.4))
        assert case.case_id is CaseId.III
        assert case.p_over_q == Fraction(4, 3)

    def test_exactly_one_case_holds(self):
        # The three conditions partition every positive configuration.
        for d in np.linspace(0.05, 1.2, 24):
            case = classify_case(make_config(d=round(float(d), 3)))
            ratio = round(float(d), 3) * 800 / 240
            if ratio < 1:
                assert case.case_id is CaseId.I
            elif abs(ratio - round(ratio)) < 1e-9:
                assert case.case_id is CaseId.II
            else:
                assert case.case_id is CaseId.III

    def test_irrational_ratio_rejected(self):
        with pytest.raises(ConfigurationError):
            make_config(d=0.4 * np.sqrt(2))


class TestUnambiguousRange:
    def test_case1(self):
        cfg = make_config(d=0.2, lambdas=(0.03,))
        assert unambiguous_range(cfg, 0.03) == pytest.approx((-6, 6))

    def test_case2(self):
        cfg = make_config(d=0.6, lambdas=(0.03,))
        assert unambiguous_range(cfg, 0.03) == pytest.approx((-3, 3))

    def test_case3(self):
        cfg = make_config()
        assert unambiguous_range(cfg, 0.05) == pytest.approx((-7.5, 7.5))


class TestAzimuthShift:
    def test_worked_values(self, reference_config):
        assert azimuth_shift(8.3691, reference_config) == pytest.approx(-697.425)
        assert azimuth_shift(0.0, reference_config) == 0.0
        assert azimuth_shift(-6.5492, reference_config) == pytest.approx(545.77, abs=5e-3)

    def test_odd_and_linear(self, reference_config):
        for v in (0.5, 3.0, 9.9):
            assert azimuth_shift(-v, reference_config) == -azimuth_shift(v, reference_config)
        assert azimuth_shift(2.0, reference_config) == pytest.approx(
            2 * azimuth_shift(1.0, reference_config))

    def test_bounded_by_max_shift(self, reference_config):
        for lam in reference_config.lambdas:
            v_t = lam * reference_config.f_p / 2
            bound = max_azimuth_shift(reference_config, lam)
            for v_time in np.linspace(-v_t / 2, v_t / 2, 33, endpoint=False):
                assert abs(azimuth_shift(float(v_time), reference_config)) <= bound + 1e-9


class TestMaxAzimuthShift:
    def test_values(self, reference_config):
        assert max_azimuth_shift(reference_config, 0.05) == pytest.approx(2500 / 3)
        assert max_azimuth_shift(reference_config, 0.06) == pytest.approx(1000)

    def test_linear_in_wavelength(self, reference_config):
        assert max_azimuth_shift(reference_config, 0.10) == pytest.approx(
            2 * max_azimuth_shift(reference_config, 0.05))


class TestTargetType:
    def test_matched_cross_range_velocity_is_type1(self, reference_config):
        motion = TargetMotion(v_x=0.1, v_y=5.0, y_0=10000.0)
        root = np.sqrt(reference_config.v_a**2 - 25.0)
        v_0 = reference_config.v_a - root
        motion = TargetMotion(v_x=v_0, v_y=5.0, y_0=10000.0)
        assert classify_target_type(reference_config, 0.05, motion, 0) is TargetType.TYPE_I

    def test_unfolded_fast_cross_range_is_type2(self, reference_config):
        motion = TargetMotion(v_x=30.0, v_y=5.0, y_0=10000.0)
        assert classify_target_type(reference_config, 0.05, motion, 0) is TargetType.TYPE_II

    def test_type_may_change_with_wavelength(self, reference_config):
        # A target folded at one carrier but not the other changes class.
        motion = TargetMotion(v_x=0.5, v_y=-11.0, y_0=10000.0)
        v_r = motion.radial_velocity(reference_config.r_0)
        types = []
        for lam in reference_config.lambdas:
            pair = reference_config.blind_speeds(lam)
            n_t = forward_fold(v_r, pair).n_t
            types.append(classify_target_type(reference_config, lam, motion, n_t))
        assert len(set(types)) == 2

    def test_outcomes_exclusive_and_exhaustive(self, reference_config):
        rng = np.random.default_rng(7)
        for _ in range(200):
            motion = TargetMotion(v_x=float(rng.uniform(-40, 40)),
                                  v_y=float(rng.uniform(-40, 40)),
                                  y_0=10000.0)
            n_t = int(rng.integers(-3, 4))
            result = classify_target_type(reference_config, 0.05, motion, n_t)
            assert result in (TargetType.TYPE_I, TargetType.TYPE_II, TargetType.TYPE_III)
            if n_t == 0:
                assert result is not TargetType.TYPE_III
            else:
                assert result is not TargetType.TYPE_I

    def test_range_velocity_at_platform_speed_rejected(self, reference_config):
        with pytest.raises(ConfigurationError):
            classify_target_type(reference_config, 0.05,
                                 TargetMotion(v_y=120.0, y_0=1e4), 0)


class TestSweepDeterminableSize:
    def test_grows_with_prf_then_saturates(self, reference_config):
        lam = 0.05
        breakpoint_fp = 2 * reference_config.v_a / reference_config.d  # 600 Hz
        below = sweep_determinable_size(reference_config, lam, "f_p", [100, 300, 500])
        sizes = [s for _, s in below]
        assert sizes == pytest.approx([lam * f / 2 for f in (100, 300, 500)])
        assert sizes == sorted(sizes)
        above = sweep_determinable_size(reference_config, lam, "f_p", [700, 900, 2000])
        assert [s for _, s in above] == pytest.approx([15.0, 15.0, 15.0])
        at_break = sweep_determinable_size(reference_config, lam, "f_p",
                                           [breakpoint_fp])[0][1]
        assert at_break == pytest.approx(lam * breakpoint_fp / 2)
        assert at_break == pytest.approx(15.0)

    def test_bad_axis_rejected(self, reference_config):
        with pytest.raises(ConfigurationError):
            sweep_determinable_size(reference_config, 0.05, "r_0", [1.0])

    def test_nonpositive_grid_rejected(self, reference_config):
        with pytest.raises(ConfigurationError):
            sweep_determinable_size(reference_config, 0.05, "d", [0.0])


class TestVelocityResolution:
    def test_reference_values(self, reference_config):
        assert velocity_resolution(reference_config, 0.05) == pytest.approx(15 / 7)
        assert velocity_resolution(reference_config, 0.06) == pytest.approx(18 / 7)

    def test_two_channels_give_full_blind_speed(self):
        cfg = make_config(m_ch=2)
        assert velocity_resolution(cfg, 0.05) == pytest.approx(15.0)


class TestConfigJson:
    def test_load_roundtrip(self, config_path):
        cfg = load_config(config_path)
        assert cfg.d == 0.4 and cfg.lambdas == (0.05, 0.06)

    def test_unknown_field_rejected(self, tmp_path):
        data = make_config().to_dict()
        data["antenna_gain"] = 30.0
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigurationError, match="unknown"):
            load_config(path)

    def test_missing_field_rejected(self, tmp_path):
        data = make_config().to_dict()
        del data["f_p"]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigurationError, match="missing"):
            load_config(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigurationError):
            load_config(path)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            make_config(m_ch=1)
        with pytest.raises(ConfigurationError):
            make_config(lambdas=(0.06, 0.05))
        with pytest.raises(ConfigurationError):
            make_config(v_a=-120.0)


class TestSawtoothComposition:
    """Folding an ascending velocity ramp reproduces the per-case periodic
    estimated-velocity pattern, with the period the case dictates."""

    def _estimated(self, cfg, lam, v_grid):
        f_p = Fraction(cfg.f_p)
        v_a = Fraction(cfg.v_a)
        d = Fraction(cfg.d).limit_denominator(10**6)
        pair = ModulusPair(lam * f_p / 2, lam * v_a / d)
        case = classify_case(cfg)
        out = []
        for v in v_grid:
            fold = forward_fold(v, pair)
            out.append(fold.v_time if case.case_id is CaseId.I else fold.v_space)
        return out

    def test_case1_period_is_time_blind_speed(self):
        cfg = make_config(d=0.2, lambdas=(0.03,))
        grid = [Fraction(k, 4) for k in range(-100, 100)]
        est = self._estimated(cfg, Fraction(3, 100), grid)
        shifted = self._estimated(cfg, Fraction(3, 100),
                                  [v + 12 for v in grid])
        assert est == shifted

    def test_case2_period_is_space_blind_speed(self):
        cfg = make_config(d=0.6, lambdas=(0.03,))
        grid = [Fraction(k, 4) for k in range(-100, 100)]
        est = self._estimated(cfg, Fraction(3, 100), grid)
        shifted = self._estimated(cfg, Fraction(3, 100), [v + 6 for v in grid])
        assert est == shifted
        # and the time blind speed is *not* a period here
        assert est != self._estimated(cfg, Fraction(3, 100), [v + 3 for v in grid])

    def test_case3_period_is_enumerated_size(self):
        cfg = make_config()
        report = determinable_size([20, 24], [15, 18])
        period = int(report.size)
        for lam in (Fraction(1, 20), Fraction(3, 50)):
            grid = [Fraction(k, 2) for k in range(-60, 60)]
            est = self._estimated(cfg, lam, grid)
            shifted = self._estimated(cfg, lam, [v + period for v in grid])
            assert est == shifted

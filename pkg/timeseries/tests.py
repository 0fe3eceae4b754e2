from django.test import SimpleTestCase
from scipy.linalg import solve_toeplitz
from scipy.signal import lfilter
import pandas as pd
import numpy as np

from gridvol.exceptions import (
    AlignmentError, ConstantSeries, DomainError, EndpointMissing, GapTooLarge, InsufficientData,
)
from timeseries.utilities.correlation import acf, autocorrelations, durbin_levinson, pacf, pacf_ols
from timeseries.utilities.transforms import apply_transforms, impute_missing, missing_runs, transform
from timeseries.utilities.qq import plotting_positions, qq_points
from timeseries.utilities.statistics import summary_stats
from timeseries.models import TimeSeries


def make_series(values, name="x", start="2004-01-01"):
    return TimeSeries(pd.date_range(start, periods=len(values), freq="D"), values, name)


def ar_series(coefs, n, seed, name="ar"):
    rng = np.random.default_rng(seed)
    x = lfilter([1.0], np.r_[1.0, -np.asarray(coefs)], rng.standard_normal(n + 200))[200:]
    return make_series(x, name)


class TimeSeriesTests(SimpleTestCase):
    def test_rejects_unordered_dates(self):
        dates = pd.to_datetime(["2004-01-02", "2004-01-01"])
        with self.assertRaises(DomainError):
            TimeSeries(dates, [1.0, 2.0])

    def test_rejects_length_mismatch(self):
        with self.assertRaises(AlignmentError):
            TimeSeries(pd.date_range("2004-01-01", periods=3), [1.0, 2.0])

    def test_rejects_empty(self):
        with self.assertRaises(InsufficientData):
            TimeSeries(pd.DatetimeIndex([]), [])

    def test_values_are_read_only(self):
        s = make_series([1.0, 2.0])
        with self.assertRaises(ValueError):
            s.values[0] = 5.0

    def test_slice_and_alignment(self):
        s = make_series([1.0, 2.0, 3.0, 4.0])
        self.assertEqual(len(s[1:]), 3)
        with self.assertRaises(AlignmentError):
            s.check_aligned(s[1:])
        self.assertEqual(s.check_aligned(s.with_values([0, 0, 0, 0])).name, "x")


class ImputeMissingTests(SimpleTestCase):
    def test_missing_runs(self):
        values = np.array([np.nan, 1.0, np.nan, np.nan, 2.0, 3.0, np.nan])
        self.assertEqual(missing_runs(values), [(0, 1), (2, 2), (6, 1)])
        self.assertEqual(missing_runs(np.array([1.0, 2.0])), [])

    def test_single_gap_midpoint(self):
        s = impute_missing(make_series([10.0, np.nan, 20.0]), max_gap=1)
        np.testing.assert_allclose(s.values, [10.0, 15.0, 20.0])

    def test_two_step_gap(self):
        s = impute_missing(make_series([5.0, np.nan, np.nan, 11.0]), max_gap=2)
        np.testing.assert_allclose(s.values, [5.0, 7.0, 9.0, 11.0])

    def test_gap_too_large(self):
        with self.assertRaises(GapTooLarge):
            impute_missing(make_series([10.0, np.nan, np.nan, np.nan, np.nan, 20.0]), max_gap=3)

    def test_missing_endpoint(self):
        with self.assertRaises(EndpointMissing):
            impute_missing(make_series([np.nan, 1.0, 2.0]), max_gap=3)

    def test_idempotent_on_complete_series(self):
        s = make_series([1.0, 2.0, 3.0])
        self.assertIs(impute_missing(s, max_gap=1), s)
        filled = impute_missing(make_series([1.0, np.nan, 3.0]), max_gap=1)
        np.testing.assert_array_equal(impute_missing(filled, max_gap=1).values, filled.values)


class TransformTests(SimpleTestCase):
    def test_log(self):
        s = transform(make_series([1.0, np.e, np.e ** 2]), "log")
        np.testing.assert_allclose(s.values, [0.0, 1.0, 2.0], atol=1e-15)

    def test_log_round_trip(self):
        x = np.random.default_rng(1).uniform(1, 100, 200)
        s = transform(make_series(x), "log")
        np.testing.assert_allclose(np.exp(s.values), x, rtol=1e-12)

    def test_diff(self):
        s = transform(make_series([3.0, 5.0, 4.0]), "diff")
        np.testing.assert_allclose(s.values, [2.0, -1.0])
        self.assertEqual(s.dates[0], pd.Timestamp("2004-01-02"))

    def test_log_return(self):
        s = transform(make_series([100.0, 110.0]), "log_return")
        self.assertAlmostEqual(s.values[0], 0.09531, places=5)

    def test_log_needs_positive_values(self):
        with self.assertRaises(DomainError):
            transform(make_series([1.0, 0.0]), "log")
        with self.assertRaises(DomainError):
            transform(make_series([1.0, -2.0]), "log_return")

    def test_ewma_smooth_starts_at_first_value(self):
        s = transform(make_series([1.0, 3.0, 3.0]), "ewma_smooth", span=3)
        # smoothing factor 2/(3+1) = 0.5
        np.testing.assert_allclose(s.values, [1.0, 2.0, 2.5])
        self.assertEqual(s.name, "ewma3_x")

    def test_unknown_transform(self):
        with self.assertRaises(DomainError):
            transform(make_series([1.0, 2.0]), "sqrt")

    def test_chain(self):
        s = apply_transforms(make_series([1.0, np.e, np.e ** 3]), [("log", None), ("diff", None)])
        np.testing.assert_allclose(s.values, [1.0, 2.0])


class SummaryStatsTests(SimpleTestCase):
    def test_symmetric_sample(self):
        stats = summary_stats(make_series([1.0, 2.0, 3.0, 4.0, 5.0]))
        self.assertEqual(stats.mean, 3.0)
        self.assertEqual(stats.median, 3.0)
        self.assertAlmostEqual(stats.skewness, 0.0)
        self.assertEqual(stats.iqr, 2.0)
        self.assertAlmostEqual(stats.std, np.sqrt(2.5))

    def test_constant_series(self):
        with self.assertRaises(ConstantSeries):
            summary_stats(make_series([5.0, 5.0, 5.0, 5.0]))

    def test_too_short(self):
        with self.assertRaises(InsufficientData):
            summary_stats(make_series([5.0]))

    def test_moment_properties(self):
        x = np.random.default_rng(7).gamma(2.0, size=500)
        stats = summary_stats(make_series(x))
        flipped = summary_stats(make_series(-x))
        scaled = summary_stats(make_series(3.0 * x - 7.0))
        self.assertAlmostEqual(stats.skewness, -flipped.skewness, places=12)
        self.assertAlmostEqual(stats.kurtosis, scaled.kurtosis, places=10)
        self.assertGreaterEqual(stats.kurtosis, 1.0 + stats.skewness ** 2)
        self.assertTrue(stats.min <= stats.median <= stats.max)


class CorrelationTests(SimpleTestCase):
    def test_ar1_acf_decays_geometrically(self):
        entries = acf(ar_series([0.5], 100000, seed=11), 5)
        for entry in entries:
            self.assertAlmostEqual(entry.acf, 0.5 ** entry.lag, delta=0.02)

    def test_white_noise_inside_band(self):
        n = 10000
        x = np.random.default_rng(3).standard_normal(n)
        rho = autocorrelations(x, 20)
        self.assertGreaterEqual(np.mean(np.abs(rho) < 2 / np.sqrt(n)), 0.9)

    def test_bounds_and_reversal(self):
        x = np.random.default_rng(5).standard_normal(300).cumsum()
        rho = autocorrelations(x, 30)
        self.assertTrue(np.all(np.abs(rho) <= 1.0))
        np.testing.assert_allclose(autocorrelations(x[::-1], 30), rho, atol=1e-12)

    def test_constant_series(self):
        with self.assertRaises(ConstantSeries):
            acf(make_series([2.0] * 10), 3)

    def test_lag_must_be_below_sample_size(self):
        with self.assertRaises(InsufficientData):
            acf(make_series([1.0, 2.0, 3.0]), 3)

    def test_pacf_first_lag_equals_acf(self):
        entries = pacf(ar_series([0.3], 200, seed=2), 4)
        self.assertEqual(entries[0].pacf, entries[0].acf)

    def test_ar1_pacf_cuts_off(self):
        entries = pacf(ar_series([0.5], 100000, seed=12), 5)
        self.assertAlmostEqual(entries[0].pacf, 0.5, delta=0.02)
        for entry in entries[1:]:
            self.assertLess(abs(entry.pacf), 0.02)

    def test_durbin_levinson_solves_yule_walker(self):
        rho = autocorrelations(ar_series([0.6, -0.3], 500, seed=4).values, 6)
        phi = durbin_levinson(rho)
        for k in range(1, 7):
            coefs = solve_toeplitz(np.r_[1.0, rho[:k - 1]], rho[:k])
            self.assertAlmostEqual(phi[k - 1], coefs[-1], places=10)

    def test_durbin_levinson_close_to_ols(self):
        for seed in range(5):
            s = ar_series([0.6, -0.3], 500, seed=seed)
            phi = np.array([e.pacf for e in pacf(s, 5)])
            np.testing.assert_allclose(phi, pacf_ols(s, 5), atol=0.05)


class QQTests(SimpleTestCase):
    def test_plotting_positions(self):
        points = qq_points(make_series([1.0, -1.0, 0.0]))
        np.testing.assert_allclose(plotting_positions(3), [1 / 6, 1 / 2, 5 / 6])
        self.assertEqual([p[1] for p in points], [-1.0, 0.0, 1.0])
        self.assertAlmostEqual(points[1][0], 0.0)
        self.assertLess(points[0][0], 0.0)

    def test_self_consistent_slope(self):
        x = np.random.default_rng(9).normal(2.0, 3.0, 10000)
        points = np.array(qq_points(make_series(x), loc=2.0, scale=3.0))
        slope = np.polyfit(points[:, 0], points[:, 1], 1)[0]
        self.assertAlmostEqual(slope, 1.0, delta=0.05)

    def test_heavy_tail_exceeds_normal(self):
        x = np.random.default_rng(10).standard_t(3, 5000)
        theoretical, empirical = qq_points(make_series(x))[-1]
        self.assertGreater(empirical, theoretical)

    def test_student_t_needs_finite_variance(self):
        with self.assertRaises(DomainError):
            qq_points(make_series([1.0, 2.0, 3.0]), dist="student_t", nu=2.0)

    def test_needs_three_points(self):
        with self.assertRaises(InsufficientData):
            qq_points(make_series([1.0, 2.0]))

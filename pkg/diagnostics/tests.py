from django.test import SimpleTestCase, tag
from scipy.signal import lfilter
import pandas as pd
import numpy as np

from gridvol.exceptions import ConstantSeries, DegenerateResiduals, InsufficientData, SingularDesign
from diagnostics.utilities.portmanteau import (
    correlogram, ljung_box, ljung_box_from_acf, squared_residual_ljung_box,
)
from diagnostics.utilities.unit_root import adf_sweep, adf_test, critical_values, pp_test
from diagnostics.utilities.normality import jarque_bera, jarque_bera_from_moments
from diagnostics.utilities.residuals import arch_lm, durbin_watson
from diagnostics.utilities.report import pre_estimation_report
from diagnostics.utilities.distributions import chi2_sf
from timeseries.models import TimeSeries


def make_series(values, name="x"):
    return TimeSeries(pd.date_range("2004-01-01", periods=len(values), freq="D"), values, name)


def garch_noise(n, seed, k=0.0014, a=0.134, g=0.787):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n + 500)
    eps = np.zeros(n + 500)
    h = k / (1 - a - g)
    for t in range(n + 500):
        if t > 0:
            h = k + a * eps[t - 1] ** 2 + g * h
        eps[t] = np.sqrt(h) * z[t]
    return eps[500:]


class ChiSquareTests(SimpleTestCase):
    def test_matches_known_quantiles(self):
        self.assertAlmostEqual(chi2_sf(3.841459, 1), 0.05, places=6)
        self.assertAlmostEqual(chi2_sf(14.06714, 7), 0.05, places=6)
        self.assertEqual(chi2_sf(0.0, 3), 1.0)


class JarqueBeraTests(SimpleTestCase):
    def test_price_moments(self):
        result = jarque_bera_from_moments(0.540037, 3.464248, 2877)
        self.assertAlmostEqual(result.statistic, 165.68, delta=0.05)
        self.assertLess(result.p_value, 1e-12)
        self.assertTrue(result.reject_at_5pct)

    def test_log_price_moments(self):
        result = jarque_bera_from_moments(-0.371518, 2.650906, 2877)
        self.assertAlmostEqual(result.statistic, 80.79, delta=0.05)

    def test_normal_moments(self):
        result = jarque_bera_from_moments(0.0, 3.0, 500)
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.p_value, 1.0)
        self.assertFalse(result.reject_at_5pct)

    def test_affine_invariance(self):
        x = np.random.default_rng(0).exponential(size=400)
        base = jarque_bera(make_series(x)).statistic
        self.assertAlmostEqual(jarque_bera(make_series(-2.5 * x + 4.0)).statistic, base, places=8)
        self.assertGreaterEqual(base, 0.0)

    def test_constant_series(self):
        with self.assertRaises(ConstantSeries):
            jarque_bera(make_series([1.0] * 10))

    def test_needs_eight_observations(self):
        with self.assertRaises(InsufficientData):
            jarque_bera(make_series(np.arange(7.0)))


class UnitRootTests(SimpleTestCase):
    def test_asymptotic_critical_value(self):
        crit = critical_values("constant_trend", 100000)
        self.assertAlmostEqual(crit["5%"], -3.41, delta=0.005)
        self.assertAlmostEqual(critical_values("constant", 25)["1%"], -3.75)

    def test_stationary_series_rejects(self):
        x = lfilter([1.0], [1.0, -0.5], np.random.default_rng(1).standard_normal(2000))
        result = adf_test(make_series(x), lags=1, trend="constant")
        self.assertTrue(result.reject_at_5pct)
        self.assertEqual(result.p_bracket, "<0.01")

    def test_trend_stationary_sweep_rejects_at_every_lag(self):
        rng = np.random.default_rng(2)
        noise = lfilter([1.0], [1.0, -0.6], rng.standard_normal(2877))
        x = 3.5 + 0.0004 * np.arange(2877) + 0.2 * noise
        results = adf_sweep(make_series(x), max_lags=7, trend="constant_trend")
        self.assertEqual([r.lags for r in results], list(range(8)))
        for result in results:
            self.assertLess(result.statistic, -3.414)
            self.assertTrue(result.reject_at_5pct)

    def test_affine_invariance(self):
        x = np.random.default_rng(3).standard_normal(300).cumsum()
        base = adf_test(make_series(x), lags=2, trend="constant_trend").statistic
        moved = adf_test(make_series(4.0 * x - 9.0), lags=2, trend="constant_trend").statistic
        self.assertAlmostEqual(base, moved, places=8)

    def test_insufficient_data(self):
        with self.assertRaises(InsufficientData):
            adf_test(make_series(np.arange(12.0)), lags=2)

    def test_singular_design(self):
        # a linear trend makes y_{t-1} collinear with the deterministic terms
        with self.assertRaises(SingularDesign):
            adf_test(make_series(np.arange(50.0)), lags=0, trend="constant_trend")

    def test_pp_uncorrected_ratio_is_adf_zero_lag(self):
        x = np.random.default_rng(4).standard_normal(500).cumsum()
        pp = pp_test(make_series(x), trend="constant")
        adf = adf_test(make_series(x), lags=0, trend="constant")
        self.assertAlmostEqual(pp.details['uncorrected_statistic'], adf.statistic, places=12)
        self.assertEqual(pp.lags, int(np.floor(4 * (500 / 100) ** (2 / 9))))

    def test_pp_white_noise_rejects(self):
        x = np.random.default_rng(5).standard_normal(2000)
        self.assertTrue(pp_test(make_series(x), trend="constant").reject_at_5pct)

    def test_pp_needs_thirty_observations(self):
        with self.assertRaises(InsufficientData):
            pp_test(make_series(np.random.default_rng(0).standard_normal(29)))

    @tag('slow')
    def test_adf_size_on_random_walks(self):
        rejections = [
            adf_test(make_series(np.random.default_rng(seed).standard_normal(2000).cumsum()),
                     lags=0, trend="constant").reject_at_5pct
            for seed in range(500)
        ]
        self.assertAlmostEqual(np.mean(rejections), 0.05, delta=0.03)

    @tag('slow')
    def test_pp_size_on_random_walks(self):
        rejections = [
            pp_test(make_series(np.random.default_rng(seed).standard_normal(2000).cumsum()),
                    trend="constant").reject_at_5pct
            for seed in range(500)
        ]
        self.assertAlmostEqual(np.mean(rejections), 0.05, delta=0.03)


class LjungBoxTests(SimpleTestCase):
    def test_price_lag_one_fixture(self):
        result = ljung_box_from_acf([0.907], 2877)[0]
        self.assertAlmostEqual(result.statistic, 2369.0, delta=5.0)
        self.assertTrue(result.reject_at_5pct)

    def test_zero_autocorrelation(self):
        results = ljung_box_from_acf([0.0, 0.0, 0.0], 100)
        self.assertEqual([r.statistic for r in results], [0.0, 0.0, 0.0])
        self.assertEqual([r.p_value for r in results], [1.0, 1.0, 1.0])

    def test_nondecreasing_in_lag(self):
        x = np.random.default_rng(6).standard_normal(400)
        q = [r.statistic for r in ljung_box(make_series(x), 20)]
        self.assertTrue(np.all(np.diff(q) >= 0))

    def test_dof_offset(self):
        results = ljung_box_from_acf([0.1, 0.1, 0.1], 500, dof=2)
        self.assertIsNone(results[1].p_value)
        self.assertAlmostEqual(results[2].p_value, chi2_sf(results[2].statistic, 1))

    def test_lag_bound(self):
        with self.assertRaises(InsufficientData):
            ljung_box(make_series(np.random.default_rng(0).standard_normal(20)), 5)

    def test_constant_series(self):
        with self.assertRaises(ConstantSeries):
            ljung_box(make_series([3.0] * 40), 5)

    def test_correlogram_rows(self):
        x = lfilter([1.0], [1.0, -0.7], np.random.default_rng(8).standard_normal(500))
        rows = correlogram(make_series(x), 7)
        self.assertEqual(len(rows), 7)
        self.assertEqual(rows[0].acf, rows[0].pacf)
        self.assertLess(rows[6].p_value, 0.05)

    def test_squared_residuals_detect_arch(self):
        z = garch_noise(2000, seed=1)
        results = squared_residual_ljung_box(make_series(z / z.std()), 10)
        self.assertTrue(results[-1].reject_at_5pct)

    @tag('slow')
    def test_size_on_white_noise(self):
        rejections = [
            ljung_box(make_series(np.random.default_rng(seed).standard_normal(5000)), 7)[-1].reject_at_5pct
            for seed in range(500)
        ]
        self.assertAlmostEqual(np.mean(rejections), 0.05, delta=0.03)


class ResidualTests(SimpleTestCase):
    def test_arch_lm_constant_squares(self):
        e = np.tile([1.0, -1.0], 50)
        result = arch_lm(make_series(e), lags=7)
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.p_value, 1.0)

    def test_arch_lm_effective_sample(self):
        e = np.random.default_rng(1).standard_normal(300)
        result = arch_lm(make_series(e), lags=7)
        self.assertEqual(result.details['n_eff'], 293)
        self.assertAlmostEqual(result.statistic, 293 * result.details['r_squared'])

    def test_arch_lm_insufficient(self):
        with self.assertRaises(InsufficientData):
            arch_lm(make_series(np.random.default_rng(0).standard_normal(17)), lags=7)

    def test_durbin_watson_alternating(self):
        e = np.tile([1.0, -1.0], 500)
        self.assertAlmostEqual(durbin_watson(make_series(e)).statistic, 4.0, delta=0.01)

    def test_durbin_watson_white_noise(self):
        e = np.random.default_rng(2).standard_normal(10000)
        result = durbin_watson(make_series(e))
        self.assertAlmostEqual(result.statistic, 2.0, delta=0.05)
        self.assertIsNone(result.p_value)
        self.assertFalse(result.reject_at_5pct)

    def test_durbin_watson_tracks_first_autocorrelation(self):
        e = lfilter([1.0], [1.0, -0.4], np.random.default_rng(3).standard_normal(5000))
        rho = np.corrcoef(e[:-1], e[1:])[0, 1]
        self.assertAlmostEqual(durbin_watson(make_series(e)).statistic, 2 * (1 - rho), delta=0.01)

    def test_durbin_watson_degenerate(self):
        with self.assertRaises(DegenerateResiduals):
            durbin_watson(make_series(np.zeros(10)))

    @tag('slow')
    def test_arch_lm_size_and_power(self):
        size = [
            arch_lm(make_series(np.random.default_rng(seed).standard_normal(2000)), lags=7).reject_at_5pct
            for seed in range(200)
        ]
        power = [arch_lm(make_series(garch_noise(2000, seed)), lags=7).reject_at_5pct for seed in range(50)]
        self.assertAlmostEqual(np.mean(size), 0.05, delta=0.03)
        self.assertGreater(np.mean(power), 0.9)

    @tag('slow')
    def test_jarque_bera_size(self):
        rejections = [
            jarque_bera(make_series(np.random.default_rng(seed).standard_normal(2000))).reject_at_5pct
            for seed in range(200)
        ]
        self.assertAlmostEqual(np.mean(rejections), 0.05, delta=0.03)


class PreEstimationReportTests(SimpleTestCase):
    def test_bundle(self):
        x = 4.0 + lfilter([1.0], [1.0, -0.8], 0.1 * np.random.default_rng(4).standard_normal(600))
        report = pre_estimation_report(make_series(x, "log_smp"))
        self.assertEqual(report.series, "log_smp")
        self.assertEqual(len(report.adf), 8)
        self.assertEqual(len(report.ljung_box), 7)
        self.assertEqual(len(report.correlogram), 7)
        self.assertEqual(report.arch_lm.lags, 7)
        self.assertEqual(report.pp.details['trend'], "constant_trend")

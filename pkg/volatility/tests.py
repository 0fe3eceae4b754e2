from django.test import SimpleTestCase
import pandas as pd
import numpy as np

from gridvol.exceptions import AlignmentError, DomainError, InsufficientData
from volatility.utilities.persistence import (
    egarch_persistence_summary, half_life_whole_days, persistence_summary, persistence_table,
)
from volatility.utilities.rolling import annualize, rolling_volatility, volatility_by_year
from volatility.utilities.ewma import effective_window, ewma_correlation, ewma_filter, ewma_variance
from garch.models import InnovationDist, ParamVector, VarianceSpec
from garch.utilities.recursions import variance_path
from timeseries.models import TimeSeries


def make_series(values, name="r", start="2009-01-01"):
    return TimeSeries(pd.date_range(start, periods=len(values), freq="D"), values, name)


class RollingVolatilityTests(SimpleTestCase):
    def test_annualization(self):
        self.assertAlmostEqual(annualize(0.154, 30), 0.537, delta=0.001)
        self.assertAlmostEqual(annualize(0.291, 30), 1.015, delta=0.001)

    def test_trailing_window(self):
        r = make_series([1.0, 2.0, 4.0, 8.0])
        path = rolling_volatility(r, 3)
        self.assertEqual(len(path), 2)
        self.assertEqual(path.dates[0], pd.Timestamp("2009-01-03"))
        self.assertAlmostEqual(path.sigma[0], np.std([1.0, 2.0, 4.0], ddof=1))
        self.assertAlmostEqual(path.sigma[1], np.std([2.0, 4.0, 8.0], ddof=1))

    def test_annualized_path(self):
        r = make_series(np.random.default_rng(0).standard_normal(100))
        raw = rolling_volatility(r, 30)
        scaled = rolling_volatility(r, 30, annualize_result=True)
        np.testing.assert_allclose(scaled.sigma, raw.sigma * np.sqrt(365 / 30))

    def test_constant_returns(self):
        path = rolling_volatility(make_series(np.full(60, 0.01)), 30)
        np.testing.assert_allclose(path.sigma, 0.0, atol=1e-15)

    def test_window_bounds(self):
        with self.assertRaises(InsufficientData):
            rolling_volatility(make_series(np.ones(10)), 11)
        with self.assertRaises(DomainError):
            rolling_volatility(make_series(np.ones(10)), 1)

    def test_mean_tracks_sigma(self):
        r = make_series(np.random.default_rng(1).normal(0.0, 0.15, 100000))
        path = rolling_volatility(r, 30)
        # small-sample std is biased low by roughly 1/(4(m-1))
        self.assertAlmostEqual(path.sigma.mean() / 0.15, 1.0, delta=0.02)

    def test_by_year(self):
        r = make_series(np.random.default_rng(2).standard_normal(800) * 0.1)
        rows = volatility_by_year(rolling_volatility(r, 30), 30)
        self.assertEqual([row.year for row in rows], [2009, 2010, 2011])
        for row in rows:
            self.assertTrue(row.min <= row.mean <= row.max)
            self.assertAlmostEqual(row.annualized_mean, row.mean * np.sqrt(365 / 30))


class EwmaTests(SimpleTestCase):
    def test_filter_by_hand(self):
        out = ewma_filter(np.array([1.0, 2.0, 3.0, 4.0]), 0.5, 4.0)
        # 4 -> 0.5*1 + 0.5*4 -> 0.5*2 + 0.5*2.5 -> 0.5*3 + 0.5*2.25
        np.testing.assert_allclose(out, [4.0, 2.5, 2.25, 2.625])

    def test_fixed_point(self):
        path = ewma_variance(make_series([0.1, 0.1, 0.1]), 0.94, init="given", v0=0.01)
        np.testing.assert_allclose(path.variance, [0.01, 0.01, 0.01])

    def test_geometric_decay(self):
        path = ewma_variance(make_series(np.zeros(20)), 0.9, init="given", v0=2.0)
        np.testing.assert_allclose(path.variance, 2.0 * 0.9 ** np.arange(20))

    def test_default_init_is_sample_variance(self):
        r = np.random.default_rng(3).standard_normal(50)
        self.assertAlmostEqual(ewma_variance(make_series(r)).variance[0], np.var(r))
        self.assertEqual(ewma_variance(make_series(r), init="first_squared").variance[0], r[0] ** 2)

    def test_integrated_garch_identity(self):
        lam = 0.94
        spec = VarianceSpec("garch", 1, 1)
        params = ParamVector(k=0.0, g=(lam,), a=(1.0 - lam,))
        rng = np.random.default_rng(4)
        worst = 0.0
        for _ in range(1000):
            r = make_series(rng.standard_normal(250) * rng.uniform(0.01, 0.3))
            ewma = ewma_variance(r, lam).variance
            garch = variance_path(params, r, spec, InnovationDist("normal")).variance
            worst = max(worst, np.max(np.abs(ewma - garch)))
        self.assertLess(worst, 1e-12)

    def test_scale_equivariance(self):
        r = np.random.default_rng(5).standard_normal(200)
        base = ewma_variance(make_series(r)).variance
        np.testing.assert_allclose(ewma_variance(make_series(3.0 * r)).variance, 9.0 * base, rtol=1e-12)

    def test_lambda_domain(self):
        with self.assertRaises(DomainError):
            ewma_variance(make_series([0.1, 0.2]), 1.0)
        with self.assertRaises(DomainError):
            ewma_correlation(make_series([0.1, 0.2]), make_series([0.1, 0.2]), 0.0)

    def test_correlation_identities(self):
        x = make_series(np.random.default_rng(6).standard_normal(300), "x")
        np.testing.assert_allclose(ewma_correlation(x, x).values, 1.0)
        np.testing.assert_allclose(ewma_correlation(x, x.with_values(-x.values, "y")).values, -1.0)

    def test_correlation_ignores_levels(self):
        rng = np.random.default_rng(8)
        x = make_series(rng.standard_normal(400), "x")
        y = make_series(0.5 * x.values + rng.standard_normal(400), "y")
        shifted = ewma_correlation(x.with_values(x.values + 50.0), y.with_values(y.values - 20.0))
        np.testing.assert_allclose(shifted.values, ewma_correlation(x, y).values, atol=1e-9)

    def test_independent_series(self):
        rng = np.random.default_rng(7)
        x = make_series(rng.standard_normal(5000), "x")
        y = make_series(rng.standard_normal(5000), "y")
        rho = ewma_correlation(x, y).values
        self.assertTrue(np.all(np.abs(rho) <= 1.0))
        self.assertLess(abs(np.mean(rho)), 0.1)

    def test_zero_variance_is_missing(self):
        x = make_series([0.0, 0.0, 0.0, 1.0], "x")
        y = make_series([0.0, 0.0, 0.0, 2.0], "y")
        rho = ewma_correlation(x, y, 0.5).values
        self.assertFalse(np.isnan(rho[0]))
        x0 = make_series(np.zeros(4), "x")
        self.assertTrue(np.all(np.isnan(ewma_correlation(x0, y, 0.5).values)))

    def test_correlation_alignment(self):
        with self.assertRaises(AlignmentError):
            ewma_correlation(make_series([0.1, 0.2, 0.3]), make_series([0.1, 0.2, 0.3], start="2010-01-01"))

    def test_effective_window(self):
        self.assertEqual(effective_window(0.5, 0.25), 2)
        self.assertEqual(effective_window(0.94, 0.01), 75)
        self.assertEqual(effective_window(0.9, 0.001), 66)


class PersistenceTests(SimpleTestCase):
    def test_fitted_market(self):
        summary = persistence_summary(0.0014, 0.134, 0.787)
        self.assertAlmostEqual(summary.persistence, 0.921)
        self.assertAlmostEqual(summary.unconditional_sigma, 0.133, delta=0.001)
        self.assertAlmostEqual(summary.half_life_days, 8.42, delta=0.01)
        self.assertEqual(half_life_whole_days(summary), 9)

    def test_cross_market_table(self):
        rows = persistence_table([("JP", 0.049, 0.935), ("Spain", 0.18, 0.78), ("Nord Pool", 0.41, 0.59)])
        self.assertAlmostEqual(rows[0].summary.half_life_days, 43.0, delta=0.5)
        self.assertAlmostEqual(rows[1].summary.half_life_days, 17.0, delta=0.5)
        self.assertIsNone(rows[2].summary.half_life_days)
        self.assertIsNone(rows[2].half_life_whole_days)
        self.assertTrue(rows[2].summary.is_integrated)

    def test_explosive_is_undefined(self):
        summary = persistence_summary(0.001, 0.3, 0.8)
        self.assertIsNone(summary.unconditional_sigma)
        self.assertIsNone(summary.unconditional_variance)

    def test_negative_coefficients(self):
        with self.assertRaises(DomainError):
            persistence_summary(0.001, -0.1, 0.8)

    def test_egarch(self):
        summary = egarch_persistence_summary(-0.5, 0.9)
        self.assertAlmostEqual(summary.unconditional_sigma, np.sqrt(np.exp(-5.0)))
        self.assertAlmostEqual(summary.half_life_days, np.log(0.5) / np.log(0.9))
        self.assertIsNone(egarch_persistence_summary(0.0, 1.0).half_life_days)

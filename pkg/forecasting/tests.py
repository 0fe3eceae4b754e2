from django.test import SimpleTestCase
import warnings
import pandas as pd
import numpy as np

from forecasting.utilities.forecasts import forecast_variance, in_sample_forecast, theil_decomposition
from forecasting.utilities.interventions import intervention_impact, is_step_dummy, make_step_dummy
from forecasting.serializers import ForecastReportSerializer, VarianceForecastSerializer
from gridvol.exceptions import DomainError, InterventionOutOfRangeWarning, RangeError
from garch.models import InnovationDist, MeanSpec, ModelSpec, ParamVector, VarianceSpec
from estimation.utilities.fitting import fit
from garch.utilities.simulation import simulate
from estimation.models import FitResult
from timeseries.models import TimeSeries
from volatility.models import VolPath


def make_series(values, name="x"):
    return TimeSeries(pd.date_range("2004-01-01", periods=len(values), freq="D"), values, name)


def stub_fit(residuals, sigma, params, family="garch"):
    variance = VarianceSpec(family, len(params.g), len(params.a))
    spec = ModelSpec(MeanSpec(), variance, InnovationDist("normal"))
    nan = (float('nan'),) * spec.n_params
    return FitResult(
        spec=spec, params=params, std_errors=nan, z_stats=nan, p_values=nan, loglik=0.0,
        aic=0.0, bic=0.0, hq=0.0, r_squared=0.0, adj_r_squared=0.0, dw=2.0,
        residuals=make_series(residuals, "resid"),
        variance=VolPath(make_series(sigma).dates, sigma, {'init': float(np.mean(np.square(sigma)))}),
        converged=True, iterations=0, n_obs=len(residuals),
    )


class InterventionImpactTests(SimpleTestCase):
    def test_known_impacts(self):
        self.assertAlmostEqual(intervention_impact(-0.3641), -30.50, delta=0.05)
        self.assertAlmostEqual(intervention_impact(0.1071), 11.30, delta=0.05)
        self.assertAlmostEqual(intervention_impact(-0.1517), -14.07, delta=0.1)
        self.assertEqual(intervention_impact(0.0), 0.0)

    def test_impact_is_exp_beta_minus_one(self):
        self.assertAlmostEqual(intervention_impact(0.1769), 19.35, delta=0.01)
        self.assertAlmostEqual(intervention_impact(np.log(1.2645)), 26.45, delta=0.01)

    def test_monotone_and_above_linear(self):
        betas = np.linspace(-2, 2, 81)
        impacts = [intervention_impact(b) for b in betas]
        self.assertTrue(np.all(np.diff(impacts) > 0))
        for b in betas[betas >= 0]:
            self.assertGreaterEqual(intervention_impact(b), 100 * b)


class StepDummyTests(SimpleTestCase):
    def setUp(self):
        self.dates = pd.date_range("2009-01-01", "2009-01-05", freq="D")

    def test_switches_on_at_intervention(self):
        dummy = make_step_dummy(self.dates, "2009-01-03", "rmr6")
        self.assertEqual(dummy.values.tolist(), [0, 0, 1, 1, 1])
        self.assertEqual(dummy.name, "rmr6")
        self.assertTrue(is_step_dummy(dummy))

    def test_first_date(self):
        self.assertEqual(make_step_dummy(self.dates, "2009-01-01").values.tolist(), [1] * 5)

    def test_between_sample_dates(self):
        dates = pd.DatetimeIndex(["2009-01-02", "2009-01-05", "2009-01-06"])
        self.assertEqual(make_step_dummy(dates, "2009-01-03").values.tolist(), [0, 1, 1])

    def test_after_last_date(self):
        with self.assertWarns(InterventionOutOfRangeWarning):
            dummy = make_step_dummy(self.dates, "2010-01-01")
        self.assertEqual(dummy.values.tolist(), [0] * 5)

    def test_not_a_step(self):
        self.assertFalse(is_step_dummy(make_series([0.0, 1.0, 0.0])))
        self.assertFalse(is_step_dummy(make_series([0.0, 0.5, 1.0])))


class TheilDecompositionTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.y = rng.normal(4.0, 1.0, 500)
        self.f = 0.8 * self.y + rng.normal(0.5, 0.3, 500)

    def test_perfect_fit(self):
        self.assertEqual(theil_decomposition(self.y, self.y), (0.0, 0.0, 0.0, 1.0))

    def test_constant_offset_is_all_bias(self):
        theil_u, bias, variance, covariance = theil_decomposition(self.y, self.y + 0.7)
        self.assertGreater(theil_u, 0)
        self.assertAlmostEqual(bias, 1.0, places=10)
        self.assertAlmostEqual(variance, 0.0, places=10)

    def test_proportions_sum_to_one(self):
        _, bias, variance, covariance = theil_decomposition(self.y, self.f)
        self.assertAlmostEqual(bias + variance + covariance, 1.0, delta=1e-9)
        for value in (bias, variance, covariance):
            self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(value, 1.0)

    def test_scale_invariance(self):
        np.testing.assert_allclose(theil_decomposition(self.y, self.f),
                                   theil_decomposition(3.5 * self.y, 3.5 * self.f), atol=1e-12)


class InSampleForecastTests(SimpleTestCase):
    def test_zero_residuals(self):
        y = make_series(np.random.default_rng(1).normal(2.0, 1.0, 100))
        report = in_sample_forecast(stub_fit(np.zeros(100), np.ones(100), ParamVector(k=0.1, g=(0.5,), a=(0.1,))), y)
        self.assertEqual(report.theil_u, 0.0)
        np.testing.assert_array_equal(report.fitted.values, y.values)
        self.assertEqual(report.actual_stats.n, 100)

    def test_fitted_armax_model(self):
        spec = ModelSpec(MeanSpec(ar=1), VarianceSpec("garch", 1, 1), InnovationDist("normal"))
        truth = ParamVector(c=1.0, phi=(0.6,), k=0.0014, g=(0.787,), a=(0.134,))
        y = simulate(truth, spec, 2000, seed=7)
        report = in_sample_forecast(fit(y, spec), y)
        self.assertLess(report.theil_u, 0.10)
        self.assertLess(report.bias_proportion, 0.02)
        self.assertEqual(len(report.fitted), 1999)
        data = ForecastReportSerializer(report).data
        self.assertEqual(data["fitted_stats"]["n"], 1999)


class VarianceForecastTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(3)

    def random_fit(self, a, g, k, l=None):
        sigma = np.sqrt(self.rng.uniform(0.01, 0.2, 50))
        e = sigma * self.rng.standard_normal(50)
        family = "garch" if l is None else "gjr"
        params = ParamVector(k=k, g=(g,), a=(a,), l=() if l is None else (l,))
        return stub_fit(e, sigma, params, family)

    def test_geometric_decay(self):
        for _ in range(100):
            a = self.rng.uniform(0.0, 0.3)
            g = self.rng.uniform(0.0, 0.99 - a)
            k = self.rng.uniform(0.001, 0.05)
            result = self.random_fit(a, g, k)
            forecast = forecast_variance(result, result.variance.dates[-1], 100)
            steps = np.arange(100)
            deviation = forecast.path - forecast.unconditional
            np.testing.assert_allclose(deviation, (a + g) ** steps * deviation[0], rtol=0, atol=1e-12)
            self.assertAlmostEqual(forecast.unconditional, k / (1 - a - g), places=12)

    def test_gjr_counts_half_the_leverage(self):
        result = self.random_fit(0.05, 0.8, 0.01, l=0.1)
        forecast = forecast_variance(result, result.variance.dates[-1], 10)
        self.assertAlmostEqual(forecast.path[1], 0.01 + (0.05 + 0.05 + 0.8) * forecast.path[0], places=14)
        self.assertAlmostEqual(forecast.unconditional, 0.01 / 0.1, places=12)

    def test_integrated_forecast_is_flat(self):
        result = self.random_fit(0.25, 0.75, 0.0)
        forecast = forecast_variance(result, result.variance.dates[-1], 50)
        np.testing.assert_allclose(forecast.path, np.full(50, forecast.path[0]), rtol=1e-14)
        self.assertIsNone(forecast.unconditional)

    def test_low_and_high_volatility_origins(self):
        params = ParamVector(k=0.0014, g=(0.787,), a=(0.134,))
        unconditional = 0.0014 / (1 - 0.921)
        low = stub_fit(np.zeros(20), np.full(20, np.sqrt(0.2 * unconditional)), params)
        high = stub_fit(np.zeros(20), np.full(20, np.sqrt(5.0 * unconditional)), params)
        rising = forecast_variance(low, low.variance.dates[-1], 120).path
        falling = forecast_variance(high, high.variance.dates[-1], 120).path
        self.assertTrue(np.all(np.diff(rising) > 0) and np.all(rising < unconditional))
        self.assertTrue(np.all(np.diff(falling) < 0) and np.all(falling > unconditional))
        # half-life of 8.42 steps
        self.assertAlmostEqual(abs(falling[84] - unconditional) / abs(falling[0] - unconditional),
                               0.921 ** 84, places=12)
        self.assertLess(abs(falling[84] - unconditional), 5e-3 * unconditional)

    def test_origin_resolution(self):
        result = self.random_fit(0.1, 0.8, 0.01)
        dates = result.variance.dates
        forecast = forecast_variance(result, dates[10] + pd.Timedelta(hours=12), 3)
        self.assertEqual(forecast.origin, dates[10])
        self.assertEqual(list(forecast.dates), list(pd.date_range(dates[11], periods=3, freq="D")))
        with self.assertRaises(RangeError):
            forecast_variance(result, dates[-1] + pd.Timedelta(days=1), 3)
        with self.assertRaises(RangeError):
            forecast_variance(result, dates[0] - pd.Timedelta(days=1), 3)
        with self.assertRaises(DomainError):
            forecast_variance(result, dates[-1], 0)

    def test_report_rendering(self):
        result = self.random_fit(0.1, 0.8, 0.01)
        data = VarianceForecastSerializer(forecast_variance(result, "2004-02-19", 5)).data
        self.assertEqual(data["origin"], "2004-02-19")
        self.assertEqual(data["dates"][0], "2004-02-20")
        self.assertEqual(len(data["path"]), 5)
        self.assertEqual(data["method"], "closed_form")


class EgarchForecastTests(SimpleTestCase):
    def egarch_fit(self, a, l):
        sigma = np.full(30, 0.1)
        e = sigma * np.random.default_rng(4).standard_normal(30)
        params = ParamVector(k=-0.5, g=(0.9,), a=(a,), l=(l,))
        return stub_fit(e, sigma, params, "egarch")

    def test_without_news_the_log_recursion_is_deterministic(self):
        result = self.egarch_fit(0.0, 0.0)
        forecast = forecast_variance(result, result.variance.dates[-1], 20, paths=50, seed=1)
        log_h, expected = np.log(0.01), []
        for _ in range(20):
            log_h = -0.5 + 0.9 * log_h
            expected.append(np.exp(log_h))
        np.testing.assert_allclose(forecast.path, expected, rtol=1e-12)
        self.assertEqual(forecast.method, "monte_carlo")
        self.assertAlmostEqual(forecast.unconditional, np.exp(-0.5 / 0.1), places=12)

    def test_first_step_uses_observed_shock(self):
        result = self.egarch_fit(0.2, -0.1)
        z = result.residuals.values[-1] / 0.1
        forecast = forecast_variance(result, result.variance.dates[-1], 5, paths=200, seed=2)
        log_h = -0.5 + 0.9 * np.log(0.01) + 0.2 * (abs(z) - np.sqrt(2 / np.pi)) - 0.1 * z
        self.assertAlmostEqual(forecast.path[0], np.exp(log_h), places=12)

    def test_seeded(self):
        result = self.egarch_fit(0.2, -0.1)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            first = forecast_variance(result, result.variance.dates[-1], 30, paths=500, seed=9)
        again = forecast_variance(result, result.variance.dates[-1], 30, paths=500, seed=9)
        np.testing.assert_array_equal(first.path, again.path)
        self.assertTrue(np.all(first.path > 0))

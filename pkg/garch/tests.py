from django.test import SimpleTestCase, tag
from scipy import integrate, stats
import pandas as pd
import numpy as np

from gridvol.exceptions import AlignmentError, DomainError, SpecMismatch, VarianceNonPositive
from garch.models import InnovationDist, MeanSpec, ModelSpec, ParamVector, VarianceSpec
from garch.utilities.recursions import expected_abs_z, mean_residuals, persistence, variance_path
from garch.utilities.simulation import simulate, simulate_paths
from garch.utilities.likelihood import log_likelihood
from timeseries.utilities.statistics import moment_shape
from timeseries.models import TimeSeries


NORMAL = InnovationDist("normal")
GARCH11 = VarianceSpec("garch", 1, 1)


def make_series(values, name="x"):
    return TimeSeries(pd.date_range("2004-01-01", periods=len(values), freq="D"), values, name)


def garch_spec(mean=None, variance=GARCH11, dist=NORMAL):
    return ModelSpec(mean or MeanSpec(), variance, dist)


class ParamVectorTests(SimpleTestCase):
    def test_names_and_array_order(self):
        load = make_series(np.ones(10), "load")
        rmr = make_series(np.ones(10), "rmr1")
        spec = ModelSpec(
            MeanSpec(ar=2, ma=1, regressors=(load,)),
            VarianceSpec("gjr", 1, 1, regressors=(rmr,)),
            InnovationDist("student_t", 8),
        )
        params = ParamVector(c=0.1, phi=(0.5, 0.2), theta=(-0.3,), beta=(0.7,), k=0.001,
                             g=(0.8,), a=(0.1,), l=(0.05,), gamma=(0.002,), nu=7.0)
        self.assertEqual(spec.param_names(), ["c", "phi1", "phi2", "theta1", "beta_load", "k", "g1",
                                              "a1", "l1", "gamma_rmr1", "nu"])
        values = params.to_array(spec)
        self.assertEqual(len(values), spec.n_params)
        self.assertEqual(ParamVector.from_array(values, spec), params)
        self.assertEqual(params.as_dict(spec)["beta_load"], 0.7)

    def test_dimension_mismatch(self):
        with self.assertRaises(SpecMismatch):
            ParamVector(k=0.1, g=(0.8,), a=(0.1,)).check(garch_spec(variance=VarianceSpec("garch", 2, 1)))
        with self.assertRaises(SpecMismatch):
            ParamVector.from_array([0.0, 0.1], garch_spec())

    def test_spec_validation(self):
        with self.assertRaises(DomainError):
            VarianceSpec("garch", 0, 1)
        with self.assertRaises(DomainError):
            InnovationDist("student_t", 2.0)
        with self.assertRaises(DomainError):
            VarianceSpec("figarch", 1, 1)


class MeanResidualTests(SimpleTestCase):
    def test_constant_mean_baseline(self):
        y = make_series(np.random.default_rng(0).normal(4.0, 0.3, 100))
        eps = mean_residuals(ParamVector(c=y.values.mean()), y, MeanSpec())
        np.testing.assert_allclose(eps.values, y.values - y.values.mean())

    def test_unit_root_on_constant_series(self):
        eps = mean_residuals(ParamVector(c=0.0, phi=(1.0,)), make_series(np.full(20, 3.0)),
                             MeanSpec(ar=1))
        np.testing.assert_array_equal(eps.values, np.zeros(20))

    def test_mismatch(self):
        with self.assertRaises(SpecMismatch):
            mean_residuals(ParamVector(phi=(0.5,)), make_series(np.ones(10)), MeanSpec(ar=2))

    def test_regressor_must_cover_dates(self):
        y = make_series(np.ones(10))
        short = make_series(np.ones(5), "load")
        with self.assertRaises(AlignmentError):
            mean_residuals(ParamVector(beta=(1.0,)), y, MeanSpec(regressors=(short,)))

    def test_simulation_round_trip(self):
        dates = pd.date_range("2004-01-01", periods=800, freq="D")
        load = TimeSeries(dates, np.sin(np.arange(800) / 30.0), "load")
        spec = ModelSpec(MeanSpec(ar=2, ma=1, regressors=(load,)), GARCH11, NORMAL)
        params = ParamVector(c=0.5, phi=(0.6, 0.2), theta=(0.3,), beta=(0.4,), k=0.0014,
                             g=(0.787,), a=(0.134,))
        paths = simulate_paths(params, spec, 800, seed=3)
        eps = mean_residuals(params, paths.y, spec.mean)
        np.testing.assert_allclose(eps.values[2:], paths.eps.values[2:], atol=1e-10)
        np.testing.assert_array_equal(eps.values[:2], [0.0, 0.0])

        # re-applying the mean recursion rebuilds y
        y = paths.y.values
        rebuilt = (0.5 + 0.6 * y[1:-1] + 0.2 * y[:-2] + 0.3 * eps.values[1:-1]
                   + 0.4 * load.values[2:] + eps.values[2:])
        np.testing.assert_allclose(rebuilt, y[2:], rtol=1e-12, atol=1e-12)


class VariancePathTests(SimpleTestCase):
    def test_zero_shocks_converge_to_fixed_point(self):
        params = ParamVector(k=0.0014, g=(0.787,), a=(0.134,))
        path = variance_path(params, make_series(np.zeros(300)), GARCH11, NORMAL, init=0.0177)
        self.assertEqual(path.variance[0], 0.0177)
        self.assertAlmostEqual(path.variance[-1], 0.0014 / (1 - 0.787), places=12)
        gaps = np.abs(path.variance[2:50] - 0.0014 / (1 - 0.787))
        self.assertTrue(np.all(np.diff(gaps) < 0))

    def test_gjr_without_leverage_is_garch(self):
        e = make_series(np.random.default_rng(1).standard_normal(500) * 0.1)
        garch = variance_path(ParamVector(k=0.001, g=(0.8,), a=(0.1,)), e, GARCH11, NORMAL)
        gjr = variance_path(ParamVector(k=0.001, g=(0.8,), a=(0.1,), l=(0.0,)), e,
                            VarianceSpec("gjr", 1, 1), NORMAL)
        self.assertEqual(np.max(np.abs(garch.sigma - gjr.sigma)), 0.0)

    def test_gjr_bad_news_premium(self):
        params = ParamVector(k=0.001, g=(0.8,), a=(0.1,), l=(0.07,))
        good = np.random.default_rng(2).standard_normal(50) * 0.1
        good[-2] = abs(good[-2])
        bad = good.copy()
        bad[-2] = -good[-2]
        spec = VarianceSpec("gjr", 1, 1)
        h_good = variance_path(params, make_series(good), spec, NORMAL, init=0.01).variance
        h_bad = variance_path(params, make_series(bad), spec, NORMAL, init=0.01).variance
        self.assertAlmostEqual(h_bad[-1] - h_good[-1], 0.07 * good[-2] ** 2, places=15)

    def test_egarch_symmetric_without_leverage(self):
        params = ParamVector(k=-0.2, g=(0.95,), a=(0.2,), l=(0.0,))
        e = np.random.default_rng(3).standard_normal(300) * 0.05
        spec = VarianceSpec("egarch", 1, 1)
        plus = variance_path(params, make_series(e), spec, NORMAL).sigma
        minus = variance_path(params, make_series(-e), spec, NORMAL).sigma
        np.testing.assert_allclose(plus, minus, rtol=1e-13)

    def test_strictly_positive(self):
        e = make_series(np.random.default_rng(4).standard_normal(1000))
        path = variance_path(ParamVector(k=1e-6, g=(0.9,), a=(0.05,)), e, GARCH11, NORMAL)
        self.assertTrue(np.all(path.sigma > 0))

    def test_negative_variance_regressor(self):
        dummy = make_series(np.r_[np.zeros(50), np.ones(50)], "rmr")
        spec = VarianceSpec("garch", 1, 1, regressors=(dummy,))
        params = ParamVector(k=0.001, g=(0.5,), a=(0.1,), gamma=(-1.0,))
        e = make_series(np.random.default_rng(5).standard_normal(100) * 0.05)
        with self.assertRaises(VarianceNonPositive):
            variance_path(params, e, spec, NORMAL)

    def test_constraint_violation(self):
        with self.assertRaises(DomainError):
            variance_path(ParamVector(k=0.001, g=(0.8,), a=(-0.1,)), make_series(np.ones(10)),
                          GARCH11, NORMAL)

    def test_expected_abs_z(self):
        self.assertAlmostEqual(expected_abs_z(NORMAL), 0.7978845608, places=9)
        nu = 6.0
        scale = np.sqrt((nu - 2) / nu)
        numeric, _ = integrate.quad(lambda x: abs(x * scale) * stats.t.pdf(x, nu), -np.inf, np.inf)
        self.assertAlmostEqual(expected_abs_z(InnovationDist("student_t", nu)), numeric, places=7)
        self.assertAlmostEqual(expected_abs_z(InnovationDist("student_t", 1e5)), np.sqrt(2 / np.pi), places=4)

    def test_persistence_by_family(self):
        params = ParamVector(k=0.001, g=(0.8,), a=(0.1,), l=(0.06,))
        self.assertAlmostEqual(persistence(ParamVector(k=0.001, g=(0.787,), a=(0.134,)), GARCH11), 0.921)
        self.assertAlmostEqual(persistence(params, VarianceSpec("gjr", 1, 1)), 0.93)
        self.assertAlmostEqual(persistence(params, VarianceSpec("egarch", 1, 1)), 0.8)


class LogLikelihoodTests(SimpleTestCase):
    def setUp(self):
        self.flat = ModelSpec(MeanSpec(include_constant=False), GARCH11, NORMAL)
        self.unit = ParamVector(k=1.0, g=(0.0,), a=(0.0,))

    def test_standard_normal_expectation(self):
        y = make_series(np.random.default_rng(6).standard_normal(1000))
        value = log_likelihood(self.unit, y, self.flat, init=1.0)
        self.assertAlmostEqual(value / 1000, -0.5 * (np.log(2 * np.pi) + 1), delta=0.05)

    def test_student_t_limit(self):
        y = make_series(np.random.default_rng(7).standard_normal(100))
        spec = ModelSpec(MeanSpec(include_constant=False), GARCH11, InnovationDist("student_t", 8))
        params = ParamVector(k=1.0, g=(0.0,), a=(0.0,), nu=1e6)
        normal = log_likelihood(self.unit, y, self.flat, init=1.0)
        student = log_likelihood(params, y, spec, init=1.0)
        self.assertLess(abs(normal - student), 1e-3)

    def test_scale_identity(self):
        e = np.random.default_rng(8).standard_normal(400) * 0.1
        params = ParamVector(k=0.001, g=(0.8,), a=(0.1,))
        doubled = ParamVector(k=0.002, g=(0.8,), a=(0.1,))
        base = log_likelihood(params, make_series(e), self.flat)
        scaled = log_likelihood(doubled, make_series(np.sqrt(2) * e), self.flat)
        self.assertAlmostEqual(scaled - base, -200 * np.log(2), places=8)

    def test_conditioning_sample_excluded(self):
        y = make_series(np.random.default_rng(9).standard_normal(300))
        spec = ModelSpec(MeanSpec(ar=3), GARCH11, NORMAL)
        params = ParamVector(c=0.0, phi=(0.0, 0.0, 0.0), k=1.0, g=(0.0,), a=(0.0,))
        value = log_likelihood(params, y, spec, init=1.0)
        expected = np.sum(stats.norm.logpdf(y.values[3:]))
        self.assertAlmostEqual(value, expected, places=9)

    @tag('slow')
    def test_peaks_near_generating_parameters(self):
        truth = ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134,))
        spec = garch_spec()
        wins = 0
        for seed in range(50):
            y = simulate(truth, spec, 5000, seed=seed)
            best = log_likelihood(truth, y, spec)
            perturbed = [
                ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134 + 0.1,)),
                ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134 - 0.1,)),
                ParamVector(c=0.0, k=0.0014, g=(0.787 + 0.1,), a=(0.134,)),
                ParamVector(c=0.0, k=0.0014, g=(0.787 - 0.1,), a=(0.134,)),
            ]
            wins += all(best > log_likelihood(p, y, spec) for p in perturbed)
        self.assertGreaterEqual(wins, 48)


class SimulationTests(SimpleTestCase):
    def test_deterministic_given_seed(self):
        params = ParamVector(c=0.1, k=0.0014, g=(0.787,), a=(0.134,), nu=8.0)
        spec = garch_spec(dist=InnovationDist("student_t", 8))
        np.testing.assert_array_equal(simulate(params, spec, 300, seed=5).values,
                                      simulate(params, spec, 300, seed=5).values)

    def test_constant_variance_collapse(self):
        params = ParamVector(c=2.0, k=0.04, g=(0.0,), a=(0.0,))
        y = simulate(params, garch_spec(), 100000, seed=6, burn=0)
        self.assertAlmostEqual(np.var(y.values) / 0.04, 1.0, delta=0.03)
        self.assertAlmostEqual(y.values.mean(), 2.0, delta=0.01)

    def test_conditional_heteroskedasticity_fattens_tails(self):
        params = ParamVector(k=0.0014, g=(0.787,), a=(0.134,))
        paths = simulate_paths(params, garch_spec(), 20000, seed=7)
        _, kurtosis = moment_shape(paths.eps.values)
        self.assertGreater(kurtosis, 3.0)

    def test_standardized_draws(self):
        params = ParamVector(k=0.0014, g=(0.787,), a=(0.134,), l=(0.05,))
        paths = simulate_paths(params, garch_spec(variance=VarianceSpec("gjr", 1, 1)), 1000, seed=8)
        np.testing.assert_allclose(paths.eps.values, np.sqrt(paths.sigma2.values) * paths.z.values)

    def test_egarch_simulation(self):
        params = ParamVector(k=-0.5, g=(0.9,), a=(0.2,), l=(-0.05,))
        paths = simulate_paths(params, garch_spec(variance=VarianceSpec("egarch", 1, 1)), 2000, seed=9)
        self.assertTrue(np.all(paths.sigma2.values > 0))
        self.assertAlmostEqual(np.median(np.log(paths.sigma2.values)), -5.0, delta=1.0)

    def test_too_short(self):
        with self.assertRaises(SpecMismatch):
            simulate(ParamVector(phi=(0.5, 0.1), k=0.1, g=(0.5,), a=(0.1,)),
                     garch_spec(mean=MeanSpec(ar=2)), 2, seed=0)

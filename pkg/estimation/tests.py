from django.test import SimpleTestCase, tag
from scipy import stats
import warnings
import pandas as pd
import numpy as np

from gridvol.exceptions import ConstantSeries, DomainError, InsufficientData, VarianceNonPositive, ConvergenceWarning
from estimation.utilities.criteria import goodness_of_fit_values, information_criteria, standardized_residuals
from estimation.utilities.tables import coefficient_table, fit_persistence, intervention_table, leverage_table
from estimation.utilities.reparameterization import positive_mask, to_natural, to_unconstrained
from estimation.serializers import CandidateSerializer, ComparisonRowSerializer, FitResultSerializer
from estimation.utilities.fitting import fit, starting_values
from estimation.utilities.comparison import compare, rank_rows
from garch.models import InnovationDist, MeanSpec, ModelSpec, ParamVector, VarianceSpec
from forecasting.utilities.interventions import make_step_dummy
from diagnostics.utilities.portmanteau import correlogram
from diagnostics.utilities.residuals import arch_lm
from estimation.models import ComparisonRow, FitOptions, FitResult
from garch.utilities.simulation import simulate
from timeseries.models import TimeSeries
from volatility.models import VolPath


NORMAL = InnovationDist("normal")
GARCH11 = VarianceSpec("garch", 1, 1)
TRUTH = ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134,))


def make_series(values, name="x"):
    return TimeSeries(pd.date_range("2004-01-01", periods=len(values), freq="D"), values, name)


def garch_spec(mean=None, variance=GARCH11, dist=NORMAL):
    return ModelSpec(mean or MeanSpec(), variance, dist)


def stub_fit(residuals, sigma, spec=None, params=None):
    spec = spec or garch_spec()
    params = params or ParamVector(c=0.0, k=0.1, g=(0.5,), a=(0.1,))
    n = len(residuals)
    nan = (float('nan'),) * spec.n_params
    return FitResult(
        spec=spec, params=params, std_errors=nan, z_stats=nan, p_values=nan, loglik=0.0,
        aic=0.0, bic=0.0, hq=0.0, r_squared=0.0, adj_r_squared=0.0, dw=2.0,
        residuals=make_series(residuals, "resid"), variance=VolPath(make_series(sigma).dates, sigma),
        converged=True, iterations=0, n_obs=n,
    )


class InformationCriteriaTests(SimpleTestCase):
    def test_large_model_criteria(self):
        aic, bic, hq = information_criteria(2873.546, 44, 2870)
        self.assertAlmostEqual(aic, -1.97181, places=5)
        self.assertAlmostEqual(bic, -1.88040, delta=5e-3)
        self.assertAlmostEqual(hq, -1.93886, places=4)

    def test_hannan_quinn_closed_form(self):
        _, _, hq = information_criteria(0.0, 1, np.e ** 2)
        self.assertAlmostEqual(hq, 2.0 * np.log(2.0) / np.e ** 2, places=12)

    def test_aic_below_bic_for_long_samples(self):
        for k in (1, 5, 20):
            aic, bic, _ = information_criteria(-150.0, k, 1000)
            self.assertLessEqual(aic, bic)

    def test_smaller_spec_wins_on_equal_loglik(self):
        self.assertLess(information_criteria(100.0, 4, 500)[0], information_criteria(100.0, 5, 500)[0])

    def test_domain(self):
        with self.assertRaises(DomainError):
            information_criteria(1.0, 0, 100)
        with self.assertRaises(DomainError):
            information_criteria(1.0, 10, 10)


class GoodnessOfFitTests(SimpleTestCase):
    def setUp(self):
        self.y = make_series(np.random.default_rng(0).normal(5.0, 1.0, 200))

    def test_perfect_fit(self):
        r2, _, dw = goodness_of_fit_values(self.y, self.y.with_values(np.zeros(200)), 1)
        self.assertEqual(r2, 1.0)
        self.assertTrue(np.isnan(dw))

    def test_mean_only_model(self):
        e = self.y.with_values(self.y.values - self.y.values.mean())
        r2, adj, dw = goodness_of_fit_values(self.y, e, 1)
        self.assertAlmostEqual(r2, 0.0, places=12)
        self.assertAlmostEqual(adj, 0.0, places=12)
        self.assertGreater(dw, 1.5)

    def test_constant_series(self):
        y = make_series(np.full(50, 2.0))
        with self.assertRaises(ConstantSeries):
            goodness_of_fit_values(y, y.with_values(np.zeros(50)), 1)


class StandardizedResidualTests(SimpleTestCase):
    def test_residuals_equal_to_sigma(self):
        e = np.abs(np.random.default_rng(1).normal(size=50)) + 0.1
        z = standardized_residuals(stub_fit(e, e))
        np.testing.assert_allclose(z.values, np.ones(50))

    def test_zero_sigma(self):
        sigma = np.ones(50)
        sigma[10] = 0.0
        with self.assertRaises(VarianceNonPositive):
            standardized_residuals(stub_fit(np.ones(50), sigma))


class ReparameterizationTests(SimpleTestCase):
    def setUp(self):
        self.spec = garch_spec(MeanSpec(ar=1), VarianceSpec("gjr", 1, 1), InnovationDist("student_t", 8))

    def test_round_trip(self):
        theta = np.array([0.1, 0.5, 0.002, 0.85, 0.05, 0.04, 7.0])
        np.testing.assert_allclose(to_natural(to_unconstrained(theta, self.spec), self.spec), theta)

    def test_every_point_is_feasible(self):
        rng = np.random.default_rng(2)
        names = self.spec.param_names()
        for _ in range(200):
            theta = dict(zip(names, to_natural(rng.normal(0.0, 5.0, self.spec.n_params), self.spec)))
            self.assertGreater(theta["k"], 0)
            self.assertGreater(theta["g1"], 0)
            self.assertGreater(theta["a1"], 0)
            self.assertGreater(theta["a1"] + theta["l1"], 0)
            self.assertGreater(theta["nu"], 2)

    def test_positive_mask(self):
        self.assertEqual(positive_mask(self.spec).tolist(), [False, False, True, True, True, False, True])
        egarch = garch_spec(variance=VarianceSpec("egarch", 1, 1))
        self.assertEqual(positive_mask(egarch).tolist(), [False] * 5)


class StartingValueTests(SimpleTestCase):
    def test_ols_warm_start(self):
        spec = garch_spec(MeanSpec(ar=1), dist=InnovationDist("student_t"))
        y = simulate(ParamVector(c=1.0, phi=(0.6,), k=0.01, g=(0.5,), a=(0.1,), nu=8.0), spec, 4000, seed=3)
        start = starting_values(y, spec)
        self.assertAlmostEqual(start.phi[0], 0.6, delta=0.05)
        self.assertAlmostEqual(start.c / (1 - start.phi[0]), 2.5, delta=0.1)
        self.assertEqual((start.g, start.a, start.nu), ((0.8,), (0.1,), 8.0))
        self.assertAlmostEqual(start.k, 0.1 * np.var(y.values[1:] - start.c - start.phi[0] * y.values[:-1]), places=10)


class FitTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.spec = garch_spec()
        cls.y = simulate(TRUTH, cls.spec, 3000, seed=11)
        cls.result = fit(cls.y, cls.spec)

    def test_converges_near_truth(self):
        result = self.result
        self.assertTrue(result.converged)
        self.assertEqual(result.n_obs, 3000)
        self.assertAlmostEqual(result.params.a[0], 0.134, delta=0.08)
        self.assertAlmostEqual(result.params.g[0], 0.787, delta=0.1)
        self.assertGreaterEqual(result.loglik, result.start_loglik - 1e-6)

    def test_z_statistics(self):
        for coef, se, z in zip(self.result.coefficients, self.result.std_errors, self.result.z_stats):
            if np.isfinite(se):
                self.assertAlmostEqual(z, coef / se, places=10)
        self.assertTrue(all(self.result.se_available))

    def test_refit_from_optimum(self):
        again = fit(self.y, self.spec, start=self.result.params)
        np.testing.assert_allclose(again.coefficients, self.result.coefficients, rtol=1e-4, atol=1e-6)
        self.assertGreaterEqual(again.loglik, self.result.loglik - 1e-6)

    def test_standardized_residuals_have_unit_variance(self):
        z = standardized_residuals(self.result)
        self.assertAlmostEqual(np.var(z.values), 1.0, delta=0.05)

    def test_tables(self):
        table = coefficient_table(self.result)
        self.assertEqual([row.name for row in table], ["c", "k", "g1", "a1"])
        self.assertEqual(leverage_table(self.result), [])
        self.assertEqual(intervention_table(self.result), [])
        summary = fit_persistence(self.result)
        self.assertAlmostEqual(summary.persistence, self.result.params.a[0] + self.result.params.g[0])

    def test_report_rendering(self):
        data = FitResultSerializer(self.result).data
        self.assertEqual(data["spec"]["family"], "garch")
        self.assertEqual(len(data["coefficients"]), 4)
        self.assertEqual(len(data["conditional_sigma"]["values"]), 3000)
        self.assertIsNone(data["sign_convention"])

    def test_seeded_restarts(self):
        options = FitOptions(seed=3, restarts=2)
        restarted = fit(self.y, self.spec, options)
        self.assertGreaterEqual(restarted.loglik, self.result.loglik - 1e-6)
        np.testing.assert_array_equal(fit(self.y, self.spec, options).coefficients, restarted.coefficients)

    def test_budget_exhaustion_is_reported(self):
        with self.assertWarns(ConvergenceWarning):
            result = fit(self.y, self.spec, FitOptions(max_iterations=1))
        self.assertFalse(result.converged)
        self.assertGreaterEqual(result.loglik, result.start_loglik - 1e-6)

    def test_insufficient_data(self):
        with self.assertRaises(InsufficientData):
            fit(self.y[:39], self.spec)


class InterventionFitTests(SimpleTestCase):
    def test_step_dummy_impact(self):
        dates = pd.date_range("2004-01-01", periods=2000, freq="D")
        dummy = make_step_dummy(dates, "2006-06-01", "reform")
        spec = garch_spec(MeanSpec(regressors=(dummy,)))
        truth = ParamVector(c=4.0, beta=(-0.3,), k=0.0014, g=(0.787,), a=(0.134,))
        result = fit(simulate(truth, spec, 2000, seed=12), spec)
        (row,) = intervention_table(result)
        self.assertEqual(row.label, "reform")
        self.assertAlmostEqual(row.impact_pct, 100 * np.expm1(row.beta), places=10)
        self.assertAlmostEqual(row.beta, -0.3, delta=0.05)
        self.assertTrue(row.significant)


class ComparisonTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.y = simulate(TRUTH, garch_spec(), 1500, seed=21)

    def test_duplicates_tie_on_input_order(self):
        table = compare(self.y, [garch_spec(), garch_spec()])
        self.assertEqual([row.index for row in table], [0, 1])
        self.assertEqual([row.rank for row in table], [1, 2])
        self.assertEqual(table[0].aic, table[1].aic)
        self.assertIn(table[0].serial_correlation, ("yes", "no"))

    def test_failed_candidate_is_kept_unranked(self):
        too_big = garch_spec(MeanSpec(ar=100, ma=100))
        table = compare(self.y, [too_big, garch_spec()])
        self.assertEqual(table[0].index, 1)
        self.assertEqual(table[0].rank, 1)
        self.assertIsNone(table[1].rank)
        self.assertIn("parameters", table[1].error)

    def test_celery_backend_matches_local(self):
        specs = [garch_spec(), garch_spec(MeanSpec(ar=1))]
        local = compare(self.y, specs)
        remote = compare(self.y, specs, backend="celery")
        self.assertEqual(ComparisonRowSerializer(local, many=True).data,
                         ComparisonRowSerializer(remote, many=True).data)

    def test_needs_two_specs(self):
        with self.assertRaises(DomainError):
            compare(self.y, [garch_spec()])
        with self.assertRaises(DomainError):
            compare(self.y, [garch_spec(), garch_spec()], backend="spark")


class RankingTests(SimpleTestCase):
    def test_aic_then_bic_then_size(self):
        rows = [
            ComparisonRow(0, "big", 6, True, aic=-2.0, bic=-1.9),
            ComparisonRow(1, "small", 4, True, aic=-2.0, bic=-1.9),
            ComparisonRow(2, "best", 5, True, aic=-2.1, bic=-1.8),
            ComparisonRow(3, "stuck", 4, False, aic=-3.0, bic=-3.0),
        ]
        table = rank_rows(rows)
        self.assertEqual([row.label for row in table], ["best", "small", "big", "stuck"])
        self.assertEqual([row.rank for row in table], [1, 2, 3, None])


class PayloadTests(SimpleTestCase):
    def test_candidate_payload(self):
        load = make_series(np.linspace(1, 2, 30), "load")
        spec = ModelSpec(MeanSpec(ar=1, regressors=(load,)), VarianceSpec("egarch", 1, 2, regressors=(load,)),
                         InnovationDist("student_t", 6.0))
        payload = CandidateSerializer({'index': 3, 'y': make_series(np.arange(30.0)), 'spec': spec,
                                       'options': FitOptions(seed=4), 'arch_lags': 5}).data
        serializer = CandidateSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        candidate = serializer.save()
        self.assertEqual(candidate['spec'].label, spec.label)
        self.assertEqual(candidate['spec'].param_names(), spec.param_names())
        np.testing.assert_array_equal(candidate['spec'].variance.regressors[0].values, load.values)
        self.assertEqual(candidate['options'], FitOptions(seed=4))
        self.assertEqual(candidate['arch_lags'], 5)


@tag('slow')
class MonteCarloFitTests(SimpleTestCase):
    def test_parameter_recovery_and_whitening(self):
        spec = garch_spec(dist=InnovationDist("student_t"))
        truth = ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134,), nu=8.0)
        a_err, g_err, in_band, white, arch_ok = [], [], 0, 0, 0
        for seed in range(20):
            result = fit(simulate(truth, spec, 5000, seed=100 + seed), spec)
            a_err.append(abs(result.params.a[0] - 0.134))
            g_err.append(abs(result.params.g[0] - 0.787))
            in_band += 0.85 <= fit_persistence(result).persistence <= 0.97
            z = standardized_residuals(result)
            rows = correlogram(z.with_values(z.values ** 2), 20)
            white += np.mean([abs(row.acf) < 2 / np.sqrt(len(z)) for row in rows]) >= 0.9
            arch_ok += not arch_lm(z, 7).reject_at_5pct
        self.assertLess(np.mean(a_err), 0.05)
        self.assertLess(np.mean(g_err), 0.05)
        self.assertGreaterEqual(in_band, 18)
        self.assertGreaterEqual(white, 16)
        self.assertGreaterEqual(arch_ok, 16)

    def test_constant_variance_shows_no_volatility_clustering(self):
        quiet, a_hat = 0, []
        for seed in range(20):
            y = make_series(0.1 * np.random.default_rng(600 + seed).standard_normal(2000))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConvergenceWarning)
                result = fit(y, garch_spec())
            # likelihood ratio against iid normal with the sample mean and variance
            e = y.values - y.values.mean()
            constant = -0.5 * result.n_obs * (np.log(2.0 * np.pi * np.mean(e ** 2)) + 1.0)
            quiet += 2.0 * (result.loglik - constant) < stats.chi2.ppf(0.95, 2)
            a_hat.append(result.params.a[0])
        self.assertGreaterEqual(quiet, 17)
        self.assertLess(np.median(a_hat), 0.05)

    def test_standard_errors_shrink(self):
        spec = garch_spec()
        ratios = []
        for seed in range(20):
            short = fit(simulate(TRUTH, spec, 2500, seed=200 + seed), spec)
            long = fit(simulate(TRUTH, spec, 5000, seed=300 + seed), spec)
            ratios.append((long.std_errors[3], short.std_errors[3]))
        ratios = np.array(ratios)
        self.assertAlmostEqual(np.nanmean(ratios[:, 0]) / np.nanmean(ratios[:, 1]), 0.71, delta=0.15)

    def test_leverage_is_insignificant_on_symmetric_data(self):
        gjr = garch_spec(variance=VarianceSpec("gjr", 1, 1))
        quiet = 0
        for seed in range(20):
            result = fit(simulate(TRUTH, garch_spec(), 3000, seed=400 + seed), gjr)
            (row,) = leverage_table(result)
            quiet += np.isfinite(row.z_stat) and abs(row.z_stat) < 1.96
        self.assertGreaterEqual(quiet, 17)

    def test_compare_prefers_generating_family(self):
        truth = ParamVector(c=0.0, k=0.0014, g=(0.8,), a=(0.05,), l=(0.15,), nu=6.0)
        gjr_t = garch_spec(variance=VarianceSpec("gjr", 1, 1), dist=InnovationDist("student_t"))
        specs = [
            garch_spec(dist=InnovationDist("student_t")),
            garch_spec(variance=VarianceSpec("gjr", 1, 1)),
            gjr_t,
        ]
        first = 0
        for seed in range(20):
            table = compare(simulate(truth, gjr_t, 2000, seed=500 + seed), specs)
            first += table[0].index == 2
        self.assertGreaterEqual(first, 16)

    def test_compare_mostly_keeps_the_constant_mean(self):
        # near-cancelling ARMA roots can still buy enough likelihood to win on AIC
        specs = [garch_spec(), garch_spec(MeanSpec(ar=1, ma=1)), garch_spec(MeanSpec(ar=2, ma=1))]
        first = 0
        for seed in range(20):
            table = compare(simulate(TRUTH, garch_spec(), 2000, seed=500 + seed), specs)
            first += table[0].index == 0
        self.assertGreaterEqual(first, 14)

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, tag
from pathlib import Path
from io import StringIO
import tempfile
import warnings
import json
from scipy import stats
import pandas as pd
import numpy as np

from gridvol.exceptions import ConfigError, DuplicateDate, MissingData, ParseError
from garch.models import InnovationDist, MeanSpec, ModelSpec, ParamVector, VarianceSpec
from garch.utilities.simulation import simulate
from runs.serializers import RunConfigSerializer, parse_spec
from runs.utilities.pipeline import build_params, build_spec
from runs.utilities.ingest import ingest


TRUTH = ParamVector(c=0.0, k=0.0014, g=(0.787,), a=(0.134,))
GARCH11 = ModelSpec(MeanSpec(), VarianceSpec("garch", 1, 1), InnovationDist("normal"))


def write_csv(directory, name, text):
    path = Path(directory) / name
    path.write_text(text)
    return str(path)


def write_market_data(directory, n=1500, seed=3):
    """Prices whose log returns follow GARCH(1,1), plus a positive load series."""
    returns = simulate(TRUTH, GARCH11, n, seed).values
    prices = 40.0 * np.exp(np.concatenate([[0.0], np.cumsum(returns)]))
    load = 100.0 + 5.0 * np.random.default_rng(seed).normal(size=n + 1)
    frame = pd.DataFrame({
        'date': pd.date_range("2004-01-01", periods=n + 1, freq="D").strftime("%Y-%m-%d"),
        'price': prices,
        'load': load,
    })
    path = Path(directory) / "market.csv"
    frame.to_csv(path, index=False)
    return str(path)


def run_command(command, **options):
    out = StringIO()
    call_command("run", command, stdout=out, **options)
    return out.getvalue()


def read_report(out, name):
    return json.loads((Path(out) / f"{name}.json").read_text())


class IngestTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_three_column_file(self):
        path = write_csv(self.tmp.name, "prices.csv",
                         "date,price,load\n2004-01-02,10.5,100\n2004-01-01,11,\n2004-01-03, 9.75,98\n")
        dataset = ingest(path)
        self.assertEqual(dataset.names, ["price", "load"])
        self.assertEqual([d.day for d in dataset.dates], [1, 2, 3])
        np.testing.assert_array_equal(dataset["price"].values, [11.0, 10.5, 9.75])
        self.assertTrue(np.isnan(dataset["load"].values[0]))
        self.assertEqual(dataset["load"].missing_count, 1)

    def test_custom_date_column_and_format(self):
        path = write_csv(self.tmp.name, "eu.csv", "day,price\n02/01/2004,1\n03/01/2004,2\n")
        dataset = ingest(path, date_column="day", date_format="%d/%m/%Y")
        self.assertEqual(dataset.dates[0], pd.Timestamp("2004-01-02"))

    def test_duplicate_date(self):
        path = write_csv(self.tmp.name, "dup.csv", "date,price\n2004-01-01,1\n2004-01-01,2\n")
        with self.assertRaisesRegex(DuplicateDate, r"^row 2: duplicate date 2004-01-01"):
            ingest(path)

    def test_short_row(self):
        path = write_csv(self.tmp.name, "short.csv", "date,price,load\n2004-01-01,1,2\n2004-01-02,3\n")
        with self.assertRaises(ParseError) as raised:
            ingest(path)
        self.assertEqual(raised.exception.row, 2)

    def test_long_row(self):
        path = write_csv(self.tmp.name, "long.csv", "date,price\n2004-01-01,1\n2004-01-02,3,4\n")
        with self.assertRaises(ParseError):
            ingest(path)

    def test_bad_date_and_value(self):
        path = write_csv(self.tmp.name, "date.csv", "date,price\n2004-01-01,1\nnot-a-date,2\n")
        with self.assertRaisesRegex(ParseError, r"^row 2: cannot parse date"):
            ingest(path)
        path = write_csv(self.tmp.name, "value.csv", "date,price\n2004-01-01,1\n2004-01-02,n/a\n")
        with self.assertRaisesRegex(ParseError, r"^row 2: cannot parse 'n/a'"):
            ingest(path)

    def test_missing_inputs(self):
        with self.assertRaises(ParseError):
            ingest(Path(self.tmp.name) / "absent.csv")
        path = write_csv(self.tmp.name, "nodate.csv", "when,price\n2004-01-01,1\n")
        with self.assertRaisesRegex(ParseError, "date column 'date'"):
            ingest(path)

    def test_unknown_series_lists_the_available_ones(self):
        path = write_csv(self.tmp.name, "one.csv", "date,price\n2004-01-01,1\n")
        with self.assertRaisesRegex(ConfigError, "available: price"):
            ingest(path)["load"]


class RunConfigTests(SimpleTestCase):
    def validate(self, **data):
        serializer = RunConfigSerializer(data=data)
        return serializer.is_valid(), serializer

    def test_defaults_come_from_settings(self):
        valid, serializer = self.validate(command="fit", data="x.csv", target="price", transform=["logret"])
        self.assertTrue(valid, serializer.errors)
        config = serializer.save()
        self.assertEqual(config.name, "fit")
        self.assertEqual(config.transforms, ("log_return",))
        self.assertEqual(config.garch, (1, 1))
        self.assertEqual(config.lam, 0.94)
        self.assertEqual(config.backend, "local")

    def test_command_requirements(self):
        self.assertIn('target', self.validate(command="fit", data="x.csv")[1].errors)
        self.assertIn('spec', self.validate(command="compare", data="x.csv", target="p", spec=["ar=1"])[1].errors)
        self.assertIn('params', self.validate(command="simulate", n=100)[1].errors)
        self.assertIn('span', self.validate(command="describe", data="x.csv", target="p",
                                            transform=["ewma"])[1].errors)

    def test_malformed_values(self):
        for field, value in (("garch", "1"), ("dist", "cauchy"), ("lam", 1.5), ("dummy", ["rmr"]),
                             ("transform", ["sqrt"]), ("params", "k=abc")):
            valid, serializer = self.validate(**{'command': "simulate", 'n': 10, 'params': "k=1", field: value})
            self.assertFalse(valid, field)
            self.assertIn(field, serializer.errors)

    def test_spec_strings(self):
        spec = parse_spec("ar=1; garch=1,1; family=gjr; dist=t; xreg=load,wind")
        self.assertEqual(spec, {'ar': 1, 'garch': (1, 1), 'family': "gjr", 'dist': "student_t",
                                'xreg': ("load", "wind")})

    def test_dummies_are_normalised(self):
        valid, serializer = self.validate(command="fit", data="x.csv", target="p", dummy=["rmr=2005-06-01,cap=2007-1-5"])
        self.assertTrue(valid, serializer.errors)
        self.assertEqual(serializer.save().dummies, (("rmr", "2005-06-01"), ("cap", "2007-01-05")))


class SimulationParamsTests(SimpleTestCase):
    def config(self, **data):
        serializer = RunConfigSerializer(data={'command': "simulate", 'n': 50, **data})
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def test_named_coefficients(self):
        config = self.config(params="k=0.0014,g1=0.787,a1=0.134", dist="t", nu=6)
        spec = build_spec(config)
        params = build_params(config, spec)
        self.assertEqual(params.g, (0.787,))
        self.assertEqual(params.c, 0.0)
        self.assertEqual(params.nu, 6.0)

    def test_missing_and_unknown_names(self):
        config = self.config(params="k=0.0014,g1=0.787,b1=0.1")
        with self.assertRaisesRegex(ConfigError, r"missing \['a1'\], unknown \['b1'\]"):
            build_params(config, build_spec(config))


class RegressorBindingTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = write_csv(self.tmp.name, "prices.csv",
                              "date,price,load\n2004-01-01,40,100\n2004-01-02,44,\n"
                              "2004-01-03,42,110\n2004-01-04,45,105\n")

    def config(self, **data):
        serializer = RunConfigSerializer(data={'command': "fit", 'data': self.path, 'target': "price",
                                               'transform': ["logret"], 'xreg': ["load"], **data})
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def test_regressors_follow_the_target_transforms(self):
        (load,) = build_spec(self.config(max_gap=1), ingest(self.path)).mean.regressors
        self.assertEqual(load.name, "load")
        self.assertEqual(load.dates[0], pd.Timestamp("2004-01-02"))
        np.testing.assert_allclose(load.values, np.diff(np.log([100.0, 105.0, 110.0, 105.0])))

    def test_gaps_without_max_gap_name_the_flag(self):
        with self.assertRaisesRegex(MissingData, r"'load' has 1 missing values; pass --max-gap"):
            build_spec(self.config(), ingest(self.path))
        with self.assertRaisesRegex(CommandError, r"^fit: Regressor 'load' .*--max-gap"):
            run_command("fit", data=self.path, target="price", xreg=["load"], out=self.tmp.name)


class RunCommandTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        cls.data = write_market_data(cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def setUp(self):
        out = tempfile.TemporaryDirectory()
        self.addCleanup(out.cleanup)
        self.out = out.name

    def market(self, **options):
        return {'data': self.data, 'target': "price", 'transform': ["logret"], 'out': self.out, **options}

    def test_describe(self):
        run_command("describe", **self.market(max_lag=5))
        report = read_report(self.out, "describe")
        self.assertEqual(report['series'], "logret_price")
        self.assertEqual(report['summary']['n'], 1500)
        self.assertEqual(len(report['correlogram']), 5)
        for figure in ("acf", "pacf", "qq"):
            self.assertTrue((Path(self.out) / f"describe_{figure}.csv").exists())
        qq = pd.read_csv(Path(self.out) / "describe_qq.csv")
        self.assertEqual(list(qq.columns), ["theoretical", "sample"])
        self.assertEqual(len(qq), 1500)

    def test_test(self):
        output = run_command("test", **self.market())
        report = read_report(self.out, "test")
        tests = report['tests']
        self.assertEqual(len(tests['adf']), 8)
        self.assertEqual(len(tests['ljung_box']), 7)
        # GARCH returns: no unit root, clear ARCH effects
        self.assertEqual(tests['adf'][0]['p_bracket'], "<0.01")
        self.assertTrue(tests['arch_lm']['reject_at_5pct'])
        self.assertAlmostEqual(report['durbin_watson']['statistic'], 2.0, delta=0.2)
        self.assertIn("durbin_watson", output)

    def test_vol(self):
        run_command("vol", **self.market(window=30, xreg=["load"], name="v"))
        report = read_report(self.out, "v")
        self.assertEqual(report['window'], 30)
        self.assertEqual(report['effective_window'], 75)
        self.assertEqual(len(report['rolling']['sigma']), 1500 - 29)
        self.assertEqual(report['correlation']['with'], "logret_load")
        self.assertLess(abs(report['correlation']['mean']), 0.2)
        self.assertEqual([row['year'] for row in report['by_year']], [2004, 2005, 2006, 2007, 2008])
        for figure in ("rolling", "rolling_annualized", "ewma", "correlation"):
            self.assertTrue((Path(self.out) / f"v_{figure}.csv").exists())

    def test_fit(self):
        output = run_command("fit", **self.market(dummy=["rmr=2006-01-01"], max_lag=10))
        report = read_report(self.out, "fit")
        fit = report['fit']
        self.assertTrue(report['ok'])
        self.assertTrue(fit['converged'])
        self.assertEqual([row['name'] for row in fit['coefficients']], ["c", "beta_rmr", "k", "g1", "a1"])
        self.assertEqual([row['label'] for row in fit['interventions']], ["rmr"])
        self.assertLess(fit['aic'], fit['bic'])
        self.assertAlmostEqual(fit['persistence']['persistence'], 0.921, delta=0.08)
        self.assertEqual(len(report['diagnostics']['ljung_box_squared']), 7)
        self.assertIn("Coefficient", output)
        sigma = pd.read_csv(Path(self.out) / "fit_conditional_sigma.csv")
        self.assertEqual(list(sigma.columns), ["date", "sigma"])
        self.assertEqual(len(sigma), 1500)
        correlogram = pd.read_csv(Path(self.out) / "fit_squared_std_residuals_correlogram.csv")
        self.assertEqual(list(correlogram.columns), ["lag", "acf", "pacf"])
        self.assertEqual(correlogram['lag'].tolist(), list(range(1, 11)))
        qq = pd.read_csv(Path(self.out) / "fit_std_residuals_qq.csv")
        self.assertEqual(list(qq.columns), ["theoretical", "sample"])
        self.assertEqual(len(qq), 1500)
        self.assertAlmostEqual(qq['theoretical'].iloc[0], stats.norm.ppf(0.5 / 1500))
        self.assertTrue(qq['sample'].is_monotonic_increasing)

    def test_fit_qq_uses_the_fitted_t(self):
        run_command("simulate", out=self.out, n=1500, seed=12, dist="t", name="sim",
                    params="k=0.0014,g1=0.787,a1=0.134,nu=6", target="price_return")
        run_command("fit", data=str(Path(self.out) / "sim_series.csv"), target="price_return",
                    dist="t", out=self.out)
        coefficients = {row['name']: row['coefficient'] for row in read_report(self.out, "fit")['fit']['coefficients']}
        nu = coefficients['nu']
        qq = pd.read_csv(Path(self.out) / "fit_std_residuals_qq.csv")
        self.assertEqual(len(qq), 1500)
        expected = stats.t.ppf(0.5 / 1500, df=nu) * np.sqrt((nu - 2.0) / nu)
        self.assertAlmostEqual(qq['theoretical'].iloc[0], expected, places=6)
        self.assertLess(qq['theoretical'].iloc[0], stats.norm.ppf(0.5 / 1500))

    def test_reports_are_reproducible(self):
        other = tempfile.TemporaryDirectory()
        self.addCleanup(other.cleanup)
        run_command("fit", **self.market())
        run_command("fit", **self.market(out=other.name))
        self.assertEqual((Path(self.out) / "fit.json").read_bytes(), (Path(other.name) / "fit.json").read_bytes())

    def test_compare(self):
        output = run_command("compare", **self.market(spec=["garch=1,1", "family=gjr"]))
        rows = read_report(self.out, "compare")['candidates']
        self.assertEqual(len(rows), 2)
        self.assertEqual(sorted(row['rank'] for row in rows), [1, 2])
        best = min(rows, key=lambda row: row['rank'])
        self.assertTrue(all(best['aic'] <= row['aic'] for row in rows))
        self.assertIn("GJR", output.upper())

    def test_forecast(self):
        run_command("forecast", **self.market(horizon=20, origin="2007-06-30"))
        report = read_report(self.out, "forecast")
        path = report['variance_forecast']['path']
        self.assertEqual(len(path), 20)
        self.assertEqual(report['variance_forecast']['origin'], "2007-06-30")
        self.assertEqual(report['variance_forecast']['dates'][0], "2007-07-01")
        # the forecast converges monotonically towards the unconditional variance
        gaps = np.abs(np.array(path) - report['variance_forecast']['unconditional'])
        self.assertTrue(np.all(np.diff(gaps) <= 1e-12))
        in_sample = report['in_sample']
        self.assertAlmostEqual(in_sample['bias_proportion'] + in_sample['variance_proportion']
                               + in_sample['covariance_proportion'], 1.0, places=10)
        self.assertTrue((Path(self.out) / "forecast_variance_forecast.csv").exists())

    def test_simulate(self):
        run_command("simulate", out=self.out, n=300, seed=4, params="k=0.0014,g1=0.787,a1=0.134",
                    target="price", start="2010-01-01")
        series = pd.read_csv(Path(self.out) / "simulate_series.csv")
        self.assertEqual(list(series.columns), ["date", "price"])
        self.assertEqual(series['date'].iloc[0], "2010-01-01")
        self.assertEqual(len(series), 300)
        report = read_report(self.out, "simulate")
        self.assertEqual(report['params'], {'c': 0.0, 'k': 0.0014, 'g1': 0.787, 'a1': 0.134})

    def test_simulated_regressors_come_from_the_data(self):
        run_command("simulate", data=self.data, xreg=["load"], out=self.out, n=200,
                    params="k=0.0014,g1=0.787,a1=0.134,beta_load=0.01")
        series = pd.read_csv(Path(self.out) / "simulate_series.csv")
        self.assertEqual(list(series.columns), ["date", "y", "load"])
        self.assertEqual(series['date'].iloc[0], "2004-01-01")

    def test_non_converged_fit_still_writes_its_report(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with self.assertRaisesRegex(CommandError, "did not converge"):
                run_command("fit", **self.market(max_iterations=1))
        report = read_report(self.out, "fit")
        self.assertFalse(report['ok'])
        self.assertFalse(report['fit']['converged'])

    def test_failures_name_their_stage(self):
        with self.assertRaisesRegex(CommandError, r"^config: spec: "):
            run_command("compare", **self.market(spec=["ar=1"]))
        with self.assertRaisesRegex(CommandError, r"^ingest: series \['wind'\] not found"):
            run_command("fit", **self.market(xreg=["wind"]))
        with self.assertRaisesRegex(CommandError, r"^transform: .*strictly positive"):
            run_command("describe", **self.market(transform=["diff", "log"]))
        with self.assertRaisesRegex(CommandError, r"^simulate: --params"):
            run_command("simulate", out=self.out, n=100, params="k=0.1")
        self.assertEqual(list(Path(self.out).iterdir()), [])

    def test_ragged_input(self):
        path = write_csv(self.out, "ragged.csv", "date,price\n2004-01-01,1\n2004-01-02\n")
        with self.assertRaisesRegex(CommandError, r"^ingest: row 2: "):
            run_command("describe", data=path, target="price", out=self.out)


@tag('slow')
class SimulateFitRoundTripTests(SimpleTestCase):
    def test_recovers_persistence(self):
        with tempfile.TemporaryDirectory() as out:
            run_command("simulate", out=out, n=4000, seed=21, params="k=0.0014,g1=0.787,a1=0.134",
                        target="price_return", name="sim")
            run_command("fit", data=str(Path(out) / "sim_series.csv"), target="price_return", out=out)
            fit = read_report(out, "fit")['fit']
        self.assertTrue(fit['converged'])
        self.assertAlmostEqual(fit['persistence']['persistence'], 0.921, delta=0.05)

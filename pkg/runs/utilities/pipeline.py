from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from django.conf import settings
import logging
import json
import pandas as pd
import numpy as np

from gridvol.exceptions import ConfigError, GridvolError, MissingData, StageFailed
from gridvol.serializers import finite_or_none
from timeseries.utilities.transforms import apply_transforms, impute_missing
from timeseries.serializers import CorrelogramEntrySerializer, SummaryStatsSerializer
from timeseries.utilities.statistics import summary_stats
from timeseries.utilities.correlation import pacf
from timeseries.utilities.qq import qq_points
from diagnostics.serializers import PreEstimationReportSerializer, TestResultSerializer
from diagnostics.utilities.portmanteau import ljung_box, squared_residual_ljung_box
from diagnostics.utilities.residuals import arch_lm, durbin_watson
from diagnostics.utilities.report import pre_estimation_report
from diagnostics.utilities.normality import jarque_bera
from volatility.serializers import VolPathSerializer, YearlyVolatilitySerializer
from volatility.utilities.rolling import rolling_volatility, volatility_by_year
from volatility.utilities.ewma import effective_window, ewma_correlation, ewma_variance
from garch.models import InnovationDist, MeanSpec, ModelSpec, ParamVector, VarianceSpec
from garch.utilities.simulation import simulate_paths
from estimation.serializers import ComparisonRowSerializer, FitResultSerializer
from estimation.utilities.criteria import standardized_residuals
from estimation.utilities.comparison import compare
from estimation.utilities.fitting import fit
from estimation.models import FitOptions
from forecasting.serializers import ForecastReportSerializer, VarianceForecastSerializer
from forecasting.utilities.forecasts import forecast_variance, in_sample_forecast
from forecasting.utilities.interventions import make_step_dummy
from runs.utilities.ingest import ingest
from runs.models import Dataset, RunConfig


logger = logging.getLogger(__name__)


# Everything a command produced, written to disk only once the whole run succeeded
@dataclass
class RunOutcome:
    report: dict
    plots: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    ok: bool = True
    message: str = ""


@contextmanager
def stage(name: str):
    try:
        yield
    except StageFailed:
        raise
    except GridvolError as e:
        logger.error(f"Stage '{name}' failed: {e}")
        raise StageFailed(name, e) from e


def frame(**columns) -> pd.DataFrame:
    return pd.DataFrame(columns)


def dated_frame(dates, values, column: str) -> pd.DataFrame:
    return frame(date=[d.date().isoformat() for d in dates], **{column: np.asarray(values, dtype=float)})


# ---------------------------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------------------------

def load_dataset(config: RunConfig):
    if not config.data:
        return None
    dataset = ingest(config.data, config.date_col, config.date_format)
    names = config.referenced_series
    if config.command == "simulate" and config.target:
        # the simulated series is written under --target, it is not read
        names = [name for name in names if name != config.target]
    missing = [name for name in names if name not in dataset]
    if missing:
        raise ConfigError(f"series {missing} not found in {config.data} (available: {dataset.names})")
    return dataset


def prepare_series(config: RunConfig, dataset: Dataset, name: str):
    s = dataset[name]
    if config.max_gap:
        s = impute_missing(s, config.max_gap)
    return apply_transforms(s, [(kind, config.span) for kind in config.transforms])


def bound_regressors(config: RunConfig, dataset: Dataset, names) -> tuple:
    """Regressor columns, imputed and transformed exactly like the target."""
    regressors = []
    for name in names:
        s = dataset[name]
        if s.has_missing and not config.max_gap:
            raise MissingData(
                f"Regressor '{name}' has {s.missing_count} missing values; pass --max-gap to interpolate them."
            )
        # parameter names follow the column, not the transform chain
        s = prepare_series(config, dataset, name)
        regressors.append(s.with_values(s.values, name))
    return tuple(regressors)


def build_spec(config: RunConfig, dataset: Dataset = None, overrides: dict = None) -> ModelSpec:
    """ModelSpec from the model flags, with a compare candidate's keys taking precedence."""
    values = {
        'ar': config.ar, 'ma': config.ma, 'garch': config.garch, 'family': config.family,
        'dist': config.dist, 'nu': config.nu, 'xreg': config.xreg, 'vreg': config.vreg,
    }
    values.update(overrides or {})
    xreg = bound_regressors(config, dataset, values['xreg']) if values['xreg'] else ()
    vreg = bound_regressors(config, dataset, values['vreg']) if values['vreg'] else ()

    if config.dummies:
        if dataset is not None:
            dates = dataset.dates
        else:
            dates = pd.date_range(config.start, periods=config.n, freq="D")
        dummies = tuple(make_step_dummy(dates, when, label) for label, when in config.dummies)
        xreg += dummies
        if config.dummy_in_variance:
            vreg += dummies

    p, q = values['garch']
    return ModelSpec(
        mean=MeanSpec(ar=values['ar'], ma=values['ma'], regressors=xreg),
        variance=VarianceSpec(values['family'], p, q, regressors=vreg),
        dist=InnovationDist(values['dist'], values['nu'] if values['dist'] == "student_t" else None),
    )


def build_params(config: RunConfig, spec: ModelSpec) -> ParamVector:
    """Generating coefficients for `simulate`, keyed by the parameter names of `spec`."""
    names = spec.param_names()
    values = dict(config.params)
    values.setdefault("c", 0.0)
    if spec.dist.kind == "student_t":
        values.setdefault("nu", spec.dist.nu)
    unknown = sorted(set(values) - set(names) - {"c"})
    missing = [name for name in names if name not in values]
    if unknown or missing:
        raise ConfigError(
            f"--params for {spec.label} must give {names}; missing {missing}, unknown {unknown}"
        )
    return ParamVector.from_array([values[name] for name in names], spec)


def fit_options(config: RunConfig) -> FitOptions:
    return FitOptions.from_settings(max_iterations=config.max_iterations, seed=config.seed)


# ---------------------------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------------------------

def describe_command(config: RunConfig, y, dataset) -> RunOutcome:
    stats = summary_stats(y)
    entries = pacf(y, config.max_lag)
    qq = qq_points(y, loc=stats.mean, scale=stats.std)
    report = {
        'series': y.name,
        'missing': y.missing_count,
        'summary': SummaryStatsSerializer(stats).data,
        'correlogram': CorrelogramEntrySerializer(entries, many=True).data,
    }
    plots = {
        'acf': frame(lag=[e.lag for e in entries], acf=[e.acf for e in entries]),
        'pacf': frame(lag=[e.lag for e in entries], pacf=[e.pacf for e in entries]),
        'qq': frame(theoretical=[t for t, _ in qq], sample=[s for _, s in qq]),
    }
    lines = [
        f"{y.name}: n={stats.n} mean={stats.mean:.6g} std={stats.std:.6g} "
        f"skewness={stats.skewness:.4f} kurtosis={stats.kurtosis:.4f}",
    ]
    lines += [f"  lag {e.lag:>3}  acf {e.acf: .4f}  pacf {e.pacf: .4f}" for e in entries]
    return RunOutcome(report, plots, lines)


def test_command(config: RunConfig, y, dataset) -> RunOutcome:
    bundle = pre_estimation_report(y, adf_lags=config.max_lag, trend=config.trend,
                                   ljung_box_lags=config.ljung_box_lags, arch_lags=config.lags)
    demeaned = y.with_values(y.values - np.nanmean(y.values))
    dw = durbin_watson(demeaned)
    report = {
        'series': y.name,
        'tests': PreEstimationReportSerializer(bundle).data,
        'durbin_watson': TestResultSerializer(dw).data,
    }
    results = [bundle.jarque_bera, bundle.adf[0], bundle.pp, bundle.ljung_box[-1], bundle.arch_lm, dw]
    lines = [f"{r.name:<16} stat {r.statistic: .4f}  "
             f"{'p ' + _number(r.p_value, 4) if r.p_value is not None else r.p_bracket or ''}"
             for r in results]
    return RunOutcome(report, {}, lines)


def vol_command(config: RunConfig, y, dataset) -> RunOutcome:
    days = settings.GRIDVOL['ANNUALIZATION_DAYS']
    rolling = rolling_volatility(y, config.window)
    annualized = rolling_volatility(y, config.window, annualize_result=True, days=days)
    ewma = ewma_variance(y, config.lam)
    report = {
        'series': y.name,
        'window': config.window,
        'lambda': config.lam,
        'effective_window': effective_window(config.lam),
        'by_year': YearlyVolatilitySerializer(volatility_by_year(rolling, config.window, days), many=True).data,
        'rolling': VolPathSerializer(rolling).data,
        'ewma': VolPathSerializer(ewma).data,
    }
    plots = {
        'rolling': dated_frame(rolling.dates, rolling.sigma, "sigma"),
        'rolling_annualized': dated_frame(annualized.dates, annualized.sigma, "sigma"),
        'ewma': dated_frame(ewma.dates, ewma.sigma, "sigma"),
    }
    if config.xreg:
        partner = prepare_series(config, dataset, config.xreg[0])
        rho = ewma_correlation(y, partner, config.lam)
        report['correlation'] = {'with': partner.name, 'mean': finite_or_none(np.nanmean(rho.values))}
        plots['correlation'] = dated_frame(rho.dates, rho.values, "correlation")
    lines = [f"rolling({config.window}) mean sigma {rolling.sigma.mean():.6g}, "
             f"ewma({config.lam}) last sigma {ewma.sigma[-1]:.6g}"]
    return RunOutcome(report, plots, lines)


def _post_fit_diagnostics(result, config: RunConfig) -> dict:
    z = standardized_residuals(result)
    return {
        'jarque_bera': TestResultSerializer(jarque_bera(z)).data,
        'ljung_box': TestResultSerializer(ljung_box(z, config.ljung_box_lags), many=True).data,
        'ljung_box_squared': TestResultSerializer(squared_residual_ljung_box(z, config.ljung_box_lags), many=True).data,
        'arch_lm': TestResultSerializer(arch_lm(z, config.lags)).data,
    }


def _number(value, digits: int = 6) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _coefficient_lines(data: dict) -> list:
    lines = [f"{data['spec']['label']}  loglik {_number(data['loglik'], 4)}  converged {data['converged']}",
             f"{'':<14}{'Coefficient':>14}{'Std. Error':>14}{'z-Statistic':>14}{'Prob.':>10}"]
    for row in data['coefficients']:
        cells = [_number(row[key]) for key in ("coefficient", "std_error", "z_stat", "p_value")]
        lines.append(f"{row['name']:<14}{cells[0]:>14}{cells[1]:>14}{cells[2]:>14}{cells[3]:>10}")
    lines.append(" ".join(f"{key.upper()} {_number(data[key])}" for key in ("aic", "bic", "hq", "r_squared", "dw")))
    return lines


def fit_command(config: RunConfig, y, dataset) -> RunOutcome:
    spec = build_spec(config, dataset)
    result = fit(y, spec, fit_options(config))
    data = FitResultSerializer(result).data
    report = {'fit': data, 'diagnostics': _post_fit_diagnostics(result, config)}

    # standardized residuals against the fitted innovation law
    z = standardized_residuals(result)
    if spec.dist.kind == "student_t":
        qq = qq_points(z, dist="student_t", nu=result.params.nu)
    else:
        qq = qq_points(z)
    squared = pacf(z.with_values(z.values ** 2, f"{z.name}_squared"), config.max_lag)

    plots = {
        'conditional_sigma': dated_frame(result.variance.dates, result.variance.sigma, "sigma"),
        'std_residuals': dated_frame(z.dates, z.values, "std_residual"),
        'squared_std_residuals_correlogram': frame(
            lag=[e.lag for e in squared], acf=[e.acf for e in squared], pacf=[e.pacf for e in squared],
        ),
        'std_residuals_qq': frame(theoretical=[t for t, _ in qq], sample=[s for _, s in qq]),
    }
    message = "" if result.converged else f"{spec.label} did not converge ({result.message})"
    return RunOutcome(report, plots, _coefficient_lines(data), ok=result.converged, message=message)


def compare_command(config: RunConfig, y, dataset) -> RunOutcome:
    specs = [build_spec(config, dataset, overrides) for overrides in config.specs]
    table = compare(y, specs, fit_options(config), arch_lags=config.lags, backend=config.backend)
    rows = ComparisonRowSerializer(table, many=True).data
    lines = [f"{'rank':>4}  {'model':<40}{'AIC':>12}{'BIC':>12}{'HQ':>12}{'ARCH p':>10}  serial"]
    for row in rows:
        if row['error']:
            lines.append(f"{'-':>4}  {row['label']:<40}  failed: {row['error']}")
            continue
        rank = row['rank'] if row['rank'] is not None else "-"
        cells = [_number(row[key]) for key in ("aic", "bic", "hq")] + [_number(row['arch_p_value'], 4)]
        lines.append(f"{rank:>4}  {row['label']:<40}{cells[0]:>12}{cells[1]:>12}{cells[2]:>12}{cells[3]:>10}  "
                     f"{row['serial_correlation']}")
    return RunOutcome({'series': y.name, 'candidates': rows}, {}, lines)


def forecast_command(config: RunConfig, y, dataset) -> RunOutcome:
    spec = build_spec(config, dataset)
    result = fit(y, spec, fit_options(config))
    quality = in_sample_forecast(result, y)
    origin = config.origin or result.variance.dates[-1]
    variance = forecast_variance(result, origin, config.horizon, paths=config.paths, seed=config.seed)
    report = {
        'model': {'label': spec.label, 'converged': result.converged, 'loglik': finite_or_none(result.loglik),
                  'params': result.params.as_dict(spec)},
        'in_sample': ForecastReportSerializer(quality).data,
        'variance_forecast': VarianceForecastSerializer(variance).data,
    }
    plots = {
        'fitted': frame(date=[d.date().isoformat() for d in quality.fitted.dates],
                        actual=y[spec.mean.conditioning:].values, fitted=quality.fitted.values),
        'variance_forecast': dated_frame(variance.dates, variance.path, "variance"),
    }
    lines = [
        f"Theil U {quality.theil_u:.4f}  bias {quality.bias_proportion:.4f}  "
        f"variance {quality.variance_proportion:.4f}  covariance {quality.covariance_proportion:.4f}",
        f"variance forecast from {variance.origin.date()}: h=1 {variance.path[0]:.6g}, "
        f"h={variance.horizon} {variance.path[-1]:.6g}, unconditional {variance.unconditional}",
    ]
    if not result.converged:
        lines.append(f"warning: {spec.label} did not converge")
    return RunOutcome(report, plots, lines)


def simulate_command(config: RunConfig, y, dataset) -> RunOutcome:
    spec = build_spec(config, dataset)
    params = build_params(config, spec)
    paths = simulate_paths(params, spec, config.n, config.seed, burn=config.burn, start=config.start)
    name = config.target or "y"
    columns = {'date': [d.date().isoformat() for d in paths.y.dates], name: paths.y.values}
    for reg in spec.mean.regressors + spec.variance.regressors:
        if reg.name not in columns:
            columns[reg.name] = reg.to_series().reindex(paths.y.dates).to_numpy()
    stats = summary_stats(paths.y)
    report = {
        'model': spec.label,
        'params': params.as_dict(spec),
        'n': config.n,
        'seed': config.seed,
        'burn': config.burn,
        'summary': SummaryStatsSerializer(stats).data,
    }
    plots = {
        'series': pd.DataFrame(columns),
        'sigma': dated_frame(paths.sigma2.dates, np.sqrt(paths.sigma2.values), "sigma"),
    }
    lines = [f"simulated {config.n} observations of {spec.label} (seed {config.seed})"]
    return RunOutcome(report, plots, lines)


COMMAND_HANDLERS = {
    'describe': describe_command,
    'test': test_command,
    'vol': vol_command,
    'fit': fit_command,
    'compare': compare_command,
    'forecast': forecast_command,
    'simulate': simulate_command,
}


# ---------------------------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------------------------

def run(config: RunConfig) -> RunOutcome:
    """Execute one command; nothing is written until `write_outputs`."""
    logger.info(f"Started run '{config.name}': {config.command}")
    with stage("ingest"):
        dataset = load_dataset(config)
    y = None
    if config.target and dataset is not None and config.command != "simulate":
        with stage("transform"):
            y = prepare_series(config, dataset, config.target)
    with stage(config.command):
        outcome = COMMAND_HANDLERS[config.command](config, y, dataset)

    outcome.report = {
        'command': config.command,
        'run': config.name,
        'inputs': {'data': config.data, 'target': config.target, 'transforms': list(config.transforms)},
        'ok': outcome.ok,
        **outcome.report,
    }
    logger.info(f"Run '{config.name}' completed (ok={outcome.ok})")
    return outcome


def write_outputs(config: RunConfig, outcome: RunOutcome) -> list:
    """Report `<out>/<run>.json` plus one `<out>/<run>_<figure>.csv` per plot."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report_path = out / f"{config.name}.json"
    report_path.write_text(json.dumps(outcome.report, sort_keys=True, indent=2) + "\n")
    written.append(report_path)
    for figure, data in sorted(outcome.plots.items()):
        path = out / f"{config.name}_{figure}.csv"
        data.to_csv(path, index=False, lineterminator="\n")
        written.append(path)
    return written

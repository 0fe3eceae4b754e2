from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError
import logging

from gridvol.exceptions import GridvolError, StageFailed
from runs.serializers import COMMANDS, RunConfigSerializer
from runs.utilities.pipeline import run, write_outputs


logger = logging.getLogger(__name__)

CONFIG_OPTIONS = (
    "name", "out", "data", "date_col", "date_format", "target", "transform", "span", "max_gap",
    "ar", "ma", "garch", "family", "dist", "nu", "xreg", "vreg", "dummy", "dummy_in_variance",
    "spec", "window", "lam", "max_lag", "lags", "trend", "max_iterations", "backend", "horizon",
    "origin", "paths", "seed", "n", "start", "burn", "params",
)


def flatten_errors(detail, prefix: str = "") -> list:
    if isinstance(detail, dict):
        return [message for key, value in detail.items()
                for message in flatten_errors(value, f"{prefix}{key}: " if key != "non_field_errors" else prefix)]
    if isinstance(detail, list):
        return [message for value in detail for message in flatten_errors(value, prefix)]
    return [f"{prefix}{detail}"]


class Command(BaseCommand):
    help = (
        "Run one volatility-analysis command (describe, test, vol, fit, compare, forecast, "
        "simulate) and write <out>/<name>.json plus <out>/<name>_<figure>.csv plot data."
    )

    def add_arguments(self, parser):
        parser.add_argument("command", choices=COMMANDS)
        parser.add_argument("--name", help="Run name used for the output files (default: the command).")
        parser.add_argument("--out", help="Output directory (default: current directory).")

        # input
        parser.add_argument("--data", help="Comma-delimited input file with a header row.")
        parser.add_argument("--date-col", dest="date_col", help="Header of the date column (default: date).")
        parser.add_argument("--date-format", dest="date_format", help="strftime format when dates are not ISO-8601.")
        parser.add_argument("--target", help="Column to analyse (name of the simulated series for simulate).")
        parser.add_argument("--transform", action="append", help="log, diff, logret or ewma; repeatable, applied in order.")
        parser.add_argument("--span", type=int, help="Span of the ewma transform.")
        parser.add_argument("--max-gap", dest="max_gap", type=int, help="Interpolate runs of at most this many missing values.")

        # model
        parser.add_argument("--ar", type=int)
        parser.add_argument("--ma", type=int)
        parser.add_argument("--garch", help="Variance orders P,Q (default: 1,1).")
        parser.add_argument("--family", help="garch, egarch or gjr.")
        parser.add_argument("--dist", help="normal or t.")
        parser.add_argument("--nu", type=float, help="Starting degrees of freedom for t innovations.")
        parser.add_argument("--xreg", action="append",
                            help="Mean-equation regressors (name,...); imputed and transformed like --target.")
        parser.add_argument("--vreg", action="append",
                            help="Variance-equation regressors (name,...); imputed and transformed like --target.")
        parser.add_argument("--dummy", action="append", help="Step dummies as label=YYYY-MM-DD,...")
        parser.add_argument("--dummy-in-variance", dest="dummy_in_variance", action="store_true", default=None,
                            help="Also add the step dummies to the variance equation.")
        parser.add_argument("--spec", action="append",
                            help="compare candidate, e.g. 'ar=1;garch=1,1;family=gjr;dist=t'; repeatable.")

        # estimators, tests and fitting
        parser.add_argument("--window", type=int, help="Rolling volatility window.")
        parser.add_argument("--lambda", dest="lam", type=float, help="EWMA decay factor.")
        parser.add_argument("--max-lag", dest="max_lag", type=int, help="Correlogram and ADF lag count.")
        parser.add_argument("--lags", type=int, help="Ljung-Box and ARCH-LM lag count.")
        parser.add_argument("--trend", help="Unit-root deterministic terms: none, constant or constant_trend.")
        parser.add_argument("--max-iterations", dest="max_iterations", type=int)
        parser.add_argument("--backend", help="compare backend: local or celery.")

        # forecasting and simulation
        parser.add_argument("--horizon", type=int)
        parser.add_argument("--origin", help="Forecast origin date (default: last sample date).")
        parser.add_argument("--paths", type=int, help="Monte Carlo paths for egarch forecasts.")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--n", type=int, help="Number of simulated observations.")
        parser.add_argument("--start", help="First simulated date when no regressors are bound.")
        parser.add_argument("--burn", type=int, help="Simulation burn-in steps.")
        parser.add_argument("--params", help="Generating coefficients, e.g. k=0.0014,g1=0.787,a1=0.134.")

    def handle(self, *args, **options):
        data = {key: options[key] for key in CONFIG_OPTIONS if options.get(key) is not None}
        data['command'] = options['command']

        serializer = RunConfigSerializer(data=data)
        try:
            serializer.is_valid(raise_exception=True)
        except ValidationError as e:
            raise CommandError(f"config: {'; '.join(flatten_errors(e.detail))}")
        config = serializer.save()

        try:
            outcome = run(config)
        except StageFailed as e:
            raise CommandError(str(e))
        except GridvolError as e:
            raise CommandError(f"{config.command}: {e}")

        for path in write_outputs(config, outcome):
            logger.debug(f"Wrote {path}")
        for line in outcome.lines:
            self.stdout.write(line)

        if not outcome.ok:
            raise CommandError(f"{config.command}: {outcome.message}")
        self.stdout.write(self.style.SUCCESS(f"{config.command} '{config.name}' written to {config.out}"))

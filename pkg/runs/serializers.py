from django.conf import settings
from rest_framework import serializers
import pandas as pd

from timeseries.utilities.transforms import TRANSFORM_KINDS
from diagnostics.utilities.unit_root import TRENDS
from garch.models import VARIANCE_FAMILIES
from runs.models import RunConfig


COMMANDS = ("describe", "test", "vol", "fit", "compare", "forecast", "simulate")
TRANSFORM_ALIASES = {'logret': "log_return", 'ewma': "ewma_smooth"}
DIST_ALIASES = {'normal': "normal", 't': "student_t", 'student_t': "student_t"}
SPEC_KEYS = ("ar", "ma", "garch", "family", "dist", "nu", "xreg", "vreg")


def split_list(values) -> list:
    """Flatten repeated and comma-separated flag values."""
    if values is None:
        return []
    if isinstance(values, str):
        values = [values]
    return [item.strip() for value in values for item in value.split(",") if item.strip()]


def parse_orders(value: str) -> tuple:
    try:
        p, q = (int(part) for part in value.split(","))
    except ValueError:
        raise serializers.ValidationError(f"expected P,Q (e.g. 1,1), got '{value}'")
    if p < 1 or q < 1:
        raise serializers.ValidationError(f"GARCH orders must be positive, got {p},{q}")
    return p, q


def parse_dist(value: str) -> str:
    if value not in DIST_ALIASES:
        raise serializers.ValidationError(f"unknown distribution '{value}', expected normal or t")
    return DIST_ALIASES[value]


def parse_assignments(value: str, separator: str) -> list:
    pairs = []
    for item in value.split(separator):
        item = item.strip()
        if not item:
            continue
        key, sep, rest = item.partition("=")
        if not sep or not key.strip():
            raise serializers.ValidationError(f"expected key=value, got '{item}'")
        pairs.append((key.strip(), rest.strip()))
    return pairs


def parse_spec(value: str) -> dict:
    """
    One compare candidate, e.g. "ar=1;ma=1;garch=1,1;family=gjr;dist=t;xreg=load". Keys left
    out take the values of the corresponding command-line flags.
    """
    spec = {}
    for key, raw in parse_assignments(value, ";"):
        if key not in SPEC_KEYS:
            raise serializers.ValidationError(f"unknown spec key '{key}' in '{value}'")
        if key in ("ar", "ma"):
            if not raw.isdigit():
                raise serializers.ValidationError(f"{key} must be a nonnegative integer, got '{raw}'")
            spec[key] = int(raw)
        elif key == "garch":
            spec[key] = parse_orders(raw)
        elif key == "family":
            if raw not in VARIANCE_FAMILIES:
                raise serializers.ValidationError(f"unknown family '{raw}'")
            spec[key] = raw
        elif key == "dist":
            spec[key] = parse_dist(raw)
        elif key == "nu":
            try:
                spec[key] = float(raw)
            except ValueError:
                raise serializers.ValidationError(f"nu must be a number, got '{raw}'")
        else:
            spec[key] = tuple(split_list(raw))
    return spec


class RunConfigSerializer(serializers.Serializer):
    """Validates every `run` flag up front and builds the RunConfig."""
    command = serializers.ChoiceField(choices=COMMANDS)
    name = serializers.CharField(required=False, allow_null=True, default=None)
    out = serializers.CharField(default=".")
    data = serializers.CharField(required=False, allow_null=True, default=None)
    date_col = serializers.CharField(default="date")
    date_format = serializers.CharField(required=False, allow_null=True, default=None)
    target = serializers.CharField(required=False, allow_null=True, default=None)
    transform = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=list)
    span = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    max_gap = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    ar = serializers.IntegerField(min_value=0, default=0)
    ma = serializers.IntegerField(min_value=0, default=0)
    garch = serializers.CharField(default="1,1")
    family = serializers.ChoiceField(choices=VARIANCE_FAMILIES, default="garch")
    dist = serializers.CharField(default="normal")
    nu = serializers.FloatField(required=False, allow_null=True, default=None)
    xreg = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=list)
    vreg = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=list)
    dummy = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=list)
    dummy_in_variance = serializers.BooleanField(default=False)
    spec = serializers.ListField(child=serializers.CharField(), required=False, allow_null=True, default=list)
    window = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)
    lam = serializers.FloatField(required=False, allow_null=True, default=None)
    max_lag = serializers.IntegerField(min_value=1, default=7)
    lags = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    trend = serializers.ChoiceField(choices=TRENDS, default="constant_trend")
    max_iterations = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    backend = serializers.ChoiceField(choices=("local", "celery"), required=False, allow_null=True, default=None)
    horizon = serializers.IntegerField(min_value=1, default=10)
    origin = serializers.DateField(required=False, allow_null=True, default=None)
    paths = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=0)
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    start = serializers.DateField(required=False, allow_null=True, default=None)
    burn = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    params = serializers.CharField(required=False, allow_null=True, default=None)

    def validate_transform(self, value):
        chain = []
        for item in split_list(value):
            kind = TRANSFORM_ALIASES.get(item, item)
            if kind not in TRANSFORM_KINDS:
                raise serializers.ValidationError(f"unknown transform '{item}'")
            chain.append(kind)
        return chain

    def validate_garch(self, value):
        return parse_orders(value)

    def validate_dist(self, value):
        return parse_dist(value)

    def validate_xreg(self, value):
        return tuple(split_list(value))

    def validate_vreg(self, value):
        return tuple(split_list(value))

    def validate_dummy(self, value):
        dummies = []
        for label, date in parse_assignments(",".join(split_list(value)), ","):
            try:
                dummies.append((label, pd.Timestamp(date).date().isoformat()))
            except ValueError:
                raise serializers.ValidationError(f"dummy '{label}' has an invalid date '{date}'")
        return tuple(dummies)

    def validate_spec(self, value):
        return tuple(parse_spec(item) for item in (value or []))

    def validate_lam(self, value):
        if value is not None and not 0 < value < 1:
            raise serializers.ValidationError(f"lambda must lie in (0, 1), got {value}")
        return value

    def validate_params(self, value):
        if value is None:
            return {}
        params = {}
        for key, raw in parse_assignments(value, ","):
            try:
                params[key] = float(raw)
            except ValueError:
                raise serializers.ValidationError(f"parameter {key} must be a number, got '{raw}'")
        return params

    def validate(self, attrs):
        command = attrs['command']
        errors = {}
        if command != "simulate":
            if not attrs.get('data'):
                errors['data'] = f"'{command}' needs --data"
            if not attrs.get('target'):
                errors['target'] = f"'{command}' needs --target"
        else:
            if not attrs.get('n'):
                errors['n'] = "'simulate' needs --n"
            if not attrs.get('params'):
                errors['params'] = "'simulate' needs --params"
            if (attrs['xreg'] or attrs['vreg']) and not attrs.get('data'):
                errors['data'] = "simulated regressors are read from --data"
        if command == "compare" and len(attrs['spec']) < 2:
            errors['spec'] = "'compare' needs at least two --spec candidates"
        if "ewma_smooth" in attrs['transform'] and not attrs.get('span'):
            errors['span'] = "the ewma transform needs --span"
        if attrs['dummy_in_variance'] and not attrs['dummy']:
            errors['dummy_in_variance'] = "--dummy-in-variance needs at least one --dummy"
        if attrs['dist'] == "student_t" and attrs.get('nu') is not None and attrs['nu'] <= 2:
            errors['nu'] = f"nu must exceed 2, got {attrs['nu']}"
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data):
        config = settings.GRIDVOL
        data = dict(validated_data)

        def pick(key, setting):
            return data[key] if data.get(key) is not None else config[setting]

        return RunConfig(
            command=data['command'],
            name=data['name'] or data['command'],
            out=data['out'],
            data=data['data'],
            date_col=data['date_col'],
            date_format=data['date_format'],
            target=data['target'],
            transforms=tuple(data['transform']),
            span=data['span'],
            max_gap=data['max_gap'],
            ar=data['ar'],
            ma=data['ma'],
            garch=data['garch'],
            family=data['family'],
            dist=data['dist'],
            nu=data['nu'],
            xreg=data['xreg'],
            vreg=data['vreg'],
            dummies=data['dummy'],
            dummy_in_variance=data['dummy_in_variance'],
            specs=data['spec'],
            window=pick('window', 'ROLLING_WINDOW'),
            lam=pick('lam', 'EWMA_LAMBDA'),
            max_lag=data['max_lag'],
            lags=pick('lags', 'ARCH_TEST_LAGS'),
            ljung_box_lags=pick('lags', 'LJUNG_BOX_LAGS'),
            trend=data['trend'],
            max_iterations=pick('max_iterations', 'FIT_MAX_ITERATIONS'),
            backend=pick('backend', 'COMPARE_BACKEND'),
            horizon=data['horizon'],
            origin=data['origin'].isoformat() if data['origin'] else None,
            paths=pick('paths', 'MONTE_CARLO_PATHS'),
            seed=data['seed'],
            n=data['n'],
            start=data['start'].isoformat() if data['start'] else "2004-01-01",
            burn=pick('burn', 'SIMULATION_BURN'),
            params=data['params'],
        )

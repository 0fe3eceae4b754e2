from rest_framework import serializers
import numbers

from gridvol.serializers import FiniteFloatField, finite_or_none


def _plain_value(value):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        return value
    if isinstance(value, numbers.Integral):
        return int(value)
    return finite_or_none(value)


def _plain(mapping: dict) -> dict:
    return {str(key): _plain_value(value) for key, value in mapping.items()}


class TestResultSerializer(serializers.Serializer):
    name = serializers.CharField()
    statistic = FiniteFloatField()
    p_value = FiniteFloatField(allow_null=True)
    p_bracket = serializers.CharField(allow_null=True)
    lags = serializers.IntegerField()
    reject_at_5pct = serializers.BooleanField()
    critical_values = serializers.SerializerMethodField()
    details = serializers.SerializerMethodField()

    def get_critical_values(self, obj):
        return _plain(obj.critical_values)

    def get_details(self, obj):
        return _plain(obj.details)


class CorrelogramRowSerializer(serializers.Serializer):
    lag = serializers.IntegerField()
    acf = FiniteFloatField()
    pacf = FiniteFloatField()
    q_stat = FiniteFloatField()
    p_value = FiniteFloatField(allow_null=True)


class PreEstimationReportSerializer(serializers.Serializer):
    series = serializers.CharField()
    jarque_bera = TestResultSerializer()
    adf = TestResultSerializer(many=True)
    pp = TestResultSerializer()
    ljung_box = TestResultSerializer(many=True)
    arch_lm = TestResultSerializer()
    correlogram = CorrelogramRowSerializer(many=True)

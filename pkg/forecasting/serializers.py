from rest_framework import serializers

from timeseries.serializers import SummaryStatsSerializer, TimeSeriesSerializer
from gridvol.serializers import FiniteFloatField, finite_or_none


class ForecastReportSerializer(serializers.Serializer):
    fitted = TimeSeriesSerializer()
    theil_u = FiniteFloatField()
    bias_proportion = FiniteFloatField()
    variance_proportion = FiniteFloatField()
    covariance_proportion = FiniteFloatField()
    fitted_stats = SummaryStatsSerializer(allow_null=True)
    actual_stats = SummaryStatsSerializer(allow_null=True)


class VarianceForecastSerializer(serializers.Serializer):
    origin = serializers.SerializerMethodField()
    horizon = serializers.IntegerField()
    method = serializers.CharField()
    unconditional = FiniteFloatField(allow_null=True)
    dates = serializers.SerializerMethodField()
    path = serializers.SerializerMethodField()

    def get_origin(self, obj):
        return obj.origin.date().isoformat()

    def get_dates(self, obj):
        return [d.date().isoformat() for d in obj.dates]

    def get_path(self, obj):
        return [finite_or_none(v) for v in obj.path]

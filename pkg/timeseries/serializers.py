from rest_framework import serializers
import pandas as pd
import numpy as np

from gridvol.serializers import FiniteFloatField, finite_or_none
from timeseries.models import TimeSeries


class TimeSeriesSerializer(serializers.Serializer):
    name = serializers.CharField(allow_blank=True, default="")
    dates = serializers.ListField(child=serializers.DateField())
    values = serializers.ListField(child=serializers.FloatField(allow_null=True))

    def to_representation(self, instance):
        return {
            'name': instance.name,
            'dates': [d.date().isoformat() for d in instance.dates],
            'values': [finite_or_none(v) for v in instance.values],
        }

    def create(self, validated_data):
        values = [np.nan if v is None else v for v in validated_data['values']]
        return TimeSeries(pd.DatetimeIndex(validated_data['dates']), values, validated_data.get('name', ""))


class SummaryStatsSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    min = FiniteFloatField()
    max = FiniteFloatField()
    mean = FiniteFloatField()
    median = FiniteFloatField()
    std = FiniteFloatField()
    cv = FiniteFloatField()
    skewness = FiniteFloatField()
    kurtosis = FiniteFloatField()
    iqr = FiniteFloatField()


class CorrelogramEntrySerializer(serializers.Serializer):
    lag = serializers.IntegerField()
    acf = FiniteFloatField()
    pacf = FiniteFloatField()

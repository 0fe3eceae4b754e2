from rest_framework import serializers

from gridvol.serializers import FiniteFloatField, finite_or_none


class VolPathSerializer(serializers.Serializer):
    def to_representation(self, instance):
        return {
            'dates': [d.date().isoformat() for d in instance.dates],
            'sigma': [finite_or_none(v) for v in instance.sigma],
            'params': {key: finite_or_none(value) if isinstance(value, float) else value
                       for key, value in instance.params.items()},
        }


class PersistenceSummarySerializer(serializers.Serializer):
    persistence = FiniteFloatField()
    half_life_days = FiniteFloatField(allow_null=True)
    unconditional_sigma = FiniteFloatField(allow_null=True)
    is_integrated = serializers.BooleanField()


class PersistenceRowSerializer(serializers.Serializer):
    label = serializers.CharField()
    a = FiniteFloatField()
    g = FiniteFloatField()
    summary = PersistenceSummarySerializer()
    half_life_whole_days = serializers.IntegerField(allow_null=True)


class YearlyVolatilitySerializer(serializers.Serializer):
    year = serializers.IntegerField()
    min = FiniteFloatField()
    max = FiniteFloatField()
    mean = FiniteFloatField()
    std = FiniteFloatField()
    annualized_min = FiniteFloatField()
    annualized_max = FiniteFloatField()
    annualized_mean = FiniteFloatField()

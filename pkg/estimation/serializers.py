from rest_framework import serializers

from garch.models import InnovationDist, MeanSpec, ModelSpec, VarianceSpec, VARIANCE_FAMILIES, DISTRIBUTIONS
from timeseries.serializers import TimeSeriesSerializer
from gridvol.serializers import FiniteFloatField
from volatility.serializers import PersistenceSummarySerializer
from estimation.utilities.tables import coefficient_table, fit_persistence, intervention_table, leverage_table
from estimation.models import ComparisonRow, FitOptions


class MeanSpecSerializer(serializers.Serializer):
    ar = serializers.IntegerField(min_value=0, default=0)
    ma = serializers.IntegerField(min_value=0, default=0)
    include_constant = serializers.BooleanField(default=True)
    regressors = TimeSeriesSerializer(many=True, required=False, default=list)

    def create(self, validated_data):
        regressors = tuple(TimeSeriesSerializer().create(item) for item in validated_data.get('regressors', []))
        return MeanSpec(
            ar=validated_data['ar'],
            ma=validated_data['ma'],
            regressors=regressors,
            include_constant=validated_data['include_constant'],
        )


class VarianceSpecSerializer(serializers.Serializer):
    family = serializers.ChoiceField(choices=VARIANCE_FAMILIES, default="garch")
    p = serializers.IntegerField(min_value=1, default=1)
    q = serializers.IntegerField(min_value=1, default=1)
    regressors = TimeSeriesSerializer(many=True, required=False, default=list)

    def create(self, validated_data):
        regressors = tuple(TimeSeriesSerializer().create(item) for item in validated_data.get('regressors', []))
        return VarianceSpec(
            family=validated_data['family'],
            p=validated_data['p'],
            q=validated_data['q'],
            regressors=regressors,
        )


class InnovationDistSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=DISTRIBUTIONS, default="normal")
    nu = serializers.FloatField(required=False, allow_null=True, default=None)

    def create(self, validated_data):
        return InnovationDist(kind=validated_data['kind'], nu=validated_data.get('nu'))


class ModelSpecSerializer(serializers.Serializer):
    mean = MeanSpecSerializer()
    variance = VarianceSpecSerializer()
    dist = InnovationDistSerializer()
    label = serializers.CharField(read_only=True)

    def create(self, validated_data):
        return ModelSpec(
            mean=MeanSpecSerializer().create(validated_data['mean']),
            variance=VarianceSpecSerializer().create(validated_data['variance']),
            dist=InnovationDistSerializer().create(validated_data['dist']),
        )


# Spec summary for reports (regressors by name only)
class SpecSummarySerializer(serializers.Serializer):
    label = serializers.CharField()
    ar = serializers.IntegerField(source='mean.ar')
    ma = serializers.IntegerField(source='mean.ma')
    include_constant = serializers.BooleanField(source='mean.include_constant')
    mean_regressors = serializers.ListField(source='mean.regressor_names', child=serializers.CharField())
    family = serializers.CharField(source='variance.family')
    p = serializers.IntegerField(source='variance.p')
    q = serializers.IntegerField(source='variance.q')
    variance_regressors = serializers.ListField(source='variance.regressor_names', child=serializers.CharField())
    dist = serializers.CharField(source='dist.kind')


class FitOptionsSerializer(serializers.Serializer):
    max_iterations = serializers.IntegerField(min_value=1, default=500)
    loglik_tolerance = serializers.FloatField(min_value=0, default=1e-8)
    gradient_tolerance = serializers.FloatField(min_value=0, default=1e-5)
    hessian_step = serializers.FloatField(min_value=0, default=1e-4)
    seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    restarts = serializers.IntegerField(min_value=0, default=0)

    def create(self, validated_data):
        return FitOptions(**validated_data)


class CandidateSerializer(serializers.Serializer):
    """Payload of one compare candidate, as shipped to a worker."""
    index = serializers.IntegerField(min_value=0)
    y = TimeSeriesSerializer()
    spec = ModelSpecSerializer()
    options = FitOptionsSerializer()
    arch_lags = serializers.IntegerField(min_value=1, default=7)

    def create(self, validated_data):
        return {
            'index': validated_data['index'],
            'y': TimeSeriesSerializer().create(validated_data['y']),
            'spec': ModelSpecSerializer().create(validated_data['spec']),
            'options': FitOptionsSerializer().create(validated_data['options']),
            'arch_lags': validated_data['arch_lags'],
        }


class ComparisonRowSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    label = serializers.CharField()
    n_params = serializers.IntegerField()
    converged = serializers.BooleanField()
    loglik = FiniteFloatField(allow_null=True)
    r_squared = FiniteFloatField(allow_null=True)
    dw = FiniteFloatField(allow_null=True)
    aic = FiniteFloatField(allow_null=True)
    bic = FiniteFloatField(allow_null=True)
    hq = FiniteFloatField(allow_null=True)
    arch_statistic = FiniteFloatField(allow_null=True)
    arch_p_value = FiniteFloatField(allow_null=True)
    serial_correlation = serializers.CharField(allow_null=True)
    error = serializers.CharField(allow_null=True)
    rank = serializers.IntegerField(allow_null=True)

    def create(self, validated_data):
        return ComparisonRow(**validated_data)


class CoefficientRowSerializer(serializers.Serializer):
    name = serializers.CharField()
    coefficient = FiniteFloatField()
    std_error = FiniteFloatField()
    z_stat = FiniteFloatField()
    p_value = FiniteFloatField()


class InterventionRowSerializer(serializers.Serializer):
    label = serializers.CharField()
    beta = FiniteFloatField()
    impact_pct = FiniteFloatField()
    z_stat = FiniteFloatField()
    p_value = FiniteFloatField()
    significant = serializers.BooleanField()


class FitResultSerializer(serializers.Serializer):
    """Report layout of a fit: coefficient table, criteria, fit statistics and paths."""
    spec = SpecSummarySerializer()
    converged = serializers.BooleanField()
    iterations = serializers.IntegerField()
    message = serializers.CharField()
    n_obs = serializers.IntegerField()
    loglik = FiniteFloatField()
    aic = FiniteFloatField()
    bic = FiniteFloatField()
    hq = FiniteFloatField()
    r_squared = FiniteFloatField()
    adj_r_squared = FiniteFloatField()
    dw = FiniteFloatField()
    coefficients = serializers.SerializerMethodField()
    interventions = serializers.SerializerMethodField()
    leverage = serializers.SerializerMethodField()
    persistence = serializers.SerializerMethodField()
    sign_convention = serializers.SerializerMethodField()
    residuals = TimeSeriesSerializer()
    conditional_sigma = serializers.SerializerMethodField()

    def get_coefficients(self, obj):
        return CoefficientRowSerializer(coefficient_table(obj), many=True).data

    def get_interventions(self, obj):
        return InterventionRowSerializer(intervention_table(obj), many=True).data

    def get_leverage(self, obj):
        return CoefficientRowSerializer(leverage_table(obj), many=True).data

    def get_persistence(self, obj):
        return PersistenceSummarySerializer(fit_persistence(obj)).data

    def get_sign_convention(self, obj):
        family = obj.spec.variance.family
        if family == "egarch":
            return "log variance news term: + sum A_j(|z| - E|z|) + sum L_j z"
        if family == "gjr":
            return "leverage L_j applies when the lagged shock is negative"
        return None

    def get_conditional_sigma(self, obj):
        return TimeSeriesSerializer(obj.variance.to_timeseries("conditional_sigma")).data

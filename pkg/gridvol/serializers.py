from rest_framework import serializers
import numpy as np


def finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else None


class FiniteFloatField(serializers.FloatField):
    """Float field that renders NaN and infinities (unavailable values) as null."""
    def to_representation(self, value):
        return finite_or_none(value)

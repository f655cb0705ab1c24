"""This module defines the serializers for the rates app."""
from rest_framework import serializers


class PredictionQuerySerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """
    This class defines the validation of a prediction request.

    Attributes:
        d (float): The dimension.
        k (int): The degree.
        N (int): The eigen-index.
    """

    d = serializers.FloatField()
    k = serializers.IntegerField(min_value=1)
    N = serializers.IntegerField(min_value=0)


class RateLawSerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """This class defines the JSON form of a rate law."""

    kind = serializers.CharField(source='kind.value')
    N = serializers.IntegerField(source='index')
    exponent = serializers.FloatField()
    prefactor = serializers.FloatField()
    free_parameter = serializers.CharField()
    constants = serializers.DictField(child=serializers.FloatField())


class ConstantsTableSerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """This class defines the JSON form of the constants table."""

    gamma = serializers.FloatField()
    omega = serializers.FloatField()
    delta = serializers.FloatField()
    lambda_n = serializers.ListField(child=serializers.FloatField())
    beta_n = serializers.ListField(child=serializers.FloatField())
    h = serializers.FloatField()
    Cs = serializers.FloatField()
    cN = serializers.FloatField()
    DN = serializers.FloatField()
    CN = serializers.FloatField(allow_null=True)


class PredictionSerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """This class defines the JSON form of a prediction."""

    d = serializers.FloatField()
    k = serializers.IntegerField()
    N = serializers.IntegerField()
    regime = serializers.CharField()
    rate_law = RateLawSerializer()
    constants = ConstantsTableSerializer()

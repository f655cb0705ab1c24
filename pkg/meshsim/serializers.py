"""This module defines the serializers for the meshsim app."""
from django.conf import settings
from rest_framework import serializers

from blowuplab.exceptions import LabError
from meshsim.config import SimConfig, family_names
from meshsim.fitting import FitKind, FitResult

# Settings keys backing the optional fields of a configuration.
DEFAULTS = {
    'length': 'LENGTH',
    'nodes': 'NODES',
    'monitor_floor': 'MONITOR_FLOOR',
    'uniform_fraction': 'UNIFORM_FRACTION',
    'smoothing_passes': 'SMOOTHING_PASSES',
    'mesh_relaxation': 'MESH_RELAXATION',
    'rtol': 'RTOL',
    'atol': 'ATOL',
    'max_gradient': 'MAX_GRADIENT',
    't_max': 'T_MAX',
    'energy_tolerance': 'ENERGY_TOLERANCE',
    'max_restarts': 'MAX_RESTARTS',
}


class SimConfigSerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """
    This class defines the validation of a simulation configuration file.

    Omitted numerical fields take their value from the MESHSIM settings.
    """

    d = serializers.FloatField()
    k = serializers.IntegerField(min_value=1)
    initial = serializers.ChoiceField(choices=family_names(), default='r')
    table = serializers.ListField(child=serializers.ListField(child=serializers.FloatField(), min_length=2,
                                                             max_length=2),
                                  required=False, allow_null=True)
    length = serializers.FloatField(required=False)
    boundary_value = serializers.FloatField(required=False, allow_null=True)
    nodes = serializers.IntegerField(required=False)
    monitor_floor = serializers.FloatField(required=False, min_value=0.0)
    uniform_fraction = serializers.FloatField(required=False)
    smoothing_passes = serializers.IntegerField(required=False, min_value=0)
    mesh_relaxation = serializers.FloatField(required=False)
    rtol = serializers.FloatField(required=False)
    atol = serializers.FloatField(required=False)
    max_gradient = serializers.FloatField(required=False)
    t_max = serializers.FloatField(required=False)
    energy_tolerance = serializers.FloatField(required=False, min_value=0.0)
    max_restarts = serializers.IntegerField(required=False, min_value=0)
    snapshot_gradients = serializers.ListField(child=serializers.FloatField(), required=False)
    label = serializers.CharField(required=False, allow_blank=True, default='')

    def validate(self, attrs):
        """Fill the defaults and check the invariants of the configuration."""
        defaults = settings.BLOWUPLAB['MESHSIM']
        data = dict(attrs)
        for name, key in DEFAULTS.items():
            data.setdefault(name, defaults[key])
        if data.get('table') is not None:
            data['table'] = tuple(tuple(pair) for pair in data['table'])
        data['snapshot_gradients'] = tuple(data.get('snapshot_gradients', ()))
        try:
            SimConfig(**data).initial_profile()
        except LabError as error:
            raise serializers.ValidationError(str(error)) from error
        return data

    def create(self, validated_data):
        """Return the immutable configuration."""
        return SimConfig(**validated_data)


class FitResultSerializer(serializers.Serializer):  # pylint: disable=abstract-method
    """This class defines the JSON form of a fitted rate."""

    kind = serializers.ChoiceField(choices=[kind.value for kind in FitKind], source='kind.value')
    blowup_time = serializers.FloatField()
    remaining_time = serializers.FloatField()
    exponent = serializers.FloatField()
    beta = serializers.FloatField(allow_null=True)
    C = serializers.FloatField(allow_null=True)
    s0 = serializers.FloatField(allow_null=True)
    residual = serializers.FloatField()
    r_squared = serializers.FloatField()
    window_start = serializers.FloatField()
    window_end = serializers.FloatField()
    samples = serializers.IntegerField()
    uncertainty = serializers.DictField(child=serializers.FloatField())

    def create(self, validated_data):
        """Return the fit read back from its JSON form."""
        data = dict(validated_data)
        data['kind'] = FitKind(data.pop('kind')['value'])
        return FitResult(**data)

"""This module defines the serializers for the runs app."""
from rest_framework import serializers

from runs.models import RunManifest


class RunManifestSerializer(serializers.ModelSerializer):
    """This class defines the serializer for the manifests view."""

    class Meta:
        """
        This class defines the validation metadata for the manifests view.

        Attributes:
            model (Model): The model linked to the serializer.
            fields (list(str)): The field list expected by the serializer.
        """

        model = RunManifest
        fields = ['id', 'command', 'arguments', 'config_hash', 'started', 'finished', 'status', 'message',
                  'directory', 'artifacts', 'versions']

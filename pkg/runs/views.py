"""This module manages the views of the runs app."""
from rest_framework import generics, permissions

from runs.models import RunManifest
from runs.serializers import RunManifestSerializer


class RunManifestView(generics.ListAPIView):
    """
    This class manages the view to list the recorded invocations.

    Attributes:
        permission_classes (list(Permissions)): The options to access at this resource.
        serializer_class (Serializer): The serializer to bind the request and the response object.
        queryset (QuerySet): The manifests, newest first.

    Returns:
            200: The list of manifests.
            406: The response format is not acceptable by the server.
    """

    permission_classes = [permissions.AllowAny]
    serializer_class = RunManifestSerializer
    queryset = RunManifest.objects.all()  # pylint: disable=no-member


class RunManifestDetail(generics.RetrieveAPIView):
    """
    This class manages the view to read one recorded invocation.

    Attributes:
        permission_classes (list(Permissions)): The options to access at this resource.
        serializer_class (Serializer): The serializer to bind the request and the response object.
        queryset (QuerySet): The manifests.

    Returns:
            200: The manifest.
            404: No manifest has this id.
            406: The response format is not acceptable by the server.
    """

    permission_classes = [permissions.AllowAny]
    serializer_class = RunManifestSerializer
    queryset = RunManifest.objects.all()  # pylint: disable=no-member

"""This module manages the views of the rates app."""
from rest_framework import permissions, status
from rest_framework.response import Response
from rest_framework.views import APIView

from blowuplab.exceptions import LabError
from rates.pipeline import cached_prediction, prediction_payload
from rates.serializers import PredictionQuerySerializer, PredictionSerializer


class PredictionView(APIView):
    """
    This class manages the view to predict a blow-up rate.

    Attributes:
        permission_classes (list(Permissions)): The options to access at this resource.

    Returns:
            200: The rate law and the constants table.
            400: The query is malformed or the construction does not exist at (d, k, N).
            406: The response format is not acceptable by the server.
    """

    permission_classes = [permissions.AllowAny]

    def get(self, request):
        """Return the prediction for the d, k and N query parameters."""
        query = PredictionQuerySerializer(data=request.query_params)
        query.is_valid(raise_exception=True)
        try:
            prediction = cached_prediction(query.validated_data['d'], query.validated_data['k'],
                                           query.validated_data['N'])
        except LabError as error:
            return Response({'detail': str(error)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(PredictionSerializer(prediction_payload(prediction)).data)

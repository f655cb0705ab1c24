"""This module defines the routes for the rates resources."""
from django.urls import path
from rates.views import PredictionView

urlpatterns = [
    path('', PredictionView.as_view()),
]

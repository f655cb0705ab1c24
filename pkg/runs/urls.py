"""This module defines the routes for the runs resources."""
from django.urls import path

from runs.views import RunManifestDetail, RunManifestView

urlpatterns = [
    path('', RunManifestView.as_view()),
    path('<int:pk>', RunManifestDetail.as_view()),
]

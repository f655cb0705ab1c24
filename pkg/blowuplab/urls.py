"""This module initializes the routes for the laboratory resources.

The `urlpatterns` list routes URLs to views. For more information please see:
    https://docs.djangoproject.com/en/3.1/topics/http/urls/
"""
from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path('rates/', include('rates.urls')),
    path('runs/', include('runs.urls')),
    path('admin/', admin.site.urls),
]

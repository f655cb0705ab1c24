"""This module manages the admin section for the runs app."""
from django.contrib import admin

from .models import RunManifest


@admin.register(RunManifest)
class RunManifestAdmin(admin.ModelAdmin):
    """This class defines the admin list of the manifests."""

    list_display = ['command', 'status', 'started', 'finished', 'config_hash']
    list_filter = ['command', 'status']

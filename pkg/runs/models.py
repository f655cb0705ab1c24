"""This module defines the models of the runs app."""
from django.db import models


class RunManifest(models.Model):
    """
    This class defines the record of one command invocation.

    Attributes:
        command (str): The management command.
        arguments (dict): The parsed options.
        config_hash (str): The SHA-256 of the canonical configuration, empty when there is none.
        started (datetime): The start of the invocation.
        finished (datetime): The end of the invocation, None while it runs.
        status (str): running, succeeded or failed.
        message (str): The error message of a failed invocation.
        directory (str): The output directory.
        artifacts (list(str)): Every file written, relative to the output directory.
        versions (dict): The versions of the numerical stack.
    """

    RUNNING = 'running'
    SUCCEEDED = 'succeeded'
    FAILED = 'failed'
    STATUSES = [(RUNNING, 'Running'), (SUCCEEDED, 'Succeeded'), (FAILED, 'Failed')]

    command = models.CharField(max_length=50)
    arguments = models.JSONField(default=dict)
    config_hash = models.CharField(max_length=64, blank=True)
    started = models.DateTimeField(auto_now_add=True)
    finished = models.DateTimeField(null=True, blank=True)
    status = models.CharField(max_length=10, choices=STATUSES, default=RUNNING)
    message = models.TextField(blank=True)
    directory = models.CharField(max_length=255, blank=True)
    artifacts = models.JSONField(default=list)
    versions = models.JSONField(default=dict)

    def __str__(self):
        """Return the value when the model is called directly."""
        return f'{self.command} {self.started:%Y-%m-%d %H:%M:%S} ({self.status})'

    class Meta:
        """
        This class defines metadata for the model.

        Attributes:
            ordering (list(str)): The list to sort a list of models.
        """

        ordering = ['-started', '-id']

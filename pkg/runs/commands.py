"""
This module defines the base of the laboratory management commands.

Every invocation is recorded as a manifest. Domain errors end the command with their message and
exit code 1, invalid configuration files with exit code 2.
"""
import json
import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from blowuplab.exceptions import LabError
from meshsim.storage import load_config
from runs.manifest import recorded

logger = logging.getLogger(__name__)

INVALID_CONFIG = 2


def read_config(path):
    """
    Return the validated configuration of a file.

    Raises:
        CommandError: the file is missing, is not JSON or is not a valid configuration (exit code 2).
    """
    try:
        return load_config(path)
    except OSError as error:
        raise CommandError(f"cannot read {path}: {error.strerror}", returncode=INVALID_CONFIG) from error
    except json.JSONDecodeError as error:
        raise CommandError(f"{path} is not JSON: {error}", returncode=INVALID_CONFIG) from error
    except ValidationError as error:
        raise CommandError(f"{path} is not a valid configuration: {json.dumps(error.detail)}",
                           returncode=INVALID_CONFIG) from error


class LabCommand(BaseCommand):
    """
    This class defines a recorded command.

    Subclasses implement run(recorder, **options).
    """

    def handle(self, *args, **options):
        """Run the command inside a manifest and translate domain errors."""
        with recorded(self.command_name(), options) as recorder:
            try:
                self.run(recorder, **options)
            except LabError as error:
                raise CommandError(str(error)) from error
            except OSError as error:
                raise CommandError(str(error)) from error

    def command_name(self) -> str:
        """Return the name the command was called with."""
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, recorder, **options):
        """Do the work of the command."""
        raise NotImplementedError

    def emit(self, payload) -> None:
        """Print a JSON payload."""
        self.stdout.write(json.dumps(payload, indent=2, sort_keys=True))

"""This module records command invocations as manifests."""
import contextlib
import hashlib
import json
import logging
from pathlib import Path

import django
import numpy
import rest_framework
import scipy
from django.utils import timezone

from meshsim.storage import write_json
from runs.models import RunManifest
from runs.serializers import RunManifestSerializer

logger = logging.getLogger(__name__)

# Options every management command carries.
IGNORED_OPTIONS = {
    'force_color', 'no_color', 'pythonpath', 'settings', 'skip_checks', 'stderr', 'stdout', 'traceback', 'verbosity',
}


def package_versions() -> dict:
    """Return the versions of the stack behind every number."""
    return {
        'django': django.get_version(),
        'djangorestframework': rest_framework.VERSION,
        'numpy': numpy.__version__,
        'scipy': scipy.__version__,
    }


def combined_hash(digests) -> str:
    """Return one hash for several configurations, independent of their order."""
    digests = sorted(digests)
    if len(digests) == 1:
        return digests[0]
    return hashlib.sha256(json.dumps(digests).encode('utf-8')).hexdigest()


def jsonable(options: dict) -> dict:
    """Return the command options that JSON can hold."""
    data = {}
    for name, value in options.items():
        if name in IGNORED_OPTIONS:
            continue
        if isinstance(value, (list, tuple)):
            value = [str(item) for item in value]
        elif not isinstance(value, (int, float, str, bool, type(None))):
            value = str(value)
        data[name] = value
    return data


class Recorder:
    """
    This class defines an open manifest.

    Attributes:
        manifest (RunManifest): The row being filled.
        directories (list(Path)): The output directories that receive a manifest.json.
        hashes (list(str)): The configuration hashes of the invocation.
    """

    def __init__(self, manifest: RunManifest):
        """Wrap a saved manifest."""
        self.manifest = manifest
        self.directories = []
        self.hashes = []

    def add_directory(self, directory, config_hash: str = '') -> None:
        """Attach an output directory, with the hash of its configuration."""
        self.directories.append(Path(directory))
        if config_hash:
            self.hashes.append(config_hash)

    def finish(self, status: str, message: str = '') -> None:
        """Close the manifest, list the artifacts and copy it into each output directory."""
        artifacts = []
        for directory in self.directories:
            prefix = '' if len(self.directories) == 1 else f'{directory.name}/'
            artifacts.extend(prefix + str(path.relative_to(directory)) for path in sorted(directory.rglob('*'))
                             if path.is_file() and path.name != 'manifest.json')
        if self.hashes:
            self.manifest.config_hash = combined_hash(self.hashes)
        self.manifest.status = status
        self.manifest.message = message
        self.manifest.finished = timezone.now()
        self.manifest.artifacts = artifacts
        if len(self.directories) == 1:
            self.manifest.directory = str(self.directories[0])
        elif self.directories:
            self.manifest.directory = str(self.directories[0].parent)
        self.manifest.save()
        data = RunManifestSerializer(self.manifest).data
        for directory in self.directories:
            if directory.is_dir():
                write_json(directory / 'manifest.json', dict(data))
        logger.info("manifest %d: %s %s", self.manifest.pk, self.manifest.command, status)


@contextlib.contextmanager
def recorded(command: str, options: dict):
    """
    Record an invocation from start to finish.

    Args:
        command (str): The command name.
        options (dict): The parsed options.

    Yields:
        Recorder: The open manifest.
    """
    manifest = RunManifest.objects.create(  # pylint: disable=no-member
        command=command, arguments=jsonable(options), versions=package_versions())
    recorder = Recorder(manifest)
    try:
        yield recorder
    except Exception as error:
        recorder.finish(RunManifest.FAILED, str(error))
        raise
    recorder.finish(RunManifest.SUCCEEDED)

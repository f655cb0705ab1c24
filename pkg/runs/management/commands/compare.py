"""This module defines the command comparing stored runs with their predicted rates."""
from pathlib import Path

from django.core.management.base import CommandError

from meshsim.storage import RunDirectory, write_json
from runs.comparison import agreement, compare_run
from runs.commands import LabCommand


class Command(LabCommand):
    """This class defines the compare command."""

    help = 'Compare fitted rates and snapshot profiles of run directories with the predicted ones.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('run_dirs', nargs='+', help='The run directories.')
        parser.add_argument('--output', help='A file receiving the combined report.')

    def run(self, recorder, **options):
        """Compare every run, print the combined report and fail when a run did not blow up."""
        reports = []
        for path in options['run_dirs']:
            directory = RunDirectory(path)
            report = compare_run(directory)
            recorder.add_directory(directory.path, directory.read_config().digest())
            reports.append(report)
        payload = {'runs': reports, 'agreement': agreement(reports)}
        if options['output']:
            write_json(Path(options['output']), payload)
        self.emit(payload)
        failed = [report['run'] for report in reports if 'error' in report]
        if failed:
            raise CommandError(f"no blow-up in {', '.join(failed)}")

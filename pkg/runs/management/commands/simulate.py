"""This module defines the command running moving-mesh simulations from configuration files."""
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from runs.commands import LabCommand, read_config
from runs.simulation import simulate


class Command(LabCommand):
    """This class defines the simulate command."""

    help = 'Run simulations from JSON configuration files, each into its own run directory.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('configs', nargs='+', help='The configuration files.')
        parser.add_argument('--sweep', action='store_true', help='Run the configurations in a worker pool.')
        parser.add_argument('--workers', type=int, help='The pool size, MESHSIM WORKERS by default.')
        parser.add_argument('--output', help='The output root, BLOWUPLAB_OUT by default.')
        parser.add_argument('--no-fit', action='store_true', help='Store the trace without fitting the rate.')

    def run(self, recorder, **options):
        """Validate every file first, then run."""
        configs = [read_config(path) for path in options['configs']]
        root = None if options['output'] is None else Path(options['output'])
        fit = not options['no_fit']

        summaries = []
        if options['sweep'] and len(configs) > 1:
            workers = options['workers'] or settings.BLOWUPLAB['MESHSIM']['WORKERS']
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(simulate, config, root, fit) for config in configs]
                for future in as_completed(futures):
                    summaries.append(self.report(future.result()))
        else:
            for config in configs:
                summaries.append(self.report(simulate(config, root, fit)))

        for summary in summaries:
            recorder.add_directory(summary['directory'], summary['digest'])
        failed = [summary for summary in summaries if summary['error']]
        if failed:
            raise CommandError('; '.join(f"{summary['directory']}: {summary['error']}" for summary in failed))

    def report(self, summary: dict) -> dict:
        """Print the outcome of one run."""
        if summary['error']:
            self.stderr.write(f"{summary['directory']}: {summary['error']}")
        elif summary['fit']:
            fit = summary['fit']
            shape = f"beta={fit['beta']:.6g}" if fit['kind'] == 'power' else f"C={fit['C']:.6g} s0={fit['s0']:.6g}"
            self.stdout.write(self.style.SUCCESS(f"{summary['directory']}: {summary['status']}, {fit['kind']} fit "
                                                 f"T={fit['blowup_time']:.12g} {shape}"))
        else:
            self.stdout.write(f"{summary['directory']}: {summary['status']}")
        return summary

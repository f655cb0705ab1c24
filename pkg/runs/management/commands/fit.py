"""This module defines the command fitting the blow-up rate of a stored run."""
from meshsim.fitting import fit_log, fit_power, fit_trace
from meshsim.serializers import FitResultSerializer
from meshsim.storage import RunDirectory
from runs.commands import LabCommand


class Command(LabCommand):
    """This class defines the fit command."""

    help = 'Fit the blow-up rate of a run directory and write its fit.json.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('run_dir', help='The run directory.')
        parser.add_argument('--kind', choices=['auto', 'power', 'log'], default='auto',
                            help='The rate model, chosen from the regime of (d, k) by default.')
        parser.add_argument('--decades', type=float, help='The power-fit window in decades of T-t.')
        parser.add_argument('--efoldings', type=float, help='The log-fit window in e-foldings of T-t.')

    def run(self, recorder, **options):
        """Fit, store and print the result."""
        directory = RunDirectory(options['run_dir'])
        trace = directory.read_trace()
        recorder.add_directory(directory.path, trace.config.digest())
        if options['kind'] == 'power':
            result = fit_power(trace, decades=options['decades'])
        elif options['kind'] == 'log':
            result = fit_log(trace, efoldings=options['efoldings'])
        else:
            result = fit_trace(trace, decades=options['decades'], efoldings=options['efoldings'])
        directory.write_fit(result)
        self.emit(dict(FitResultSerializer(result).data))

"""This module defines the command printing the predicted blow-up rate of (d, k, N)."""
from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from meshsim.storage import output_root, write_csv, write_json
from params.parameters import beta_curve
from rates.pipeline import predict, prediction_payload
from rates.serializers import PredictionSerializer
from runs.commands import LabCommand


class Command(LabCommand):
    """This class defines the predict command."""

    help = 'Predict the blow-up rate of the construction (d, k, N) and tabulate its constants.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('--d', type=float, help='The dimension.')
        parser.add_argument('--k', type=int, required=True, help='The corotational degree.')
        parser.add_argument('--N', type=int, required=True, help='The eigen-index.')
        parser.add_argument('--sweep-d', type=float, nargs=3, metavar=('START', 'STOP', 'STEP'),
                            help='Tabulate beta_N(d) over a range of dimensions instead.')
        parser.add_argument('--json', action='store_true', help='Print the JSON payload only.')
        parser.add_argument('--output', help='The output directory, under the output root by default.')

    def run(self, recorder, **options):
        """Predict one rate law or tabulate beta_N(d)."""
        k, index = options['k'], options['N']
        directory = output_root() / 'predictions' if options['output'] is None else Path(options['output'])
        directory.mkdir(parents=True, exist_ok=True)
        recorder.add_directory(directory)

        if options['sweep_d']:
            start, stop, step = options['sweep_d']
            dimensions = np.arange(start, stop + 0.5 * step, step)
            rows = beta_curve(k, index, dimensions)
            path = directory / f'beta_curve-k{k}-N{index}.csv'
            write_csv(path, ['d', 'beta'], rows)
            self.stdout.write(self.style.SUCCESS(f'{len(rows)} values of beta_{index}(d) written to {path}'))
            return

        if options['d'] is None:
            raise CommandError('--d is required unless --sweep-d is given')
        prediction = predict(options['d'], k, index)
        payload = PredictionSerializer(prediction_payload(prediction)).data
        write_json(directory / f"prediction-d{options['d']:g}-k{k}-N{index}.json", payload)
        if options['json']:
            self.emit(payload)
            return
        law = payload['rate_law']
        self.stdout.write(f"d={payload['d']:g} k={payload['k']} N={payload['N']} regime={payload['regime']}")
        self.stdout.write(self.style.SUCCESS(f"{law['kind']} law, exponent {law['exponent']:.10g}, "
                                             f"prefactor {law['prefactor']:.10g}, free parameter "
                                             f"{law['free_parameter']}"))
        for name, value in payload['constants'].items():
            self.stdout.write(f'  {name} = {value}')

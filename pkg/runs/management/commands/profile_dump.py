"""This module defines the command writing the profile orbit of (d, k)."""
from pathlib import Path

from meshsim.storage import output_root, write_json
from params.parameters import ModelParams
from profiles.harmonic_map import export_orbit_csv, solve_profile
from runs.commands import LabCommand


class Command(LabCommand):
    """This class defines the profile_dump command."""

    help = 'Integrate the harmonic map profile of (d, k) and write its orbit as x, v, vPrime rows.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('--d', type=float, required=True, help='The dimension.')
        parser.add_argument('--k', type=int, required=True, help='The corotational degree.')
        parser.add_argument('--output', help='The csv file, under the output root by default.')

    def run(self, recorder, **options):
        """Solve the profile and write the orbit."""
        d, k = options['d'], options['k']
        sol = solve_profile(ModelParams(d, k))
        if options['output'] is None:
            path = output_root() / 'profiles' / f'orbit-d{d:g}-k{k}.csv'
        else:
            path = Path(options['output'])
        path.parent.mkdir(parents=True, exist_ok=True)
        export_orbit_csv(sol, path)
        write_json(path.with_suffix('.json'), {'d': d, 'k': k, 'h': sol.h, 'h_minus': sol.h_minus, 'Cs': sol.cs,
                                               'fit_residual': sol.fit_residual, 'samples': int(sol.grid.size)})
        recorder.add_directory(path.parent)
        self.stdout.write(f'h = {sol.h!r}')
        self.stdout.write(f'Cs = {sol.cs!r}')
        self.stdout.write(self.style.SUCCESS(f'{sol.grid.size} orbit samples written to {path}'))

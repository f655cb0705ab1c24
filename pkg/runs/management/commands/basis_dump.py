"""This module defines the command writing the eigenfunctions of (d, k)."""
from pathlib import Path

from meshsim.storage import output_root, write_json
from params.parameters import ModelParams
from runs.commands import LabCommand
from spectral.basis import build_basis, export_basis_csv


class Command(LabCommand):
    """This class defines the basis_dump command."""

    help = 'Build the eigenbasis of (d, k) and write phi_0..phi_max_n on a diagnostic grid.'

    def add_arguments(self, parser):
        """Declare the options."""
        parser.add_argument('--d', type=float, required=True, help='The dimension.')
        parser.add_argument('--k', type=int, required=True, help='The corotational degree.')
        parser.add_argument('--max-n', type=int, default=4, help='The largest index.')
        parser.add_argument('--output', help='The csv file, under the output root by default.')

    def run(self, recorder, **options):
        """Build the basis and write it."""
        d, k, max_n = options['d'], options['k'], options['max_n']
        basis = build_basis(ModelParams(d, k), max_n)
        if options['output'] is None:
            path = output_root() / 'bases' / f'basis-d{d:g}-k{k}-n{max_n}.csv'
        else:
            path = Path(options['output'])
        path.parent.mkdir(parents=True, exist_ok=True)
        export_basis_csv(basis, path)
        write_json(path.with_suffix('.json'), {'d': d, 'k': k, 'max_n': max_n, 'nodes': basis.nodes,
                                               'orthonormality_residual': basis.orthonormality_residual})
        recorder.add_directory(path.parent)
        self.stdout.write(f'orthonormality residual = {basis.orthonormality_residual:.3e}')
        self.stdout.write(self.style.SUCCESS(f'phi_0..phi_{max_n} written to {path}'))

"""This module runs one configuration into its run directory, in the caller or in a worker process."""
import logging

from blowuplab.exceptions import LabError
from meshsim.config import SimConfig
from meshsim.fitting import fit_trace
from meshsim.serializers import FitResultSerializer
from meshsim.solver import run
from meshsim.storage import RunDirectory

logger = logging.getLogger(__name__)


def simulate(config: SimConfig, root=None, fit: bool = True) -> dict:
    """
    Run a configuration, store the trace and fit the rate when the gradient limit was reached.

    Args:
        config (SimConfig): The configuration.
        root (Path): The output root, the configured one by default.
        fit (bool): Fit the rate after a blow-up.

    Returns:
        dict: The directory, the status, the fit and the error message of a failed stage.
    """
    directory = RunDirectory.create(config, root=root)
    summary = {'directory': str(directory.path), 'digest': config.digest(), 'status': None, 'fit': None,
               'error': None}
    try:
        trace = run(config)
    except LabError as error:
        logger.error("run in %s failed: %s", directory.path, error)
        summary['error'] = f'{type(error).__name__}: {error}'
        return summary
    directory.write_trace(trace)
    summary['status'] = trace.status
    if fit and trace.blew_up:
        try:
            result = fit_trace(trace)
        except LabError as error:
            logger.warning("fit in %s failed: %s", directory.path, error)
            summary['error'] = f'{type(error).__name__}: {error}'
            return summary
        directory.write_fit(result)
        summary['fit'] = dict(FitResultSerializer(result).data)
    return summary

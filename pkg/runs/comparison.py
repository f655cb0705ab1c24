"""
This module compares stored runs with the predicted rates.

For a power law the fitted beta is compared with beta_N. For the logarithmic law the fitted C is the
slope of sqrt(T-t) u_r(0, t) against -log(T-t); since R = 1 / u_r(0, t), it is compared with
1 / (C_s C_N), the inverse prefactor of the predicted R.
"""
import logging
import math
from typing import List

from django.conf import settings

from meshsim.exceptions import NoBlowup
from meshsim.fitting import fit_trace, rate_curve
from meshsim.selfsimilar import compare_ansatz, epsilon_from_gradient, to_self_similar
from meshsim.serializers import FitResultSerializer
from meshsim.storage import RunDirectory, write_csv, write_json
from params.parameters import ModelParams, classify
from rates.dynamics import RateKind
from rates.pipeline import cached_prediction

logger = logging.getLogger(__name__)


def predicted_quantity(prediction) -> tuple:
    """Return the name and the predicted value of the fitted quantity."""
    law = prediction.rate_law
    if law.kind is RateKind.POWER:
        return 'beta', law.exponent - 0.5
    return 'C', 1.0 / law.prefactor


def overlays(directory: RunDirectory, trace, result, prediction, index: int) -> List[dict]:
    """Write one f-versus-f_N overlay per snapshot that leaves room for [2 eps, 1]."""
    ceiling = settings.BLOWUPLAB['RATES']['MAX_EPSILON0']
    rows = []
    for number, snapshot in enumerate(trace.snapshots):
        remaining = trace.lag[snapshot.index] + result.remaining_time
        gradient = snapshot.dr_u0 if trace.config.k == 1 else snapshot.sup_gradient
        epsilon = epsilon_from_gradient(prediction.profile.cs, remaining, gradient)
        scaled = to_self_similar(snapshot.state, remaining_time=remaining)
        if not 0.0 < epsilon <= ceiling or 2.0 * epsilon >= min(1.0, scaled.y[-1]):
            continue
        overlay = compare_ansatz(scaled, prediction.profile, prediction.basis, index, epsilon)
        write_csv(directory.path / 'compare' / f'overlay_{number:03d}.csv', ['y', 'simulated', 'ansatz'],
                  zip(overlay.y, overlay.simulated, overlay.ansatz))
        rows.append({'snapshot': number, 's': overlay.s, 'epsilon': epsilon, 'distance': overlay.distance})
    return rows


def compare_run(directory: RunDirectory) -> dict:
    """
    Compare one run with its prediction and write its compare/ folder.

    Returns:
        dict: The report, with an error entry when the run did not blow up.
    """
    trace = directory.read_trace()
    config = trace.config
    params = ModelParams(float(config.d), config.k)
    index = classify(params).min_admissible_index
    report = {'run': str(directory.path), 'd': float(config.d), 'k': config.k, 'N': index, 'status': trace.status,
              'energy_violations': trace.energy_violations}
    try:
        result = directory.read_fit() or fit_trace(trace)
    except NoBlowup as error:
        report['error'] = f'NoBlowup: {error}'
        return report

    prediction = cached_prediction(float(config.d), config.k, index)
    quantity, predicted = predicted_quantity(prediction)
    fitted = result.beta if quantity == 'beta' else result.C
    report.update({
        'fit': dict(FitResultSerializer(result).data),
        'quantity': quantity,
        'predicted': predicted,
        'fitted': fitted,
        'ratio': None if fitted is None else fitted / predicted,
        'relative_error': None if fitted is None else abs(fitted / predicted - 1.0),
        'min_origin_ratio': min((snapshot.origin_ratio for snapshot in trace.snapshots), default=None),
    })

    folder = directory.path / 'compare'
    folder.mkdir(exist_ok=True)
    x, y = rate_curve(trace, result)
    write_csv(folder / 'rate_curve.csv', ['minus_log_remaining', 'scaled_gradient'], zip(x, y))
    report['overlays'] = overlays(directory, trace, result, prediction, index)
    write_json(folder / 'report.json', report)
    logger.info("compared %s: %s fitted %s, predicted %.6g", directory.path, quantity, fitted, predicted)
    return report


def agreement(reports: List[dict]) -> dict:
    """Return the spread of the fitted quantity among runs of the same (d, k)."""
    groups = {}
    for report in reports:
        if report.get('fitted') is not None:
            groups.setdefault((report['d'], report['k'], report['quantity']), []).append(report['fitted'])
    rows = []
    for (d, k, quantity), values in sorted(groups.items()):
        if len(values) < 2:
            continue
        spread = max(values) / min(values) - 1.0 if min(values) > 0.0 else math.inf
        rows.append({'d': d, 'k': k, 'quantity': quantity, 'values': values, 'spread': spread})
    return {'groups': rows}

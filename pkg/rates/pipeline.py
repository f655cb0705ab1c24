"""This module chains params, profile, spectral and coupling into a rate prediction."""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional

from coupling.integrals import CouplingConstants, coupling_constants
from params.parameters import (
    Classification, DerivedConstants, ModelParams, SpectrumEntry, classify, derive, eigenvalue
)
from profiles.harmonic_map import ProfileSolution, solve_profile
from rates.dynamics import RateKind, RateLaw, ReducedConstants, check_eigenvalue, predict_rate, reduced_constants
from spectral.basis import EigenBasis, build_basis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Prediction:
    """
    This class defines every stage behind a predicted rate.

    Attributes:
        params (ModelParams): The parameter point with its index.
        constants (DerivedConstants): gamma, omega, delta and the regime.
        spectrum (list(SpectrumEntry)): lambda_n and beta_n up to the basis size.
        classification (Classification): The admissible indices.
        profile (ProfileSolution): The profile orbit.
        basis (EigenBasis): The eigenbasis.
        coupling (CouplingConstants): D_n.
        reduced (ReducedConstants): The constants of the eps dynamics.
        rate_law (RateLaw): The prediction.
    """

    params: ModelParams
    constants: DerivedConstants
    spectrum: List[SpectrumEntry]
    classification: Classification
    profile: ProfileSolution
    basis: EigenBasis
    coupling: CouplingConstants
    reduced: ReducedConstants
    rate_law: RateLaw


def predict(d: float, k: int, index: int, max_n: Optional[int] = None) -> Prediction:
    """
    Run the asymptotics pipeline for (d, k, N).

    Args:
        d (float): The dimension.
        k (int): The degree.
        index (int): N.
        max_n (int): The largest tabulated index, N+2 by default.

    Returns:
        Prediction: The rate law with its intermediate stages.
    """
    params = ModelParams(d, k, index)
    if not float(d).is_integer():
        logger.warning("d=%g is not an integer: the map has no geometric meaning", d)
    constants = derive(params)
    check_eigenvalue(eigenvalue(params, index).eigenvalue, index)
    max_n = index + 2 if max_n is None else max_n

    profile = solve_profile(params)
    basis = build_basis(params, max_n)
    coupling = coupling_constants(profile, basis, index)
    rate_law = predict_rate(params, index, profile, basis, coupling)
    logger.info("prediction d=%g k=%d N=%d: %s law, exponent %.10g", d, k, index, rate_law.kind.value,
                rate_law.exponent)
    return Prediction(
        params=params,
        constants=constants,
        spectrum=[eigenvalue(params, n) for n in range(max_n + 1)],
        classification=classify(params),
        profile=profile,
        basis=basis,
        coupling=coupling,
        reduced=reduced_constants(profile, basis, coupling),
        rate_law=rate_law,
    )


@lru_cache(maxsize=32)
def cached_prediction(d: float, k: int, index: int) -> Prediction:
    """Return the prediction for (d, k, N), computed once per process."""
    return predict(d, k, index)


def constants_table(prediction: Prediction) -> dict:
    """Return gamma, omega, delta, lambda_n, h, C_s, c_N, D_N and C_N, the last one only for a logarithmic law."""
    reduced = prediction.reduced
    logarithmic = prediction.rate_law.kind is RateKind.LOGARITHMIC
    return {
        'gamma': prediction.constants.gamma,
        'omega': prediction.constants.omega,
        'delta': prediction.constants.delta,
        'lambda_n': [entry.eigenvalue for entry in prediction.spectrum],
        'beta_n': [entry.beta for entry in prediction.spectrum],
        'h': prediction.profile.h,
        'Cs': prediction.profile.cs,
        'cN': reduced.c_index,
        'DN': reduced.d_index,
        'CN': reduced.scale if logarithmic else None,
    }


def prediction_payload(prediction: Prediction) -> dict:
    """Return the data behind the prediction serializer."""
    return {
        'd': prediction.params.d,
        'k': prediction.params.k,
        'N': prediction.params.index,
        'regime': prediction.constants.regime.value,
        'rate_law': prediction.rate_law,
        'constants': constants_table(prediction),
    }

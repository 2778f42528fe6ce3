""" The analytic phase diagram of φ ≍ ρ nᵅ / tᵝ

Off the curve α = 2β − 1 the walk is recurrent when α < min(β, 2β − 1) and
transient when 0 ≤ β < 1 and 2β − 1 < α < β. On the curve the diagonal
statistic is the constant 4 · scale · ρ, so the threshold is scale · ρ = 1/4.
Exponential drifts vanish fast enough to be recurrent everywhere.
"""

import math

from bdwalk.classifier.verdicts import Label
from bdwalk.drift.functions import Exponential, PowerLaw


TOLERANCE = 1e-9

# comment lines of the phase dataset
BOUNDARIES = (
    'boundary: alpha = 2*beta - 1 for beta < 1',
    'boundary: alpha = beta',
)


def on_curve(drift):
    """ Whether a power law lies on α = 2β − 1 with α ≤ β

    >>> on_curve(PowerLaw.linear(0.3))
    True
    >>> on_curve(PowerLaw(1, 0.5, 0.6))
    False
    """
    if not isinstance(drift, PowerLaw):
        return False
    return abs(1 + drift.alpha - 2 * drift.beta) <= TOLERANCE and drift.beta <= 1


def critical_rho(drift):
    """ ρ at which a power law on the curve changes type

    >>> critical_rho(PowerLaw.linear(0.3))
    0.5
    """
    return 1 / (4 * drift.scale)


def expected_label(drift):
    """ The analytic label of a drift, None where the analysis is silent

    >>> expected_label(PowerLaw(1, 0.5, 0.6))
    <Label.TRANSIENT: 'Transient'>
    >>> expected_label(PowerLaw(1, 0, 0.75))
    <Label.RECURRENT: 'Recurrent'>
    """
    if isinstance(drift, Exponential):
        return Label.RECURRENT

    if not isinstance(drift, PowerLaw):
        return None

    alpha, beta = drift.alpha, drift.beta

    if on_curve(drift):
        gap = drift.rho - critical_rho(drift)
        if abs(gap) <= TOLERANCE:
            return None
        return Label.RECURRENT if gap < 0 else Label.TRANSIENT

    if alpha < min(beta, 2 * beta - 1):
        return Label.RECURRENT

    if 0 <= beta < 1 and 2 * beta - 1 < alpha < beta:
        return Label.TRANSIENT

    return None


def boundary_distance(drift):
    """ Distance of a power law from the nearest boundary

    In the (α, β) plane this is the Euclidean distance to the lines
    α = 2β − 1 and α = β. Points on the curve are measured along ρ instead,
    by their distance to the critical ρ.

    >>> round(boundary_distance(PowerLaw.linear(0.45)), 12)
    0.05
    """
    if not isinstance(drift, PowerLaw):
        return None

    if on_curve(drift):
        return abs(drift.rho - critical_rho(drift))

    alpha, beta = drift.alpha, drift.beta
    to_curve = abs(alpha - (2 * beta - 1)) / math.sqrt(5)
    to_diagonal = abs(alpha - beta) / math.sqrt(2)
    return min(to_curve, to_diagonal)


def outside_region(drift):
    """ Whether the analysis makes no statement about a drift

    True for power laws off both boundaries where no label is predicted,
    e.g. β ≥ 1 on the transient side of α = 2β − 1, and for families the
    analysis does not cover. """
    if expected_label(drift) is not None:
        return False

    distance = boundary_distance(drift)
    return distance is None or distance > TOLERANCE


def exponents(drift):
    """ (α, β, ρ) of a drift, None for the values it does not have """
    alpha = getattr(drift, 'alpha', None)
    beta = getattr(drift, 'beta', None)
    rho = getattr(drift, 'rho', None)
    return alpha, beta, rho

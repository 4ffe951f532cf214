"""Sobolev classification of the half-disk eigenfields near the center.

The total gradient energy of all Cartesian components over the annulus
eps < r < 1 either saturates (the field is H1 across the center) or grows
like a power of 1/eps.  Fitting the log-log slope of that energy against a
shrinking sequence of inner radii separates the two cases without ever
evaluating at the singular point.

Quadrature is midpoint in the log radius, with node count growing as the
annulus deepens, and midpoint in angle, which integrates the half-integer
harmonic products exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum2d import analytic_eigenform, cartesian_components

HALF_ARC = math.pi
SLOPE_H1 = -0.1
SLOPE_SINGULAR = -0.5
QUALITY_GATE = 0.9
FLAT_VARIATION = 0.05
LADDER_RATIO = 4.0
FIT_TAIL = 3


def annulus_gradient_energy(
    components: dict, eps: float, M_phi: int = 64,
    nodes_per_unit: int = 48, nodes_base: int = 32,
) -> float:
    """Sum over components and axes of the squared partials, eps < r < 1."""
    if not 0 < eps < 1:
        raise ValueError("the inner radius must lie in (0, 1)")
    span = -math.log(eps)
    M_t = nodes_base + int(math.ceil(nodes_per_unit * span))
    dt = span / M_t
    t = math.log(eps) + (np.arange(M_t) + 0.5) * dt
    r = np.exp(t)
    h_phi = HALF_ARC / M_phi
    phi = (np.arange(M_phi) + 0.5) * h_phi
    rg, pg = r[:, None], phi[None, :]
    # the log substitution turns r dr into r^2 dt
    weight = (r**2 * dt)[:, None] * h_phi

    total = 0.0
    for ps in components.values():
        for axis in (1, 2):
            vals = ps.cartesian_partial(axis)(rg, pg)
            total += float(np.sum(weight * np.abs(vals) ** 2))
    return total


@dataclass
class RegularityReport:
    eps: np.ndarray
    seminorms: np.ndarray
    slope: float
    quality: float
    verdict: str


def classify_components(
    components: dict, levels: int = 6, eps_start: float = 0.2
) -> RegularityReport:
    """Fit the energy growth slope and call the verdict.

    Slope near zero means the energy saturates (H1); slope at or below the
    singular threshold means power-law growth.  Only the deepest annuli enter
    the fit: the coarse levels sit in a transition region where a saturating
    constant competes with the power law and the slope reads shallow.  The
    quality gate throws out unreliable fits, except that an essentially
    constant tail is perfect saturation no matter what R^2 says of it.
    """
    if levels < FIT_TAIL:
        raise ValueError(f"need at least {FIT_TAIL} annuli for a slope")
    eps = eps_start * LADDER_RATIO ** -np.arange(levels)
    values = np.array(
        [annulus_gradient_energy(components, e) for e in eps]
    )
    x = np.log(eps[-FIT_TAIL:])
    y = np.log(values[-FIT_TAIL:])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - fitted) ** 2))
    if float(np.max(y) - np.min(y)) < FLAT_VARIATION:
        quality = 1.0
        slope = 0.0
    else:
        quality = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    if quality < QUALITY_GATE:
        verdict = "indeterminate"
    elif slope >= SLOPE_H1:
        verdict = "H1"
    elif slope <= SLOPE_SINGULAR:
        verdict = "not-H1"
    else:
        verdict = "indeterminate"
    return RegularityReport(
        eps=eps, seminorms=values, slope=float(slope),
        quality=float(quality), verdict=verdict,
    )


def classify(q: int, n: int, m: int, role: str = "E", levels: int = 6) -> RegularityReport:
    mode = analytic_eigenform(q, n, m, role)
    return classify_components(cartesian_components(mode), levels=levels)


def expected_verdict(q: int, n: int, role: str) -> str:
    """The analytic answer: the derivative partner of the lowest angular
    order carries r^(-1/2) components, whose gradients just miss square
    integrability; every other combination stays H1."""
    singular = (q == 0 and role == "H") or (q == 1 and role == "E")
    return "not-H1" if singular and n == 1 else "H1"

import math

import numpy as np
import pytest

from maxforms.regularity import (
    annulus_gradient_energy,
    classify,
    classify_components,
    expected_verdict,
)
from maxforms.spectrum2d import (
    AngularPart,
    AngularTerm,
    PolarScalar,
    RadialPart,
    RadialTerm,
    analytic_eigenform,
    cartesian_components,
)


def test_every_family_member_classifies_as_expected():
    for q in (0, 1):
        for role in ("E", "H"):
            for n in (1, 2, 3):
                for m in (1, 2):
                    rep = classify(q, n, m, role)
                    assert rep.verdict == expected_verdict(q, n, role), (q, role, n, m)
                    assert rep.verdict != "indeterminate"


def test_singular_members_have_unit_slope():
    for (q, role) in ((0, "H"), (1, "E")):
        for m in (1, 2):
            rep = classify(q, 1, m, role)
            assert abs(rep.slope + 1.0) <= 0.2
            assert rep.quality >= 0.99


def test_regular_members_have_flat_tails():
    for (q, n, m, role) in [(0, 1, 1, "E"), (0, 2, 1, "H"), (1, 2, 2, "E"), (1, 1, 1, "H")]:
        rep = classify(q, n, m, role)
        assert rep.slope >= -0.05


def test_flat_exemption_engages_for_saturated_energy():
    rep = classify(1, 3, 1, "H")
    assert rep.quality == 1.0
    assert rep.slope == 0.0
    assert rep.verdict == "H1"


def test_energy_matches_closed_form_for_linear_field():
    # f = r cos(phi) = x1 has gradient (1, 0), so the energy over the
    # half annulus is pi (1 - eps^2) / 2 exactly
    linear = PolarScalar(
        [(RadialPart([RadialTerm(1.0, 1.0)]), AngularPart([AngularTerm(1.0, 1.0, 0.0)]))]
    )
    for eps in (0.2, 0.05):
        val = annulus_gradient_energy({(): linear}, eps)
        expected = math.pi * (1.0 - eps**2) / 2.0
        assert abs(val - expected) <= 1e-4 * expected


def test_seminorms_scale_quadratically_and_verdict_is_invariant():
    comps = cartesian_components(analytic_eigenform(0, 1, 1, "H"))
    scaled = {k: ps.scaled(3.0 - 4.0j) for k, ps in comps.items()}
    base = classify_components(comps)
    other = classify_components(scaled)
    ratio = other.seminorms / base.seminorms
    assert np.max(np.abs(ratio - 25.0)) <= 1e-10 * 25.0
    assert abs(other.slope - base.slope) <= 1e-10
    assert other.verdict == base.verdict


def test_energy_grows_as_annulus_deepens():
    comps = cartesian_components(analytic_eigenform(1, 1, 1, "E"))
    rep = classify_components(comps)
    assert np.all(np.diff(rep.seminorms) > 0)  # eps decreasing, energy rising
    assert np.all(np.diff(rep.eps) < 0)


def test_validation():
    comps = cartesian_components(analytic_eigenform(0, 1, 1, "E"))
    with pytest.raises(ValueError):
        annulus_gradient_energy(comps, 0.0)
    with pytest.raises(ValueError):
        annulus_gradient_energy(comps, 1.0)
    with pytest.raises(ValueError):
        classify_components(comps, levels=2)

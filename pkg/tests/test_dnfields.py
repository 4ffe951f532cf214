import math

import numpy as np
import pytest

from maxforms.dnfields import (
    ArcPartition,
    DimensionReport,
    arcs_from_string,
    build_basis,
    dimension_check,
    disk_mesh,
    gradient_dimension,
    mesh_euler_characteristic,
    p1_stiffness,
    solve_pinned,
)

PART3 = ArcPartition(((0.2, 1.1), (1.9, 2.8), (4.0, 5.2)))


def equal_arcs(K: int, fill: float = 0.6) -> ArcPartition:
    starts = np.arange(K) * 2 * math.pi / K
    return ArcPartition(tuple((s, s + fill * 2 * math.pi / K) for s in starts))


# -- partition ---------------------------------------------------------------


def test_partition_validation():
    with pytest.raises(ValueError):
        ArcPartition(())
    with pytest.raises(ValueError):
        ArcPartition(((1.0, 1.0),))  # empty arc
    with pytest.raises(ValueError):
        ArcPartition(((0.0, 7.0),))  # wraps the circle
    with pytest.raises(ValueError):
        ArcPartition(((0.0, 2.0), (1.5, 3.0)))  # overlap
    with pytest.raises(ValueError):
        ArcPartition(((0.0, 2.0), (2.0, 3.0)))  # touching, no open gap
    with pytest.raises(ValueError):
        ArcPartition(((0.5, 2.0), (3.0, 2 * math.pi + 0.5)))  # wraps onto first
    assert PART3.count == 3


def test_arc_membership():
    assert PART3.arc_index(0.2) == 0  # closed arcs contain their endpoints
    assert PART3.arc_index(1.1) == 0
    assert PART3.arc_index(2.3) == 1
    assert PART3.arc_index(1.5) == -1
    assert PART3.arc_index(5.2 + 2 * math.pi) == 2  # wrapped query


def test_arcs_from_string():
    part = arcs_from_string("0.2:1.1,1.9:2.8")
    assert part.count == 2
    with pytest.raises(ValueError):
        arcs_from_string("0.2:abc")


def test_rotation_moves_anchor_with_the_partition():
    for alpha in (0.7, 2.31, -1.4):
        rotated = PART3.rotated(alpha)
        expected = (PART3.anchor + alpha) % (2 * math.pi)
        assert abs((rotated.anchor - expected + math.pi) % (2 * math.pi) - math.pi) <= 1e-9


# -- mesh --------------------------------------------------------------------


def test_mesh_is_a_disk():
    mesh = disk_mesh(PART3, 0.1)
    assert mesh_euler_characteristic(mesh) == 1
    radii = np.linalg.norm(mesh.points[mesh.boundary_nodes], axis=1)
    assert np.max(np.abs(radii - 1.0)) <= 1e-12
    assert mesh.interior_count > 0


def test_mesh_contains_arc_endpoints_exactly():
    mesh = disk_mesh(PART3, 0.1)
    angles = np.sort(mesh.boundary_angles)
    for e in PART3.endpoints():
        dev = np.abs(((angles - e + math.pi) % (2 * math.pi)) - math.pi)
        assert np.min(dev) <= 1e-12


def test_boundary_spacing_bounded():
    mesh = disk_mesh(PART3, 0.1)
    angles = np.sort(mesh.boundary_angles)
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
    assert np.max(gaps) <= mesh.spacing * (1.0 + 1e-6)


def test_mesh_spacing_validation():
    with pytest.raises(ValueError):
        disk_mesh(PART3, 0.0)
    with pytest.raises(ValueError):
        disk_mesh(PART3, 0.7)


# -- assembly and solves -----------------------------------------------------


def test_stiffness_symmetric_with_constant_kernel():
    mesh = disk_mesh(PART3, 0.1)
    A = p1_stiffness(mesh)
    assert abs(A - A.T).max() == 0.0
    assert np.max(np.abs(A @ np.ones(A.shape[0]))) <= 1e-12


def test_linear_fields_are_reproduced_exactly():
    # P1 elements contain linears, so pinning x on the whole boundary must
    # return x everywhere up to solver roundoff
    mesh = disk_mesh(PART3, 0.1)
    A = p1_stiffness(mesh)
    values = mesh.points[mesh.boundary_nodes, 0]
    x, res = solve_pinned(A, mesh.boundary_nodes, values)
    assert np.max(np.abs(x - mesh.points[:, 0])) <= 1e-10
    assert res <= 1e-10


def test_potentials_partition_unity_and_stay_in_range():
    basis = build_basis(PART3, h=0.05)
    assert np.max(np.abs(basis.potentials.sum(axis=1) - 1.0)) <= 1e-10
    assert basis.potentials.min() >= -1e-10
    assert basis.potentials.max() <= 1.0 + 1e-10
    assert np.max(basis.residuals) <= 1e-10


def test_potentials_hit_their_boundary_values():
    basis = build_basis(PART3, h=0.1)
    mesh = basis.mesh
    for k in range(3):
        for node, theta in zip(mesh.boundary_nodes, mesh.boundary_angles):
            idx = PART3.arc_index(theta)
            if idx >= 0:
                expected = 1.0 if idx == k else 0.0
                assert basis.potentials[node, k] == expected


def test_gram_kernel_is_the_constant_direction():
    basis = build_basis(PART3, h=0.05)
    ones = np.ones(3)
    s = np.linalg.svd(basis.gram, compute_uv=False)
    assert np.linalg.norm(basis.gram @ ones) <= 1e-12 * s[0]


# -- dimension ---------------------------------------------------------------


def test_dimension_check_unit_cases():
    rep = dimension_check(np.zeros((2, 2)))
    assert rep.rank == 0 and math.isinf(rep.gap)
    rep = dimension_check(np.eye(3))
    assert rep.rank == 3
    rep = dimension_check(np.diag([1.0, 1e-20]))
    assert rep.rank == 1


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_gradient_span_has_dimension_arcs_minus_one(K):
    rep = gradient_dimension(equal_arcs(K), h=0.1)
    assert rep.rank == K - 1
    if K == 1:
        assert math.isinf(rep.gap)
    else:
        assert rep.gap >= 1e6


def test_dimension_stable_under_refinement():
    s_coarse = np.linalg.svd(build_basis(PART3, h=0.1).gram, compute_uv=False)
    fine = build_basis(PART3, h=0.05)
    s_fine = np.linalg.svd(fine.gram, compute_uv=False)
    assert dimension_check(fine.gram).rank == 2
    assert np.max(np.abs(s_fine[:2] - s_coarse[:2]) / s_fine[:2]) <= 0.05


def test_spectrum_is_rotation_invariant():
    s1 = np.linalg.svd(build_basis(PART3, h=0.05).gram, compute_uv=False)
    for alpha in (2.31, -1.4):
        s2 = np.linalg.svd(
            build_basis(PART3.rotated(alpha), h=0.05).gram, compute_uv=False
        )
        assert np.max(np.abs(s1[:2] - s2[:2]) / s1[:2]) <= 1e-12


def test_symmetric_partition_rotates_cleanly():
    # equal arcs tie the anchor choice; any pick is congruent by symmetry
    part = equal_arcs(4, fill=0.45)
    s1 = np.linalg.svd(build_basis(part, h=0.05).gram, compute_uv=False)
    s2 = np.linalg.svd(build_basis(part.rotated(1.234), h=0.05).gram, compute_uv=False)
    assert np.max(np.abs(s1[:3] - s2[:3]) / s1[:3]) <= 1e-12


def test_too_coarse_mesh_is_rejected():
    starts = np.arange(40) * 2 * math.pi / 40
    arcs = tuple((s, s + 0.5 * 2 * math.pi / 40) for s in starts)
    with pytest.raises(ValueError):
        build_basis(ArcPartition(arcs), h=0.3)

"""Harmonic fields on the disk driven by a partition of the boundary circle.

The boundary splits into K closed arcs (value-pinned) separated by open gaps
(natural).  For each arc there is one potential: 1 on that arc, 0 on the other
arcs, free in the gaps.  The potentials sum to the constant 1, so their
gradients span a space of dimension exactly K - 1; measuring that dimension
from the discrete energy Gram matrix is the point of this module.

Everything is variational: a P1 triangulation of the disk, assembled sparse
stiffness, pinned rows eliminated.  The mesh is a web of concentric rings
whose angular layout is anchored at the first arc endpoint, so congruent
partitions produce congruent meshes and the spectrum is rotation invariant
to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

TWO_PI = 2.0 * math.pi
_ANGLE_TOL = 1e-9


# ---------------------------------------------------------------------------
# boundary partition


@dataclass(frozen=True)
class ArcPartition:
    """Disjoint closed arcs (start, end) in radians, end > start, length < 2 pi."""

    arcs: tuple

    def __post_init__(self):
        arcs = tuple((float(a), float(b)) for a, b in self.arcs)
        if not arcs:
            raise ValueError("at least one arc is required")
        for a, b in arcs:
            if not b > a:
                raise ValueError("arc end must exceed arc start")
            if b - a >= TWO_PI:
                raise ValueError("an arc cannot wrap the full circle")
        # normalize starts into [0, 2 pi) and check pairwise separation
        norm = sorted(((a % TWO_PI, (a % TWO_PI) + (b - a)) for a, b in arcs))
        for (a1, b1), (a2, b2) in zip(norm, norm[1:]):
            if a2 <= b1 + _ANGLE_TOL:
                raise ValueError("arcs must be separated by open gaps")
        if norm[0][0] + TWO_PI <= norm[-1][1] + _ANGLE_TOL:
            raise ValueError("arcs must be separated by open gaps")
        object.__setattr__(self, "arcs", tuple(norm))

    @property
    def count(self) -> int:
        return len(self.arcs)

    @property
    def anchor(self) -> float:
        """Start of a canonically chosen arc.

        The choice looks only at the cyclic pattern of arc and gap lengths,
        so rotating the partition moves the anchor with it; a tie means the
        partition has a rotational self-symmetry and either choice yields a
        congruent mesh.
        """
        K = len(self.arcs)
        lengths = [b - a for a, b in self.arcs]
        gaps = [
            (self.arcs[(k + 1) % K][0] - self.arcs[k][1]) % TWO_PI
            for k in range(K)
        ]
        best, best_key = 0, None
        for k in range(K):
            key = tuple(
                round(x, 9)
                for i in range(K)
                for x in (lengths[(k + i) % K], gaps[(k + i) % K])
            )
            if best_key is None or key > best_key:
                best, best_key = k, key
        return self.arcs[best][0]

    def endpoints(self) -> np.ndarray:
        return np.array(sorted(x % TWO_PI for a, b in self.arcs for x in (a, b)))

    def arc_index(self, theta: float) -> int:
        """Index of the arc containing the angle, or -1 for a gap."""
        for k, (a, b) in enumerate(self.arcs):
            if (theta - a) % TWO_PI <= (b - a) + _ANGLE_TOL:
                return k
        return -1

    def rotated(self, alpha: float) -> "ArcPartition":
        return ArcPartition(tuple((a + alpha, b + alpha) for a, b in self.arcs))


def arcs_from_string(text: str) -> ArcPartition:
    """Parse 'a1:b1,a2:b2,...' (radians) into a partition."""
    arcs = []
    for chunk in text.split(","):
        a, _, b = chunk.partition(":")
        try:
            arcs.append((float(a), float(b)))
        except ValueError as exc:
            raise ValueError(f"bad arc chunk {chunk!r}") from exc
    return ArcPartition(tuple(arcs))


# ---------------------------------------------------------------------------
# anchored web mesh


@dataclass
class DiskMesh:
    points: np.ndarray
    triangles: np.ndarray
    boundary_nodes: np.ndarray
    boundary_angles: np.ndarray
    spacing: float

    @property
    def interior_count(self) -> int:
        return len(self.points) - len(self.boundary_nodes)


def _ring_angles(count: int, anchor: float) -> np.ndarray:
    return anchor + np.arange(count) * (TWO_PI / count)


def _boundary_angles(partition: ArcPartition, h: float) -> np.ndarray:
    """Arc endpoints exactly, gaps filled so no spacing exceeds h."""
    anchor = partition.anchor
    ends = np.sort((partition.endpoints() - anchor) % TWO_PI)
    ends = np.concatenate([ends, [TWO_PI]])
    out = []
    for lo, hi in zip(ends[:-1], ends[1:]):
        gap = hi - lo
        # the small slack keeps the count stable when gap/h sits on an integer
        pieces = max(1, int(math.ceil(gap / h - 1e-9)))
        out.extend(lo + gap * np.arange(pieces) / pieces)
    return anchor + np.array(out)


def _stitch(inner_idx, inner_ang, outer_idx, outer_ang, anchor):
    """Triangulate the strip between two rings by merging angles.

    Comparison keys are quantized so that ties between rings break the same
    way for congruent inputs; this is what makes the mesh topology, and hence
    the spectrum, rotation invariant.
    """
    def rel(ang):
        return np.round((ang - anchor) % TWO_PI, 10)

    ia = np.argsort(rel(inner_ang))
    oa = np.argsort(rel(outer_ang))
    inner_idx, inner_ang = inner_idx[ia], rel(inner_ang[ia])
    outer_idx, outer_ang = outer_idx[oa], rel(outer_ang[oa])
    n, m = len(inner_idx), len(outer_idx)
    tris = []
    i = j = 0
    while i < n or j < m:
        a_next = inner_ang[i + 1] if i + 1 < n else TWO_PI + inner_ang[0]
        b_next = outer_ang[j + 1] if j + 1 < m else TWO_PI + outer_ang[0]
        if j >= m or (i < n and a_next <= b_next):
            tris.append(
                (inner_idx[i], outer_idx[j % m], inner_idx[(i + 1) % n])
            )
            i += 1
        else:
            tris.append(
                (inner_idx[i % n], outer_idx[j], outer_idx[(j + 1) % m])
            )
            j += 1
    return tris


def disk_mesh(partition: ArcPartition, h: float) -> DiskMesh:
    if not 0 < h <= 0.5:
        raise ValueError("spacing must lie in (0, 0.5]")
    rings = max(3, int(round(1.0 / h)))
    step = 1.0 / rings
    anchor = partition.anchor

    pts = [(0.0, 0.0)]
    ring_idx, ring_ang = [np.array([0])], [np.array([anchor])]
    for j in range(1, rings + 1):
        radius = j * step
        if j < rings:
            ang = _ring_angles(max(6, int(math.ceil(TWO_PI * radius / step))), anchor)
        else:
            ang = _boundary_angles(partition, step)
        start = len(pts)
        pts.extend(zip(radius * np.cos(ang), radius * np.sin(ang)))
        ring_idx.append(np.arange(start, len(pts)))
        ring_ang.append(ang)

    tris = []
    inner, inner_a = ring_idx[1], ring_ang[1]
    for k in range(len(inner)):
        tris.append((0, inner[k], inner[(k + 1) % len(inner)]))
    for j in range(1, rings):
        tris.extend(
            _stitch(ring_idx[j], ring_ang[j], ring_idx[j + 1], ring_ang[j + 1], anchor)
        )

    points = np.array(pts)
    triangles = np.array(tris, dtype=np.int64)
    # enforce positive orientation triangle by triangle
    p = points[triangles]
    u, v = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    flip = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0] < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return DiskMesh(
        points=points,
        triangles=triangles,
        boundary_nodes=ring_idx[-1],
        boundary_angles=np.asarray(ring_ang[-1]) % TWO_PI,
        spacing=step,
    )


def mesh_euler_characteristic(mesh: DiskMesh) -> int:
    edges = set()
    for t in mesh.triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edges.add((min(a, b), max(a, b)))
    return len(mesh.points) - len(edges) + len(mesh.triangles)


# ---------------------------------------------------------------------------
# P1 assembly and pinned solves


def p1_stiffness(mesh: DiskMesh) -> sparse.csr_matrix:
    p = mesh.points[mesh.triangles]
    e0 = p[:, 2] - p[:, 1]
    e1 = p[:, 0] - p[:, 2]
    e2 = p[:, 1] - p[:, 0]
    area2 = e2[:, 0] * (-e1)[:, 1] - e2[:, 1] * (-e1)[:, 0]  # twice the area
    if np.any(area2 <= 1e-14):
        raise ValueError("degenerate or inverted triangle in the mesh")
    grads = np.stack([e0, e1, e2], axis=1)[:, :, ::-1] * np.array([-1.0, 1.0])
    grads = grads / area2[:, None, None]
    local = np.einsum("tic,tjc->tij", grads, grads) * (0.5 * area2)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).reshape(-1)
    cols = np.tile(mesh.triangles, (1, 3)).reshape(-1)
    A = sparse.coo_matrix(
        (local.reshape(-1), (rows, cols)),
        shape=(len(mesh.points), len(mesh.points)),
    )
    return A.tocsr()


def solve_pinned(A: sparse.csr_matrix, pinned: np.ndarray, values: np.ndarray):
    """Solve A x = 0 with x[pinned] = values; returns x and the free residual."""
    n = A.shape[0]
    free = np.setdiff1d(np.arange(n), pinned)
    x = np.zeros(n)
    x[pinned] = values
    rhs = -A[free][:, pinned] @ values
    A_ff = A[free][:, free].tocsc()
    x[free] = splu(A_ff).solve(rhs)
    res = np.linalg.norm(A[free] @ x)
    scale = np.linalg.norm(rhs)
    return x, res / (scale if scale > 0 else 1.0)


@dataclass
class DNBasis:
    partition: ArcPartition
    mesh: DiskMesh
    stiffness: sparse.csr_matrix
    potentials: np.ndarray  # column k: potential of arc k
    residuals: np.ndarray
    gram: np.ndarray


def build_basis(partition: ArcPartition, h: float = 0.05) -> DNBasis:
    mesh = disk_mesh(partition, h)
    A = p1_stiffness(mesh)
    membership = np.array(
        [partition.arc_index(t) for t in mesh.boundary_angles]
    )
    pinned = mesh.boundary_nodes[membership >= 0]
    pinned_arcs = membership[membership >= 0]
    K = partition.count
    if len(mesh.points) - len(pinned) < K:
        raise ValueError("mesh too coarse to carry the requested partition")

    potentials = np.zeros((len(mesh.points), K))
    residuals = np.zeros(K)
    for k in range(K):
        values = (pinned_arcs == k).astype(float)
        potentials[:, k], residuals[k] = solve_pinned(A, pinned, values)
    gram = potentials.T @ (A @ potentials)
    gram = 0.5 * (gram + gram.T)
    return DNBasis(
        partition=partition, mesh=mesh, stiffness=A,
        potentials=potentials, residuals=residuals, gram=gram,
    )


@dataclass
class DimensionReport:
    rank: int
    singular_values: np.ndarray
    threshold: float
    gap: float


def dimension_check(gram: np.ndarray, rel_tol: float = 1e-8) -> DimensionReport:
    """Numerical rank of the energy Gram matrix with the spectral-gap margin."""
    s = np.linalg.svd(np.asarray(gram), compute_uv=False)
    top = s[0] if len(s) else 0.0
    if top <= 1e-12:
        return DimensionReport(0, s, 0.0, math.inf)
    threshold = top * rel_tol
    rank = int(np.sum(s > threshold))
    smallest_kept = s[rank - 1] if rank else top
    return DimensionReport(rank, s, threshold, smallest_kept / threshold)


def gradient_dimension(partition: ArcPartition, h: float = 0.05) -> DimensionReport:
    return dimension_check(build_basis(partition, h).gram)

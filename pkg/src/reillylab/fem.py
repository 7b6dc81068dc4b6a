"""P1 finite elements for -div(T grad f) + q f on immersed surface meshes.

Element geometry comes from ambient chordal edge lengths of the immersed
vertices, measured with the ambient (possibly Lorentz) inner product.  The
weight tensor T is evaluated at element centroids in the orthonormal
surface frame and rotated into the element's local flat coordinates; the
potential q is interpolated from vertex values.
"""

import numpy as np
import scipy.sparse as sp

from .errors import EllipticityError, TopologyError, UnsupportedConfiguration

_MASS_LOCAL = np.array([[2.0, 1, 1], [1, 2, 1], [1, 1, 2]]) / 12.0

# degree-2 triangle rule: barycentric permutations of (2/3, 1/6, 1/6)
_QUAD_BARY = np.array([[2.0 / 3, 1.0 / 6, 1.0 / 6],
                       [1.0 / 6, 2.0 / 3, 1.0 / 6],
                       [1.0 / 6, 1.0 / 6, 2.0 / 3]])

_ELLIPTIC_REL_TOL = 1e-10


def _aligned_corners(domain, pts, topology):
    """Domain points of one triangle, sign-aligned for antipodal quotients."""
    corners = [np.array(p, dtype=float) for p in pts]
    if topology == "projective_plane":
        for k in (1, 2):
            if np.linalg.norm(corners[k] - corners[0]) > np.linalg.norm(corners[k] + corners[0]):
                corners[k] = -corners[k]
    return corners


class DiscreteGeometry:
    """Per-vertex frames and per-element P1 data for one immersed mesh."""

    def __init__(self, immersion, mesh):
        if immersion.n != 2:
            raise UnsupportedConfiguration(
                "triangle elements require a two-dimensional domain, got %d"
                % immersion.n)
        self.immersion = immersion
        self.mesh = mesh
        diag = immersion.ambient.metric_diag
        self.vertex_frames = [immersion.frame_at(w) for w in mesh.points]
        self.positions = np.array([fr.point for fr in self.vertex_frames])

        tri = mesh.triangles
        nf = tri.shape[0]
        self.areas = np.empty(nf)
        self.grads = np.empty((nf, 2, 3))
        self.centroids = np.empty((nf, mesh.points.shape[1]))
        self._local_axes = np.empty((nf, 2, self.positions.shape[1]))
        for f, (a, b, c) in enumerate(tri):
            e1 = self.positions[b] - self.positions[a]
            e2 = self.positions[c] - self.positions[a]
            g11 = float(np.sum(e1 * e1 * diag))
            g12 = float(np.sum(e1 * e2 * diag))
            g22 = float(np.sum(e2 * e2 * diag))
            det = g11 * g22 - g12 * g12
            if g11 <= 0.0 or det <= 0.0:
                raise TopologyError("triangle %d has degenerate geometry" % f)
            sq = np.sqrt(g11)
            p = np.array([[0.0, 0.0], [sq, 0.0], [g12 / sq, np.sqrt(det) / sq]])
            area = 0.5 * np.sqrt(det)
            self.areas[f] = area
            # gradients of the barycentric hat functions in local coordinates
            self.grads[f] = np.array([
                [p[1, 1] - p[2, 1], p[2, 1] - p[0, 1], p[0, 1] - p[1, 1]],
                [p[2, 0] - p[1, 0], p[0, 0] - p[2, 0], p[1, 0] - p[0, 0]],
            ]) / (2.0 * area)
            u1 = e1 / sq
            u2 = (e2 - (g12 / g11) * e1) / (np.sqrt(det) / sq)
            self._local_axes[f, 0] = u1
            self._local_axes[f, 1] = u2
            corners = _aligned_corners(immersion.domain, mesh.points[[a, b, c]],
                                       mesh.topology)
            self.centroids[f] = immersion.domain.centroid(corners)
        self.volume = float(np.sum(self.areas))
        self._centroid_frames = None

    @property
    def centroid_frames(self):
        if self._centroid_frames is None:
            self._centroid_frames = [self.immersion.frame_at(w)
                                     for w in self.centroids]
        return self._centroid_frames

    def frame_rotation(self, f: int) -> np.ndarray:
        """Orthogonal map from centroid-frame components to local coordinates."""
        fr = self.centroid_frames[f]
        diag = self.immersion.ambient.metric_diag
        raw = np.einsum("an,in,n->ai", self._local_axes[f], fr.tangent, diag)
        u, _, vt = np.linalg.svd(raw)
        return u @ vt

    def vertex_values(self, fn) -> np.ndarray:
        return np.array([float(fn(fr)) for fr in self.vertex_frames])

    def integrate(self, vertex_values: np.ndarray) -> float:
        """Integral of the P1 interpolant of per-vertex samples."""
        corner = vertex_values[self.mesh.triangles]
        return float(np.sum(self.areas * np.mean(corner, axis=1)))


def assemble_forms(geom: DiscreteGeometry, tensor_field=None, potential=None):
    """Stiffness and mass matrices for the pencil K f = lambda M f.

    tensor_field: callable (PointFrame) -> symmetric (2, 2) weight matrix in
    frame components, or None for the identity (the Laplacian).  potential:
    callable (PointFrame) -> float, added to K through the quadratic form
    integral of q f g.  Raises EllipticityError at the first element whose
    weight matrix is not positive definite.
    """
    mesh = geom.mesh
    tri = mesh.triangles
    nf = tri.shape[0]
    t_local = np.empty((nf, 2, 2))
    if tensor_field is None:
        t_local[:] = np.eye(2)
    else:
        scale = 0.0
        for f in range(nf):
            tmat = np.asarray(tensor_field(geom.centroid_frames[f]), dtype=float)
            rot = geom.frame_rotation(f)
            t_local[f] = rot @ tmat @ rot.T
            eig = np.linalg.eigvalsh(t_local[f])
            scale = max(scale, abs(eig[-1]))
            if eig[0] <= _ELLIPTIC_REL_TOL * scale:
                raise EllipticityError(
                    "weight tensor not positive definite at element %d "
                    "(domain point %s): eigenvalues %s"
                    % (f, np.array_str(geom.centroids[f], precision=6), eig))
    k_loc = np.einsum("f,fai,fab,fbj->fij", geom.areas, geom.grads,
                      t_local, geom.grads)
    m_loc = np.einsum("f,ij->fij", geom.areas, _MASS_LOCAL)
    if potential is not None:
        qv = geom.vertex_values(potential)[tri]  # (F, 3)
        qpt = qv @ _QUAD_BARY.T  # value at each quadrature point
        phi = _QUAD_BARY  # hat function values at quadrature points
        q_loc = np.einsum("f,fq,qi,qj->fij", geom.areas / 3.0, qpt, phi, phi)
        k_loc = k_loc + q_loc

    rows = np.repeat(tri, 3, axis=1).reshape(nf, 3, 3)
    cols = np.stack([tri] * 3, axis=1)
    nv = mesh.points.shape[0]
    stiffness = sp.coo_matrix(
        (k_loc.ravel(), (rows.ravel(), cols.ravel())), shape=(nv, nv)).tocsr()
    mass = sp.coo_matrix(
        (m_loc.ravel(), (rows.ravel(), cols.ravel())), shape=(nv, nv)).tocsr()
    return stiffness, mass

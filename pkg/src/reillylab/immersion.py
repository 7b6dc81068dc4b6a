"""Parametric immersions into space forms with pointwise frames.

A ParametricImmersion couples a parameter domain (products of unit spheres
or a flat patch) with an ambient-valued map and a target space form.  The
frame machinery produces, at any domain point, an orthonormal tangent and
normal frame together with the second fundamental form expressed in that
frame, which is the raw material for every curvature and eigenvalue
computation downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ImmersionError, ShapeError
from .secondform import SecondFundamentalForm

_EPS = np.finfo(float).eps
_FD_FIRST = _EPS ** 0.5
_FD_SECOND = _EPS ** (1.0 / 3.0)
_CONSTRAINT_TOL = 1e-8
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class AmbientSpace:
    """Simply connected space form of curvature c realized in coordinates.

    c = 0 is flat space R^dim; c = 1 the unit sphere in R^(dim+1); c = -1
    the hyperboloid <x,x>' = -1, x^last >= 1, in Lorentz coordinates with
    signature (+,...,+,-), time axis stored last.
    """

    c: float
    dim: int

    def __post_init__(self):
        if self.c not in (-1.0, 0.0, 1.0):
            raise ArgumentError("curvature must be one of -1, 0, 1")
        if self.dim < 2:
            raise ArgumentError("ambient dimension must be at least 2")

    @property
    def lorentz(self) -> bool:
        return self.c == -1.0

    @property
    def coords(self) -> int:
        """Number of stored coordinates for points of this space."""
        return self.dim if self.c == 0.0 else self.dim + 1

    @property
    def metric_diag(self) -> np.ndarray:
        d = np.ones(self.coords)
        if self.lorentz:
            d[-1] = -1.0
        return d

    def inner(self, u, v) -> float:
        """Ambient inner product (Lorentz-aware); broadcasts over leading axes."""
        return np.sum(np.asarray(u) * np.asarray(v) * self.metric_diag, axis=-1)

    def constraint_residual(self, x) -> float:
        """Deviation of x from the model constraint (0 for flat space)."""
        if self.c == 0.0:
            return 0.0
        target = 1.0 if self.c == 1.0 else -1.0
        return float(abs(self.inner(x, x) - target))

    def project_radial_out(self, x, v) -> np.ndarray:
        """Remove from v the component along the position direction x.

        For c = 1 the position is a unit vector; for c = -1 it is timelike
        with <x,x>' = -1, so the projection coefficient flips sign.
        """
        if self.c == 0.0:
            return np.asarray(v, dtype=float)
        coeff = self.inner(v, x)
        if self.c == 1.0:
            return v - coeff * x
        return v + coeff * x


class ParamDomain:
    """Abstract parameter domain.  Points are stored in an embedding of
    dimension embed_dim; charts are normal-coordinate charts at a point."""

    dim: int
    embed_dim: int

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def chart(self, w: np.ndarray) -> np.ndarray:
        """Orthonormal tangent basis tau (dim, embed_dim) at w."""
        raise NotImplementedError

    def chart_point(self, w: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Domain point reached from w by chart coordinates u."""
        raise NotImplementedError

    def chart_second(self, w: np.ndarray) -> np.ndarray:
        """Second derivatives (dim, dim, embed_dim) of chart_point at u = 0."""
        raise NotImplementedError

    def centroid(self, points) -> np.ndarray:
        """Representative domain point for a small cluster of points."""
        return np.mean(np.asarray(points, dtype=float), axis=0)


class SphereProduct(ParamDomain):
    """Product of unit spheres S^{d_1} x ... x S^{d_k}.

    Points are concatenated unit vectors, one slot of length d_f + 1 per
    factor.  The chart at w moves each factor along its tangent plane and
    renormalizes, so first derivatives are the tangents themselves and the
    only second-derivative term is the in-factor radial pullback -w_f.
    """

    def __init__(self, dims):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise ArgumentError("factor dimensions must be positive")
        self.dims = dims
        self.dim = sum(dims)
        self.embed_dim = sum(d + 1 for d in dims)
        self.slices = []
        start = 0
        for d in dims:
            self.slices.append(slice(start, start + d + 1))
            start += d + 1

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        w = np.empty(self.embed_dim)
        for sl in self.slices:
            v = rng.standard_normal(sl.stop - sl.start)
            w[sl] = v / np.linalg.norm(v)
        return w

    def factor_index(self, axis: int) -> int:
        """Factor owning chart axis `axis`."""
        total = 0
        for f, d in enumerate(self.dims):
            total += d
            if axis < total:
                return f
        raise ArgumentError("chart axis out of range")

    def chart(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        tau = np.zeros((self.dim, self.embed_dim))
        row = 0
        for d, sl in zip(self.dims, self.slices):
            wf = w[sl]
            basis = _tangent_basis_of_sphere(wf)
            for b in basis:
                tau[row, sl] = b
                row += 1
        return tau

    def chart_point(self, w: np.ndarray, u: np.ndarray) -> np.ndarray:
        tau = self.chart(w)
        moved = np.asarray(w, dtype=float) + u @ tau
        out = moved.copy()
        for sl in self.slices:
            out[sl] = moved[sl] / np.linalg.norm(moved[sl])
        return out

    def chart_second(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        sec = np.zeros((self.dim, self.dim, self.embed_dim))
        row = 0
        for d, sl in zip(self.dims, self.slices):
            for a in range(row, row + d):
                sec[a, a, sl] = -w[sl]
            row += d
        return sec

    def centroid(self, points) -> np.ndarray:
        mean = np.mean(np.asarray(points, dtype=float), axis=0)
        for sl in self.slices:
            norm = np.linalg.norm(mean[sl])
            if norm < 1e-12:
                raise ArgumentError("point cluster spans a whole factor")
            mean[sl] = mean[sl] / norm
        return mean


class FlatPatch(ParamDomain):
    """Open patch of R^dim with the identity chart."""

    def __init__(self, dim: int, halfwidth: float = 0.8):
        if dim < 1:
            raise ArgumentError("patch dimension must be positive")
        self.dim = int(dim)
        self.embed_dim = self.dim
        self.halfwidth = float(halfwidth)

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-self.halfwidth, self.halfwidth, size=self.dim)

    def chart(self, w: np.ndarray) -> np.ndarray:
        return np.eye(self.dim)

    def chart_point(self, w: np.ndarray, u: np.ndarray) -> np.ndarray:
        return np.asarray(w, dtype=float) + np.asarray(u, dtype=float)

    def chart_second(self, w: np.ndarray) -> np.ndarray:
        return np.zeros((self.dim, self.dim, self.dim))


def _tangent_basis_of_sphere(w: np.ndarray) -> list:
    """Deterministic orthonormal basis of the tangent plane of S^d at w."""
    dim = w.size
    basis = []
    for k in range(dim):
        v = np.zeros(dim)
        v[k] = 1.0
        v = v - np.dot(v, w) * w
        for b in basis:
            v = v - np.dot(v, b) * b
        norm = np.linalg.norm(v)
        if norm > 1e-7:
            basis.append(v / norm)
        if len(basis) == dim - 1:
            break
    if len(basis) != dim - 1:
        raise ImmersionError("failed to span the sphere tangent plane")
    return basis


class AmbientMap:
    """Map from domain embedding coordinates to ambient coordinates.

    Subclasses provide value() and, when available, analytic jacobian()
    and hessian(); returning None from either signals that finite
    differences should be used for the whole jet.
    """

    def value(self, w: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, w: np.ndarray):
        return None

    def hessian(self, w: np.ndarray):
        return None


class PolynomialMap(AmbientMap):
    """Quadratic polynomial map x = A0 + A1 w + w.A2.w with exact jets."""

    def __init__(self, a0, a1, a2=None):
        self.a0 = np.asarray(a0, dtype=float)
        self.a1 = np.asarray(a1, dtype=float)
        if self.a1.ndim != 2 or self.a1.shape[0] != self.a0.size:
            raise ShapeError("a1 must have shape (out, in)")
        if a2 is None:
            a2 = np.zeros((self.a0.size, self.a1.shape[1], self.a1.shape[1]))
        a2 = np.asarray(a2, dtype=float)
        if a2.shape != (self.a0.size, self.a1.shape[1], self.a1.shape[1]):
            raise ShapeError("a2 must have shape (out, in, in)")
        self.a2 = 0.5 * (a2 + np.swapaxes(a2, 1, 2))

    def value(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return self.a0 + self.a1 @ w + np.einsum("nij,i,j->n", self.a2, w, w)

    def jacobian(self, w: np.ndarray) -> np.ndarray:
        return self.a1 + 2.0 * np.einsum("nij,j->ni", self.a2, np.asarray(w, dtype=float))

    def hessian(self, w: np.ndarray) -> np.ndarray:
        return 2.0 * self.a2


class CallableMap(AmbientMap):
    """Wrap a plain function, with optional analytic derivative callbacks."""

    def __init__(self, fn, jacobian_fn=None, hessian_fn=None):
        self.fn = fn
        self.jacobian_fn = jacobian_fn
        self.hessian_fn = hessian_fn

    def value(self, w):
        return np.asarray(self.fn(w), dtype=float)

    def jacobian(self, w):
        return None if self.jacobian_fn is None else np.asarray(self.jacobian_fn(w), dtype=float)

    def hessian(self, w):
        return None if self.hessian_fn is None else np.asarray(self.hessian_fn(w), dtype=float)


class ComposedMap(AmbientMap):
    """Composition outer(inner(w)) with chain-rule jets.

    The outer map typically has an analytic jacobian but no hessian (the
    conformal chains); its hessian is then recovered by differencing the
    jacobian, which keeps the dominant error at the 1e-11 level instead of
    the 1e-5 of differencing values twice.
    """

    def __init__(self, outer, inner: AmbientMap):
        self.outer = outer
        self.inner = inner

    def value(self, w):
        return np.asarray(self.outer.value(self.inner.value(w)), dtype=float)

    def jacobian(self, w):
        ji = self.inner.jacobian(w)
        if ji is None:
            return None
        jo = self.outer.jacobian(self.inner.value(w))
        if jo is None:
            return None
        return np.asarray(jo, dtype=float) @ ji

    def hessian(self, w):
        ji = self.inner.jacobian(w)
        hi = self.inner.hessian(w)
        if ji is None or hi is None:
            return None
        x = self.inner.value(w)
        jo = self.outer.jacobian(x)
        if jo is None:
            return None
        jo = np.asarray(jo, dtype=float)
        ho = getattr(self.outer, "hessian", lambda _: None)(x)
        if ho is None:
            ho = _fd_hessian_from_jacobian(self.outer, x)
        ho = np.asarray(ho, dtype=float)
        term1 = np.einsum("nd,dab->nab", jo, hi)
        term2 = np.einsum("nde,da,eb->nab", ho, ji, ji)
        return term1 + term2


def _fd_hessian_from_jacobian(mapping, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    step = _FD_SECOND * max(1.0, float(np.max(np.abs(x))))
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        cols.append((np.asarray(mapping.jacobian(x + e), dtype=float)
                     - np.asarray(mapping.jacobian(x - e), dtype=float)) / (2.0 * step))
    hess = np.stack(cols, axis=-1)
    return 0.5 * (hess + np.swapaxes(hess, 1, 2))


@dataclass(frozen=True)
class PointFrame:
    """Orthonormal frame data of an immersion at one parameter point."""

    point: np.ndarray
    metric: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    h: SecondFundamentalForm
    coeff: np.ndarray

    @property
    def n(self) -> int:
        return self.tangent.shape[0]

    @property
    def p(self) -> int:
        return self.normal.shape[0]

    def mean_vector_ambient(self) -> np.ndarray:
        """Mean curvature vector in ambient coordinates."""
        return self.h.mean_vector() @ self.normal

    def weighted_normal(self, T: np.ndarray) -> np.ndarray:
        """Normal-frame components of H_T = sum_{ij,alpha} T_ij h^a_ij e_a."""
        return np.einsum("aij,ij->a", self.h.h, np.asarray(T, dtype=float))


@dataclass(frozen=True)
class ParametricImmersion:
    """Immersed submanifold given by a map from a parameter domain."""

    domain: ParamDomain
    mapping: AmbientMap
    ambient: AmbientSpace
    name: str = "immersion"
    reference: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.domain.dim

    @property
    def p(self) -> int:
        extra = 0 if self.ambient.c == 0.0 else 1
        return self.ambient.coords - self.n - extra

    def position(self, w) -> np.ndarray:
        return np.asarray(self.mapping.value(np.asarray(w, dtype=float)), dtype=float)

    def jets(self, w):
        """Position, first and second chart derivatives at w.

        Uses analytic map jets through the domain chart when both are
        available, finite differences of the chart composition otherwise.
        """
        w = np.asarray(w, dtype=float)
        x = self.position(w)
        jac = self.mapping.jacobian(w)
        hess = self.mapping.hessian(w)
        n = self.domain.dim
        if jac is not None and hess is not None:
            tau = self.domain.chart(w)
            sec = self.domain.chart_second(w)
            jac = np.asarray(jac, dtype=float)
            hess = np.asarray(hess, dtype=float)
            d1 = tau @ jac.T
            d2 = (np.einsum("nde,ad,be->abn", hess, tau, tau)
                  + np.einsum("abd,nd->abn", sec, jac))
            return x, d1, d2

        def chart_value(u):
            return self.position(self.domain.chart_point(w, u))

        d1 = np.empty((n, x.size))
        h1 = _FD_FIRST
        for a in range(n):
            e = np.zeros(n)
            e[a] = h1
            d1[a] = (chart_value(e) - chart_value(-e)) / (2.0 * h1)
        d2 = np.empty((n, n, x.size))
        h2 = _FD_SECOND
        for a in range(n):
            ea = np.zeros(n)
            ea[a] = h2
            d2[a, a] = (chart_value(ea) - 2.0 * x + chart_value(-ea)) / (h2 * h2)
            for b in range(a + 1, n):
                eb = np.zeros(n)
                eb[b] = h2
                mixed = (chart_value(ea + eb) - chart_value(ea - eb)
                         - chart_value(-ea + eb) + chart_value(-ea - eb)) / (4.0 * h2 * h2)
                d2[a, b] = mixed
                d2[b, a] = mixed
        return x, d1, d2

    def frame_at(self, w) -> PointFrame:
        """Orthonormal tangent/normal frame and second fundamental form.

        Tangents come from Gram-Schmidt on the chart derivatives in fixed
        parameter order; normals from Gram-Schmidt completion by the
        ambient coordinate axes in ascending order (with the position
        direction removed first for curved ambients).  Each normal is
        flipped, deterministically, so that tr h^alpha >= 0, which makes a
        round sphere carry positive principal curvature.
        """
        space = self.ambient
        x, d1, d2 = self.jets(w)
        if x.size != space.coords:
            raise ShapeError("map output does not match the ambient coordinates")
        if space.constraint_residual(x) > _CONSTRAINT_TOL:
            raise ImmersionError(
                "image point violates the ambient constraint by %.3e"
                % space.constraint_residual(x))
        n = self.domain.dim
        g = np.empty((n, n))
        for a in range(n):
            for b in range(a, n):
                g[a, b] = g[b, a] = space.inner(d1[a], d1[b])
        eigs = np.linalg.eigvalsh(g)
        if eigs[0] <= _RANK_TOL * max(1.0, eigs[-1]):
            raise ImmersionError("singular chart: induced metric is rank deficient")
        lower = np.linalg.cholesky(g)
        coeff = np.linalg.solve(lower, np.eye(n))
        tangent = coeff @ d1

        p = self.p
        normal = np.empty((p, space.coords))
        found = 0
        for k in range(space.coords):
            if found == p:
                break
            v = np.zeros(space.coords)
            v[k] = 1.0
            v = space.project_radial_out(x, v)
            for t in tangent:
                v = v - space.inner(v, t) * t
            for m in range(found):
                v = v - space.inner(v, normal[m]) * normal[m]
            norm2 = space.inner(v, v)
            if norm2 > 1e-10:
                normal[found] = v / np.sqrt(norm2)
                found += 1
        if found != p:
            raise ImmersionError("failed to complete the normal frame")

        proj = np.einsum("abn,cn,n->cab", d2, normal, space.metric_diag)
        hmat = np.einsum("ia,jb,cab->cij", coeff, coeff, proj)
        for alpha in range(p):
            if np.trace(hmat[alpha]) < -1e-9:
                hmat[alpha] = -hmat[alpha]
                normal[alpha] = -normal[alpha]
        return PointFrame(point=x, metric=g, tangent=tangent, normal=normal,
                          h=SecondFundamentalForm(hmat), coeff=coeff)

    def structure_residual(self, w) -> float:
        """Deviation of the chart second derivatives from their tangential
        + normal + curvature-term decomposition.

        After removing tangential and normal projections of each second
        derivative, the remainder must be -c g_ab x; the returned value is
        the largest coordinate norm of what is left over.
        """
        space = self.ambient
        frame = self.frame_at(w)
        x, d1, d2 = self.jets(w)
        worst = 0.0
        n = self.domain.dim
        for a in range(n):
            for b in range(n):
                v = d2[a, b].copy()
                for t in frame.tangent:
                    v = v - space.inner(v, t) * t
                for m in frame.normal:
                    v = v - space.inner(v, m) * m
                v = v + space.c * frame.metric[a, b] * x
                worst = max(worst, float(np.linalg.norm(v)))
        return worst

    def sample_points(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return np.array([self.domain.random_point(rng) for _ in range(count)])


def pushforward_under_map(imm: ParametricImmersion, gamma,
                          ambient: AmbientSpace, name: str = None) -> ParametricImmersion:
    """Immersion obtained by composing an ambient transform after the map.

    gamma must expose value() on ambient points; analytic jacobian() is
    used for chain-rule jets when present, otherwise the composed jet falls
    back to finite differences through the chart.
    """
    composed = ComposedMap(gamma, imm.mapping)
    return ParametricImmersion(
        domain=imm.domain, mapping=composed, ambient=ambient,
        name=name or (imm.name + "+map"), reference={}, metadata=dict(imm.metadata))

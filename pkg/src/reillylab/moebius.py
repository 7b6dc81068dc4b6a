"""Moebius transformations of the ball and the conformal chains to the sphere.

All three space forms are handled through one composite: a point is first
carried to the unit sphere (identity for curvature 1, inverse stereographic
projection for curvature 0, Poincare-ball then inverse stereographic for
curvature -1), then moved by the ball Moebius map gamma_g.  The conformal
factor of the composite against the space-form metric has a closed form,
as does its tangential gradient.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, PoleProximityError
from .immersion import AmbientSpace, CallableMap, ComposedMap

_POLE_TOL = 1e-14


@dataclass(frozen=True)
class MoebiusParam:
    """Ball Moebius parameter g with |g| < 1.

    lam = (1 - |g|^2)^{-1/2}; mu is (lam - 1)/|g|^2 continued through
    g = 0, where it equals 1/2.
    """

    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "g", g)
        if g.ndim != 1:
            raise ArgumentError("parameter g must be a vector")
        if np.dot(g, g) >= 1.0:
            raise ArgumentError("parameter g must lie inside the unit ball")

    @property
    def lam(self) -> float:
        return 1.0 / math.sqrt(1.0 - float(np.dot(self.g, self.g)))

    @property
    def mu(self) -> float:
        # equals (lam - 1)/|g|^2 without cancellation
        lam = self.lam
        return lam * lam / (1.0 + lam)


def gamma_value(param: MoebiusParam, x: np.ndarray) -> np.ndarray:
    g = param.g
    x = np.asarray(x, dtype=float)
    f = float(x @ g)
    if 1.0 + f <= _POLE_TOL:
        raise PoleProximityError("point at the Moebius pole: 1 + <x, g> = %g" % (1.0 + f))
    lam, mu = param.lam, param.mu
    return (x + (mu * f + lam) * g) / (lam * (1.0 + f))


def gamma_jacobian(param: MoebiusParam, x: np.ndarray) -> np.ndarray:
    """Derivative of gamma_g in x."""
    g = param.g
    x = np.asarray(x, dtype=float)
    f = float(x @ g)
    if 1.0 + f <= _POLE_TOL:
        raise PoleProximityError("point at the Moebius pole")
    lam, mu = param.lam, param.mu
    n = x.size
    val = (x + (mu * f + lam) * g) / (lam * (1.0 + f))
    return ((np.eye(n) + mu * np.outer(g, g)) / (lam * (1.0 + f))
            - np.outer(val, g) / (1.0 + f))


def gamma_parameter_jacobian(param: MoebiusParam, x: np.ndarray) -> np.ndarray:
    """Derivative of gamma_g(x) in the parameter g, at fixed x."""
    g = param.g
    x = np.asarray(x, dtype=float)
    f = float(x @ g)
    if 1.0 + f <= _POLE_TOL:
        raise PoleProximityError("point at the Moebius pole")
    lam, mu = param.lam, param.mu
    n = x.size
    dlam = lam**3 * g
    dmu = lam**4 * (lam + 2.0) / (1.0 + lam) ** 2 * g
    scalar = mu * f + lam
    dscalar = f * dmu + mu * x + dlam
    dnum = np.outer(g, dscalar) + scalar * np.eye(n)
    den = lam * (1.0 + f)
    dden = (1.0 + f) * dlam + lam * x
    val = (x + scalar * g) / den
    return dnum / den - np.outer(val, dden) / den


def gamma_map(param: MoebiusParam) -> CallableMap:
    """gamma_g as an ambient map with analytic first derivatives."""
    return CallableMap(lambda x: gamma_value(param, x),
                       jacobian_fn=lambda x: gamma_jacobian(param, x))


def plane_to_sphere_value(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    s = 1.0 + float(x @ x)
    return np.concatenate([2.0 * x, [float(x @ x) - 1.0]]) / s


def plane_to_sphere_jacobian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size
    s = 1.0 + float(x @ x)
    jac = np.empty((n + 1, n))
    jac[:n] = 2.0 * np.eye(n) / s - 4.0 * np.outer(x, x) / s**2
    jac[n] = 4.0 * x / s**2
    return jac


def plane_to_sphere_hessian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size
    s = 1.0 + float(x @ x)
    eye = np.eye(n)
    hess = np.empty((n + 1, n, n))
    hess[:n] = (-4.0 * (np.einsum("ij,k->ijk", eye, x)
                        + np.einsum("ik,j->ijk", eye, x)
                        + np.einsum("i,jk->ijk", x, eye)) / s**2
                + 16.0 * np.einsum("i,j,k->ijk", x, x, x) / s**3)
    hess[n] = 4.0 * eye / s**2 - 16.0 * np.outer(x, x) / s**3
    return hess


def plane_to_sphere() -> CallableMap:
    """Inverse stereographic projection of R^N onto S^N minus the pole."""
    return CallableMap(plane_to_sphere_value,
                       jacobian_fn=plane_to_sphere_jacobian,
                       hessian_fn=plane_to_sphere_hessian)


def sphere_to_plane(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    den = 1.0 - y[-1]
    if den <= _POLE_TOL:
        raise PoleProximityError("stereographic pole: 1 - y0 = %g" % den)
    return y[:-1] / den


def ball_to_hyperboloid_value(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    s = 1.0 - float(w @ w)
    if s <= _POLE_TOL:
        raise PoleProximityError("point on the ball boundary")
    return np.concatenate([2.0 * w, [1.0 + float(w @ w)]]) / s


def ball_to_hyperboloid_jacobian(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    n = w.size
    s = 1.0 - float(w @ w)
    if s <= _POLE_TOL:
        raise PoleProximityError("point on the ball boundary")
    jac = np.empty((n + 1, n))
    jac[:n] = 2.0 * np.eye(n) / s + 4.0 * np.outer(w, w) / s**2
    jac[n] = 4.0 * w / s**2
    return jac


def ball_to_hyperboloid_hessian(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    n = w.size
    s = 1.0 - float(w @ w)
    eye = np.eye(n)
    hess = np.empty((n + 1, n, n))
    hess[:n] = (4.0 * (np.einsum("ij,k->ijk", eye, w)
                       + np.einsum("ik,j->ijk", eye, w)
                       + np.einsum("i,jk->ijk", w, eye)) / s**2
                + 16.0 * np.einsum("i,j,k->ijk", w, w, w) / s**3)
    hess[n] = 4.0 * eye / s**2 + 16.0 * np.outer(w, w) / s**3
    return hess


def ball_to_hyperboloid() -> CallableMap:
    """Poincare ball onto the upper hyperboloid sheet."""
    return CallableMap(ball_to_hyperboloid_value,
                       jacobian_fn=ball_to_hyperboloid_jacobian,
                       hessian_fn=ball_to_hyperboloid_hessian)


def hyperboloid_to_ball(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    den = 1.0 + x[-1]
    if den <= _POLE_TOL:
        raise PoleProximityError("hyperboloid chart pole")
    return x[:-1] / den


def hyperboloid_to_ball_jacobian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size - 1
    den = 1.0 + x[-1]
    jac = np.empty((n, n + 1))
    jac[:, :n] = np.eye(n) / den
    jac[:, n] = -x[:n] / den**2
    return jac


def hyperboloid_to_ball_hessian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.size - 1
    den = 1.0 + x[-1]
    hess = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        hess[i, i, n] = hess[i, n, i] = -1.0 / den**2
        hess[i, n, n] = 2.0 * x[i] / den**3
    return hess


def hyperboloid_to_ball_map() -> CallableMap:
    """Upper hyperboloid sheet onto the Poincare ball."""
    return CallableMap(hyperboloid_to_ball,
                       jacobian_fn=hyperboloid_to_ball_jacobian,
                       hessian_fn=hyperboloid_to_ball_hessian)


class ConformalChain:
    """Composite map of a space form into the round sphere.

    For curvature c the chain is gamma_g (c = 1), gamma_g after inverse
    stereographic projection (c = 0), or that after the hyperboloid-to-ball
    chart (c = -1).  rho is the log conformal factor of the chain against
    the space-form metric; grad_rho is its gradient, tangent to the space
    form at the argument.
    """

    def __init__(self, c: float, param: MoebiusParam, dim: int):
        if c not in (-1.0, 0.0, 1.0):
            raise ArgumentError("curvature must be -1, 0, or 1")
        self.c = float(c)
        self.param = param
        self.dim = int(dim)  # dimension N of the space form
        if param.g.size != dim + 1:
            raise ArgumentError("parameter g must have %d components" % (dim + 1))
        self.space = AmbientSpace(self.c, dim)

    def sphere_point(self, x: np.ndarray) -> np.ndarray:
        """The pre-Moebius point on the unit sphere."""
        x = np.asarray(x, dtype=float)
        if self.c == 1.0:
            return x
        if self.c == 0.0:
            return plane_to_sphere_value(x)
        return plane_to_sphere_value(hyperboloid_to_ball(x))

    def test_map(self) -> CallableMap:
        """The chain as an ambient map with analytic first derivatives."""
        gam = gamma_map(self.param)
        if self.c == 1.0:
            return gam
        if self.c == 0.0:
            return ComposedMap(gam, plane_to_sphere())
        return ComposedMap(gam, ComposedMap(plane_to_sphere(),
                                            hyperboloid_to_ball_map()))

    def value(self, x: np.ndarray) -> np.ndarray:
        return gamma_value(self.param, self.sphere_point(x))

    def rho(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        p = self.sphere_point(x)
        f = float(p @ self.param.g)
        if 1.0 + f <= _POLE_TOL:
            raise PoleProximityError("point at the Moebius pole")
        moeb = -math.log(self.param.lam) - math.log1p(f)
        if self.c == 1.0:
            return moeb
        if self.c == 0.0:
            return moeb + math.log(2.0) - math.log1p(float(x @ x))
        w = hyperboloid_to_ball(x)
        ww = float(w @ w)
        return moeb + math.log((1.0 - ww) / (1.0 + ww))

    def factor(self, x: np.ndarray) -> float:
        """Conformal factor e^{2 rho} of the chain at x."""
        return math.exp(2.0 * self.rho(x))

    def grad_rho(self, x: np.ndarray) -> np.ndarray:
        """Gradient of rho, tangent to the space form (ambient components)."""
        x = np.asarray(x, dtype=float)
        g = self.param.g
        if self.c == 1.0:
            f = float(x @ g)
            grad = -g / (1.0 + f)
            return grad - float(grad @ x) * x
        if self.c == 0.0:
            p = plane_to_sphere_value(x)
            f = float(p @ g)
            grad = -2.0 * x / (1.0 + float(x @ x))
            grad = grad - plane_to_sphere_jacobian(x).T @ g / (1.0 + f)
            return grad
        w = hyperboloid_to_ball(x)
        ww = float(w @ w)
        p = plane_to_sphere_value(w)
        f = float(p @ g)
        jw = hyperboloid_to_ball_jacobian(x)
        grad_w = (-2.0 * w / (1.0 - ww) - 2.0 * w / (1.0 + ww)
                  - plane_to_sphere_jacobian(w).T @ g / (1.0 + f))
        coord = jw.T @ grad_w
        lorentz = coord * self.space.metric_diag
        return self.space.project_radial_out(x, lorentz)

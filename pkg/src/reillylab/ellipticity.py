"""The mean curvature weight tensor and its positivity certificates.

For an immersion with nonvanishing mean curvature the tensor
T = nH I - h_principal (h_principal = component of the second fundamental
form along the unit mean curvature vector) drives a sharp second-eigenvalue
bound.  Positivity of T and of T' = tr(T) I - 2 T is what makes the bound
usable; for n = 4 it reduces to a constrained minimization of
3 x1 + x2 + x3 + x4 over the set {e1(x) = a, e2(x) = b}, solved here in
closed form and cross-checked by dense sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateNormalError, EllipticityError
from .secondform import SecondFundamentalForm


@dataclass(frozen=True)
class WeightTensorData:
    """T = nH I - h_principal with its positivity diagnostics."""

    T: np.ndarray
    trace: float
    H: float
    H2: float
    eigmin_T: float
    eigmin_Tprime: float
    principal_curvatures: np.ndarray  # eigenvalues of h_principal, ascending


def mean_curvature_tensor(h) -> WeightTensorData:
    """Build T = nH I - h_principal and report its eigenvalue minima.

    Requires |H| > 0.  H2 is the second mean curvature defined through
    n(n-1) H2 = (nH)^2 - |h|^2.
    """
    if not isinstance(h, SecondFundamentalForm):
        h = SecondFundamentalForm(np.asarray(h, dtype=float))
    n = h.n
    hvec = h.mean_vector()
    H = float(np.linalg.norm(hvec))
    if H < 1e-14:
        raise DegenerateNormalError("mean curvature tensor undefined at |H| = 0")
    principal = np.einsum("x,xij->ij", hvec / H, h.h)
    T = n * H * np.eye(n) - principal
    k = np.sort(np.linalg.eigvalsh(principal))
    trT = float(np.trace(T))
    Tprime = trT * np.eye(n) - 2.0 * T
    H2 = ((n * H) ** 2 - h.norm2()) / (n * (n - 1))
    return WeightTensorData(T=T, trace=trT, H=H, H2=float(H2),
                            eigmin_T=float(np.min(np.linalg.eigvalsh(T))),
                            eigmin_Tprime=float(np.min(np.linalg.eigvalsh(Tprime))),
                            principal_curvatures=k)


def tilted_sum_minimum(a: float, b: float):
    """Minimum of f(x) = 3 x1 + x2 + x3 + x4 over
    K = {x in R^4 : e1(x) = a, e2(x) = b} with a, b > 0 and 9 a^2 > 24 b.

    Returns (minimum, witness).  The witness has the form
    x = (a - 3t, t, t, t) with t = (3a + sqrt(9 a^2 - 24 b)) / 12.
    """
    if a <= 0 or b <= 0:
        raise ArgumentError("need a > 0 and b > 0")
    disc = 9.0 * a * a - 24.0 * b
    if disc <= 0:
        raise ArgumentError("constraint set degenerates unless 9 a^2 > 24 b")
    root = math.sqrt(disc)
    t = (3.0 * a + root) / 12.0
    witness = np.array([a - 3.0 * t, t, t, t])
    return (3.0 * a - root) / 2.0, witness


def tilted_sum_minimum_sampled(a: float, b: float, samples: int = 200000,
                               seed: int = 0) -> float:
    """Independent check of tilted_sum_minimum by dense sampling.

    The constraint set is the round 2-sphere
    {x = (a/4) 1 + R u : |u| = 1, u ⊥ 1},  R^2 = 3 a^2 / 4 - 2 b,
    so f is sampled over random unit u and the best sample is polished
    with a derivative-free local descent in a tangent chart.
    """
    from scipy.optimize import minimize

    if a <= 0 or b <= 0:
        raise ArgumentError("need a > 0 and b > 0")
    R2 = 0.75 * a * a - 2.0 * b
    if R2 <= 0:
        raise ArgumentError("constraint set is empty unless 3 a^2 > 8 b")
    R = math.sqrt(R2)
    ones = np.ones(4) / 2.0
    basis = []
    for k in range(4):
        v = np.zeros(4)
        v[k] = 1.0
        v -= np.dot(v, ones) * ones
        for w in basis:
            v -= np.dot(v, w) * w
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
    B = np.array(basis[:3]).T  # (4, 3) orthonormal columns spanning 1-perp

    def value(u):
        x = a / 4.0 + R * (B @ u)
        return 3.0 * x[0] + x[1] + x[2] + x[3]

    rng = np.random.default_rng(seed)
    u = rng.standard_normal((samples, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    x = a / 4.0 + R * u @ B.T
    f = 3.0 * x[:, 0] + x[:, 1:].sum(axis=1)
    i0 = int(np.argmin(f))
    u0 = u[i0]
    # tangent chart at u0
    t1 = np.cross(u0, [1.0, 0.0, 0.0])
    if np.linalg.norm(t1) < 1e-6:
        t1 = np.cross(u0, [0.0, 1.0, 0.0])
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(u0, t1)

    def chart(ab):
        w = u0 + ab[0] * t1 + ab[1] * t2
        return value(w / np.linalg.norm(w))

    res = minimize(chart, np.zeros(2), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
    return float(min(f[i0], res.fun))


def convex_slack(h, r: int):
    """For a hypersurface Newton family: the tensor S_r I - T_r, which is
    positive semidefinite whenever the principal curvatures are positive.
    Returned together with its minimum eigenvalue."""
    from .newton import newton_chain

    if not isinstance(h, SecondFundamentalForm):
        h = SecondFundamentalForm(np.asarray(h, dtype=float))
    if h.p != 1:
        raise ArgumentError("convexity slack applies to hypersurfaces only")
    tensors, scalars, _ = newton_chain(h, r)
    slack = scalars[r] * np.eye(h.n) - tensors[r].data
    return slack, float(np.min(np.linalg.eigvalsh(slack)))


def require_positive(eigmin: float, label: str, tol: float = 1e-10):
    if eigmin <= tol:
        raise EllipticityError("%s must be positive definite (min eigenvalue %.3e)"
                               % (label, eigmin))

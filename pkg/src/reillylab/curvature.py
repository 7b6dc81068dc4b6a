"""Induced curvature from the Gauss equations and Lovelock-type tensors.

Conventions: R4[i,j,k,l] is antisymmetric in (i,j) and (k,l) and symmetric
under pair swap; Ric[i,k] = sum_j R4[i,j,k,j]; scalar = trace of Ric.

The Lovelock family is built from antisymmetrized curvature products:

    L_k           = 2^-k     sum delta^{I}_{J} R..R            (2k slots)
    E2[k][i,j]    = -2^-(k+1) sum delta^{I i}_{J j} R..R        (2k+1 slots)
    P4[k][s,t,l,m] = 2^-k    sum delta^{I s t}_{J l m} R..R     (k-1 factors)

where each R factor couples two upper slots with the matching two lower
slots.  E2 is the Einstein tensor for k = 1 and vanishes identically when
2k + 1 > n.

The printed source for the rank-(2k-1) contraction identity (the relation
between sum_a T^a_{2k-1} h^a and the Lovelock data) drops a factor 2^(t+1)
when collapsing antisymmetrized curvature blocks into P4, and its k = 1
specialization contradicts the directly verifiable relation
sum_a T^a_1 h^a = Ric - (n-1) c I.  The coefficients implemented in
contraction_rhs below are re-derived from scratch; tests pin them against
the independent antisymmetrized-sum evaluation of the left-hand side for
k = 1..3 and all ambient curvatures.  In the same spirit the convention
E2[0] = -I/2 (rather than -I) is what makes the trace relation
sum_s P4[k][s,i,s,j] = -(n-2k+1) E2[k-1][i,j] hold at k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError
from .kronecker import index_sum_terms
from .newton import newton_kronecker
from .secondform import SecondFundamentalForm


@dataclass(frozen=True)
class CurvatureData:
    """Riemann, Ricci and scalar curvature of an induced metric."""

    R4: np.ndarray
    Ric: np.ndarray
    scalar: float
    c: float

    @property
    def n(self) -> int:
        return self.Ric.shape[0]

    def sectional(self, i: int, j: int) -> float:
        """Sectional curvature of the coordinate plane (i, j), orthonormal
        frame assumed."""
        return float(self.R4[i, j, i, j])


def gauss_curvature(h, c: float) -> CurvatureData:
    """Curvature of the induced metric from the Gauss equations in an
    ambient space form of curvature c."""
    if not isinstance(h, SecondFundamentalForm):
        h = SecondFundamentalForm(np.asarray(h, dtype=float))
    n = h.n
    eye = np.eye(n)
    dd = np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye)
    hh = np.einsum("xik,xjl->ijkl", h.h, h.h) - np.einsum("xil,xjk->ijkl", h.h, h.h)
    R4 = c * dd + hh
    Ric = np.einsum("ijkj->ik", R4)
    return CurvatureData(R4=R4, Ric=Ric, scalar=float(np.trace(Ric)), c=float(c))


def curvature_from_tensor(R4: np.ndarray, c: float = 0.0) -> CurvatureData:
    """Wrap a raw curvature tensor, enforcing its symmetries."""
    R4 = np.asarray(R4, dtype=float)
    n = R4.shape[0]
    if R4.shape != (n, n, n, n):
        raise ShapeError("curvature tensor must have shape (n, n, n, n)")
    scale = max(1.0, float(np.max(np.abs(R4))))
    for perm, sign in ((( 1, 0, 2, 3), -1.0), ((0, 1, 3, 2), -1.0), ((2, 3, 0, 1), 1.0)):
        if np.max(np.abs(R4 - sign * np.transpose(R4, perm))) > 1e-10 * scale:
            raise ShapeError("curvature tensor lacks the required symmetries")
    Ric = np.einsum("ijkj->ik", R4)
    return CurvatureData(R4=R4, Ric=Ric, scalar=float(np.trace(Ric)), c=float(c))


def random_curvature(n: int, rng, c: float = 0.0) -> CurvatureData:
    """Random tensor with curvature symmetries (pair antisymmetry and pair
    swap), for exercising the purely combinatorial Lovelock identities."""
    A = rng.standard_normal((n, n, n, n))
    A = A - np.transpose(A, (1, 0, 2, 3))
    A = A - np.transpose(A, (0, 1, 3, 2))
    A = A + np.transpose(A, (2, 3, 0, 1))
    A /= max(1.0, np.linalg.norm(A))
    return curvature_from_tensor(A, c=c)


@dataclass(frozen=True)
class LovelockData:
    """Lovelock scalar, Einstein-type tensor and the four-index curvature
    polynomial of a fixed order k."""

    k: int
    L: float
    E2: np.ndarray  # None when 2k + 1 > n (no index assignment exists)
    P4: np.ndarray


def _r_product(R4, up, lo, sg, pairs: int) -> np.ndarray:
    prod = sg.copy()
    for s in range(pairs):
        prod = prod * R4[up[:, 2 * s], up[:, 2 * s + 1], lo[:, 2 * s], lo[:, 2 * s + 1]]
    return prod


def lovelock_scalar(curv: CurvatureData, k: int) -> float:
    n = curv.n
    if not 1 <= k <= n // 2:
        raise ArgumentError("order must satisfy 1 <= k <= n/2")
    up, lo, sg = index_sum_terms(n, 2 * k)
    return float(_r_product(curv.R4, up, lo, sg, k).sum()) / 2 ** k


def lovelock_einstein(curv: CurvatureData, k: int):
    """E2[k]; returns None when 2k + 1 > n."""
    n = curv.n
    if k == 0:
        return -0.5 * np.eye(n)
    if 2 * k + 1 > n:
        return None
    up, lo, sg = index_sum_terms(n, 2 * k + 1)
    prod = _r_product(curv.R4, up, lo, sg, k)
    out = np.zeros((n, n))
    np.add.at(out, (up[:, 2 * k], lo[:, 2 * k]), prod)
    return -out / 2 ** (k + 1)


def lovelock_p4(curv: CurvatureData, k: int) -> np.ndarray:
    """Four-index polynomial P4[k][s,t,l,m] with k-1 curvature factors."""
    n = curv.n
    if not 1 <= k <= n // 2:
        raise ArgumentError("order must satisfy 1 <= k <= n/2")
    up, lo, sg = index_sum_terms(n, 2 * k)
    prod = _r_product(curv.R4, up, lo, sg, k - 1)
    out = np.zeros((n, n, n, n))
    np.add.at(out, (up[:, 2 * k - 2], up[:, 2 * k - 1], lo[:, 2 * k - 2], lo[:, 2 * k - 1]), prod)
    return out / 2 ** k


def lovelock(curv: CurvatureData, k: int) -> LovelockData:
    return LovelockData(k=k, L=lovelock_scalar(curv, k),
                        E2=lovelock_einstein(curv, k), P4=lovelock_p4(curv, k))


def contraction_rhs(curv: CurvatureData, k: int) -> np.ndarray:
    """Lovelock-side of the rank-(2k-1) contraction identity.

    Evaluates, for r = 2k,

      sum_{m,a} T^a_{r-1, mj} h^a_{mi}
        = 1/(2k-1)! * sum_{t=0}^{k-1} (-c)^(k-1-t) C(k-1, t)
            (n-2t-2)!/(n-2k)! [ W_{t+1} + 2 c (n-2t-1) E2[t] ]

    where W_u[i,j] = sum_{s,t,l} P4[u][s,t,l,j] R[s,t,l,i] equals
    (E2[u] + L_u I / 2)/u whenever 2u < n.  W is used directly so the
    formula stays valid at the boundary case 2k = n.
    """
    n = curv.n
    c = curv.c
    if not 1 <= k <= n // 2:
        raise ArgumentError("order must satisfy 1 <= k <= n/2")
    eye = np.eye(n)
    acc = np.zeros((n, n))
    for t in range(k):
        P = lovelock_p4(curv, t + 1)
        W = np.einsum("stlj,stli->ij", P, curv.R4)
        E = lovelock_einstein(curv, t)
        if E is None:
            raise ArgumentError("contraction identity needs 2t < n for all t < k")
        coeff = ((-c) ** (k - 1 - t) * math.comb(k - 1, t)
                 * math.factorial(n - 2 * t - 2) / math.factorial(n - 2 * k))
        acc += coeff * (W + 2.0 * c * (n - 2 * t - 1) * E)
    return acc / math.factorial(2 * k - 1)


def contraction_lhs(h, k: int) -> np.ndarray:
    """sum_{m,a} T^a_{2k-1, mj} h^a_{mi} from the defining sum."""
    if not isinstance(h, SecondFundamentalForm):
        h = SecondFundamentalForm(np.asarray(h, dtype=float))
    T = newton_kronecker(h, 2 * k - 1)
    payload = T.data if T.data.ndim == 3 else T.data[None]
    return np.einsum("xmj,xmi->ij", payload, h.h)


def contraction_residual(h, c: float, k: int) -> float:
    """Max-abs residual between the two sides of the contraction identity."""
    if not isinstance(h, SecondFundamentalForm):
        h = SecondFundamentalForm(np.asarray(h, dtype=float))
    curv = gauss_curvature(h, c)
    return float(np.max(np.abs(contraction_lhs(h, k) - contraction_rhs(curv, k))))

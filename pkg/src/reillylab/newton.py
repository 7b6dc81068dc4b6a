"""Newton transformations of a second fundamental form.

Two independent evaluation paths are provided.  The antisymmetrized-sum
path spells out the defining generalized-Kronecker contraction and serves
as the oracle; the recursion path builds the whole family iteratively from
T_0 = I and is the production implementation.  Tests require the two to
agree to machine precision.

For odd rank the transformation is vector valued (one matrix per normal
direction); for hypersurfaces it collapses to the scalar-valued convention
(component along the unit normal).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError, UnsupportedConfiguration
from .kronecker import index_sum_terms
from .secondform import MeanCurvatureProfile, SecondFundamentalForm


@dataclass(frozen=True)
class NewtonTensor:
    """Newton transformation of rank r.

    data has shape (n, n) when scalar valued (even r, or any r with p = 1)
    and (p, n, n) when vector valued (odd r with p > 1).
    """

    r: int
    data: np.ndarray
    vector_valued: bool

    @property
    def n(self) -> int:
        return self.data.shape[-1]

    def as_matrix(self) -> np.ndarray:
        if self.vector_valued:
            raise UnsupportedConfiguration(
                "rank %d Newton tensor is vector valued for codimension > 1; "
                "no scalar matrix payload exists" % self.r)
        return self.data

    def trace(self):
        if self.vector_valued:
            return np.einsum("xii->x", self.data)
        return float(np.trace(self.data))


def _coerce(h) -> SecondFundamentalForm:
    if isinstance(h, SecondFundamentalForm):
        return h
    return SecondFundamentalForm(np.asarray(h, dtype=float))


def newton_kronecker(h, r: int) -> NewtonTensor:
    """Oracle path: evaluate the defining antisymmetrized sum directly."""
    sff = _coerce(h)
    n, p = sff.n, sff.p
    if not 0 <= r <= n:
        raise ArgumentError("rank must satisfy 0 <= r <= n, got %d" % r)
    if r == 0:
        return NewtonTensor(0, np.eye(n), vector_valued=False)
    up, lo, sg = index_sum_terms(n, r + 1)
    if len(sg) == 0:
        data = np.zeros((n, n)) if (r % 2 == 0 or p == 1) else np.zeros((p, n, n))
        return NewtonTensor(r, data, vector_valued=(r % 2 == 1 and p > 1))
    gram = sff.gram()
    prod = sg.copy()
    for s in range(r // 2):
        prod = prod * gram[up[:, 2 * s], lo[:, 2 * s], up[:, 2 * s + 1], lo[:, 2 * s + 1]]
    fact = math.factorial(r)
    if r % 2 == 0:
        out = np.zeros((n, n))
        np.add.at(out, (up[:, r], lo[:, r]), prod)
        return NewtonTensor(r, out / fact, vector_valued=False)
    out = np.zeros((p, n, n))
    for a in range(p):
        vals = prod * sff.h[a][up[:, r - 1], lo[:, r - 1]]
        np.add.at(out[a], (up[:, r], lo[:, r]), vals)
    out /= fact
    if p == 1:
        return NewtonTensor(r, out[0], vector_valued=False)
    return NewtonTensor(r, out, vector_valued=True)


def newton_chain(h, rmax: int):
    """Recursion path: all Newton tensors and curvature scalars up to rmax.

    Returns (tensors, scalars, vectors) where tensors[r] is a NewtonTensor,
    scalars[r] = S_r for even r (every r when p = 1) and vectors[r] holds
    the normal components of S_r for odd r.

    The even step is the recursion T_r = S_r I - sum_alpha h^alpha
    T^alpha_{r-1} with S_r = (1/r) sum T^alpha_{r-1} : h^alpha.  For p = 1
    the analogous scalar relation T_r = S_r I - h T_{r-1} closes the chain
    at every rank.  For p > 1 no one-step recursion exists for the odd,
    vector-valued ranks (the obvious candidate S^alpha_r I - h^alpha
    T_{r-1} reproduces the correct trace but not the tensor), so odd
    intermediates are evaluated from the defining antisymmetrized sum.
    """
    sff = _coerce(h)
    n, p = sff.n, sff.p
    if not 0 <= rmax <= n:
        raise ArgumentError("rank must satisfy 0 <= rmax <= n, got %d" % rmax)
    eye = np.eye(n)
    tensors = {0: NewtonTensor(0, eye.copy(), vector_valued=False)}
    scalars = {0: 1.0}
    vectors = {}
    prev = eye  # scalar-valued payload of T_{r-1}
    prev_vec = None  # (p, n, n) payload when T_{r-1} is vector valued
    for r in range(1, rmax + 1):
        if r % 2 == 1:
            svec = np.einsum("ij,xij->x", prev, sff.h) / r
            vectors[r] = svec
            if p == 1:
                cur = svec[:, None, None] * eye - np.einsum("xik,kj->xij", sff.h, prev)
                scalars[r] = float(svec[0])
                tensors[r] = NewtonTensor(r, cur[0], vector_valued=False)
            else:
                tensors[r] = newton_kronecker(sff, r)
                cur = tensors[r].data
            prev_vec = cur if cur.ndim == 3 else cur[None]
        else:
            s = float(np.einsum("xij,xij->", prev_vec, sff.h)) / r
            scalars[r] = s
            cur = s * eye - np.einsum("xik,xkj->ij", sff.h, prev_vec)
            tensors[r] = NewtonTensor(r, cur, vector_valued=False)
            prev = cur
    return tensors, scalars, vectors


def newton_tensor(h, r: int, method: str = "recursion") -> NewtonTensor:
    """Newton transformation of rank r by the requested evaluation path."""
    if method == "recursion":
        tensors, _, _ = newton_chain(h, r)
        return tensors[r]
    if method == "kronecker":
        return newton_kronecker(h, r)
    raise ArgumentError("method must be 'recursion' or 'kronecker'")


def weighted_mean_curvature(T, h) -> np.ndarray:
    """Normal components of H_T = sum_{i,j,alpha} h^alpha_ij T_ij e_alpha."""
    sff = _coerce(h)
    if isinstance(T, NewtonTensor):
        if T.vector_valued:
            raise UnsupportedConfiguration(
                "H_T requires a scalar-valued (even rank) weight tensor")
        T = T.data
    T = np.asarray(T, dtype=float)
    if T.shape != (sff.n, sff.n):
        raise ShapeError("weight tensor must be n x n")
    return np.einsum("xij,ij->x", sff.h, T)


def mean_profile(h) -> MeanCurvatureProfile:
    """All curvature scalars/vectors S_r, mean curvatures and the squared
    norm split relative to the principal normal direction."""
    sff = _coerce(h)
    n = sff.n
    _, scalars, vectors = newton_chain(sff, n)
    hvec = sff.mean_vector()
    hlen = float(np.linalg.norm(hvec))
    norm2 = sff.norm2()
    tau2 = None
    if hlen > 1e-14:
        principal = np.einsum("x,xij->ij", hvec / hlen, sff.h)
        tau2 = norm2 - float(np.sum(principal * principal))
    return MeanCurvatureProfile(n=n, p=sff.p, scalars=scalars, vectors=vectors,
                                hvec=hvec, hlen=hlen, norm2=norm2, tau2=tau2)

"""Pointwise second fundamental form data and mean curvature profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormalError, ShapeError

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class SecondFundamentalForm:
    """Second fundamental form at a point, stored as h[alpha, i, j] in an
    orthonormal tangent/normal frame.  alpha runs over the p normal
    directions, i, j over the n tangent directions."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim == 2:
            h = h[None, :, :]
        if h.ndim != 3 or h.shape[1] != h.shape[2]:
            raise ShapeError("h must have shape (p, n, n)")
        if h.shape[1] < 2:
            raise ShapeError("need intrinsic dimension n >= 2")
        scale = max(1.0, float(np.max(np.abs(h))))
        if np.max(np.abs(h - np.swapaxes(h, 1, 2))) > _SYM_TOL * scale:
            raise ShapeError("each h[alpha] must be symmetric")
        object.__setattr__(self, "h", 0.5 * (h + np.swapaxes(h, 1, 2)))

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def p(self) -> int:
        return self.h.shape[0]

    @classmethod
    def from_principal(cls, curvatures) -> "SecondFundamentalForm":
        """Hypersurface (p = 1) form with the given principal curvatures."""
        k = np.asarray(curvatures, dtype=float)
        return cls(np.diag(k)[None, :, :])

    def gram(self) -> np.ndarray:
        """G[a,b,c,d] = sum_alpha h[alpha,a,b] * h[alpha,c,d]."""
        return np.einsum("xab,xcd->abcd", self.h, self.h)

    def mean_vector(self) -> np.ndarray:
        """Mean curvature vector components (trace average per normal)."""
        return np.einsum("xii->x", self.h) / self.n

    def norm2(self) -> float:
        """Squared length of the full form, sum over all components."""
        return float(np.sum(self.h * self.h))

    def principal_direction_form(self) -> np.ndarray:
        """Component of h along the unit mean curvature vector.

        Raises if |H| vanishes; callers that tolerate minimal points must
        check mean_vector first.
        """
        hvec = self.mean_vector()
        hlen = float(np.linalg.norm(hvec))
        if hlen < 1e-14:
            raise DegenerateNormalError("mean curvature vector vanishes")
        return np.einsum("x,xij->ij", hvec / hlen, self.h)


@dataclass(frozen=True)
class MeanCurvatureProfile:
    """Symmetric-function data of a second fundamental form.

    scalars[r] holds S_r for even r (and for every r when p = 1, the
    hypersurface scalar convention).  vectors[r] holds the normal components
    of the vector-valued S_r for odd r.  means[r] = S_r / C(n, r).
    """

    n: int
    p: int
    scalars: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    hvec: np.ndarray = None
    hlen: float = 0.0
    norm2: float = 0.0
    tau2: float = None

    def mean(self, r: int) -> float:
        return self.scalars[r] / math.comb(self.n, r)

    def mean_vector_r(self, r: int) -> np.ndarray:
        return self.vectors[r] / math.comb(self.n, r)

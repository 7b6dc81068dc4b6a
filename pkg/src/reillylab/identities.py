"""Randomized verification suites for the algebraic and conformal identities.

Every algebraic check draws a random second fundamental form, normalizes it
to unit Frobenius norm, and reports the worst absolute residual, so the
suite tolerances are scale free.  The geometric checks compare frame data
of an immersion with the conformal transformation laws and with the weak
form of the curvature identity satisfied by the conformal factor.
"""

import numpy as np

from .curvature import (contraction_residual, gauss_curvature, lovelock_einstein,
                        lovelock_p4, lovelock_scalar)
from .fem import DiscreteGeometry, assemble_forms
from .immersion import pushforward_under_map, AmbientSpace
from .newton import newton_chain, newton_kronecker, weighted_mean_curvature
from .secondform import SecondFundamentalForm


def random_unit_form(rng, n: int, p: int) -> SecondFundamentalForm:
    h = rng.standard_normal((p, n, n))
    h = 0.5 * (h + h.transpose(0, 2, 1))
    return SecondFundamentalForm(h / np.linalg.norm(h))


def _trace_residual(h) -> float:
    n = h.n
    tensors, scalars, vectors = newton_chain(h, n)
    worst = 0.0
    for r in range(n + 1):
        tr = tensors[r].trace()
        if tensors[r].vector_valued:
            worst = max(worst, float(np.max(np.abs(tr - (n - r) * vectors[r]))))
        else:
            want = (n - r) * scalars[r] if r in scalars else (n - r) * vectors[r][0]
            worst = max(worst, abs(tr - want))
    return worst


def _recursion_residual(h) -> float:
    n = h.n
    tensors, _, _ = newton_chain(h, n)
    worst = 0.0
    for r in range(n + 1):
        oracle = newton_kronecker(h, r)
        worst = max(worst, float(np.max(np.abs(tensors[r].data - oracle.data))))
    return worst


def _weighted_mean_residual(h) -> float:
    # H_{T_r} = (r + 1) S_{r+1}, with S_{r+1} recovered from the trace of
    # the independently evaluated next transformation
    n = h.n
    worst = 0.0
    for r in range(0, n - 1, 2):
        t_r = newton_kronecker(h, r)
        h_t = weighted_mean_curvature(t_r, h)
        t_next = newton_kronecker(h, r + 1)
        s_next = np.atleast_1d(t_next.trace()) / (n - r - 1)
        worst = max(worst, float(np.max(np.abs(h_t - (r + 1) * s_next))))
    return worst


def _gauss_scalar_residual(h, c: float) -> float:
    curv = gauss_curvature(h, c)
    n = h.n
    mean2 = float(np.sum(h.mean_vector() ** 2))
    return abs(curv.scalar - (n * (n - 1) * c + n * n * mean2 - h.norm2()))


def _lovelock_residuals(h, c: float) -> dict:
    n = h.n
    curv = gauss_curvature(h, c)
    eye = np.eye(n)
    out = {"lovelock_trace": 0.0, "lovelock_pairing": 0.0, "lovelock_partial": 0.0}
    for k in range(1, n // 2 + 1):
        L = lovelock_scalar(curv, k)
        P = lovelock_p4(curv, k)
        E = lovelock_einstein(curv, k)
        if E is not None:
            out["lovelock_trace"] = max(
                out["lovelock_trace"], abs(np.trace(E) + 0.5 * (n - 2 * k) * L))
            Wk = np.einsum("stlj,stli->ij", P, curv.R4)
            out["lovelock_pairing"] = max(
                out["lovelock_pairing"], float(np.max(np.abs(E - k * Wk + 0.5 * L * eye))))
        prev = lovelock_einstein(curv, k - 1)
        ptrace = np.einsum("sisj->ij", P)
        out["lovelock_partial"] = max(
            out["lovelock_partial"], float(np.max(np.abs(ptrace + (n - 2 * k + 1) * prev))))
    return out


def identity_suite(instances: int = 100, seed: int = 0) -> dict:
    """Worst residual of each algebraic identity over random unit forms.

    Dimensions cycle through 2..6 and codimensions through 1..3; the
    contraction checks run at first order everywhere and at second order
    for n in {4, 5, 6}.
    """
    rng = np.random.default_rng(seed)
    worst = {"newton_trace": 0.0, "newton_recursion": 0.0,
             "weighted_mean": 0.0, "gauss_scalar": 0.0,
             "lovelock_trace": 0.0, "lovelock_pairing": 0.0,
             "lovelock_partial": 0.0, "contraction_k1": 0.0,
             "contraction_k2": 0.0}
    for i in range(instances):
        n = 2 + i % 5
        p = 1 + i % 3
        c = float([-1.0, 0.0, 1.0][i % 3])
        h = random_unit_form(rng, n, p)
        worst["newton_trace"] = max(worst["newton_trace"], _trace_residual(h))
        worst["newton_recursion"] = max(worst["newton_recursion"],
                                        _recursion_residual(h))
        worst["weighted_mean"] = max(worst["weighted_mean"],
                                     _weighted_mean_residual(h))
        worst["gauss_scalar"] = max(worst["gauss_scalar"],
                                    _gauss_scalar_residual(h, c))
        for key, val in _lovelock_residuals(h, c).items():
            worst[key] = max(worst[key], val)
        worst["contraction_k1"] = max(worst["contraction_k1"],
                                      contraction_residual(h, c, 1))
        if n >= 4:
            worst["contraction_k2"] = max(worst["contraction_k2"],
                                          contraction_residual(h, c, 2))
    return worst


def conformal_stretch_residual(immersion, chain, count: int = 5,
                               seed: int = 0) -> float:
    """Frame identity of the composed test map.

    The differentials of the chain components along an orthonormal tangent
    frame satisfy sum_A Phi^A_i Phi^A_j = e^{2 rho} delta_ij.
    """
    rng = np.random.default_rng(seed)
    tm = chain.test_map()
    worst = 0.0
    for _ in range(count):
        fr = immersion.frame_at(immersion.domain.random_point(rng))
        jac = tm.jacobian(fr.point)
        v = fr.tangent @ jac.T
        gram = v @ v.T
        fac = chain.factor(fr.point)
        worst = max(worst, float(np.max(np.abs(gram - fac * np.eye(fr.n)))) / fac)
    return worst


def second_form_transform_residual(immersion, chain, count: int = 3,
                                   seed: int = 1) -> float:
    """Transformation law of the second fundamental form, hypersurfaces.

    The image of the immersion under the chain sits in the unit sphere;
    its shape eigenvalues must match e^{-rho} (kappa_i - <grad rho, nu>)
    computed from the original frame, up to the orientation of the normal.
    """
    if immersion.p != 1:
        raise ValueError("eigenvalue comparison requires codimension one")
    rng = np.random.default_rng(seed)
    target = AmbientSpace(1.0, chain.dim)
    moved = pushforward_under_map(immersion, chain.test_map(), target)
    worst = 0.0
    for _ in range(count):
        w = immersion.domain.random_point(rng)
        fr = immersion.frame_at(w)
        grad = chain.grad_rho(fr.point)
        rho_nu = float(immersion.ambient.inner(grad, fr.normal[0]))
        kappa = np.linalg.eigvalsh(fr.h.h[0])
        rho = chain.rho(fr.point)
        predicted = np.sort(np.exp(-rho) * (kappa - rho_nu))
        got = np.sort(np.linalg.eigvalsh(moved.frame_at(w).h.h[0]))
        err = min(float(np.max(np.abs(got - predicted))),
                  float(np.max(np.abs(np.sort(-got) - predicted))))
        scale = max(1.0, float(np.max(np.abs(predicted))))
        worst = max(worst, err / scale)
    return worst


def factor_curvature_residual(immersion, mesh, chain, tensor_field=None) -> float:
    """Weak residual of the identity satisfied by the conformal factor.

    Pointwise, e^{2 rho} tr T = c tr T + 2 L_T rho - tr T |grad rho perp|^2
    + 2 <H_T, grad rho perp> - T'(grad rho, grad rho) on the submanifold.
    The L_T term is integrated by parts against P1 hat functions; the
    return value is the l1 norm of the weak residual vector, which shrinks
    like the square of the mesh size for smooth data.
    """
    geom = DiscreteGeometry(immersion, mesh)
    space = immersion.ambient
    nverts = mesh.points.shape[0]
    field = np.empty(nverts)
    rho_vals = np.empty(nverts)
    for idx, fr in enumerate(geom.vertex_frames):
        tmat = np.eye(fr.n) if tensor_field is None else np.asarray(tensor_field(fr))
        tr = float(np.trace(tmat))
        grad = chain.grad_rho(fr.point)
        tang = np.array([float(space.inner(grad, e)) for e in fr.tangent])
        perp = grad - tang @ fr.tangent
        perp2 = float(space.inner(perp, perp))
        h_t = fr.weighted_normal(tmat) @ fr.normal
        cross = float(space.inner(h_t, perp))
        tprime = tang @ ((tr * np.eye(fr.n) - 2.0 * tmat) @ tang)
        rho = chain.rho(fr.point)
        field[idx] = (np.exp(2.0 * rho) * tr - space.c * tr
                      + tr * perp2 - 2.0 * cross + tprime)
        rho_vals[idx] = rho
    stiffness, mass = assemble_forms(geom, tensor_field=tensor_field)
    residual = mass @ field - 2.0 * (stiffness @ rho_vals)
    return float(np.sum(np.abs(residual)))

"""Sharp second-eigenvalue reports.

A report evaluates both sides of the bound

    lambda_2 <= (1/V) integral of (c tr T + |H_T|^2 / tr T)

for a chosen weight tensor T (plus the mean of q for Schrodinger-type
operators), together with the equality-case diagnostics: constancy of
tr T, T-minimality inside the estimated geodesic sphere, the geodesic
radius recovered from (tr T / lambda_2)^(1/2), and a weak position-vector
eigenfunction residual.  Positivity of T and semi-positivity of
T' = (tr T) I - 2 T are reported as minimum eigenvalues over the sample
set; when T is not positive the inequality is not asserted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ellipticity import mean_curvature_tensor
from .errors import (ArgumentError, EllipticityError, InequalityViolation,
                     UnsupportedConfiguration)
from .fem import DiscreteGeometry, assemble_forms
from .mesh import icosphere, projective_icosphere, torus_grid
from .newton import newton_tensor
from .spectra import product_spectrum, solve_pencil, sphere_spectrum

TOL_FEM = 0.03
TOL_EXACT = 1e-9

CSV_COLUMNS = ("name", "c", "operator", "lambda2", "rhs", "gap",
               "trT_min", "Tprime_min", "radius", "backend")


@dataclass(frozen=True)
class OperatorSpec:
    """Choice of the weight tensor T and an optional potential.

    kind: "identity", "newton" (rank in `degree`), "mean_curvature",
    or "custom" with a tensor_fn(PointFrame) -> (n, n) array.  The
    potential, when present, is a callable PointFrame -> float.
    """

    kind: str = "identity"
    degree: int = 2
    tensor_fn: object = None
    potential: object = None

    def __post_init__(self):
        if self.kind not in ("identity", "newton", "mean_curvature", "custom"):
            raise ArgumentError("unknown operator kind %r" % (self.kind,))
        if self.kind == "newton" and self.degree < 0:
            raise ArgumentError("newton rank must be nonnegative")
        if self.kind == "custom" and self.tensor_fn is None:
            raise ArgumentError("custom operator needs a tensor_fn")

    @property
    def label(self) -> str:
        if self.kind == "newton":
            return "newton:%d" % self.degree
        return self.kind

    def tensor_at(self, frame) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(frame.n)
        if self.kind == "newton":
            if self.degree > frame.n - 2:
                raise ArgumentError(
                    "newton rank %d exceeds n-2 = %d" % (self.degree, frame.n - 2))
            if frame.p > 1 and self.degree % 2 == 1:
                raise UnsupportedConfiguration(
                    "odd newton ranks need codimension one")
            return newton_tensor(frame.h, self.degree).as_matrix()
        if self.kind == "mean_curvature":
            return mean_curvature_tensor(frame.h).T
        return np.asarray(self.tensor_fn(frame), dtype=float)


def operator_from_label(label: str) -> OperatorSpec:
    """Parse "identity", "newton:<r>", "mean_curvature" into a spec."""
    label = str(label)
    if label.startswith("newton:"):
        return OperatorSpec(kind="newton", degree=int(label.split(":", 1)[1]))
    return OperatorSpec(kind=label)


@dataclass
class ReillyReport:
    """Both sides of the bound plus diagnostics for one geometry."""

    name: str
    c: float
    operator: str
    lambda2: float
    rhs: float
    volume: float
    backend: str
    tolerance: float
    preconditions: dict
    equality: dict
    qbar: float = 0.0
    asserted: bool = True
    passed: bool = True
    notes: list = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.rhs - self.lambda2

    def as_dict(self) -> dict:
        out = {
            "name": self.name, "c": self.c, "operator": self.operator,
            "lambda2": self.lambda2, "rhs": self.rhs, "gap": self.gap,
            "qbar": self.qbar, "volume": self.volume, "backend": self.backend,
            "tolerance": self.tolerance, "asserted": self.asserted,
            "passed": self.passed, "notes": list(self.notes),
            "preconditions": dict(self.preconditions),
            "equality": dict(self.equality),
        }
        return out

    def csv_cells(self) -> list:
        radius = self.equality.get("radius_estimate")
        return [self.name, "%.17g" % self.c, self.operator,
                "%.17g" % self.lambda2, "%.17g" % self.rhs,
                "%.17g" % self.gap,
                "%.17g" % self.preconditions["trT_min"],
                "%.17g" % self.preconditions["Tprime_min"],
                "" if radius is None else "%.17g" % radius,
                self.backend]


def write_report_csv(reports, stream_or_path):
    """One header line and one row per report, stable formatting.

    Gallery names contain commas, so rows go through the csv module's
    minimal quoting.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow(rep.csv_cells())
    text = buf.getvalue()
    if hasattr(stream_or_path, "write"):
        stream_or_path.write(text)
    else:
        with open(stream_or_path, "w") as fh:
            fh.write(text)
    return text


def _integrand_at(frame, spec, c):
    T = spec.tensor_at(frame)
    trT = float(np.trace(T))
    if trT <= 0.0:
        raise EllipticityError("tr T must be positive, got %.3e" % trT)
    wn = frame.weighted_normal(T)
    return c * trT + float(wn @ wn) / trT, T, trT, wn


def _precondition_update(pre, T, trT):
    eig = np.linalg.eigvalsh(T)
    eigp = np.linalg.eigvalsh(trT * np.eye(T.shape[0]) - 2.0 * T)
    pre["T_posdef_min"] = min(pre.get("T_posdef_min", math.inf), float(eig[0]))
    pre["Tprime_min"] = min(pre.get("Tprime_min", math.inf), float(eigp[0]))
    pre["trT_min"] = min(pre.get("trT_min", math.inf), trT)


def _radius_estimate(trT_mean, lam2, c):
    """Geodesic radius from r0 = (trT / lambda2)^(1/2), branch per c."""
    if lam2 <= 0.0 or trT_mean <= 0.0:
        return None, ["radius estimate undefined for nonpositive data"]
    r0 = math.sqrt(trT_mean / lam2)
    if c == 0.0:
        return r0, []
    if c == 1.0:
        if r0 > 1.0 + 1e-12:
            return None, ["radius parameter %.6g exceeds 1; no geodesic "
                          "sphere of curvature 1 fits the equality case" % r0]
        return math.asin(min(r0, 1.0)), []
    return math.asinh(r0), []


def mesh_for(immersion, level: int):
    """Default mesh family for a two-dimensional gallery geometry."""
    topo = immersion.metadata.get("topology", "sphere")
    if immersion.metadata.get("antipodal_quotient"):
        return projective_icosphere(level)
    if topo == "sphere":
        return icosphere(level)
    if topo == "torus":
        return torus_grid(3 * 2 ** level)
    raise UnsupportedConfiguration("no mesh family for topology %r" % topo)


def _centroid(positions, areas, triangles):
    """Area-weighted mean of the ambient positions."""
    corner = positions[triangles]  # (F, 3, N)
    m = np.einsum("f,fn->n", areas, np.mean(corner, axis=1))
    return m / float(np.sum(areas))


def _sphere_center(positions, areas, triangles, c):
    """Area-weighted ambient centroid, normalized back to the space form."""
    m = _centroid(positions, areas, triangles)
    if c == 0.0:
        return m
    if c == 1.0:
        norm = np.linalg.norm(m)
        return m / norm if norm > 1e-12 else m
    q = m[-1] ** 2 - float(m[:-1] @ m[:-1])
    return m / math.sqrt(q) if q > 1e-12 else m


def _t_minimal_residual(frames, tensors, center, space):
    """Largest non-radial part of H_T relative to the estimated center.

    A T-minimal submanifold of a geodesic sphere has H_T parallel to the
    sphere's radial direction at every point.
    """
    worst = 0.0
    scale = 1e-30
    for fr, T in zip(frames, tensors):
        wn = fr.weighted_normal(T)
        ht = wn @ fr.normal
        scale = max(scale, float(np.sqrt(abs(space.inner(ht, ht)))))
        if space.c == 0.0:
            rad = fr.point - center
        else:
            rad = space.project_radial_out(fr.point, center)
        nrm2 = space.inner(rad, rad)
        if nrm2 < 1e-18:
            continue
        rad = rad / math.sqrt(nrm2)
        resid = ht - space.inner(ht, rad) * rad
        worst = max(worst, float(np.sqrt(abs(space.inner(resid, resid)))))
    return worst / scale


def takahashi_residual(geom, stiffness, mass, trT_vertex, cprime, center):
    """Weak residual of L_T x = c' (tr T) x for the centered position vector.

    Integrated against every P1 hat function and summed in l1 over
    coordinates; decreases at the discretization rate on true equality
    cases.
    """
    X = geom.positions - np.asarray(center)[None, :]
    lhs = stiffness @ X
    rhs = mass @ (cprime * trT_vertex[:, None] * X)
    return float(np.sum(np.abs(lhs - rhs)))


def rhs_integral(geom_or_immersion, spec: OperatorSpec, samples: int = 32,
                 seed: int = 0):
    """Mean of c trT + |H_T|^2/trT, by P1 quadrature or by frame sampling.

    Accepts a DiscreteGeometry (mesh quadrature, exact for the interpolant)
    or a ParametricImmersion (sample mean; intended for homogeneous
    geometries where the integrand is constant).  Returns (value, stddev).
    """
    if isinstance(geom_or_immersion, DiscreteGeometry):
        geom = geom_or_immersion
        c = geom.immersion.ambient.c
        vals = np.array([_integrand_at(fr, spec, c)[0]
                         for fr in geom.vertex_frames])
        return geom.integrate(vals) / geom.volume, float(np.std(vals))
    imm = geom_or_immersion
    pts = imm.sample_points(samples, seed=seed)
    vals = np.array([_integrand_at(imm.frame_at(w), spec, imm.ambient.c)[0]
                     for w in pts])
    return float(np.mean(vals)), float(np.std(vals))


def t_minimality(immersion, spec: OperatorSpec, level: int = 4, mesh=None,
                 cprime: float = None) -> dict:
    """T-minimality diagnostics for a hypothesized containing sphere.

    Returns the largest |H_T| over vertices, the largest non-radial
    fraction of H_T relative to the estimated sphere center, and the weak
    residual of L_T x = c'(trT) x.  When cprime is omitted it is estimated
    from the computed second eigenvalue via c' = lambda2 / mean(trT).
    """
    if mesh is None:
        mesh = mesh_for(immersion, level)
    geom = DiscreteGeometry(immersion, mesh)
    space = immersion.ambient
    tensor_field = None if spec.kind == "identity" else spec.tensor_at
    stiffness, mass = assemble_forms(geom, tensor_field)

    trT_vertex = np.empty(mesh.vertex_count)
    tensors = []
    ht_max = 0.0
    for i, fr in enumerate(geom.vertex_frames):
        T = spec.tensor_at(fr)
        tensors.append(T)
        trT_vertex[i] = float(np.trace(T))
        wn = fr.weighted_normal(T)
        ht_max = max(ht_max, float(np.linalg.norm(wn)))
    trT_mean = geom.integrate(trT_vertex) / geom.volume
    if cprime is None:
        cprime = solve_pencil(stiffness, mass, count=4).lambda2() / trT_mean

    center = _sphere_center(geom.positions, geom.areas, mesh.triangles, space.c)
    return {
        "HT_max": ht_max,
        "Tminimal_residual": _t_minimal_residual(geom.vertex_frames, tensors,
                                                 center, space),
        "takahashi_residual": takahashi_residual(
            geom, stiffness, mass, trT_vertex, cprime,
            _centroid(geom.positions, geom.areas, mesh.triangles)),
        "cprime": float(cprime),
    }


def fem_report(immersion, spec: OperatorSpec, level: int = 4, mesh=None,
               tol: float = TOL_FEM, count: int = 12,
               chain=None) -> ReillyReport:
    """Assemble, solve, and diagnose the bound on a triangle mesh."""
    if mesh is None:
        mesh = mesh_for(immersion, level)
    geom = DiscreteGeometry(immersion, mesh)
    space = immersion.ambient
    c = space.c

    tensor_field = None if spec.kind == "identity" else spec.tensor_at
    stiffness, mass = assemble_forms(geom, tensor_field, potential=spec.potential)
    spectrum = solve_pencil(stiffness, mass, count=count)
    has_q = spec.potential is not None
    lam2 = spectrum.lambda2(has_potential=has_q)

    pre = {}
    integrand = np.empty(mesh.vertex_count)
    trT_vertex = np.empty(mesh.vertex_count)
    tensors = []
    for i, fr in enumerate(geom.vertex_frames):
        integrand[i], T, trT_vertex[i], _ = _integrand_at(fr, spec, c)
        tensors.append(T)
        _precondition_update(pre, T, trT_vertex[i])
    rhs = geom.integrate(integrand) / geom.volume

    qbar = 0.0
    qvals = None
    if has_q:
        qvals = geom.vertex_values(spec.potential)
        qbar = geom.integrate(qvals) / geom.volume
        rhs += qbar

    trT_mean = geom.integrate(trT_vertex) / geom.volume
    radius, notes = _radius_estimate(trT_mean, lam2 - qbar, c)
    center = _sphere_center(geom.positions, geom.areas, mesh.triangles, c)
    equality = {
        "trT_mean": trT_mean,
        "trT_stddev": float(np.std(trT_vertex)),
        "Tminimal_residual": _t_minimal_residual(geom.vertex_frames, tensors,
                                                 center, space),
        "radius_estimate": radius,
    }
    cprime = (lam2 - qbar) / trT_mean
    if has_q:
        field_vals = cprime * trT_vertex + qvals
        equality["potential_constancy_stddev"] = float(np.std(field_vals))
    else:
        # weak residual of L_T x = c'(trT) x; positions relative to the raw
        # centroid so constant coordinates of curved ambients drop out
        equality["takahashi_residual"] = takahashi_residual(
            geom, stiffness, mass, trT_vertex, cprime,
            _centroid(geom.positions, geom.areas, mesh.triangles))
    if chain is not None:
        equality["HT_alignment_residual"] = ht_alignment_residual(
            geom.vertex_frames, tensors, chain, space)

    report = ReillyReport(
        name=immersion.name, c=c, operator=spec.label, lambda2=lam2, rhs=rhs,
        volume=geom.volume, backend=spectrum.backend, tolerance=tol,
        preconditions=pre, equality=equality, qbar=qbar)
    _assert_bound(report, tol)
    return report


def ht_alignment_residual(frames, tensors, chain, space):
    """Deviation of H_T from (tr T) times the normal gradient of the
    conformal factor; vanishes exactly on balanced equality cases."""
    worst = 0.0
    for fr, T in zip(frames, tensors):
        ht = fr.weighted_normal(T) @ fr.normal
        grad = chain.grad_rho(fr.point)
        tang = np.array([space.inner(grad, e) for e in fr.tangent])
        perp = grad - tang @ fr.tangent
        resid = ht - float(np.trace(T)) * perp
        mag = math.sqrt(abs(space.inner(resid, resid)))
        worst = max(worst, mag / max(1.0, math.sqrt(abs(space.inner(ht, ht)))))
    return worst


def closed_form_report(immersion, spec: OperatorSpec, samples: int = 32,
                       seed: int = 0, tol: float = TOL_EXACT,
                       count: int = 12) -> ReillyReport:
    """Bound report through an exact spectral backend (no mesh).

    Requires a reference record for the operator label carrying either a
    weighted sphere backend or per-factor product data.  The right side is
    still evaluated independently from sampled frames.
    """
    record = immersion.reference.get(spec.label)
    if record is None or record.backend.get("kind") not in ("sphere", "product"):
        raise UnsupportedConfiguration(
            "no closed-form spectral backend for %s on %s"
            % (spec.label, immersion.name))
    space = immersion.ambient
    c = space.c

    pts = immersion.sample_points(samples, seed=seed)
    frames = [immersion.frame_at(w) for w in pts]
    pre = {}
    vals = np.empty(samples)
    trs = np.empty(samples)
    tensors = []
    for i, fr in enumerate(frames):
        vals[i], T, trs[i], _ = _integrand_at(fr, spec, c)
        tensors.append(T)
        _precondition_update(pre, T, trs[i])
    rhs = float(np.mean(vals))

    back = record.backend
    if back["kind"] == "sphere":
        spectrum = sphere_spectrum(back["dim"], back["radius"], count=count)
        lam2 = back.get("scale", 1.0) * spectrum.lambda2()
    else:
        spectrum = product_spectrum(
            [(f["dim"], f["radius"]) for f in back["factors"]],
            weights=[f["t"] for f in back["factors"]], count=count)
        lam2 = spectrum.lambda2()

    trT_mean = float(np.mean(trs))
    radius, notes = _radius_estimate(trT_mean, lam2, c)
    center = record.center if record.center is not None else None
    equality = {
        "trT_mean": trT_mean,
        "trT_stddev": float(np.std(trs)),
        "radius_estimate": radius,
    }
    if center is not None:
        equality["Tminimal_residual"] = _t_minimal_residual(
            frames, tensors, np.asarray(center, dtype=float), space)

    report = ReillyReport(
        name=immersion.name, c=c, operator=spec.label, lambda2=lam2, rhs=rhs,
        volume=math.nan, backend=spectrum.backend, tolerance=tol,
        preconditions=pre, equality=equality, notes=notes)
    _assert_bound(report, tol)
    return report


def check_inequality(immersion, spec: OperatorSpec, level: int = 4,
                     tol: float = None, **kw) -> ReillyReport:
    """Dispatch to the mesh solver (surfaces) or exact spectra (n >= 3)."""
    if immersion.n == 2:
        return fem_report(immersion, spec, level=level,
                          tol=TOL_FEM if tol is None else tol, **kw)
    return closed_form_report(immersion, spec,
                              tol=TOL_EXACT if tol is None else tol, **kw)


def _assert_bound(report: ReillyReport, tol: float):
    """Mark the report; raise only when a trusted precondition holds but
    the inequality fails beyond tolerance."""
    scale = max(abs(report.rhs), abs(report.lambda2), 1e-30)
    if report.preconditions["T_posdef_min"] <= 0.0 or \
            report.preconditions["Tprime_min"] < -1e-10 * scale:
        report.asserted = False
        report.notes.append("positivity preconditions fail; bound not asserted")
        return
    report.passed = report.gap >= -tol * scale
    if not report.passed:
        raise InequalityViolation(
            "second eigenvalue %.12g exceeds the bound %.12g by more than "
            "tolerance %.3g on %s" % (report.lambda2, report.rhs, tol,
                                      report.name))


def schrodinger_report(immersion, spec: OperatorSpec, level: int = 4,
                       **kw) -> ReillyReport:
    """Potential-carrying variant; the bound gains the potential's mean."""
    if spec.potential is None:
        raise ArgumentError("schrodinger report needs a potential")
    return fem_report(immersion, spec, level=level, **kw)


def mean_tensor_report(immersion, samples: int = 64, seed: int = 0,
                       tol: float = TOL_EXACT, count: int = 12) -> ReillyReport:
    """Bound for the mean-curvature-direction operator on n >= 4 geometry.

    Checks H2 > 0 at every sample, evaluates the right side both through
    the general |H_T|^2/trT integrand and through its decomposition into
    H2, the off-principal part tau, and principal cross terms, and requires
    the two to agree at machine precision before reporting.
    """
    n = immersion.n
    p = immersion.p
    if n < 4:
        raise UnsupportedConfiguration("mean tensor bound needs n >= 4")
    if p < 2:
        raise UnsupportedConfiguration("mean tensor report covers p >= 2; "
                                       "use the newton operator for p = 1")
    spec = OperatorSpec(kind="mean_curvature")
    c = immersion.ambient.c

    pts = immersion.sample_points(samples, seed=seed)
    pre = {}
    general = np.empty(samples)
    split = np.empty(samples)
    trs = np.empty(samples)
    h2min = math.inf
    for i, w in enumerate(pts):
        fr = immersion.frame_at(w)
        data = mean_curvature_tensor(fr.h)
        if data.H2 <= 0.0:
            raise EllipticityError(
                "second mean curvature must be positive, got %.3e" % data.H2)
        h2min = min(h2min, data.H2)
        general[i], T, trs[i], _ = _integrand_at(fr, spec, c)
        _precondition_update(pre, T, trs[i])

        hmat = fr.h.h  # (p, n, n)
        unit = fr.h.mean_vector() / (data.H * 1.0)
        principal = np.einsum("a,aij->ij", unit, hmat)
        tau2 = float(np.sum(hmat * hmat)) - float(np.sum(principal * principal))
        cvec = np.einsum("ij,aij->a", principal, hmat)
        cross = float(cvec @ cvec) - float(np.sum(principal * principal)) ** 2
        H = data.H
        split[i] = n * (n - 1) * (
            c * H
            + (data.H2 + tau2 / (n * (n - 1))) ** 2 / H
            + cross / (n ** 2 * (n - 1) ** 2 * H))

    agree = float(np.max(np.abs(general - split)))
    if agree > 1e-10 * max(1.0, float(np.max(np.abs(general)))):
        raise InequalityViolation(
            "decomposed and general right sides disagree by %.3e" % agree)

    record = immersion.reference.get("mean_curvature")
    if record is None or record.backend.get("kind") not in ("sphere", "product"):
        raise UnsupportedConfiguration(
            "no closed-form spectral backend for the mean tensor on %s"
            % immersion.name)
    back = record.backend
    if back["kind"] == "sphere":
        lam2 = back.get("scale", 1.0) * sphere_spectrum(
            back["dim"], back["radius"], count=count).lambda2()
        backend = "sphere-exact"
    else:
        lam2 = product_spectrum(
            [(f["dim"], f["radius"]) for f in back["factors"]],
            weights=[f["t"] for f in back["factors"]], count=count).lambda2()
        backend = "product-exact"

    rhs = float(np.mean(general))
    trT_mean = float(np.mean(trs))
    radius, notes = _radius_estimate(trT_mean, lam2, c)
    report = ReillyReport(
        name=immersion.name, c=c, operator="mean_curvature", lambda2=lam2,
        rhs=rhs, volume=math.nan, backend=backend, tolerance=tol,
        preconditions=pre,
        equality={"trT_mean": trT_mean, "trT_stddev": float(np.std(trs)),
                  "radius_estimate": radius,
                  "H2_min": h2min,
                  "decomposition_agreement": agree},
        notes=notes)
    _assert_bound(report, tol)
    return report


def reports_json(reports) -> str:
    return json.dumps([r.as_dict() for r in reports], indent=2,
                      sort_keys=True, default=float)

"""Scenario-driven command line front end.

Subcommands: run a JSON scenario config, verify the random-instance
identity suites, produce mesh-refinement convergence tables and plots,
balance a point measure loaded from an OFF file, and list or export the
gallery.  Exit codes: 0 all checks passed, 1 configuration problem,
2 an asserted inequality or identity failed.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .balance import balance_measure
from .errors import (ConfigError, InequalityViolation, ReillyLabError,
                     UnsupportedConfiguration)
from .fem import DiscreteGeometry
from .gallery import GALLERY, gallery, list_gallery
from .identities import (conformal_stretch_residual, identity_suite,
                         second_form_transform_residual)
from .mesh import load_off, save_off
from .moebius import ConformalChain, MoebiusParam, hyperboloid_to_ball
from .reports import (OperatorSpec, check_inequality, mean_tensor_report,
                      mesh_for, reports_json, write_report_csv)
from .svgplot import fit_loglog_slope, line_plot

DEFAULT_LEVELS = (3, 4, 5)
_OUTPUT_KINDS = ("report", "convergence", "balance", "identities")


def default_seed(explicit=None) -> int:
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("REILLY_LAB_SEED")
    return int(env) if env else 0


def _potential_from_config(cfg, where):
    kind = cfg.get("kind", "constant")
    if kind == "constant":
        value = float(cfg.get("value", 0.0))
        return lambda fr: value
    if kind == "coordinate":
        axis = int(cfg.get("axis", 0))
        scale = float(cfg.get("scale", 1.0))
        return lambda fr: scale * float(fr.point[axis])
    raise ConfigError("%s: unknown potential kind %r" % (where, kind))


def _operator_from_config(cfg, where):
    if isinstance(cfg, str):
        cfg = {"kind": cfg}
    kind = cfg.get("kind", "identity")
    if isinstance(kind, str) and kind.startswith("newton:"):
        cfg = dict(cfg, kind="newton", degree=int(kind.split(":", 1)[1]))
        kind = "newton"
    if kind not in ("identity", "newton", "mean_curvature"):
        raise ConfigError("%s: unknown operator kind %r" % (where, kind))
    potential = None
    if "potential" in cfg:
        potential = _potential_from_config(cfg["potential"], where)
    return OperatorSpec(kind=kind, degree=int(cfg.get("degree", 2)),
                        potential=potential)


def load_scenarios(path) -> list:
    """Parse and validate a config; geometry construction happens here so
    that bad gallery parameters surface as configuration errors."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON (line %d column %d): %s"
                          % (path, exc.lineno, exc.colno, exc.msg))
    if isinstance(doc, dict):
        doc = doc.get("scenarios")
    if not isinstance(doc, list) or not doc:
        raise ConfigError("config must hold a nonempty 'scenarios' list")

    out = []
    names = set()
    for idx, sc in enumerate(doc):
        where = "scenario %d" % idx
        if not isinstance(sc, dict):
            raise ConfigError("%s: must be an object" % where)
        name = sc.get("name")
        if not name or not isinstance(name, str):
            raise ConfigError("%s: missing 'name'" % where)
        where = "scenario %d (%s)" % (idx, name)
        if name in names:
            raise ConfigError("%s: duplicate name" % where)
        names.add(name)
        geo = sc.get("geometry")
        if not isinstance(geo, dict) or "gallery" not in geo:
            raise ConfigError("%s: geometry needs a 'gallery' field" % where)
        if geo["gallery"] not in GALLERY:
            raise ConfigError("%s: unknown gallery item %r (known: %s)"
                              % (where, geo["gallery"],
                                 ", ".join(list_gallery())))
        try:
            imm = gallery(geo["gallery"], **geo.get("params", {}))
        except (ReillyLabError, TypeError) as exc:
            raise ConfigError("%s: geometry parameters rejected: %s"
                              % (where, exc))
        spec = _operator_from_config(sc.get("operator", "identity"), where)
        level = int(sc.get("level", 4))
        levels = sc.get("levels")
        if levels is not None:
            levels = [int(v) for v in levels]
            if any(b <= a for a, b in zip(levels, levels[1:])) or not levels:
                raise ConfigError("%s: levels must be strictly increasing"
                                  % where)
        outputs = sc.get("outputs", ["report"])
        bad = [o for o in outputs if o not in _OUTPUT_KINDS]
        if bad:
            raise ConfigError("%s: unknown outputs %s (known: %s)"
                              % (where, bad, ", ".join(_OUTPUT_KINDS)))
        out.append({
            "name": name, "immersion": imm, "spec": spec, "level": level,
            "levels": levels, "outputs": list(outputs),
            "tol": sc.get("tol"), "count": int(sc.get("count", 100)),
        })
    return out


def _scenario_report(sc, tol_override):
    imm = sc["immersion"]
    spec = sc["spec"]
    tol = sc["tol"] if tol_override is None else tol_override
    if spec.kind == "mean_curvature" and imm.n >= 4 and imm.p >= 2:
        kw = {} if tol is None else {"tol": float(tol)}
        return mean_tensor_report(imm, **kw)
    kw = {} if tol is None else {"tol": float(tol)}
    return check_inequality(imm, spec, level=sc["level"], **kw)


def convergence_rows(immersion, spec, levels, tol=None):
    """level, vertices, lambda2, rhs, gap per mesh level (FEM only)."""
    if immersion.n != 2:
        raise UnsupportedConfiguration(
            "convergence studies need a two-dimensional geometry")
    from .reports import fem_report
    rows = []
    for lvl in levels:
        rep = fem_report(immersion, spec, level=lvl,
                         tol=1.0 if tol is None else tol)
        mesh = mesh_for(immersion, lvl)
        rows.append((lvl, mesh.vertex_count, rep.lambda2, rep.rhs, rep.gap))
    return rows


def write_convergence_csv(rows, path):
    with open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("level", "vertices", "lambda2", "rhs", "gap"))
        for lvl, nv, lam, rhs, gap in rows:
            writer.writerow((lvl, nv, "%.17g" % lam, "%.17g" % rhs,
                             "%.17g" % gap))


def convergence_plot(rows, reference, title):
    """Log-log plot of the eigenvalue error against mesh size h."""
    hs = [1.0 / math.sqrt(nv) for _, nv, _, _, _ in rows]
    errs = [abs(lam - reference) for _, _, lam, _, _ in rows]
    if min(errs) <= 0.0:
        raise UnsupportedConfiguration("zero error; nothing to plot on log axes")
    slope = fit_loglog_slope(hs, errs)
    series = [{"label": "slope %.2f" % slope, "x": hs, "y": errs}]
    return line_plot(series, title=title, xlabel="mesh size h",
                     ylabel="|lambda2 - reference|", logx=True,
                     logy=True), slope


def _balance_artifact(sc, outdir):
    imm = sc["immersion"]
    if imm.metadata.get("topology") != "sphere" or imm.n != 2:
        raise ConfigError("scenario %s: balance output needs a sphere-domain "
                          "surface" % sc["name"])
    mesh = mesh_for(imm, sc["level"])
    geom = DiscreteGeometry(imm, mesh)
    weights = np.zeros(mesh.vertex_count)
    for f, tri in enumerate(mesh.triangles):
        weights[tri] += geom.areas[f] / 3.0
    res = balance_measure(mesh.points, weights)
    write_balance_csv(res, os.path.join(outdir, "balance.csv"))
    return res


def write_balance_csv(result, path_or_stream):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("iteration", "residual", "gnorm", "step"))
    for it, res, gn, step in result.history_rows():
        writer.writerow((it, "%.17g" % res, "%.17g" % gn, "%.17g" % step))
    text = buf.getvalue()
    if hasattr(path_or_stream, "write"):
        path_or_stream.write(text)
    else:
        with open(path_or_stream, "w") as fh:
            fh.write(text)
    return text


def run_scenario(sc, out_root, seed, tol_override):
    """Execute one scenario; returns a summary dict with pass/fail."""
    outdir = os.path.join(out_root, sc["name"])
    os.makedirs(outdir, exist_ok=True)
    summary = {"name": sc["name"], "ok": True, "failures": []}
    reports = []

    if "report" in sc["outputs"]:
        try:
            rep = _scenario_report(sc, tol_override)
            reports.append(rep)
            if not rep.asserted:
                summary["failures"].append(
                    "preconditions fail; inequality not asserted")
        except InequalityViolation as exc:
            summary["ok"] = False
            summary["failures"].append(str(exc))
        except ReillyLabError as exc:
            summary["ok"] = False
            summary["failures"].append("report failed: %s" % exc)
    if reports:
        write_report_csv(reports, os.path.join(outdir, "report.csv"))
        with open(os.path.join(outdir, "report.json"), "w") as fh:
            fh.write(reports_json(reports))

    if "convergence" in sc["outputs"]:
        levels = sc["levels"] or list(DEFAULT_LEVELS)
        try:
            rows = convergence_rows(sc["immersion"], sc["spec"], levels)
            write_convergence_csv(rows, os.path.join(outdir, "convergence.csv"))
            record = sc["immersion"].reference.get(sc["spec"].label)
            if len(rows) >= 2 and record is not None and record.lambda2:
                svg, slope = convergence_plot(rows, record.lambda2, sc["name"])
                with open(os.path.join(outdir, "plot.svg"), "w") as fh:
                    fh.write(svg)
                summary["slope"] = slope
        except ReillyLabError as exc:
            summary["ok"] = False
            summary["failures"].append("convergence failed: %s" % exc)

    if "balance" in sc["outputs"]:
        try:
            res = _balance_artifact(sc, outdir)
            summary["balance_converged"] = res.converged
            if not res.converged:
                summary["ok"] = False
                summary["failures"].append("balance did not converge")
        except (ConfigError, ReillyLabError) as exc:
            summary["ok"] = False
            summary["failures"].append(str(exc))

    if "identities" in sc["outputs"]:
        suite = identity_suite(instances=sc["count"], seed=seed)
        with open(os.path.join(outdir, "identities.csv"), "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("identity", "max_residual"))
            for key in sorted(suite):
                writer.writerow((key, "%.17g" % suite[key]))
        worst = max(suite.values()) if suite else 0.0
        if worst > 1e-10:
            summary["ok"] = False
            summary["failures"].append("identity residual %.3e over bound"
                                       % worst)
    return summary


def cmd_run(args) -> int:
    scenarios = load_scenarios(args.config)
    seed = default_seed(args.seed)
    if args.parallel:
        with ThreadPoolExecutor() as pool:
            futures = [pool.submit(run_scenario, sc, args.out, seed, args.tol)
                       for sc in scenarios]
            summaries = [f.result() for f in futures]
    else:
        summaries = [run_scenario(sc, args.out, seed, args.tol)
                     for sc in scenarios]
    ok = True
    for sm in summaries:
        status = "ok" if sm["ok"] else "FAIL"
        print("%-40s %s" % (sm["name"], status))
        for msg in sm["failures"]:
            print("    %s" % msg)
        ok = ok and sm["ok"]
    return 0 if ok else 2


def identity_table(count, seed):
    """Rows (name, value, bound, direction) for the identity suites.

    Direction 'le' means value must stay below the bound (a residual),
    'ge' means it must exceed it (a refinement ratio).
    """
    rows = []
    if count > 0:
        suite = identity_suite(instances=count, seed=seed)
        for key in sorted(suite):
            rows.append((key, suite[key], 1e-10, "le"))
        from .gallery import clifford_torus, ring_torus, sphere
        from .identities import factor_curvature_residual
        from .mesh import icosphere
        rng = np.random.default_rng(seed)
        probes = [sphere(2, 0.6, 1, 1.0), clifford_torus(), ring_torus()]
        for imm in probes:
            chain = ConformalChain(
                imm.ambient.c,
                MoebiusParam(rng.uniform(-0.25, 0.25, imm.ambient.dim + 1)),
                imm.ambient.dim)
            rows.append(("conformal_stretch[%s]" % imm.name,
                         conformal_stretch_residual(imm, chain), 1e-8, "le"))
            if imm.p == 1:
                rows.append(("second_form_transform[%s]" % imm.name,
                             second_form_transform_residual(imm, chain),
                             1e-4, "le"))
        round_sphere = sphere(2, 1.0, 1, 0.0)
        chain = ConformalChain(
            0.0,
            MoebiusParam(rng.uniform(-0.25, 0.25,
                                     round_sphere.ambient.dim + 1)),
            round_sphere.ambient.dim)
        coarse, fine = (factor_curvature_residual(round_sphere,
                                                  icosphere(lvl), chain)
                        for lvl in (2, 3))
        rows.append(("factor_curvature_ratio[%s]" % round_sphere.name,
                     coarse / fine, 3.0, "ge"))
    return rows


def cmd_verify_identities(args) -> int:
    seed = default_seed(args.seed)
    rows = identity_table(args.count, seed)
    print("%-56s %13s %9s %s" % ("identity", "max_residual", "bound",
                                 "status"))
    ok = True
    for name, value, bound, direction in rows:
        good = value <= bound if direction == "le" else value >= bound
        ok = ok and good
        print("%-56s %13.3e %9.0e %s" % (name, value, bound,
                                         "pass" if good else "FAIL"))
    return 0 if ok else 2


def _parse_levels(text):
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ConfigError("level range %s is empty" % text)
        return list(range(lo, hi + 1))
    return [int(v) for v in text.split(",")]


def cmd_convergence(args) -> int:
    scenarios = load_scenarios(args.config)
    levels = _parse_levels(args.levels) if args.levels else list(DEFAULT_LEVELS)
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels must be strictly increasing")
    code = 0
    for sc in scenarios:
        outdir = os.path.join(args.out, sc["name"])
        os.makedirs(outdir, exist_ok=True)
        try:
            rows = convergence_rows(sc["immersion"], sc["spec"], levels)
        except UnsupportedConfiguration as exc:
            raise ConfigError("scenario %s: %s" % (sc["name"], exc))
        write_convergence_csv(rows, os.path.join(outdir, "convergence.csv"))
        line = "%-40s levels %s lambda2 %.8g" % (
            sc["name"], levels, rows[-1][2])
        record = sc["immersion"].reference.get(sc["spec"].label)
        if len(rows) >= 2 and record is not None and record.lambda2:
            svg, slope = convergence_plot(rows, record.lambda2, sc["name"])
            with open(os.path.join(outdir, "plot.svg"), "w") as fh:
                fh.write(svg)
            line += " slope %.2f" % slope
        print(line)
    return code


def cmd_balance(args) -> int:
    points, _ = load_off(args.mesh)
    points = np.asarray(points, dtype=float)
    if args.ambient == "euclidean":
        norms = np.linalg.norm(points, axis=1)
        if np.min(norms) < 1e-12:
            raise ConfigError("euclidean points must avoid the origin")
        points = points / norms[:, None]
        support = "sphere"
    elif args.ambient == "sphere":
        norms = np.linalg.norm(points, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-6:
            raise ConfigError("mesh vertices do not lie on the unit sphere")
        points = points / norms[:, None]
        support = "sphere"
    else:  # hyperbolic: Lorentz hyperboloid mapped to the Poincare ball
        quad = points[:, -1] ** 2 - np.sum(points[:, :-1] ** 2, axis=1)
        if np.max(np.abs(quad - 1.0)) > 1e-6 or np.min(points[:, -1]) <= 0:
            raise ConfigError("mesh vertices do not lie on the hyperboloid")
        points = np.array([hyperboloid_to_ball(x) for x in points])
        support = "ball"
    result = balance_measure(points, tol_rel=args.tol, support=support)
    print("converged %s after %d iterations; residual %.3e; g = %s"
          % (result.converged, result.iterations, result.residual,
             np.array_str(result.param.g, precision=10)))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_balance_csv(result, os.path.join(args.out, "balance.csv"))
    return 0 if result.converged else 2


def cmd_gallery(args) -> int:
    if args.list or not args.name:
        for name in list_gallery():
            print(name)
        return 0
    params = json.loads(args.params) if args.params else {}
    try:
        imm = gallery(args.name, **params)
    except (ReillyLabError, TypeError) as exc:
        raise ConfigError("gallery %s rejected: %s" % (args.name, exc))
    print(imm.name)
    for label, rec in sorted(imm.reference.items()):
        print("  %-16s lambda2=%s rhs=%s equality=%s [%s]"
              % (label, rec.lambda2, rec.rhs, rec.equality, rec.source))
    if args.off:
        if imm.n != 2:
            raise ConfigError("OFF export needs a two-dimensional geometry")
        mesh = mesh_for(imm, args.level)
        positions = np.array([imm.position(w) for w in mesh.points])
        save_off(args.off, positions, mesh.triangles)
        print("wrote %s (%d vertices, %d triangles)"
              % (args.off, mesh.vertex_count, mesh.triangle_count))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reilly-lab",
        description="second-eigenvalue bounds on immersed submanifolds")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--parallel", action="store_true")
    p_run.add_argument("--tol", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(fn=cmd_run)

    p_ver = sub.add_parser("verify-identities",
                           help="run the random-instance identity suites")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--count", type=int, default=100)
    p_ver.set_defaults(fn=cmd_verify_identities)

    p_conv = sub.add_parser("convergence",
                            help="eigenvalue convergence table and plot")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", default=None,
                        help="a..b range or comma list")
    p_conv.add_argument("--out", default="out")
    p_conv.set_defaults(fn=cmd_convergence)

    p_bal = sub.add_parser("balance", help="balance an OFF vertex measure")
    p_bal.add_argument("mesh")
    p_bal.add_argument("--ambient", default="sphere",
                       choices=("euclidean", "sphere", "hyperbolic"))
    p_bal.add_argument("--tol", type=float, default=1e-8)
    p_bal.add_argument("--out", default=None)
    p_bal.set_defaults(fn=cmd_balance)

    p_gal = sub.add_parser("gallery", help="list or export gallery items")
    p_gal.add_argument("name", nargs="?", default=None)
    p_gal.add_argument("--list", action="store_true")
    p_gal.add_argument("--params", default=None,
                       help="JSON object of gallery parameters")
    p_gal.add_argument("--level", type=int, default=3)
    p_gal.add_argument("--off", default=None,
                       help="write the immersed mesh to this OFF file")
    p_gal.set_defaults(fn=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 1
    except ReillyLabError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

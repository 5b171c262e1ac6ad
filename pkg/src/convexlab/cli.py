"""Command-line front end.

Subcommands: body, verify, spectrum, reilly, flow, bm.  Every run
writes verdict/profile CSVs plus a JSON manifest (inputs, seed,
tolerances, content hash of the effective configuration) into the
output directory.  Exit status: 0 all verdicts pass, 2 at least one
verdict failed, 1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np

from . import bodies, boundary, flow, measures, profiles, radial
from .errors import ConvexLabError
from .report import VerdictReport, verdict_rows, write_verdicts_csv


def parse_invN(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("-inf", "-infinity"):
        return -math.inf
    if t in ("inf", "+inf"):
        raise ConvexLabError("invN = +inf is not admissible")
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConvexLabError(f"cannot parse invN {text!r}") from exc


def _read_config(path: str) -> dict:
    cfg = {}
    try:
        with open(path) as fh:
            for line_no, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConvexLabError(
                        f"{path}:{line_no}: expected key=value")
                k, v = line.split("=", 1)
                cfg[k.strip().replace("-", "_")] = v.strip()
    except OSError as exc:
        raise ConvexLabError(f"cannot read config {path}: {exc}") from exc
    return cfg


def _config_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def _atomic_write(path, writer):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _emit(args, reports, csv_name="verdicts.csv", extra_outputs=()):
    out = args.out
    os.makedirs(out, exist_ok=True)
    csv_path = os.path.join(out, csv_name)
    _atomic_write(csv_path, lambda p: write_verdicts_csv(p, reports))
    effective = {k: v for k, v in sorted(vars(args).items())
                 if k not in ("func",)}
    manifest = {
        "command": args.command,
        "config": effective,
        "config_sha256": _config_hash(effective),
        "seed": getattr(args, "seed", None),
        "tol_scale": getattr(args, "tol_scale", 1.0),
        "outputs": [csv_path] + list(extra_outputs),
    }
    mpath = os.path.join(out, "manifest.json")
    _atomic_write(mpath, lambda p: open(p, "w").write(
        json.dumps(manifest, indent=2, default=str) + "\n"))
    failed = [r.inequality_id for r in reports if r.status == "fail"]
    for row in verdict_rows(reports):
        print(",".join(str(row[k]) for k in
                       ("inequality_id", "lhs", "rhs", "slack", "pass")))
    if failed:
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
        return 2
    return 0


def _body(args):
    return bodies.make_body(args.body, M=args.M, level=args.level)


def _density(args):
    return measures.density_from_spec(args.density)


def _boundary_function(mesh, spec: str, seed: int):
    s = spec.strip()
    if s == "one":
        return boundary.bf_one(mesh)
    if s.startswith("cos:"):
        return boundary.bf_cos(mesh, int(s.split(":", 1)[1]))
    if s.startswith("band:"):
        return boundary.bf_band_limited(mesh, int(s.split(":", 1)[1]))
    if s.startswith("linear:"):
        i = int(s.split(":", 1)[1])
        e = np.zeros(mesh.points.shape[1])
        e[i] = 1.0
        return boundary.bf_linear(mesh, e)
    if s == "band":
        return boundary.bf_band_limited(mesh, seed)
    raise ConvexLabError(f"unknown boundary function spec {spec!r}")


def _phi_spec(body, spec: str):
    s = spec.strip()
    if s.startswith("const:"):
        return float(s.split(":", 1)[1])
    if s.startswith("cos:"):
        parts = s.split(":", 1)[1].split(",")
        k = int(parts[0])
        amp = float(parts[1]) if len(parts) > 1 else 1.0
        off = float(parts[2]) if len(parts) > 2 else 0.0
        return off + amp * np.cos(k * body.grid.thetas)
    if s.startswith("body:"):
        return bodies.make_body(s.split(":", 1)[1], M=body.grid.size,
                                level=getattr(body.grid, "level", 4) or 4)
    raise ConvexLabError(f"unknown phi spec {spec!r}")


# ---------------------------------------------------------------------------
# subcommand handlers

def cmd_body(args):
    body = _body(args)
    density = _density(args)
    wm = measures.weighted_measures(body, density)
    size = bodies.euclidean_size(body)
    mesh = body.mesh()
    rows = [VerdictReport(
        inequality_id="body-describe", lhs=0.0, rhs=0.0, tol=0.0,
        body_id=body.label, density_id=density.tag,
        resolution=body.grid.resolution_label, flag="ReportedOnly",
        extra={"size": size})]
    print(f"body {body.label}  grid {body.grid.resolution_label}")
    print(f"  euclidean boundary/size: {size}")
    print(f"  weighted mu = {wm.mu:.9g}  mu_boundary = {wm.mu_boundary:.9g}")
    print(f"  h in [{body.h.min():.6g}, {body.h.max():.6g}]  "
          f"min principal curvature {mesh.min_principal.min():.6g}  "
          f"min H_mu {wm.hmu.min():.6g}")
    return _emit(args, rows, csv_name="body.csv")


def cmd_verify(args):
    body = _body(args)
    density = _density(args)
    invN = parse_invN(args.invN)
    rho = args.rho
    mesh = body.mesh()
    verb = args.verb
    reports = []
    t0 = time.perf_counter()
    if verb in ("colesanti", "colesanti-strong", "dual"):
        f = _boundary_function(mesh, args.f, args.seed)
        if verb == "colesanti":
            reports.append(boundary.colesanti_verify(
                body, density, invN, f, tol_scale=args.tol_scale))
        elif verb == "colesanti-strong":
            reports.append(boundary.colesanti_strengthened(
                body, density, invN, f, tol_scale=args.tol_scale))
        else:
            reports.append(boundary.dual_colesanti_verify(
                body, density, rho, f, tol_scale=args.tol_scale))
    elif verb == "meancurv":
        reports.extend(boundary.mean_curvature_inequalities(
            body, density, invN, tol_scale=args.tol_scale))
    elif verb == "cd":
        pts = measures.sample_interior(body, args.samples, args.seed)
        reports.append(measures.cd_check(density, rho, invN, pts))
    elif verb == "gamma2":
        pts = measures.sample_interior(body, args.samples, args.seed)
        for tf in (measures.tf_half_square(body.dimension),
                   measures.tf_random_cubic(args.seed, body.dimension)):
            reports.append(measures.gamma2_check(density, tf, pts, invN))
    elif verb == "boundary-cd":
        reports.append(measures.boundary_cd(body, density, rho, invN))
    elif verb == "bounds":
        _, rows = boundary.bound_suite(body, density, rho, invN,
                                       tol_scale=args.tol_scale)
        reports.extend(rows)
    else:
        raise ConvexLabError(f"unknown verify target {verb!r}")
    wall = time.perf_counter() - t0
    for r in reports:
        r.wall_time = wall / len(reports)
        r.rho = float(rho)
    return _emit(args, reports)


def cmd_spectrum(args):
    body = _body(args)
    density = _density(args)
    invN = parse_invN(args.invN)
    t0 = time.perf_counter()
    lam1, rows = boundary.bound_suite(body, density, args.rho, invN,
                                      tol_scale=args.tol_scale)
    wall = time.perf_counter() - t0
    head = VerdictReport(
        inequality_id="spectral-gap", lhs=lam1, rhs=lam1, tol=0.0,
        body_id=body.label, density_id=density.tag, rho=float(args.rho),
        invN=float(invN), resolution=body.grid.resolution_label,
        flag="ReportedOnly", wall_time=wall)
    print(f"lambda1 = {lam1:.12g}")
    return _emit(args, [head] + rows, csv_name="spectrum.csv")


def _reilly_solution(density, R, k, variant, nodes):
    if variant == "dirichlet":
        p = radial.RadialProblem(R=R, density=density, k=k, bc="dirichlet",
                                 data=0.0, nodes=nodes)
        return radial.solve_mode(p, rhs=(lambda r: r ** k))
    if variant == "neumann-constant" and k > 0:
        # boundary value 0 makes the reduced identity applicable
        p = radial.RadialProblem(R=R, density=density, k=k, bc="dirichlet",
                                 data=0.0, nodes=nodes)
        return radial.solve_mode(p, rhs=(lambda r: r ** k))
    p = radial.RadialProblem(R=R, density=density, k=k, bc="neumann",
                             data=1.0, nodes=nodes)
    if k == 0:
        mu, mu_b = radial._disc_measures(density, R)
        return radial.solve_mode(p, rhs=mu_b / mu)
    return radial.solve_mode(p, rhs=0.0)


def cmd_reilly(args):
    density = _density(args)
    reports = []
    if args.verb == "residual":
        ks = [int(x) for x in str(args.k).split(",")]
        variants = (radial.VARIANTS if args.variant == "all"
                    else [args.variant])
        for k in ks:
            for variant in variants:
                sol = _reilly_solution(density, args.R, k, variant,
                                       args.nodes)
                rep = radial.reilly_residual(sol, variant)
                rep.extra.pop("terms", None)
                rep.density_id = density.tag
                reports.append(rep)
    elif args.verb == "colesanti-chain":
        invN = parse_invN(args.invN)
        coeffs = {}
        for part in args.coeffs.split(","):
            k, c = part.split(":")
            coeffs[int(k)] = float(c)
        chain = radial.colesanti_proof_chain(coeffs, density, args.R,
                                             invN, nodes=args.nodes)
        reports.extend(_chain_rows(chain))
    elif args.verb == "ros-chain":
        invN = parse_invN(args.invN)
        chain = radial.ros_proof_chain(density, args.R, invN,
                                       nodes=args.nodes)
        reports.extend(_chain_rows(chain))
    else:
        raise ConvexLabError(f"unknown reilly target {args.verb!r}")
    return _emit(args, reports, csv_name="reilly.csv")


def _chain_rows(chain):
    tol = 1e-9 * max(1.0, abs(chain.final_slack))
    base = dict(density_id=chain.density_id, invN=chain.invN,
                body_id="disc", resolution=chain.label)
    return [
        VerdictReport(inequality_id=f"{chain.label}-cs", lhs=0.0,
                      rhs=chain.cs_slack, tol=tol, **base),
        VerdictReport(inequality_id=f"{chain.label}-gamma2", lhs=0.0,
                      rhs=chain.gamma2_slack, tol=tol, **base),
        VerdictReport(inequality_id=f"{chain.label}-final", lhs=0.0,
                      rhs=chain.final_slack, tol=tol, **base),
        VerdictReport(inequality_id=f"{chain.label}-accounting",
                      lhs=chain.accounting_error, rhs=1e-6, tol=0.0,
                      **base),
    ]


def cmd_flow(args):
    density = _density(args)
    extra_files = []
    reports = []
    out = args.out
    os.makedirs(out, exist_ok=True)

    def dump_trace(trace, stem):
        nodes = os.path.join(out, f"{stem}_nodes.csv")
        summ = os.path.join(out, f"{stem}_summary.csv")
        flow.export_trace_csv(trace, nodes, summ)
        extra_files.extend([nodes, summ])

    if args.verb in ("run", "check-normals", "ma"):
        K = _body(args)
        phi = _phi_spec(K, args.phi)
        trace = flow.pnf_integrate(K, phi, T=args.T, steps=args.steps,
                                   density=density)
        dump_trace(trace, "trace")
        if args.verb == "check-normals":
            drift = flow.parallel_normal_diagnostic(trace)
            reports.append(VerdictReport(
                inequality_id="normal-drift", lhs=drift, rhs=0.0,
                tol=args.drift_tol, body_id=K.label,
                density_id=density.tag,
                resolution=f"M={K.grid.size},steps={args.steps}",
                extra={"flag": trace.flag}))
        elif args.verb == "ma":
            rep = flow.ma_diagnostics(trace)
            for iid, val, tol in (
                    ("ma-eikonal", rep.grad_eikonal_max, 1e-3),
                    ("ma-hessian-singular", rep.hessian_min_sv_max, 1e-2),
                    ("ma-directional", rep.directional_max, 1e-2)):
                reports.append(VerdictReport(
                    inequality_id=iid, lhs=val, rhs=0.0,
                    tol=tol * args.tol_scale, body_id=K.label,
                    density_id=density.tag,
                    resolution=f"M={K.grid.size},steps={args.steps}"))
        else:
            reports.append(VerdictReport(
                inequality_id="flow-run", lhs=0.0, rhs=0.0, tol=0.0,
                body_id=K.label, density_id=density.tag,
                flag="ReportedOnly",
                resolution=f"M={K.grid.size},steps={args.steps}",
                extra={"trace_flag": trace.flag,
                       "steps_retained": trace.steps_retained}))
    elif args.verb == "vs-sum":
        K = _body(args)
        L = bodies.make_body(args.L, M=args.M, level=args.level)
        err = flow.flow_vs_support_sum(K, L, args.t, steps=args.steps)
        reports.append(VerdictReport(
            inequality_id="flow-vs-sum", lhs=err, rhs=0.0,
            tol=args.drift_tol * args.tol_scale,
            body_id=f"{K.label}+{args.t:g}*{L.label}",
            density_id=density.tag,
            resolution=f"M={K.grid.size},steps={args.steps}"))
    elif args.verb == "map-t":
        K = _body(args)
        L = bodies.make_body(args.L, M=args.M, level=args.level)
        _, rows = flow.map_T(K, L)
        reports.extend(rows)
    elif args.verb == "wave":
        K = _body(args)
        phi = _phi_spec(K, args.phi)
        trace = flow.wave_flow(K, density, phi, T=args.T,
                               steps=args.steps)
        dump_trace(trace, "wave")
        e = trace.energy
        worst = float(np.max(np.diff(e))) if len(e) > 1 else 0.0
        reports.append(VerdictReport(
            inequality_id="wave-energy-monotone", lhs=worst, rhs=0.0,
            tol=1e-8 * max(1.0, float(e[0])) * args.tol_scale,
            body_id=K.label, density_id=density.tag,
            resolution=f"M={K.grid.size},steps={args.steps}",
            extra={"trace_flag": trace.flag, "E0": float(e[0]),
                   "E_end": float(e[-1])}))
    else:
        raise ConvexLabError(f"unknown flow target {args.verb!r}")
    return _emit(args, reports, csv_name="flow.csv",
                 extra_outputs=extra_files)


def cmd_bm(args):
    density = _density(args)
    invN = parse_invN(args.invN)
    extra_files = []
    reports = []
    os.makedirs(args.out, exist_ok=True)
    if args.verb == "profile":
        body = _body(args)
        companion = (bodies.make_body(args.L, M=args.M, level=args.level)
                     if args.L else None)
        phi = _phi_spec(body, args.phi) if args.phi else None
        prof = profiles.concavity_profile(
            args.source, body, density, invN, T=args.T,
            samples=args.samples, companion=companion, phi=phi,
            tol_scale=args.tol_scale)
        ppath = os.path.join(args.out, "profile.csv")
        _atomic_write(ppath, prof.write_csv)
        extra_files.append(ppath)
        reports.append(VerdictReport(
            inequality_id=f"concavity-{prof.tag}", lhs=prof.max_d2G,
            rhs=0.0, tol=prof.tol, body_id=prof.body_id,
            density_id=prof.density_id, invN=float(invN),
            resolution=f"samples={len(prof.t)}", flag=prof.flag))
    elif args.verb == "minkowski2":
        body = _body(args)
        reports.append(profiles.minkowski_second(body, density, invN))
    elif args.verb == "isoperimetric":
        K = _body(args)
        L = bodies.make_body(args.L, M=args.M, level=args.level)
        Omega = bodies.make_body(args.Omega, M=args.M, level=args.level)
        reports.extend(profiles.isoperimetric_checks(
            K, L, Omega, density, invN, tol_scale=args.tol_scale))
    else:
        raise ConvexLabError(f"unknown bm target {args.verb!r}")
    return _emit(args, reports, csv_name="bm.csv",
                 extra_outputs=extra_files)


# ---------------------------------------------------------------------------
# parser

def _add_common(p):
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-scale", dest="tol_scale", type=float, default=1.0)
    p.add_argument("--config", default=None,
                   help="flat key=value config file (CLI flags override)")
    p.add_argument("--M", type=int, default=256)
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--density", default="lebesgue")


def build_parser():
    ap = argparse.ArgumentParser(prog="convexlab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("body")
    p.add_argument("verb", choices=["describe"])
    p.add_argument("--body", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_body)

    p = sub.add_parser("verify")
    p.add_argument("verb", choices=["colesanti", "colesanti-strong",
                                    "dual", "meancurv", "cd", "gamma2",
                                    "boundary-cd", "bounds"])
    p.add_argument("--body", required=True)
    p.add_argument("--invN", default="0")
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--f", default="one")
    p.add_argument("--samples", type=int, default=400)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum")
    p.add_argument("--body", required=True)
    p.add_argument("--invN", default="0")
    p.add_argument("--rho", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("reilly")
    p.add_argument("verb", choices=["residual", "colesanti-chain",
                                    "ros-chain"])
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--k", default="0,1,2,3")
    p.add_argument("--variant", default="all",
                   choices=list(radial.VARIANTS) + ["all"])
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--invN", default="0")
    p.add_argument("--coeffs", default="0:1")
    _add_common(p)
    p.set_defaults(func=cmd_reilly)

    p = sub.add_parser("flow")
    p.add_argument("verb", choices=["run", "check-normals", "vs-sum",
                                    "ma", "map-t", "wave"])
    p.add_argument("--K", dest="body", default="disc:1")
    p.add_argument("--L", default=None)
    p.add_argument("--phi", default="const:1")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--drift-tol", dest="drift_tol", type=float,
                   default=1e-3)
    _add_common(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("bm")
    p.add_argument("verb", choices=["profile", "minkowski2",
                                    "isoperimetric"])
    p.add_argument("--body", "--K", dest="body", default="disc:1")
    p.add_argument("--L", default=None)
    p.add_argument("--Omega", default=None)
    p.add_argument("--source", default="euclidean-sum",
                   choices=["geodesic", "euclidean-sum", "pnf", "wave"])
    p.add_argument("--phi", default=None)
    p.add_argument("--invN", default="0")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=33)
    _add_common(p)
    p.set_defaults(func=cmd_bm)
    return ap


def _splice_config(argv):
    """Expand --config FILE into flags placed before explicit flags so
    the command line keeps priority."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConvexLabError("--config needs a file path")
    cfg = _read_config(argv[i + 1])
    head = []
    j = 0
    while j < len(argv) and not argv[j].startswith("-"):
        head.append(argv[j])
        j += 1
    injected = []
    for k, v in cfg.items():
        injected += [f"--{k.replace('_', '-')}", v]
    return head + injected + argv[j:]


_NEGATIVE_VALUE_FLAGS = {"--invN", "--rho", "--t", "--T"}


def _merge_negative_values(argv):
    """Join `--flag -value` into `--flag=-value` so argparse does not
    mistake negative numbers (or -inf) for options."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok in _NEGATIVE_VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _merge_negative_values(_splice_config(argv))
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code in (0, None) else 1
        return args.func(args)
    except ConvexLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

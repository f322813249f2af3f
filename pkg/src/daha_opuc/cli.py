"""Command line entry point: ``daha-opuc <group> <action> [options]``.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on usage or domain errors. JSON artifacts carry ``schema: 1``, the tool
version, the parameter set and the seed; CSV artifacts carry the same in
``#`` comment lines above the header.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from . import askey_wilson as aw
from . import aw3, interval, opuc, rep, suite, truncation
from .errors import DahaError
from .params import ParameterSet, derive_parameters, free_parameters, load_parameters, parse_beta

SCHEMA = 1
OUTDIR_ENV = "DAHA_OPUC_OUTDIR"


class CheckFailed(Exception):
    pass


# ---------------------------------------------------------------- output

def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def full_params(P: ParameterSet | None) -> dict | None:
    if P is None:
        return None
    return _plain({"beta": P.beta, "q": P.q, "mode": P.mode, "Q": P.Q, "g": P.g, "t": P.t,
                   "sigma": P.sigma, "delta": P.delta, "tilde_beta": P.tilde_beta})


def resolve_path(path: str | None) -> str | None:
    if path is None or path == "-":
        return None
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    return path


def write_atomic(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(folder, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit(args, text: str):
    path = resolve_path(args.out)
    if path is None:
        sys.stdout.write(text)
    else:
        write_atomic(path, text)


def envelope(args, P, result) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": args.command_name,
            "params": full_params(P), "seed": args.seed, "n": getattr(args, "n", None),
            "result": _plain(result)}


def emit_json(args, P, result):
    emit(args, json.dumps(envelope(args, P, result), indent=2) + "\n")


def emit_csv(args, P, header, rows):
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA} version={__version__} command={args.command_name} seed={args.seed}\n")
    buf.write(f"# params={json.dumps(full_params(P))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    emit(args, buf.getvalue())


def emit_table(args, P, header, rows, extra=None):
    if args.format == "json":
        doc = {"columns": list(header), "rows": [list(r) for r in rows]}
        if extra:
            doc.update(extra)
        emit_json(args, P, doc)
    else:
        emit_csv(args, P, header, rows)


def finish_checks(args, P, checks: list[suite.Check], extra=None):
    if args.tol is not None:
        for c in checks:
            c.tol = args.tol
    result = {"checks": [c.as_dict() for c in checks], "passed": all(c.passed for c in checks)}
    if extra:
        result.update(extra)
    emit_json(args, P, result)
    if not result["passed"]:
        bad = ", ".join(c.name for c in checks if not c.passed)
        raise CheckFailed(f"failed checks: {bad}")


# ---------------------------------------------------------------- params

def params_from(args) -> ParameterSet:
    depth = max(64, getattr(args, "n", 64) or 64)
    if args.params:
        return load_parameters(args.params, depth)
    mode = args.mode
    if mode in ("free", "free-boundary"):
        return free_parameters(args.q, depth)
    return derive_parameters(parse_beta(args.beta), args.q, mode, depth)


def _n_at_least(v):
    n = int(v)
    if n < 4:
        raise argparse.ArgumentTypeError(f"N must be at least 4, got {n}")
    return n


def _degree(v):
    n = int(v)
    if n < 0:
        raise argparse.ArgumentTypeError(f"degree must be non-negative, got {n}")
    return n


def _positive(v):
    x = float(v)
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return x


def _complex_pair(text):
    try:
        re_, im = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected re,im got {text!r}") from exc
    return complex(re_, im)


# ---------------------------------------------------------------- daha

def cmd_daha_build(args):
    P = params_from(args)
    w = args.which
    if w.startswith("R"):
        op = rep.build_reflection(w, args.n, P, allow_partial_block=args.allow_partial_block)
    else:
        op = rep.build_T(int(w[1]), args.n, P)
    emit_json(args, P, {"name": op.name or w, **op.to_json()})


def cmd_daha_verify(args):
    P = params_from(args)
    if args.check == "product":
        checks = suite.product(P, args.n)
    elif args.check == "derivation":
        checks = suite.derivation(P, args.n)
    else:
        checks = suite.relations(P, args.n)
    finish_checks(args, P, checks)


def cmd_daha_coeffs(args):
    P = params_from(args)
    emit_table(args, P, ["n", "a_n", "r_n", "alpha_n", "rho_n", "z_n"], rep.coefficient_table(P, args.n))


# ---------------------------------------------------------------- opuc

def cmd_opuc_phi(args):
    P = params_from(args)
    src = opuc.VerblunskySource.from_params(P, args.family)
    if args.at is not None:
        phi, star = opuc.szego_values(args.n + 1, args.at, src)
        lv = opuc.laurent_values(args.n + 1, args.at, src)
        rows = [(k, phi[k].real, phi[k].imag, star[k].real, star[k].imag, lv[k].real, lv[k].imag)
                for k in range(args.n + 1)]
        emit_table(args, P, ["n", "re_Phi_n", "im_Phi_n", "re_Phi*_n", "im_Phi*_n", "re_phi_n", "im_phi_n"], rows)
        return
    rows = opuc.coefficient_rows(args.n, src)
    emit_table(args, P, ["n"] + [f"c_{k}" for k in range(args.n + 1)], rows)


def cmd_opuc_cmv(args):
    P = params_from(args)
    src = opuc.VerblunskySource.from_params(P, args.family)
    op = opuc.build_cmv(args.n, src)
    if not args.check:
        emit_json(args, P, {"family": args.family, **op.U.to_json()})
        return
    zs = suite.unit_points(20, args.seed)
    pen = max(opuc.pencil_residual(z, args.n, src) for z in zs)
    finish_checks(args, P, [suite.Check("cmv_orthogonality", op.orthogonality_residual, 1e-12),
                            suite.Check("pencil", pen, 1e-10)], {"family": args.family})


# ---------------------------------------------------------------- interval

def cmd_interval_rec(args):
    P = params_from(args)
    src = opuc.VerblunskySource.from_params(P, "a")
    rec = interval.family_recurrence(args.family, src, args.n)
    b, u = rec.coefficients()
    emit_table(args, P, ["n", "b_n", "u_n"], [(k, b[k], u[k]) for k in range(args.n)])


def cmd_interval_check(args):
    P = params_from(args)
    src = opuc.VerblunskySource.from_params(P, "a")
    xs = suite.interval_points(20, args.seed)
    n = min(args.n, 32)
    if args.identity == "split":
        val = max(interval.split_check(f, src, n, xs) for f in (1, 2))
        checks = [suite.Check("even_odd_split", val, 1e-10)]
    else:
        ch = interval.christoffel_checks(src, n, xs)
        key = "ss_ct" if args.identity == "ss-ct" else "s3_ct"
        ratio = "K_ratio" if args.identity == "ss-ct" else "L_ratio"
        checks = [suite.Check(key, ch[key], 1e-10), suite.Check(ratio, ch[ratio], 1e-10)]
    finish_checks(args, P, checks)


# ---------------------------------------------------------------- aw

def cmd_aw_eval(args):
    P = params_from(args)
    awp = aw.AWParameters.for_identification(args.family.upper(), P)
    xs = np.atleast_1d(np.asarray(args.x, dtype=float))
    rows = []
    for n in range(args.n + 1):
        vals = aw.aw_monic(n, xs, awp)
        for x, v in zip(xs, vals):
            rows.append((n, x, v))
    emit_table(args, P, ["n", "x", "V_n"], rows)


def cmd_aw_identify(args):
    P = params_from(args)
    rpt = aw.verify_circle_identity(args.family.upper(), args.nmax, args.samples, P, seed=args.seed)
    tol = args.tol if args.tol is not None else 1e-9
    if args.format == "csv":
        emit_csv(args, P, ["n", "residual"], list(enumerate(rpt.per_degree)))
    else:
        emit_json(args, P, {**rpt.as_dict(), "tol": tol, "passed": rpt.residual < tol})
    if not rpt.residual < tol:
        raise CheckFailed(f"identification residual {rpt.residual:.3e} above {tol:g}")


def cmd_aw_spectrum(args):
    P = params_from(args)
    emit_table(args, P, ["n", "y_n"], [(k, aw.aw_spectrum(k, P)) for k in range(args.n)])


# ---------------------------------------------------------------- algebra

def cmd_algebra_xy(args):
    P = params_from(args)
    checks, alg = suite.algebra(P, args.n)
    keep = [c for c in checks if c.name in ("x_pentadiagonal", "x_closed_form", "sector_vs_interval")]
    checks_sp = suite.spectrum(P, args.n) if not P.is_free else []
    xy = alg["xy"]
    finish_checks(args, P, keep + checks_sp,
                  {"window": xy.window, "y": xy.y[: xy.window], "x_diagonal": np.diag(xy.X.entries.real)[: xy.window]})


def cmd_algebra_fit(args):
    P = params_from(args)
    xy = aw3.build_xy(args.n, P)
    fit = aw3.fit_structure_constants(args.sector, xy)
    finish_checks(args, P, [suite.Check(f"aw3_fit_{args.sector}", max(fit.residual, fit.consistency), 1e-8)],
                  fit.as_dict())


def cmd_algebra_casimir(args):
    P = params_from(args)
    aw3.require_free(P)
    rpt = aw3.casimir(aw3.build_xy(args.n, P), P.q)
    rel = abs(rpt.scalar - rpt.expected) / abs(rpt.expected)
    finish_checks(args, P, [suite.Check("casimir", max(rel, rpt.residual), 1e-9)],
                  {"scalar": rpt.scalar, "expected": rpt.expected, "residual": rpt.residual,
                   "off_diagonal": rpt.off_diagonal})


def cmd_algebra_central(args):
    P = params_from(args)
    xy = aw3.build_xy(args.n, P)
    fe = aw3.fit_structure_constants("even", xy)
    fo = aw3.fit_structure_constants("odd", xy)
    res = aw3.central_extension_residual(xy, fe, fo)
    finish_checks(args, P, [suite.Check(f"central_{k}", v, 1e-8) for k, v in res.items()],
                  {"even": fe.as_dict(), "odd": fo.as_dict()})


# ---------------------------------------------------------------- trunc

def _free_betas(args):
    if args.free_betas is None:
        return None
    vals = [float(p) for p in args.free_betas.split(",")]
    if len(vals) != 3:
        raise DahaError("--free-betas expects three comma separated numbers")
    return vals


def _trunc_setup(args):
    cond = truncation.parse_kind(args.kind, args.m)
    P = truncation.solve_truncation(cond, args.m, _free_betas(args), args.q)
    L, M = truncation.build_finite_lm(cond.index, P)
    src = truncation.finite_source(P, cond.index)
    return cond, P, L, M, src


def cmd_trunc_solve(args):
    cond = truncation.parse_kind(args.kind, args.m)
    P = truncation.solve_truncation(cond, args.m, _free_betas(args), args.q)
    K = cond.index
    emit_json(args, P, {"kind": cond.kind, "pair": cond.pair, "order": cond.order, "index": K,
                        "condition_residual": cond.residual(P.beta, P.q),
                        "boundary": rep.coeff_a(K, P),
                        "interior": [rep.coeff_a(n, P) for n in range(K)],
                        "r_squared": [rep.r_squared_closed(n, P) for n in range(K)]})


def cmd_trunc_spectrum(args):
    cond, P, L, M, src = _trunc_setup(args)
    spec = truncation.finite_spectrum(L, M, src)
    emit_table(args, P, ["s", "theta_s", "rho_s"], spec.rows(),
               {"unitarity": spec.unitarity, "unimodularity": spec.unimodularity})


def cmd_trunc_orth(args):
    cond, P, L, M, src = _trunc_setup(args)
    spec = truncation.finite_spectrum(L, M, src)
    orth = truncation.finite_orthogonality(spec, src, cond.index)
    checks = [suite.Check("unitarity", spec.unitarity, 1e-12),
              suite.Check("unimodularity", spec.unimodularity, 1e-10),
              suite.Check("conjugate_pairing", max(spec.conjugate_pairing, spec.weight_pairing), 1e-10),
              suite.Check("roots", spec.root_residual, 1e-8),
              suite.Check("orthogonality", orth.off_diagonal, 1e-9)]
    finish_checks(args, P, checks, {"index": cond.index, "orthogonality": orth.as_dict()})


# ---------------------------------------------------------------- plot data

def cmd_plot(args):
    what = args.what
    if what == "spectrum":
        cond, P, L, M, src = _trunc_setup(args)
        spec = truncation.finite_spectrum(L, M, src)
        emit_csv(args, P, ["theta_s", "rho_s"], [(t, w) for _, t, w in spec.rows()])
        return
    P = params_from(args)
    if what == "coefficients":
        emit_csv(args, P, ["n", "a_n"], [(n, rep.coeff_a(n, P)) for n in range(args.n)])
    else:
        src = opuc.VerblunskySource.from_params(P, "a")
        rec = interval.family_recurrence("s1", src, args.n + 1)
        mu = interval.spectral_measure(rec, args.n)
        emit_csv(args, P, ["x_k", "w_k"], list(zip(mu.nodes, mu.weights)))


# ---------------------------------------------------------------- suite

def cmd_suite(args):
    if args.preset == "generic":
        P = params_from(args)
        rpt = suite.run_suite("generic", P=P, N=args.n, seed=args.seed)
    else:
        rpt = suite.run_suite(args.preset, q=args.q, N=args.n, seed=args.seed)
        P = None if args.preset == "truncation" else free_parameters(args.q, max(64, args.n))
    checks = [suite.Check(c["name"], c["value"], c["tol"], c.get("info")) for c in rpt["checks"]]
    finish_checks(args, P, checks, {"preset": args.preset})


# ---------------------------------------------------------------- parser

def _common(p, params=True, n_default=64, n_type=_n_at_least):
    if params:
        p.add_argument("--beta", default=",".join(str(b) for b in suite.GENERIC_BETA),
                       help="b1,b2,b3,b4")
        p.add_argument("--q", type=float, default=suite.GENERIC_Q)
        p.add_argument("--mode", default="infinite", choices=["infinite", "finite", "free", "free-boundary"])
        p.add_argument("--params", help="JSON file with beta, q, mode")
    p.add_argument("--n", type=n_type, default=n_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive, default=None, help="override every check tolerance")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help=f"output file (relative paths resolve under ${OUTDIR_ENV})")


def _trunc_opts(p):
    p.add_argument("--kind", default="b1b4", help="b1b4 | b2b3 | even:i,k")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--free-betas", default=None, help="the three betas not fixed by the condition")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="daha-opuc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, params=True, n_default=64, n_type=_n_at_least, **kw):
        p = sub.add_parser(name, **kw)
        _common(p, params, n_default, n_type)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("daha").add_subparsers(dest="action", required=True)
    p = leaf(g, "build", cmd_daha_build)
    p.add_argument("--which", required=True, choices=[f"{c}{i}" for c in "RT" for i in range(1, 5)])
    p.add_argument("--allow-partial-block", action="store_true")
    p = leaf(g, "verify", cmd_daha_verify)
    p.add_argument("--check", required=True, choices=["product", "derivation", "involution"])
    leaf(g, "coeffs", cmd_daha_coeffs)

    g = groups.add_parser("opuc").add_subparsers(dest="action", required=True)
    p = leaf(g, "phi", cmd_opuc_phi, n_default=8, n_type=_degree)
    p.add_argument("--family", choices=opuc.FAMILIES, default="a")
    p.add_argument("--at", type=_complex_pair, default=None, help="re,im")
    p = leaf(g, "cmv", cmd_opuc_cmv)
    p.add_argument("--family", choices=opuc.FAMILIES, default="a")
    p.add_argument("--check", action="store_true")

    g = groups.add_parser("interval").add_subparsers(dest="action", required=True)
    p = leaf(g, "rec", cmd_interval_rec, n_default=16)
    p.add_argument("--family", required=True, choices=["s1", "s2", "s3", "p1", "p2", "q1", "q2"])
    p = leaf(g, "check", cmd_interval_check, n_default=12)
    p.add_argument("--identity", required=True, choices=["ss-ct", "s3-ct", "split"])

    g = groups.add_parser("aw").add_subparsers(dest="action", required=True)
    p = leaf(g, "eval", cmd_aw_eval, n_default=4, n_type=_degree)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--family", choices=["p1", "q1", "p2", "q2", "P1", "Q1", "P2", "Q2"], default="p1")
    p = leaf(g, "identify", cmd_aw_identify)
    p.add_argument("--family", required=True, choices=["p1", "q1", "p2", "q2", "P1", "Q1", "P2", "Q2"])
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--samples", type=int, default=20)
    leaf(g, "spectrum", cmd_aw_spectrum, n_default=16)

    g = groups.add_parser("algebra").add_subparsers(dest="action", required=True)
    leaf(g, "xy", cmd_algebra_xy)
    p = leaf(g, "fit", cmd_algebra_fit)
    p.add_argument("--sector", required=True, choices=["even", "odd"])
    leaf(g, "casimir", cmd_algebra_casimir)
    leaf(g, "central", cmd_algebra_central)

    g = groups.add_parser("trunc").add_subparsers(dest="action", required=True)
    for name, func in (("solve", cmd_trunc_solve), ("spectrum", cmd_trunc_spectrum), ("orth", cmd_trunc_orth)):
        p = leaf(g, name, func, params=False)
        p.add_argument("--q", type=float, default=0.8)
        _trunc_opts(p)

    g = groups.add_parser("plot").add_subparsers(dest="action", required=True)
    for what in ("coefficients", "spectrum", "nodes"):
        p = leaf(g, what, cmd_plot, params=(what != "spectrum"), n_default=16)
        p.set_defaults(what=what, format="csv")
        if what == "spectrum":
            p.add_argument("--q", type=float, default=0.8)
            _trunc_opts(p)

    p = groups.add_parser("suite")
    _common(p)
    p.add_argument("--preset", required=True, choices=list(suite.PRESETS))
    p.set_defaults(func=cmd_suite, action=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.command_name = " ".join(x for x in (args.group, args.action) if x)
    try:
        args.func(args)
    except CheckFailed as exc:
        print(f"daha-opuc: {exc}", file=sys.stderr)
        return 1
    except (DahaError, ValueError, ArithmeticError) as exc:
        print(f"daha-opuc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"daha-opuc: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 ok, 1 usage error, 2 data error (bad input, degenerate
simplex, failed precondition), 3 a property check failed.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import experiments as ex
from .errors import AnisoRTError
from .fields import monomial_field, catalog, counterexample_field, get_field
from .geometry import Simplex, angle_report
from .mesh_io import FAMILIES, FamilySpec, generate_family, read_mesh, write_mesh
from .quadrature import simplex_rule
from .rt_space import build_space, interpolate_reference

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CHECK = 0, 1, 2, 3

AUDIT_COLUMNS = ["element", "h", "volume", "H_T", "H_T0", "ratio_H_h", "max_angle", "max_dihedral", "good_element"]

STUDY_HELP = "CSV columns (one row per level): " + ", ".join(ex.CSV_COLUMNS) + ". Empty cells mark variants that do not apply."


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _clean(obj):
    """Replace non-finite floats with None/strings so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _emit(obj, out):
    out.write(ex.dumps(_clean(obj)) + "\n")


def parse_vertices(text):
    """Vertices from ``"x,y;x,y;x,y"`` or a file path with one vertex per line."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            rows = [ln.split("#", 1)[0].replace(",", " ").split() for ln in fh]
        rows = [r for r in rows if r]
    else:
        rows = [r.replace(",", " ").split() for r in text.split(";") if r.strip()]
    try:
        V = np.array([[float(t) for t in r] for r in rows])
    except ValueError as exc:
        raise ValueError(f"could not parse vertices: {exc}") from None
    if V.ndim != 2 or V.shape[1] not in (2, 3) or V.shape[0] != V.shape[1] + 1:
        raise ValueError(f"need d+1 vertices of dimension d in {{2, 3}}, got {len(rows)} rows")
    return V


def _p(value):
    if value in ("inf", "Inf"):
        return np.inf
    p = float(value)
    if p < 1:
        raise argparse.ArgumentTypeError("p must be >= 1 or 'inf'")
    return int(p) if p.is_integer() else p


def cmd_analyze(args, out):
    S = Simplex(parse_vertices(args.vertices))
    rep = angle_report(S, args.gamma0)
    _emit({"schema": 1, "report": rep.as_dict(), "decomposition": rep.decomposition.as_dict()}, out)
    return EXIT_OK


def cmd_audit(args, out):
    mesh = read_mesh(args.mesh)
    rows = []
    for e, V in enumerate(mesh.simplices()):
        r = angle_report(V, args.gamma0)
        rows.append([e, r.h, r.volume, r.H_T, r.H_T0, r.ratio_H_h, r.max_angle, r.max_dihedral, int(r.good_element)])
    n_good = sum(r[-1] for r in rows)
    summary = {
        "schema": 1,
        "dim": mesh.dim,
        "n_elements": len(rows),
        "n_good": n_good,
        "n_bad": len(rows) - n_good,
        "gamma0": args.gamma0,
        "max_H_over_h": max((r[5] for r in rows), default=None),
        "max_angle": max((r[6] for r in rows), default=None),
    }
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(AUDIT_COLUMNS) + "\n")
            for r in rows:
                fh.write(",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in r) + "\n")
    _emit(summary, out)
    return EXIT_OK


def cmd_interp(args, out):
    S = Simplex(parse_vertices(args.simplex))
    field = get_field(args.field, S.dim)
    ell = args.k if args.ell is None else args.ell
    b = ex.bound_rhs(args.k, ell, S, field, args.p, args.variant, M=args.M)
    res = {"schema": 1, "field": field.name, "variant": args.variant, "breakdown": b.as_dict()}
    _emit(res, out)
    return EXIT_OK


def cmd_study(args, out):
    spec = FamilySpec(args.family, levels=args.levels, h0=args.h0, gamma=args.gamma)
    field = get_field(args.field, spec.dim)
    rows = ex.run_family_study(spec, args.k, field, args.p, ell=args.ell, M=args.M)
    csv_text = ex.rows_to_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        out.write(csv_text)
    summary = ex.study_summary(spec, rows, args.k, field.name, args.p)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(ex.dumps(_clean(summary)) + "\n")
    elif args.csv:
        _emit(summary, out)
    if args.check and not all(v["bounded"] for v in summary["verdicts"].values()):
        return EXIT_CHECK
    return EXIT_OK


def _reference_error(k, field):
    space = build_space(k, 2)
    interp = interpolate_reference(space, field)
    rule = simplex_rule(2, 12)
    err = interp.evaluate(rule.points) - field.value(rule.points)
    return interp, float(np.sqrt(rule.weights @ err[:, 0] ** 2))


def cmd_counterexample(args, out):
    if args.k == 0:
        field = counterexample_field()
        interp, err1 = _reference_error(0, field)
        # I v = c0 theta_0 + ... ; compare with (x1/3, x2/3) at the quadrature points
        rule = simplex_rule(2, 6)
        diff = interp.evaluate(rule.points) - rule.points / 3.0
        exact_ok = float(np.abs(diff).max()) <= 1e-12
        norm_ok = err1 > 0.1
        out.write("field: v = (0, x2^2) on the reference triangle, k = 0\n")
        out.write("I v = (x1/3, x2/3)  " + ("[match to 1e-12]" if exact_ok else f"[MISMATCH {np.abs(diff).max():.3e}]") + "\n")
        out.write(f"|v_1|_H1 = 0,  ||(I v)_1 - v_1||_L2 = {err1:.12g}  (exact 1/(6 sqrt 3) = {1 / (6 * np.sqrt(3)):.12g})\n")
        out.write("component-wise estimate ||(Iv)_1 - v_1|| <= c |v_1|_H1 fails: " + ("PASS" if exact_ok and err1 > 1e-8 else "FAIL") + "\n")
        out.write(f"threshold check ||(Iv)_1 - v_1|| > 0.1: {'PASS' if norm_ok else 'FAIL'}\n")
        return EXIT_OK if exact_ok and err1 > 1e-8 else EXIT_CHECK
    field = monomial_field(2, 3, {(1, (0, 3)): 1.0}, "cubic")
    _, err1 = _reference_error(1, field)
    out.write("field: v = (0, x2^3) on the reference triangle, k = 1\n")
    out.write(f"|v_1|_H2 = 0,  ||(I v)_1 - v_1||_L2 = {err1:.12g}\n")
    out.write("component-wise estimate fails: " + ("PASS" if err1 > 1e-8 else "FAIL") + "\n")
    return EXIT_OK if err1 > 1e-8 else EXIT_CHECK


def cmd_sweep(args, out):
    res = ex.scaling_sweep(args.lemma, args.dim, n_samples=args.samples, seed=args.seed, p=args.p, order=args.order, M=args.M)
    if not args.ratios:
        res = {k: v for k, v in res.items() if k != "ratios"}
    res["schema"] = 1
    _emit(res, out)
    return EXIT_OK if math.isfinite(res["sup_ratio"]) else EXIT_CHECK


def cmd_family(args, out):
    spec = FamilySpec(args.family, levels=max(args.level + 1, 1), h0=args.h0, gamma=args.gamma)
    out.write(write_mesh(generate_family(spec, args.level)))
    return EXIT_OK


def build_parser():
    names = sorted({f.name for d in (2, 3) for f in catalog(d)})
    parser = _Parser(prog="aniso-rt", description="Anisotropic simplex geometry and Raviart-Thomas interpolation experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze-simplex", help="canonical decomposition and geometric parameters of one simplex")
    a.add_argument("--vertices", required=True, help='inline "x,y;x,y;x,y" or a file with one vertex per line')
    a.add_argument("--gamma0", type=float, default=10.0, help="threshold for H_T0/h (arbitrary default 10)")
    a.set_defaults(func=cmd_analyze)

    m = sub.add_parser("audit-mesh", help="per-element quality audit", epilog="CSV columns: " + ", ".join(AUDIT_COLUMNS))
    m.add_argument("--mesh", required=True)
    m.add_argument("--gamma0", type=float, default=10.0)
    m.add_argument("--csv", help="write the per-element table here")
    m.set_defaults(func=cmd_audit)

    i = sub.add_parser("interp-error", help="interpolation error and bound quantities on one simplex")
    i.add_argument("--k", type=int, default=0)
    i.add_argument("--ell", type=int)
    i.add_argument("--field", default="trig", choices=names)
    i.add_argument("--p", type=_p, default=2)
    i.add_argument("--simplex", required=True, help="vertices, as for analyze-simplex")
    i.add_argument("--variant", default="all", choices=("all",) + ex.VARIANTS)
    i.add_argument("--M", type=float, default=10.0, help="constant for the H-weighted tetrahedron variants")
    i.set_defaults(func=cmd_interp)

    s = sub.add_parser("study", help="mesh-family study", epilog=STUDY_HELP)
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--levels", type=int, default=5)
    s.add_argument("--h0", type=float, default=1.0)
    s.add_argument("--gamma", type=float)
    s.add_argument("--k", type=int, default=0)
    s.add_argument("--ell", type=int)
    s.add_argument("--field", default="trig", choices=names)
    s.add_argument("--p", type=_p, default=2)
    s.add_argument("--M", type=float, default=10.0)
    s.add_argument("--csv", help="write the CSV here instead of stdout")
    s.add_argument("--json", help="write the JSON summary here")
    s.add_argument("--check", action="store_true", help="exit 3 if a ratio grows by more than 10%% after level 3")
    s.set_defaults(func=cmd_study)

    c = sub.add_parser("counterexample", help="the component-wise estimate counterexample on the reference triangle")
    c.add_argument("--k", type=int, default=0, choices=(0, 1))
    c.set_defaults(func=cmd_counterexample)

    w = sub.add_parser("sweep", help="seeded random sweep of a scaling inequality")
    w.add_argument("--lemma", required=True, choices=ex.SCALING_LEMMAS)
    w.add_argument("--dim", type=int, default=2, choices=(2, 3))
    w.add_argument("--samples", type=int, default=500)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--p", type=_p, default=2)
    w.add_argument("--order", type=int, default=1)
    w.add_argument("--M", type=float, default=10.0)
    w.add_argument("--ratios", action="store_true", help="include every per-sample ratio")
    w.set_defaults(func=cmd_sweep)

    g = sub.add_parser("family", help="write one level of a mesh family in the text mesh format")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--level", type=int, default=0)
    g.add_argument("--h0", type=float, default=1.0)
    g.add_argument("--gamma", type=float)
    g.set_defaults(func=cmd_family)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (AnisoRTError, ValueError, KeyError, OSError) as exc:
        print(f"aniso-rt: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

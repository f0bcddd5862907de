"""Command-line front end: manifests in, reports/SVG out.

Exit codes: 0 ok, 2 parse error, 3 snap failure, 4 closure bound exceeded,
5 geometry failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .griffiths_dwork import FamilySpec, PFError, picard_fuchs, verify_pf
from .hyperbolic import (GeometryError, IsometryPSL2R, check_poincare, disk_arcs,
                         polygon_from_involutions, render_svg, side_pairing_residual)
from .invariants import (ClosureError, MatrixGroupSpec, WeightedCI, close_group, is_k3,
                         molien_series, mukai_number, quotient_pipeline)
from .linalg import ExactMatrix
from .monodromy import (SnapError, TransportError, classify_k3_hypergeometric,
                        pairwise_trace_table, parse_presentation)
from .ode import (LinearODE, ODEError, format_ode, is_lame, mobius_substitute, parse_ode,
                  recognize_hypergeometric, substitute_power, symmetric_square_root)
from .parsing import ParseError, parse_poly, parse_scalar
from .qnum import QNum
from .systems import SystemError, equation_to_system, format_system, parse_system
from .transport import KERNEL_KIND

EXIT_PARSE = 2
EXIT_SNAP = 3
EXIT_CLOSURE = 4
EXIT_GEOMETRY = 5


class ManifestError(ValueError):
    pass


def read_family_manifest(path: str) -> FamilySpec:
    fields: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition(" ")
            fields[key] = val.strip()
    try:
        variables = tuple(fields["variables"].split())
        weights = tuple(int(w) for w in fields["weights"].split())
        poly = parse_poly(fields["poly"], variables + ("lambda",))
        spec = FamilySpec(
            weights,
            poly,
            name=fields.get("name", path),
            degeneration=[fields["degeneration"]] if "degeneration" in fields else None,
            power_k=int(fields.get("power", "1")),
            mobius=_parse_mobius(fields.get("mobius")),
            mobius_after_power=_parse_mobius(fields.get("mobius_after_power")),
        )
        spec.expected_order = int(fields.get("order", "3"))
        return spec
    except (KeyError, ValueError, ParseError) as exc:
        raise ManifestError(f"bad family manifest {path}: {exc}") from exc


def _parse_mobius(text):
    if not text:
        return None
    parts = text.split()
    if len(parts) != 4:
        raise ManifestError("mobius needs 4 entries: a b c d for (a*u+b)/(c*u+d)")
    return tuple(Fraction(p) for p in parts)


def read_group_manifest(path: str) -> MatrixGroupSpec:
    name = path
    dim = None
    bound = 10000
    generators = []
    rows: list = []
    builtin = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("name "):
                name = line.split(None, 1)[1]
            elif line.startswith("dim "):
                dim = int(line.split()[1])
            elif line.startswith("order_bound "):
                bound = int(line.split()[1])
            elif line.startswith("builtin "):
                builtin = line.split()[1]
            elif line == "generator":
                if rows:
                    generators.append(ExactMatrix(rows))
                    rows = []
            else:
                cells = line.split()
                rows.append([_entry(c) for c in cells])
    if rows:
        generators.append(ExactMatrix(rows))
    if builtin:
        spec = MatrixGroupSpec([ExactMatrix.identity(4)], 4, bound, name)
        spec.builtin = builtin
        return spec
    spec = MatrixGroupSpec(generators, dim, bound, name)
    spec.builtin = None
    return spec


def _entry(text: str):
    v = parse_scalar(text)
    return v if isinstance(v, QNum) else QNum(v)


def _close_from_spec(spec):
    if getattr(spec, "builtin", None):
        from .so4 import product_group_closure

        return product_group_closure(spec.builtin)
    return close_group(spec)


def _emit(report: dict, fmt: str, out=None):
    stream = open(out, "w") if out else sys.stdout
    try:
        if fmt == "json":
            json.dump(report, stream, indent=2, default=str)
            stream.write("\n")
        else:
            _emit_text(report, stream)
    finally:
        if out:
            stream.close()


def _emit_text(report: dict, stream, indent=""):
    for key, val in report.items():
        if isinstance(val, dict):
            stream.write(f"{indent}{key}:\n")
            _emit_text(val, stream, indent + "  ")
        elif isinstance(val, list) and val and isinstance(val[0], (list, tuple)):
            stream.write(f"{indent}{key}:\n")
            for row in val:
                stream.write(f"{indent}  " + "  ".join(str(x) for x in row) + "\n")
        else:
            stream.write(f"{indent}{key}: {val}\n")


# -- subcommands -----------------------------------------------------------------


def cmd_pf(args) -> int:
    try:
        fam = read_family_manifest(args.manifest)
    except ManifestError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    report = {"family": fam.name, "order": fam.expected_order}
    try:
        pf = picard_fuchs(fam, fam.expected_order)
    except PFError as exc:
        report["stage"] = "picard_fuchs"
        report["error"] = str(exc)
        _emit(report, args.format, args.out)
        return 1
    report["picard_fuchs"] = repr(pf)
    report["verified"] = verify_pf(fam, pf)
    ode = pf.to_ode()
    try:
        root = symmetric_square_root(ode)
        report["symmetric_square_root"] = format_ode(root)
    except ODEError as exc:
        report["stage"] = "symmetric_square_root"
        report["error"] = str(exc)
        _emit(report, args.format, args.out)
        return 1
    current = root
    try:
        if fam.power_k and fam.power_k > 1:
            current = substitute_power(current, fam.power_k)
            report[f"after mu = lambda^{fam.power_k}"] = format_ode(current)
        if fam.mobius_after_power:
            a, b, c, d = fam.mobius_after_power
            current = mobius_substitute(current, a, b, c, d)
            report["after Moebius reparametrization"] = format_ode(current)
        if fam.mobius:
            a, b, c, d = fam.mobius
            current = mobius_substitute(current, a, b, c, d)
            report["after Moebius substitution"] = format_ode(current)
    except ODEError as exc:
        report["stage"] = "substitution"
        report["error"] = str(exc)
        _emit(report, args.format, args.out)
        return 1
    hg = recognize_hypergeometric(current)
    if hg is not None:
        report["recognition"] = f"hypergeometric ({hg.alpha}, {hg.beta}, {hg.gamma})"
    else:
        lame = is_lame(current)
        if lame is not None:
            n, B, roots = lame
            report["recognition"] = (
                f"Lame type: n = {n}, B = {B}, p-roots {[str(r) for r in roots]}"
            )
        else:
            report["recognition"] = "generalized Lame (no classical template match)"
    _emit(report, args.format, args.out)
    return 0


def cmd_sqrt(args) -> int:
    try:
        text = open(args.ode).read() if args.ode != "-" else sys.stdin.read()
        ode = parse_ode(text)
    except (OSError, ParseError, ODEError, ValueError) as exc:
        print(f"cannot parse ODE: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        root = symmetric_square_root(ode)
    except ODEError as exc:
        print(f"no symmetric square root: {exc}", file=sys.stderr)
        return 1
    _emit({"input": format_ode(ode), "symmetric_square_root": format_ode(root)},
          args.format, args.out)
    return 0


def cmd_to_system(args) -> int:
    try:
        text = open(args.ode).read() if args.ode != "-" else sys.stdin.read()
        ode = parse_ode(text)
    except (OSError, ParseError, ODEError, ValueError) as exc:
        print(f"cannot parse ODE: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        pivot = Fraction(args.pivot) if args.pivot else None
        system = equation_to_system(ode, pivot=pivot)
    except (SystemError, NotImplementedError) as exc:
        print(f"conversion failed: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(format_system(system)) if not args.out else open(args.out, "w").write(
        format_system(system)
    )
    return 0


def cmd_monodromy(args) -> int:
    try:
        if args.input.endswith(".sys"):
            system = parse_system(open(args.input).read())
        else:
            fam = read_family_manifest(args.input)
            pf = picard_fuchs(fam, fam.expected_order)
            root = symmetric_square_root(pf.to_ode())
            system = equation_to_system(root)
    except (ManifestError, ParseError, SystemError, ValueError) as exc:
        print(f"cannot load system: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PFError as exc:
        print(f"picard-fuchs failed: {exc}", file=sys.stderr)
        return 1
    try:
        table = pairwise_trace_table(system, rtol=args.tol_rel, atol=args.tol_abs,
                                     snap_tol=args.snap_tol)
    except SnapError as exc:
        print(f"snap failure: {exc}", file=sys.stderr)
        return EXIT_SNAP
    except TransportError as exc:
        print(f"transport failed: {exc}", file=sys.stderr)
        return 1
    report = {
        "kernel": table.kernel,
        "points": [str(l) for l in table.labels],
        "max_residual": f"{table.max_residual():.2e}",
        "trace_table": [
            (str(i), str(j), v, f"{r:.1e}") for i, j, v, r in table.rows()
        ],
    }
    _emit(report, args.format, args.out)
    return 0


def cmd_classify_hg(args) -> int:
    triples, boundary = classify_k3_hypergeometric()
    report = {
        "count": len(triples),
        "triples": [
            ("(" + ", ".join(str(x) for x in t) + ")",
             "traces " + ", ".join(str(v) for v in traces))
            for t, traces in triples
        ],
        "boundary_sum_1_with_zero_angle": [
            "(" + ", ".join(str(x) for x in t) + ")" for t, _ in boundary
        ],
    }
    _emit(report, args.format, args.out)
    return 0


def cmd_molien(args) -> int:
    try:
        spec = read_group_manifest(args.group)
    except (ManifestError, ParseError, ValueError) as exc:
        print(f"bad group manifest: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        group = _close_from_spec(spec)
        series = molien_series(group, args.terms)
    except ClosureError as exc:
        print(f"closure failed: {exc}", file=sys.stderr)
        return EXIT_CLOSURE
    report = {
        "group": spec.name,
        "order": group.order,
        "coefficients": series.coefficients,
    }
    if series.fitted():
        report["fitted_form"] = repr(series)
    _emit(report, args.format, args.out)
    return 0


def cmd_mukai(args) -> int:
    try:
        spec = read_group_manifest(args.group)
    except (ManifestError, ParseError, ValueError) as exc:
        print(f"bad group manifest: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        group = _close_from_spec(spec)
        mu = mukai_number(group, projective=args.projective)
    except ClosureError as exc:
        print(f"closure failed: {exc}", file=sys.stderr)
        return EXIT_CLOSURE
    _emit({"group": spec.name, "order": group.order,
           "projective": bool(args.projective), "mukai_number": str(mu)},
          args.format, args.out)
    return 0


def cmd_quotient(args) -> int:
    inv = [int(x) for x in args.invariants.split(",")]
    rel = [int(x) for x in args.relations.split(",")] if args.relations else []
    report = {}
    if args.group:
        try:
            spec = read_group_manifest(args.group)
            group = _close_from_spec(spec)
            series = molien_series(group, args.terms)
            report["group"] = spec.name
            report["order"] = group.order
            report["molien_coefficients"] = series.coefficients[: args.terms + 1]
            if series.fitted():
                report["fitted_form"] = repr(series)
            report["mukai_number"] = str(mukai_number(group, projective=True))
        except ClosureError as exc:
            print(f"closure failed: {exc}", file=sys.stderr)
            return EXIT_CLOSURE
    try:
        verdict = quotient_pipeline(inv, rel, args.family_degree)
    except ValueError as exc:
        print(f"pipeline failed: {exc}", file=sys.stderr)
        return 1
    if getattr(verdict, "not_applicable", False):
        report["verdict"] = "not a surface complete intersection; adjunction not applicable"
    else:
        d = ",".join(str(x) for x in verdict.ci.degrees)
        w = ",".join(str(x) for x in verdict.ci.weights)
        report["verdict"] = (
            f"K3: {'yes' if verdict.is_k3 else 'no'}, ({d}) in P({w})"
            + ("" if verdict.is_k3 else f", canonical degree {verdict.canonical_degree}")
        )
    _emit(report, args.format, args.out)
    return 0


def cmd_domain(args) -> int:
    try:
        pres, _table = parse_presentation(open(args.presentation).read())
    except (OSError, ParseError, ValueError) as exc:
        print(f"cannot parse presentation: {exc}", file=sys.stderr)
        return EXIT_PARSE
    from .linalg import ExactMatrix as EM

    prod = pres.product()
    ident = EM.identity(2)
    if not (prod == ident or prod == ident * QNum(Fraction(-1))):
        print("presentation product is not +-identity; refusing geometry", file=sys.stderr)
        return EXIT_GEOMETRY
    try:
        isos = [IsometryPSL2R.from_complex_matrix(m.to_complex()) for m in pres.matrices]
        invol = [g for g in isos if g.is_involution()]
        others = [g for g in isos if not g.is_involution()]
        if len(invol) < 3:
            raise GeometryError("need at least three involutions for the polygon")
        poly = polygon_from_involutions(invol)
        sigma0 = invol[0]
        prod_i = invol[0]
        for g in invol[1:]:
            prod_i = prod_i * g
        sigma0 = prod_i.inverse()
        order = sigma0.rotation_order()
        if order is None:
            raise GeometryError("sigma_0 is not elliptic of finite order")
        ok = check_poincare(poly, order)
    except GeometryError as exc:
        print(f"geometry failed: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    svg = render_svg(poly)
    out = args.out or "domain.svg"
    with open(out, "w") as fh:
        fh.write(svg)
    arcs = disk_arcs(poly)
    report = {
        "sides": poly.nsides,
        "sigma0_order": order,
        "angle_sum": poly.angle_sum(),
        "poincare": "OK" if ok else "FAILED",
        "closure_residual": f"{poly.closure_residual:.1e}",
        "side_pairing_residual": f"{side_pairing_residual(poly):.1e}",
        "max_arc_orthogonality_residual": f"{max(a.orthogonality_residual() for a in arcs):.1e}",
        "svg": out,
    }
    _emit(report, args.format, None)
    return 0 if ok else EXIT_GEOMETRY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="k3pf",
        description=(
            "Picard-Fuchs operators of one-parameter K3 families, their "
            "symmetric square roots, Fuchsian systems and monodromy, "
            "invariant-theory quotients, and hyperbolic fundamental domains."
        ),
    )
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--out", default=None, help="write the primary output to a file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pf", help="Picard-Fuchs chain for a family manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_pf)

    p = sub.add_parser("sqrt", help="symmetric square root of an order-3 ODE")
    p.add_argument("ode", help="ODE file in canonical text form, or - for stdin")
    p.set_defaults(func=cmd_sqrt)

    p = sub.add_parser("to-system", help="order-2 ODE to Fuchsian system")
    p.add_argument("ode")
    p.add_argument("--pivot", default=None)
    p.set_defaults(func=cmd_to_system)

    p = sub.add_parser("monodromy", help="snapped trace^2 table for a system")
    p.add_argument("input", help="a .sys system file or a family manifest")
    p.add_argument("--tol-rel", type=float, default=1e-10)
    p.add_argument("--tol-abs", type=float, default=1e-12)
    p.add_argument("--snap-tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("classify-hg", help="Fuchsian integer-trace^2 angle triples")
    p.set_defaults(func=cmd_classify_hg)

    p = sub.add_parser("molien", help="Molien series of a finite matrix group")
    p.add_argument("group")
    p.add_argument("--terms", type=int, default=40)
    p.set_defaults(func=cmd_molien)

    p = sub.add_parser("mukai", help="Mukai number of a finite matrix group")
    p.add_argument("group")
    p.add_argument("--projective", action="store_true")
    p.set_defaults(func=cmd_mukai)

    p = sub.add_parser("quotient", help="K3 verdict for an invariant-ring quotient")
    p.add_argument("--invariants", required=True, help="comma-separated generator degrees")
    p.add_argument("--relations", default="", help="comma-separated relation degrees")
    p.add_argument("--family-degree", type=int, required=True)
    p.add_argument("--group", default=None, help="optional group manifest for the report")
    p.add_argument("--terms", type=int, default=40)
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("domain", help="fundamental domain SVG from a presentation")
    p.add_argument("presentation")
    p.set_defaults(func=cmd_domain)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

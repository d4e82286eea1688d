"""Command-line front end.

One subcommand per analysis pillar; all artifacts are deterministic
functions of the flags (JSON is key-sorted, no timestamps), so re-running a
command byte-reproduces its outputs.

Exit codes: 0 success, 1 verification/search failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import homeo, mdim, regularity, symbolic, zipper
from .core import Parameter, derived
from .errors import DomainError, PreconditionError, ZipperDynError
from .horseshoe import HorseshoeCertificate, brute_search, region_b_search, symmetric_search, verify
from .intervals import Interval
from .rationals import format_rational, parse_rational


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parameter(args) -> Parameter:
    return Parameter.parse(args.p)


def _eps_list(text: str) -> list[Fraction]:
    return [parse_rational(t) for t in text.split(",")]


def cmd_analyze(args) -> int:
    p = _parameter(args)
    d = derived(p)
    rep = regularity.hypersensitivity(p, args.bits)
    data = {
        "p": p.as_strings(),
        "lambda0": format_rational(d.lambda0),
        "lambda1": format_rational(d.lambda1),
        "lambda2": format_rational(d.lambda2),
        "lambda_min": format_rational(d.lambda_min),
        "lambda_max": format_rational(d.lambda_max),
        "h_min": format_rational(d.h_min),
        "h_max": format_rational(d.h_max),
        "v_min": format_rational(d.v_min),
        "v_max": format_rational(d.v_max),
        "hypersensitive": d.hypersensitive,
        "symmetric": d.symmetric,
        "in_region_b": d.in_region_b,
        "regularity": json.loads(regularity.report_to_json(rep)),
    }
    _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_eval(args) -> int:
    p = _parameter(args)
    if args.grid:
        _write(args.out, zipper.sample_csv(p, args.grid, parse_rational(args.eps)))
        return 0
    enc = zipper.eval_point(p, parse_rational(args.x), parse_rational(args.eps))
    _write(args.out, f"{format_rational(enc.lo)},{format_rational(enc.hi)}\n")
    return 0


def cmd_plot(args) -> int:
    p = _parameter(args)
    f, err = zipper.approximant(p, args.depth)
    svg = zipper.svg_polyline(f)
    _write(args.out, svg)
    sys.stderr.write(f"approximant depth {args.depth}, uniform error <= {err}\n")
    return 0


def cmd_horseshoe_search(args) -> int:
    p = _parameter(args)
    if args.mode == "symmetric":
        cert = symmetric_search(p, args.k)
    elif args.mode == "region-b":
        cert = region_b_search(p, args.k)
    elif args.mode == "brute":
        found = brute_search(p, args.k, args.max_len)
        if found is None:
            sys.stderr.write("brute-force scan exhausted without a certificate\n")
            return 1
        cert = found
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown mode {args.mode}")
    report = verify(cert)
    if not report:
        sys.stderr.write("search returned an invalid certificate\n")
        return 1
    _write(args.out, cert.to_json() + "\n")
    return 0


def cmd_horseshoe_verify(args) -> int:
    cert = HorseshoeCertificate.from_json(Path(args.certificate).read_text())
    report = verify(cert)
    if report:
        sys.stdout.write(f"certificate of order {cert.order}: OK\n")
        return 0
    for v in report.violations:
        sys.stdout.write(v + "\n")
    return 1


def cmd_realize_order(args) -> int:
    p = _parameter(args)
    symbols = _parse_order(Path(args.order).read_text())
    real = symbolic.realize_order(p, args.k, args.l, symbols)
    if not symbolic.check_order_realization(real):
        sys.stderr.write("realization failed its standalone check\n")
        return 1
    data = {
        "p": p.as_strings(),
        "k": real.k,
        "l": real.orbit_length,
        "order": [f"({i},{j})" for i, j in real.symbols],
        "horseshoe": json.loads(real.horseshoe.to_json()),
        "points": [format_rational(x) for x in real.points],
        "chains": [list(proof.chain) for proof in real.proofs],
    }
    _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n")
    return 0


def _parse_order(text: str) -> list[tuple[int, int]]:
    raw = json.loads(text)
    out = []
    for item in raw:
        if isinstance(item, str):
            body = item.strip().strip("()")
            i, j = body.split(",")
            out.append((int(i), int(j)))
        else:
            i, j = item
            out.append((int(i), int(j)))
    return out


def cmd_embed(args) -> int:
    p = _parameter(args)
    mapping = [int(t) for t in args.map.split(",")]
    cert = symbolic.embed(p, mapping, parse_rational(args.width))
    if not symbolic.check_embedding(cert):
        sys.stderr.write("embedding failed its standalone check\n")
        return 1
    data = {
        "p": p.as_strings(),
        "map": list(cert.mapping),
        "width_target": format_rational(cert.width_target),
        "base_words": list(cert.base_words),
        "cycles": [list(c) for c in cert.cycles],
        "elements": [
            {
                "element": e.element,
                "word": e.word,
                "kind": e.kind,
                "enclosure": [format_rational(e.enclosure.lo), format_rational(e.enclosure.hi)],
            }
            for e in cert.entries
        ],
    }
    _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_mdim(args) -> int:
    p = _parameter(args)
    rows = mdim.mdim_table(p, _eps_list(args.eps_list), args.depth, args.nmax)
    _write(args.out, mdim.table_csv(rows))
    if args.dump_graph:
        graph = mdim.tile_graph(p, _eps_list(args.eps_list)[-1], args.depth)
        _write(args.dump_graph, graph.dump())
    return 0


def _sequence(args) -> homeo.SequenceSpec:
    if args.mild:
        return homeo.dyadic_sequence(args.levels)
    p = _parameter(args)
    return homeo.choose_sequence(p, args.levels, args.bits)


def cmd_homeo_build(args) -> int:
    spec = _sequence(args)
    data = spec.to_json_dict()
    n = args.n if args.n is not None else min(spec.materializable_prefix(), 6)
    if n > 0:
        h, err = homeo.build_homeo(spec, n)
        data["approximant_levels"] = n
        data["approximant_error_bound"] = format_rational(err)
        if args.svg:
            _write(args.svg, zipper.svg_polyline(h, stroke="#9c1f4e"))
    _write(args.out, json.dumps(data, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_homeo_cover(args) -> int:
    spec = _sequence(args)
    cls = homeo.cover_and_classify(spec, parse_rational(args.eps), args.depth)
    if not (cls.card_check_ok and cls.depth_check_ok and cls.horizontal_check_ok):
        sys.stderr.write("a counting-lemma check failed\n")
        return 1
    _write(args.out, cls.report_csv())
    return 0


def cmd_homeo_rate(args) -> int:
    p = _parameter(args)
    spec = _sequence(args)
    lines = ["epsilon,ratio_upper,k_eps"]
    for eps in _eps_list(args.eps_list):
        rate = homeo.conjugated_rate(p, spec, eps, args.nmax, args.depth)
        lines.append(
            f"{format_rational(eps)},{format_rational(rate.ratio_upper)},"
            f"{rate.classification.k_eps}"
        )
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zipperdyn",
        description="Exact-arithmetic analysis of zipper interval maps",
    )
    ap.add_argument("--seed", type=int, default=0, help="seed for any sampled diagnostics")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_p(sp):
        sp.add_argument("--p", required=True, help="parameter x1,y1,x2,y2 as rationals")

    sp = sub.add_parser("analyze", help="exact derived quantities and regularity report")
    add_p(sp)
    sp.add_argument("--bits", type=int, default=40)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("eval", help="rigorous value enclosure, optionally on a grid")
    add_p(sp)
    sp.add_argument("--x", default="1/2")
    sp.add_argument("--eps", default="1/1024")
    sp.add_argument("--grid", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("plot", help="SVG of a piecewise-linear approximant")
    add_p(sp)
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--out", default="zipper.svg")
    sp.set_defaults(func=cmd_plot)

    sp = sub.add_parser("horseshoe", help="search for or verify horseshoe certificates")
    hs_sub = sp.add_subparsers(dest="hs_command", required=True)
    ssp = hs_sub.add_parser("search")
    add_p(ssp)
    ssp.add_argument("--k", type=int, required=True)
    ssp.add_argument("--mode", choices=["symmetric", "region-b", "brute"], required=True)
    ssp.add_argument("--max-len", type=int, default=12)
    ssp.add_argument("--out", default=None)
    ssp.set_defaults(func=cmd_horseshoe_search)
    vsp = hs_sub.add_parser("verify")
    vsp.add_argument("certificate")
    vsp.set_defaults(func=cmd_horseshoe_verify)

    sp = sub.add_parser("realize-order", help="realize a total order on k x (l+1) symbols")
    add_p(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--order", required=True, help="JSON list of symbols in increasing order")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_realize_order)

    sp = sub.add_parser("embed", help="embed a finite dynamical system")
    add_p(sp)
    sp.add_argument("--map", required=True, help="images S(1),...,S(m), comma separated")
    sp.add_argument("--width", default="1/1048576")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("mdim", help="certified mean-dimension lower-bound table")
    add_p(sp)
    sp.add_argument("--eps-list", required=True)
    sp.add_argument("--depth", type=int, default=10)
    sp.add_argument("--nmax", type=int, default=20)
    sp.add_argument("--out", default=None)
    sp.add_argument("--dump-graph", default=None)
    sp.set_defaults(func=cmd_mdim)

    sp = sub.add_parser("homeo", help="complexity-collapsing homeomorphism tools")
    h_sub = sp.add_subparsers(dest="homeo_command", required=True)
    for name, fn in (("build", cmd_homeo_build), ("cover", cmd_homeo_cover), ("rate", cmd_homeo_rate)):
        hsp = h_sub.add_parser(name)
        hsp.add_argument("--p", default=None, help="parameter x1,y1,x2,y2 (needed unless --mild)")
        hsp.add_argument("--levels", type=int, default=10)
        hsp.add_argument("--bits", type=int, default=60)
        hsp.add_argument("--mild", action="store_true",
                         help="use the decay-only dyadic sequence (no modulus certification)")
        if name == "build":
            hsp.add_argument("--n", type=int, default=None)
            hsp.add_argument("--svg", default=None)
        if name == "cover":
            hsp.add_argument("--eps", required=True)
            hsp.add_argument("--depth", type=int, default=10)
        if name == "rate":
            hsp.add_argument("--eps-list", required=True)
            hsp.add_argument("--depth", type=int, default=8)
            hsp.add_argument("--nmax", type=int, default=10)
        hsp.add_argument("--out", default=None)
        hsp.set_defaults(func=fn)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, PreconditionError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except ZipperDynError as exc:
        sys.stderr.write(f"failed: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

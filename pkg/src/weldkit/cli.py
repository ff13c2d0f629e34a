"""Command-line interface.

Subcommands: parse, sort, peripheral, milnor, compare, certify, braid, demo.
Reports are deterministic: identical inputs (and seed) produce byte-identical
JSON.  Exit codes: 0 success; compare maps Equivalent/Distinct/Unknown to
0/10/20; input and configuration errors exit 2; internal invariant
violations exit 70.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .diagram import (
    DiagramError,
    GaussCodeError,
    diagram_to_json,
    from_braid_closure,
    is_sorted,
    parse_braid_word,
    parse_gauss_code,
    serialize_gauss_code,
)
from .equivalence import (
    Bounds,
    Certificate,
    CertificateError,
    refute,
    sv_equivalent,
    verify_certificate,
)
from .fixtures import FixtureError, hopf, hughes_pair
from .group import (
    format_word,
    mu_system,
    parse_word,
    peripheral_system,
    reduced_presentation,
    sorted_longitudes,
)
from .invariants import diagram_table, linking_matrix
from .magnus import milnor_table, tables_equal
from .moves import MoveError, sort_diagram

SCHEMA_VERSIONS = {
    "report": "weldkit.report/1",
    "diagram": "weldkit.diagram/1",
    "milnor-table": "weldkit.milnor-table/1",
    "certificate": "weldkit.certificate/1",
    "trace": "weldkit.trace/1",
}

EXIT_OK = 0
EXIT_DISTINCT = 10
EXIT_UNKNOWN = 20
EXIT_USAGE = 2
EXIT_INTERNAL = 70


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    fmt: str
    max_length: "int | None"
    bounds: Bounds
    threads: int
    seed: "int | None"
    figures: "str | None"

    def params_json(self) -> dict:
        return {
            "format": self.fmt,
            "max_length": self.max_length,
            "bounds": self.bounds.to_json(),
            "threads": self.threads,
            "seed": self.seed,
            "figures": self.figures,
        }


def _read_code(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        with open(arg[1:], "r", encoding="utf-8") as fh:
            return fh.read()
    return arg


def _config(args: argparse.Namespace) -> RunConfig:
    bounds = Bounds(
        conj_len=args.conj_len,
        coset_max=args.coset_max,
        coset_g_len=args.coset_g_len,
        move_depth=args.search_depth,
        refute_length=args.max_length,
    )
    for name in ("conj_len", "coset_max", "coset_g_len", "search_depth", "threads"):
        if getattr(args, name) < 1:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")
    if args.max_length is not None and args.max_length < 1:
        raise UsageError("--max-length must be positive")
    return RunConfig(args.command, args.format, args.max_length, bounds,
                     args.threads, args.seed, args.figures)


def _report(cfg: RunConfig, input_echo: dict, result: dict,
            figures: "list[str] | None" = None) -> dict:
    out = {
        "schema": SCHEMA_VERSIONS["report"],
        "tool": {"name": "weldkit", "version": __version__,
                 "schemas": SCHEMA_VERSIONS},
        "command": cfg.command,
        "input": input_echo,
        "params": cfg.params_json(),
        "result": result,
    }
    if figures:
        out["figures"] = figures
    return out


def _emit(cfg: RunConfig, report: dict, text_lines: "list[str]") -> None:
    if cfg.fmt == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        for line in text_lines:
            print(line)


def _figure_dir(cfg: RunConfig) -> "str | None":
    if cfg.figures:
        os.makedirs(cfg.figures, exist_ok=True)
    return cfg.figures


def _check_max_length(cfg: RunConfig, n: int) -> int:
    if cfg.max_length is None:
        return n
    if cfg.max_length > n:
        raise UsageError(f"--max-length {cfg.max_length} exceeds component count {n}")
    return cfg.max_length


def _table_lines(table) -> "list[str]":
    lines = ["I\tj\tmu\tdelta\tmubar"]
    for e in table.entries:
        I = "".join(str(i) for i in e.index)
        lines.append(f"{I}\t{e.target}\t{e.mu}\t{e.delta}\t{e.mubar}")
    return lines


# -- subcommands -------------------------------------------------------------


def cmd_parse(args) -> int:
    cfg = _config(args)
    diagram = parse_gauss_code(_read_code(args.code))
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_diagram_figure

        figures.append(save_diagram_figure(
            diagram, os.path.join(cfg.figures, "diagram.png"),
            serialize_gauss_code(diagram)))
    result = {
        "canonical_code": serialize_gauss_code(diagram),
        "diagram": diagram_to_json(diagram),
        "sorted": is_sorted(diagram),
        "linking_matrix": linking_matrix(diagram),
    }
    _emit(cfg, _report(cfg, {"code": args.code}, result, figures), [
        f"components: {diagram.n}   arrows: {len(diagram.arrows)}",
        f"canonical:  {serialize_gauss_code(diagram)}",
        f"sorted:     {is_sorted(diagram)}",
    ])
    return EXIT_OK


def cmd_sort(args) -> int:
    cfg = _config(args)
    diagram = parse_gauss_code(_read_code(args.code))
    sorted_diagram, trace = sort_diagram(diagram)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(trace.to_jsonl())
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_diagram_figure

        figures.append(save_diagram_figure(
            diagram, os.path.join(cfg.figures, "input.png"), "input"))
        figures.append(save_diagram_figure(
            sorted_diagram, os.path.join(cfg.figures, "sorted.png"), "sorted"))
    system = sorted_longitudes(sorted_diagram)
    result = {
        "sorted_code": serialize_gauss_code(sorted_diagram),
        "steps": len(trace.steps),
        "rebase": list(trace.rebase) if trace.rebase else None,
        "longitudes": [format_word(w) for w in system.longitudes],
        "trace_file": args.trace_out,
    }
    _emit(cfg, _report(cfg, {"code": args.code}, result, figures), [
        f"sorted:     {serialize_gauss_code(sorted_diagram)}",
        f"steps:      {len(trace.steps)}",
        "longitudes: " + "  ".join(format_word(w) for w in system.longitudes),
    ])
    return EXIT_OK


def cmd_peripheral(args) -> int:
    cfg = _config(args)
    diagram = parse_gauss_code(_read_code(args.code))
    pres, system = peripheral_system(diagram)
    sorted_diagram, _ = sort_diagram(diagram)
    mu_sys = sorted_longitudes(sorted_diagram)
    reduced = reduced_presentation(mu_sys)
    result = {
        "presentation": pres.to_json(),
        "peripheral_system": system.to_json(),
        "sorted_longitudes": mu_sys.to_json(),
        "reduced_presentation": reduced.to_json(),
    }
    lines = ["generators: " + " ".join(pres.generators)]
    lines += ["relator:    " + format_word(r, pres.generators) for r in pres.relators]
    for i, w in enumerate(system.longitudes, start=1):
        lines.append(f"longitude {i}: {format_word(w, system.generators)}"
                     f"   (self-crossings: {system.self_counts[i - 1]})")
    lines.append("reduced longitudes: "
                 + "  ".join(format_word(w) for w in mu_sys.longitudes))
    _emit(cfg, _report(cfg, {"code": args.code}, result), lines)
    return EXIT_OK


def cmd_milnor(args) -> int:
    cfg = _config(args)
    diagram = parse_gauss_code(_read_code(args.code))
    max_length = _check_max_length(cfg, diagram.n)
    sorted_diagram, _ = sort_diagram(diagram)
    system = sorted_longitudes(sorted_diagram)
    table = milnor_table(system, max_length, residues=not args.raw,
                         threads=cfg.threads)
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_diagram_figure, save_table_figure

        figures.append(save_diagram_figure(
            diagram, os.path.join(cfg.figures, "diagram.png"),
            serialize_gauss_code(diagram)))
        figures.append(save_table_figure(
            table, os.path.join(cfg.figures, "milnor.png"), "Milnor residues"))
    result = {"table": table.to_json(),
              "sorted_code": serialize_gauss_code(sorted_diagram)}
    _emit(cfg, _report(cfg, {"code": args.code}, result, figures),
          _table_lines(table))
    return EXIT_OK


def _certificate_file(verdict, target_sys, source_sys) -> dict:
    return {
        "schema": SCHEMA_VERSIONS["certificate"],
        "n": target_sys.n,
        "target_longitudes": [format_word(w) for w in target_sys.longitudes],
        "source_longitudes": [format_word(w) for w in source_sys.longitudes],
        "certificate": verdict.certificate.to_json(),
    }


def cmd_compare(args) -> int:
    cfg = _config(args)
    d1 = parse_gauss_code(_read_code(args.code1))
    d2 = parse_gauss_code(_read_code(args.code2))
    if d1.n != d2.n:
        raise UsageError(f"component counts differ: {d1.n} vs {d2.n}")
    max_length = _check_max_length(cfg, d1.n)
    bounds = dataclasses.replace(cfg.bounds, refute_length=max_length)
    verdict = sv_equivalent(d1, d2, bounds)
    s1, _ = sort_diagram(d1)
    s2, _ = sort_diagram(d2)
    sys1, sys2 = sorted_longitudes(s1), sorted_longitudes(s2)
    if args.emit_cert and verdict.certificate:
        target, source = (sys2, sys1) if verdict.certificate_reversed else (sys1, sys2)
        with open(args.emit_cert, "w", encoding="utf-8") as fh:
            json.dump(_certificate_file(verdict, target, source), fh,
                      sort_keys=True, indent=2)
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_comparison_figure

        t1 = milnor_table(sys1, max_length)
        t2 = milnor_table(sys2, max_length)
        figures.append(save_comparison_figure(
            t1, t2, os.path.join(cfg.figures, "comparison.png"),
            ("first", "second"), f"verdict: {verdict.kind}"))
    result = verdict.to_json()
    lines = [f"verdict: {verdict.kind}"]
    if verdict.witness:
        lines.append("witness: " + verdict.witness.describe())
    if verdict.certificate:
        lines.append(f"certificate: {len(verdict.certificate.moves)} word moves, "
                     f"direction {'reversed' if verdict.certificate_reversed else 'forward'}")
    _emit(cfg, _report(cfg, {"code1": args.code1, "code2": args.code2},
                       result, figures), lines)
    return {"equivalent": EXIT_OK, "distinct": EXIT_DISTINCT,
            "unknown": EXIT_UNKNOWN}[verdict.kind]


def cmd_certify(args) -> int:
    cfg = _config(args)
    with open(args.check, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA_VERSIONS["certificate"]:
        raise UsageError(f"not a {SCHEMA_VERSIONS['certificate']} file")
    n = data["n"]
    target = mu_system([parse_word(w) for w in data["target_longitudes"]])
    source = mu_system([parse_word(w) for w in data["source_longitudes"]])
    if target.n != n or source.n != n:
        raise UsageError("longitude counts do not match n")
    cert = Certificate.from_json(data["certificate"])
    ok = verify_certificate(target, source, cert)
    result = {"valid": ok}
    _emit(cfg, _report(cfg, {"file": args.check}, result),
          [f"certificate: {'VALID' if ok else 'INVALID'}"])
    return EXIT_OK if ok else 1


def cmd_braid(args) -> int:
    cfg = _config(args)
    braid = parse_braid_word(args.word, args.strands)
    diagram = from_braid_closure(braid)
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_diagram_figure

        figures.append(save_diagram_figure(
            diagram, os.path.join(cfg.figures, "closure.png"),
            f"closure of {args.word}"))
    result = {
        "code": serialize_gauss_code(diagram),
        "components": diagram.n,
        "diagram": diagram_to_json(diagram),
        "linking_matrix": linking_matrix(diagram),
    }
    _emit(cfg, _report(cfg, {"strands": args.strands, "word": args.word},
                       result, figures), [
        f"components: {diagram.n}",
        f"code:       {serialize_gauss_code(diagram)}",
    ])
    return EXIT_OK


def cmd_demo(args) -> int:
    cfg = _config(args)
    if args.which == "hopf":
        return _demo_hopf(cfg)
    return _demo_hughes(cfg)


def _demo_hopf(cfg: RunConfig) -> int:
    d1, d2 = hopf(+1), hopf(-1)
    witness = refute(sorted_longitudes(sort_diagram(d1)[0]),
                     sorted_longitudes(sort_diagram(d2)[0]))
    assert witness is not None
    verdict = sv_equivalent(d1, d2)
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_comparison_figure, save_diagram_figure

        figures.append(save_diagram_figure(
            d1, os.path.join(cfg.figures, "hopf-positive.png"), "positive Hopf"))
        figures.append(save_diagram_figure(
            d2, os.path.join(cfg.figures, "hopf-negative.png"), "negative Hopf"))
        figures.append(save_comparison_figure(
            diagram_table(d1), diagram_table(d2),
            os.path.join(cfg.figures, "hopf-tables.png"),
            ("positive", "negative"), "Hopf pair residues"))
    result = {"verdict": verdict.kind, "witness": witness.to_json()}
    _emit(cfg, _report(cfg, {"demo": "hopf"}, result, figures), [
        "positive vs negative Hopf links",
        f"verdict: {verdict.kind}",
        "witness: " + witness.describe(),
    ])
    return EXIT_OK


def _demo_hughes(cfg: RunConfig) -> int:
    h1, h2, meta = hughes_pair()
    max_length = 4
    t1 = diagram_table(h1, max_length)
    t2 = diagram_table(h2, max_length)
    equal = tables_equal(t1, t2)
    verdict = sv_equivalent(h1, h2, cfg.bounds)
    no_witness = all(
        refute(sorted_longitudes(sort_diagram(h1)[0]),
               sorted_longitudes(sort_diagram(h2)[0]), L) is None
        for L in range(1, max_length + 1))
    figures = []
    if _figure_dir(cfg):
        from .plotting import save_comparison_figure, save_diagram_figure

        figures.append(save_diagram_figure(
            h1, os.path.join(cfg.figures, "hughes-1.png"), "first closure"))
        figures.append(save_diagram_figure(
            h2, os.path.join(cfg.figures, "hughes-2.png"), "second closure"))
        figures.append(save_comparison_figure(
            t1, t2, os.path.join(cfg.figures, "hughes-tables.png"),
            ("first", "second"), "residues agree through length 4"))
    result = {
        "fixture": {"h1_word": meta["h1_word"], "h2_word": meta["h2_word"],
                    "strands": meta["strands"], "verified": meta["verified"],
                    "provenance": meta["provenance"]},
        "tables_equal_through_4": equal,
        "no_refutation_any_length": no_witness,
        "verdict": verdict.kind,
        "table": t1.to_json(),
    }
    lines = [
        "four-component pair with equal reduced peripheral data",
        f"residue tables equal through length {max_length}: {equal}",
        f"refutation found at any length <= {max_length}: {not no_witness}",
        f"verdict: {verdict.kind}",
        "note: surrogate braid words; see fixtures/README.md",
    ]
    if not equal or verdict.kind == "distinct":
        _emit(cfg, _report(cfg, {"demo": "hughes"}, result, figures), lines)
        raise AssertionError("hughes demo self-check failed")
    _emit(cfg, _report(cfg, {"demo": "hughes"}, result, figures), lines)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--max-length", type=int, default=None, metavar="K",
                   help="invariant length cap (default: component count)")
    p.add_argument("--search-depth", type=int, default=64, metavar="D")
    p.add_argument("--conj-len", type=int, default=4, metavar="L")
    p.add_argument("--coset-max", type=int, default=4, metavar="M")
    p.add_argument("--coset-g-len", type=int, default=3, metavar="G")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, metavar="T")
    p.add_argument("--seed", type=int, default=None, metavar="S")
    p.add_argument("--figures", metavar="DIR", default=None,
                   help="render figures into this directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="weldkit",
        description="welded links as Gauss diagrams: moves, peripheral systems, "
                    "Milnor invariants, sv-equivalence")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and validate a Gauss code")
    p.add_argument("code", help="Gauss code, @file, or - for stdin")
    _add_common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("sort", help="sort a diagram (self-virtualization class)")
    p.add_argument("code")
    p.add_argument("--trace-out", metavar="FILE", default=None,
                   help="write the move trace as JSON lines")
    _add_common(p)
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("peripheral", help="group presentation and peripheral system")
    p.add_argument("code")
    _add_common(p)
    p.set_defaults(func=cmd_peripheral)

    p = sub.add_parser("milnor", help="Milnor invariant table")
    p.add_argument("code")
    p.add_argument("--raw", action="store_true",
                   help="raw coefficients instead of residues")
    _add_common(p)
    p.set_defaults(func=cmd_milnor)

    p = sub.add_parser("compare", help="compare two diagrams "
                                       "(exit 0 equivalent, 10 distinct, 20 unknown)")
    p.add_argument("code1")
    p.add_argument("code2")
    p.add_argument("--emit-cert", metavar="FILE", default=None,
                   help="write the found certificate for re-verification")
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("certify", help="re-verify a certificate file")
    p.add_argument("--check", required=True, metavar="FILE")
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("braid", help="Gauss diagram of a braid closure")
    p.add_argument("--strands", type=int, required=True)
    p.add_argument("--word", required=True, help='braid word like "s1 s1 s2^-1"')
    _add_common(p)
    p.set_defaults(func=cmd_braid)

    p = sub.add_parser("demo", help="showcase computations")
    p.add_argument("which", choices=("hughes", "hopf"))
    _add_common(p)
    p.set_defaults(func=cmd_demo)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (DiagramError, MoveError, AssertionError) as exc:
        print(f"weldkit: internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (GaussCodeError, UsageError, FixtureError, CertificateError,
            FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"weldkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

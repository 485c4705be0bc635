"""Command-line frontend: stable textual contracts over every module.

Exit codes: 0 success, 1 domain error, 2 usage error. Machine-readable
output goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cliques import PatternSet, count_cliques, max_clique
from .errors import OrdmatchError
from .harness import ExperimentSpec, fit_exponent, read_csv, run_experiment, write_csv, write_fit_json
from .matchings import OrderedMatching, from_word, parse_trace, to_word, trace_of
from .patterns import (
    Cube,
    Pattern,
    cube_expand,
    enumerate_patterns,
    harmonic_family,
    parse_partition,
)
from .reconstruct import check_reconstructible, named_rule, reconstruct
from .sampling import sample_online, sample_uniform


def _emit(payload: dict, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps(payload))
    else:
        for line in text_lines:
            print(line)


def _cmd_patterns(args) -> int:
    if args.patterns_cmd == "list":
        pats = enumerate_patterns(args.r, args.klass)
        _emit({"patterns": [p.word for p in pats]}, args.format, [p.word for p in pats])
    elif args.patterns_cmd == "classify":
        p = Pattern(args.word)
        comp = str(p.composition()) if p.is_collectable else None
        payload = {
            "word": p.word,
            "collectable": p.is_collectable,
            "composition": comp,
            "partite": p.is_partite,
            "dyck": p.is_dyck,
        }
        lines = [
            f"word {p.word}",
            f"collectable {str(p.is_collectable).lower()}",
            f"composition {comp if comp else '-'}",
            f"partite {str(p.is_partite).lower()}",
            f"dyck {str(p.is_dyck).lower()}",
        ]
        _emit(payload, args.format, lines)
    elif args.patterns_cmd == "cube":
        cube = Cube(Pattern(args.word), parse_partition(args.partition))
        pats = cube_expand(cube)
        _emit({"patterns": [p.word for p in pats]}, args.format, [p.word for p in pats])
    elif args.patterns_cmd == "harmonic":
        pats = harmonic_family(Pattern(args.word))
        _emit({"patterns": [p.word for p in pats]}, args.format, [p.word for p in pats])
    return 0


def _print_matching(m: OrderedMatching) -> None:
    print(f"{m.r} {m.n}")
    print(to_word(m))


def _cmd_gen(args) -> int:
    if args.model == "uniform":
        m = sample_uniform(args.r, args.n, args.seed)
    else:
        m = sample_online(args.r, args.n, args.seed, args.steps)
    _print_matching(m)
    return 0


def _read_matching_arg(args) -> OrderedMatching:
    if args.word:
        return from_word(args.word)
    with open(args.file) as fh:
        header = fh.readline().split()
        r = int(header[0])
        body = fh.read().split("\n")
        first = body[0].strip()
        if first and not first[0].isdigit():
            return from_word(first, r)
        edges = [tuple(int(v) for v in line.split()) for line in body if line.strip()]
        return OrderedMatching(r, tuple(sorted(edges)))


def _cmd_trace(args) -> int:
    m = _read_matching_arg(args)
    print(str(trace_of(m)))
    return 0


def _cmd_reconstruct(args) -> int:
    trace = parse_trace(args.trace)
    m = reconstruct(trace, named_rule(args.rule))
    print(to_word(m))
    return 0


def _cmd_clique(args) -> int:
    if args.clique_cmd == "solve":
        m = _read_matching_arg(args)
        ps = PatternSet.from_spec(m.r, args.patterns)
        res = max_clique(m, ps, args.solver, args.budget)
        witness = " ".join(str(i) for i in res.witness)
        print(f"{res.size},{res.status},{witness}")
    elif args.clique_cmd == "count":
        print(count_cliques(args.r, PatternSet.from_spec(args.r, args.patterns), args.k))
    return 0


def _cmd_recon_check(args) -> int:
    ps = PatternSet.from_spec(args.r, args.patterns)
    verdict = check_reconstructible(args.r, ps, args.k)
    if verdict.reconstructible:
        print("reconstructible")
    else:
        m, n, t = verdict.collision
        print(f"counterexample {m} {n} trace {t}")
    return 0


def _cmd_experiment(args) -> int:
    if args.experiment_cmd == "run":
        spec = ExperimentSpec.from_json(args.config)
        records = run_experiment(spec, workers=args.workers)
        write_csv(records, args.out)
        print(f"wrote {len(records)} rows to {args.out}")
    elif args.experiment_cmd == "fit":
        records = read_csv(args.infile)
        report = fit_exponent(records)
        out = args.out or (args.infile + ".fit.json")
        write_fit_json(report, out)
        print(f"slope {report.slope:.6f} stderr {report.stderr:.6f} -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordmatch")
    sub = parser.add_subparsers(dest="cmd", required=True)

    pat = sub.add_parser("patterns", help="pattern algebra")
    pat_sub = pat.add_subparsers(dest="patterns_cmd", required=True)
    p_list = pat_sub.add_parser("list")
    p_list.add_argument("--r", type=int, required=True)
    p_list.add_argument("--class", dest="klass", default="all")
    p_list.add_argument("--format", default="text", choices=["text", "json"])
    p_cls = pat_sub.add_parser("classify")
    p_cls.add_argument("--word", required=True)
    p_cls.add_argument("--format", default="text", choices=["text", "json"])
    p_cube = pat_sub.add_parser("cube")
    p_cube.add_argument("--word", required=True)
    p_cube.add_argument("--partition", required=True)
    p_cube.add_argument("--format", default="text", choices=["text", "json"])
    p_harm = pat_sub.add_parser("harmonic")
    p_harm.add_argument("--word", required=True)
    p_harm.add_argument("--format", default="text", choices=["text", "json"])
    pat.set_defaults(func=_cmd_patterns)

    gen = sub.add_parser("gen", help="sample a matching")
    gen.add_argument("--r", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--model", default="uniform", choices=["uniform", "online"])
    gen.add_argument("--steps", type=int, default=None)
    gen.set_defaults(func=_cmd_gen)

    tr = sub.add_parser("trace", help="trace of a matching")
    tr.add_argument("--word")
    tr.add_argument("--file")
    tr.set_defaults(func=_cmd_trace)

    rec = sub.add_parser("reconstruct", help="decode a trace")
    rec.add_argument("--trace", required=True)
    rec.add_argument("--rule", default="left", choices=["left", "right", "lr", "rl"])
    rec.set_defaults(func=_cmd_reconstruct)

    cl = sub.add_parser("clique", help="clique solving and counting")
    cl_sub = cl.add_subparsers(dest="clique_cmd", required=True)
    c_solve = cl_sub.add_parser("solve")
    c_solve.add_argument("--word")
    c_solve.add_argument("--file")
    c_solve.add_argument("--patterns", required=True)
    c_solve.add_argument("--solver", default="auto", choices=["auto", "bb", "chain", "partition"])
    c_solve.add_argument("--budget", type=float, default=30.0)
    c_count = cl_sub.add_parser("count")
    c_count.add_argument("--r", type=int, required=True)
    c_count.add_argument("--patterns", required=True)
    c_count.add_argument("--k", type=int, required=True)
    cl.set_defaults(func=_cmd_clique)

    rc = sub.add_parser("recon-check", help="reconstructibility of a clique family")
    rc.add_argument("--r", type=int, required=True)
    rc.add_argument("--patterns", required=True)
    rc.add_argument("--k", type=int, required=True)
    rc.set_defaults(func=_cmd_recon_check)

    exp = sub.add_parser("experiment", help="Monte Carlo harness")
    exp_sub = exp.add_subparsers(dest="experiment_cmd", required=True)
    e_run = exp_sub.add_parser("run")
    e_run.add_argument("--config", required=True)
    e_run.add_argument("--out", required=True)
    e_run.add_argument("--workers", type=int, default=1)
    e_fit = exp_sub.add_parser("fit")
    e_fit.add_argument("--in", dest="infile", required=True)
    e_fit.add_argument("--out", default=None)
    exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OrdmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

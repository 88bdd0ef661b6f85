"""Command line: ``netdep {test,power,embed,simulate}``.

Exit status: 0 success, 2 parse/data error, 3 numerical failure,
4 bad parameters.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import simgen
from .config import EMBEDDINGS, METHODS, RunConfig
from .dmgc import network_test
from .errors import NetdepError, ParameterError
from .graph import normalized_laplacian, symmetrize
from .harness import power_rows, rows_to_csv
from .loaders import load_attributes, load_edge_list, write_attributes, write_edge_list
from .spectral import adjacency_spectral_embedding, ase_decomposition, decompose, diffusion_map, select_dimension


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ParameterError.exit_code, f"{self.prog}: error: {message}\n")


def _common(p, *, test_opts=True):
    p.add_argument("--embedding", default="diffusion", help="diffusion | ase (comma list for power)")
    p.add_argument("--q", type=int, default=None, help="embedding dimension (default: second elbow)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    if test_opts:
        p.add_argument("--method", default="dmgc", help="dmgc | dcorr | hhg (comma list for power)")
        p.add_argument("--tmax", type=int, default=10)
        p.add_argument("--perms", type=int, default=500)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netdep", description="Network dependence testing with diffusion maps "
                     "and distance-based correlations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="test a graph against its nodal attributes; prints JSON")
    p.add_argument("graph", help="edge list: 'u v [w]' per line")
    p.add_argument("attributes", help="CSV with header, node id first")
    _common(p)
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--one-indexed", action="store_true")

    p = sub.add_parser("power", help="Monte-Carlo power over a parameter grid; prints CSV")
    p.add_argument("scenario", choices=simgen.SCENARIOS)
    p.add_argument("--grid", required=True,
                   help="comma-separated parameter values (beta, tau, eps or relationship id)")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--reps", type=int, default=100)
    _common(p)

    p = sub.add_parser("embed", help="write diffusion (or ASE) coordinates as CSV")
    p.add_argument("graph")
    p.add_argument("--t", type=int, default=1)
    _common(p, test_opts=False)
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--one-indexed", action="store_true")

    p = sub.add_parser("simulate", help="draw one sample graph; writes OUT.edges and OUT.csv")
    p.add_argument("scenario", choices=simgen.SCENARIOS)
    p.add_argument("--param", default=None, help="beta, tau, eps or relationship id")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    return parser


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def cmd_test(args) -> None:
    cfg = RunConfig(method=args.method, embedding=args.embedding, t_max=args.tmax,
                    q_override=args.q, permutations=args.perms, alpha=args.alpha,
                    seed=args.seed, threads=args.threads, binarize=args.binarize,
                    one_indexed=args.one_indexed)
    x = load_attributes(args.attributes, one_indexed=cfg.one_indexed)
    a = load_edge_list(args.graph, n=x.shape[0], binarize=cfg.binarize, one_indexed=cfg.one_indexed)
    report = network_test(a, x, cfg)
    _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", args.out)


_DEFAULT_PARAM = {"sbm3": 0.4, "sbm-beta": 0.5, "dcsbm": 0.0, "rdpg": 1, "nonpsd": 0.3}


def cmd_power(args) -> None:
    configs = []
    for method in _split(args.method):
        for emb in _split(args.embedding):
            configs.append(RunConfig(method=method, embedding=emb, t_max=args.tmax,
                                     q_override=args.q, permutations=args.perms,
                                     alpha=args.alpha, replicates=args.reps, seed=args.seed))
    if not configs:
        raise ParameterError("no method/embedding combination given")
    try:
        grid = [float(g) for g in _split(args.grid)]
    except ValueError:
        raise ParameterError(f"bad --grid {args.grid!r}") from None
    if args.scenario == "rdpg":
        grid = [int(g) for g in grid]
    if not grid:
        raise ParameterError("empty --grid")
    if args.threads < 1:
        raise ParameterError("threads must be >= 1")
    rows = power_rows(args.scenario, grid, args.n, configs, replicates=args.reps,
                      seed=args.seed, threads=args.threads)
    _emit(rows_to_csv(rows), args.out)


def cmd_embed(args) -> None:
    if args.embedding not in EMBEDDINGS:
        raise ParameterError(f"embedding must be one of {EMBEDDINGS}")
    a = symmetrize(load_edge_list(args.graph, binarize=args.binarize, one_indexed=args.one_indexed))
    if args.embedding == "ase":
        q = args.q if args.q is not None else select_dimension(ase_decomposition(a).eigenvalues)
        coords = adjacency_spectral_embedding(a, q)
    else:
        dec = decompose(normalized_laplacian(a))
        q = args.q if args.q is not None else select_dimension(dec.eigenvalues)
        coords = diffusion_map(dec, args.t, q).coords
    lines = ["id," + ",".join(f"u{j + 1}" for j in range(coords.shape[1]))]
    lines += [f"{i}," + ",".join(repr(float(v)) for v in row) for i, row in enumerate(coords)]
    _emit("\n".join(lines) + "\n", args.out)


def cmd_simulate(args) -> None:
    param = args.param if args.param is not None else _DEFAULT_PARAM[args.scenario]
    try:
        param = int(param) if args.scenario == "rdpg" else float(param)
    except ValueError:
        raise ParameterError(f"bad --param {args.param!r}") from None
    sample = simgen.sample_scenario(args.scenario, args.n, param, simgen.make_rng(args.seed))
    write_edge_list(f"{args.out}.edges", sample.a)
    write_attributes(f"{args.out}.csv", sample.x)


COMMANDS = {"test": cmd_test, "power": cmd_power, "embed": cmd_embed, "simulate": cmd_simulate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except NetdepError as exc:
        print(f"netdep: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"netdep: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

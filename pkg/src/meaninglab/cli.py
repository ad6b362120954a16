"""Command-line front end.

Subcommands map one-to-one onto the package's experiment surface:
``sample`` draws a symbol graph, ``gamma`` estimates hypothesis
separation, ``bounds`` evaluates the closed forms, ``heatmap`` runs the
noise sweep, ``spectral`` runs coupled cut trials, ``ingest`` converts a
triples file, ``check`` screens an instance for triviality.

Exit codes: 0 success, 1 argument or validation error, 2 I/O error,
3 when the meaning graph cannot supply a requested fixture pair.
All emitted CSV/TSV/SVG files are byte-stable for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .bounds import bound_report
from .experiments import emit_heatmap_csv, emit_svg_heatmap, heatmap
from .graph import write_edge_list
from .meaning import (
    MeaningGraph,
    NO_SUCH_PAIR,
    TriplesFormatError,
    check_nontrivial,
    gen_er,
    load_triples,
    make_cut_pair,
    pick_pair_at_distance,
)
from .reasoning import (
    CSV_HEADER,
    DTildeMode,
    NoFixtureError,
    choose_d_tilde,
    estimate_gamma,
)
from .rng import STREAM_SPECTRAL_TRIAL, stream, subseed
from .sampler import SampleParams, sample_symbol_graph, write_symbol_graph
from .spectral import SPECTRAL_CSV_HEADER, coupled_cut_trial, spectral_csv_record


class CliArgumentError(Exception):
    """Bad command line or config; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliArgumentError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated common core of a CLI run."""

    command: str
    params: SampleParams
    seed: int
    out: Path
    threads: int
    allow_trivial: bool

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="root seed for every stream")
    p.add_argument("--config", type=Path, default=None, help="JSON file with default argument values")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker processes for trial loops")
    p.add_argument(
        "--allow-trivial",
        action="store_true",
        help="run even when the nontriviality screen fails",
    )
    return p


def _source_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--er", nargs=2, metavar=("N", "P"), default=None, help="Erdos-Renyi meaning graph")
    p.add_argument("--graph-seed", type=int, default=1, help="seed for --er generation")
    p.add_argument("--triples", type=Path, default=None, help="head<TAB>rel<TAB>tail file")
    p.add_argument("--prefix", type=str, default="", help="relation prefix filter for --triples")
    return p


def _params_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--p-plus", type=float, default=0.9)
    p.add_argument("--p-minus", type=float, default=1e-6)
    p.add_argument("--eps-plus", type=float, default=1e-4)
    p.add_argument("--eps-minus", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=int, default=2, help="replicas per meaning node")
    p.add_argument("--fold", action="store_true", help="fold eps_minus into the structural probabilities")
    return p


def build_parser() -> _Parser:
    common = _common_parent()
    source = _source_parent()
    params = _params_parent()
    parser = _Parser(prog="meaninglab", description="noisy symbol-graph reasoning lab")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", parents=[common, source, params], help="draw one symbol graph")
    sp.set_defaults(handler=_cmd_sample)

    sp = sub.add_parser("gamma", parents=[common, source, params], help="estimate hypothesis separation")
    sp.add_argument("--d", type=int, default=2, help="meaning distance for the connected hypothesis")
    sp.add_argument("--d-tilde", type=int, default=None, help="symbol search radius (default lam*d+lam-1)")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--representative", choices=("first", "uniform"), default="first")
    sp.add_argument("--fixed-pairs", action="store_true", help="reuse one fixture pair across trials")
    sp.set_defaults(handler=_cmd_gamma)

    sp = sub.add_parser("bounds", parents=[common, params], help="evaluate the closed-form bounds")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--ball-d", type=int, required=True, help="d-neighborhood size bound B(d)")
    sp.add_argument("--ball-1", type=int, default=1, help="1-neighborhood size bound B(1)")
    sp.add_argument("--c2", type=float, default=2.0)
    sp.add_argument("--c3", type=float, default=2.0)
    sp.add_argument("--json", action="store_true", help="print JSON instead of aligned text")
    sp.set_defaults(handler=_cmd_bounds)

    sp = sub.add_parser("heatmap", parents=[common, source, params], help="noise-versus-distance sweep")
    sp.add_argument("--d-max", type=int, default=5)
    sp.add_argument("--pairs-per-cell", type=int, default=20)
    sp.add_argument(
        "--p-minus-grid",
        type=str,
        default="1e-6,1e-5,1e-4,1e-3,1e-2",
        help="comma-separated row values",
    )
    sp.set_defaults(handler=_cmd_heatmap)

    sp = sub.add_parser("spectral", parents=[common, source, params], help="coupled cut-world trials")
    sp.add_argument("--d", type=int, default=None, help="meaning pair distance (default ceil(ln n)+1)")
    sp.add_argument("--d-tilde", type=int, default=None, help="neighborhood radius (default lam*d)")
    sp.add_argument("--trials", type=int, default=20)
    sp.set_defaults(handler=_cmd_spectral)

    sp = sub.add_parser("ingest", parents=[common], help="triples file to edge list")
    sp.add_argument("--triples", type=Path, required=True)
    sp.add_argument("--prefix", type=str, default="")
    sp.set_defaults(handler=_cmd_ingest)

    sp = sub.add_parser("check", parents=[common, source, params], help="nontriviality screen")
    sp.add_argument("--d", type=int, default=2)
    sp.set_defaults(handler=_cmd_check)
    return parser


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    """Overlay config-file values under explicit command-line flags."""
    if args.config is None:
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CliArgumentError(f"bad config JSON: {exc}")
    if not isinstance(cfg, dict):
        raise CliArgumentError("config must be a JSON object")
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token.split("=", 1)[0].lstrip("-").replace("-", "_"))
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest == "lambda":
            dest = "lam"
        if not hasattr(args, dest):
            raise CliArgumentError(f"unknown config key {key!r}")
        if dest in explicit or (dest == "lam" and "lambda" in explicit):
            continue
        if dest in ("out", "triples", "config"):
            value = Path(value)
        setattr(args, dest, value)


def _run_config(args: argparse.Namespace) -> RunConfig:
    if hasattr(args, "p_plus"):
        params = SampleParams(
            p_plus=float(args.p_plus),
            p_minus=float(args.p_minus),
            eps_plus=float(args.eps_plus),
            eps_minus=float(args.eps_minus),
            lam=int(args.lam),
            fold=bool(args.fold),
        )
    else:
        # Commands without sampling parameters (ingest) never touch these.
        params = SampleParams(0.0, 0.0, 0.0, 0.0, 1)
    return RunConfig(
        command=args.command,
        params=params,
        seed=int(args.seed),
        out=args.out,
        threads=int(args.threads),
        allow_trivial=bool(args.allow_trivial),
    )


def _load_graph(args: argparse.Namespace) -> MeaningGraph:
    has_er = getattr(args, "er", None) is not None
    has_triples = getattr(args, "triples", None) is not None
    if has_er == has_triples:
        raise CliArgumentError("exactly one of --er or --triples is required")
    if has_er:
        try:
            n = int(args.er[0])
            p = float(args.er[1])
        except ValueError:
            raise CliArgumentError(f"--er expects an integer and a probability, got {args.er}")
        return gen_er(n, p, args.graph_seed)
    return load_triples(args.triples, args.prefix)


def _gate_nontrivial(rc: RunConfig, gm: MeaningGraph, d: int) -> None:
    report = check_nontrivial(gm, rc.params, d)
    if not report.overall and not rc.allow_trivial:
        raise CliArgumentError(
            "nontriviality screen failed (use --allow-trivial to override):\n" + report.render()
        )


def _outdir(rc: RunConfig) -> Path:
    rc.out.mkdir(parents=True, exist_ok=True)
    return rc.out


# -- handlers -----------------------------------------------------------


def _cmd_sample(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = _load_graph(args)
    sg = sample_symbol_graph(gm, rc.params, rc.seed)
    path = _outdir(rc) / "symbol_graph.tsv"
    write_symbol_graph(sg, path)
    print(
        f"symbol graph: {sg.graph.n} nodes, {len(sg.structural)} structural,"
        f" {len(sg.similarity)} similarity -> {path}"
    )
    return 0


def _cmd_gamma(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = _load_graph(args)
    if args.d < 1:
        raise CliArgumentError(f"--d must be positive, got {args.d}")
    _gate_nontrivial(rc, gm, args.d)
    d_tilde = args.d_tilde
    if d_tilde is None:
        d_tilde = choose_d_tilde(DTildeMode.POSSIBILITY, rc.params.lam, args.d)
    est = estimate_gamma(
        gm,
        args.d,
        rc.params,
        d_tilde,
        args.trials,
        rc.seed,
        representative=args.representative,
        fixed_pairs=args.fixed_pairs,
        threads=rc.threads,
    )
    record = est.csv_record()
    path = _outdir(rc) / "gamma.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n" + record + "\n")
    print(record)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    report = bound_report(
        n=args.n,
        d=args.d,
        lam=rc.params.lam,
        p_plus=rc.params.p_plus,
        p_minus=rc.params.p_minus,
        eps_plus=rc.params.eps_plus,
        eps_minus=rc.params.eps_minus,
        ball_d=args.ball_d,
        ball_1=args.ball_1,
        c2=args.c2,
        c3=args.c3,
    )
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        print(report.render_text())
    return 0


def _cmd_heatmap(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = _load_graph(args)
    try:
        grid = [float(x) for x in args.p_minus_grid.split(",") if x]
    except ValueError:
        raise CliArgumentError(f"bad --p-minus-grid {args.p_minus_grid!r}")
    if args.d_max < 1:
        raise CliArgumentError(f"--d-max must be positive, got {args.d_max}")
    _gate_nontrivial(rc, gm, args.d_max)
    table = heatmap(
        gm,
        grid,
        args.d_max,
        args.pairs_per_cell,
        rc.params,
        rc.seed,
        threads=rc.threads,
    )
    out = _outdir(rc)
    emit_heatmap_csv(table, out / "heatmap.csv")
    emit_svg_heatmap(table, out / "heatmap.svg")
    print(f"heatmap: {len(table.p_minus_grid)} rows x {table.d_max + 1} columns -> {out / 'heatmap.csv'}")
    return 0


def _cmd_spectral(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = _load_graph(args)
    d = args.d if args.d is not None else math.ceil(math.log(max(gm.n, 2))) + 1
    if d < 1:
        raise CliArgumentError(f"--d must be positive, got {d}")
    _gate_nontrivial(rc, gm, d)
    d_tilde = args.d_tilde if args.d_tilde is not None else rc.params.lam * d
    records = []
    within = 0
    for t in range(args.trials):
        pair = pick_pair_at_distance(gm, d, stream(rc.seed, STREAM_SPECTRAL_TRIAL, t, 0))
        if pair is NO_SUCH_PAIR:
            raise NoFixtureError(f"no pair at distance {d} in the meaning graph")
        cp = make_cut_pair(gm, *pair)
        trial = coupled_cut_trial(
            cp, rc.params, d_tilde, subseed(rc.seed, STREAM_SPECTRAL_TRIAL, t, 1)
        )
        within += int(trial.within_bound)
        records.append(spectral_csv_record(trial))
    path = _outdir(rc) / "spectral.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SPECTRAL_CSV_HEADER + "\n")
        fh.write("\n".join(records) + "\n")
    print(f"spectral: {within}/{args.trials} trials within bound -> {path}")
    return 0


def _cmd_ingest(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = load_triples(args.triples, args.prefix)
    path = _outdir(rc) / "meaning_graph.tsv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes {gm.n}\n")
        if gm.labels:
            for i, label in enumerate(gm.labels):
                fh.write(f"# label {i} {label}\n")
        for u, v in gm.graph.edges():
            fh.write(f"{u}\t{v}\n")
    print(f"ingested: nodes={gm.n} edges={gm.edge_count} -> {path}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    rc = _run_config(args)
    gm = _load_graph(args)
    if args.d < 1:
        raise CliArgumentError(f"--d must be positive, got {args.d}")
    report = check_nontrivial(gm, rc.params, args.d)
    print(report.render())
    return 0


def cli(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, argv)
        return args.handler(args)
    except CliArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TriplesFormatError as exc:
        # Malformed input data reads as an I/O problem, not a usage one.
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except NoFixtureError as exc:
        print(f"no fixture: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()

"""Command-line front door: simulate, fit, eval, theory, and sweep."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import RankingError
from .experiments import load_config, make_profile, run_sweep, write_sweep_csv
from .metrics import estimation_errors, exact_recovery, hamming_topk, kendall_tau
from .mle import MleOptions, fit_mle
from .model import Ranking, SkillProfile, center
from .simulate import (
    ComparisonDataset,
    RngSeed,
    read_dataset,
    sample_comparisons,
    sample_graph,
    write_dataset,
)
from .spectral import fit_spectral
from .theory import variance_mle, variance_spectral

EXIT_OK = 0
EXIT_SEMANTIC = 1
# argparse exits with 2 on usage errors


def _prob(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1]")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _invocation(argv: list[str]) -> str:
    return "btlrank " + " ".join(argv) + f" | version {__version__}"


def _write_lines(path, comment: str, lines) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        fh.write("\n".join(lines) + "\n")


def cmd_simulate(args, comment: str) -> int:
    gen = RngSeed(args.seed, args.stream).generator()
    profile = make_profile(args.design, args.delta, args.design_param, args.n, args.k, rng=gen)
    rank = Ranking.identity(args.n)
    graph = sample_graph(args.n, args.p, gen)
    sampled = sample_comparisons(graph, profile, rank, args.L, gen)
    # record the trial key in the file rather than the consumed generator
    dataset = ComparisonDataset(graph=sampled.graph, wins=sampled.wins, L=sampled.L,
                                seed=RngSeed(args.seed, args.stream))
    write_dataset(dataset, args.out, comment=comment)
    truth_lines = [
        f"{i + 1} {repr(float(profile.values[rank.ranks[i] - 1]))} {rank.ranks[i]}"
        for i in range(args.n)
    ]
    _write_lines(args.out + ".truth", comment, truth_lines)
    return EXIT_OK


def _read_truth(path):
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    idx = np.array([int(r[0]) - 1 for r in rows])
    theta = np.empty(len(rows))
    ranks = np.empty(len(rows), dtype=np.int64)
    theta[idx] = [float(r[1]) for r in rows]
    ranks[idx] = [int(r[2]) for r in rows]
    return theta, Ranking(ranks)


def _read_scores(path):
    """Parse 'method <name>' blocks of 'i score rank' lines."""
    blocks = []
    current = None
    with open(path) as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            if ln.startswith("method "):
                current = (ln.split()[1], [])
                blocks.append(current)
                continue
            if current is None:
                raise ValueError(f"{path}: score rows before any 'method' line")
            i, score, rank = ln.split()
            current[1].append((int(i) - 1, float(score), int(rank)))
    out = []
    for name, rows in blocks:
        rows.sort()
        scores = np.array([r[1] for r in rows])
        ranks = np.array([r[2] for r in rows], dtype=np.int64)
        out.append((name, scores, Ranking(ranks)))
    return out


def cmd_fit(args, comment: str) -> int:
    dataset = read_dataset(args.infile)
    methods = ["mle", "spectral"] if args.method == "both" else [args.method]
    lines = []
    for method in methods:
        if method == "mle":
            options = MleOptions(mode=args.mode, lam=args.lam, bound=args.bound,
                                 grad_tol=args.grad_tol)
            fit = fit_mle(dataset, options)
        else:
            fit = fit_spectral(dataset)
        lines.append(f"method {method}")
        for i in range(dataset.n):
            lines.append(f"{i + 1} {repr(float(fit.scores[i]))} {fit.ranking.ranks[i]}")
    _write_lines(args.out, comment, lines)
    return EXIT_OK


def cmd_eval(args, comment: str) -> int:
    theta_star, r_star = _read_truth(args.truth)
    blocks = _read_scores(args.scores)
    print("method,hamming,exact,kendall,l2_sq,linf_sq")
    for name, scores, r_hat in blocks:
        if r_hat.n != r_star.n:
            raise ValueError(
                f"scores block {name!r} has n={r_hat.n} but truth has n={r_star.n}"
            )
        h = hamming_topk(r_hat, r_star, args.k)
        ex = exact_recovery(r_hat, r_star, args.k)
        kt = kendall_tau(r_hat, r_star)
        if name == "mle":
            values = np.sort(theta_star)[::-1]
            profile = SkillProfile(values, k=args.k, delta=0.0,
                                   kappa=float(values[0] - values[-1]))
            l2, linf = estimation_errors(center(scores), profile, r_star)
            l2_s, linf_s = f"{l2:.10g}", f"{linf:.10g}"
        else:
            l2_s = linf_s = ""  # stationary probabilities are on a different scale
        print(f"{name},{h:.10g},{str(ex).lower()},{kt},{l2_s},{linf_s}")
    return EXIT_OK


def cmd_theory(args, comment: str) -> int:
    if args.kappa_max == 0:
        kappas = [0.0]
    else:
        kappas = np.linspace(0.0, args.kappa_max, args.grid)
    lines = ["kappa,V,Vbar,argmax_k1,argmax_k2"]
    for kap in kappas:
        v = variance_mle(args.n, args.k, float(kap))
        vbar = variance_spectral(args.n, args.k, float(kap))
        lines.append(
            f"{kap:.10g},{v.value:.10g},{vbar.value:.10g},"
            f"{v.argmax[0]:.10g},{v.argmax[1]:.10g}"
        )
    if args.out:
        _write_lines(args.out, comment, lines)
    else:
        print("\n".join(lines))
    return EXIT_OK


def cmd_sweep(args, comment: str) -> int:
    config = load_config(args.config)
    workers = args.workers or int(os.environ.get("BTLRANK_WORKERS", "1"))
    records = run_sweep(config, workers=workers)
    write_sweep_csv(records, args.out, comment=comment)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btlrank",
        description="Simulate pairwise comparisons, rank by MLE or the spectral "
        "method, and evaluate recovery against the theory.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="sample a comparison dataset plus its truth sidecar")
    sim.add_argument("--n", type=_positive_int, default=200)
    sim.add_argument("--p", type=_prob, default=0.25)
    sim.add_argument("--L", type=_positive_int, default=20)
    sim.add_argument("--k", type=_positive_int, default=50)
    sim.add_argument("--design", default="two_piece",
                     choices=["four_piece_tau", "four_piece_rho", "random_uniform", "two_piece"])
    sim.add_argument("--design-param", type=float, default=None,
                     help="tau for four_piece_tau, rho for four_piece_rho")
    sim.add_argument("--delta", type=_nonneg_float, default=0.5)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--stream", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit scores and ranks from a dataset file")
    fit.add_argument("--method", default="both", choices=["mle", "spectral", "both"])
    fit.add_argument("--in", dest="infile", required=True)
    fit.add_argument("--mode", default="vanilla", choices=["vanilla", "regularized", "box"])
    fit.add_argument("--lam", type=_nonneg_float, default=0.0,
                     help="ridge weight for --mode regularized")
    fit.add_argument("--bound", type=float, default=40.0,
                     help="box half-width for --mode box")
    fit.add_argument("--grad-tol", type=float, default=1e-10)
    fit.add_argument("--out", required=True)
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="score a fit against a truth sidecar")
    ev.add_argument("--scores", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--k", type=_positive_int, required=True)
    ev.set_defaults(func=cmd_eval)

    th = sub.add_parser("theory", help="effective-variance curves over a kappa grid")
    th.add_argument("--n", type=_positive_int, default=200)
    th.add_argument("--k", type=_positive_int, default=50)
    th.add_argument("--kappa-max", type=_nonneg_float, default=5.0)
    th.add_argument("--grid", type=_positive_int, default=50)
    th.add_argument("--out", default=None,
                    help="CSV destination (stdout when omitted); argmax columns "
                    "report the MLE variance maximizer")
    th.set_defaults(func=cmd_theory)

    sw = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--workers", type=_positive_int, default=None,
                    help="process count (default: BTLRANK_WORKERS or 1)")
    sw.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    comment = _invocation(argv)
    try:
        return args.func(args, comment)
    except RankingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())

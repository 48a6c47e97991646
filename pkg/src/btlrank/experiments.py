"""Monte Carlo sweeps: paired method comparisons over a gap grid."""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .errors import RankingError
from .metrics import estimation_errors, hamming_topk
from .mle import fit_mle
from .model import CenteredScores, Ranking
from .simulate import (
    RngSeed,
    design_four_piece_rho,
    design_four_piece_tau,
    design_random_uniform,
    design_two_piece,
    sample_comparisons,
    sample_graph,
)
from .spectral import fit_spectral

DESIGNS = ("four_piece_tau", "four_piece_rho", "random_uniform", "two_piece")
METHODS = ("mle", "spectral")

CSV_HEADER = (
    "design,param,n,k,p,L,delta,method,trials,"
    "mean_hamming,exact_freq,mean_l2_sq,failures,seed"
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a skill design, a gap grid, and the trial budget.

    ``param`` is tau for four_piece_tau and rho for four_piece_rho; the
    other designs take none.  Both methods see the identical dataset in
    every trial, and everything is keyed off (base_seed, trial index),
    so trials parallelize without shared state.
    """

    design: str
    delta_grid: tuple[float, ...]
    param: float | None = None
    n: int = 200
    k: int = 50
    p: float = 0.25
    L: int = 20
    trials: int = 100
    base_seed: int = 0
    methods: tuple[str, ...] = METHODS
    shuffle_ranks: bool = False

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ValueError(f"unknown design {self.design!r}")
        if self.design in ("four_piece_tau", "four_piece_rho"):
            if self.param is None:
                raise ValueError(f"design {self.design} requires a param")
        elif self.param is not None:
            raise ValueError(f"design {self.design} takes no param")
        grid = tuple(float(d) for d in self.delta_grid)
        if not grid:
            raise ValueError("delta_grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("delta_grid must be strictly increasing")
        object.__setattr__(self, "delta_grid", grid)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        methods = tuple(self.methods)
        if not methods or any(m not in METHODS for m in methods):
            raise ValueError(f"methods must be a nonempty subset of {METHODS}")
        object.__setattr__(self, "methods", methods)


@dataclass(frozen=True)
class TrialResult:
    """One method's outcome on one sampled dataset."""

    hamming: float
    exact: bool
    l2_sq: float | None
    failed: bool


@dataclass(frozen=True)
class SweepRecord:
    """Trial-averaged results for one (delta, method) grid point."""

    design: str
    param: float | None
    n: int
    k: int
    p: float
    L: int
    delta: float
    method: str
    trials: int
    mean_hamming: float
    exact_freq: float
    mean_l2_sq: float | None
    failures: int
    seed: int


def make_profile(design: str, delta: float, param: float | None, n: int, k: int, rng=None):
    """Build one of the named skill designs; rng is only consumed by random_uniform."""
    if design == "four_piece_tau":
        return design_four_piece_tau(param, delta, n=n, k=k)
    if design == "four_piece_rho":
        return design_four_piece_rho(param, delta, n=n, k=k)
    if design == "random_uniform":
        return design_random_uniform(delta, rng, n=n, k=k)
    if design == "two_piece":
        return design_two_piece(delta, n=n, k=k)
    raise ValueError(f"unknown design {design!r}")


def _profile_for(config: ExperimentConfig, delta: float, gen: np.random.Generator):
    return make_profile(config.design, delta, config.param, config.n, config.k, rng=gen)


def _trial_dataset(config: ExperimentConfig, delta: float, trial_index: int):
    """Sample the profile, truth ranking, and dataset for one trial.

    Everything is drawn from a single stream keyed by (base_seed,
    trial_index), consumed in a fixed order, so the dataset is the same
    regardless of which methods the caller fits on it.
    """
    gen = RngSeed(config.base_seed, trial_index).generator()
    profile = _profile_for(config, delta, gen)
    if config.shuffle_ranks:
        rank = Ranking(gen.permutation(config.n) + 1)
    else:
        rank = Ranking.identity(config.n)
    graph = sample_graph(config.n, config.p, gen)
    dataset = sample_comparisons(graph, profile, rank, config.L, gen)
    return profile, rank, dataset


def run_trial(config: ExperimentConfig, delta: float, trial_index: int) -> dict[str, TrialResult]:
    """Fit every configured method on one shared dataset.

    A fit that fails (diverged or otherwise unidentifiable) is recorded
    as a total miss (hamming 1) with its failed flag set, never dropped;
    dropping would bias the paired comparison.
    """
    profile, rank, dataset = _trial_dataset(config, delta, trial_index)
    out = {}
    for method in config.methods:
        try:
            if method == "mle":
                fit = fit_mle(dataset)
                l2_sq, _ = estimation_errors(CenteredScores(fit.scores), profile, rank)
            else:
                fit = fit_spectral(dataset)
                l2_sq = None
            h = hamming_topk(fit.ranking, rank, config.k)
            out[method] = TrialResult(hamming=h, exact=h == 0.0, l2_sq=l2_sq, failed=False)
        except RankingError:
            out[method] = TrialResult(hamming=1.0, exact=False, l2_sq=None, failed=True)
    return out


def _sweep_cell(args):
    config, delta, trial_index = args
    return run_trial(config, delta, trial_index)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[SweepRecord]:
    """Run the full grid and aggregate per (delta, method).

    With workers > 1 the trials run in a process pool; results are
    reduced in trial order either way, so the output is deterministic.
    """
    tasks = [(config, delta, t) for delta in config.delta_grid for t in range(config.trials)]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_cell, tasks, chunksize=8))
    else:
        results = [_sweep_cell(t) for t in tasks]

    records = []
    for gi, delta in enumerate(config.delta_grid):
        cell = results[gi * config.trials : (gi + 1) * config.trials]
        for method in config.methods:
            rs = [c[method] for c in cell]
            l2s = [r.l2_sq for r in rs if r.l2_sq is not None]
            records.append(
                SweepRecord(
                    design=config.design,
                    param=config.param,
                    n=config.n,
                    k=config.k,
                    p=config.p,
                    L=config.L,
                    delta=delta,
                    method=method,
                    trials=config.trials,
                    mean_hamming=float(np.mean([r.hamming for r in rs])),
                    exact_freq=float(np.mean([r.exact for r in rs])),
                    mean_l2_sq=float(np.mean(l2s)) if l2s else None,
                    failures=sum(r.failed for r in rs),
                    seed=config.base_seed,
                )
            )
    return _sorted_records(records)


def _sorted_records(records):
    return sorted(
        records,
        key=lambda r: (r.design, r.param if r.param is not None else -np.inf, r.delta, r.method),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_sweep_csv(records, path, comment: str | None = None) -> None:
    """Write sweep records as CSV (floats at 10 significant digits).

    Rows come out sorted by (design, param, delta, method); an empty
    record list produces a header-only file.
    """
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(CSV_HEADER)
    for r in _sorted_records(records):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.design, r.param, r.n, r.k, r.p, r.L, r.delta, r.method,
                    r.trials, r.mean_hamming, r.exact_freq, r.mean_l2_sq,
                    r.failures, r.seed,
                )
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sweep_csv(path) -> list[SweepRecord]:
    """Parse a CSV written by :func:`write_sweep_csv`."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected CSV header")
    records = []
    for ln in lines[1:]:
        f = ln.split(",")
        if len(f) != 14:
            raise ValueError(f"{path}: bad row {ln!r}")
        records.append(
            SweepRecord(
                design=f[0],
                param=float(f[1]) if f[1] else None,
                n=int(f[2]),
                k=int(f[3]),
                p=float(f[4]),
                L=int(f[5]),
                delta=float(f[6]),
                method=f[7],
                trials=int(f[8]),
                mean_hamming=float(f[9]),
                exact_freq=float(f[10]),
                mean_l2_sq=float(f[11]) if f[11] else None,
                failures=int(f[12]),
                seed=int(f[13]),
            )
        )
    return records


_CONFIG_PARSERS = {
    "design": str,
    "param": float,
    "n": int,
    "k": int,
    "p": float,
    "L": int,
    "delta_grid": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
    "trials": int,
    "base_seed": int,
    "methods": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
    "shuffle_ranks": lambda s: {"true": True, "false": False}[s.lower()],
}


def load_config(path) -> ExperimentConfig:
    """Read a line-oriented ``key = value`` experiment config.

    Blank lines and '#' comments are ignored; unknown keys are rejected.
    """
    fields = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            parser = _CONFIG_PARSERS.get(key)
            if parser is None:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in fields:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                fields[key] = parser(value)
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    if "design" not in fields or "delta_grid" not in fields:
        raise ValueError(f"{path}: config must set at least 'design' and 'delta_grid'")
    return ExperimentConfig(**fields)

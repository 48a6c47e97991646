"""Sampling of comparison graphs and game outcomes, plus the benchmark skill designs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import Ranking, SkillProfile, SpaceKind, sigmoid

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    """Key of a counter-based random stream.

    The pair (seed, stream_id) keys a Philox generator, so it fully
    determines every draw; distinct stream ids give independent streams
    without shared state, which is what lets trials run in parallel.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) <= _UINT64_MAX:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def stream(self, stream_id: int) -> "RngSeed":
        """The same seed on a different stream."""
        return RngSeed(self.seed, stream_id)


def as_generator(rng) -> np.random.Generator:
    """Accept either an RngSeed or an already-running Generator.

    Passing a Generator lets several sampling steps consume one stream
    sequentially (the usual pattern inside a trial).
    """
    if isinstance(rng, RngSeed):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngSeed or numpy Generator, got {type(rng).__name__}")


def connected_from_pairs(n: int, pairs: np.ndarray) -> bool:
    """Union-find connectivity over vertex pairs; isolated vertices disconnect."""
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    components = n
    for a, b in np.asarray(pairs).reshape(-1, 2):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[ra] = rb
            components -= 1
    return components == 1


@dataclass(frozen=True, eq=False)
class ComparisonGraph:
    """Undirected comparison graph on n players.

    ``edges`` is an (m, 2) int array of pairs i < j, stored in canonical
    lexicographic order.  ``p`` records the generation probability when
    the graph was sampled; hand-built graphs may leave it None.
    """

    n: int
    edges: np.ndarray
    p: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge endpoints must lie in 0..n-1")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            # canonicalize: i < j within a row, rows in lexicographic order
            edges = np.sort(edges, axis=1)
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("duplicate edges are not allowed")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        if self.p is not None and not 0 < self.p <= 1:
            raise ValueError("p must lie in (0, 1] when recorded")

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        if self.edges.size:
            i, j = self.edges[:, 0], self.edges[:, 1]
            a[i, j] = 1
            a[j, i] = 1
        return a

    def is_connected(self) -> bool:
        return connected_from_pairs(self.n, self.edges)

    def __eq__(self, other):
        if not isinstance(other, ComparisonGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and self.p == other.p
        )


@dataclass(frozen=True, eq=False)
class ComparisonDataset:
    """Per-edge win counts out of L games.

    ``wins[e]`` counts wins of the lower-index endpoint of edge e, so
    every win fraction is exactly a multiple of 1/L.  ``seed`` is
    provenance only (recorded in dataset files); RngSeed(0, 0) means
    unknown.
    """

    graph: ComparisonGraph
    wins: np.ndarray
    L: int
    seed: RngSeed = RngSeed(0, 0)

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        wins = np.array(self.wins, dtype=np.int64)
        if wins.shape != (self.graph.num_edges,):
            raise ValueError("wins must have one entry per edge")
        if wins.size and (wins.min() < 0 or wins.max() > self.L):
            raise ValueError("win counts must lie in 0..L")
        wins.setflags(write=False)
        object.__setattr__(self, "wins", wins)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def ybar(self) -> np.ndarray:
        """Win fraction of the lower-index endpoint, per edge."""
        return self.wins / self.L

    @cached_property
    def _edge_index(self) -> dict:
        return {
            (int(i), int(j)): e
            for e, (i, j) in enumerate(self.graph.edges)
        }

    def wins_of(self, i: int, j: int) -> int:
        """Games player i won against player j (exact integer)."""
        if i == j:
            raise ValueError("no self-comparisons")
        key = (i, j) if i < j else (j, i)
        e = self._edge_index.get(key)
        if e is None:
            raise KeyError(f"({i}, {j}) is not an edge")
        w = int(self.wins[e])
        return w if i < j else self.L - w

    def ybar_of(self, i: int, j: int) -> float:
        """Win fraction of i over j; ybar_of(j, i) is its complement."""
        return self.wins_of(i, j) / self.L

    def ybar_matrix(self) -> np.ndarray:
        """Dense Y with Y[i, j] = win fraction of i over j on edges, 0 elsewhere."""
        y = np.zeros((self.n, self.n))
        if self.graph.edges.size:
            i, j = self.graph.edges[:, 0], self.graph.edges[:, 1]
            yb = self.ybar
            y[i, j] = yb
            y[j, i] = 1.0 - yb
        return y

    def __eq__(self, other):
        if not isinstance(other, ComparisonDataset):
            return NotImplemented
        return (
            self.graph == other.graph
            and np.array_equal(self.wins, other.wins)
            and self.L == other.L
            and self.seed == other.seed
        )


def sample_graph(n: int, p: float, rng) -> ComparisonGraph:
    """Erdos-Renyi comparison graph: each pair appears independently w.p. p."""
    if n < 2:
        raise ValueError("need at least two players")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    gen = as_generator(rng)
    iu, ju = np.triu_indices(n, k=1)
    mask = gen.random(iu.size) < p
    edges = np.column_stack([iu[mask], ju[mask]])
    return ComparisonGraph(n=n, edges=edges, p=float(p))


def sample_comparisons(
    graph: ComparisonGraph,
    profile: SkillProfile,
    rank: Ranking,
    L: int,
    rng,
) -> ComparisonDataset:
    """Play L games on every edge of the graph.

    Player i's skill is the entry of the sorted profile at its true rank,
    and i beats j with probability sigmoid(skill_i - skill_j); the win
    counts are binomial draws, deterministic given the rng.
    """
    if graph.n != profile.n or graph.n != rank.n:
        raise ValueError(
            f"dimension mismatch: graph n={graph.n}, profile n={profile.n}, rank n={rank.n}"
        )
    if L < 1:
        raise ValueError("L must be at least 1")
    gen = as_generator(rng)
    skills = profile.values[rank.ranks - 1]
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    probs = sigmoid(skills[i] - skills[j])
    wins = gen.binomial(L, probs) if i.size else np.zeros(0, dtype=np.int64)
    seed = rng if isinstance(rng, RngSeed) else RngSeed(0, 0)
    return ComparisonDataset(graph=graph, wins=np.asarray(wins, dtype=np.int64), L=L, seed=seed)


def _piecewise(sizes, values) -> np.ndarray:
    return np.repeat(np.asarray(values, dtype=float), sizes)


def design_four_piece_tau(tau: float, delta: float, n: int = 200, k: int = 50) -> SkillProfile:
    """Four-piece profile with values 10, 10-tau, 10-tau-delta, 0.

    Piece sizes are k/2, k/2, (n-k)/2, (n-k)/2 (25, 25, 75, 75 at the
    defaults), so the top-k gap is exactly delta and the range is 10.
    """
    if tau < 0 or delta < 0 or tau + delta > 10:
        raise ValueError("infeasible (tau, delta): need tau, delta >= 0 and tau + delta <= 10")
    if k % 2 or (n - k) % 2:
        raise ValueError("k and n - k must both be even for the four-piece split")
    sizes = [k // 2, k // 2, (n - k) // 2, (n - k) // 2]
    values = _piecewise(sizes, [10.0, 10.0 - tau, 10.0 - tau - delta, 0.0])
    return SkillProfile(values, k=k, delta=delta, kappa=10.0)


def design_four_piece_rho(rho: float, delta: float, n: int = 200, k: int = 50) -> SkillProfile:
    """Four-piece profile with values 10, 6, 6-delta, 0 and rho-dependent sizes.

    Change points sit at k(1-rho), k, k + (n-k)*rho.  rho must make
    those integers; fractional piece sizes are rejected rather than
    rounded, since rounding would silently move players across the
    top-k boundary.
    """
    if not 0 <= rho <= 1:
        raise ValueError("rho must lie in [0, 1]")
    if not 0 <= delta <= 6:
        raise ValueError("infeasible delta: need 0 <= delta <= 6")
    c1 = k * (1 - rho)
    c3 = (n - k) * rho
    if abs(c1 - round(c1)) > 1e-9 or abs(c3 - round(c3)) > 1e-9:
        raise ValueError(f"rho={rho} produces non-integer piece sizes")
    c1, c3 = int(round(c1)), int(round(c3))
    sizes = [c1, k - c1, c3, (n - k) - c3]
    values = _piecewise(sizes, [10.0, 6.0, 6.0 - delta, 0.0])
    return SkillProfile(values, k=k, delta=delta, kappa=10.0)


def design_random_uniform(delta: float, rng, n: int = 200, k: int = 50) -> SkillProfile:
    """Random profile: top block Uniform[6, 10], bottom block Uniform[0, 6-delta].

    The first entry is pinned to 10 and the last to 0; each block is
    sorted, so the whole vector is nonincreasing with top-k gap >= delta.
    """
    if not 0 < delta < 6:
        raise ValueError("infeasible delta: need 0 < delta < 6")
    gen = as_generator(rng)
    top = np.sort(gen.uniform(6.0, 10.0, size=k - 1))[::-1]
    bottom = np.sort(gen.uniform(0.0, 6.0 - delta, size=n - k - 1))[::-1]
    values = np.concatenate([[10.0], top, bottom, [0.0]])
    return SkillProfile(values, k=k, delta=delta, kappa=10.0)


def design_two_piece(delta: float, n: int = 200, k: int = 50) -> SkillProfile:
    """Two-piece profile: k entries at delta, the rest at 0, so kappa = delta.

    This is the one configuration where the spectral method matches the
    MLE's effective variance.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    values = _piecewise([k, n - k], [delta, 0.0])
    return SkillProfile(values, k=k, delta=delta, kappa=delta)


def write_dataset(dataset: ComparisonDataset, path, comment: str | None = None) -> None:
    """Write the line-oriented dataset format.

    First non-comment line is ``n p L seed stream``; then one line per
    edge ``i j wins`` with 1-based indices, wins counted for player i.
    Floats are written with repr so the round-trip is bit-exact.
    """
    g = dataset.graph
    p_str = repr(float(g.p)) if g.p is not None else "nan"
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"{g.n} {p_str} {dataset.L} {dataset.seed.seed} {dataset.seed.stream_id}")
    for (i, j), w in zip(g.edges, dataset.wins):
        lines.append(f"{i + 1} {j + 1} {w}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path) -> ComparisonDataset:
    """Parse a dataset file written by :func:`write_dataset`."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty dataset file")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError(f"{path}: header must be 'n p L seed stream'")
    n, L = int(head[0]), int(head[2])
    p = float(head[1])
    seed = RngSeed(int(head[3]), int(head[4]))
    edges = []
    wins = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"{path}: bad edge line {ln!r}")
        i, j, w = int(parts[0]) - 1, int(parts[1]) - 1, int(parts[2])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"{path}: edge endpoints out of range in {ln!r}")
        if i > j:  # normalize orientation to the stored convention
            i, j, w = j, i, L - w
        edges.append((i, j))
        wins.append(w)
    order = np.lexsort((np.array([j for _, j in edges], dtype=np.int64),
                        np.array([i for i, _ in edges], dtype=np.int64)))
    edges_arr = np.array(edges, dtype=np.int64).reshape(-1, 2)[order]
    wins_arr = np.array(wins, dtype=np.int64)[order]
    graph = ComparisonGraph(n=n, edges=edges_arr, p=None if math.isnan(p) else p)
    return ComparisonDataset(graph=graph, wins=wins_arr, L=L, seed=seed)

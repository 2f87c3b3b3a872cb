"""Continuum percolation on the unit square with annihilation.

Points are joined when they are within ``2r`` of each other.  Any two
distinct points within distance ``q`` annihilate every edge incident to
either of them; at ``q = 0`` this means exactly coinciding points.  Points
themselves are never removed, but an annihilated point cannot carry a
crossing path.

Randomness comes from counter-based Philox substreams: replicate ``k`` of
seed ``s`` always draws from the stream keyed by ``(s, k)``, so results do
not depend on how replicates are split across workers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

__all__ = [
    "NORMS",
    "GeometricConfig",
    "SurvivingGraph",
    "WitnessPair",
    "Estimate",
    "substream",
    "sample_config",
    "build_graph",
    "crossing",
    "restricted_crossing",
    "find_disjoint_witness",
    "annihilation_threshold",
    "conditional_mc",
    "mc_experiment",
]

#: Unit-ball areas of the supported norms.
NORMS = {"linf": 4, "l2": math.pi, "l1": 2}
N_EXACT = 18
DIRECTIONS = ("LR", "BT")


def substream(seed: int, k: int | None = None) -> np.random.Generator:
    """Philox generator for seed ``seed`` or its ``k``-th replicate substream."""
    key = () if k is None else (k,)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class GeometricConfig:
    points: np.ndarray
    r: float
    q: float = 0.0
    norm: str = "linf"
    c: float = 1.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if self.norm not in NORMS:
            raise ValueError(f"norm must be one of {sorted(NORMS)}")
        if self.r <= 0 or self.q < 0:
            raise ValueError("need r > 0 and q >= 0")
        if pts.size and (pts.min() < 0 or pts.max() > 1):
            raise ValueError("points must lie in the unit square")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def tau(self) -> float:
        return NORMS[self.norm]


@dataclass(frozen=True)
class SurvivingGraph:
    adjacency: np.ndarray
    annihilated: np.ndarray
    members: np.ndarray

    @property
    def alive(self) -> np.ndarray:
        return self.members & ~self.annihilated

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency))
        return list(zip(i.tolist(), j.tolist()))


@dataclass(frozen=True)
class WitnessPair:
    K: frozenset
    L: frozenset

    def __post_init__(self):
        if self.K & self.L:
            raise ValueError("witness sets must be disjoint")


def sample_config(n: int, r: float, q: float = 0.0, norm: str = "linf", seed: int = 0,
                  c: float = 1.0) -> GeometricConfig:
    """``n`` i.i.d. uniform points on the unit square."""
    if n < 1:
        raise ValueError("need n >= 1")
    return GeometricConfig(substream(seed).random((n, 2)), r, q, norm, c)


def _pairwise(points: np.ndarray, norm: str) -> np.ndarray:
    diff = np.abs(points[..., :, None, :] - points[..., None, :, :])
    if norm == "linf":
        return diff.max(-1)
    if norm == "l1":
        return diff.sum(-1)
    return np.sqrt((diff ** 2).sum(-1))


def _graph_arrays(points, r, q, norm, members):
    n = points.shape[-2]
    d = _pairwise(points, norm)
    inside = members[..., :, None] & members[..., None, :] & ~np.eye(n, dtype=bool)
    annihilated = ((d <= q) & inside).any(-1)
    alive = members & ~annihilated
    adjacency = (d <= 2 * r) & inside & alive[..., :, None] & alive[..., None, :]
    return adjacency, annihilated, alive


def _members(n: int, restrict) -> np.ndarray:
    members = np.zeros(n, dtype=bool)
    if restrict is None:
        members[:] = True
    else:
        idx = np.fromiter(restrict, dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError("restriction indices out of range")
        members[idx] = True
    return members


def build_graph(cfg: GeometricConfig, restrict=None) -> SurvivingGraph:
    """Surviving geometric graph, optionally seeing only the points in ``restrict``.

    Outside points neither form edges nor annihilate anything.
    """
    members = _members(cfg.n, restrict)
    adjacency, annihilated, _ = _graph_arrays(cfg.points, cfg.r, cfg.q, cfg.norm, members)
    for a in (adjacency, annihilated, members):
        a.flags.writeable = False
    return SurvivingGraph(adjacency, annihilated, members)


def _ends(points, r, direction):
    axis = 0 if direction == "LR" else 1
    coord = points[..., axis]
    return coord <= r, 1 - coord <= r


def _crossing_batch(points, r, q, norm, members=None) -> dict[str, np.ndarray]:
    """Left-right and bottom-top crossing indicators for a batch of configurations."""
    R, n, _ = points.shape
    if members is None:
        members = np.ones((R, n), dtype=bool)
    adjacency, _, alive = _graph_arrays(points, r, q, norm, members)
    b, i, j = np.nonzero(adjacency)
    graph = coo_matrix((np.ones(b.size, dtype=np.int8), (b * n + i, b * n + j)), shape=(R * n, R * n))
    ncomp, labels = connected_components(graph, directed=False)
    out = {}
    for direction in DIRECTIONS:
        src, snk = _ends(points, r, direction)
        src = (src & alive).reshape(-1)
        snk = (snk & alive).reshape(-1)
        has_src = np.zeros(ncomp, dtype=bool)
        has_src[labels[src]] = True
        has_snk = np.zeros(ncomp, dtype=bool)
        has_snk[labels[snk]] = True
        out[direction] = (src & (has_src & has_snk)[labels]).reshape(R, n).any(1)
    return out


def crossing(g: SurvivingGraph, cfg: GeometricConfig, direction: str = "LR") -> bool:
    """Whether surviving edges join a source strip to the opposite sink strip.

    Sources lie within ``r`` of ``x = 0`` (``LR``) or ``y = 0`` (``BT``);
    sinks within ``r`` of ``x = 1`` or ``y = 1``.  Only non-annihilated
    member points take part.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    src, snk = _ends(cfg.points, cfg.r, direction)
    alive = g.alive
    frontier = list(np.flatnonzero(src & alive))
    seen = np.zeros(cfg.n, dtype=bool)
    seen[frontier] = True
    while frontier:
        v = frontier.pop()
        if snk[v]:
            return True
        for u in np.flatnonzero(g.adjacency[v] & ~seen):
            seen[u] = True
            frontier.append(u)
    return False


def restricted_crossing(cfg: GeometricConfig, K, direction: str) -> bool:
    """The crossing event computed from the points indexed by ``K`` alone."""
    return crossing(build_graph(cfg, K), cfg, direction)


# -- disjoint witnesses ------------------------------------------------------

def _bitmasks(matrix: np.ndarray) -> np.ndarray:
    weights = np.uint32(1) << np.arange(matrix.shape[1], dtype=np.uint32)
    return (matrix.astype(np.uint32) * weights).sum(1).astype(np.uint32)


def _all_subset_crossings(cfg: GeometricConfig, direction: str) -> np.ndarray:
    """Restricted crossing indicator for every subset of points (bit ``i`` = point ``i``)."""
    n = cfg.n
    d = _pairwise(cfg.points, cfg.norm)
    off = ~np.eye(n, dtype=bool)
    near = _bitmasks((d <= cfg.q) & off)
    adj = _bitmasks((d <= 2 * cfg.r) & off)
    src_pts, snk_pts = _ends(cfg.points, cfg.r, direction)
    src = _bitmasks(src_pts[None, :])[0]
    snk = _bitmasks(snk_pts[None, :])[0]
    masks = np.arange(1 << n, dtype=np.uint32)
    annihilated = np.zeros_like(masks)
    for i in range(n):
        bit = np.uint32(1 << i)
        hit = ((masks & bit) != 0) & ((masks & near[i]) != 0)
        annihilated |= np.where(hit, bit, np.uint32(0))
    alive = masks & ~annihilated
    reach = alive & src
    while True:
        grown = reach.copy()
        for i in range(n):
            grown |= np.where((reach >> np.uint32(i)) & np.uint32(1), adj[i], np.uint32(0))
        grown &= alive
        if np.array_equal(grown, reach):
            break
        reach = grown
    return (reach & snk) != 0


def _subset_closure(flags: np.ndarray, n: int) -> np.ndarray:
    """``out[M]``: some subset of ``M`` has the flag."""
    out = flags.copy().reshape((2,) * n)
    # axis n-1-i of the reshaped array is bit i of the mask
    for axis in range(n):
        view = np.moveaxis(out, axis, 0)
        view[1] |= view[0]
    return out.reshape(-1)


def _exact_witness(cfg: GeometricConfig) -> WitnessPair | None:
    n = cfg.n
    a = _all_subset_crossings(cfg, "LR")
    b = _all_subset_crossings(cfg, "BT")
    b_sub = _subset_closure(b, n)
    full = (1 << n) - 1
    masks = np.arange(1 << n)
    hits = np.flatnonzero(a & b_sub[full ^ masks])
    if hits.size == 0:
        return None
    K = int(hits[0])
    L = int(np.flatnonzero(b & ((masks & K) == 0))[0])
    bits = lambda m: frozenset(i for i in range(n) if m >> i & 1)
    return WitnessPair(bits(K), bits(L))


def _random_path(g: SurvivingGraph, cfg: GeometricConfig, direction: str,
                 rng: np.random.Generator) -> list[int] | None:
    """A shortest surviving source-to-sink path, ties broken at random."""
    src, snk = _ends(cfg.points, cfg.r, direction)
    alive = g.alive
    starts = np.flatnonzero(src & alive)
    if starts.size == 0:
        return None
    parent = np.full(cfg.n, -2)
    frontier = list(rng.permutation(starts))
    parent[frontier] = -1
    while frontier:
        nxt = []
        for v in frontier:
            if snk[v]:
                path = [v]
                while parent[path[-1]] >= 0:
                    path.append(parent[path[-1]])
                return [int(p) for p in path]
            for u in rng.permutation(np.flatnonzero(g.adjacency[v] & (parent == -2))):
                parent[u] = v
                nxt.append(u)
        frontier = nxt
    return None


def _heuristic_witness(cfg: GeometricConfig, restarts: int, seed: int) -> WitnessPair | None:
    rng = substream(seed)
    full = build_graph(cfg)
    everyone = frozenset(range(cfg.n))
    for attempt in range(restarts):
        first, second = ("LR", "BT") if attempt % 2 == 0 else ("BT", "LR")
        path = _random_path(full, cfg, first, rng)
        if path is None:
            if attempt % 2:
                return None
            continue
        K = frozenset(path)
        rest = everyone - K
        if restricted_crossing(cfg, K, first) and restricted_crossing(cfg, rest, second):
            return WitnessPair(K, rest) if first == "LR" else WitnessPair(rest, K)
    return None


def find_disjoint_witness(cfg: GeometricConfig, n_exact: int = N_EXACT, restarts: int = 8,
                          seed: int = 0) -> WitnessPair | None:
    """Disjoint index sets ``K`` (left-right) and ``L`` (bottom-top) whose own
    points produce both crossings.

    For ``n <= n_exact`` every subset is examined and a pair is returned
    exactly when one exists; ``K`` is then the smallest qualifying bitmask.
    Larger configurations use shortest-path restarts: a returned pair is
    always verified, but ``None`` only means none was found.
    """
    if cfg.n <= n_exact:
        return _exact_witness(cfg)
    return _heuristic_witness(cfg, restarts, seed)


def verify_witness(cfg: GeometricConfig, w: WitnessPair) -> bool:
    return (not w.K & w.L and restricted_crossing(cfg, w.K, "LR")
            and restricted_crossing(cfg, w.L, "BT"))


# -- thresholds and Monte Carlo --------------------------------------------

def annihilation_threshold(cfg: GeometricConfig):
    """``1 - (c/4) n^2 tau q^2``: thresholds ``s, t`` up to this value admit
    every configuration holding a disjoint witness into the lenient box.

    Exact (a Fraction) when ``q`` and ``c`` are rational and the norm is not
    L2.

    Raises
    ------
    ValueError
        If ``(c/4) n^2 tau q^2 >= 1``.
    """
    exact = cfg.norm != "l2" and all(isinstance(v, (int, Fraction)) for v in (cfg.q, cfg.c))
    c, q = (Fraction(cfg.c), Fraction(cfg.q)) if exact else (cfg.c, cfg.q)
    risk = c / 4 * cfg.n ** 2 * cfg.tau * q ** 2
    if risk >= 1:
        raise ValueError(f"(c/4) n^2 tau q^2 = {float(risk):g} is not below 1")
    return 1 - risk


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo proportion with a 95% Wilson score interval."""

    successes: int
    trials: int

    @property
    def value(self) -> float:
        return self.successes / self.trials

    @property
    def se(self) -> float:
        p = self.value
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def interval(self) -> tuple[float, float]:
        z = 1.959963984540054
        n, p = self.trials, self.value
        centre = (p + z * z / (2 * n)) / (1 + z * z / n)
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / (1 + z * z / n)
        return max(0.0, centre - half), min(1.0, centre + half)

    def as_dict(self) -> dict:
        lo, hi = self.interval
        return {"estimate": self.value, "successes": self.successes, "trials": self.trials,
                "se": self.se, "ci95": [lo, hi]}


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("BOXKIT_THREADS", "1") or 1)
    return max(1, workers if workers > 0 else (os.cpu_count() or 1))


def _chunks(total: int, size: int):
    return [range(lo, min(total, lo + size)) for lo in range(0, total, size)]


def _map(fn, chunks, workers):
    if workers == 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, chunks))


def conditional_mc(cfg: GeometricConfig, K, event: str = "LR", replicates: int = 10_000,
                   seed: int = 0, workers: int | None = None, chunk: int = 2_000) -> Estimate:
    """Probability of the full-model crossing given the points in ``K``.

    Points outside ``K`` are redrawn uniformly per replicate while ``X_K``
    stays fixed.
    """
    if replicates < 1:
        raise ValueError("need at least one replicate")
    if event not in DIRECTIONS:
        raise ValueError(f"event must be one of {DIRECTIONS}")
    keep = _members(cfg.n, K)
    free = np.flatnonzero(~keep)

    def run(block):
        pts = np.broadcast_to(cfg.points, (len(block), cfg.n, 2)).copy()
        for row, k in enumerate(block):
            pts[row, free] = substream(seed, k).random((free.size, 2))
        return int(_crossing_batch(pts, cfg.r, cfg.q, cfg.norm)[event].sum())

    hits = sum(_map(run, _chunks(replicates, chunk), _worker_count(workers)))
    return Estimate(hits, replicates)


@dataclass(frozen=True)
class ExperimentSummary:
    n: int
    r: float
    q: float
    norm: str
    seed: int
    p_A: Estimate
    p_B: Estimate
    p_AB: Estimate
    witness: Estimate

    @property
    def bkr_sigma(self) -> float:
        """Standard error of ``witness - p_A p_B`` (delta method, independent parts)."""
        a, b, w, N = self.p_A.value, self.p_B.value, self.witness.value, self.p_A.trials
        return math.sqrt((w * (1 - w) + b * b * a * (1 - a) + a * a * b * (1 - b)) / N)

    def as_dict(self) -> dict:
        return {
            "n": self.n, "r": self.r, "q": self.q, "norm": self.norm, "seed": self.seed,
            "p_A": self.p_A.as_dict(), "p_B": self.p_B.as_dict(),
            "p_AB": self.p_AB.as_dict(), "witness": self.witness.as_dict(),
            "bkr_sigma": self.bkr_sigma,
        }


def mc_experiment(n: int, r: float, q: float = 0.0, replicates: int = 2_000, seed: int = 0,
                  norm: str = "linf", workers: int | None = None,
                  n_exact: int = N_EXACT, restarts: int = 8, chunk: int = 500) -> ExperimentSummary:
    """Crossing and disjoint-witness frequencies over independent configurations."""

    def run(block):
        pts = np.stack([substream(seed, k).random((n, 2)) for k in block])
        cross = _crossing_batch(pts, r, q, norm)
        counts = np.zeros(4, dtype=np.int64)
        counts[0] = cross["LR"].sum()
        counts[1] = cross["BT"].sum()
        both = cross["LR"] & cross["BT"]
        counts[2] = both.sum()
        for row in np.flatnonzero(both):
            cfg = GeometricConfig(pts[row], r, q, norm)
            if find_disjoint_witness(cfg, n_exact, restarts, seed=block[row]) is not None:
                counts[3] += 1
        return counts

    totals = sum(_map(run, _chunks(replicates, chunk), _worker_count(workers)))
    est = [Estimate(int(c), replicates) for c in totals]
    return ExperimentSummary(n, r, q, norm, seed, *est)

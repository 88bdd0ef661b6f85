"""Diffusion multiscale graph correlation: the sweep over diffusion time,
the smoothed maximum, and the permutation test."""
from __future__ import annotations

import concurrent.futures
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import depcorr
from .config import METHODS, RunConfig
from .errors import DataError, ParameterError
from .graph import AdjacencyMatrix, adjacency, canonical_order, normalized_laplacian, symmetrize
from .spectral import (
    DistanceMatrix,
    ase_decomposition,
    decompose,
    diffusion_distance,
    diffusion_map,
    euclidean_distances,
    select_dimension,
)

DEFAULT_FALLBACK_T = 3


@dataclass(frozen=True)
class TimeStat:
    statistic: float
    k_star: Optional[int] = None
    l_star: Optional[int] = None


@dataclass(frozen=True)
class TSweepResult:
    stats: tuple[TimeStat, ...]
    t_star: int

    @property
    def statistic_at_star(self) -> float:
        return self.stats[self.t_star].statistic


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # not a pytest class

    method: str
    embedding: str
    statistic: float
    p_value: float
    t_star: Optional[int]
    q: Optional[int]
    k_star: Optional[int]
    l_star: Optional[int]
    permutations: int
    seed: int
    per_t: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_t"] = list(self.per_t)
        return out


def smoothed_max(stats: Sequence[float], fallback: int = DEFAULT_FALLBACK_T) -> int:
    """Index of the largest 3-point moving average of ``stats``.

    End points average over the neighbors that exist. When no average is
    positive, returns ``min(fallback, len(stats) - 1)``. Ties (up to a relative
    1e-12) resolve to the smallest index.
    """
    s = np.asarray(stats, dtype=float)
    if s.size == 0:
        raise ParameterError("smoothed_max needs at least one statistic")
    padded = np.concatenate(([0.0], s, [0.0]))
    counts = np.full(s.size, 3.0)
    counts[0] -= 1
    counts[-1] -= 1
    if s.size == 1:
        counts[0] = 1.0
    avg = (padded[:-2] + padded[1:-1] + padded[2:]) / counts
    # averages equal up to rounding count as tied
    tol = 1e-12 * max(1.0, float(np.max(np.abs(s))))
    best = int(np.flatnonzero(avg >= avg.max() - tol)[0])
    if avg[best] > 0:
        return best
    return min(fallback, s.size - 1)


class SweepEngine:
    """Precomputed state for repeatedly evaluating the sweep statistic under
    permutations of the attribute distances.

    Parameters
    ----------
    distances : sequence of DistanceMatrix or arrays
        Graph-side distances, one per diffusion time.
    d : DistanceMatrix or array
        Attribute distances.
    method : {"dmgc", "dcorr", "hhg"}
    """

    def __init__(self, distances, d, method: str = "dmgc", fallback: int = DEFAULT_FALLBACK_T):
        if method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}, got {method!r}")
        cs = [depcorr._as_array(c) for c in distances]
        if not cs:
            raise ParameterError("need at least one graph distance matrix")
        dv = depcorr._as_array(d)
        for c in cs:
            depcorr._check_pair(c, dv)
        self.method = method
        self.fallback = fallback
        self.n = dv.shape[0]
        if method == "hhg":
            if self.n < 3:
                raise ParameterError(f"HHG needs n >= 3, got n={self.n}")
            self._hcs = [depcorr.hhg_prepare(c) for c in cs]
            self._d = dv
        else:
            self._pcs = [depcorr.prepare(c) for c in cs]
            self._pd = depcorr.prepare(dv)
            self._dnorm = np.vdot(self._pd.centered, self._pd.centered)
            if method == "dcorr":
                self._cflat = np.stack([p.centered.ravel() for p in self._pcs])
                self._cnorm = np.array([np.vdot(p.centered, p.centered) for p in self._pcs])

    def _time_stats(self, perm: Optional[np.ndarray]) -> list[TimeStat]:
        if self.method == "hhg":
            hd = depcorr.hhg_prepare(self._d if perm is None else self._d[np.ix_(perm, perm)])
            return [TimeStat(depcorr._hhg_from_prepared(hc, hd)) for hc in self._hcs]
        pd = self._pd if perm is None else self._pd.permuted(perm)
        if self.method == "dcorr":
            cov = self._cflat @ pd.centered.ravel()
            dvar = self._dnorm
            return [TimeStat(depcorr._ratio(cv, cn, dvar)) for cv, cn in zip(cov, self._cnorm)]
        out = []
        for pc in self._pcs:
            vals = depcorr._local_values(pc, pd)
            out.append(TimeStat(*depcorr.mgc_statistic(vals, self.n)))
        return out

    def sweep(self, perm: Optional[np.ndarray] = None) -> TSweepResult:
        stats = tuple(self._time_stats(perm))
        t_star = smoothed_max([s.statistic for s in stats], self.fallback)
        return TSweepResult(stats=stats, t_star=t_star)

    def null_statistics(self, seed: int, indices) -> np.ndarray:
        return np.array([self.sweep(permutation_for(seed, b, self.n)).statistic_at_star
                         for b in indices])


def permutation_for(seed: int, index: int, n: int) -> np.ndarray:
    """The ``index``-th permutation of a run; depends only on ``(seed, index)``."""
    return np.random.default_rng([seed, index]).permutation(n)


def t_sweep(distances, d, method: str = "dmgc", fallback: int = DEFAULT_FALLBACK_T) -> TSweepResult:
    """Evaluate ``method`` at every diffusion time and pick ``t*`` by
    :func:`smoothed_max`."""
    return SweepEngine(distances, d, method, fallback).sweep()


def _null_chunk(engine: SweepEngine, seed: int, indices) -> np.ndarray:
    return engine.null_statistics(seed, indices)


def permutation_test(
    distances,
    d,
    method: str = "dmgc",
    r: int = 500,
    seed: int = 0,
    *,
    threads: int = 1,
    stop_alpha: Optional[float] = None,
    embedding: str = "diffusion",
    q: Optional[int] = None,
    fallback: int = DEFAULT_FALLBACK_T,
) -> TestReport:
    """Permutation p-value of the smoothed-maximum sweep statistic.

    Each permutation jointly permutes the rows and columns of ``d`` and
    recomputes the whole sweep, including the choice of ``t*`` and of the
    local scale. Permutation ``b`` is drawn from ``(seed, b)`` alone, so the
    result does not depend on ``threads``.

    ``p = (1 + #{null >= observed}) / (r + 1)``.

    Parameters
    ----------
    stop_alpha : float, optional
        Stop as soon as ``p < stop_alpha`` has become impossible. The reported
        p-value is then a lower bound that is still ``>= stop_alpha``, so
        reject/accept decisions at that level are exact. Ignored when
        ``threads > 1``.
    """
    if r < 1:
        raise ParameterError(f"number of permutations must be >= 1, got {r}")
    engine = SweepEngine(distances, d, method, fallback)
    observed = engine.sweep()
    obs = observed.statistic_at_star
    count = 0
    if threads > 1:
        chunks = np.array_split(np.arange(r), threads)
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_null_chunk, engine, seed, c.tolist()) for c in chunks if c.size]
            null = np.concatenate([f.result() for f in futures])
        count = int(np.count_nonzero(null >= obs))
    else:
        limit = math.inf if stop_alpha is None else stop_alpha * (r + 1) - 1
        for b in range(r):
            if engine.sweep(permutation_for(seed, b, engine.n)).statistic_at_star >= obs:
                count += 1
                if count >= limit:
                    break
    star = observed.stats[observed.t_star]
    return TestReport(
        method=method,
        embedding=embedding,
        statistic=float(obs),
        p_value=(1 + count) / (r + 1),
        t_star=observed.t_star if embedding == "diffusion" else None,
        q=q,
        k_star=star.k_star,
        l_star=star.l_star,
        permutations=r,
        seed=seed,
        per_t=tuple(float(s.statistic) for s in observed.stats),
    )


def graph_distances(a: AdjacencyMatrix, embedding: str = "diffusion", t_max: int = 10,
                    q: Optional[int] = None) -> tuple[list[np.ndarray], int]:
    """Graph-side distance matrices for a test.

    ``"diffusion"`` returns diffusion distances for ``t = 0..t_max``;
    ``"ase"`` returns the single adjacency-spectral-embedding distance. The
    dimension is the second profile-likelihood elbow of the absolute
    eigenvalues unless ``q`` is given.
    """
    k = symmetrize(a)
    if embedding == "diffusion":
        dec = decompose(normalized_laplacian(k))
    elif embedding == "ase":
        dec = ase_decomposition(k)
    else:
        raise ParameterError(f"unknown embedding {embedding!r}")
    if q is None:
        q = select_dimension(dec.eigenvalues)
    if q > dec.n:
        raise ParameterError(f"q={q} exceeds n={dec.n}")
    if embedding == "ase":
        coords = dec.eigenvectors[:, :q] * np.sqrt(np.abs(dec.eigenvalues[:q]))[None, :]
        return [euclidean_distances(coords)], q
    return [diffusion_distance(diffusion_map(dec, t, q)).values for t in range(t_max + 1)], q


def network_test(a, x, config: RunConfig = RunConfig(), *, stop_alpha: Optional[float] = None) -> TestReport:
    """Test independence between a graph and its nodal attributes.

    Runs symmetrization, the normalized Laplacian, eigendecomposition, the
    dimension choice, the distance sweep and the permutation test. Nodes are
    first put into a structure-derived order (see
    :func:`netdep.graph.canonical_order`) so that relabeling the input leaves
    the report unchanged.
    """
    if not isinstance(a, AdjacencyMatrix):
        a = adjacency(a)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != a.n:
        raise DataError(f"{x.shape[0]} attribute rows for {a.n} nodes")
    constant = bool(np.all(x == x[0]))
    if a.n < 4 and not (a.n == 3 and constant):
        raise DataError(f"need at least 4 nodes (3 with a constant attribute), got {a.n}")
    order = canonical_order(symmetrize(a), x)
    a = adjacency(a.weights[np.ix_(order, order)], warn=False)
    x = x[order]
    dists, q = graph_distances(a, config.embedding, config.t_max, config.q_override)
    if a.n < 4:
        # too small to center, but a constant attribute is exactly
        # uninformative: every permutation reproduces the statistic 0
        zeros = tuple(0.0 for _ in dists)
        diffusion = config.embedding == "diffusion"
        return TestReport(
            method=config.method, embedding=config.embedding, statistic=0.0, p_value=1.0,
            t_star=smoothed_max(zeros) if diffusion else None, q=q, k_star=None, l_star=None,
            permutations=config.permutations, seed=config.seed, per_t=zeros,
        )
    dx = depcorr.pairwise_euclidean(x)
    return permutation_test(
        dists, dx, config.method, config.permutations, config.seed,
        threads=config.threads, stop_alpha=stop_alpha, embedding=config.embedding, q=q,
    )

"""Distance-based dependence statistics.

Distance correlation with biased (double centering) or unbiased (U-centering)
estimators, the family of local distance correlations indexed by
nearest-neighbor ranks, the multiscale graph correlation that smooths and
maximizes that family, and the Heller-Heller-Gorfine pairwise statistic.

All functions accept either :class:`~netdep.spectral.DistanceMatrix` objects
or plain square arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import ndimage

from .errors import DataError, ParameterError
from .spectral import DistanceMatrix, euclidean_distances

Mode = Literal["unbiased", "biased"]

# distances are compared for ties after rounding to this relative resolution
_RANK_RESOLUTION = 1e10


@dataclass(frozen=True)
class CenteredMatrix:
    values: np.ndarray
    mode: str

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class RankMatrix:
    """``ranks[i, j]`` is the neighbor rank of node ``i`` as seen from node ``j``."""

    ranks: np.ndarray

    @property
    def n(self) -> int:
        return self.ranks.shape[0]


@dataclass(frozen=True)
class LocalCorrelationMap:
    """Local correlations for neighborhood sizes ``k = 1..kappa`` (rows) and
    ``l = 1..gamma`` (columns). ``values[k - 1, l - 1]`` holds ``dcorr^{kl}``."""

    values: np.ndarray

    @property
    def kappa(self) -> int:
        return self.values.shape[0]

    @property
    def gamma(self) -> int:
        return self.values.shape[1]

    @property
    def global_value(self) -> float:
        return float(self.values[-1, -1])


def _as_array(d) -> np.ndarray:
    v = d.values if isinstance(d, DistanceMatrix) else d
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ParameterError(f"distance matrix must be square, got shape {v.shape}")
    return v


def _check_pair(c: np.ndarray, d: np.ndarray) -> None:
    if c.shape != d.shape:
        raise ParameterError(f"dimension mismatch: {c.shape} vs {d.shape}")


def pairwise_euclidean(x) -> DistanceMatrix:
    """Euclidean distances between the rows of an ``n x p`` attribute matrix.

    A 1-d input is treated as ``n`` scalar observations.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DataError(f"attributes must be 1-d or 2-d, got {x.ndim}-d")
    if x.shape[0] < 2:
        raise DataError("need at least 2 observations")
    if not np.all(np.isfinite(x)):
        raise DataError("attributes contain non-finite values")
    vals = euclidean_distances(x)
    vals.setflags(write=False)
    return DistanceMatrix(values=vals)


def _u_center(v: np.ndarray) -> np.ndarray:
    n = v.shape[0]
    if n < 4:
        raise ParameterError(f"unbiased centering needs n >= 4, got n={n}")
    row = v.sum(axis=1)
    col = v.sum(axis=0)
    total = row.sum()
    out = v - row[:, None] / (n - 2) - col[None, :] / (n - 2) + total / ((n - 1) * (n - 2))
    np.fill_diagonal(out, 0.0)
    return out


def _double_center(v: np.ndarray) -> np.ndarray:
    return v - v.mean(axis=0)[None, :] - v.mean(axis=1)[:, None] + v.mean()


def center(d, mode: Mode = "unbiased") -> CenteredMatrix:
    """Center a distance matrix.

    ``"biased"`` computes ``H D H`` with ``H = I - J/n``. ``"unbiased"`` is the
    U-centering whose off-diagonal entries are
    ``D(i,j) - D(i,.)/(n-2) - D(.,j)/(n-2) + D(.,.)/((n-1)(n-2))`` and whose
    diagonal is zero.
    """
    v = _as_array(d)
    if mode == "unbiased":
        out = _u_center(v)
    elif mode == "biased":
        out = _double_center(v)
    else:
        raise ParameterError(f"unknown centering mode {mode!r}")
    out.setflags(write=False)
    return CenteredMatrix(values=out, mode=mode)


def _ratio(cov: float, var_c: float, var_d: float) -> float:
    if var_c <= 0 or var_d <= 0:
        return 0.0
    return float(cov / math.sqrt(var_c * var_d))


def dcorr(c, d, mode: Mode = "unbiased") -> float:
    """Sample distance correlation of two distance matrices.

    Returns 0 when either distance variance is not positive.
    """
    cv, dv = _as_array(c), _as_array(d)
    _check_pair(cv, dv)
    a = center(cv, mode).values
    b = center(dv, mode).values
    return _ratio(np.vdot(a, b), np.vdot(a, a), np.vdot(b, b))


def nearest_neighbor_ranks(d, ties: Literal["index", "dense"] = "index") -> RankMatrix:
    """Column-wise nearest-neighbor ranks.

    ``ranks[i, j] = k`` when node ``i`` is the ``k``-th nearest neighbor of
    node ``j``.

    Parameters
    ----------
    d : DistanceMatrix or array_like
    ties : {"index", "dense"}
        ``"index"`` gives node ``j`` rank 0 in its own column and breaks ties
        by node index, so each column is a permutation of ``0..n-1``.
        ``"dense"`` gives equal distances the same rank (0 for distance 0,
        then 1, 2, ... for successive distinct values). Dense ranks do not
        depend on node labels, which is what the local correlations need.
    """
    v = _as_array(d)
    n = v.shape[0]
    if ties == "index":
        idx = np.arange(n)
        ranks = np.empty((n, n), dtype=np.int64)
        for j in range(n):
            order = np.lexsort((idx, idx != j, v[:, j]))
            ranks[order, j] = idx
    elif ties == "dense":
        ranks = _dense_ranks(v)
    else:
        raise ParameterError(f"unknown tie rule {ties!r}")
    ranks.setflags(write=False)
    return RankMatrix(ranks=ranks)


def _dense_ranks(v: np.ndarray) -> np.ndarray:
    scale = float(np.max(v)) if v.size else 0.0
    if scale <= 0:
        return np.zeros(v.shape, dtype=np.int64)
    q = np.rint(v / scale * _RANK_RESOLUTION).astype(np.int64)
    order = np.argsort(q, axis=0, kind="stable")
    s = np.take_along_axis(q, order, axis=0)
    steps = np.zeros(q.shape, dtype=np.int64)
    steps[1:] = np.diff(s, axis=0) > 0
    ranks = np.empty_like(steps)
    np.put_along_axis(ranks, order, np.cumsum(steps, axis=0), axis=0)
    return ranks


@dataclass(frozen=True)
class PreparedDistance:
    """Everything the local correlations need from one distance matrix.

    ``cum_sum[k]`` and ``cum_var[k]`` are the sum and the mean-corrected sum
    of squares of the centered entries with rank at most ``k``. Permuting
    nodes only permutes ``centered`` and ``ranks``, so one preparation serves
    every permutation of a test.
    """

    centered: np.ndarray
    ranks: np.ndarray
    cum_sum: np.ndarray
    cum_var: np.ndarray

    @property
    def max_rank(self) -> int:
        return self.cum_var.size - 1

    def permuted(self, perm: np.ndarray) -> "PreparedDistance":
        ix = np.ix_(perm, perm)
        return PreparedDistance(self.centered[ix], self.ranks[ix], self.cum_sum, self.cum_var)


def prepare(d) -> PreparedDistance:
    v = _as_array(d)
    n = v.shape[0]
    centered = _u_center(v)
    ranks = _dense_ranks(v)
    bins = int(ranks.max()) + 1
    flat_r = ranks.ravel()
    cum_sum = np.cumsum(np.bincount(flat_r, weights=centered.ravel(), minlength=bins))
    cum_sq = np.cumsum(np.bincount(flat_r, weights=(centered * centered).ravel(), minlength=bins))
    return PreparedDistance(centered, ranks, cum_sum, cum_sq - cum_sum**2 / n**2)


def _local_values(pc: PreparedDistance, pd: PreparedDistance) -> np.ndarray:
    kappa, gamma = pc.max_rank, pd.max_rank
    if kappa == 0 or gamma == 0:
        # one side has a single distinct value: every correlation degenerates
        return np.zeros((max(kappa, 1), max(gamma, 1)))
    n = pc.centered.shape[0]
    width = gamma + 1
    cov = np.bincount((pc.ranks * width + pd.ranks).ravel(),
                      weights=(pc.centered * pd.centered).ravel(),
                      minlength=(kappa + 1) * width).reshape(kappa + 1, width)
    cov = cov.cumsum(axis=0).cumsum(axis=1)[1:, 1:]
    cov -= np.outer(pc.cum_sum[1:], pd.cum_sum[1:]) / n**2
    denom = pc.cum_var[1:, None] * pd.cum_var[None, 1:]
    out = np.zeros_like(cov)
    # relative floor: masked variances that vanish up to rounding are degenerate
    floor = 1e-14 * pc.cum_var[-1] * pd.cum_var[-1]
    ok = denom > floor
    out[ok] = cov[ok] / np.sqrt(denom[ok])
    return np.clip(out, -1.0, 1.0)


def local_correlation_map(c, d) -> LocalCorrelationMap:
    """All local distance correlations of ``c`` and ``d``.

    Entry ``(k, l)`` correlates the U-centered matrices restricted to pairs
    ``(i, j)`` where ``i`` is within the ``k`` nearest distinct distances of
    ``j`` under ``c`` and within the ``l`` nearest under ``d``. Each masked
    sum is corrected by the product of the masked means, which removes the
    positive bias that rank masks induce under independence; each side is
    normalized by its own masked, mean-corrected sum of squares. The last
    entry covers all pairs and equals :func:`dcorr`.
    """
    cv, dv = _as_array(c), _as_array(d)
    _check_pair(cv, dv)
    vals = _local_values(prepare(cv), prepare(dv))
    vals.setflags(write=False)
    return LocalCorrelationMap(values=vals)


def min_region_size(n: int, kappa: int, gamma: int) -> int:
    """Smallest significant region that is trusted over the global statistic."""
    return math.ceil(0.02 * n) * min(kappa, gamma)


def mgc_statistic(lmap: LocalCorrelationMap | np.ndarray, n: int) -> tuple[float, int, int]:
    """Multiscale graph correlation from a local correlation map.

    Entries above ``max(0, global, |most negative entry|)`` are significant.
    If the largest 4-connected group of significant entries has at least
    :func:`min_region_size` cells, the statistic is its maximum and the
    returned scale is where it occurs (first in row-major order). Otherwise
    the statistic is the global correlation at scale ``(kappa, gamma)``.

    Returns
    -------
    stat, k_star, l_star : float, int, int
        Scales are 1-based neighborhood sizes.
    """
    vals = lmap.values if isinstance(lmap, LocalCorrelationMap) else np.asarray(lmap)
    kappa, gamma = vals.shape
    glob = float(vals[-1, -1])
    neg = vals[vals < 0]
    tau = max(0.0, glob, float(-neg.min()) if neg.size else 0.0)
    sig = vals > tau
    if not sig.any():
        return glob, kappa, gamma
    labels, n_comp = ndimage.label(sig)
    sizes = np.bincount(labels.ravel())[1:]
    biggest = int(np.argmax(sizes)) + 1
    if sizes[biggest - 1] < min_region_size(n, kappa, gamma):
        return glob, kappa, gamma
    region = np.where(labels == biggest, vals, -np.inf)
    flat = int(np.argmax(region))
    k, l = divmod(flat, gamma)
    return float(vals[k, l]), k + 1, l + 1


def mgc(c, d) -> tuple[float, int, int]:
    """Convenience wrapper: local map followed by :func:`mgc_statistic`."""
    lmap = local_correlation_map(c, d)
    return mgc_statistic(lmap, _as_array(c).shape[0])


@dataclass(frozen=True)
class HHGPrepared:
    """Bit-packed comparison masks of one distance matrix.

    Bit ``k`` of ``bits[i, j]`` is set when ``v[i, k] <= v[i, j]``;
    ``below[i, j]`` counts those ``k`` other than ``i`` and ``j``.
    """

    bits: np.ndarray
    below: np.ndarray


def hhg_prepare(d) -> HHGPrepared:
    v = _as_array(d)
    n = v.shape[0]
    le = v[:, None, :] <= v[:, :, None]
    packed = np.packbits(le, axis=2)
    pad = (-packed.shape[2]) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros((n, n, pad), dtype=np.uint8)], axis=2)
    bits = np.ascontiguousarray(packed).view(np.uint64)
    # k = i (distance 0) and k = j always satisfy the comparison
    below = le.sum(axis=2) - 2
    return HHGPrepared(bits=bits, below=below)


def _hhg_from_prepared(pc: HHGPrepared, pd: HHGPrepared) -> float:
    n = pc.below.shape[0]
    m = n - 2
    a11 = np.bitwise_count(pc.bits & pd.bits).sum(axis=2, dtype=np.int64) - 2
    r1, c1 = pc.below, pd.below
    r2, c2 = m - r1, m - c1
    a12, a21 = r1 - a11, c1 - a11
    a22 = m - r1 - c1 + a11
    den = (r1 * r2).astype(float) * (c1 * c2).astype(float)
    num = (a12 * a21 - a11 * a22).astype(float) ** 2
    ok = den > 0
    np.fill_diagonal(ok, False)
    return float(np.sum(m * num[ok] / den[ok]))


def hhg_statistic(c, d) -> float:
    """Heller-Heller-Gorfine statistic.

    For every ordered pair ``(i, j)`` with ``i != j`` the other ``n - 2``
    points are cross-classified by ``C(i,k) <= C(i,j)`` and
    ``D(i,k) <= D(i,j)``; the Pearson chi-square of that 2x2 table is
    summed over pairs. Tables with an empty margin contribute 0.
    """
    cv, dv = _as_array(c), _as_array(d)
    _check_pair(cv, dv)
    if cv.shape[0] < 3:
        raise ParameterError(f"HHG needs n >= 3, got n={cv.shape[0]}")
    return _hhg_from_prepared(hhg_prepare(cv), hhg_prepare(dv))

"""Diffusion maps, diffusion distances, scree-plot elbows and adjacency
spectral embedding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import NumericalError, ParameterError
from .graph import AdjacencyMatrix, LaplacianMatrix


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full eigensystem sorted by descending ``|eigenvalue|``.

    Column ``j`` of ``eigenvectors`` pairs with ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]


@dataclass(frozen=True)
class DiffusionMap:
    t: int
    q: int
    coords: np.ndarray


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _eigh(m: np.ndarray) -> SpectralDecomposition:
    try:
        vals, vecs = linalg.eigh(m)
    except linalg.LinAlgError as exc:
        cond = np.linalg.cond(m) if np.all(np.isfinite(m)) else float("nan")
        raise NumericalError(
            f"symmetric eigensolver failed ({exc}); n={m.shape[0]}, "
            f"condition number={cond:.3g}, max|entry|={np.max(np.abs(m)):.3g}"
        ) from exc
    # |lambda| descending, then signed value descending, then original index
    order = np.lexsort((np.arange(vals.size), -vals, -np.abs(vals)))
    vals = vals[order]
    vecs = vecs[:, order]
    # first nonzero coordinate of each eigenvector made positive
    tol = 1e-12
    for j in range(vecs.shape[1]):
        nz = np.flatnonzero(np.abs(vecs[:, j]) > tol)
        if nz.size and vecs[nz[0], j] < 0:
            vecs[:, j] = -vecs[:, j]
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def decompose(lap: LaplacianMatrix) -> SpectralDecomposition:
    """Eigendecompose a normalized Laplacian.

    Eigenvalues are ordered by magnitude because dimension selection works
    on the absolute-eigenvalue scree plot. Eigenvector signs are fixed so that
    the first nonzero coordinate is positive.

    Raises
    ------
    NumericalError
        If the symmetric eigensolver does not converge.
    """
    return _eigh(np.asarray(lap.values, dtype=float))


def diffusion_map(d: SpectralDecomposition, t: int, q: int) -> DiffusionMap:
    """Coordinates ``U_i^t = (lambda_j^t phi_j(i))_{j <= q}``."""
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    if not 1 <= q <= d.n:
        raise ParameterError(f"q must satisfy 1 <= q <= n={d.n}, got {q}")
    coords = d.eigenvectors[:, :q] * (d.eigenvalues[:q] ** t)[None, :]
    coords.setflags(write=False)
    return DiffusionMap(t=int(t), q=int(q), coords=coords)


def euclidean_distances(points: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances between the rows of ``points``."""
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def diffusion_distance(u: DiffusionMap) -> DistanceMatrix:
    vals = euclidean_distances(np.asarray(u.coords))
    vals.setflags(write=False)
    return DistanceMatrix(values=vals)


def zhu_ghodsi_elbows(values, n_elbows: int = 2) -> list[int]:
    """Profile-likelihood elbows of a scree plot.

    Every split of the sequence into a leading and a trailing group is scored
    by a two-component Gaussian likelihood with a shared variance. With the
    maximum-likelihood variance the profile log-likelihood is a decreasing
    function of the pooled within-group sum of squares, so the best split is
    the one minimizing it. A split with zero pooled variance therefore always
    wins, and ties go to the smallest split.

    Parameters
    ----------
    values : array_like
        Nonincreasing, nonnegative scree values.
    n_elbows : int
        Number of elbows to locate. Each later elbow is searched on the tail
        that follows the previous one.

    Returns
    -------
    list of int
        Elbow positions counted from the start of ``values`` (an elbow ``c``
        means the first ``c`` values form the leading group). Fewer than
        ``n_elbows`` positions are returned when a tail is shorter than 2.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise ParameterError("need at least 2 values to locate an elbow")
    if n_elbows < 1:
        raise ParameterError(f"n_elbows must be >= 1, got {n_elbows}")
    if np.any(np.diff(v) > 1e-12 * max(1.0, float(np.max(np.abs(v))))):
        raise ParameterError("values must be sorted in nonincreasing order")
    elbows: list[int] = []
    offset = 0
    tail = v
    while len(elbows) < n_elbows and tail.size >= 2:
        c = _best_split(tail)
        offset += c
        elbows.append(offset)
        tail = tail[c:]
    return elbows


def _best_split(v: np.ndarray) -> int:
    p = v.size
    c = np.arange(1, p)
    csum = np.cumsum(v)
    csq = np.cumsum(v * v)
    total, total_sq = csum[-1], csq[-1]
    s1, q1 = csum[:-1], csq[:-1]
    s2, q2 = total - s1, total_sq - q1
    rss = (q1 - s1 * s1 / c) + (q2 - s2 * s2 / (p - c))
    scale = max(float(total_sq), 1e-300)
    # relative rounding so exact ties are not split by cancellation noise
    rss = np.round(np.maximum(rss, 0.0) / scale, 12)
    return int(c[np.argmin(rss)])


def select_dimension(eigenvalues, elbow: int = 2) -> int:
    """Embedding dimension from the ``elbow``-th elbow of the absolute scree
    plot, falling back to the last elbow found when the tail runs out."""
    absvals = np.sort(np.abs(np.asarray(eigenvalues, dtype=float)))[::-1]
    if absvals.size < 2:
        return 1
    elbows = zhu_ghodsi_elbows(absvals, n_elbows=elbow)
    return int(elbows[-1])


def adjacency_spectral_embedding(a: AdjacencyMatrix, q: int) -> np.ndarray:
    """Rows ``(sqrt|lambda_j| phi_j(i))_{j <= q}`` from the eigensystem of A."""
    if a.directed:
        raise ParameterError("adjacency_spectral_embedding expects a symmetric matrix")
    if not 1 <= q <= a.n:
        raise ParameterError(f"q must satisfy 1 <= q <= n={a.n}, got {q}")
    dec = _eigh(np.asarray(a.weights, dtype=float))
    coords = dec.eigenvectors[:, :q] * np.sqrt(np.abs(dec.eigenvalues[:q]))[None, :]
    coords.setflags(write=False)
    return coords


def ase_decomposition(a: AdjacencyMatrix) -> SpectralDecomposition:
    """Eigensystem of the adjacency matrix itself, same ordering as
    :func:`decompose`."""
    return _eigh(np.asarray(a.weights, dtype=float))

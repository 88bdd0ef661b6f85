"""Adjacency matrices and the degree-normalized graph Laplacian."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Nonnegative ``n x n`` edge-weight matrix.

    Self-loops are dropped on construction. ``directed`` records whether the
    weights are asymmetric.
    """

    weights: np.ndarray
    directed: bool

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class LaplacianMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


def adjacency(weights, *, warn: bool = True) -> AdjacencyMatrix:
    """Validate ``weights`` and wrap them as an :class:`AdjacencyMatrix`.

    Parameters
    ----------
    weights : array_like
        Square matrix of nonnegative finite edge weights.
    warn : bool
        Emit a warning when nonzero diagonal entries are discarded.
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DataError(f"adjacency must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise DataError("adjacency contains non-finite entries")
    if np.any(w < 0):
        raise DataError("adjacency contains negative weights")
    diag = np.diagonal(w)
    if np.any(diag != 0):
        if warn:
            warnings.warn(
                f"dropping {int(np.count_nonzero(diag))} self-loop(s)",
                stacklevel=2,
            )
        np.fill_diagonal(w, 0.0)
    w.setflags(write=False)
    return AdjacencyMatrix(weights=w, directed=not np.array_equal(w, w.T))


def symmetrize(a: AdjacencyMatrix) -> AdjacencyMatrix:
    """Return the kernel matrix ``(A + A^T) / 2``."""
    if not a.directed:
        return a
    k = (a.weights + a.weights.T) / 2.0
    k.setflags(write=False)
    return AdjacencyMatrix(weights=k, directed=False)


def normalized_laplacian(k: AdjacencyMatrix) -> LaplacianMatrix:
    """Compute ``B^{-1/2} K B^{-1/2}`` with ``B`` the degree matrix of ``K``.

    Entries touching a zero-degree node are set to 0.
    """
    w = k.weights
    if k.directed:
        raise DataError("normalized_laplacian expects a symmetric kernel; call symmetrize first")
    deg = w.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    lap = inv_sqrt[:, None] * w * inv_sqrt[None, :]
    # exact symmetry; the two products above can differ in the last ulp
    lap = (lap + lap.T) / 2.0
    lap.setflags(write=False)
    return LaplacianMatrix(values=lap)


def canonical_order(k: AdjacencyMatrix, x: np.ndarray | None = None) -> np.ndarray:
    """Node ordering that depends only on graph structure and attributes.

    Iterated color refinement (1-dimensional Weisfeiler-Lehman) starting from
    the attribute rows, refined by the multiset of (neighbor color, weight)
    pairs. Nodes are returned sorted by their final color. Nodes that refinement
    cannot tell apart keep their input order, so relabeling invariance is exact
    only when every final color class is a singleton.

    Returns
    -------
    order : ndarray of int
        Permutation such that ``w[order][:, order]`` is the canonical matrix.
    """
    w = k.weights
    n = w.shape[0]
    if x is None:
        init = [()] * n
    else:
        xa = np.asarray(x, dtype=float).reshape(n, -1)
        init = [tuple(row) for row in xa.tolist()]
    colors = _relabel(init)
    nbrs = [np.flatnonzero(w[i]) for i in range(n)]
    n_classes = len(set(colors))
    while True:
        sigs = [
            (colors[i], tuple(sorted(zip((colors[j] for j in nbrs[i]), w[i, nbrs[i]].tolist()))))
            for i in range(n)
        ]
        new = _relabel(sigs)
        new_classes = len(set(new))
        colors = new
        if new_classes == n_classes or new_classes == n:
            break
        n_classes = new_classes
    return np.array(sorted(range(n), key=lambda i: (colors[i], i)), dtype=int)


def _relabel(signatures):
    # map signatures to ranks in sorted order so ids do not depend on node order
    lookup = {s: c for c, s in enumerate(sorted(set(signatures)))}
    return [lookup[s] for s in signatures]

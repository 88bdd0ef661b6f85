"""Readers for edge lists and node-attribute tables, and the matching writers."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DataError, ParseError
from .graph import AdjacencyMatrix, adjacency


def load_edge_list(path, n: Optional[int] = None, *, binarize: bool = False,
                   one_indexed: bool = False, directed: bool = False) -> AdjacencyMatrix:
    """Read a whitespace-separated ``u v [w]`` edge list.

    Text after ``#`` is ignored. Missing weights are 1 and repeated edges are
    summed. Each line is an undirected edge unless ``directed`` is set, in
    which case it only fills entry ``(u, v)``. With ``binarize`` every present edge gets weight 1 in both
    directions. ``n`` fixes the node count; otherwise it is the largest id
    plus one.
    """
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(f"expected 'u v [w]', got {raw.strip()!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ParseError(f"non-numeric field in {raw.strip()!r}", lineno) from None
            if one_indexed:
                u, v = u - 1, v - 1
            if u < 0 or v < 0:
                raise DataError(f"line {lineno}: negative node id")
            if not math.isfinite(w) or w < 0:
                raise DataError(f"line {lineno}: weight must be finite and nonnegative, got {w}")
            if n is not None and max(u, v) >= n:
                raise DataError(f"line {lineno}: node id {max(u, v)} out of range for n={n}")
            edges.append((u, v, w, lineno))
    if n is None:
        n = 1 + max((max(u, v) for u, v, _, _ in edges), default=-1)
    if n == 0:
        raise DataError(f"{path}: no edges and no node count")
    w = np.zeros((n, n))
    for u, v, wt, _ in edges:
        w[u, v] += wt
        if not directed and u != v:
            w[v, u] += wt
    if binarize:
        b = w > 0
        w = (b | b.T).astype(float)
    return adjacency(w)


def load_attributes(path, n: Optional[int] = None, *, one_indexed: bool = False) -> np.ndarray:
    """Read a CSV with a header row, node id in the first column and numeric
    attributes in the rest. Rows are returned ordered by node id."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty attribute file") from None
        if len(header) < 2:
            raise DataError(f"{path}: need an id column and at least one attribute column")
        p = len(header) - 1
        rows: dict[int, list[float]] = {}
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not f.strip() for f in rec):
                continue
            if len(rec) != p + 1:
                raise DataError(f"{path} row {lineno}: expected {p + 1} fields, got {len(rec)}")
            try:
                node = int(rec[0])
            except ValueError:
                raise DataError(f"{path} row {lineno}: node id {rec[0]!r} is not an integer") from None
            if one_indexed:
                node -= 1
            try:
                vals = [float(f) for f in rec[1:]]
            except ValueError:
                raise DataError(f"{path} row {lineno}: non-numeric attribute in {rec!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataError(f"{path} row {lineno}: non-finite attribute")
            if node in rows:
                raise DataError(f"{path} row {lineno}: duplicate node id {rec[0]}")
            rows[node] = vals
    count = len(rows) if n is None else n
    if n is not None and len(rows) != n:
        raise DataError(f"{path}: {len(rows)} attribute rows for {n} nodes")
    missing = [i for i in range(count) if i not in rows]
    if missing:
        raise DataError(f"{path}: no attributes for node id {missing[0]}")
    return np.array([rows[i] for i in range(count)], dtype=float)


def write_edge_list(path, a: np.ndarray) -> None:
    iu, ju = np.nonzero(np.triu(a, k=1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {a.shape[0]} nodes\n")
        for i, j in zip(iu, ju):
            w = a[i, j]
            fh.write(f"{i} {j}\n" if w == 1 else f"{i} {j} {w!r}\n")


def write_attributes(path, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + [f"x{j + 1}" for j in range(x.shape[1])])
        for i, row in enumerate(x):
            writer.writerow([i] + [repr(float(v)) for v in row])

"""Random graphs with nodal attributes for power simulations.

Every sampler takes a :class:`numpy.random.Generator` and returns a
:class:`GraphSample` whose adjacency is binary, symmetric and hollow.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DataError, ParameterError


@dataclass(frozen=True)
class GraphSample:
    a: np.ndarray
    x: np.ndarray
    z: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.a.shape[0]


def make_rng(seed) -> np.random.Generator:
    """Generator for an integer seed or a sequence of integers (a derived seed)."""
    return np.random.default_rng(seed)


def bernoulli_graph(p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Symmetric hollow 0/1 matrix with independent upper-triangle edges."""
    n = p.shape[0]
    iu = np.triu_indices(n, k=1)
    a = np.zeros((n, n))
    a[iu] = rng.random(iu[0].size) < p[iu]
    return a + a.T


def _polluted_labels(z, p_true, n_labels, rng):
    # keep the true label w.p. p_true, otherwise one of the others uniformly
    keep = rng.random(z.size) < p_true
    shift = rng.integers(1, n_labels, size=z.size)
    return np.where(keep, z, (z + shift) % n_labels)


def sample_sbm_beta(n: int, beta: float, rng: np.random.Generator) -> GraphSample:
    """Three-block SBM: within 0.5, adjacent blocks 0.2, blocks 1 and 3 ``beta``.

    Attributes are the block label, kept with probability 0.5 and otherwise
    replaced by one of the two other labels with equal probability.
    """
    if not 0 < beta < 1:
        raise ParameterError(f"beta must lie in (0, 1), got {beta}")
    if n < 3:
        raise ParameterError(f"n must be >= 3, got {n}")
    z = rng.integers(0, 3, size=n)
    b = np.array([[0.5, 0.2, beta], [0.2, 0.5, 0.2], [beta, 0.2, 0.5]])
    a = bernoulli_graph(b[z[:, None], z[None, :]], rng)
    x = _polluted_labels(z, 0.5, 3, rng)
    return GraphSample(a=a, x=x.astype(float)[:, None], z=z)


def sample_sbm_3block(n: int, rng: np.random.Generator) -> GraphSample:
    return sample_sbm_beta(n, 0.4, rng)


def sample_dcsbm(n: int, tau: float, rng: np.random.Generator) -> GraphSample:
    """Two-block degree-corrected SBM with ``C_i ~ Uniform(1 - tau, 1 + tau)``.

    Edge probability ``0.2 C_i C_j`` within blocks and ``0.05 C_i C_j``
    between. The attribute equals the label with probability 0.6.
    """
    if not 0 <= tau <= 1:
        raise ParameterError(f"tau must lie in [0, 1], got {tau}")
    z = rng.integers(0, 2, size=n)
    c = rng.uniform(1 - tau, 1 + tau, size=n)
    p = np.where(z[:, None] == z[None, :], 0.2, 0.05) * np.outer(c, c)
    a = bernoulli_graph(p, rng)
    x = _polluted_labels(z, 0.6, 2, rng)
    return GraphSample(a=a, x=x.astype(float)[:, None], z=np.column_stack([z, c]))


def sample_nonpsd_sbm(n: int, eps: float, rng: np.random.Generator) -> GraphSample:
    """Two-block SBM with within-block probability ``0.5 - eps`` and between
    0.3; ``X_i ~ Bernoulli(Z_i / 3)``. Independent of the labels at eps = 0.2,
    not positive semi-definite for eps > 0.2."""
    if not 0 <= eps < 0.5:
        raise ParameterError(f"eps must lie in [0, 0.5), got {eps}")
    z = (rng.random(n) < 0.5).astype(int)
    p = np.where(z[:, None] == z[None, :], 0.5 - eps, 0.3)
    a = bernoulli_graph(p, rng)
    x = (rng.random(n) < z / 3.0).astype(float)
    return GraphSample(a=a, x=x[:, None], z=z)


def _rotated_square(n, rng, angle):
    u1 = rng.uniform(-1, 1, n)
    u2 = rng.uniform(-1, 1, n)
    w = u1 * np.cos(angle) + u2 * np.sin(angle)
    x = -u1 * np.sin(angle) + u2 * np.cos(angle)
    return w, x


def _rel_linear(n, rng, s):
    w = rng.uniform(0, 1, n)
    return w, w + s * rng.normal(0, 0.5, n)


def _rel_exponential(n, rng, s):
    w = rng.uniform(0, 3, n)
    return w, np.exp(w) + s * rng.normal(0, 5, n)


def _rel_cubic(n, rng, s):
    w = rng.uniform(0, 1, n)
    v = w - 0.5
    return w, 20 * v**3 + 2 * v**2 - v + s * rng.normal(0, 0.5, n)


def _rel_joint_normal(n, rng, s):
    cov = np.array([[0.7, 0.5], [0.5, 0.7]])
    wx = rng.multivariate_normal([0.0, 0.0], cov, size=n)
    return wx[:, 0], wx[:, 1]


def _rel_step(n, rng, s):
    w = rng.uniform(-1, 1, n)
    return w, (w > 0).astype(float) + s * rng.normal(0, 0.5, n)


def _rel_quadratic(n, rng, s):
    w = rng.uniform(-1, 1, n)
    return w, w**2 + s * rng.normal(0, 0.3, n)


def _rel_w_shape(n, rng, s):
    w = rng.uniform(-1, 1, n)
    return w, 4 * (w**2 - 0.5) ** 2


def _rel_spiral(n, rng, s):
    z = rng.uniform(0, 5, n)
    return z * np.cos(z * np.pi), z * np.sin(z * np.pi) + s * rng.normal(0, 0.1, n)


def _rel_bernoulli(n, rng, s):
    w = (rng.random(n) < 0.5).astype(float)
    sign = 2 * (rng.random(n) < 0.5) - 1
    return w, sign * w + s * rng.normal(0, 1, n)


def _rel_logarithm(n, rng, s):
    w = rng.uniform(-1, 1, n)
    return w, 5 * np.log2(np.abs(w)) + s * rng.normal(0, 5, n)


def _rel_fourth_root(n, rng, s):
    w = rng.uniform(0, 1, n)
    return w, np.abs(w + s * rng.normal(0, 0.5, n)) ** 0.25


def _rel_sine(period):
    def gen(n, rng, s):
        w = rng.uniform(-1, 1, n)
        return w, np.sin(period * w * np.pi) + s * rng.normal(0, 0.01, n)
    return gen


def _rel_square(n, rng, s):
    return _rotated_square(n, rng, -np.pi / 8)


def _rel_two_parabolas(n, rng, s):
    zt = (rng.random(n) < 0.3).astype(float)
    eps = rng.normal(0.5, 0.3, n) if s else np.full(n, 0.5)
    w = rng.uniform(0, 1, n)
    return w, (w**2 + eps) * (zt - 0.5)


def _rel_circle(n, rng, s):
    u = rng.uniform(-1, 1, n)
    return np.cos(u * np.pi), np.sin(u * np.pi) + s * rng.normal(0, 0.05, n)


def _rel_ellipse(n, rng, s):
    u = rng.uniform(-1, 1, n)
    return 5 * np.cos(u * np.pi), np.sin(u * np.pi)


def _rel_diamond(n, rng, s):
    return _rotated_square(n, rng, -np.pi / 4)


def _rel_multiplicative(n, rng, s):
    w = rng.normal(0.5, 1, n)
    eps = rng.normal(0.5, 1, n) if s else np.full(n, 0.5)
    return w, w * eps


def _rel_independence(n, rng, s):
    return rng.normal(0, 1, n), rng.uniform(0, 1, n)


RELATIONSHIPS: dict[int, tuple[str, Callable]] = {
    1: ("linear", _rel_linear),
    2: ("exponential", _rel_exponential),
    3: ("cubic", _rel_cubic),
    4: ("joint normal", _rel_joint_normal),
    5: ("step", _rel_step),
    6: ("quadratic", _rel_quadratic),
    7: ("w shape", _rel_w_shape),
    8: ("spiral", _rel_spiral),
    9: ("bernoulli", _rel_bernoulli),
    10: ("logarithm", _rel_logarithm),
    11: ("fourth root", _rel_fourth_root),
    12: ("sine 4pi", _rel_sine(4)),
    13: ("sine 16pi", _rel_sine(16)),
    14: ("square", _rel_square),
    15: ("two parabolas", _rel_two_parabolas),
    16: ("circle", _rel_circle),
    17: ("ellipse", _rel_ellipse),
    18: ("diamond", _rel_diamond),
    19: ("multiplicative noise", _rel_multiplicative),
    20: ("independence", _rel_independence),
}


def relationship(rid: int, n: int, rng: np.random.Generator, *, noise: bool = True):
    """Draw ``n`` i.i.d. pairs ``(w, x)`` from relationship ``rid`` (1..20).

    Normal noise parameters are standard deviations. With ``noise=False`` the
    additive noise terms are dropped (multiplicative and offset noise are
    replaced by their means), giving the population curve.
    """
    if rid not in RELATIONSHIPS:
        raise ParameterError(f"relationship id must be in 1..20, got {rid}")
    w, x = RELATIONSHIPS[rid][1](n, rng, 1.0 if noise else 0.0)
    return np.asarray(w, dtype=float), np.asarray(x, dtype=float)


def _minmax(v, what):
    lo, hi = v.min(), v.max()
    if hi == lo:
        raise DataError(f"{what} is constant; min-max scaling is undefined, draw again with another seed")
    return (v - lo) / (hi - lo)


def sample_rdpg(n: int, rid: int, rng: np.random.Generator) -> GraphSample:
    """Random dot product graph whose 1-d latent positions are the min-max
    scaled ``w`` of relationship ``rid``; the attribute is ``x`` scaled the
    same way. Edge ``(i, j)`` appears with probability ``W_i W_j``."""
    if n < 4:
        raise ParameterError(f"n must be >= 4, got {n}")
    w_raw, x_raw = relationship(rid, n, rng)
    w = _minmax(w_raw, "latent position")
    x = _minmax(x_raw, "attribute")
    a = bernoulli_graph(np.outer(w, w), rng)
    return GraphSample(a=a, x=x[:, None], z=w)


SCENARIOS = ("sbm3", "sbm-beta", "dcsbm", "rdpg", "nonpsd")


def sample_scenario(scenario: str, n: int, param, rng: np.random.Generator) -> GraphSample:
    if scenario == "sbm3":
        return sample_sbm_3block(n, rng)
    if scenario == "sbm-beta":
        return sample_sbm_beta(n, float(param), rng)
    if scenario == "dcsbm":
        return sample_dcsbm(n, float(param), rng)
    if scenario == "rdpg":
        return sample_rdpg(n, int(param), rng)
    if scenario == "nonpsd":
        return sample_nonpsd_sbm(n, float(param), rng)
    raise ParameterError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")

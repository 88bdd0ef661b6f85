import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netdep.errors import ParameterError
from netdep.graph import adjacency, normalized_laplacian
from netdep.simgen import make_rng, sample_sbm_3block, sample_sbm_beta
from netdep.spectral import (
    LaplacianMatrix,
    adjacency_spectral_embedding,
    decompose,
    diffusion_distance,
    diffusion_map,
    select_dimension,
    zhu_ghodsi_elbows,
)

from . import oracles

P3 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)


def p3_decomposition():
    return decompose(normalized_laplacian(adjacency(P3)))


def test_p3_eigenvalues():
    # characteristic polynomial of [[0,a,0],[a,0,a],[0,a,0]], a = 1/sqrt2: -x(x^2 - 2a^2)
    dec = p3_decomposition()
    np.testing.assert_allclose(dec.eigenvalues, [1.0, -1.0, 0.0], atol=1e-10)


def test_zero_matrix_eigenvalues():
    dec = decompose(LaplacianMatrix(np.zeros((4, 4))))
    np.testing.assert_array_equal(dec.eigenvalues, 0)


def test_decomposition_reconstructs_and_is_orthonormal():
    for seed in range(3):
        s = sample_sbm_3block(60, make_rng(seed))
        lap = normalized_laplacian(adjacency(s.a))
        dec = decompose(lap)
        phi, lam = dec.eigenvectors, dec.eigenvalues
        assert np.linalg.norm(phi @ np.diag(lam) @ phi.T - lap.values) < 1e-8
        np.testing.assert_allclose(phi.T @ phi, np.eye(60), atol=1e-8)
        assert np.all(np.diff(np.abs(lam)) <= 1e-12)
        first = phi[np.argmax(np.abs(phi) > 1e-12, axis=0), np.arange(60)]
        assert np.all(first > 0)


def test_p3_diffusion_map_t1():
    u = diffusion_map(p3_decomposition(), t=1, q=1)
    np.testing.assert_allclose(u.coords[:, 0], [0.5, math.sqrt(2) / 2, 0.5], atol=1e-12)


def test_t0_is_raw_eigenvectors():
    dec = p3_decomposition()
    np.testing.assert_array_equal(diffusion_map(dec, 0, 2).coords, dec.eigenvectors[:, :2])


def test_geometric_decay_in_t():
    s = sample_sbm_beta(50, 0.5, make_rng(1))
    dec = decompose(normalized_laplacian(adjacency(s.a)))
    assert abs(dec.eigenvalues[1]) < dec.eigenvalues[0]
    norms = [np.linalg.norm(diffusion_map(dec, t, 5).coords[:, 1:], axis=0) for t in range(6)]
    assert np.all(np.diff(np.array(norms), axis=0) < 0)


@pytest.mark.parametrize("t,q", [(0, 4), (-1, 1)])
def test_diffusion_map_parameter_errors(t, q):
    with pytest.raises(ParameterError):
        diffusion_map(p3_decomposition(), t, q)


def test_p3_diffusion_distance():
    c = diffusion_distance(diffusion_map(p3_decomposition(), 1, 1)).values
    assert c[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert c[0, 1] == pytest.approx(math.sqrt(2) / 2 - 0.5, abs=1e-12)
    assert c[1, 2] == pytest.approx(math.sqrt(2) / 2 - 0.5, abs=1e-12)


def test_distance_invariant_to_sign_flips_and_matches_oracle(rng):
    s = sample_sbm_3block(30, make_rng(2))
    dec = decompose(normalized_laplacian(adjacency(s.a)))
    u = diffusion_map(dec, 2, 6)
    c = diffusion_distance(u).values
    np.testing.assert_allclose(c, oracles.distances(u.coords), atol=1e-12)
    signs = rng.choice([-1.0, 1.0], size=6)
    flipped = type(u)(t=u.t, q=u.q, coords=u.coords * signs)
    np.testing.assert_allclose(diffusion_distance(flipped).values, c, atol=1e-12, rtol=0)
    assert np.all(np.diag(c) == 0) and np.array_equal(c, c.T)
    i, j, k = rng.integers(0, 30, size=(3, 200))
    assert np.all(c[i, k] <= c[i, j] + c[j, k] + 1e-12)


def test_duplicate_rows_zero_distance():
    from netdep.spectral import DiffusionMap
    u = DiffusionMap(t=0, q=2, coords=np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))
    assert diffusion_distance(u).values[0, 1] == 0


def test_diffusion_distance_relabeling():
    s = sample_sbm_beta(50, 0.6, make_rng(11))
    perm = make_rng(12).permutation(50)
    dec = decompose(normalized_laplacian(adjacency(s.a)))
    decp = decompose(normalized_laplacian(adjacency(s.a[np.ix_(perm, perm)])))
    gaps = np.abs(np.diff(np.abs(dec.eigenvalues[:8])))
    assert gaps.min() > 1e-6  # non-degenerate top of the spectrum
    for t in (0, 1, 3):
        c = diffusion_distance(diffusion_map(dec, t, 7)).values
        cp = diffusion_distance(diffusion_map(decp, t, 7)).values
        np.testing.assert_allclose(cp, c[np.ix_(perm, perm)], atol=1e-8)


@pytest.mark.parametrize("values", [(100, 1, 1, 1), (10, 9.8, 1.0, 0.9, 0.85, 0.8),
                                    (5, 4, 3, 2, 1), (3, 3, 3, 0.1, 0.1)])
def test_first_elbow_matches_likelihood_oracle(values):
    assert zhu_ghodsi_elbows(values, 1) == [oracles.profile_loglik_split(values)]


def test_first_elbow_values():
    assert zhu_ghodsi_elbows((100, 1, 1, 1), 1) == [1]
    assert zhu_ghodsi_elbows((10, 9.8, 1.0, 0.9, 0.85, 0.8), 1) == [2]
    assert zhu_ghodsi_elbows((2.0, 2.0, 2.0, 2.0), 1) == [1]


def test_second_elbow_is_recursive():
    v = np.array([10, 9.8, 5, 4.9, 4.8, 1, 0.9, 0.8])
    first = oracles.profile_loglik_split(v)
    second = first + oracles.profile_loglik_split(v[first:])
    assert zhu_ghodsi_elbows(v, 2) == [first, second]
    assert select_dimension(v) == second


def test_elbow_short_tail_and_errors():
    assert zhu_ghodsi_elbows((5, 1), 2) == [1]
    assert select_dimension([5.0, 1.0]) == 1
    with pytest.raises(ParameterError):
        zhu_ghodsi_elbows([1.0], 1)
    with pytest.raises(ParameterError):
        zhu_ghodsi_elbows([1.0, 2.0], 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=2, max_size=12))
def test_elbow_property(values):
    v = sorted(values, reverse=True)
    c = zhu_ghodsi_elbows(v, 1)[0]
    assert 1 <= c < len(v)
    expected = oracles.profile_loglik_split(v)
    if expected != c:
        # only near-ties may disagree; both splits must then be equally good
        def rss(k):
            g1, g2 = np.array(v[:k]), np.array(v[k:])
            return np.sum((g1 - g1.mean()) ** 2) + np.sum((g2 - g2.mean()) ** 2)
        assert rss(c) == pytest.approx(rss(expected), rel=1e-9, abs=1e-9 * max(1.0, np.sum(np.square(v))))


def test_ase_rank_one():
    from netdep.graph import AdjacencyMatrix
    v = np.array([1.0, 2.0, 3.0, 4.0])
    v /= np.linalg.norm(v)
    # built directly: the validating constructor would drop the diagonal of vv^T
    a = AdjacencyMatrix(weights=np.outer(v, v), directed=False)
    coords = adjacency_spectral_embedding(a, 1)[:, 0]
    np.testing.assert_allclose(coords, v, atol=1e-12)


def test_ase_separates_two_blocks():
    rng = make_rng(4)
    z = np.repeat([0, 1], 40)
    p = np.where(z[:, None] == z[None, :], 0.6, 0.1)
    from netdep.simgen import bernoulli_graph
    a = adjacency(bernoulli_graph(p, rng))
    x = adjacency_spectral_embedding(a, 2)
    centers = np.array([x[z == b].mean(0) for b in (0, 1)])
    own = np.linalg.norm(x - centers[z], axis=1)
    other = np.linalg.norm(x - centers[1 - z], axis=1)
    assert np.all(own < other)


def test_ase_full_rank_isometry():
    s = sample_sbm_3block(20, make_rng(3))
    a = adjacency(s.a)
    x = adjacency_spectral_embedding(a, 20)
    lam, vec = np.linalg.eigh(a.weights)
    y = vec * np.sqrt(np.abs(lam))
    np.testing.assert_allclose(oracles.distances(x), oracles.distances(y), atol=1e-10)
    with pytest.raises(ParameterError):
        adjacency_spectral_embedding(a, 21)

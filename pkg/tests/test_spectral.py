import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st

from spectral_bounds.errors import InputError, ResourceError
from spectral_bounds.generators import chain_of_cliques, random_weighted_graph
from spectral_bounds.graph_core import vertex_boundary
from spectral_bounds.spectral import (dirichlet_spectrum, full_spectrum, laplacian_apply, laplacian_matrix,
                                      partial_spectrum)

from conftest import graphs, path_graph


def dense_laplacian(g):
    W = g.dense_weights()
    return np.eye(g.n) - W / W.sum(axis=1, keepdims=True)


def dirichlet_oracle(g, omega):
    """Eigenvalues of the form (1/2) sum_{x,y in omega} |dphi|^2 mu_xy over phi vanishing on the boundary."""
    om = sorted(omega)
    free = sorted(set(om) - vertex_boundary(g, omega))
    W = g.dense_weights()
    n = len(free)
    Q = np.zeros((n, n))
    # assemble the quadratic form by polarization over unit vectors
    def form(phi_free):
        phi = np.zeros(g.n)
        phi[free] = phi_free
        return 0.5 * sum(W[x, y] * (phi[y] - phi[x]) ** 2 for x in om for y in om)
    E = np.eye(n)
    for i in range(n):
        for j in range(n):
            Q[i, j] = 0.25 * (form(E[i] + E[j]) - form(E[i] - E[j]))
    M = np.diag(g.degree[free])
    return sla.eigh(Q, M, eigvals_only=True)


def test_laplacian_examples(P2):
    assert np.allclose(laplacian_apply(P2, [1, -1]), [2, -2])
    g = random_weighted_graph(7, 0.5, seed=3)
    assert np.allclose(laplacian_apply(g, np.full(7, 3.2)), 0, atol=1e-14)


@given(graphs(), st.integers(0, 2**31 - 1))
def test_laplacian_matches_dense_oracle(g, seed):
    phi = np.random.default_rng(seed).normal(size=g.n)
    L = dense_laplacian(g)
    assert np.allclose(laplacian_apply(g, phi), L @ phi, atol=1e-12)
    assert np.allclose(laplacian_matrix(g).toarray(), L, atol=1e-14)


def test_full_spectrum_examples(P2, K4):
    assert np.allclose(full_spectrum(P2).eigenvalues, [0, 2], atol=1e-12)
    assert np.allclose(full_spectrum(K4).eigenvalues, [0, 4 / 3, 4 / 3, 4 / 3], atol=1e-12)


def test_full_spectrum_budget():
    with pytest.raises(ResourceError, match="partial"):
        full_spectrum(path_graph(30), budget=10)


def test_multiplets_are_reported_not_merged(K4):
    res = full_spectrum(K4)
    assert res.multiplets() == [[0], [1, 2, 3]]
    assert len(res.eigenvalues) == 4


@given(graphs())
def test_spectrum_invariants(g):
    res = full_spectrum(g)
    ev = res.eigenvalues
    N = g.n
    assert np.all(np.diff(ev) >= 0)
    assert abs(ev[0]) <= 1e-10
    assert ev[1] > 1e-10
    assert ev[-1] <= 2 + 1e-10
    assert ev[-1] >= N / (N - 1) - 1e-10
    assert (res.residuals <= 1e-8 * np.maximum(1, ev)).all()
    # mu-orthonormal eigenvectors, constant ground state
    V = res.eigenvectors
    assert np.allclose(V.T @ (g.degree[:, None] * V), np.eye(N), atol=1e-9)
    assert np.ptp(V[:, 0]) < 1e-9
    # sign convention: largest-magnitude entry positive (first one on near-ties)
    A = np.abs(V)
    idx = np.argmax(A >= A.max(axis=0) * (1 - 1e-9), axis=0)
    assert (V[idx, np.arange(N)] > 0).all()


@given(graphs(), st.floats(1e-3, 1e3))
def test_spectrum_scale_invariant(g, c):
    a = full_spectrum(g, vectors=False).eigenvalues
    b = full_spectrum(g.scaled(c), vectors=False).eigenvalues
    assert np.allclose(a, b, atol=1e-9)


def test_partial_spectrum_examples(P2, K4):
    assert partial_spectrum(K4, 1).eigenvalues[1] == pytest.approx(4 / 3, abs=1e-7)
    assert partial_spectrum(P2, 1).eigenvalues[1] == pytest.approx(2, abs=1e-7)
    g, _ = chain_of_cliques(8, 8, 3)
    assert np.allclose(partial_spectrum(g, 8).eigenvalues,
                       full_spectrum(g, vectors=False).eigenvalues[:9], atol=1e-7)


@pytest.mark.parametrize("seed", range(3))
def test_partial_spectrum_iterative_path(seed):
    g = random_weighted_graph(300, 0.02, seed=seed)
    part = partial_spectrum(g, 6)
    full = full_spectrum(g, vectors=False).eigenvalues[:7]
    assert np.allclose(part.eigenvalues, full, atol=1e-7)
    assert (part.residuals <= 1e-8 * np.maximum(1, part.eigenvalues)).all()


def test_dirichlet_examples(P3):
    # no boundary: constants are admissible
    assert dirichlet_spectrum(P3, range(3)).eigenvalues[0] == pytest.approx(0, abs=1e-12)
    # single free vertex 0: form phi0^2 * mu_01 against phi0^2 * mu(0) = 1
    res = dirichlet_spectrum(P3, {0, 1})
    assert tuple(res.free) == (0,)
    assert res.eigenvalues[0] == pytest.approx(dirichlet_oracle(P3, {0, 1})[0], abs=1e-12)
    assert res.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)


def test_dirichlet_needs_interior(P3):
    with pytest.raises(InputError):
        dirichlet_spectrum(P3, {1})


@given(graphs(n_min=3), st.integers(0, 2**31 - 1))
def test_dirichlet_matches_form_oracle(g, seed):
    rng = np.random.default_rng(seed)
    om = {x for x in range(g.n) if rng.random() < 0.7}
    if not om - vertex_boundary(g, om):
        return
    res = dirichlet_spectrum(g, om)
    assert np.allclose(res.eigenvalues, dirichlet_oracle(g, om), atol=1e-9)
    if vertex_boundary(g, om):
        assert res.eigenvalues[0] > 0


@given(graphs(n_min=4), st.integers(0, 2**31 - 1))
def test_dirichlet_monotone_under_inclusion(g, seed):
    rng = np.random.default_rng(seed)
    big = set(range(g.n)) - {int(rng.integers(g.n))}
    small = {x for x in big if rng.random() < 0.8}
    clamp = set(range(g.n)) - big
    # with a designated clamp, Omega = V; shrinking the free set can only raise eigenvalues
    if not big or not small:
        return
    a = dirichlet_spectrum(g, range(g.n), clamp=clamp).eigenvalues
    b = dirichlet_spectrum(g, range(g.n), clamp=set(range(g.n)) - small).eigenvalues
    m = len(b)
    assert (a[:m] <= b + 1e-9).all()


@given(graphs(n_min=4), st.integers(0, 2**31 - 1))
def test_dirichlet_monotone_nested_domains(g, seed):
    rng = np.random.default_rng(seed)
    outer = {x for x in range(g.n) if rng.random() < 0.85}
    inner = {x for x in outer if rng.random() < 0.8}
    if not inner - vertex_boundary(g, inner):
        return
    a = dirichlet_spectrum(g, outer).eigenvalues
    b = dirichlet_spectrum(g, inner).eigenvalues
    assert (a[:len(b)] <= b + 1e-9).all()

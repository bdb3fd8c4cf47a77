import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectral_bounds.errors import InputError, ResourceError
from spectral_bounds.generators import chain_of_cliques, random_weighted_graph
from spectral_bounds.graph_core import SubsetFamily, WeightedGraph, vertex_boundary
from spectral_bounds.multiway import (cheeger_induced, dirichlet_cheeger, expansion, multiway_constant,
                                      multiway_upper_bound_check, subset_tables)
from spectral_bounds.p_variational import rayleigh_p
from spectral_bounds.spectral import full_spectrum

from conftest import graphs, path_graph


def naive_expansion(g, A):
    W = g.dense_weights()
    A = set(A)
    cut = sum(W[x, y] for x in A for y in range(g.n) if y not in A)
    return cut / g.degree[list(A)].sum()


def naive_multiway(g, k, partition):
    """Brute force over labelings in {-1, 0..k}^V."""
    best = np.inf
    labels = range(0, k + 1) if partition else range(-1, k + 1)
    for lab in itertools.product(labels, repeat=g.n):
        lab = np.array(lab)
        if any(not (lab == a).any() for a in range(k + 1)):
            continue
        best = min(best, max(naive_expansion(g, np.flatnonzero(lab == a)) for a in range(k + 1)))
    return best


def two_triangles():
    return WeightedGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def test_expansion_examples(P2):
    g = random_weighted_graph(8, 0.5, seed=1)
    assert expansion(g, range(8)) == 0
    assert expansion(P2, [0]) == 1
    with pytest.raises(InputError):
        expansion(P2, [])


@given(graphs(), st.integers(0, 2**31 - 1), st.floats(0.01, 100))
def test_expansion_oracle_and_scaling(g, seed, c):
    rng = np.random.default_rng(seed)
    A = [x for x in range(g.n) if rng.random() < 0.5] or [0]
    assert expansion(g, A) == pytest.approx(naive_expansion(g, A), rel=1e-12)
    assert expansion(g.scaled(c), A) == pytest.approx(expansion(g, A), rel=1e-12)


@given(graphs(n_max=8))
def test_subset_tables_match_direct(g):
    vol, cut = subset_tables(g.dense_weights(), g.degree)
    for mask in range(1, 2 ** g.n, max(1, 2 ** g.n // 40)):
        A = [i for i in range(g.n) if mask >> i & 1]
        assert vol[mask] == pytest.approx(g.degree[A].sum(), rel=1e-12)
        if len(A) < g.n:
            assert cut[mask] / vol[mask] == pytest.approx(naive_expansion(g, A), rel=1e-12)


def test_multiway_examples(P2):
    prof = multiway_constant(P2, 1, partition_required=True)
    assert prof.value == 1
    assert sorted(sorted(s) for s in prof.family.sets) == [[0], [1]]
    assert multiway_constant(two_triangles(), 1).value == pytest.approx(1 / 7)


def test_multiway_limits():
    with pytest.raises(ResourceError):
        multiway_constant(path_graph(13), 1)
    with pytest.raises(ResourceError):
        multiway_constant(path_graph(6), 4)


@pytest.mark.parametrize("seed", range(6))
def test_multiway_matches_naive(seed):
    g = random_weighted_graph(6, 0.5, seed=seed)
    for k in (1, 2):
        for part in (False, True):
            prof = multiway_constant(g, k, partition_required=part)
            assert prof.value == pytest.approx(naive_multiway(g, k, part), rel=1e-12)
            # profile is recomputable
            assert prof.value == pytest.approx(max(naive_expansion(g, s) for s in prof.family.sets), rel=1e-12)


@given(graphs(n_min=4, n_max=9))
def test_multiway_orderings(g):
    I = [multiway_constant(g, k).value for k in (1, 2, 3)]
    assert I[0] <= I[1] + 1e-12 <= I[2] + 2e-12
    for k in (1, 2):
        assert I[k - 1] <= multiway_constant(g, k, partition_required=True).value + 1e-12
    assert multiway_constant(g, 1, partition_required=True).value == pytest.approx(I[0], abs=1e-12)
    # classical Cheeger lower bound, used as a cross-check only
    assert full_spectrum(g, vectors=False).eigenvalues[1] >= I[0] ** 2 / 8 - 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_heuristic_not_below_exhaustive(seed):
    g = random_weighted_graph(10, 0.35, seed=seed)
    for k in (1, 2):
        ex = multiway_constant(g, k).value
        he = multiway_constant(g, k, "heuristic", seed=seed).value
        assert he >= ex - 1e-12


def test_dirichlet_cheeger_single_interior_vertex():
    g = path_graph(5)
    # omega = {1, 2, 3} has the single interior vertex 2
    om = {1, 2, 3}
    phi = np.zeros(5)
    phi[2] = 1.0
    assert dirichlet_cheeger(g, om) == pytest.approx(rayleigh_p(g, phi, 1, "dirichlet", omega=om))


@given(graphs(n_min=4, n_max=9), st.integers(0, 2**31 - 1))
def test_dirichlet_cheeger_nested(g, seed):
    rng = np.random.default_rng(seed)
    outer = {x for x in range(g.n) if rng.random() < 0.9}
    inner = {x for x in outer if rng.random() < 0.8}
    if not inner - vertex_boundary(g, inner):
        return
    assert dirichlet_cheeger(g, inner) >= dirichlet_cheeger(g, outer) - 1e-12


def test_upper_bound_check_P2(P2):
    rep = multiway_upper_bound_check(P2, SubsetFamily(P2, [[0], [1]]))
    assert rep.passed
    assert rep.details["I_k"] == 1


def test_cover_inequality_on_chain():
    g, fam = chain_of_cliques(2, 3, 1)
    # partition covers: each block is one clique plus its half of the connector path
    blocks = [[0, 1, 2, 9], [3, 4, 5, 6, 7, 8, 10]]
    rep = multiway_upper_bound_check(g, SubsetFamily(g, [fam.sets[0], fam.sets[1], fam.sets[2]]), 2,
                                     covers=[blocks])
    assert rep.passed
    assert all(c["holds"] for c in rep.details["covers"])


def test_cheeger_induced_uses_half_volume():
    g = path_graph(4)
    # induced path 0-1-2-3 with ambient degrees; best S = {0, 1} or {2, 3}
    assert cheeger_induced(g, range(4)) == pytest.approx(1 / 3)


def test_profile_json(P2):
    js = multiway_constant(P2, 1).to_json()
    assert js["value"] == 1.0 and js["mode"] == "exhaustive"

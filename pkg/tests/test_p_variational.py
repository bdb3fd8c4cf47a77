import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectral_bounds.errors import InputError, ResourceError, SemanticsError
from spectral_bounds.graph_core import vertex_boundary
from spectral_bounds.multiway import multiway_constant
from spectral_bounds.p_variational import (PEstimate, brute_force_nu, is_median, median_poincare_check,
                                           nu_upper, rayleigh_p, sandwich_check, subspace_sup)
from spectral_bounds.spectral import full_spectrum
from spectral_bounds.verify import connected_atlas

from conftest import complete_graph, graphs, path_graph


def naive_rayleigh(g, phi, p, flavor, omega=None):
    W = g.dense_weights()
    mu = g.degree
    n = g.n
    if flavor == "dirichlet":
        inside = sorted(omega)
        num = sum(abs(phi[y] - phi[x]) ** p * W[x, y] for x in inside for y in inside)
        den = 2 * sum(abs(phi[x]) ** p * mu[x] for x in inside)
        return num / den
    num = sum(abs(phi[y] - phi[x]) ** p * W[x, y] for x in range(n) for y in range(n))
    if flavor == "neumann":
        mean = (phi * mu).sum() / mu.sum()
        den = 2 * sum(abs(phi[x] - mean) ** p * mu[x] for x in range(n))
    else:
        den = 2 * sum(abs(phi[x]) ** p * mu[x] for x in range(n))
    return num / den


# -- Rayleigh quotients -------------------------------------------------------

def test_rayleigh_examples(P2):
    assert rayleigh_p(P2, [1, -1], 2, "modified") == pytest.approx(2)
    with pytest.raises(InputError, match="neumann"):
        rayleigh_p(P2, [3, 3], 2, "neumann")
    with pytest.raises(InputError, match="modified"):
        rayleigh_p(P2, [0, 0], 2, "modified")


@given(graphs(n_min=3, n_max=8), st.sampled_from([1.0, 1.5, 3.0]), st.integers(0, 2**31 - 1))
def test_rayleigh_matches_double_loop(g, p, seed):
    rng = np.random.default_rng(seed)
    phi = rng.normal(size=g.n)
    for flavor in ("neumann", "modified"):
        assert rayleigh_p(g, phi, p, flavor) == pytest.approx(naive_rayleigh(g, phi, p, flavor), rel=1e-12)
    om = {x for x in range(g.n) if rng.random() < 0.7}
    free = om - vertex_boundary(g, om)
    if free:
        psi = np.zeros(g.n)
        psi[sorted(free)] = rng.normal(size=len(free))
        assert rayleigh_p(g, psi, p, "dirichlet", omega=om) == pytest.approx(
            naive_rayleigh(g, psi, p, "dirichlet", om), rel=1e-12)


def test_dirichlet_quotient_requires_vanishing_on_boundary(P3):
    with pytest.raises(InputError):
        rayleigh_p(P3, [1.0, 1.0, 0.0], 2, "dirichlet", omega={0, 1})


@given(graphs(n_min=3, n_max=8), st.floats(1.0, 4.0), st.floats(0.01, 100), st.floats(-5, 5),
       st.integers(0, 2**31 - 1))
def test_rayleigh_scale_and_shift_invariance(g, p, c, shift, seed):
    phi = np.random.default_rng(seed).normal(size=g.n)
    base = rayleigh_p(g, phi, p, "neumann")
    assert rayleigh_p(g, c * phi, p, "neumann") == pytest.approx(base, rel=1e-12)
    assert rayleigh_p(g, -c * phi, p, "modified") == pytest.approx(rayleigh_p(g, phi, p, "modified"), rel=1e-12)
    assert rayleigh_p(g, phi + shift, p, "neumann") == pytest.approx(base, rel=1e-10)


# -- nu_upper ------------------------------------------------------------------

def test_nu_upper_p2_exact(K4):
    est = nu_upper(K4, 1, 2)
    assert est.certification == "exact"
    assert est.value == pytest.approx(4 / 3, abs=1e-12)


def test_nu_upper_p15_matches_brute_force(P3):
    est = nu_upper(P3, 1, 1.5)
    bf = brute_force_nu(P3, 1, 1.5, "neumann", 9)
    assert est.certification == "certified_upper"
    # the grid misses the true optimum slightly; the continuous minimizer lands just below it
    assert abs(est.value - bf.value) <= 1e-3 * bf.value
    assert est.value <= bf.value + bf.resolution


@given(graphs(n_min=3, n_max=9), st.sampled_from([1.2, 1.5, 3.0]), st.integers(0, 100))
def test_certified_upper_witness_reproduces_value(g, p, seed):
    for flavor in ("neumann", "modified"):
        k = 1 if flavor == "neumann" else 0
        est = nu_upper(g, k, p, flavor, restarts=2, seed=seed)
        if est.certification != "certified_upper":
            continue
        phi = est.witness[:, 0]
        assert rayleigh_p(g, phi, p, flavor) == pytest.approx(est.value, rel=1e-9)


@given(graphs(n_min=4, n_max=9), st.integers(0, 100))
def test_dirichlet_certified_upper_is_quotient_of_witness(g, seed):
    rng = np.random.default_rng(seed)
    om = {x for x in range(g.n) if rng.random() < 0.8}
    if not om - vertex_boundary(g, om):
        return
    est = nu_upper(g, 1, 1.5, "dirichlet", omega=om, restarts=2, seed=seed)
    assert est.certification == "certified_upper"
    assert rayleigh_p(g, est.witness[:, 0], 1.5, "dirichlet", omega=om) == pytest.approx(est.value, rel=1e-9)


@given(graphs(n_min=3, n_max=10))
def test_p2_estimates_not_below_eigenvalue(g):
    lam = full_spectrum(g, vectors=False).eigenvalues
    for k in range(1, min(3, g.n - 1) + 1):
        for flavor in ("neumann", "modified"):
            est = nu_upper(g, k, 2, flavor)
            assert est.value >= lam[k] - 1e-8
            val, _, exact = subspace_sup(g, est.witness, 2, flavor)
            assert exact
            assert val == pytest.approx(est.value, rel=1e-9)


@given(graphs(n_min=4, n_max=8))
def test_modified_monotone_in_k_p2(g):
    vals = [nu_upper(g, k, 2, "modified").value for k in range(0, g.n)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_nu_upper_rejects_bad_inputs(P3):
    with pytest.raises(InputError):
        nu_upper(P3, 1, 0.5)
    with pytest.raises(InputError):
        nu_upper(P3, 5, 2)
    with pytest.raises(InputError):
        nu_upper(P3, 1, 2, "dirichlet")


def test_estimate_json_has_certification_and_witness(P3):
    js = nu_upper(P3, 1, 1.5).to_json()
    assert js["certification"] == "certified_upper"
    assert len(js["witness"]) == 1 and len(js["witness"][0]) == 3


# -- brute force oracle ----------------------------------------------------------

def test_brute_force_limits():
    with pytest.raises(ResourceError):
        brute_force_nu(path_graph(7), 1, 2)
    with pytest.raises(ResourceError):
        brute_force_nu(path_graph(4), 1, 2, grid_levels=11)


def test_brute_force_examples(P2, P3):
    bf = brute_force_nu(P3, 1, 2, "neumann", 5)
    assert bf.certification == "exact"
    assert abs(bf.value - 1.0) <= bf.resolution
    bf1 = brute_force_nu(P2, 1, 1.0, "neumann", 5)
    assert abs(bf1.value - multiway_constant(P2, 1).value) <= bf1.resolution + 1e-12


@pytest.mark.parametrize("gi", range(0, 30, 3))
def test_brute_force_p2_converges_to_eigensolver(gi):
    g = connected_atlas(4)[gi % len(connected_atlas(4))]
    lam = full_spectrum(g, vectors=False).eigenvalues[1]
    prev = None
    for L in (3, 5, 9):
        bf = brute_force_nu(g, 1, 2, "neumann", L)
        assert abs(bf.value - lam) <= bf.resolution + 1e-12
        assert bf.value >= lam - 1e-12
        if prev is not None:
            # nested grids: refining can only lower the value
            assert bf.value <= prev + 1e-12
        prev = bf.value


@pytest.mark.parametrize("p", [1.0, 1.5, 3.0])
def test_brute_force_refinement_bounded_by_resolution(p):
    g = complete_graph(3)
    vals = {L: brute_force_nu(g, 1, p, "neumann", L) for L in (5, 7, 9)}
    for a in (5, 7):
        for b in (7, 9):
            if b > a:
                assert vals[b].value <= vals[a].value + vals[a].resolution


def test_brute_force_dimension_two_modified(P3):
    lam = full_spectrum(P3, vectors=False).eigenvalues
    bf = brute_force_nu(P3, 1, 2, "modified", 5)
    assert abs(bf.value - lam[1]) <= bf.resolution + 1e-12


# -- sandwich ------------------------------------------------------------------

@given(graphs(n_min=3, n_max=10))
def test_sandwich_equality_at_p2(g):
    rep = sandwich_check(g, 1, 2)
    assert rep.passed
    assert rep.details["equality_relative_gap"] <= 1e-8


@pytest.mark.parametrize("p, factor", [(1.0, 2), (3.0, 8)])
def test_sandwich_factor_examples(p, factor):
    for g in connected_atlas(4)[:8]:
        if g.n < 3:
            continue
        rep = sandwich_check(g, 1, p)
        assert rep.status == "pass"
        assert rep.details["factor"] == factor


def test_sandwich_refuses_heuristic_pair():
    g = path_graph(5)
    a = PEstimate(1.0, 1.5, 2, "neumann", "heuristic")
    b = PEstimate(1.0, 1.5, 2, "modified", "heuristic")
    with pytest.raises(SemanticsError):
        sandwich_check(g, 2, 1.5, nu=a, nu_hat=b)


# -- median Poincare -------------------------------------------------------------

def test_median_examples(P2):
    assert median_poincare_check(P2, [2.0, 2.0], 2.0).details["lhs"] == 0
    rep = median_poincare_check(P2, [0.0, 1.0], 0.0)
    assert rep.passed and rep.details["rhs"] == pytest.approx(1.0)
    with pytest.raises(InputError):
        median_poincare_check(path_graph(3), [0.0, 1.0, 2.0], 0.0)


@given(graphs(n_min=2, n_max=7), st.integers(0, 2**31 - 1))
def test_median_poincare_every_median(g, seed):
    phi = np.round(np.random.default_rng(seed).normal(size=g.n), 1)
    I1 = multiway_constant(g, 1).value
    cands = sorted(set(phi.tolist()))
    cands += [(a + b) / 2 for a, b in zip(cands, cands[1:])]
    meds = [m for m in cands if is_median(g, phi, m)]
    assert meds
    for m in meds:
        assert median_poincare_check(g, phi, m, I1=I1).passed

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from spectral_bounds.bounds import (GH_CONSTANT, boundary_concentration_check, cgy_bound_continuous_form,
                                    cgy_bound_discrete, cgy_criterion, cgy_delta, compare_report, evaluate,
                                    gh_criterion, gozlan_herry_bound, gozlan_herry_family, lemma_chain_check,
                                    main_bound, main_bound_dirichlet, main_bound_terms, main_bound_value,
                                    search_best_family, verify_dirichlet, verify_main)
from spectral_bounds.errors import InputError, SemanticsError
from spectral_bounds.generators import MeshSpec, chain_of_cliques, mesh_domain_with_boundary, random_weighted_graph
from spectral_bounds.graph_core import SubsetFamily, WeightedGraph, normalize
from spectral_bounds.p_variational import PEstimate, nu_upper
from spectral_bounds.spectral import dirichlet_spectrum, full_spectrum

from conftest import path_graph


class FakeFamily:
    """Just the attributes the closed-form bounds read."""

    def __init__(self, measures, separation):
        self.relative_measures = np.asarray(measures, dtype=float)
        self.separation = separation

    def __len__(self):
        return len(self.relative_measures)


def star(leaf_weights):
    n = len(leaf_weights) + 1
    return WeightedGraph.from_edges(n, [(0, i + 1, w) for i, w in enumerate(leaf_weights)])


# -- main bound ------------------------------------------------------------------

def test_main_bound_quarter_quarter():
    # two leaves of mass 1 in a star of total mass 4, two hops apart
    g = star([1.0, 1.0])
    fam = SubsetFamily(g, [[1], [2]])
    assert fam.separation == 2
    assert main_bound(fam) == pytest.approx(1 + math.log(3), rel=1e-14)
    assert main_bound(SubsetFamily(normalize(g), [[1], [2]])) == pytest.approx(1 + math.log(3), rel=1e-14)


def test_main_bound_half_half():
    assert main_bound_value([0.5, 0.5], 1.0, 2) == pytest.approx(1.0, rel=1e-14)
    assert 2 / 2 * main_bound_terms(FakeFamily([0.5, 0.5], 2)).max() == pytest.approx(1.0)


def test_main_bound_errors(P2):
    with pytest.raises(InputError):
        main_bound(SubsetFamily(P2, [[0]]))
    with pytest.raises(InputError):
        main_bound_terms(FakeFamily([0.6, 0.5, 0.5], 1))


def test_main_bound_sound_on_chain():
    for L in (1, 2, 3):
        g, fam = chain_of_cliques(3, 4, L)
        rep = verify_main(fam)
        assert rep.passed
        assert rep.details["lhs"] == pytest.approx(math.sqrt(full_spectrum(g, vectors=False).eigenvalues[3]))


@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5), st.integers(0, 4), st.floats(1.0, 3.0))
def test_terms_monotone_under_enlargement(raw, idx, grow):
    m = np.array(raw) / (sum(raw) * 1.5)
    i = idx % len(m)
    bigger = m.copy()
    bigger[i] = min(m[i] * grow, m[i] + (1 - m.sum()) * 0.99)
    before = main_bound_terms(FakeFamily(m, 2))[i]
    after = main_bound_terms(FakeFamily(bigger, 2))[i]
    assert after <= before + 1e-12


# -- Dirichlet ----------------------------------------------------------------------

def test_dirichlet_bound_examples():
    g = path_graph(4)
    fam = SubsetFamily(g, [[2, 3]])
    assert fam.relative_measures[0] == pytest.approx(0.5)
    val = main_bound_dirichlet(fam, {0})
    assert val == pytest.approx(1 + math.log(2), rel=1e-14)
    assert main_bound_dirichlet(fam, {1}) == pytest.approx(2 * val, rel=1e-14)


def test_dirichlet_bound_square_mesh():
    g, B = mesh_domain_with_boundary(MeshSpec("square", 1 / 8))
    center = int(np.argmin(np.abs(g.positions - 0.5).sum(axis=1)))
    fam = SubsetFamily(g, [[center]])
    rep = verify_dirichlet(fam, B)
    assert rep.passed
    lam = dirichlet_spectrum(g, range(g.n), clamp=B, k=1).eigenvalues[0]
    assert rep.details["lhs"] == pytest.approx(math.sqrt(lam), rel=1e-10)


def test_dirichlet_bound_rejects_boundary_overlap():
    g = path_graph(4)
    with pytest.raises(InputError):
        main_bound_dirichlet(SubsetFamily(g, [[0, 1]]), {0})


def test_evaluate_dirichlet_report():
    g = path_graph(6)
    rep = evaluate(SubsetFamily(g, [[2, 3]]), 2, boundary={0, 5}, verify=True)
    assert rep.entries[0].name == "main-dirichlet"
    assert rep.verification["status"] == "pass"


# -- CGY ----------------------------------------------------------------------------

def test_cgy_delta_example():
    fam = FakeFamily([0.25, 0.25], 3)
    assert cgy_delta(fam) == pytest.approx(math.sqrt(3), rel=1e-14)
    d = cgy_delta(fam)
    assert (d - 1) / (d + 1) == pytest.approx(2 - math.sqrt(3), rel=1e-12)


def test_cgy_delta_limit():
    d = cgy_delta(FakeFamily([0.3, 0.3, 0.3], 50))
    assert 1 < d < 1.02
    assert (d - 1) / (d + 1) < 0.01
    assert d < cgy_delta(FakeFamily([0.3, 0.3, 0.3], 10))


def test_cgy_discrete_inapplicable_when_adjacent(P2):
    e = cgy_bound_discrete(SubsetFamily(P2, [[0], [1]]))
    assert not e.applicable and e.value is None
    assert "separation" in e.reason


def test_cgy_continuous_examples():
    assert cgy_bound_continuous_form(FakeFamily([0.5, 0.5], 1)).value == pytest.approx(1 + 2 * math.log(2))
    assert cgy_bound_continuous_form(FakeFamily([1 / math.e, 1 / math.e], 1)).value == pytest.approx(3.0)
    with pytest.raises(InputError):
        cgy_bound_continuous_form(FakeFamily([0.0, 0.5], 1))


def test_cgy_delta_on_chain_is_order_one():
    for k in (4, 8, 16):
        g, fam = chain_of_cliques(k, k, math.ceil(math.log(k)))
        d = cgy_delta(fam)
        # delta tends to e for large separations
        assert 1.5 < d < 2 * math.e


@given(st.lists(st.floats(0.005, 1.0), min_size=2, max_size=5), st.floats(1.01, 3.0), st.integers(1, 6))
def test_cgy_criterion_is_exact_condition(raw, spread, D):
    m = np.array(raw) / (sum(raw) * spread)
    fam = FakeFamily(m, D)
    main = 2 / D * main_bound_terms(fam).max()
    cg = cgy_bound_continuous_form(fam).value
    assume(not math.isclose(main, cg, rel_tol=1e-9))
    assert cgy_criterion(fam) == (main <= cg)


# -- Gozlan-Herry ---------------------------------------------------------------------

def test_gh_mass_condition_gate():
    e = gozlan_herry_bound(FakeFamily([0.5, 0.2, 0.2], 2))
    assert not e.applicable and e.value is None
    assert "mass condition" in e.reason


def test_gh_unit_ratio_gives_two_over_D():
    m1 = 0.6
    m0 = (1 - m1) / math.exp(GH_CONSTANT)
    e = gozlan_herry_bound(FakeFamily([m0, m1], 3))
    assert e.applicable
    assert e.value == pytest.approx(2 / 3, rel=1e-12)


def test_gh_criterion_flips_at_boundary_ratio():
    c = GH_CONSTANT
    m1 = 0.6
    r_star = math.exp(c / (1 - c))
    above = FakeFamily([(1 - m1) / (r_star * 1.001), m1], 2)
    below = FakeFamily([(1 - m1) / (r_star * 0.999), m1], 2)
    assert gh_criterion(above) and not gh_criterion(below)


@given(st.floats(0.5, 0.95), st.floats(0.01, 0.99), st.integers(1, 5))
def test_gh_criterion_is_exact_condition(m1, frac, D):
    m0 = (1 - m1) * frac
    fam = FakeFamily([m0, m1], D)
    main = 2 / D * main_bound_terms(fam).max()
    gh = gozlan_herry_bound(fam).value
    assume(not math.isclose(main, gh, rel_tol=1e-9))
    assert gh_criterion(fam) == (main <= gh)


def test_gozlan_herry_family_builds_complement():
    g = path_graph(9)
    fam = gozlan_herry_family(g, [[4]], 2)
    assert fam.sets[0] == {0, 1, 7, 8}
    with pytest.raises(InputError):
        gozlan_herry_family(g, [[4]], 4)


# -- comparison report ------------------------------------------------------------------

def test_compare_report_rows_and_table():
    g, fam = chain_of_cliques(4, 4, 2)
    rep = compare_report(fam)
    assert [e.name for e in rep.entries] == ["main", "cgy-continuous", "cgy-discrete", "gozlan-herry"]
    assert rep.verdicts["cgy_consistent"]
    table = rep.to_table()
    assert table.splitlines()[0].split()[:3] == ["bound", "applicable", "value"]
    js = rep.to_json()
    assert js["entries"][0]["value"] == pytest.approx(main_bound(fam))


def test_compare_report_values_recomputable():
    g, fam = chain_of_cliques(3, 3, 2)
    js = compare_report(fam).to_json()
    main = js["entries"][0]
    assert main_bound_value(main["inputs"]["measures"], 1.0, main["inputs"]["separation"]) == pytest.approx(
        main["value"], rel=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_cgy_discrete_sound_on_random_families(seed):
    rng = np.random.default_rng(seed)
    g = random_weighted_graph(12, 0.25, seed=seed)
    lam = full_spectrum(g, vectors=False).eigenvalues
    D = g.distance_matrix
    far = np.argwhere(D >= 2)
    x, y = far[rng.integers(len(far))]
    fam = SubsetFamily(g, [[int(x)], [int(y)]])
    e = cgy_bound_discrete(fam)
    assert lam[1] <= e.value + 1e-9


# -- boundary concentration and lemma chain ------------------------------------------

def test_boundary_concentration_square_inner_box():
    g, _ = mesh_domain_with_boundary(MeshSpec("square", 1 / 16))
    pos = g.positions
    om = set(np.flatnonzero((np.abs(pos - 0.5) <= 0.3 + 1e-9).all(axis=1)).tolist())
    est = nu_upper(g, 1, 2, "dirichlet", omega=om)
    rep = boundary_concentration_check(g, om, 2, est)
    assert rep.passed
    rows = rep.details["rows"]
    assert rows[-1]["lhs"] == 0
    assert any(r["trivial"] for r in rows) and rows[0]["rhs"] >= 1


def test_boundary_concentration_refuses_heuristic():
    g = path_graph(6)
    est = PEstimate(0.5, 2, 1, "dirichlet", "heuristic")
    with pytest.raises(SemanticsError):
        boundary_concentration_check(g, range(6), 2, est, clamp={0, 5})
    wrong = nu_upper(g, 1, 2, "neumann")
    with pytest.raises(SemanticsError):
        boundary_concentration_check(g, range(6), 2, wrong, clamp={0, 5})


def test_lemma_chain_on_chain_of_cliques():
    g, fam = chain_of_cliques(3, 4, 2)
    rep = lemma_chain_check(g, fam, 1)
    assert rep.passed
    for part in ("a", "b", "c"):
        assert rep.details[part]["margin"] >= -1e-9


def test_lemma_chain_single_set():
    g = path_graph(7)
    rep = lemma_chain_check(g, SubsetFamily(g, [[3]]), 1)
    assert rep.passed
    assert rep.details["a"]["nu_hat"] == pytest.approx(0, abs=1e-12)
    assert rep.details["a"]["nu_D_union"] > 0


def test_lemma_chain_requires_separation():
    g, fam = chain_of_cliques(2, 3, 1)
    with pytest.raises(InputError):
        lemma_chain_check(g, fam, 1)


# -- search -------------------------------------------------------------------------

def test_search_P2(P2):
    fam, rep = search_best_family(P2, 1, "exhaustive")
    assert sorted(sorted(s) for s in fam.sets) == [[0], [1]]
    assert rep.search["value"] == pytest.approx(2 * (1 + math.log(1)))


def test_chain_natural_family_vs_exhaustive():
    # The natural clique family is not optimal: the optimizer drops the
    # designated vertices to gain separation. Frozen exhaustive values.
    expected = {1: 1.252038698388137, 2: 1.0818992368953702}
    for L, best in expected.items():
        g, fam = chain_of_cliques(2, 3, L)
        _, rep = search_best_family(g, 2, "exhaustive")
        assert rep.search["value"] == pytest.approx(best, rel=1e-12)
        assert main_bound(fam) >= best
    assert main_bound(chain_of_cliques(2, 3, 1)[1]) / expected[1] == pytest.approx(1.1597, abs=1e-4)


def test_search_budget_flag():
    g = random_weighted_graph(12, 0.3, seed=5)
    _, rep = search_best_family(g, 2, "exhaustive", budget=10)
    assert rep.search["budget_exhausted"]


@pytest.mark.parametrize("mode", ["greedy", "anneal"])
def test_heuristics_never_beat_exhaustive(mode):
    for seed in range(50 if mode == "greedy" else 15):
        g = random_weighted_graph(10, 0.3, seed=seed)
        _, ex = search_best_family(g, 2, "exhaustive")
        _, h = search_best_family(g, 2, mode, budget=2000, seed=seed)
        assert h.search["value"] >= ex.search["value"] * (1 - 1e-12)


def test_anneal_deterministic():
    g = random_weighted_graph(20, 0.15, seed=3)
    a = search_best_family(g, 3, "anneal", budget=4000, seed=11)[1].to_json()
    b = search_best_family(g, 3, "anneal", budget=4000, seed=11)[1].to_json()
    assert a == b

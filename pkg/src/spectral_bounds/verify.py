"""Verification suites: seeded sweeps that check the bounds and lemmas numerically.

Every suite returns a JSON-ready dict with a ``status`` of ``pass``,
``fail`` or ``inconclusive``. Reports contain no timings, so equal seeds
give byte-identical output.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import networkx as nx
import numpy as np

from .bounds import (boundary_concentration_check, compare_report, lemma_chain_check, main_bound,
                     main_bound_terms)
from .generators import (MeshSpec, chain_of_cliques, inrad_check, mesh_Ma, mesh_Ma_spacing,
                         mesh_domain_with_boundary, random_weighted_graph)
from .graph_core import SubsetFamily, WeightedGraph, vertex_boundary
from .multiway import dirichlet_cheeger, multiway_constant, multiway_upper_bound_check
from .p_variational import brute_force_nu, nu_upper, sandwich_check, subspace_sup
from .reporting import FAIL, INCONCLUSIVE, PASS
from .spectral import dirichlet_spectrum, full_spectrum, partial_spectrum

SUITES = ("main", "dirichlet", "lemma", "sandwich", "spectrum", "ff", "multiway", "chain",
          "sharpness", "inrad")


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


# -- graph corpora ------------------------------------------------------------------

def random_corpus(count: int, seed: int, n_min: int = 3, n_max: int = 9):
    """Seeded random connected weighted graphs with sizes in [n_min, n_max]."""
    ss = np.random.SeedSequence(seed)
    out = []
    for child in ss.spawn(count):
        rng = np.random.default_rng(child)
        n = int(rng.integers(n_min, n_max + 1))
        prob = float(rng.uniform(0.25, 0.7))
        dist = ["unit", "uniform", "exponential"][int(rng.integers(3))]
        out.append(random_weighted_graph(n, prob, dist, seed=int(rng.integers(2**31))))
    return out


def small_generator_instances(max_v: int = 9):
    """Generator outputs with at most ``max_v`` vertices."""
    out = []
    for k, cs, L in [(1, 2, 1), (1, 3, 1), (1, 2, 2), (1, 3, 2), (2, 2, 1), (1, 2, 3), (1, 4, 1)]:
        g, _ = chain_of_cliques(k, cs, L)
        if g.n <= max_v:
            out.append(g)
    g, _ = mesh_domain_with_boundary(MeshSpec("square", 0.5, boundary="neumann"))
    out.append(g)
    g, _ = mesh_domain_with_boundary(MeshSpec("rectangle", 0.5, width=1.0, height=0.5, boundary="neumann"))
    out.append(g)
    return [g for g in out if g.n <= max_v]


def sparse_random_graph(n: int, extra: int, weighted: bool, rng) -> WeightedGraph:
    """Uniform random labeled tree plus ``extra`` random chords; large diameters."""
    T = nx.random_labeled_tree(n, seed=int(rng.integers(2**31)))
    edges = set(tuple(sorted(e)) for e in T.edges())
    tries = 0
    while len(edges) < n - 1 + extra and tries < 20 * (extra + 1):
        tries += 1
        x, y = sorted(int(v) for v in rng.choice(n, 2, replace=False))
        edges.add((x, y))
    edges = sorted(edges)
    ws = rng.uniform(0.1, 1.0, len(edges)) if weighted else np.ones(len(edges))
    return WeightedGraph.from_edges(n, [(x, y, float(w)) for (x, y), w in zip(edges, ws)])


@lru_cache(maxsize=None)
def connected_atlas(max_v: int = 5):
    """All connected graphs with 2..max_v vertices, unit weights (networkx atlas)."""
    out = []
    for G in nx.graph_atlas_g():
        if 2 <= G.number_of_nodes() <= max_v and nx.is_connected(G):
            out.append(WeightedGraph.from_edges(G.number_of_nodes(), list(G.edges())))
    return tuple(out)


# -- family enumeration ---------------------------------------------------------------

def enumerate_labelings(n: int, m: int, allowed=None) -> np.ndarray:
    """All labelings V -> {-1, 0..m-1} using every label, in canonical order.

    Label -1 leaves a vertex out; labels first appear in increasing order,
    so each unordered family of m disjoint nonempty sets appears once.
    ``allowed`` (bool mask) restricts which vertices may carry a label.
    """
    free = np.arange(n) if allowed is None else np.flatnonzero(allowed)
    nf = free.size
    if nf < m:
        return np.empty((0, n), dtype=np.int8)
    base = m + 1
    codes = np.arange(base ** nf, dtype=np.int64)
    digits = np.empty((codes.size, nf), dtype=np.int8)
    for i in range(nf):
        digits[:, i] = codes % base
        codes //= base
    lab = digits.astype(np.int8) - 1
    # canonical: first occurrence of label a precedes that of a+1, and all used
    first = np.full((lab.shape[0], m), nf, dtype=np.int64)
    for a in range(m):
        hit = lab == a
        anyhit = hit.any(axis=1)
        first[:, a] = np.where(anyhit, hit.argmax(axis=1), nf)
    ok = (first < nf).all(axis=1)
    if m > 1:
        ok &= (np.diff(first, axis=1) > 0).all(axis=1)
    lab = lab[ok]
    out = np.full((lab.shape[0], n), -1, dtype=np.int8)
    out[:, free] = lab
    return out


def _separations(lab: np.ndarray, dist: np.ndarray) -> np.ndarray:
    n = lab.shape[1]
    D = np.full(lab.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    for x in range(n):
        for y in range(x + 1, n):
            c = (lab[:, x] >= 0) & (lab[:, y] >= 0) & (lab[:, x] != lab[:, y])
            np.minimum(D, np.where(c, dist[x, y], D), out=D)
    return D


def _to_boundary(lab: np.ndarray, dB: np.ndarray) -> np.ndarray:
    d = np.where(lab >= 0, dB[None, :], np.iinfo(np.int64).max)
    return d.min(axis=1)


def _masses(lab: np.ndarray, mass: np.ndarray, m: int) -> np.ndarray:
    return np.stack([((lab == a) * mass).sum(axis=1) for a in range(m)], axis=1)


def _bound_values(masses: np.ndarray, total: float, D: np.ndarray) -> np.ndarray:
    rel = masses / total
    rest = 1.0 - (rel.sum(axis=1, keepdims=True) - rel)
    return 2.0 / D * (1.0 + np.log(rest / rel)).max(axis=1)


def _cgy_values(rel: np.ndarray, D: np.ndarray, lam_max: float) -> np.ndarray:
    """CGY bound ((delta-1)/(delta+1)) lambda_max per family; inf when D <= 1."""
    m = rel.shape[1]
    worst = np.zeros(rel.shape[0])
    for a in range(m):
        for b in range(a + 1, m):
            worst = np.maximum(worst, (1 - rel[:, a]) * (1 - rel[:, b]) / (rel[:, a] * rel[:, b]))
    out = np.full(rel.shape[0], np.inf)
    ok = D > 1
    delta = worst[ok] ** (1.0 / (2.0 * (D[ok] - 1)))
    out[ok] = (delta - 1) / (delta + 1) * lam_max
    return out


# -- suites -----------------------------------------------------------------------

def suite_main(seed: int = 7, n_graphs: int = 300, max_v: int = 9, ks=(1, 2), min_sep: int = 2,
               tol: float = 1e-9) -> dict:
    """Exhaustive check of lambda_k^{1/2} <= main bound over all families with D >= min_sep."""
    graphs = random_corpus(n_graphs, seed, 3, max_v) + small_generator_instances(max_v)
    families = violations = cgy_families = cgy_violations = 0
    worst = math.inf
    first_bad = None
    for gi, g in enumerate(graphs):
        lam = full_spectrum(g, vectors=False).eigenvalues
        dist = g.distance_matrix
        for k in ks:
            if k + 1 > g.n:
                continue
            lab = enumerate_labelings(g.n, k + 1)
            D = _separations(lab, dist)
            keep = D >= min_sep
            if not keep.any():
                continue
            lab, D = lab[keep], D[keep]
            masses = _masses(lab, g.degree, k + 1)
            vals = _bound_values(masses, g.volume, D)
            lhs = math.sqrt(max(lam[k], 0.0))
            margins = vals - lhs
            families += vals.size
            cgy = _cgy_values(masses / g.volume, D, lam[-1])
            cgy_families += int(np.isfinite(cgy).sum())
            cgy_violations += int((lam[k] > cgy + tol).sum())
            bad = margins < -tol
            violations += int(bad.sum())
            worst = min(worst, float(margins.min()))
            if bad.any() and first_bad is None:
                i = int(np.argmax(bad))
                first_bad = {"graph": gi, "k": k, "labels": lab[i].tolist(), "lhs": lhs, "rhs": float(vals[i])}
    return {"suite": "main", "status": _status(violations == 0), "graphs": len(graphs),
            "families": families, "violations": violations, "min_margin": worst,
            "first_violation": first_bad,
            "cgy": {"families": cgy_families, "violations": cgy_violations}}


def suite_dirichlet(seed: int = 7, n_graphs: int = 300, max_v: int = 9, ms=(1, 2, 3), min_sep: int = 2,
                    tol: float = 1e-9) -> dict:
    """Exhaustive check of the Dirichlet transplant with a random designated boundary."""
    graphs = random_corpus(n_graphs, seed + 1, 3, max_v) + small_generator_instances(max_v)
    rng = np.random.default_rng(seed)
    families = violations = 0
    worst = math.inf
    first_bad = None
    for gi, g in enumerate(graphs):
        size = int(rng.integers(1, max(2, g.n // 2) + 1))
        B = frozenset(rng.choice(g.n, size=min(size, g.n - 1), replace=False).tolist())
        dB = g.hop_distances(B)
        allowed = dB >= min_sep
        nfree = g.n - len(B)
        dist = g.distance_matrix
        spec = dirichlet_spectrum(g, range(g.n), clamp=B)
        for m in ms:
            if allowed.sum() < m or m > nfree:
                continue
            lab = enumerate_labelings(g.n, m, allowed)
            if lab.shape[0] == 0:
                continue
            Db = _to_boundary(lab, dB)
            if m >= 2:
                Db = np.minimum(Db, _separations(lab, dist))
            keep = Db >= min_sep
            lab, Db = lab[keep], Db[keep]
            if lab.shape[0] == 0:
                continue
            vals = _bound_values(_masses(lab, g.degree, m), g.volume, Db)
            lhs = math.sqrt(max(spec.eigenvalues[m - 1], 0.0))
            margins = vals - lhs
            families += vals.size
            bad = margins < -tol
            violations += int(bad.sum())
            worst = min(worst, float(margins.min()))
            if bad.any() and first_bad is None:
                i = int(np.argmax(bad))
                first_bad = {"graph": gi, "m": m, "boundary": sorted(B), "labels": lab[i].tolist(),
                             "lhs": lhs, "rhs": float(vals[i])}
    return {"suite": "dirichlet", "status": _status(violations == 0), "graphs": len(graphs),
            "families": families, "violations": violations, "min_margin": worst,
            "first_violation": first_bad}


def _random_connected_subset(g, rng, size):
    start = int(rng.integers(g.n))
    S = {start}
    frontier = set(g.neighbors(start).tolist())
    while len(S) < size and frontier:
        x = int(rng.choice(sorted(frontier)))
        S.add(x)
        frontier |= set(g.neighbors(x).tolist())
        frontier -= S
    return frozenset(S)


def suite_lemma(seed: int = 7, n_configs: int = 200, tol: float = 1e-9) -> dict:
    """Parts (a)-(c) of the lemma chain plus boundary concentration at every radius."""
    rng = np.random.default_rng(seed)
    counts = {"a": 0, "b": 0, "c": 0, "concentration": 0}
    fails = {"a": 0, "b": 0, "c": 0, "concentration": 0}
    worst = {"a": math.inf, "b": math.inf, "c": math.inf, "concentration": math.inf}
    done = attempts = nontrivial_rows = 0
    while done < n_configs and attempts < 50 * n_configs:
        attempts += 1
        n = int(rng.integers(8, 31))
        g = sparse_random_graph(n, int(rng.integers(0, n // 2 + 1)), bool(rng.integers(2)), rng)
        dist = g.distance_matrix
        k = int(rng.integers(0, 3))
        r = int(rng.integers(1, 3))
        # pick k+1 centers pairwise more than 2r apart, grow each a little inside its r-ball
        centers = []
        for x in rng.permutation(g.n):
            if all(dist[x, c] > 2 * r for c in centers):
                centers.append(int(x))
            if len(centers) == k + 1:
                break
        if len(centers) < k + 1:
            continue
        sets = []
        for c in centers:
            near = np.flatnonzero(dist[c] <= int(rng.integers(0, 2)))
            near = [int(x) for x in near if all(dist[x, o] > 2 * r + 1 for o in centers if o != c)]
            sets.append(sorted(set(near) | {c}))
        fam = SubsetFamily(g, sets)
        if len(fam) >= 2 and not 2 * r < fam.separation:
            continue
        rep = lemma_chain_check(g, fam, r, 2, seed=int(rng.integers(2**31)), tol=tol)
        d = rep.details
        for part in ("a", "b"):
            counts[part] += 1
            mg = d[part]["margin"]
            worst[part] = min(worst[part], mg)
            if mg < -tol * max(1.0, d["a"]["nu_hat"]):
                fails[part] += 1
        counts["c"] += 1
        if "margin" in d["c"]:
            worst["c"] = min(worst["c"], d["c"]["margin"])
            if d["c"]["margin"] < -tol:
                fails["c"] += 1
        # boundary concentration on a random connected domain
        size = int(rng.integers(3, g.n + 1))
        om = _random_connected_subset(g, rng, size)
        bd = vertex_boundary(g, om)
        if bd and om - bd:
            est = nu_upper(g, 1, 2, "dirichlet", omega=om)
            bc = boundary_concentration_check(g, om, 2, est)
            counts["concentration"] += 1
            nontrivial_rows += sum(not row["trivial"] for row in bc.details["rows"])
            worst["concentration"] = min(worst["concentration"], bc.details["min_margin"])
            if not bc.passed:
                fails["concentration"] += 1
        done += 1
    ok = done == n_configs and not any(fails.values())
    return {"suite": "lemma", "status": _status(ok), "configurations": done, "checks": counts,
            "nontrivial_concentration_rows": nontrivial_rows,
            "failures": fails, "min_margin": worst}


def suite_sandwich(seed: int = 7, n_graphs: int = 100, ps=(1.0, 1.5, 3.0), max_v: int = 5,
                   grid_levels: int = 5, k: int = 1) -> dict:
    """nu_{k,2} = hat nu_{k,2} on random graphs; brute-force sandwich at p != 2 on the atlas."""
    graphs = random_corpus(n_graphs, seed + 2, 3, 12)
    worst_rel = 0.0
    eq_fail = 0
    worst_witness = 0.0
    for g in graphs:
        for kk in range(1, min(3, g.n - 1) + 1):
            nu = nu_upper(g, kk, 2, "neumann")
            nu_hat = nu_upper(g, kk, 2, "modified")
            rep = sandwich_check(g, kk, 2, nu=nu, nu_hat=nu_hat)
            worst_rel = max(worst_rel, rep.details["equality_relative_gap"])
            eq_fail += not rep.passed
            # recompute both values variationally from their witness subspaces
            for est in (nu, nu_hat):
                val = subspace_sup(g, est.witness, 2, est.flavor)[0]
                gap = abs(val - est.value) / max(abs(est.value), 1e-300)
                worst_witness = max(worst_witness, gap)
                eq_fail += gap > 1e-8
    atlas = connected_atlas(max_v)
    rows = []
    bf_fail = 0
    for p in ps:
        for gi, g in enumerate(atlas):
            if k > g.n - 2:
                continue
            rep = sandwich_check(g, k, p, grid_levels=grid_levels)
            bf_fail += rep.status != PASS
            rows.append({"p": p, "graph": gi, "nu": rep.details["nu"], "nu_hat": rep.details["nu_hat"],
                         "status": rep.status, "lower_margin": rep.details["lower_margin"],
                         "upper_margin": rep.details["upper_margin"]})
    return {"suite": "sandwich", "status": _status(eq_fail == 0 and bf_fail == 0),
            "p2_graphs": len(graphs), "p2_failures": eq_fail, "p2_max_relative_gap": worst_rel,
            "p2_max_witness_gap": worst_witness,
            "brute_force_cases": len(rows), "brute_force_failures": bf_fail, "rows": rows}


def _generated_graphs(seed, scale):
    out = []
    for k in (1, 2, 4, 8):
        out.append(("chain", chain_of_cliques(k, max(2, k), max(1, math.ceil(math.log(max(k, 2)))))[0]))
    for k in (1, 2):
        out.append(("ma", mesh_Ma(k, 1 / (k + 1), mesh_Ma_spacing(k, 1))[0]))
    for shape, h in (("square", 1 / 8), ("disk", 1 / 8), ("rectangle", 1 / 8)):
        out.append((shape, mesh_domain_with_boundary(MeshSpec(shape, h, width=1.0, height=0.5))[0]))
    for i, g in enumerate(random_corpus(scale, seed + 3, 2, 40)):
        out.append((f"random{i}", g))
    return out


def suite_spectrum(seed: int = 7, n_random: int = 50) -> dict:
    """Range, simplicity of 0, top-eigenvalue window and residuals on generated graphs."""
    rows = []
    ok_all = True
    for name, g in _generated_graphs(seed, n_random):
        spec = full_spectrum(g)
        ev = spec.eigenvalues
        N = g.n
        checks = {
            "range": bool(ev.min() >= -1e-10 and ev.max() <= 2 + 1e-10),
            "zero": bool(abs(ev[0]) <= 1e-10),
            "simple": bool(ev[1] > 1e-10),
            "top": bool(N / (N - 1) - 1e-10 <= ev[-1] <= 2 + 1e-10),
            "residual": bool((spec.residuals <= 1e-8 * np.maximum(1, np.abs(ev))).all()),
        }
        ok = all(checks.values())
        ok_all &= ok
        rows.append({"graph": name, "n": N, "lambda_1": float(ev[1]), "lambda_max": float(ev[-1]),
                     "max_residual": float(spec.residuals.max()), "checks": checks})
    return {"suite": "spectrum", "status": _status(ok_all), "graphs": len(rows), "rows": rows}


def suite_ff(max_v: int = 5, grid_levels: int = 9) -> dict:
    """I^D_1 = nu^D_{1,1} (brute force) on every domain with interior; hat I_1 = I_1."""
    fails_fd = fails_hat = cases = 0
    worst = 0.0
    for g in connected_atlas(max_v):
        I1 = multiway_constant(g, 1).value
        I1h = multiway_constant(g, 1, partition_required=True).value
        if abs(I1 - I1h) > 1e-12:
            fails_hat += 1
        for size in range(1, g.n + 1):
            for om in itertools.combinations(range(g.n), size):
                om = frozenset(om)
                if not om - vertex_boundary(g, om):
                    continue
                cases += 1
                c = dirichlet_cheeger(g, om)
                bf = brute_force_nu(g, 1, 1.0, "dirichlet", grid_levels, omega=om)
                gap = abs(bf.value - c)
                worst = max(worst, gap)
                if gap > bf.resolution + 1e-12:
                    fails_fd += 1
    return {"suite": "ff", "status": _status(fails_fd == 0 and fails_hat == 0), "graphs": len(connected_atlas(max_v)),
            "domains": cases, "dirichlet_failures": fails_fd, "partition_failures": fails_hat,
            "max_gap": worst}


def suite_multiway(seed: int = 7, n_graphs: int = 40, max_v: int = 8) -> dict:
    """I_k <= main bound over every family (D >= 1), I_k <= hat I_k, and cover checks.

    Advisory fields (never asserted): the smallest margin of the cover
    inequality with I_k in place of hat I_k, and lambda_1 >= I_1^2 / 8.
    """
    graphs = random_corpus(n_graphs, seed + 4, 4, max_v)
    viol = fams = cover_fail = covers = order_fail = cheeger_adv = 0
    ik_cover_margin = math.inf
    for g in graphs:
        dist = g.distance_matrix
        lam1 = float(full_spectrum(g, vectors=False).eigenvalues[1])
        for k in (1, 2):
            if k + 1 > g.n:
                continue
            Ik = multiway_constant(g, k).value
            Ihat = multiway_constant(g, k, partition_required=True).value
            order_fail += Ik > Ihat + 1e-12
            if k == 1:
                cheeger_adv += lam1 < Ik ** 2 / 8 - 1e-12
            lab = enumerate_labelings(g.n, k + 1)
            D = _separations(lab, dist)
            vals = _bound_values(_masses(lab, g.degree, k + 1), g.volume, D)
            fams += vals.size
            viol += int((vals < Ik - 1e-9).sum())
            # cover of V by k blocks of a BFS order; any k+1 singletons serve as the family
            order = np.argsort(g.hop_distances([0]), kind="stable")
            blocks = [b.tolist() for b in np.array_split(order, k)]
            fam = SubsetFamily(g, [[int(x)] for x in order[:k + 1]])
            rep = multiway_upper_bound_check(g, fam, k, covers=[blocks])
            covers += 1
            for c in rep.details["covers"]:
                cover_fail += not c["holds"]
                ik_cover_margin = min(ik_cover_margin, Ik - c["min_I1"])
    ok = viol == 0 and order_fail == 0 and cover_fail == 0
    return {"suite": "multiway", "status": _status(ok), "graphs": len(graphs), "families": fams,
            "violations": viol, "order_failures": int(order_fail), "covers": covers,
            "cover_failures": int(cover_fail),
            "advisory": {"cover_margin_with_I_k": ik_cover_margin,
                         "cheeger_lower_bound_failures": int(cheeger_adv)}}


def suite_chain(ks=(4, 8, 16), band: float = 0.25) -> dict:
    """Chain of cliques with clique size k and path length ceil(log k)."""
    rows = []
    for k in ks:
        L = math.ceil(math.log(k))
        g, fam = chain_of_cliques(k, k, L)
        spec = full_spectrum(g, vectors=False) if g.n <= 4096 else partial_spectrum(g, k)
        rep = compare_report(fam, 2, spectrum=spec if g.n <= 4096 else None)
        main = rep.entry("main").value
        cgyd = rep.entry("cgy-discrete")
        rows.append({
            "k": k, "n": g.n, "separation": fam.separation, "lambda_k": float(spec.eigenvalues[k]),
            "sqrt_lambda_k": math.sqrt(float(spec.eigenvalues[k])), "main": main,
            "main_times_log_k": main * math.log(k), "cgy_discrete_lambda": cgyd.value,
            "cgy_discrete_sqrt": cgyd.sqrt_lambda, "delta": cgyd.inputs.get("delta"),
            "cgy_continuous": rep.entry("cgy-continuous").value,
            "criterion_winner": rep.verdicts["cgy_criterion_winner"],
            "numeric_winner": rep.verdicts["cgy_numeric_winner"],
            "smallest_bound": rep.verdicts["smallest_bound"],
            "sound": math.sqrt(float(spec.eigenvalues[k])) <= main + 1e-9,
        })
    cs = np.array([r["main_times_log_k"] for r in rows])
    C = float((cs.max() + cs.min()) / 2)
    stable = bool(np.all(np.abs(cs - C) <= band * C))
    cgy_vals = np.array([r["cgy_discrete_lambda"] for r in rows])
    theta1 = bool(np.all(cgy_vals >= 0.2) and np.all(cgy_vals <= 2.0))
    winner = all(r["criterion_winner"] == "main" and r["numeric_winner"] == "main" for r in rows)
    sound = all(r["sound"] for r in rows)
    ok = stable and theta1 and winner and sound
    return {"suite": "chain", "status": _status(ok), "fitted_C": C, "C_stable": stable,
            "cgy_discrete_theta_1": theta1, "main_wins": winner, "sound": sound, "rows": rows}


def suite_sharpness(ks=(2, 4, 8), refine=(1, 2), band=(1.0, 20.0), conv_tol: float = 0.10) -> dict:
    """Ratio of the subset-family bound to the exact mesh value on M_a, a = 1/(k+1).

    Both sides are put on the continuum scale: nu = 4 lambda / h^2 for the
    4-neighbor lattice and D in physical units (hops * h).
    """
    rows = []
    for k in ks:
        vals = []
        for m in refine:
            h = mesh_Ma_spacing(k, m)
            g, A, _ = mesh_Ma(k, 1.0 / (k + 1), h)
            lam = float(partial_spectrum(g, k + 1).eigenvalues[k + 1])
            nu_root = math.sqrt(4.0 * lam) / h
            D_phys = A.separation * h
            bound = 2.0 / D_phys * float(main_bound_terms(A).max())
            vals.append({"h": h, "n": g.n, "lambda": lam, "nu_root": nu_root, "bound": bound,
                         "separation_hops": A.separation,
                         "graph_bound": main_bound(A), "graph_value": math.sqrt(lam),
                         "sound": math.sqrt(lam) <= main_bound(A) + 1e-9})
        change = abs(vals[-1]["nu_root"] ** 2 - vals[-2]["nu_root"] ** 2) / vals[-2]["nu_root"] ** 2
        fine = vals[-1]
        rows.append({"k": k, "levels": vals, "relative_change": change, "converged": change < conv_tol,
                     "ratio": fine["bound"] / fine["nu_root"],
                     "bound_over_k1": fine["bound"] / (k + 1), "value_over_k": fine["nu_root"] / k})
    ratios = [r["ratio"] for r in rows]
    ok = (all(r["converged"] for r in rows) and all(band[0] <= x <= band[1] for x in ratios)
          and all(v["sound"] for r in rows for v in r["levels"]))
    return {"suite": "sharpness", "status": _status(ok), "band": list(band), "ratios": ratios, "rows": rows}


def suite_inrad(hs=(1 / 8, 1 / 16, 1 / 32), ps=(1.5, 2.0), N: float = 2.0, shapes=("square", "disk"),
                seed: int = 0) -> dict:
    """InRad <= (2 / nu^{1/p}) (1 + N log 2) with certified upper estimates of nu."""
    rows = []
    ok = True
    for shape in shapes:
        for h in hs:
            g, B = mesh_domain_with_boundary(MeshSpec(shape, h, radius=1.0))
            for p in ps:
                est = nu_upper(g, 1, p, "dirichlet", omega=range(g.n), clamp=B, seed=seed,
                               restarts=0 if g.n > 500 else 4)
                rep = inrad_check(g, B, p, N, est)
                ok &= rep.passed and rep.details["margin_hops"] > 0
                rows.append({"shape": shape, "h": h, "p": p, "n": g.n, **{
                    key: rep.details[key] for key in ("inrad_hops", "nu_estimate", "certification",
                                                      "rhs_hops", "margin_hops", "inrad_physical",
                                                      "rhs_physical")}})
    return {"suite": "inrad", "status": _status(ok), "rows": rows}


QUICK = {
    "main": dict(n_graphs=30, max_v=7),
    "dirichlet": dict(n_graphs=30, max_v=7),
    "lemma": dict(n_configs=20),
    "sandwich": dict(n_graphs=10, max_v=4, ps=(1.0, 3.0)),
    "spectrum": dict(n_random=10),
    "ff": dict(max_v=4, grid_levels=5),
    "multiway": dict(n_graphs=8, max_v=7),
    "chain": dict(ks=(4, 8)),
    "sharpness": dict(ks=(2,), refine=(1, 2)),
    "inrad": dict(hs=(1 / 8,), ps=(2.0,)),
}

FULL = {
    "main": dict(n_graphs=300, max_v=9),
    "dirichlet": dict(n_graphs=300, max_v=9),
    "lemma": dict(n_configs=200),
    "sandwich": dict(n_graphs=100, max_v=5),
    "spectrum": dict(n_random=50),
    "ff": dict(max_v=5, grid_levels=9),
    "multiway": dict(n_graphs=40, max_v=8),
    "chain": dict(ks=(4, 8, 16)),
    "sharpness": dict(ks=(2, 4, 8)),
    "inrad": dict(),
}

_RUNNERS = {
    "main": suite_main, "dirichlet": suite_dirichlet, "lemma": suite_lemma, "sandwich": suite_sandwich,
    "spectrum": suite_spectrum, "ff": suite_ff, "multiway": suite_multiway, "chain": suite_chain,
    "sharpness": suite_sharpness, "inrad": suite_inrad,
}
_SEEDED = {"main", "dirichlet", "lemma", "sandwich", "spectrum", "multiway"}


def run_suite(name: str, seed: int = 7, full: bool = False, **overrides) -> dict:
    """Run one suite (or ``all``) at quick or full scale."""
    if name == "all":
        reports = [run_suite(s, seed, full) for s in SUITES]
        statuses = [r["status"] for r in reports]
        status = FAIL if FAIL in statuses else (INCONCLUSIVE if INCONCLUSIVE in statuses else PASS)
        return {"suite": "all", "seed": seed, "scale": "full" if full else "quick", "status": status,
                "reports": reports}
    if name not in _RUNNERS:
        raise KeyError(name)
    kwargs = dict((FULL if full else QUICK)[name])
    kwargs.update(overrides)
    if name in _SEEDED:
        kwargs["seed"] = seed
    rep = _RUNNERS[name](**kwargs)
    rep["seed"] = seed
    rep["scale"] = "full" if full else "quick"
    return rep

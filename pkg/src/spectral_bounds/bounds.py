"""Subset-family upper bounds, their comparison and verification.

For a family {A_alpha} with separation D the main bound is

    (2/D) * max_alpha log(e * (mu(V) - sum_{beta != alpha} mu(A_beta)) / mu(A_alpha))

and bounds nu_{k,p}^{1/p}. Since the sets are disjoint the argument equals
1 + U / mu(A_alpha), U being the mass outside the family, so the maximum is
attained at the lightest set. All formulas use measures relative to mu(V),
so graphs need not be normalized beforehand.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SemanticsError
from .graph_core import (SubsetFamily, WeightedGraph, ball, boundary_separation, vertex_boundary,
                         vertex_set)
from .reporting import CheckReport, status_of, to_jsonable
from .spectral import SpectrumResult, dirichlet_spectrum, full_spectrum

GH_CONSTANT = math.log(5.0) / 4.0
EXHAUSTIVE_MAX_VERTICES = 14
EXHAUSTIVE_MAX_K = 3


def worker_count() -> int:
    """Worker cap from SPECTRAL_BOUNDS_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("SPECTRAL_BOUNDS_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Ordered map; results never depend on the worker count."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- report types -------------------------------------------------------------------

@dataclass
class BoundEntry:
    """One evaluated bound.

    ``value`` is on the bound's native scale (``scale`` names it);
    ``sqrt_lambda`` puts p = 2 bounds on the common lambda^{1/2} scale.
    """

    name: str
    value: float | None
    applicable: bool
    scale: str
    inputs: dict = field(default_factory=dict)
    reason: str = ""
    terms: list | None = None

    @property
    def sqrt_lambda(self):
        if self.value is None:
            return None
        return math.sqrt(self.value) if self.scale == "lambda" else self.value

    def to_json(self) -> dict:
        out = {"name": self.name, "applicable": self.applicable, "scale": self.scale,
               "value": self.value, "sqrt_lambda": self.sqrt_lambda, "inputs": self.inputs}
        if self.reason:
            out["reason"] = self.reason
        if self.terms is not None:
            out["terms"] = self.terms
        return to_jsonable(out)


@dataclass
class BoundReport:
    family: SubsetFamily
    separation: int
    entries: list
    verdicts: dict = field(default_factory=dict)
    verification: dict | None = None
    search: dict | None = None

    def entry(self, name) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def to_json(self) -> dict:
        out = {
            "sets": [sorted(s) for s in self.family.sets],
            "measures": self.family.relative_measures.tolist(),
            "separation": self.separation,
            "entries": [e.to_json() for e in self.entries],
            "verdicts": self.verdicts,
        }
        if self.verification is not None:
            out["verification"] = self.verification
        if self.search is not None:
            out["search"] = self.search
        return to_jsonable(out)

    def to_table(self) -> str:
        rows = [("bound", "applicable", "value", "sqrt_lambda", "note")]
        for e in self.entries:
            rows.append((e.name, "yes" if e.applicable else "no",
                         "-" if e.value is None else f"{e.value:.6g}",
                         "-" if e.sqrt_lambda is None else f"{e.sqrt_lambda:.6g}",
                         e.reason))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append(f"separation: {self.separation}")
        for k, v in sorted(self.verdicts.items()):
            lines.append(f"{k}: {v}")
        return "\n".join(lines) + "\n"


# -- formulas -----------------------------------------------------------------------

def _check_p(p):
    if not (p >= 1 and math.isfinite(p)):
        raise InputError(f"p must be a finite real >= 1, got {p!r}")


def main_bound_terms(fam: SubsetFamily) -> np.ndarray:
    """Per-set log terms log(e * (mu(V) - sum_{beta != alpha} mu(A_beta)) / mu(A_alpha))."""
    m = fam.relative_measures
    rest = 1.0 - (m.sum() - m)
    if np.any(rest <= 0):
        raise InputError("family measures exceed mu(V)")
    return 1.0 + np.log(rest / m)


def main_bound(fam: SubsetFamily, p: float = 2) -> float:
    """Upper bound on nu_{k,p}^{1/p} for a family of k+1 >= 2 sets."""
    _check_p(p)
    if len(fam) < 2:
        raise InputError("main_bound needs at least 2 sets")
    D = fam.separation
    if D < 1:
        raise InputError("family separation must be >= 1")
    return float(2.0 / D * main_bound_terms(fam).max())


def main_bound_dirichlet(fam: SubsetFamily, boundary, p: float = 2) -> float:
    """Upper bound on the k-th Dirichlet constant^{1/p} (k = number of sets).

    The Dirichlet condition is imposed on the designated ``boundary`` set.
    """
    _check_p(p)
    D = boundary_separation(fam, boundary)
    if D < 1:
        raise InputError("boundary separation must be >= 1")
    return float(2.0 / D * main_bound_terms(fam).max())


def main_bound_value(measures, total: float, D: int) -> float:
    """Main bound from raw measures; handy for search loops."""
    m = np.asarray(measures, dtype=float) / total
    return float(2.0 / D * (1.0 + np.log((1.0 - (m.sum() - m)) / m)).max())


def lambda_max(g: WeightedGraph) -> float:
    if g.n <= 4096:
        return float(full_spectrum(g, vectors=False).eigenvalues[-1])
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla
    s = 1.0 / np.sqrt(g.degree)
    L = sp.identity(g.n) - sp.diags(s) @ g.weights @ sp.diags(s)
    return float(spla.eigsh(L, k=1, which="LA", return_eigenvectors=False)[0])


def cgy_delta(fam: SubsetFamily) -> float:
    m = fam.relative_measures
    D = fam.separation
    if D <= 1:
        raise InputError("delta needs separation > 1")
    q = (1.0 - m) / m
    prod = np.outer(q, q)
    np.fill_diagonal(prod, -np.inf)
    return float(prod.max() ** (1.0 / (2.0 * (D - 1))))


def cgy_bound_discrete(fam: SubsetFamily, spectrum: SpectrumResult | None = None) -> BoundEntry:
    """lambda_k <= ((delta - 1) / (delta + 1)) * lambda_{N-1}; needs separation > 1."""
    D = fam.separation
    inputs = {"separation": D, "measures": fam.relative_measures.tolist()}
    if D <= 1:
        return BoundEntry("cgy-discrete", None, False, "lambda", inputs, "separation <= 1")
    lam_max = float(spectrum.eigenvalues[-1]) if spectrum is not None else lambda_max(fam.graph)
    delta = cgy_delta(fam)
    inputs.update(delta=delta, lambda_max=lam_max)
    return BoundEntry("cgy-discrete", (delta - 1.0) / (delta + 1.0) * lam_max, True, "lambda", inputs)


def cgy_bound_continuous_form(fam: SubsetFamily, p: float = 2) -> BoundEntry:
    """(1/D) max_{alpha != beta} log(e / (m_alpha m_beta)), evaluated for comparison."""
    _check_p(p)
    if len(fam) < 2:
        raise InputError("needs at least 2 sets")
    m = fam.relative_measures
    if np.any(m <= 0) or np.any(m >= 1):
        raise InputError("relative measures must lie in (0, 1)")
    D = fam.separation
    s = np.sort(m)
    val = (1.0 + math.log(1.0 / (s[0] * s[1]))) / D
    return BoundEntry("cgy-continuous", val, True, "sqrt_lambda",
                      {"separation": D, "measures": m.tolist()})


def gozlan_herry_family(g: WeightedGraph, sets, r: int) -> SubsetFamily:
    """Family (A_0, A_1..A_k) with A_0 the complement of the r-ball of the union."""
    sets = [vertex_set(g, s, allow_empty=False) for s in sets]
    U = frozenset().union(*sets)
    A0 = frozenset(range(g.n)) - ball(g, U, r)
    if not A0:
        raise InputError(f"the {r}-ball of the union covers V; A_0 would be empty")
    return SubsetFamily(g, [A0] + sets)


def gozlan_herry_bound(fam: SubsetFamily, c: float = GH_CONSTANT) -> BoundEntry:
    """(2/D) phi((1/c) log((1 - sum_{beta != 0} m_beta) / m_0)), phi(x) = max(sqrt x, x).

    ``fam[0]`` is A_0. Applicable only under the mass condition
    m_alpha + sum_{beta >= 1} m_beta >= 1 for every alpha >= 1.
    """
    if len(fam) < 2:
        raise InputError("needs A_0 and at least one more set")
    m = fam.relative_measures
    D = fam.separation
    inputs = {"separation": D, "measures": m.tolist(), "c": c}
    tail = m[1:].sum()
    slack = m[1:] + tail - 1.0
    if np.any(slack < -1e-12):
        a = int(np.argmin(slack)) + 1
        return BoundEntry("gozlan-herry", None, False, "sqrt_lambda", inputs,
                          f"mass condition fails at set {a}: m_a + sum m_beta = {m[a] + tail:.6g} < 1")
    if m[0] <= 0:
        return BoundEntry("gozlan-herry", None, False, "sqrt_lambda", inputs, "m(A_0) = 0")
    ratio = (1.0 - tail) / m[0]
    x = math.log(ratio) / c
    val = 2.0 / D * max(math.sqrt(max(x, 0.0)), x)
    inputs["ratio"] = ratio
    return BoundEntry("gozlan-herry", val, True, "sqrt_lambda", inputs)


def cgy_criterion(fam: SubsetFamily) -> bool:
    """e m_1 (1 - sum_{beta != 0} m_beta)^2 <= m_0 with measures sorted ascending."""
    s = np.sort(fam.relative_measures)
    return bool(math.e * s[1] * (1.0 - s[1:].sum()) ** 2 <= s[0])


def gh_criterion(fam: SubsetFamily, c: float = GH_CONSTANT) -> bool:
    """((1 - sum_{beta != 0} m_beta) / m_0)^{1/c - 1} >= e with A_0 = fam[0]."""
    m = fam.relative_measures
    ratio = (1.0 - m[1:].sum()) / m[0]
    return bool((1.0 / c - 1.0) * math.log(ratio) >= 1.0)


def compare_report(fam: SubsetFamily, p: float = 2, spectrum: SpectrumResult | None = None,
                   c: float = GH_CONSTANT) -> BoundReport:
    """Evaluate every bound on ``fam`` and apply the comparison criteria.

    For the Gozlan-Herry row ``fam[0]`` plays the role of A_0.
    """
    _check_p(p)
    D = fam.separation
    terms = main_bound_terms(fam)
    main = BoundEntry("main", float(2.0 / D * terms.max()), True, "sqrt_lambda" if p == 2 else "nu^(1/p)",
                      {"separation": D, "measures": fam.relative_measures.tolist(), "p": p},
                      terms=terms.tolist())
    entries = [main, cgy_bound_continuous_form(fam, p)]
    if p == 2:
        entries.append(cgy_bound_discrete(fam, spectrum))
    else:
        entries.append(BoundEntry("cgy-discrete", None, False, "lambda", {}, "needs p = 2"))
    entries.append(gozlan_herry_bound(fam, c))
    rep = BoundReport(fam, D, entries)
    cg = rep.entry("cgy-continuous")
    pred = "main" if cgy_criterion(fam) else "cgy-continuous"
    num = "main" if main.value <= cg.value else "cgy-continuous"
    rep.verdicts["cgy_criterion_winner"] = pred
    rep.verdicts["cgy_numeric_winner"] = num
    rep.verdicts["cgy_consistent"] = pred == num or math.isclose(main.value, cg.value, rel_tol=1e-12)
    gh = rep.entry("gozlan-herry")
    if gh.applicable:
        pred = "main" if gh_criterion(fam, c) else "gozlan-herry"
        num = "main" if main.value <= gh.value else "gozlan-herry"
        rep.verdicts["gh_criterion_winner"] = pred
        rep.verdicts["gh_numeric_winner"] = num
        rep.verdicts["gh_consistent"] = pred == num or math.isclose(main.value, gh.value, rel_tol=1e-12)
    if p == 2:
        best = min((e for e in entries if e.applicable), key=lambda e: e.sqrt_lambda)
        rep.verdicts["smallest_bound"] = best.name
    return rep


def evaluate(fam: SubsetFamily, p: float = 2, boundary=None, verify: bool = False) -> BoundReport:
    """Main (or Dirichlet) bound report, optionally checked against the exact p = 2 value."""
    if boundary is None:
        rep = compare_report(fam, p)
        if verify:
            rep.verification = verify_main(fam).to_json()
        return rep
    val = main_bound_dirichlet(fam, boundary, p)
    D = boundary_separation(fam, boundary)
    e = BoundEntry("main-dirichlet", val, True, "sqrt_lambda" if p == 2 else "nu^(1/p)",
                   {"boundary_separation": D, "measures": fam.relative_measures.tolist(), "p": p},
                   terms=main_bound_terms(fam).tolist())
    rep = BoundReport(fam, D, [e])
    if verify:
        rep.verification = verify_dirichlet(fam, boundary).to_json()
    return rep


# -- exact p = 2 verification ------------------------------------------------------

def verify_main(fam: SubsetFamily, spectrum: SpectrumResult | None = None, tol: float = 1e-9) -> CheckReport:
    """lambda_k^{1/2} <= main_bound(fam, 2) with the exact eigenvalue."""
    g = fam.graph
    k = len(fam) - 1
    spec = spectrum if spectrum is not None else full_spectrum(g, vectors=False)
    lhs = math.sqrt(max(float(spec.eigenvalues[k]), 0.0))
    rhs = main_bound(fam, 2)
    return CheckReport("main", status_of(lhs <= rhs + tol),
                       {"k": k, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "certification": "exact"})


def verify_dirichlet(fam: SubsetFamily, boundary, tol: float = 1e-9) -> CheckReport:
    """lambda^D_k^{1/2} <= main_bound_dirichlet with the Dirichlet condition on ``boundary``."""
    g = fam.graph
    k = len(fam)
    B = vertex_set(g, boundary, allow_empty=False)
    rhs = main_bound_dirichlet(fam, B, 2)
    nfree = g.n - len(B)
    if k > nfree:
        lhs = math.inf
    else:
        spec = dirichlet_spectrum(g, range(g.n), clamp=B, k=k)
        lhs = math.sqrt(max(float(spec.eigenvalues[k - 1]), 0.0))
    return CheckReport("main_dirichlet", status_of(lhs <= rhs + tol),
                       {"k": k, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "certification": "exact"})


def boundary_concentration_check(g: WeightedGraph, omega, p: float, estimate, clamp=None) -> CheckReport:
    """mu(Omega \\ B_r(bd)) / mu(Omega) <= exp(1 - nu^{1/p} r) for r = 1..depth.

    ``bd`` is the vertex boundary of Omega (or ``clamp``). ``estimate`` must
    be an exact or certified-upper first Dirichlet constant on Omega; an
    upper estimate lowers the right-hand side, so a pass is conclusive.
    """
    if getattr(estimate, "flavor", None) != "dirichlet" or getattr(estimate, "k", None) != 1:
        raise SemanticsError("boundary concentration needs a first-order Dirichlet estimate")
    if estimate.certification not in ("exact", "certified_upper"):
        raise SemanticsError("boundary concentration needs an exact or certified_upper estimate")
    if abs(estimate.p - p) > 1e-12:
        raise SemanticsError(f"estimate has p={estimate.p}, check requested p={p}")
    om = vertex_set(g, omega, allow_empty=False)
    bd = vertex_boundary(g, om) if clamp is None else vertex_set(g, clamp)
    if not bd:
        raise InputError("omega has an empty boundary")
    if estimate.omega is not None and (estimate.omega != om or estimate.clamp != bd):
        raise SemanticsError("estimate was computed for a different domain")
    if not om - bd:
        raise InputError("omega has empty interior")
    dist = g.hop_distances(bd)
    om_idx = np.array(sorted(om))
    d_om = dist[om_idx]
    mass = g.degree[om_idx]
    total = mass.sum()
    depth = int(d_om.max())
    nu_root = max(float(estimate.value), 0.0) ** (1.0 / p)
    rows = []
    ok = True
    worst = math.inf
    for r in range(1, depth + 1):
        lhs = float(mass[d_om > r].sum() / total)
        rhs = math.exp(1.0 - nu_root * r)
        holds = lhs <= rhs + 1e-12
        ok = ok and holds
        worst = min(worst, rhs - lhs)
        rows.append({"r": r, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "trivial": rhs >= 1.0})
    return CheckReport("boundary_concentration", status_of(ok),
                       {"p": p, "nu": float(estimate.value), "certification": estimate.certification,
                        "depth": depth, "rows": rows, "min_margin": worst})


def lemma_chain_check(g: WeightedGraph, fam: SubsetFamily, r: int, p: float = 2, seed: int = 0,
                      tol: float = 1e-9) -> CheckReport:
    """Exact p = 2 check of the chain behind the main bound.

    With Omega_alpha = B_r(A_alpha) (pairwise disjoint when 2r < D):
    (a) hat nu_k <= nu^D_{k+1}(union Omega_alpha);
    (b) nu^D_{k+1}(union) <= max_alpha nu^D_1(Omega_alpha);
    (c) (sum b)/(sum a) <= max b/a for the energies b_alpha and masses a_alpha
        of a seeded combination of the first Dirichlet eigenfunctions.
    Constants over an empty set of subspaces are +inf.
    """
    if p != 2:
        raise InputError("lemma_chain_check runs in exact mode only (p = 2)")
    if r < 1 or int(r) != r:
        raise InputError("r must be a positive integer")
    k = len(fam) - 1
    if len(fam) >= 2 and not 2 * r < fam.separation:
        raise InputError(f"2r = {2 * r} must be below the separation {fam.separation}")
    omegas = [ball(g, A, r) for A in fam.sets]
    for i in range(len(omegas)):
        for j in range(i + 1, len(omegas)):
            if omegas[i] & omegas[j]:
                raise InputError("neighborhoods intersect")
    union = frozenset().union(*omegas)
    spec = full_spectrum(g, vectors=False)
    nu_hat = float(spec.eigenvalues[k])
    ubd = vertex_boundary(g, union)
    nfree = len(union - ubd)
    nu_union = (float(dirichlet_spectrum(g, union, k=k + 1).eigenvalues[k])
                if nfree >= k + 1 else math.inf)
    firsts, vecs = [], []
    for om in omegas:
        if om - vertex_boundary(g, om):
            s = dirichlet_spectrum(g, om, k=1)
            firsts.append(float(s.eigenvalues[0]))
            vecs.append(s.eigenvectors[:, 0])
        else:
            firsts.append(math.inf)
            vecs.append(None)
    mx = max(firsts)
    a_ok = nu_hat <= nu_union + tol * max(1.0, nu_hat) if math.isfinite(nu_union) else True
    b_ok = nu_union <= mx + tol * max(1.0, mx) if math.isfinite(mx) else True
    rng = np.random.default_rng(seed)
    num_terms, den_terms = [], []
    phi = np.zeros(g.n)
    u, v, w = g.edges
    for vec in vecs:
        if vec is None:
            continue
        c = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        f = c * vec
        phi += f
        num_terms.append(float((w * (f[u] - f[v]) ** 2).sum()))
        den_terms.append(float((g.degree * f ** 2).sum()))
    if num_terms:
        mediant = sum(num_terms) / sum(den_terms)
        ratios = [b / a for b, a in zip(num_terms, den_terms)]
        union_q = float((w * (phi[u] - phi[v]) ** 2).sum() / (g.degree * phi ** 2).sum())
        c_ok = mediant <= max(ratios) + tol * max(1.0, max(ratios))
        c_detail = {"mediant": mediant, "max_ratio": max(ratios), "union_quotient": union_q,
                    "margin": max(ratios) - mediant}
    else:
        c_ok, c_detail = True, {"note": "no neighborhood has interior"}
    details = {
        "k": k, "r": r,
        "a": {"nu_hat": nu_hat, "nu_D_union": nu_union,
              "margin": (nu_union - nu_hat) if math.isfinite(nu_union) else math.inf},
        "b": {"nu_D_union": nu_union, "max_first": mx, "firsts": firsts,
              "margin": (mx - nu_union) if math.isfinite(mx) and math.isfinite(nu_union) else math.inf},
        "c": c_detail,
    }
    return CheckReport("lemma_chain", status_of(a_ok and b_ok and c_ok), details)


# -- family search ------------------------------------------------------------------

@dataclass
class _SearchState:
    best_value: float = math.inf
    best_sets: list | None = None
    nodes: int = 0
    exhausted: bool = False


def _family_value(dist, mass, total, labels, k):
    """Main bound of a labeling (label -1 = unassigned); inf if invalid."""
    sets = [np.flatnonzero(labels == a) for a in range(k + 1)]
    if any(s.size == 0 for s in sets):
        return math.inf
    D = min(int(dist[np.ix_(sets[a], sets[b])].min()) for a in range(k + 1) for b in range(a + 1, k + 1))
    if D < 1:
        return math.inf
    return main_bound_value([mass[s].sum() for s in sets], total, D)


def _exhaustive(g, k, budget):
    n = g.n
    dist = g.distance_matrix
    mass = g.degree
    total = g.volume
    diam = int(dist.max())
    st = _SearchState()
    # D = 1: any partition into k+1 nonempty parts gives exactly 2
    st.best_value = 2.0
    st.best_sets = [[i] for i in range(k)] + [list(range(k, n))]
    # BFS order from a peripheral vertex so conflicts surface early
    order = np.argsort(dist[int(np.argmax(dist.max(axis=1)))], kind="stable").tolist()
    for D in range(diam, 1, -1):
        if 2.0 / D >= st.best_value:
            continue
        close = dist < D  # pairs that may not carry different labels
        labels = -np.ones(n, dtype=np.int64)
        masses = np.zeros(k + 1)

        def dfs(pos, used, unassigned_mass, remaining):
            if st.exhausted:
                return
            st.nodes += 1
            if st.nodes > budget:
                st.exhausted = True
                return
            # lower bound on 1 + U/mu_min
            if used == k + 1:
                mu_cap = (masses + remaining).min()
            else:
                mu_cap = remaining
            if mu_cap <= 0:
                return
            lb = 2.0 / D * (1.0 + math.log1p(unassigned_mass / mu_cap))
            if lb >= st.best_value - 1e-15:
                return
            if pos == n:
                if used < k + 1:
                    return
                val = 2.0 / D * (1.0 + math.log1p(unassigned_mass / masses.min()))
                if val < st.best_value - 1e-15:
                    st.best_value = val
                    st.best_sets = [np.flatnonzero(labels == a).tolist() for a in range(k + 1)]
                return
            x = order[pos]
            mx = mass[x]
            rem = remaining - mx
            nb = labels[close[x]]
            conflict = set(nb[nb >= 0].tolist())
            # try existing labels, then a new one, then unassigned
            cands = []
            if len(conflict) <= 1:
                if conflict:
                    cands.append(next(iter(conflict)))
                else:
                    cands.extend(range(used))
                    if used < k + 1:
                        cands.append(used)
            for a in cands:
                labels[x] = a
                masses[a] += mx
                dfs(pos + 1, max(used, a + 1), unassigned_mass, rem)
                masses[a] -= mx
                labels[x] = -1
                if st.exhausted:
                    return
            dfs(pos + 1, used, unassigned_mass + mx, rem)

        dfs(0, 0, 0.0, total)
        if st.exhausted:
            break
    return st


def _grow(dist, seeds, D):
    """Assign every vertex to its nearest seed's set when that keeps separation >= D."""
    n = dist.shape[0]
    labels = -np.ones(n, dtype=np.int64)
    for a, s in enumerate(seeds):
        labels[s] = a
    dseed = dist[:, seeds]
    for x in np.argsort(dseed.min(axis=1), kind="stable"):
        if labels[x] >= 0:
            continue
        a = int(np.argmin(dseed[x]))
        others = np.flatnonzero((labels >= 0) & (labels != a))
        if others.size == 0 or dist[x, others].min() >= D:
            labels[x] = a
    return labels


def _seed_sets(g, k, seed):
    """Candidate seed tuples: spectral clusters' centers and farthest-point traversals."""
    dist = g.distance_matrix
    out = []
    if g.n > k + 1:
        from .multiway import multiway_constant
        try:
            prof = multiway_constant(g, k, "heuristic", partition_required=True, seed=seed)
            seeds = []
            for s in prof.family.sets:
                idx = np.array(sorted(s))
                ecc = dist[np.ix_(idx, idx)].max(axis=1)
                seeds.append(int(idx[np.argmin(ecc)]))
            out.append(seeds)
        except Exception:  # noqa: BLE001 - spectral seeding is optional
            pass
    for start in range(min(g.n, 8)):
        seeds = [start]
        while len(seeds) < k + 1:
            d = dist[:, seeds].min(axis=1)
            seeds.append(int(np.argmax(d)))
        out.append(seeds)
    return out


def _greedy(g, k, seed):
    dist = g.distance_matrix
    diam = int(dist.max())
    mass, total = g.degree, g.volume
    best = (math.inf, None)
    for seeds in _seed_sets(g, k, seed):
        if len(set(seeds)) < k + 1:
            continue
        dmin = min(dist[a, b] for i, a in enumerate(seeds) for b in seeds[i + 1:])
        for D in range(1, min(diam, int(dmin)) + 1):
            labels = _grow(dist, seeds, D)
            v = _family_value(dist, mass, total, labels, k)
            if v < best[0]:
                best = (v, [np.flatnonzero(labels == a).tolist() for a in range(k + 1)])
    return best


def _anneal_chain(args):
    g, k, steps, seed_seq, init = args
    rng = np.random.default_rng(seed_seq)
    dist = g.distance_matrix
    mass, total = g.degree, g.volume
    labels = init.copy()
    cur = _family_value(dist, mass, total, labels, k)
    best = (cur, labels.copy())
    t0, t1 = 0.5, 1e-3
    for step in range(steps):
        T = t0 * (t1 / t0) ** (step / max(1, steps - 1))
        x = int(rng.integers(g.n))
        new = int(rng.integers(-1, k + 1))
        if new == labels[x]:
            continue
        old = labels[x]
        labels[x] = new
        val = _family_value(dist, mass, total, labels, k)
        if val <= cur or (math.isfinite(val) and rng.random() < math.exp(-(val - cur) / T)):
            cur = val
            if val < best[0]:
                best = (val, labels.copy())
        else:
            labels[x] = old
    return best


def search_best_family(g: WeightedGraph, k: int, mode: str = "greedy", budget: float = 1e6, seed: int = 0,
                       chains: int = 4):
    """Minimize main_bound over families of k+1 disjoint nonempty sets.

    Modes: ``exhaustive`` (branch and bound, |V| <= 14, k <= 3; ``budget``
    caps search nodes), ``greedy`` (nearest-seed growth from spectral and
    farthest-point seeds) and ``anneal`` (``chains`` seeded chains sharing
    ``budget`` moves). Returns ``(family, report)``; ``report.search`` records
    whether the budget ran out.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if k + 1 > g.n:
        raise InputError("not enough vertices for k+1 sets")
    budget = int(budget)
    info = {"mode": mode, "budget": budget, "seed": seed, "budget_exhausted": False}
    if mode == "exhaustive":
        if g.n > EXHAUSTIVE_MAX_VERTICES or k > EXHAUSTIVE_MAX_K:
            raise InputError(f"exhaustive mode needs |V| <= {EXHAUSTIVE_MAX_VERTICES} and k <= {EXHAUSTIVE_MAX_K}")
        st = _exhaustive(g, k, budget)
        sets = st.best_sets
        info.update(nodes=st.nodes, budget_exhausted=st.exhausted)
    elif mode == "greedy":
        _, sets = _greedy(g, k, seed)
    elif mode == "anneal":
        v0, sets0 = _greedy(g, k, seed)
        init = -np.ones(g.n, dtype=np.int64)
        for a, s in enumerate(sets0):
            init[s] = a
        children = np.random.SeedSequence(seed).spawn(chains)
        steps = max(1, budget // chains)
        results = parallel_map(_anneal_chain, [(g, k, steps, c, init) for c in children])
        best = min(results, key=lambda t: t[0])
        sets = sets0 if v0 <= best[0] else [np.flatnonzero(best[1] == a).tolist() for a in range(k + 1)]
        info.update(chains=chains, steps_per_chain=steps)
    else:
        raise InputError(f"unknown search mode {mode!r}")
    fam = SubsetFamily(g, sets)
    rep = compare_report(fam, 2)
    info["value"] = rep.entry("main").value
    rep.search = info
    return fam, rep

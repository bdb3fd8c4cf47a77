"""Multi-way Cheeger constants of weighted graphs.

The expansion of a vertex set is ``h(A) = w(A, V \\ A) / mu(A)``. The k-way
constant ``I_k`` minimizes ``max_alpha h(A_alpha)`` over k+1 pairwise disjoint
nonempty sets; the partition constant additionally requires the sets to
cover V. Exhaustive modes work on bitmask tables, so they are limited to
small graphs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.vq import kmeans2

from .errors import InputError, ResourceError
from .graph_core import SubsetFamily, WeightedGraph, indicator, vertex_boundary, vertex_set
from .reporting import CheckReport, status_of

EXHAUSTIVE_MAX_VERTICES = 12
EXHAUSTIVE_MAX_K = 3
DIRICHLET_MAX_FREE = 20


@dataclass
class CutProfile:
    """A family of disjoint sets with per-set expansions; ``value`` is their maximum."""

    family: SubsetFamily
    expansions: np.ndarray
    value: float
    partition: bool
    mode: str

    def to_json(self) -> dict:
        return {
            "sets": [sorted(s) for s in self.family.sets],
            "expansions": [float(x) for x in self.expansions],
            "value": float(self.value),
            "partition": self.partition,
            "mode": self.mode,
        }


def expansion(g: WeightedGraph, A) -> float:
    """Weight of edges leaving ``A`` divided by mu(A)."""
    A = vertex_set(g, A, allow_empty=False)
    ind = indicator(g, A).astype(float)
    leaving = float(ind @ (g.weights @ (1.0 - ind)))
    return leaving / float(g.degree[sorted(A)].sum())


# -- subset tables -----------------------------------------------------------------

def subset_tables(W: np.ndarray, mass: np.ndarray, boundary_weight: np.ndarray | None = None):
    """Volume and cut weight of every subset of ``range(n)`` (bit i = vertex i).

    ``W`` is a dense symmetric weight matrix on the enumerated vertices,
    ``mass`` their measures. The cut of S counts edges from S to the other
    enumerated vertices plus ``boundary_weight`` (per-vertex weight to
    vertices outside the enumeration).
    """
    n = W.shape[0]
    size = 1 << n
    vol = np.zeros(size)
    internal = np.zeros(size)
    deg_in = W.sum(axis=1)
    ext = np.zeros(n) if boundary_weight is None else np.asarray(boundary_weight, dtype=float)
    touch = np.zeros(size)  # sum over S of (weight to enumerated vertices + external)
    for i in range(n):
        lo = 1 << i
        # adj[S] = sum_{j in S} W[i, j] for S < 2^i
        adj = np.zeros(1)
        for j in range(i):
            adj = np.concatenate([adj, adj + W[i, j]])
        vol[lo:2 * lo] = vol[:lo] + mass[i]
        internal[lo:2 * lo] = internal[:lo] + adj
        touch[lo:2 * lo] = touch[:lo] + deg_in[i] + ext[i]
    cut = touch - 2.0 * internal
    cut[cut < 0] = 0.0
    return vol, cut


def _expansions_table(g: WeightedGraph):
    if g.n > EXHAUSTIVE_MAX_VERTICES:
        raise ResourceError(f"exhaustive mode limited to {EXHAUSTIVE_MAX_VERTICES} vertices")
    vol, cut = subset_tables(g.dense_weights(), g.degree)
    h = np.full(vol.shape, np.inf)
    h[1:] = cut[1:] / vol[1:]
    return h


def _submasks_of(c: int, bits_cache: dict) -> np.ndarray:
    """All submasks of ``c`` (including 0) as an int array."""
    arr = bits_cache.get(c)
    if arr is None:
        pos = [i for i in range(c.bit_length()) if c >> i & 1]
        arr = np.zeros(1, dtype=np.int64)
        for p_ in pos:
            arr = np.concatenate([arr, arr | (1 << p_)])
        bits_cache[c] = arr
    return arr


def _subset_min(h: np.ndarray, n: int) -> np.ndarray:
    """f[U] = min over nonempty S subset of U of h[S]."""
    f = h.copy()
    idx = np.arange(f.size)
    for i in range(n):
        b = 1 << i
        has = (idx & b) != 0
        f[has] = np.minimum(f[has], f[idx[has] ^ b])
    return f


def _level_tables(h, n, levels, partition):
    """Tables f_m(U) for m = 1..levels (best m-family inside / partitioning U)."""
    full = (1 << n) - 1
    tabs = [_subset_min(h, n) if not partition else h.copy()]
    cache: dict = {}
    for _ in range(1, levels):
        prev = tabs[-1]
        cur = np.full(h.size, np.inf)
        for S in range(1, full + 1):
            hs = h[S]
            if not np.isfinite(hs):
                continue
            comp = full ^ S
            if partition:
                # canonical: S holds the lowest vertex of U
                low = S & -S
                comp &= ~(low - 1)
            T = _submasks_of(comp, cache)
            T = T[T != 0]
            if T.size == 0:
                continue
            vals = np.maximum(hs, prev[T])
            np.minimum.at(cur, S | T, vals)
        tabs.append(cur)
    return tabs


def _reconstruct(h, tabs, n, U, partition):
    """Recover one optimal family inside U from the level tables."""
    sets = []
    cache: dict = {}
    for m in range(len(tabs), 1, -1):
        prev = tabs[m - 2]
        S = _submasks_of(U, cache)
        S = S[(S != 0) & (S != U)]
        if partition:
            low = U & -U
            S = S[(S & low) != 0]
        vals = np.maximum(h[S], prev[U ^ S])
        i = int(np.argmin(vals))
        sets.append(int(S[i]))
        U ^= int(S[i])
    if partition:
        sets.append(U)
    else:
        S = _submasks_of(U, cache)
        S = S[S != 0]
        sets.append(int(S[np.argmin(h[S])]))
    return [[i for i in range(n) if s >> i & 1] for s in sets]


def _profile(g, sets, partition, mode):
    fam = SubsetFamily(g, sets)
    ex = np.array([expansion(g, s) for s in fam.sets])
    return CutProfile(fam, ex, float(ex.max()), partition, mode)


def multiway_constant(g: WeightedGraph, k: int, mode: str = "exhaustive", partition_required: bool = False,
                      seed: int = 0) -> CutProfile:
    """k-way Cheeger constant (or its partition variant) with an optimal family.

    ``exhaustive`` needs |V| <= 12 and k <= 3. ``heuristic`` clusters a
    spectral embedding and returns a value no smaller than the optimum.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if k + 1 > g.n:
        raise InputError(f"cannot fit {k + 1} disjoint nonempty sets in {g.n} vertices")
    if mode == "exhaustive":
        if k > EXHAUSTIVE_MAX_K:
            raise ResourceError(f"exhaustive mode limited to k <= {EXHAUSTIVE_MAX_K}")
        h = _expansions_table(g)
        tabs = _level_tables(h, g.n, k + 1, partition_required)
        full = (1 << g.n) - 1
        sets = _reconstruct(h, tabs, g.n, full, partition_required)
        prof = _profile(g, sets, partition_required, mode)
        # the table value and the recomputed family must agree
        if abs(prof.value - tabs[-1][full]) > 1e-9 * max(1.0, prof.value):
            raise AssertionError("reconstructed family does not reproduce the optimum")
        return prof
    if mode == "heuristic":
        return _heuristic(g, k, partition_required, seed)
    raise InputError(f"unknown mode {mode!r}")


def _heuristic(g, k, partition, seed):
    from .spectral import full_spectrum, partial_spectrum
    spec = full_spectrum(g) if g.n <= 2000 else partial_spectrum(g, k)
    X = spec.eigenvectors[:, 1:k + 1] * np.sqrt(g.degree)[:, None]
    X = X / np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1e-300)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(8):
        _, lab = kmeans2(X, k + 1, minit="++", seed=rng)
        groups = [np.flatnonzero(lab == c).tolist() for c in range(k + 1)]
        if any(not s for s in groups):
            continue
        prof = _profile(g, groups, partition, "heuristic")
        if not partition:
            prof = _shrink(g, prof, X)
        if best is None or prof.value < best.value:
            best = prof
    if best is None:
        # fall back to sweeping the Fiedler order into contiguous blocks
        order = np.argsort(spec.eigenvectors[:, 1])
        groups = [b.tolist() for b in np.array_split(order, k + 1)]
        best = _profile(g, groups, partition, "heuristic")
    return best


def _shrink(g, prof, X):
    """Replace each set by its best prefix ordered by distance to the set's centroid."""
    new_sets = []
    for s in prof.family.sets:
        idx = np.array(sorted(s))
        c = X[idx].mean(axis=0)
        order = idx[np.argsort(np.linalg.norm(X[idx] - c, axis=1))]
        vals = [expansion(g, order[:m].tolist()) for m in range(1, len(order) + 1)]
        m = int(np.argmin(vals)) + 1
        new_sets.append(order[:m].tolist())
    return _profile(g, new_sets, False, "heuristic")


# -- Dirichlet constant --------------------------------------------------------------

def dirichlet_cheeger(g: WeightedGraph, omega, clamp=None) -> float:
    """min over nonempty A inside the free set of w(A, Omega \\ A) / mu(A).

    Only edges with both ends in Omega count, matching the Dirichlet p = 1
    quotient; by the co-area formula this equals its infimum.
    """
    om = vertex_set(g, omega, allow_empty=False)
    cl = vertex_boundary(g, om) if clamp is None else vertex_set(g, clamp)
    if not cl <= om:
        raise InputError("clamped vertices must lie inside omega")
    free = sorted(om - cl)
    if not free:
        raise InputError("omega has no free (interior) vertex")
    if len(free) > DIRICHLET_MAX_FREE:
        raise ResourceError(f"dirichlet_cheeger limited to {DIRICHLET_MAX_FREE} free vertices")
    Wd = g.weights
    Wff = Wd[free][:, free].toarray()
    to_clamp = np.asarray(Wd[free][:, sorted(cl)].sum(axis=1)).ravel() if cl else np.zeros(len(free))
    vol, cut = subset_tables(Wff, g.degree[free], to_clamp)
    return float((cut[1:] / vol[1:]).min())


def cheeger_induced(g: WeightedGraph, B) -> float:
    """Cheeger constant of the subgraph induced by ``B`` with the ambient measure.

    Minimizes w(S, B \\ S) / mu(S) over nonempty S in B with mu(S) <= mu(B)/2;
    infinite when no such S exists.
    """
    B = sorted(vertex_set(g, B, allow_empty=False))
    if len(B) > EXHAUSTIVE_MAX_VERTICES + 4:
        raise ResourceError("induced Cheeger constant limited to 16 vertices")
    Wb = g.weights[B][:, B].toarray()
    vol, cut = subset_tables(Wb, g.degree[B])
    ok = (vol > 0) & (vol <= vol[-1] / 2 * (1 + 1e-12))
    if not ok.any():
        return float("inf")
    return float((cut[ok] / vol[ok]).min())


def multiway_upper_bound_check(g: WeightedGraph, fam: SubsetFamily, k: int | None = None,
                               covers=None) -> CheckReport:
    """Check the subset-family bound on I_k and, optionally, the cover inequality.

    With a family of k+1 sets, asserts exhaustive ``I_k <= main_bound(fam)``.
    For each cover ``{B_alpha}`` of V by k sets (disjoint), asserts
    ``min_alpha I_1(B_alpha) <= hat I_k``.
    """
    from .bounds import main_bound
    k = len(fam) - 1 if k is None else k
    if len(fam) != k + 1:
        raise InputError(f"family has {len(fam)} sets, expected k+1 = {k + 1}")
    Ik = multiway_constant(g, k, "exhaustive").value
    bound = main_bound(fam, 1)
    ok = Ik <= bound + 1e-9
    details = {"k": k, "I_k": Ik, "bound": bound, "margin": bound - Ik, "covers": []}
    if covers:
        Ihat = multiway_constant(g, k, "exhaustive", partition_required=True).value
        details["I_hat_k"] = Ihat
        for cover in covers:
            if len(cover) != k:
                raise InputError(f"cover must have k = {k} sets")
            sets = [vertex_set(g, b, allow_empty=False) for b in cover]
            if frozenset().union(*sets) != frozenset(range(g.n)):
                raise InputError("cover sets must cover V")
            vals = [cheeger_induced(g, b) for b in sets]
            m = min(vals)
            c_ok = m <= Ihat + 1e-9
            ok = ok and c_ok
            details["covers"].append({"sets": [sorted(b) for b in sets], "I1_blocks": vals,
                                      "min_I1": m, "margin": Ihat - m, "holds": c_ok})
    return CheckReport("multiway_upper_bound", status_of(ok), details)

"""Example instances: chains of cliques, M_a grid meshes, domain meshes, random graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import InputError, ResourceError, SemanticsError
from .graph_core import SubsetFamily, WeightedGraph, normalize, vertex_set
from .reporting import CheckReport, status_of


# -- chain of cliques ---------------------------------------------------------

def chain_of_cliques(k: int, clique_size: int, path_len: int):
    """k+1 complete graphs K_{clique_size} joined in a chain by paths.

    Clique alpha's designated vertex (its first vertex) is joined to the next
    clique's designated vertex by a path with ``path_len`` intermediate
    vertices, so consecutive cliques sit ``path_len + 1`` hops apart.
    Returns the normalized graph and the family of cliques.
    """
    if k < 1 or clique_size < 2 or path_len < 1:
        raise InputError("need k >= 1, clique_size >= 2, path_len >= 1")
    edges = []
    cliques = []
    nxt = 0
    for _ in range(k + 1):
        members = list(range(nxt, nxt + clique_size))
        nxt += clique_size
        cliques.append(members)
        edges += [(u, v) for i, u in enumerate(members) for v in members[i + 1:]]
    for a in range(k):
        chain = [cliques[a][0]] + list(range(nxt, nxt + path_len)) + [cliques[a + 1][0]]
        nxt += path_len
        edges += list(zip(chain[:-1], chain[1:]))
    g = normalize(WeightedGraph.from_edges(nxt, edges))
    return g, SubsetFamily(g, cliques)


# -- lattice meshes -----------------------------------------------------------

def _lattice_count(length: float, h: float, what: str) -> int:
    q = length / h
    n = int(round(q))
    if n < 1 or abs(n * h - length) > 1e-9:
        raise InputError(f"spacing h={h} does not divide {what}={length}")
    return n


def _lattice_graph(nx: int, ny: int, inside2, h: float):
    """4-neighbor lattice on {0..nx} x {0..ny} restricted by ``inside2``.

    ``inside2(X, Y)`` takes doubled integer coordinates; a vertex is kept when
    it lies inside, an edge when both ends and its midpoint do.
    """
    I, J = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    keep = inside2(2 * I, 2 * J)
    index = -np.ones(keep.shape, dtype=np.int64)
    index[keep] = np.arange(int(keep.sum()))
    rows, cols = [], []
    # horizontal
    both = keep[:-1, :] & keep[1:, :] & inside2(2 * I[:-1, :] + 1, 2 * J[:-1, :])
    rows.append(index[:-1, :][both])
    cols.append(index[1:, :][both])
    # vertical
    both = keep[:, :-1] & keep[:, 1:] & inside2(2 * I[:, :-1], 2 * J[:, :-1] + 1)
    rows.append(index[:, :-1][both])
    cols.append(index[:, 1:][both])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    n = int(keep.sum())
    W = sp.csr_matrix((np.ones(2 * r.size), (np.concatenate([r, c]), np.concatenate([c, r]))), shape=(n, n))
    pos = np.column_stack([I[keep], J[keep]]).astype(float) * h
    lat = np.column_stack([I[keep], J[keep]])
    return W, pos, lat


def mesh_Ma(k: int, a: float, h: float):
    """Grid graph of the comb-shaped region M_a and its two subset families.

    M_a is the union over alpha = 0..k of a tall rectangle of width
    1/(2(k+1)) and height ``a`` followed by a short rectangle of the same
    width and height a/(k+1). Returns ``(graph, A, B)``:

    * ``A`` has k+2 sets: tall rectangles 0..k-1 and two thin strips (first
      and last third) of the last tall rectangle.
    * ``B`` has k+1 sets: tall plus short rectangle alpha, half-open on the
      right so that the sets partition the vertices.

    The graph carries unit weights, lattice positions and ``spacing = h``.
    """
    if k < 1:
        raise InputError("k must be >= 1")
    if not 0 < a < 1:
        raise InputError("a must lie in (0, 1)")
    if not h > 0:
        raise InputError("h must be positive")
    u = _lattice_count(1.0 / (6 * (k + 1)), h, "1/(6(k+1))")
    w = 3 * u
    Ha = _lattice_count(a, h, "a")
    Hs = _lattice_count(a / (k + 1), h, "a/(k+1)")
    nx = 2 * (k + 1) * w
    W2 = 2 * w

    def inside2(X, Y):
        X = np.asarray(X)
        Y = np.asarray(Y)
        ok = (X >= 0) & (X <= 2 * nx) & (Y >= 0)
        alpha = np.minimum(X // (2 * W2), k)
        off = X - alpha * 2 * W2
        tall = (off <= W2) & (Y <= 2 * Ha)
        short = (off >= W2) & (Y <= 2 * Hs)
        return ok & (tall | short)

    Wm, pos, lat = _lattice_graph(nx, Ha, inside2, h)
    g = WeightedGraph(Wm, positions=pos, spacing=h)
    I = lat[:, 0]
    A = []
    for al in range(k):
        A.append(np.flatnonzero((I >= al * 2 * w) & (I <= al * 2 * w + w)))
    A.append(np.flatnonzero((I >= 6 * k * u) & (I <= (6 * k + 1) * u)))
    A.append(np.flatnonzero((I >= (6 * k + 2) * u) & (I <= (6 * k + 3) * u)))
    B = []
    for al in range(k + 1):
        lo, hi = al * 2 * w, (al + 1) * 2 * w
        sel = (I >= lo) & ((I < hi) if al < k else (I <= hi))
        B.append(np.flatnonzero(sel))
    return g, SubsetFamily(g, [s.tolist() for s in A]), SubsetFamily(g, [s.tolist() for s in B])


def mesh_Ma_spacing(k: int, m: int = 1) -> float:
    """Finest compatible spacing divided by ``m``: h = 1/(m * lcm(6(k+1), (k+1)^2))."""
    return 1.0 / (m * math.lcm(6 * (k + 1), (k + 1) ** 2))


@dataclass(frozen=True)
class MeshSpec:
    """Planar domain discretized by a square lattice of spacing ``h``.

    ``shape`` is ``square`` (side ``width``), ``rectangle`` (``width`` by
    ``height``) or ``disk`` (``radius``, centered at the origin). With
    ``boundary="designated"`` the lattice vertex boundary is returned as the
    Dirichlet set; ``"neumann"`` returns an empty boundary.
    """

    shape: str
    h: float
    width: float = 1.0
    height: float = 1.0
    radius: float = 1.0
    boundary: str = "designated"


def mesh_domain_with_boundary(spec: MeshSpec):
    """Return ``(graph, boundary)`` for a square, rectangle or disk mesh.

    Boundary vertices are lattice points with fewer than four lattice
    neighbors inside the domain.
    """
    h = spec.h
    if not h > 0:
        raise InputError("h must be positive")
    if spec.shape in ("square", "rectangle"):
        wdt = spec.width
        hgt = spec.width if spec.shape == "square" else spec.height
        nx = _lattice_count(wdt, h, "width")
        ny = _lattice_count(hgt, h, "height")

        def inside2(X, Y):
            return (X >= 0) & (X <= 2 * nx) & (Y >= 0) & (Y <= 2 * ny)

        W, pos, lat = _lattice_graph(nx, ny, inside2, h)
        full = 4
    elif spec.shape == "disk":
        R = spec.radius
        if not R > 0:
            raise InputError("radius must be positive")
        nr = int(math.floor(R / h + 1e-9))
        r2 = (R / h) ** 2 * 4 + 1e-9

        def inside2(X, Y):
            return (X - 2 * nr) ** 2 + (Y - 2 * nr) ** 2 <= r2

        W, pos, lat = _lattice_graph(2 * nr, 2 * nr, inside2, h)
        pos = pos - nr * h
        full = 4
    else:
        raise InputError(f"unknown mesh shape {spec.shape!r}")
    g = WeightedGraph(W, positions=pos, spacing=h)
    if spec.boundary == "neumann":
        return g, frozenset()
    if spec.boundary != "designated":
        raise InputError(f"unknown boundary handling {spec.boundary!r}")
    nb = np.diff(g.weights.indptr)
    return g, frozenset(np.flatnonzero(nb < full).tolist())


def inscribed_radius(g: WeightedGraph, boundary) -> int:
    """Largest hop distance from a vertex to the boundary set."""
    B = vertex_set(g, boundary, allow_empty=False)
    return int(g.hop_distances(B).max())


def inrad_check(g: WeightedGraph, boundary, p: float, N: float, estimate) -> CheckReport:
    """Check InRad <= (2 / nu^{1/p}) (1 + N log 2) on a mesh.

    ``estimate`` must be an exact or certified-upper value of the first
    Dirichlet constant with the Dirichlet condition on ``boundary``. The
    check is stated in hop units; since an upper estimate of nu lowers the
    right-hand side, a pass implies the inequality for the true constant.
    Physical units (InRad * h, nu / h^p) give the same verdict.
    """
    if getattr(estimate, "flavor", None) != "dirichlet" or getattr(estimate, "k", None) != 1:
        raise SemanticsError("inrad_check needs a first-order Dirichlet estimate")
    if estimate.certification not in ("exact", "certified_upper"):
        raise SemanticsError("inrad_check needs an exact or certified_upper estimate")
    if abs(estimate.p - p) > 1e-12:
        raise SemanticsError(f"estimate has p={estimate.p}, check requested p={p}")
    if N < 2:
        raise InputError("N must be >= 2")
    inrad = inscribed_radius(g, boundary)
    nu = float(estimate.value)
    rhs = math.inf if nu <= 0 else 2.0 / nu ** (1.0 / p) * (1.0 + N * math.log(2.0))
    h = g.spacing or 1.0
    details = {
        "p": p, "N": N, "inrad_hops": inrad, "nu_estimate": nu,
        "certification": estimate.certification,
        "rhs_hops": rhs, "margin_hops": rhs - inrad,
        "spacing": h, "inrad_physical": inrad * h,
        "nu_physical": nu / h ** p, "rhs_physical": rhs * h,
    }
    return CheckReport("inrad", status_of(inrad <= rhs), details)


# -- random graphs ------------------------------------------------------------

def _draw_weights(rng, m, weight_dist, low, high):
    if weight_dist == "unit":
        return np.ones(m)
    if weight_dist == "uniform":
        return rng.uniform(low, high, size=m)
    if weight_dist == "exponential":
        return rng.exponential(1.0, size=m) + low
    if callable(weight_dist):
        w = np.asarray(weight_dist(rng, m), dtype=float)
        if w.shape != (m,) or np.any(w <= 0):
            raise InputError("custom weight distribution must return m positive weights")
        return w
    raise InputError(f"unknown weight distribution {weight_dist!r}")


def random_weighted_graph(n: int, edge_prob: float, weight_dist="uniform", seed=0,
                          low: float = 0.1, high: float = 1.0, max_tries: int = 1000) -> WeightedGraph:
    """Seeded Erdos-Renyi graph with random positive weights, resampled until connected.

    ``weight_dist`` is ``unit``, ``uniform`` on [low, high], ``exponential``
    (shifted by ``low``) or a callable ``(rng, m) -> weights``.
    """
    if n < 2:
        raise InputError("n must be >= 2")
    if not 0 < edge_prob <= 1:
        raise InputError("edge_prob must lie in (0, 1]")
    if weight_dist == "uniform" and not 0 < low <= high:
        raise InputError("uniform weights need 0 < low <= high")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < edge_prob
        r, c = iu[keep], ju[keep]
        if r.size == 0:
            continue
        A = sp.csr_matrix((np.ones(r.size), (r, c)), shape=(n, n))
        if csgraph.connected_components(A, directed=False)[0] != 1:
            continue
        w = _draw_weights(rng, r.size, weight_dist, low, high)
        W = sp.csr_matrix((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                          shape=(n, n))
        return WeightedGraph(W)
    raise ResourceError(f"no connected sample after {max_tries} tries (n={n}, edge_prob={edge_prob})")

"""Weighted graphs, vertex measures, hop distances and neighborhoods.

A :class:`WeightedGraph` stores a symmetric nonnegative weight matrix
``mu[x, y]`` in CSR form. The vertex measure is the weighted degree
``mu(x) = sum_y mu[x, y]`` and distances are hop counts (weights never
enter the metric).
"""
from __future__ import annotations

import io
import json
import os
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import InputError

# All-pairs distances are cached only below this size.
_DENSE_DISTANCE_LIMIT = 2048


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class WeightedGraph:
    """Finite connected simple graph with symmetric edge weights.

    Parameters
    ----------
    weights : array_like or sparse matrix, shape (n, n)
        Symmetric, nonnegative, zero diagonal. Zero entries are non-edges.
    labels : sequence of str, optional
        Vertex names, used only for display and I/O.
    positions : ndarray, shape (n, 2), optional
        Physical coordinates (mesh generators set these).
    spacing : float, optional
        Physical length of one hop for mesh graphs.

    Raises
    ------
    InputError
        On negative, non-finite or asymmetric weights, self-loops,
        isolated vertices or a disconnected graph.
    """

    def __init__(self, weights, labels=None, positions=None, spacing=None):
        W = sp.csr_matrix(weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise InputError(f"weight matrix must be square, got shape {W.shape}")
        n = W.shape[0]
        if n < 2:
            raise InputError("a graph needs at least 2 vertices (mu(x) > 0 requires an edge)")
        W.eliminate_zeros()
        if not np.all(np.isfinite(W.data)):
            raise InputError("edge weights must be finite")
        if np.any(W.data < 0):
            raise InputError("edge weights must be nonnegative")
        if np.any(W.diagonal() != 0):
            raise InputError("self-loops are not allowed")
        if (W - W.T).count_nonzero() != 0:
            raise InputError("weight matrix is not symmetric")
        W.sort_indices()
        deg = np.asarray(W.sum(axis=1)).ravel()
        if np.any(deg <= 0):
            raise InputError(f"vertex {int(np.argmin(deg))} is isolated")
        ncomp, _ = csgraph.connected_components(W, directed=False)
        if ncomp != 1:
            raise InputError(f"graph is disconnected ({ncomp} components)")
        for arr in (W.data, W.indices, W.indptr):
            _readonly(arr)
        self._W = W
        self._degree = _readonly(deg)
        self.n = n
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise InputError("labels length does not match vertex count")
        self.labels = labels
        if positions is not None:
            positions = _readonly(np.array(positions, dtype=float))
            if positions.shape[0] != n:
                raise InputError("positions length does not match vertex count")
        self.positions = positions
        self.spacing = None if spacing is None else float(spacing)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], **kwargs) -> "WeightedGraph":
        """Build from ``(u, v, w)`` or ``(u, v)`` triples (unit weight)."""
        rows, cols, vals = [], [], []
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if w <= 0:
                raise InputError(f"edge ({u}, {v}) has nonpositive weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge {key}")
            seen.add(key)
            rows += [u, v]
            cols += [v, u]
            vals += [w, w]
        W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        return cls(W, **kwargs)

    @classmethod
    def from_networkx(cls, G, weight="weight") -> "WeightedGraph":
        nodes = list(G.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v], d.get(weight, 1.0)) for u, v, d in G.edges(data=True)]
        return cls.from_edges(len(nodes), edges, labels=[str(v) for v in nodes])

    # -- basic data -----------------------------------------------------------

    @property
    def weights(self) -> sp.csr_matrix:
        """Read-only CSR weight matrix."""
        return self._W

    @property
    def degree(self) -> np.ndarray:
        """Vertex measure mu(x) for every vertex."""
        return self._degree

    @property
    def volume(self) -> float:
        """mu(V), twice the total edge weight."""
        return float(self._degree.sum())

    @cached_property
    def edges(self):
        """Tuple ``(u, v, w)`` of arrays listing each edge once with u < v."""
        T = sp.triu(self._W, k=1).tocoo()
        order = np.lexsort((T.col, T.row))
        return (_readonly(T.row[order].astype(np.int64)),
                _readonly(T.col[order].astype(np.int64)),
                _readonly(T.data[order].copy()))

    @cached_property
    def _adjacency(self) -> sp.csr_matrix:
        A = self._W.copy()
        A.data = np.ones_like(A.data)
        return A

    def dense_weights(self) -> np.ndarray:
        return self._W.toarray()

    def neighbors(self, x: int) -> np.ndarray:
        x = check_vertex(self, x)
        return self._W.indices[self._W.indptr[x]:self._W.indptr[x + 1]]

    def weight(self, x: int, y: int) -> float:
        check_vertex(self, x)
        check_vertex(self, y)
        return float(self._W[x, y])

    def scaled(self, factor: float) -> "WeightedGraph":
        if not factor > 0:
            raise InputError("scale factor must be positive")
        return WeightedGraph(self._W * factor, labels=self.labels,
                             positions=self.positions, spacing=self.spacing)

    # -- distances ------------------------------------------------------------

    def hop_distances(self, sources, max_radius: int | None = None) -> np.ndarray:
        """Multi-source BFS. Unreached vertices (beyond ``max_radius``) get -1."""
        src = np.unique(np.asarray(list(sources), dtype=np.int64))
        if src.size == 0:
            raise InputError("BFS needs at least one source vertex")
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[src] = 0
        frontier = src
        d = 0
        A = self._adjacency
        while frontier.size:
            d += 1
            if max_radius is not None and d > max_radius:
                break
            nb = np.unique(A[frontier].indices)
            nb = nb[dist[nb] < 0]
            dist[nb] = d
            frontier = nb
        return dist

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop distances (small graphs only)."""
        if self.n > _DENSE_DISTANCE_LIMIT:
            from .errors import ResourceError
            raise ResourceError(f"all-pairs distances limited to {_DENSE_DISTANCE_LIMIT} vertices")
        D = csgraph.shortest_path(self._adjacency, method="D", unweighted=True)
        return _readonly(D.astype(np.int64))

    @cached_property
    def diameter(self) -> int:
        if self.n <= _DENSE_DISTANCE_LIMIT:
            return int(self.distance_matrix.max())
        return int(max(self.hop_distances([x]).max() for x in range(self.n)))

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={len(self.edges[0])}, volume={self.volume:.6g})"


# -- vertex sets -------------------------------------------------------------

def check_vertex(g: WeightedGraph, x) -> int:
    try:
        xi = int(x)
    except (TypeError, ValueError):
        raise InputError(f"vertex id {x!r} is not an integer") from None
    if xi != x or not 0 <= xi < g.n:
        raise InputError(f"vertex {x!r} out of range [0, {g.n})")
    return xi


def vertex_set(g: WeightedGraph, members, allow_empty: bool = True) -> frozenset:
    """Validate ``members`` against ``g`` and return a frozenset of ints."""
    s = frozenset(check_vertex(g, x) for x in members)
    if not s and not allow_empty:
        raise InputError("vertex set must be nonempty")
    return s


def indicator(g: WeightedGraph, members) -> np.ndarray:
    m = np.zeros(g.n, dtype=bool)
    idx = list(members)
    if idx:
        m[idx] = True
    return m


# -- measures and metric ----------------------------------------------------

def vertex_weight(g: WeightedGraph, x) -> float:
    """mu(x), the weighted degree of ``x``."""
    return float(g.degree[check_vertex(g, x)])


def set_volume(g: WeightedGraph, omega) -> float:
    """mu(Omega) = sum of mu(x) over Omega; zero for the empty set."""
    s = vertex_set(g, omega)
    if not s:
        return 0.0
    return float(g.degree[list(s)].sum())


def graph_distance(g: WeightedGraph, x, y) -> int:
    x, y = check_vertex(g, x), check_vertex(g, y)
    if g.n <= _DENSE_DISTANCE_LIMIT:
        return int(g.distance_matrix[x, y])
    return int(g.hop_distances([x])[y])


def set_distance(g: WeightedGraph, A, B) -> int:
    """Minimum hop distance between members of ``A`` and ``B``."""
    A = vertex_set(g, A, allow_empty=False)
    B = vertex_set(g, B, allow_empty=False)
    if A & B:
        return 0
    if g.n <= _DENSE_DISTANCE_LIMIT:
        return int(g.distance_matrix[np.ix_(sorted(A), sorted(B))].min())
    return int(g.hop_distances(A)[sorted(B)].min())


def ball(g: WeightedGraph, A, r: int) -> frozenset:
    """Closed r-neighborhood of ``A`` in hop distance."""
    A = vertex_set(g, A, allow_empty=False)
    if r < 0 or int(r) != r:
        raise InputError(f"radius must be a nonnegative integer, got {r!r}")
    dist = g.hop_distances(A, max_radius=int(r))
    return frozenset(np.flatnonzero(dist >= 0).tolist())


def vertex_boundary(g: WeightedGraph, omega) -> frozenset:
    """Members of ``omega`` with at least one neighbor outside ``omega``."""
    s = vertex_set(g, omega)
    if not s or len(s) == g.n:
        return frozenset()
    inside = indicator(g, s)
    out_weight = g.weights @ (~inside).astype(float)
    return frozenset(np.flatnonzero(inside & (out_weight > 0)).tolist())


def interior(g: WeightedGraph, omega) -> frozenset:
    s = vertex_set(g, omega)
    return s - vertex_boundary(g, s)


def normalize(g: WeightedGraph) -> WeightedGraph:
    """Rescale every weight by one factor so that mu(V) = 1."""
    return g.scaled(1.0 / g.volume)


# -- subset families --------------------------------------------------------

class SubsetFamily:
    """Ordered family of pairwise disjoint nonempty vertex sets of one graph."""

    def __init__(self, graph: WeightedGraph, sets):
        self.graph = graph
        self.sets = tuple(vertex_set(graph, s, allow_empty=False) for s in sets)
        if not self.sets:
            raise InputError("a subset family needs at least one set")
        seen: set = set()
        for i, s in enumerate(self.sets):
            overlap = seen & s
            if overlap:
                raise InputError(f"set {i} overlaps an earlier set at vertices {sorted(overlap)}")
            seen |= s
        self.measures = _readonly(np.array([graph.degree[sorted(s)].sum() for s in self.sets]))

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, i):
        return self.sets[i]

    @property
    def union(self) -> frozenset:
        return frozenset().union(*self.sets)

    @property
    def relative_measures(self) -> np.ndarray:
        return self.measures / self.graph.volume

    @cached_property
    def pairwise_distances(self) -> np.ndarray:
        m = len(self.sets)
        out = np.zeros((m, m), dtype=np.int64)
        for i in range(m):
            d = self.graph.hop_distances(self.sets[i])
            for j in range(i + 1, m):
                out[i, j] = out[j, i] = d[sorted(self.sets[j])].min()
        return _readonly(out)

    @cached_property
    def separation(self) -> int:
        return family_separation(self)

    def to_json(self, boundary=None) -> dict:
        out = {"sets": [sorted(s) for s in self.sets]}
        if boundary is not None:
            out["boundary"] = sorted(boundary)
        return out

    def __repr__(self):
        return f"SubsetFamily(sizes={[len(s) for s in self.sets]}, measures={self.measures.tolist()})"


def family_separation(fam: SubsetFamily) -> int:
    """D({A_alpha}): minimum pairwise hop distance."""
    if len(fam) < 2:
        raise InputError("separation needs at least 2 sets")
    D = fam.pairwise_distances
    iu = np.triu_indices(len(fam), k=1)
    return int(D[iu].min())


def boundary_separation(fam: SubsetFamily, boundary) -> int:
    """Separation with respect to a designated boundary set."""
    g = fam.graph
    B = vertex_set(g, boundary, allow_empty=False)
    for i, s in enumerate(fam.sets):
        if s & B:
            raise InputError(f"set {i} intersects the boundary")
    dB = g.hop_distances(B)
    to_boundary = min(int(dB[sorted(s)].min()) for s in fam.sets)
    if len(fam) >= 2:
        return min(to_boundary, family_separation(fam))
    return to_boundary


# -- file formats -----------------------------------------------------------

def read_graph_tsv(source) -> WeightedGraph:
    """Parse ``u<TAB>v<TAB>w`` edge lines; ``#`` starts a comment line.

    ``source`` is a path or a file-like object. Errors report the line number.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return read_graph_tsv(fh)
    rows, cols, vals = [], [], []
    seen: dict = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 3:
            raise InputError(f"line {lineno}: expected 'u<TAB>v<TAB>w', got {line!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise InputError(f"line {lineno}: cannot parse {line!r}") from None
        if u < 0 or v < 0:
            raise InputError(f"line {lineno}: negative vertex id")
        if u == v:
            raise InputError(f"line {lineno}: self-loop at vertex {u}")
        if not (np.isfinite(w) and w > 0):
            raise InputError(f"line {lineno}: weight must be a positive number, got {parts[2]!r}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InputError(f"line {lineno}: duplicate edge {key} (first on line {seen[key]})")
        seen[key] = lineno
        rows += [u, v]
        cols += [v, u]
        vals += [w, w]
    if not rows:
        raise InputError("graph file contains no edges")
    n = max(max(rows), max(cols)) + 1
    present = np.zeros(n, dtype=bool)
    present[rows] = True
    if not present.all():
        raise InputError(f"vertex {int(np.argmin(present))} has no edges (isolated vertices are not allowed)")
    return WeightedGraph(sp.csr_matrix((vals, (rows, cols)), shape=(n, n)))


def format_graph_tsv(g: WeightedGraph) -> str:
    buf = io.StringIO()
    buf.write(f"# n={g.n}\n")
    for u, v, w in zip(*g.edges):
        buf.write(f"{int(u)}\t{int(v)}\t{float(w)!r}\n")
    return buf.getvalue()


def write_graph_tsv(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph_tsv(g))


def read_family_json(source, g: WeightedGraph):
    """Return ``(family, boundary)``; ``boundary`` is None when absent."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return read_family_json(fh, g)
    try:
        data = json.load(source)
    except json.JSONDecodeError as exc:
        raise InputError(f"family file line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict) or "sets" not in data:
        raise InputError("family file must be an object with a 'sets' list")
    fam = SubsetFamily(g, data["sets"])
    boundary = data.get("boundary")
    if boundary is not None:
        boundary = vertex_set(g, boundary, allow_empty=False)
    return fam, boundary


def write_family_json(fam: SubsetFamily, path, boundary=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fam.to_json(boundary), fh)
        fh.write("\n")

"""Discrete p-Poincare constants: quotients, certified upper bounds, brute force.

Three flavors share one quotient shape ``E_p(phi) / (2 sum |psi|^p mu)`` with
``E_p(phi) = sum_{x,y} |phi(y) - phi(x)|^p mu_xy`` over ordered pairs:

* ``neumann``: psi = phi - mean(phi), infimum over k-dim subspaces free of constants;
* ``modified``: psi = phi, infimum over (k+1)-dim subspaces;
* ``dirichlet``: functions on Omega vanishing on the clamped set, energy over
  edges inside Omega, infimum over k-dim subspaces.

Every estimate is tagged ``exact``, ``certified_upper`` or ``heuristic``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy import optimize

from .errors import InputError, ResourceError, SemanticsError
from .graph_core import WeightedGraph, indicator, vertex_boundary, vertex_set
from .reporting import CheckReport, FAIL, PASS, status_of
from .spectral import dirichlet_spectrum, full_spectrum, partial_spectrum

FLAVORS = ("neumann", "modified", "dirichlet")
CERTIFICATIONS = ("exact", "certified_upper", "heuristic")

BRUTE_MAX_VERTICES = 6
BRUTE_MAX_K = 2
BRUTE_MAX_LEVELS = 9


@dataclass
class PEstimate:
    """Value of a p-Poincare constant with its certification.

    ``witness`` is an (n, d) array whose columns span the subspace realizing
    ``value`` (d = 1 for a single function).
    """

    value: float
    p: float
    k: int
    flavor: str
    certification: str
    witness: np.ndarray | None = None
    omega: frozenset | None = None
    clamp: frozenset | None = None
    grid_levels: int | None = None
    resolution: float | None = None
    method: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise InputError(f"unknown flavor {self.flavor!r}")
        if self.certification not in CERTIFICATIONS:
            raise InputError(f"unknown certification {self.certification!r}")

    def to_json(self, include_witness: bool = True) -> dict:
        out = {
            "value": float(self.value), "p": float(self.p), "k": int(self.k),
            "flavor": self.flavor, "certification": self.certification, "method": self.method,
        }
        if self.omega is not None:
            out["omega"] = sorted(self.omega)
        if self.clamp is not None:
            out["clamp"] = sorted(self.clamp)
        if self.grid_levels is not None:
            out["grid_levels"] = int(self.grid_levels)
            out["resolution"] = float(self.resolution)
        if include_witness and self.witness is not None:
            out["witness"] = [[float(v) for v in col] for col in np.atleast_2d(self.witness.T)]
        out.update(self.extra)
        return out


# -- domains ------------------------------------------------------------------

@dataclass(frozen=True)
class _Domain:
    """Free coordinates and energy terms for one flavor."""

    flavor: str
    free: np.ndarray        # vertex ids carrying unknowns
    eu: np.ndarray          # edge endpoints (indices into V)
    ev: np.ndarray
    ew: np.ndarray
    mass: np.ndarray        # mu(x) over the denominator support
    support: np.ndarray     # vertex ids entering the denominator
    omega: frozenset | None
    clamp: frozenset | None
    total: float            # mu(V) for mean-centering


def _domain(g: WeightedGraph, flavor: str, omega=None, clamp=None) -> _Domain:
    if flavor not in FLAVORS:
        raise InputError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    u, v, w = g.edges
    allv = np.arange(g.n)
    if flavor != "dirichlet":
        if omega is not None:
            raise InputError(f"{flavor} flavor takes no omega")
        return _Domain(flavor, allv, u, v, w, g.degree, allv, None, None, g.volume)
    if omega is None:
        raise InputError("dirichlet flavor needs omega")
    om = vertex_set(g, omega, allow_empty=False)
    cl = vertex_boundary(g, om) if clamp is None else vertex_set(g, clamp)
    if not cl <= om:
        raise InputError("clamped vertices must lie inside omega")
    free = np.array(sorted(om - cl), dtype=np.int64)
    if free.size == 0:
        raise InputError("dirichlet flavor: omega has no free (interior) vertex")
    inside = indicator(g, om)
    keep = inside[u] & inside[v]
    return _Domain(flavor, free, u[keep], v[keep], w[keep], g.degree[free], free,
                   frozenset(om), frozenset(cl), g.volume)


def _lift(g, dom: _Domain, x: np.ndarray) -> np.ndarray:
    """Embed free-coordinate vectors (m, nf) or (nf,) into functions on V."""
    x = np.asarray(x, dtype=float)
    if dom.free.size == g.n:
        return x
    out = np.zeros(x.shape[:-1] + (g.n,))
    out[..., dom.free] = x
    return out


def _energy_terms(dom, Phi, p):
    """Numerator (edge sum, each edge once) and denominator for rows of Phi."""
    d = Phi[..., dom.eu] - Phi[..., dom.ev]
    num = (np.abs(d) ** p * dom.ew).sum(axis=-1)
    vals = Phi[..., dom.support]
    if dom.flavor == "neumann":
        mean = (Phi * dom.mass).sum(axis=-1, keepdims=True) / dom.total
        vals = vals - mean
    den = (np.abs(vals) ** p * dom.mass).sum(axis=-1)
    return num, den, vals


def rayleigh_p(g: WeightedGraph, phi, p: float, flavor: str = "neumann", omega=None, clamp=None) -> float:
    """p-Rayleigh quotient of ``phi`` (a function on all of V).

    Raises InputError when the denominator vanishes or, for the dirichlet
    flavor, when ``phi`` is nonzero on the clamped set.
    """
    _check_p(p)
    dom = _domain(g, flavor, omega, clamp)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (g.n,):
        raise InputError(f"function must have length {g.n}")
    if flavor == "dirichlet":
        cl = sorted(dom.clamp)
        scale = np.abs(phi[sorted(dom.omega)]).max()
        if cl and np.abs(phi[cl]).max() > 1e-12 * max(scale, 1e-300):
            raise InputError("dirichlet flavor: function must vanish on the clamped set")
    num, den, vals = _energy_terms(dom, phi, p)
    ref = np.abs(phi[dom.support]).max() if dom.support.size else 0.0
    if np.abs(vals).max() <= 1e-12 * ref or den <= 0:
        what = "nonconstant" if flavor == "neumann" else "nonzero"
        raise InputError(f"{flavor} quotient has zero denominator (function must be {what})")
    return float(num / den)


def _rayleigh_rows(g, dom, Phi, p):
    """Quotients for each row of Phi (functions on V); zero-denominator rows give inf."""
    num, den, vals = _energy_terms(dom, Phi, p)
    ref = np.abs(Phi[..., dom.support]).max(axis=-1)
    bad = (np.abs(vals).max(axis=-1) <= 1e-12 * ref) | (den <= 0)
    out = np.where(bad, np.inf, num / np.where(bad, 1.0, den))
    return out


def _check_p(p):
    if not (isinstance(p, (int, float, np.floating)) and p >= 1 and math.isfinite(p)):
        raise InputError(f"p must be a finite real >= 1, got {p!r}")


def _subspace_dim(flavor, k):
    return k + 1 if flavor == "modified" else k


# -- subspace suprema -----------------------------------------------------------

def _quadratic_forms(g, dom, B):
    """Stiffness and mass Gram matrices of the columns of B (functions on V)."""
    d = B[dom.eu] - B[dom.ev]
    Kq = (d * dom.ew[:, None]).T @ d
    vals = B[dom.support]
    if dom.flavor == "neumann":
        vals = vals - (dom.mass @ vals) / dom.total
    Mq = (vals * dom.mass[:, None]).T @ vals
    return Kq, Mq


def subspace_sup(g: WeightedGraph, basis, p: float, flavor: str = "neumann", omega=None, clamp=None,
                 seed: int = 0, samples: int = 512):
    """Supremum of the quotient over the span of ``basis`` columns.

    Returns ``(value, maximizer, exact)``. The value is exact for p = 2 and
    for one-dimensional spans; otherwise it is a multi-start estimate from
    below and ``exact`` is False.
    """
    _check_p(p)
    dom = _domain(g, flavor, omega, clamp)
    B = np.asarray(basis, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    d = B.shape[1]
    if d == 1:
        return rayleigh_p(g, B[:, 0], p, flavor, omega, clamp), B[:, 0].copy(), True
    if p == 2:
        Kq, Mq = _quadratic_forms(g, dom, B)
        try:
            vals, vecs = la.eigh(Kq, Mq)
        except la.LinAlgError:
            raise InputError(f"{flavor} subspace contains a function with zero denominator") from None
        return float(vals[-1]), B @ vecs[:, -1], True
    rng = np.random.default_rng(seed)

    def neg(c):
        c = np.asarray(c, dtype=float)
        phi = B @ c
        r = _rayleigh_rows(g, dom, phi[None, :], p)[0]
        return -r if np.isfinite(r) else 0.0

    if d == 2:
        th = np.linspace(0.0, np.pi, samples, endpoint=False)
        C = np.column_stack([np.cos(th), np.sin(th)])
        R = _rayleigh_rows(g, dom, C @ B.T, p)
        if np.any(np.isinf(R)):
            raise InputError(f"{flavor} subspace contains a function with zero denominator")
        i = int(np.argmax(R))
        step = np.pi / samples
        res = optimize.minimize_scalar(lambda t: neg([math.cos(t), math.sin(t)]),
                                       bounds=(th[i] - step, th[i] + step), method="bounded",
                                       options={"xatol": 1e-12})
        best_t, best = (res.x, -res.fun) if -res.fun > R[i] else (th[i], R[i])
        c = np.array([math.cos(best_t), math.sin(best_t)])
        return float(best), B @ c, False
    C = rng.standard_normal((samples * d, d))
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    R = _rayleigh_rows(g, dom, C @ B.T, p)
    if np.any(np.isinf(R)):
        raise InputError(f"{flavor} subspace contains a function with zero denominator")
    best, bestc = -np.inf, None
    for i in np.argsort(R)[::-1][:8]:
        res = optimize.minimize(neg, C[i], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        val, c = (-res.fun, res.x) if -res.fun > R[i] else (R[i], C[i])
        if val > best:
            best, bestc = val, c
    return float(best), B @ bestc, False


# -- single-function optimizer --------------------------------------------------

def _objective(g, dom, p):
    """Quotient and gradient in the free coordinates."""
    nf = dom.free.size
    full = dom.free.size == g.n
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[dom.free] = np.arange(nf)

    def f(x):
        phi = _lift(g, dom, x)
        dvec = phi[dom.eu] - phi[dom.ev]
        ad = np.abs(dvec)
        num = float((ad ** p * dom.ew).sum())
        vals = phi[dom.support]
        mean = 0.0
        if dom.flavor == "neumann":
            mean = float(dom.mass @ vals) / dom.total
        c = vals - mean
        ac = np.abs(c)
        den = float((ac ** p * dom.mass).sum())
        if den <= 1e-300:
            return 1e300, np.zeros(nf)
        gn_e = p * dom.ew * ad ** (p - 1) * np.sign(dvec)
        gnum = np.zeros(g.n)
        np.add.at(gnum, dom.eu, gn_e)
        np.add.at(gnum, dom.ev, -gn_e)
        gden_s = p * dom.mass * ac ** (p - 1) * np.sign(c)
        if dom.flavor == "neumann":
            gden_s = gden_s - dom.mass * gden_s.sum() / dom.total
        gden = np.zeros(g.n)
        gden[dom.support] = gden_s
        grad = (gnum * den - num * gden) / den ** 2
        q = num / den
        return q, (grad if full else grad[dom.free])

    return f


def _minimize_single(g, dom, p, starts, maxiter=2000):
    f = _objective(g, dom, p)
    best_q, best_x = np.inf, None
    for x0 in starts:
        x0 = np.asarray(x0, dtype=float)
        if not np.any(x0):
            continue
        q0, _ = f(x0)
        if q0 < best_q:
            best_q, best_x = q0, x0
        res = optimize.minimize(f, x0 / np.abs(x0).max(), jac=True, method="L-BFGS-B",
                                options={"maxiter": maxiter, "ftol": 1e-13, "gtol": 1e-10})
        x = res.x
        q, _ = f(x)
        if q < best_q:
            best_q, best_x = q, x
    return best_x


def _p2_start_vectors(g, dom, count):
    """Low p = 2 eigenvectors of the flavor's form (free coordinates)."""
    if dom.flavor == "dirichlet":
        m = min(count, dom.free.size)
        spec = dirichlet_spectrum(g, dom.omega, dom.clamp, k=m)
        return [spec.eigenvectors[dom.free, i] for i in range(m)]
    m = min(count + 1, g.n - 1)
    spec = full_spectrum(g) if g.n <= 400 else partial_spectrum(g, m)
    return [spec.eigenvectors[:, i] for i in range(1, spec.eigenvectors.shape[1])]


def _sweep_indicators(g, dom, vec):
    """Level-set indicators of ``vec`` (free coordinates), a few per vector."""
    order = np.argsort(vec)
    nf = vec.size
    cuts = sorted(set(int(round(t)) for t in np.linspace(1, nf - 1, min(nf - 1, 24))))
    out = []
    for c in cuts:
        x = np.zeros(nf)
        x[order[:c]] = 1.0
        out.append(x)
    return out


def nu_upper(g: WeightedGraph, k: int, p: float, flavor: str = "neumann", omega=None, clamp=None,
             restarts: int = 16, seed: int = 0) -> PEstimate:
    """Upper estimate of the k-th p-Poincare constant of the given flavor.

    p = 2 is solved exactly by the eigensolver. Otherwise one-dimensional
    problems (neumann/dirichlet with k = 1, modified with k = 0) are
    minimized directly from p = 2 eigenvectors, sweep indicators and
    ``restarts`` seeded random starts; the best function is a witness and the
    result is ``certified_upper``. Higher-dimensional problems pick the best
    candidate subspace and are only ``heuristic``.
    """
    _check_p(p)
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise InputError("k must be a nonnegative integer")
    dom = _domain(g, flavor, omega, clamp)
    dim = _subspace_dim(flavor, k)
    nf = dom.free.size
    limit = nf - 1 if flavor == "neumann" else nf
    if dim < 1:
        raise InputError(f"{flavor} flavor needs k >= 1")
    if dim > limit:
        raise InputError(f"k={k} exceeds the dimension available for the {flavor} flavor")
    common = dict(p=p, k=int(k), flavor=flavor, omega=dom.omega, clamp=dom.clamp)

    if flavor == "modified" and k == 0:
        return PEstimate(0.0, certification="exact", witness=np.ones((g.n, 1)),
                         method="constant", **common)

    if p == 2:
        if flavor == "dirichlet":
            spec = dirichlet_spectrum(g, dom.omega, dom.clamp, k=dim)
            W = spec.eigenvectors[:, :dim]
            val = spec.eigenvalues[dim - 1]
        else:
            spec = full_spectrum(g) if g.n <= 4096 else partial_spectrum(g, k)
            W = spec.eigenvectors[:, 1:k + 1] if flavor == "neumann" else spec.eigenvectors[:, :k + 1]
            val = spec.eigenvalues[k]
        return PEstimate(float(max(val, 0.0)), certification="exact", witness=W, method="eigensolver", **common)

    rng = np.random.default_rng(seed)
    p2 = _p2_start_vectors(g, dom, max(dim, 3))
    if dim == 1:
        starts = list(p2)
        for v in p2[:2]:
            starts += _sweep_indicators(g, dom, v)
            starts.append(np.sign(v) * np.abs(v) ** (1.0 / (p - 1.0)) if p > 1 else np.sign(v))
        starts += list(rng.standard_normal((restarts, nf)))
        x = _minimize_single(g, dom, p, starts)
        phi = _lift(g, dom, x)
        phi = phi / np.abs(phi).max()
        val = rayleigh_p(g, phi, p, flavor, dom.omega if flavor == "dirichlet" else None,
                         dom.clamp if flavor == "dirichlet" else None)
        return PEstimate(val, certification="certified_upper", witness=phi[:, None],
                         method="lbfgs-multistart", **common)

    # dim >= 2: candidate subspaces, heuristic suprema
    cands = []
    if flavor == "modified":
        ones = np.ones(nf)
        cands.append(np.column_stack([ones] + p2[:dim - 1]))
    else:
        cands.append(np.column_stack(p2[:dim]))
    best = None
    kw = dict(omega=dom.omega, clamp=dom.clamp) if flavor == "dirichlet" else {}
    for j, C in enumerate(cands):
        B = _lift(g, dom, C.T).T
        val, _, _ = subspace_sup(g, B, p, flavor, seed=seed + j, **kw)
        if best is None or val < best[0]:
            best = (val, B)
    return PEstimate(float(best[0]), certification="heuristic", witness=best[1],
                     method="candidate-subspaces", **common)


# -- brute force oracle ----------------------------------------------------------

def _grid_vectors(nf, levels):
    """Grid vectors in {-1..1}^nf (``levels`` points), one per ray up to sign."""
    grid = np.linspace(-1.0, 1.0, levels)
    P = np.array(list(itertools.product(range(levels), repeat=nf)), dtype=np.int64)
    X = grid[P]
    mx = np.abs(X).max(axis=1)
    X = X[mx > 0]
    mx = mx[mx > 0]
    Y = X / mx[:, None]
    first = np.argmax(np.abs(Y) > 1e-12, axis=1)
    Y *= np.sign(Y[np.arange(len(Y)), first])[:, None]
    key = np.round(Y * 720720).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return Y[np.sort(idx)], 2.0 / (levels - 1)


def _pair_sups(g, dom, p, V, j, T):
    """Grid-angle suprema over span(V[i], V[j]) for all i < j."""
    if j == 0:
        return np.empty(0)
    c, s = np.cos(T), np.sin(T)
    Phi = V[:j, None, :] * c[None, :, None] + V[j][None, None, :] * s[None, :, None]
    R = _rayleigh_rows(g, dom, Phi, p)
    return R.max(axis=1)


def _pair_sups_p2(g, dom, V, Kf, Mf, j):
    """Exact suprema over span(V[i], V[j]) at p = 2 via 2x2 generalized eigenproblems."""
    if j == 0:
        return np.empty(0)
    A = V[:j]
    b = V[j]
    KA, Kb = A @ Kf, b @ Kf
    MA, Mb = A @ Mf, b @ Mf
    k11 = np.einsum("ij,ij->i", KA, A)
    k12 = KA @ b
    k22 = float(Kb @ b)
    m11 = np.einsum("ij,ij->i", MA, A)
    m12 = MA @ b
    m22 = float(Mb @ b)
    # largest root of det(K - t M) = 0
    a2 = m11 * m22 - m12 ** 2
    a1 = -(k11 * m22 + k22 * m11 - 2 * k12 * m12)
    a0 = k11 * k22 - k12 ** 2
    disc = np.maximum(a1 ** 2 - 4 * a2 * a0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (-a1 + np.sqrt(disc)) / (2 * a2)
    return np.where(a2 > 1e-14 * np.maximum(m11 * m22, 1e-300), t, np.inf)


def _dense_forms(g, dom):
    """Full-vector quadratic forms (free coordinates) for p = 2."""
    nf = dom.free.size
    pos = np.full(g.n, -1)
    pos[dom.free] = np.arange(nf)
    K = np.zeros((nf, nf))
    for a, b, w in zip(dom.eu, dom.ev, dom.ew):
        ia, ib = pos[a], pos[b]
        if ia >= 0:
            K[ia, ia] += w
        if ib >= 0:
            K[ib, ib] += w
        if ia >= 0 and ib >= 0:
            K[ia, ib] -= w
            K[ib, ia] -= w
    M = np.diag(dom.mass)
    if dom.flavor == "neumann":
        mm = dom.mass[:, None]
        M = M - mm @ mm.T / dom.total
    return K, M


def _resolution(g, dom, p, phi_free, h, inner):
    """First-order estimate of how much a +-h/2 coordinate shift can lower the value."""
    base = inner(phi_free)
    tot = 0.0
    for i in range(phi_free.size):
        worst = 0.0
        for s in (-0.5 * h, 0.5 * h):
            x = phi_free.copy()
            x[i] += s
            v = inner(x)
            if np.isfinite(v):
                worst = max(worst, abs(v - base))
        tot += worst
    return tot


def brute_force_nu(g: WeightedGraph, k: int, p: float, flavor: str = "neumann", grid_levels: int = 5,
                   omega=None, clamp=None, angles: int = 181) -> PEstimate:
    """Quantized exhaustive minimization for tiny graphs.

    Candidate functions take values on ``grid_levels`` equally spaced points
    of [-1, 1] at every free vertex. For spans of dimension 2 the supremum is
    taken on ``angles`` equally spaced directions (exact at p = 2). Grids with
    levels 3, 5, 9 are nested, so their values are non-increasing.
    ``resolution`` is a first-order estimate of the quantization error.
    """
    _check_p(p)
    if g.n > BRUTE_MAX_VERTICES:
        raise ResourceError(f"brute force limited to {BRUTE_MAX_VERTICES} vertices")
    if k > BRUTE_MAX_K:
        raise ResourceError(f"brute force limited to k <= {BRUTE_MAX_K}")
    if not 2 <= grid_levels <= BRUTE_MAX_LEVELS:
        raise ResourceError(f"grid_levels must lie in [2, {BRUTE_MAX_LEVELS}]")
    dom = _domain(g, flavor, omega, clamp)
    dim = _subspace_dim(flavor, k)
    nf = dom.free.size
    limit = nf - 1 if flavor == "neumann" else nf
    if dim < 1 or dim > limit:
        raise InputError(f"k={k} is out of range for the {flavor} flavor on this domain")
    if dim > 2:
        raise ResourceError("brute force handles subspaces of dimension <= 2")
    common = dict(p=p, k=int(k), flavor=flavor, omega=dom.omega, clamp=dom.clamp,
                  grid_levels=grid_levels)
    V, h = _grid_vectors(nf, grid_levels)
    Phi = _lift(g, dom, V)
    Q = _rayleigh_rows(g, dom, Phi, p)

    def q_free(x):
        return _rayleigh_rows(g, dom, _lift(g, dom, x)[None, :], p)[0]

    if dim == 1:
        i = int(np.argmin(Q))
        if not np.isfinite(Q[i]):
            raise InputError("no admissible grid function")
        res = _resolution(g, dom, p, V[i], h, q_free)
        return PEstimate(float(Q[i]), certification="exact", witness=Phi[i][:, None],
                         resolution=res, method="brute-force", **common)

    order = np.argsort(Q, kind="stable")
    V, Phi, Q = V[order], Phi[order], Q[order]
    T = np.linspace(0.0, np.pi, angles, endpoint=False)
    if p == 2:
        Kf, Mf = _dense_forms(g, dom)
    best, pair = np.inf, None
    for j in range(len(V)):
        if not Q[j] < best:
            break
        if p == 2:
            s = _pair_sups_p2(g, dom, V, Kf, Mf, j)
        else:
            s = _pair_sups(g, dom, p, Phi, j, T)
        if s.size:
            i = int(np.argmin(s))
            if s[i] < best:
                best, pair = float(s[i]), (i, j)
    if pair is None:
        raise InputError("no admissible pair of grid functions")
    B = np.column_stack([Phi[pair[0]], Phi[pair[1]]])
    kw = dict(omega=dom.omega, clamp=dom.clamp) if flavor == "dirichlet" else {}
    refined, arg, _ = subspace_sup(g, B, p, flavor, **kw) if p != 2 else (best, None, True)
    angular = max(0.0, refined - best)
    # sensitivity: perturb the second basis vector, re-evaluating the span supremum
    vi, vj = V[pair[0]], V[pair[1]]

    def span_sup(x):
        if p == 2:
            VV = np.vstack([vi, x])
            return _pair_sups_p2(g, dom, VV, Kf, Mf, 1)[0]
        PP = _lift(g, dom, np.vstack([vi, x]))
        return _pair_sups(g, dom, p, PP, 1, T)[0]

    def span_sup_first(x):
        if p == 2:
            VV = np.vstack([x, vj])
            return _pair_sups_p2(g, dom, VV, Kf, Mf, 1)[0]
        PP = _lift(g, dom, np.vstack([x, vj]))
        return _pair_sups(g, dom, p, PP, 1, T)[0]

    res = (_resolution(g, dom, p, vj, h, span_sup) + _resolution(g, dom, p, vi, h, span_sup_first)
           + angular)
    return PEstimate(best, certification="exact", witness=B, resolution=float(res),
                     method="brute-force", extra={"angles": angles}, **common)


# -- checks -------------------------------------------------------------------------

def _tol(est):
    if est.certification == "exact" and est.resolution is not None:
        return est.resolution
    return 1e-9 * max(1.0, abs(est.value))


def sandwich_check(g: WeightedGraph, k: int, p: float, nu: PEstimate | None = None,
                   nu_hat: PEstimate | None = None, grid_levels: int = 5) -> CheckReport:
    """Check nu_{k,p} <= nu_hat_{k,p} <= 2^p nu_{k,p}.

    Estimates are computed when not supplied: eigensolver at p = 2, brute
    force on graphs with at most 6 vertices otherwise. At p = 2 the two
    constants must agree to 1e-8 relative.
    """
    _check_p(p)
    if nu is None or nu_hat is None:
        if p == 2:
            nu = nu or nu_upper(g, k, 2, "neumann")
            nu_hat = nu_hat or nu_upper(g, k, 2, "modified")
        elif g.n <= BRUTE_MAX_VERTICES:
            nu = nu or brute_force_nu(g, k, p, "neumann", grid_levels)
            nu_hat = nu_hat or brute_force_nu(g, k, p, "modified", grid_levels)
        else:
            raise ResourceError("p != 2 sandwich needs supplied estimates beyond brute-force size")
    if (nu.flavor, nu_hat.flavor) != ("neumann", "modified"):
        raise SemanticsError("sandwich_check needs a neumann and a modified estimate")
    if nu.certification == "heuristic" and nu_hat.certification == "heuristic":
        raise SemanticsError("refusing to compare a heuristic estimate against a heuristic estimate")
    if nu.k != k or nu_hat.k != k or nu.p != p or nu_hat.p != p:
        raise SemanticsError("estimates do not match the requested k and p")
    t1, t2 = _tol(nu), _tol(nu_hat)
    lo_margin = nu_hat.value - nu.value + (t1 + t2)
    hi_margin = 2 ** p * nu.value - nu_hat.value + (2 ** p * t1 + t2)
    details = {"k": k, "p": p, "nu": nu.value, "nu_hat": nu_hat.value,
               "nu_certification": nu.certification, "nu_hat_certification": nu_hat.certification,
               "tolerance": [t1, t2], "lower_margin": lo_margin, "upper_margin": hi_margin,
               "factor": 2 ** p}
    ok = lo_margin >= 0 and hi_margin >= 0
    exact_both = nu.certification == "exact" and nu_hat.certification == "exact"
    if p == 2 and exact_both and nu.resolution is None and nu_hat.resolution is None:
        rel = abs(nu.value - nu_hat.value) / max(abs(nu.value), 1e-300)
        details["equality_relative_gap"] = rel
        ok = ok and rel <= 1e-8
    if not exact_both and not ok:
        # one side is only an upper estimate; failure cannot be certified
        return CheckReport("sandwich", "inconclusive", details)
    return CheckReport("sandwich", status_of(ok), details)


def is_median(g: WeightedGraph, phi, med: float, tol: float = 1e-12) -> bool:
    phi = np.asarray(phi, dtype=float)
    half = g.volume / 2
    up = g.degree[phi >= med].sum()
    down = g.degree[phi <= med].sum()
    return up >= half - tol * g.volume and down >= half - tol * g.volume


def median_poincare_check(g: WeightedGraph, phi, med: float, I1: float | None = None) -> CheckReport:
    """Check I_1 * sum |phi - med| mu <= (1/2) sum_{x,y} |phi(y) - phi(x)| mu_xy.

    ``I1`` defaults to the exhaustive Cheeger constant (graphs up to 12 vertices).
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (g.n,):
        raise InputError(f"function must have length {g.n}")
    if not is_median(g, phi, med):
        raise InputError(f"{med} is not a median of the function under mu")
    if I1 is None:
        from .multiway import multiway_constant
        I1 = multiway_constant(g, 1, "exhaustive").value
    u, v, w = g.edges
    rhs = float((np.abs(phi[u] - phi[v]) * w).sum())
    lhs = float(I1 * (np.abs(phi - med) * g.degree).sum())
    tol = 1e-12 * max(1.0, abs(rhs))
    return CheckReport("median_poincare", PASS if lhs <= rhs + tol else FAIL,
                       {"I1": I1, "median": med, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs})

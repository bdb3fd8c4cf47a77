"""Spectra of the random-walk Laplacian and its Dirichlet restrictions.

Eigenproblems are solved through the symmetric conjugate: with ``M =
diag(mu(x))`` the operator ``I - M^{-1} W`` is similar to ``I - M^{-1/2} W
M^{-1/2}``. Returned eigenvectors are mu-orthonormal vertex functions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import InputError, NumericError, ResourceError
from .graph_core import WeightedGraph, vertex_boundary, vertex_set

DENSE_BUDGET = 4096
RESIDUAL_TOL = 1e-8
# Eigenvalues closer than this are reported as one multiplet.
MULTIPLET_TOL = 1e-9


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues with their eigenvectors.

    ``eigenvectors[:, i]`` is a function on all of V (zero off the free set
    for Dirichlet kinds), normalized so that sum_x phi(x)^2 mu(x) = 1.
    ``residuals[i]`` is ``max|L phi - lambda phi| / max|phi|`` over the free set.
    """

    kind: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residuals: np.ndarray
    omega: frozenset | None = None
    clamp: frozenset | None = None
    free: tuple = field(default=())

    def __len__(self):
        return len(self.eigenvalues)

    def multiplets(self, tol: float = MULTIPLET_TOL):
        """Group indices of eigenvalues within ``tol`` of their predecessor."""
        groups, cur = [], [0]
        for i in range(1, len(self.eigenvalues)):
            if self.eigenvalues[i] - self.eigenvalues[i - 1] <= tol:
                cur.append(i)
            else:
                groups.append(cur)
                cur = [i]
        groups.append(cur)
        return groups

    def to_json(self, include_vectors: bool = False) -> dict:
        out = {"kind": self.kind, "eigenvalues": [float(v) for v in self.eigenvalues]}
        if include_vectors and self.eigenvectors is not None:
            out["eigenvectors"] = [[float(v) for v in col] for col in self.eigenvectors.T]
        return out


def laplacian_apply(g: WeightedGraph, phi) -> np.ndarray:
    """Return x -> phi(x) - sum_y phi(y) mu_xy / mu(x)."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape[0] != g.n:
        raise InputError(f"function has length {phi.shape[0]}, graph has {g.n} vertices")
    return phi - (g.weights @ phi) / (g.degree if phi.ndim == 1 else g.degree[:, None])


def laplacian_matrix(g: WeightedGraph) -> sp.csr_matrix:
    """Sparse random-walk Laplacian I - M^{-1} W."""
    return (sp.identity(g.n, format="csr") - sp.diags(1.0 / g.degree) @ g.weights).tocsr()


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # first entry within 1e-9 of the largest magnitude, so near-ties resolve by index
    a = np.abs(vecs)
    idx = np.argmax(a >= a.max(axis=0) * (1 - 1e-9), axis=0)
    s = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    s[s == 0] = 1.0
    return vecs * s


def _relative_residuals(apply, vals, vecs):
    R = apply(vecs) - vecs * vals
    scale = np.abs(vecs).max(axis=0)
    scale[scale == 0] = 1.0
    return np.abs(R).max(axis=0) / scale


def _check_residuals(res, vals, what):
    bad = res > RESIDUAL_TOL * np.maximum(1.0, np.abs(vals))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NumericError(f"{what}: eigenpair {i} residual {res[i]:.3e} exceeds tolerance",
                           residual=float(res[i]))


def full_spectrum(g: WeightedGraph, budget: int = DENSE_BUDGET, vectors: bool = True) -> SpectrumResult:
    """All |V| eigenpairs of the Laplacian by a dense symmetric solve."""
    if g.n > budget:
        raise ResourceError(f"{g.n} vertices exceed the dense budget {budget}; use partial_spectrum")
    s = 1.0 / np.sqrt(g.degree)
    S = g.dense_weights() * s[:, None] * s[None, :]
    L = np.eye(g.n) - S
    if vectors:
        vals, psi = la.eigh(L)
        vecs = _fix_signs(psi * s[:, None])
        res = _relative_residuals(lambda V: laplacian_apply(g, V), vals, vecs)
        _check_residuals(res, vals, "full_spectrum")
    else:
        vals = la.eigh(L, eigvals_only=True)
        vecs, res = None, np.zeros_like(vals)
    return SpectrumResult("neumann", vals, vecs, res)


def partial_spectrum(g: WeightedGraph, k: int, maxiter: int | None = None, tol: float = 1e-12) -> SpectrumResult:
    """Smallest ``k + 1`` eigenpairs by shift-invert Lanczos.

    The zero mode is known in closed form (constants), so it is inserted
    analytically and the iterative solve works on its orthogonal complement.
    """
    if not 1 <= k < g.n:
        raise InputError(f"k must satisfy 1 <= k < |V| = {g.n}")
    sq = np.sqrt(g.degree)
    s = 1.0 / sq
    L = sp.identity(g.n, format="csc") - sp.diags(s) @ g.weights @ sp.diags(s)
    psi0 = sq / np.linalg.norm(sq)
    if k + 1 >= g.n - 1 or g.n < 20:
        # ARPACK needs room; tiny problems go dense.
        full = full_spectrum(g)
        return SpectrumResult("neumann", full.eigenvalues[:k + 1].copy(),
                              full.eigenvectors[:, :k + 1].copy(), full.residuals[:k + 1].copy())
    shift = -1e-3
    lu = spla.splu((L - shift * sp.identity(g.n, format="csc")).tocsc())

    def op(x):
        y = lu.solve(x - psi0 * (psi0 @ x))
        return y - psi0 * (psi0 @ y)

    OP = spla.LinearOperator((g.n, g.n), matvec=op, dtype=float)
    v0 = np.random.default_rng(0).standard_normal(g.n)
    v0 -= psi0 * (psi0 @ v0)
    try:
        mu, psi = spla.eigsh(OP, k=k, which="LA", v0=v0, maxiter=maxiter, tol=tol)
    except spla.ArpackNoConvergence as exc:
        raise NumericError(f"partial_spectrum did not converge for k={k}", residual=None) from exc
    vals = shift + 1.0 / mu
    order = np.argsort(vals)
    vals, psi = vals[order], psi[:, order]
    psi -= np.outer(psi0, psi0 @ psi)
    psi, _ = np.linalg.qr(psi)
    # Rayleigh-Ritz on the converged subspace cleans up rotations inside multiplets.
    H = psi.T @ (L @ psi)
    vals, Q = la.eigh((H + H.T) / 2)
    psi = psi @ Q
    vals = np.concatenate([[0.0], vals])
    vecs = _fix_signs(np.column_stack([psi0, psi]) * s[:, None])
    res = _relative_residuals(lambda V: laplacian_apply(g, V), vals, vecs)
    _check_residuals(res, vals, "partial_spectrum")
    return SpectrumResult("neumann", vals, vecs, res)


def dirichlet_forms(g: WeightedGraph, omega, clamp=None):
    """Stiffness/mass data of the Dirichlet form on ``omega``.

    Returns ``(free, K, m)`` where ``free`` lists the unclamped vertices,
    ``K = diag(sum_{y in omega} mu_xy) - W[free, free]`` (sparse) and ``m`` the
    vertex measures on ``free``. Only edges with both ends in ``omega`` count.
    """
    omega = vertex_set(g, omega, allow_empty=False)
    clamp = vertex_boundary(g, omega) if clamp is None else vertex_set(g, clamp)
    if not clamp <= omega:
        raise InputError("clamped vertices must lie inside omega")
    free = np.array(sorted(omega - clamp), dtype=np.int64)
    if free.size == 0:
        raise InputError("no free vertices: the interior of omega is empty")
    om = np.array(sorted(omega), dtype=np.int64)
    W = g.weights
    d_omega = np.asarray(W[free][:, om].sum(axis=1)).ravel()
    K = (sp.diags(d_omega) - W[free][:, free]).tocsr()
    return free, K, g.degree[free], omega, clamp


def dirichlet_spectrum(g: WeightedGraph, omega, clamp=None, k: int | None = None,
                       budget: int = DENSE_BUDGET) -> SpectrumResult:
    """Eigenpairs of the Dirichlet form on ``omega``.

    Functions vanish on ``clamp`` (default: the vertex boundary of ``omega``).
    With ``k`` given, only the ``k`` smallest are returned; a sparse solver
    is used when the free set exceeds ``budget``.
    """
    free, K, m, omega, clamp = dirichlet_forms(g, omega, clamp)
    nf = free.size
    s = 1.0 / np.sqrt(m)
    if k is not None and not 1 <= k <= nf:
        raise InputError(f"k must satisfy 1 <= k <= {nf} (free vertices)")
    if nf <= budget:
        A = K.toarray() * s[:, None] * s[None, :]
        if k is None:
            vals, psi = la.eigh(A)
        else:
            vals, psi = la.eigh(A, subset_by_index=[0, k - 1])
    else:
        if k is None:
            raise ResourceError(f"{nf} free vertices exceed the dense budget {budget}; pass k")
        A = (sp.diags(s) @ K @ sp.diags(s)).tocsc()
        shift = -1e-3
        try:
            mu, psi = spla.eigsh(A, k=k, sigma=shift, which="LM",
                                 v0=np.ones(nf), tol=1e-12)
        except spla.ArpackNoConvergence as exc:
            raise NumericError("dirichlet_spectrum did not converge") from exc
        order = np.argsort(mu)
        vals, psi = mu[order], psi[:, order]
    vf = psi * s[:, None]
    vf = _fix_signs(vf)
    res = _relative_residuals(lambda V: (K @ V) / m[:, None], vals, vf)
    _check_residuals(res, vals, "dirichlet_spectrum")
    vecs = np.zeros((g.n, vf.shape[1]))
    vecs[free] = vf
    return SpectrumResult("dirichlet", vals, vecs, res, omega=frozenset(omega),
                          clamp=frozenset(clamp), free=tuple(free.tolist()))

"""Normalized Laplacian, bottom-k eigenpairs and the degree-scaled spectral embedding."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .graph import WeightedGraph

log = logging.getLogger(__name__)

DENSE_LIMIT = 2048
DEFAULT_TOL = 1e-8
# rows of V' with norm below this are treated as u_i = 0
ZERO_ROW = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, message, worst_residual):
        super().__init__(f"{message} (worst residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


def normalized_laplacian(g: WeightedGraph) -> sp.csr_matrix:
    """``I - D^{-1/2} A D^{-1/2}`` as a sparse symmetric matrix."""
    inv_sqrt = 1.0 / np.sqrt(g.degrees)
    scaled = sp.diags(inv_sqrt) @ g.adjacency @ sp.diags(inv_sqrt)
    lap = sp.identity(g.n, format="csr") - scaled
    return sp.csr_matrix((lap + lap.T) * 0.5)


def _orthonormalize(block, basis, rng):
    """Orthonormalize ``block`` against ``basis`` and itself (two passes)."""
    for _ in range(2):
        if basis is not None and basis.shape[1]:
            block = block - basis @ (basis.T @ block)
    q, r = np.linalg.qr(block)
    diag = np.abs(np.diag(r))
    scale = max(diag.max(initial=0.0), 1.0)
    weak = diag < 1e-10 * scale
    if np.any(weak):
        # deflated directions are replaced with fresh random ones
        q[:, weak] = rng.standard_normal((q.shape[0], int(weak.sum())))
        return _orthonormalize(q, basis, rng)
    if basis is not None and basis.shape[1]:
        q = q - basis @ (basis.T @ q)
        q, _ = np.linalg.qr(q)
    return q


def lanczos_bottom_k(op, k, tol=DEFAULT_TOL, seed=0, block=None, max_basis=None, max_restarts=200):
    """Smallest ``k`` eigenpairs of a symmetric operator by block Lanczos.

    Full reorthogonalization against the whole basis at every step; thick
    restart keeps the current best Ritz vectors once the basis reaches
    ``max_basis`` columns.  The block size (default ``k + 2``) bounds the
    eigenvalue multiplicity that is resolved reliably.

    :param op: object with ``shape`` and ``@`` against an ``(n, b)`` array
    :return: ``(eigenvalues, eigenvectors, residuals)``
    """
    n = op.shape[0]
    rng = np.random.default_rng(seed)
    b = min(n, block or k + 2)
    keep = min(n, k + b)
    max_basis = min(n, max_basis or max(4 * keep, keep + 6 * b, 60))
    if max_basis < keep + b and max_basis < n:
        max_basis = min(n, keep + b)

    basis = _orthonormalize(rng.standard_normal((n, b)), None, rng)
    image = op @ basis
    worst = np.inf
    for _ in range(max_restarts):
        while basis.shape[1] < max_basis:
            # next block: image of the newest block, projected out of the basis
            fresh = image[:, -b:] if basis.shape[1] >= b else image
            room = max_basis - basis.shape[1]
            nxt = _orthonormalize(fresh[:, : min(b, room)], basis, rng)
            basis = np.hstack([basis, nxt])
            image = np.hstack([image, op @ nxt])
        h = basis.T @ image
        h = 0.5 * (h + h.T)
        theta, y = np.linalg.eigh(h)
        ritz = basis @ y[:, :keep]
        ritz_image = image @ y[:, :keep]
        res = np.linalg.norm(ritz_image - ritz * theta[:keep], axis=0)
        worst = float(res[:k].max())
        if worst <= tol or basis.shape[1] >= n:
            vecs = ritz[:, :k]
            # one more Rayleigh-Ritz pass on the converged vectors tidies orthogonality
            vecs, _ = np.linalg.qr(vecs)
            img = op @ vecs
            small = 0.5 * (vecs.T @ img + img.T @ vecs)
            lam, z = np.linalg.eigh(small)
            vecs = vecs @ z
            img = img @ z
            res = np.linalg.norm(img - vecs * lam, axis=0)
            if res.max() > tol:
                raise ConvergenceError("Lanczos lost accuracy in final Rayleigh-Ritz", float(res.max()))
            return lam, vecs, res
        # thick restart: keep best Ritz vectors, continue from their residual block
        resid = ritz_image[:, :b] - ritz[:, :b] * theta[:b]
        basis = ritz
        image = ritz_image
        nxt = _orthonormalize(resid, basis, rng)
        basis = np.hstack([basis, nxt])
        image = np.hstack([image, op @ nxt])
    raise ConvergenceError(f"Lanczos did not converge in {max_restarts} restarts", worst)


def bottom_k_eigs(lap, k: int, tol: float = DEFAULT_TOL, mode: str = "auto", seed: int = 0):
    """Smallest ``k`` eigenpairs of the normalized Laplacian.

    :param mode: ``"dense"``, ``"lanczos"`` or ``"auto"`` (dense up to
        :data:`DENSE_LIMIT` vertices)
    :return: ``(eigenvalues, eigenvectors, residuals, mode_used)``
    :raises ConvergenceError: when some residual exceeds ``tol``
    """
    n = lap.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if mode == "auto":
        mode = "dense" if n <= DENSE_LIMIT else "lanczos"
    if mode == "dense":
        mat = lap.toarray() if sp.issparse(lap) else np.asarray(lap)
        lam, vecs = scipy.linalg.eigh(mat, subset_by_index=[0, k - 1])
        res = np.linalg.norm(mat @ vecs - vecs * lam, axis=0)
    elif mode == "lanczos":
        lam, vecs, res = lanczos_bottom_k(sp.csr_matrix(lap), k, tol=tol, seed=seed)
    else:
        raise ValueError(f"unknown eigensolver mode {mode!r}")
    if res.max() > tol:
        raise ConvergenceError("eigensolver residual above tolerance", float(res.max()))
    return lam, vecs, res, mode


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Bottom-``k`` spectrum and the embedding ``u_i(t) = v'_t(i) / sqrt(d_i)``."""

    k: int
    eigenvalues: np.ndarray
    embedding: np.ndarray
    residuals: np.ndarray
    zero_vertices: np.ndarray
    solver: dict = field(default_factory=dict)

    @property
    def lambda_k(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.embedding, axis=1)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "eigenvalues": self.eigenvalues.tolist(),
            "embedding": self.embedding.tolist(),
            "residuals": self.residuals.tolist(),
            "zero_vertices": self.zero_vertices.tolist(),
            "solver": dict(self.solver),
        }


def embedding(g: WeightedGraph, eigs) -> SpectralData:
    """Assemble :class:`SpectralData` from ``(eigenvalues, eigenvectors, residuals[, mode])``."""
    lam = np.array(eigs[0], dtype=np.float64)
    res = np.array(eigs[2], dtype=np.float64)
    solver = dict(eigs[3]) if len(eigs) > 3 and isinstance(eigs[3], dict) else {}
    vecs = np.asarray(eigs[1], dtype=np.float64)
    if vecs.shape[0] != g.n:
        raise ValueError("eigenvector length does not match the graph")
    u = vecs / np.sqrt(g.degrees)[:, None]
    zero = np.flatnonzero(np.linalg.norm(vecs, axis=1) <= ZERO_ROW)
    u[zero] = 0.0
    for a in (lam, u, res, zero):
        a.setflags(write=False)
    return SpectralData(int(vecs.shape[1]), lam, u, res, zero, solver)


def spectral_data(g: WeightedGraph, k: int, tol: float = DEFAULT_TOL, mode: str = "auto", seed: int = 0) -> SpectralData:
    """Laplacian, eigensolve and embedding in one call."""
    lam, vecs, res, used = bottom_k_eigs(normalized_laplacian(g), k, tol=tol, mode=mode, seed=seed)
    return embedding(g, (lam, vecs, res, {"mode": used, "seed": seed, "tol": tol}))


# --------------------------------------------------------------------------
# identity checks


def mass(g: WeightedGraph, sd: SpectralData) -> float:
    """``Σ_i d_i ||u_i||²``; equals ``k``."""
    return float(np.sum(g.degrees * np.sum(sd.embedding**2, axis=1)))


def cross_mass(g: WeightedGraph, sd: SpectralData) -> float:
    """``Σ_{i,j} d_i d_j <u_i, u_j>²`` computed as ``||Uᵀ D U||_F²``; equals ``k``."""
    gram = sd.embedding.T @ (g.degrees[:, None] * sd.embedding)
    return float(np.sum(gram**2))


def cross_mass_direct(g: WeightedGraph, sd: SpectralData) -> float:
    """Pairwise double sum, for small graphs only."""
    u = sd.embedding
    inner = u @ u.T
    return float(np.sum(np.outer(g.degrees, g.degrees) * inner**2))


def edge_energy(g: WeightedGraph, sd: SpectralData) -> float:
    """``Σ_{i~j} w_ij ||u_i - u_j||²``."""
    diff = sd.embedding[g.src] - sd.embedding[g.dst]
    return float(np.sum(g.weight * np.sum(diff**2, axis=1)))


def rayleigh_ratio(g: WeightedGraph, sd: SpectralData) -> float:
    return edge_energy(g, sd) / mass(g, sd)


def per_vector_rayleigh(g: WeightedGraph, sd: SpectralData) -> np.ndarray:
    """``Σ_{i~j} w_ij (v_t(i) - v_t(j))²`` for each embedding column ``v_t``."""
    diff = sd.embedding[g.src] - sd.embedding[g.dst]
    return (g.weight[:, None] * diff**2).sum(axis=0)


def check_identities(g: WeightedGraph, sd: SpectralData) -> dict:
    """Evaluate the embedding identities and report their deviations."""
    k = sd.k
    m = mass(g, sd)
    cm = cross_mass(g, sd)
    rr = rayleigh_ratio(g, sd)
    lam = sd.eigenvalues
    return {
        "mass": m,
        "mass_rel_err": abs(m - k) / k,
        "cross_mass": cm,
        "cross_mass_rel_err": abs(cm - k) / k,
        "rayleigh_ratio": rr,
        "rayleigh_slack": sd.lambda_k - rr,
        "lambda_1": float(lam[0]),
        "lambda_k": sd.lambda_k,
        "sorted": bool(np.all(np.diff(lam) >= -1e-12)),
        "in_range": bool(lam[0] >= -1e-8 and lam[-1] <= 2 + 1e-8),
    }


def direction_gap(ui: np.ndarray, uj: np.ndarray) -> float:
    """``2||u_i - u_j|| - ||ũ_i - ũ_j|| sqrt(||u_i||² + ||u_j||²)``; nonnegative for nonzero inputs."""
    ni, nj = np.linalg.norm(ui), np.linalg.norm(uj)
    lhs = np.linalg.norm(ui / ni - uj / nj) * np.sqrt(ni**2 + nj**2)
    return float(2 * np.linalg.norm(ui - uj) - lhs)

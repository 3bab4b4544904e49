"""Dense Hermitian linear algebra: spectral decompositions, pinching, tensor and direct sums.

Operators are plain complex ``numpy`` arrays.  Functions that need a
Hermitian input symmetrize it as ``(H + H^*)/2`` after checking that the
antihermitian part is below ``TAU_HERM``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.linalg

from . import _kernels
from ._config import CLUSTER_REL, TAU_HERM, TAU_ZERO, check_dim
from .errors import EigensolverError, NegativeEigenvalueError, ValidationError


def _square(a, name="operator"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"{name} must be a nonempty square matrix, got shape {a.shape}")
    return a


def hermitian(a, tol: float = TAU_HERM) -> np.ndarray:
    """Validate ``a`` as Hermitian and return the exactly symmetrized complex copy."""
    a = _square(a).astype(np.complex128)
    if not np.all(np.isfinite(a)):
        raise ValidationError("operator has non-finite entries")
    skew = np.abs(a - a.conj().T).max()
    if skew > tol:
        raise ValidationError(f"operator is not Hermitian (max |H - H^*| = {skew:.3e})")
    return (a + a.conj().T) / 2


def density(a, tol: float = TAU_HERM) -> np.ndarray:
    """Validate ``a`` as a density operator: Hermitian, PSD within 1e-10, unit trace."""
    rho = hermitian(a)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density operator has trace {tr!r}")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -tol:
        raise ValidationError(f"density operator has negative eigenvalue {lo:.3e}")
    return rho


def is_projector(p, tol: float = 1e-9) -> bool:
    p = np.asarray(p)
    if np.abs(p - p.conj().T).max() > tol or np.abs(p @ p - p).max() > tol:
        return False
    w = np.linalg.eigvalsh((p + p.conj().T) / 2)
    return bool(np.all(np.minimum(np.abs(w), np.abs(w - 1)) < 1e-8))


def is_test(a, tol: float = 1e-9) -> bool:
    """True when ``0 <= a <= I`` within ``tol``."""
    a = np.asarray(a)
    if np.abs(a - a.conj().T).max() > tol:
        return False
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return bool(w[0] >= -tol and w[-1] <= 1 + tol)


def _eigh(h):
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed: {exc}") from exc
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    residual = np.abs(h @ v - v * w).max(initial=0.0)
    if not np.isfinite(residual) or residual > 1e-9 * scale * max(1, h.shape[0]):
        raise EigensolverError("eigendecomposition residual too large", residual)
    return w, v


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) with their eigenprojectors.

    ``vectors`` holds an orthonormal eigenbasis ordered to match; cluster ``i``
    occupies columns ``starts[i]:starts[i+1]``.  Operators that commute with
    the decomposed one are block diagonal in this basis, which is what
    :meth:`pinch` and the hypothesis-test kernels exploit.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    starts: np.ndarray
    projectors: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        projs = []
        for i in range(len(self.eigenvalues)):
            v = self.vectors[:, self.starts[i]:self.starts[i + 1]]
            projs.append(v @ v.conj().T)
        object.__setattr__(self, "projectors", projs)

    @property
    def v(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def multiplicities(self) -> np.ndarray:
        return np.diff(self.starts)

    def reconstruct(self) -> np.ndarray:
        w = np.repeat(self.eigenvalues, self.multiplicities)
        return (self.vectors * w) @ self.vectors.conj().T

    def to_basis(self, b) -> np.ndarray:
        return self.vectors.conj().T @ b @ self.vectors

    def from_basis(self, bt) -> np.ndarray:
        return self.vectors @ bt @ self.vectors.conj().T

    def pinch_in_basis(self, b) -> np.ndarray:
        """Pinching of ``b``, returned in the eigenbasis (block diagonal)."""
        return _kernels.mask_blocks(self.to_basis(b), self.starts)

    def pinch(self, b) -> np.ndarray:
        bt = self.pinch_in_basis(b)
        out = self.from_basis(bt)
        return (out + out.conj().T) / 2 if _is_hermitian(b) else out


def _is_hermitian(b) -> bool:
    return np.abs(b - b.conj().T).max() <= TAU_HERM


def default_cluster_tol(eigenvalues) -> float:
    return CLUSTER_REL * (np.abs(eigenvalues).max(initial=0.0) + 1.0)


def _from_eigensystem(w, v, tol):
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    if tol is None:
        tol = default_cluster_tol(w)
    elif tol <= 0:
        raise ValidationError("cluster tolerance must be positive")
    starts = _kernels.cluster_starts(w, tol)
    values = np.array([w[starts[i]:starts[i + 1]].mean() for i in range(len(starts) - 1)])
    return SpectralDecomposition(values, np.ascontiguousarray(v), starts)


def spectral_decompose(h, tol: float | None = None) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalues closer than ``tol`` merged.

    ``tol`` defaults to ``1e-8 * (spectral radius + 1)``.
    """
    h = hermitian(h)
    w, v = _eigh(h)
    return _from_eigensystem(w, v, tol)


def tensor_power_decomposition(sigma, n: int, tol: float | None = None) -> SpectralDecomposition:
    """Decomposition of ``sigma^{(x)n}`` assembled from the single-copy eigensystem.

    Exact tensor-product degeneracies survive this route, whereas a direct
    eigensolve of the power would return them only up to roundoff.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    sigma = hermitian(sigma)
    check_dim(sigma.shape[0] ** n, "tensor power")
    w1, v1 = _eigh(sigma)
    w = reduce(np.kron, [w1] * n)
    v = reduce(np.kron, [v1] * n)
    return _from_eigensystem(w, v, tol)


def proj_pos(h, tau_zero: float = TAU_ZERO) -> np.ndarray:
    """Projector onto the eigenspace of strictly positive eigenvalues (``> tau_zero``)."""
    h = hermitian(h)
    w, v = _eigh(h)
    vk = v[:, w > tau_zero]
    return vk @ vk.conj().T


def pinch(a, b, tol: float | None = None) -> np.ndarray:
    """``sum_i E_i b E_i`` over the eigenprojectors of ``a``."""
    a = _square(a)
    b = _square(b)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return spectral_decompose(a, tol).pinch(b.astype(np.complex128))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr[a^* b]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    check_dim(a.shape[0] * b.shape[0], "Kronecker product")
    return np.kron(a, b)


def kron_power(a, n: int) -> np.ndarray:
    if n < 1:
        raise ValidationError("n must be >= 1")
    a = np.asarray(a)
    check_dim(a.shape[0] ** n, "Kronecker power")
    return reduce(np.kron, [a] * n)


def direct_sum(blocks) -> np.ndarray:
    blocks = [np.atleast_2d(np.asarray(b)) for b in blocks]
    if not blocks:
        raise ValidationError("direct sum of an empty list")
    check_dim(sum(b.shape[0] for b in blocks), "direct sum")
    return scipy.linalg.block_diag(*blocks)


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(np.asarray(a), compute_uv=False).sum())


def matrix_sqrt(h, tau_zero: float = TAU_ZERO) -> np.ndarray:
    """Square root of a PSD operator; eigenvalues in ``[-tau_zero, 0)`` are clamped to zero."""
    h = hermitian(h)
    w, v = _eigh(h)
    if w[0] < -tau_zero:
        raise NegativeEigenvalueError(w[0])
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    return (root + root.conj().T) / 2


def support_power(h, s: float, tau_zero: float = TAU_ZERO) -> np.ndarray:
    """``h^s`` on the support of PSD ``h``; the kernel is mapped to zero for every ``s``."""
    h = hermitian(h)
    w, v = _eigh(h)
    keep = w > tau_zero
    ws = np.zeros_like(w)
    ws[keep] = w[keep] ** s
    return (v * ws) @ v.conj().T


def support_log(h, tau_zero: float = TAU_ZERO) -> np.ndarray:
    """Matrix logarithm on the support of PSD ``h``, zero on the kernel."""
    h = hermitian(h)
    w, v = _eigh(h)
    keep = w > tau_zero
    lw = np.zeros_like(w)
    lw[keep] = np.log(w[keep])
    return (v * lw) @ v.conj().T

"""Inner loops shared by pinching, positive-part tests and greedy packing.

Every kernel has a numba version and a numpy version with identical
semantics.  The numba versions are used when numba imports and
``CQPACK_NUMBA`` is not ``0``; :func:`set_backend` switches at runtime.

Block structure is passed as ``starts``: an int64 array of length ``v + 1``
with ``starts[b]:starts[b+1]`` the index range of block ``b``.
"""
from __future__ import annotations

import numpy as np

from ._config import numba_requested

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


# ---------------------------------------------------------------- numpy path

def _np_cluster_starts(values, tol):
    n = values.shape[0]
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    breaks = np.flatnonzero(values[:-1] - values[1:] > tol) + 1
    return np.concatenate(([0], breaks, [n])).astype(np.int64)


def _block_labels(starts):
    return np.repeat(np.arange(starts.shape[0] - 1), np.diff(starts))


def _np_mask_blocks(mat, starts):
    labels = _block_labels(starts)
    return np.where(labels[:, None] == labels[None, :], mat, 0)


def _np_positive_blocks(mat, starts, thresholds, tau):
    dim = mat.shape[0]
    proj = np.zeros((dim, dim), dtype=np.complex128)
    mass = 0.0
    for b in range(starts.shape[0] - 1):
        lo, hi = starts[b], starts[b + 1]
        w, v = np.linalg.eigh(mat[lo:hi, lo:hi])
        keep = w - thresholds[b] > tau
        if keep.any():
            vk = v[:, keep]
            proj[lo:hi, lo:hi] = vk @ vk.conj().T
            mass += w[keep].sum()
    return proj, mass


def _np_trace_products(stack, op):
    # Tr[A_k B] for each k
    return np.einsum("kij,ji->k", stack, op).real


# ---------------------------------------------------------------- numba path

if numba is not None:

    @numba.njit(cache=True)
    def _nb_cluster_starts(values, tol):
        n = values.shape[0]
        out = np.empty(n + 1, dtype=np.int64)
        if n == 0:
            out[0] = 0
            return out[:1]
        out[0] = 0
        count = 1
        for i in range(1, n):
            if values[i - 1] - values[i] > tol:
                out[count] = i
                count += 1
        out[count] = n
        return out[: count + 1]

    @numba.njit(cache=True)
    def _nb_mask_blocks(mat, starts):
        out = np.zeros_like(mat)
        for b in range(starts.shape[0] - 1):
            lo = starts[b]
            hi = starts[b + 1]
            for i in range(lo, hi):
                for j in range(lo, hi):
                    out[i, j] = mat[i, j]
        return out

    @numba.njit(cache=True)
    def _nb_positive_blocks(mat, starts, thresholds, tau):
        dim = mat.shape[0]
        proj = np.zeros((dim, dim), dtype=np.complex128)
        mass = 0.0
        for b in range(starts.shape[0] - 1):
            lo = starts[b]
            hi = starts[b + 1]
            size = hi - lo
            if size == 1:
                w0 = mat[lo, lo].real
                if w0 - thresholds[b] > tau:
                    proj[lo, lo] = 1.0
                    mass += w0
                continue
            block = np.ascontiguousarray(mat[lo:hi, lo:hi])
            w, v = np.linalg.eigh(block)
            for k in range(size):
                if w[k] - thresholds[b] > tau:
                    mass += w[k]
                    for i in range(size):
                        vi = v[i, k]
                        for j in range(size):
                            proj[lo + i, lo + j] += vi * np.conj(v[j, k])
        return proj, mass

    @numba.njit(cache=True)
    def _nb_trace_products(stack, op):
        count, dim, _ = stack.shape
        out = np.zeros(count)
        for k in range(count):
            acc = 0.0
            for i in range(dim):
                for j in range(dim):
                    acc += (stack[k, i, j] * op[j, i]).real
            out[k] = acc
        return out


_NUMPY = {
    "cluster_starts": _np_cluster_starts,
    "mask_blocks": _np_mask_blocks,
    "positive_blocks": _np_positive_blocks,
    "trace_products": _np_trace_products,
}
_NUMBA = (
    {
        "cluster_starts": _nb_cluster_starts,
        "mask_blocks": _nb_mask_blocks,
        "positive_blocks": _nb_positive_blocks,
        "trace_products": _nb_trace_products,
    }
    if numba is not None
    else None
)

_active = _NUMBA if (_NUMBA is not None and numba_requested()) else _NUMPY


def backend() -> str:
    return "numba" if _active is _NUMBA else "numpy"


def set_backend(name: str) -> None:
    global _active
    if name == "numba":
        if _NUMBA is None:
            raise RuntimeError("numba is not installed")
        _active = _NUMBA
    elif name == "numpy":
        _active = _NUMPY
    else:
        raise ValueError(f"unknown backend {name!r}")


def cluster_starts(values: np.ndarray, tol: float) -> np.ndarray:
    """Block boundaries of a descending array, splitting where a gap exceeds ``tol``."""
    return _active["cluster_starts"](np.ascontiguousarray(values, dtype=np.float64), float(tol))


def mask_blocks(mat: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Zero every entry of ``mat`` outside the diagonal blocks."""
    return _active["mask_blocks"](np.ascontiguousarray(mat, dtype=np.complex128), starts)


def positive_blocks(mat, starts, thresholds, tau):
    """Projector onto ``{mat - diag(thresholds per block) > tau}`` for block-diagonal ``mat``.

    Returns the projector and ``Tr[mat P]``.  ``thresholds`` may hold ``inf``.
    """
    return _active["positive_blocks"](
        np.ascontiguousarray(mat, dtype=np.complex128),
        starts,
        np.ascontiguousarray(thresholds, dtype=np.float64),
        float(tau),
    )


def trace_products(stack: np.ndarray, op: np.ndarray) -> np.ndarray:
    """Real parts of ``Tr[stack[k] @ op]`` for every ``k``."""
    return _active["trace_products"](
        np.ascontiguousarray(stack, dtype=np.complex128),
        np.ascontiguousarray(op, dtype=np.complex128),
    )

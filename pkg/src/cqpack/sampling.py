"""Random states, channels, tests and POVMs for property checks."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .channel import CqChannel


def _ginibre(d, k, rng):
    return rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix of the given rank (full rank by default)."""
    g = _ginibre(d, rank or d, rng)
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return (rho + rho.conj().T) / 2


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = _ginibre(d, d, rng)
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng) if d > 1 else np.ones((1, 1), dtype=complex)


def random_projector(d: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    v = random_unitary(d, rng)[:, :rank]
    return v @ v.conj().T


def random_test(d: int, rng: np.random.Generator) -> np.ndarray:
    """Operator with ``0 <= X <= I``: random eigenbasis, eigenvalues uniform on [0, 1]."""
    u = random_unitary(d, rng)
    x = (u * rng.uniform(0, 1, size=d)) @ u.conj().T
    return (x + x.conj().T) / 2


def random_povm(d: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """``k`` positive operators summing to the identity, ``A_i -> T^{-1/2} A_i T^{-1/2}``."""
    parts = []
    for _ in range(k):
        g = _ginibre(d, d, rng)
        parts.append(g @ g.conj().T)
    total = sum(parts)
    w, v = np.linalg.eigh(total)
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    out = []
    for a in parts:
        m = inv_root @ a @ inv_root
        out.append((m + m.conj().T) / 2)
    # absorb the roundoff so the sum is I to machine precision
    out[-1] = out[-1] + (np.eye(d) - sum(out))
    return out


def random_distribution(k: int, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(k))
    p[-1] = 1.0 - p[:-1].sum()
    return p


def random_channel(size: int, d: int, rng: np.random.Generator, rank: int | None = None) -> CqChannel:
    return CqChannel.from_states([random_density(d, rng, rank) for _ in range(size)])


def random_classical_channel(size: int, d: int, rng: np.random.Generator) -> CqChannel:
    """Channel whose states are diagonal: row ``x`` of a random stochastic matrix."""
    return CqChannel.from_states([np.diag(random_distribution(d, rng)) for _ in range(size)])

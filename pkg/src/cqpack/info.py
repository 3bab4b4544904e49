"""Entropic quantities in nats: von Neumann entropy, relative entropy, Holevo
mutual information, measured relative entropy, the exponent ``psi(s)`` and
the Holevo capacity.

Logarithms of singular operators act on the support.  A relative entropy
with a support violation is returned as ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._config import TAU_ZERO
from .channel import CqChannel, distribution, mixture_state
from .errors import NotConvergedError, NumericalInconsistencyError, SupportError, ValidationError
from .linop import _eigh, hermitian, is_test, support_power

INF = math.inf


def von_neumann_entropy(rho) -> float:
    """``-Tr[rho log rho]`` with ``0 log 0 = 0``."""
    w = np.linalg.eigvalsh(hermitian(rho))
    w = w[w > 0]
    return float(max(-(w * np.log(w)).sum(), 0.0))


def _support_violation(rho, w_sigma, v_sigma, tau_zero) -> float:
    kernel = v_sigma[:, w_sigma <= tau_zero]
    if kernel.shape[1] == 0:
        return 0.0
    return float(np.einsum("ik,ij,jk->", kernel.conj(), rho, kernel).real)


def relative_entropy(rho, sigma, tau_zero: float = TAU_ZERO) -> float:
    """``Tr[rho (log rho - log sigma)]``, or ``math.inf`` when supp rho is not inside supp sigma."""
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    ws, vs = _eigh(sigma)
    if _support_violation(rho, ws, vs, tau_zero) > tau_zero:
        return INF
    wr = np.linalg.eigvalsh(rho)
    wr = wr[wr > 0]
    tr_rho_log_rho = float((wr * np.log(wr)).sum())
    keep = ws > tau_zero
    diag = np.einsum("ik,ij,jk->k", vs[:, keep].conj(), rho, vs[:, keep]).real
    tr_rho_log_sigma = float((diag * np.log(ws[keep])).sum())
    value = tr_rho_log_rho - tr_rho_log_sigma
    # roundoff below zero only
    return 0.0 if -1e-12 < value < 0 else value


def mutual_information(ch: CqChannel, p=None, check_tol: float = 1e-8) -> float:
    """Holevo quantity ``H(sigma_p) - sum_x p(x) H(rho_x)``.

    Also evaluates ``sum_x p(x) D(rho_x || sigma_p)`` and raises
    :class:`NumericalInconsistencyError` if the two disagree by more than
    ``check_tol``.
    """
    p = distribution(ch, p)
    sigma = mixture_state(ch, p)
    entropy_form = von_neumann_entropy(sigma) - sum(
        px * von_neumann_entropy(rho) for px, rho in zip(p, ch.states) if px > 0
    )
    divergence_form = sum(
        px * relative_entropy(rho, sigma) for px, rho in zip(p, ch.states) if px > 0
    )
    if not abs(entropy_form - divergence_form) <= check_tol:
        raise NumericalInconsistencyError(
            f"entropy form {entropy_form!r} and divergence form {divergence_form!r} disagree"
        )
    return max(entropy_form, 0.0)


def _kl(p, q, tau_zero=TAU_ZERO) -> float:
    p = np.clip(np.asarray(p, dtype=float), 0, None)
    q = np.clip(np.asarray(q, dtype=float), 0, None)
    if np.any((p > tau_zero) & (q <= tau_zero)):
        return INF
    mask = (p > 0) & (q > 0)
    return float(max((p[mask] * np.log(p[mask] / q[mask])).sum(), 0.0))


def measured_relative_entropy(rho, sigma, povm, tol: float = 1e-9) -> float:
    """Kullback-Leibler divergence of the outcome distributions of ``povm`` on ``rho`` and ``sigma``."""
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    povm = [np.asarray(m) for m in povm]
    if not povm:
        raise ValidationError("POVM is empty")
    for k, m in enumerate(povm):
        if m.shape != rho.shape:
            raise ValidationError(f"POVM element {k} has shape {m.shape}, expected {rho.shape}")
        if not is_test(m, tol):
            raise ValidationError(f"POVM element {k} is not between 0 and I")
    total = sum(povm)
    dev = np.abs(total - np.eye(rho.shape[0])).max()
    if dev > tol:
        raise ValidationError(f"POVM elements sum to I only within {dev:.3e}")
    pr = [np.vdot(m, rho).real for m in povm]
    qs = [np.vdot(m, sigma).real for m in povm]
    return _kl(pr, qs)


def psi(s: float, rho, sigma, tau_zero: float = TAU_ZERO) -> float:
    """``-log Tr[rho sigma^{s/2} rho^{-s} sigma^{s/2}]`` with powers taken on supports."""
    if not 0 <= s <= 1:
        raise ValidationError(f"s must lie in [0, 1], got {s}")
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    ws, vs = _eigh(sigma)
    if _support_violation(rho, ws, vs, tau_zero) > tau_zero:
        raise SupportError("psi requires supp(rho) inside supp(sigma)")
    half = support_power(sigma, s / 2, tau_zero)
    inner = support_power(rho, -s, tau_zero)
    value = np.trace(rho @ half @ inner @ half).real
    return float(-math.log(value))


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    optimal_p: np.ndarray
    iterations: int
    gap_certificate: float

    @property
    def upper_bound(self) -> float:
        return self.capacity + self.gap_certificate


def _divergences(ch, p):
    sigma = mixture_state(ch, p)
    return np.array([relative_entropy(rho, sigma) for rho in ch.states])


def capacity(ch: CqChannel, tol: float = 1e-9, max_iter: int = 100_000, p0=None) -> CapacityResult:
    """Maximize the Holevo quantity over input distributions.

    Multiplicative update ``p'(x) ~ p(x) exp(D(rho_x || sigma_p))``.  Stops
    when ``max_x D(rho_x || sigma_p) - I(p) <= tol``; the left side upper
    bounds ``C - I(p)``.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    p = distribution(ch, p0)
    best = None
    for it in range(1, max_iter + 1):
        d = _divergences(ch, p)
        finite = np.isfinite(d)
        lower = float((p[finite] * d[finite]).sum())
        gap = float(d.max() - lower)
        if best is None or gap < best.gap_certificate:
            best = CapacityResult(lower, p.copy(), it, gap)
        if gap <= tol:
            value = mutual_information(ch, p)
            return CapacityResult(float(value), p, it, float(max(d.max() - value, 0.0)))
        dd = np.minimum(d, 700.0)
        w = p * np.exp(dd - dd.max())
        p = w / w.sum()
    raise NotConvergedError(
        f"capacity iteration did not reach gap {tol} in {max_iter} steps "
        f"(best gap {best.gap_certificate:.3e})",
        best=best,
    )

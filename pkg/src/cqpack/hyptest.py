"""Pinched hypothesis tests between tensor powers.

The test ``{E(rho_n) - e^{na} sigma_n > 0}`` commutes with ``sigma_n``, so it
is computed block by block in an eigenbasis of ``sigma_n``: inside the
eigenspace of ``sigma_n`` with eigenvalue ``l`` the operator reduces to the
block of the pinched state minus ``e^{na} l``.  Thresholds are formed in log
space so large ``|na|`` does not overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from . import _kernels
from ._config import TAU_ZERO, check_enum
from .channel import CqChannel, codeword_state, distribution, mixture_state, product_distribution
from .errors import ValidationError
from .info import psi
from .linop import SpectralDecomposition, hermitian, kron_power, tensor_power_decomposition

DEFAULT_S_GRID = np.linspace(0.0, 1.0, 21)


def _exp_capped(x: float) -> float:
    return math.inf if x > 709.0 else math.exp(x)


def thresholds(frame: SpectralDecomposition, log_c: float) -> np.ndarray:
    """``c * l`` for each distinct eigenvalue ``l`` of the frame, with ``c = exp(log_c)``."""
    out = np.zeros(frame.v)
    for i, lam in enumerate(frame.eigenvalues):
        if lam > 0:
            out[i] = _exp_capped(log_c + math.log(lam))
    return out


def positive_part_in_frame(frame: SpectralDecomposition, rhobar_t, log_c: float, tau_zero=TAU_ZERO):
    """Projector ``{rhobar - c sigma > 0}`` and ``Tr[rhobar P]``, both in the frame basis.

    ``rhobar_t`` must already be pinched (block diagonal in the frame).
    """
    return _kernels.positive_blocks(rhobar_t, frame.starts, thresholds(frame, log_c), tau_zero)


def _to_operator(frame, mat_t):
    out = frame.from_basis(mat_t)
    return (out + out.conj().T) / 2


def pinched_test(rho, sigma, n: int, a: float) -> np.ndarray:
    """Projector ``{E_{sigma^n}(rho^n) - e^{na} sigma^n > 0}``."""
    rho = hermitian(rho)
    frame = tensor_power_decomposition(sigma, n)
    rho_n = kron_power(rho, n)
    proj_t, _ = positive_part_in_frame(frame, frame.pinch_in_basis(rho_n), n * a)
    return _to_operator(frame, proj_t)


def alpha(rho_n, test) -> float:
    """First-kind error ``Tr[rho_n (I - test)]``."""
    rho_n, test = np.asarray(rho_n), np.asarray(test)
    if rho_n.shape != test.shape:
        raise ValidationError(f"dimension mismatch: {rho_n.shape} vs {test.shape}")
    return float(np.trace(rho_n).real - np.vdot(test, rho_n).real)


def beta(sigma_n, test) -> float:
    """Second-kind error ``Tr[sigma_n test]``."""
    sigma_n, test = np.asarray(sigma_n), np.asarray(test)
    if sigma_n.shape != test.shape:
        raise ValidationError(f"dimension mismatch: {sigma_n.shape} vs {test.shape}")
    return float(np.vdot(test, sigma_n).real)


def oh_bounds(rho, sigma, n: int, a: float, s: float, dim_h: int | None = None) -> tuple[float, float]:
    """Upper bounds on first- and second-kind errors of the pinched test.

    ``alpha <= (n+1)^{s dim} exp(n (a s - psi(s)))`` and ``beta <= exp(-n a)``.
    """
    if dim_h is None:
        dim_h = np.asarray(rho).shape[0]
    log_alpha = s * dim_h * math.log(n + 1) + n * (a * s - psi(s, rho, sigma))
    return _exp_capped(log_alpha), _exp_capped(-n * a)


@dataclass(frozen=True)
class TestReport:
    a: float
    n: int
    alpha: float
    beta: float
    alpha_bound: float
    beta_bound: float
    s_used: float

    __test__ = False  # not a pytest class

    @property
    def alpha_ok(self) -> bool:
        return self.alpha <= self.alpha_bound + 1e-12

    @property
    def beta_ok(self) -> bool:
        return self.beta <= self.beta_bound + 1e-12


def hypothesis_report(rho, sigma, n: int, a: float, s_grid=DEFAULT_S_GRID) -> TestReport:
    """Errors of the pinched test together with the bounds, ``s`` chosen to minimize the alpha bound."""
    rho = hermitian(rho)
    sigma = hermitian(sigma)
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size == 0:
        raise ValidationError("s grid is empty")
    test = pinched_test(rho, sigma, n, a)
    al = alpha(kron_power(rho, n), test)
    be = beta(kron_power(sigma, n), test)
    best_s, best_bound, beta_bound = None, math.inf, None
    for s in s_grid:
        ab, bb = oh_bounds(rho, sigma, n, a, float(s))
        beta_bound = bb
        if best_s is None or ab < best_bound:
            best_s, best_bound = float(s), ab
    return TestReport(a, n, al, be, best_bound, beta_bound, best_s)


class CodewordTest(NamedTuple):
    """Per-codeword block of the lifted test, with operators in the frame basis."""

    codeword: tuple
    prob: float
    rho_t: np.ndarray
    rhobar_t: np.ndarray
    test_t: np.ndarray
    success: float  # Tr[rhobar test]


def iter_codeword_tests(
    ch: CqChannel, p, n: int, a: float, frame: SpectralDecomposition | None = None
) -> Iterator[CodewordTest]:
    """Blocks of the lifted test for every codeword, in lexicographic order."""
    p = distribution(ch, p)
    check_enum(ch.size**n)
    if frame is None:
        frame = tensor_power_decomposition(mixture_state(ch, p), n)
    for u, prob in product_distribution(p, n, ch.alphabet):
        rho_t = frame.to_basis(codeword_state(ch, u))
        rhobar_t = _kernels.mask_blocks(rho_t, frame.starts)
        test_t, success = positive_part_in_frame(frame, rhobar_t, n * a)
        yield CodewordTest(u, prob, rho_t, rhobar_t, test_t, float(success))


def per_codeword_test(ch: CqChannel, p, u, a: float) -> np.ndarray:
    """Block of the lifted test for codeword ``u``: ``{E(rho_u) - e^{na} sigma^n > 0}``."""
    p = distribution(ch, p)
    n = len(u)
    frame = tensor_power_decomposition(mixture_state(ch, p), n)
    rhobar_t = frame.pinch_in_basis(codeword_state(ch, u))
    test_t, _ = positive_part_in_frame(frame, rhobar_t, n * a)
    return _to_operator(frame, test_t)


def delta_n(ch: CqChannel, p, n: int, a: float) -> float:
    """``sum_{x^n} p^n(x^n) Tr[rhobar_{x^n} {rhobar_{x^n} - e^{na} sigma^n <= 0}]``."""
    total = 0.0
    for block in iter_codeword_tests(ch, p, n, a):
        if block.prob > 0:
            total += block.prob * (np.trace(block.rhobar_t).real - block.success)
    return float(min(max(total, 0.0), 1.0))

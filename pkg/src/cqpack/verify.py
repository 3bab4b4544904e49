"""Randomized property suite behind ``cqpack verify``.

Each check draws its instances from a generator seeded by the suite seed
and the check's position, so checks are reproducible individually.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import classical
from .channel import CqChannel, codeword_state, lift, mixture_state, product_distribution
from .hyptest import alpha, beta, delta_n, oh_bounds, pinched_test
from .info import capacity, measured_relative_entropy, mutual_information, psi, relative_entropy
from .linop import direct_sum, kron_power, pinch, proj_pos, spectral_decompose, tensor_power_decomposition
from .packing import PackingParams, build_block_code, decoder_problems, gentle_check, verify_packing
from .sampling import (
    random_channel,
    random_density,
    random_distribution,
    random_hermitian,
    random_povm,
    random_projector,
    random_test,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cases: int
    worst: float  # largest observed violation margin; <= 0 means satisfied
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}\t{status}\t{self.cases}\t{self.worst:.3e}\t{self.tolerance:.0e}"


def _margin(values, tol):
    worst = max(values) if values else -math.inf
    return worst, worst <= tol


def check_spectral(rng):
    res = []
    for _ in range(40):
        d = int(rng.integers(1, 17))
        h = random_hermitian(d, rng)
        dec = spectral_decompose(h)
        res.append(np.abs(dec.reconstruct() - h).max())
        res.append(np.abs(sum(dec.projectors) - np.eye(d)).max())
    return res, 1e-9


def check_pinching(rng):
    res = []
    for _ in range(20):
        d = int(rng.integers(2, 7))
        a = random_hermitian(d, rng)
        if rng.random() < 0.5:  # force a degenerate eigenvalue
            w, v = np.linalg.eigh(a)
            w[1] = w[0]
            a = (v * w) @ v.conj().T
        b = random_hermitian(d, rng)
        dec = spectral_decompose(a)
        pb = dec.pinch(b)
        coeffs = rng.normal(size=dec.v) + 1j * rng.normal(size=dec.v)
        c = sum(z * e for z, e in zip(coeffs, dec.projectors))
        res.append(abs(np.vdot(b, c) - np.vdot(pb, c)))
        res.append(np.abs(dec.pinch(pb) - pb).max())
        res.append(np.abs(pb @ a - a @ pb).max())
    return res, 1e-9


def check_direct_sum_pinching(rng):
    res = []
    for _ in range(10):
        k = int(rng.integers(2, 4))
        cs = [random_hermitian(int(rng.integers(1, 4)), rng) for _ in range(k)]
        xs = [random_hermitian(c.shape[0], rng) for c in cs]
        lhs = pinch(direct_sum(cs), direct_sum(xs))
        rhs = direct_sum([pinch(c, x) for c, x in zip(cs, xs)])
        res.append(np.abs(lhs - rhs).max())
    return res, 1e-9


def check_positive_part(rng):
    res = []
    for _ in range(5):
        d = int(rng.integers(2, 6))
        h = random_hermitian(d, rng)
        best = np.vdot(proj_pos(h), h).real
        res.append(-best)
        for _ in range(40):
            q = random_projector(d, int(rng.integers(0, d + 1)), rng)
            res.append(np.vdot(q, h).real - best)
    return res, 1e-9


def check_extended_pinching(rng):
    res = []
    for _ in range(3):
        ch = random_channel(2, 2, rng)
        p = random_distribution(2, rng)
        pair = lift(ch, p)
        sigma = mixture_state(ch, p)
        for n in (1, 2):
            rn, sn = pair.power_dense(n)
            lhs = pinch(sn, rn)
            frame = tensor_power_decomposition(sigma, n)
            rhs = direct_sum(
                [pn * frame.pinch(codeword_state(ch, u)) for u, pn in product_distribution(p, n, ch.alphabet)]
            )
            res.append(np.abs(lhs - rhs).max())
    return res, 1e-9


def check_mutual_information(rng):
    res = []
    for _ in range(20):
        ch = random_channel(int(rng.integers(2, 5)), int(rng.integers(2, 4)), rng)
        p = random_distribution(ch.size, rng)
        rho_hat, sigma_hat = lift(ch, p).dense()
        res.append(abs(relative_entropy(rho_hat, sigma_hat) - mutual_information(ch, p)))
    return res, 1e-9


def check_monotonicity(rng):
    res = []
    for _ in range(100):
        d = int(rng.integers(2, 4))
        rho, sigma = random_density(d, rng), random_density(d, rng)
        povm = random_povm(d, int(rng.integers(2, 5)), rng)
        res.append(measured_relative_entropy(rho, sigma, povm) - relative_entropy(rho, sigma))
    return res, 1e-9


def check_psi(rng):
    """psi(0) = 0 and psi'(0) = D for arbitrary pairs, concavity for commuting pairs.

    Concavity fails for a few percent of random non-commuting qubit pairs,
    so it is only asserted where it is a theorem.
    """
    res = []
    grid = np.linspace(0, 1, 21)
    for _ in range(5):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        res.append(abs(psi(0.0, rho, sigma)))
        slope = psi(1e-4, rho, sigma) / 1e-4
        res.append(abs(slope - relative_entropy(rho, sigma)) - 1e-3 + 1e-8)
        d = int(rng.integers(2, 5))
        r, q = np.diag(random_distribution(d, rng)), np.diag(random_distribution(d, rng))
        vals = np.array([psi(s, r, q) for s in grid])
        res.extend(np.diff(vals, 2))  # second differences <= 0
    return res, 1e-8


def check_oh_bounds(rng):
    res = []
    for _ in range(3):
        rho, sigma = random_density(2, rng), random_density(2, rng)
        d = relative_entropy(rho, sigma)
        for n in range(1, 5):
            rn, sn = kron_power(rho, n), kron_power(sigma, n)
            for a in np.linspace(0, d, 6)[1:-1]:
                t = pinched_test(rho, sigma, n, a)
                bound = min(oh_bounds(rho, sigma, n, a, s)[0] for s in np.linspace(0, 1, 11))
                res.append(alpha(rn, t) - bound)
                res.append(beta(sn, t) - math.exp(-n * a))
    return res, 1e-12


def check_classical_reduction(rng):
    res = []
    for _ in range(3):
        w = np.stack([random_distribution(2, rng) for _ in range(2)])
        p = random_distribution(2, rng)
        ch = CqChannel.from_states([np.diag(row) for row in w])
        for n in range(1, 4):
            for a in rng.uniform(-0.5, 0.8, size=2):
                res.append(abs(delta_n(ch, p, n, a) - classical.information_spectrum(w, p, n, a)))
    return res, 1e-12


def check_gentle(rng):
    res = []
    for _ in range(500):
        d = int(rng.integers(2, 9))
        lhs, rhs = gentle_check(random_density(d, rng), random_test(d, rng))
        res.append(lhs - rhs)
    return res, 1e-9


def check_packing(rng, inject_fault=False):
    res = []
    for _ in range(10):
        d = int(rng.integers(2, 4))
        size = int(rng.integers(2, 4))
        ch = random_channel(size, d, rng)
        p = random_distribution(size, rng)
        n = int(rng.integers(1, 3))
        info = mutual_information(ch, p)
        a = float(rng.uniform(0.05, 0.95)) * info
        code, report = build_block_code(ch, p, n, a, lam=float(rng.uniform(0.3, 2.0)))
        if inject_fault and code.M:
            code.decoder[0] = code.decoder[0] + 0.25 * np.eye(code.decoder[0].shape[0])
            params = PackingParams(math.exp(n * a), report.delta, report.gamma, report.eta)
            report = verify_packing(code, params, pe=report.pe)
        res.append(0.0 if report.all_ok else 1.0)
        res.append(0.0 if not decoder_problems(code) else 1.0)
    return res, 0.0


def check_capacity(rng):
    res = []
    for _ in range(3):
        ch = random_channel(int(rng.integers(2, 4)), 2, rng)
        result = capacity(ch, tol=1e-7)
        res.append(result.gap_certificate - 1e-7)
        upper = max(relative_entropy(r, mixture_state(ch, result.optimal_p)) for r in ch.states)
        res.append(mutual_information(ch, result.optimal_p) - upper)
    return res, 1e-12


CHECKS: list[tuple[str, Callable]] = [
    ("spectral_reconstruction", check_spectral),
    ("pinching_projection", check_pinching),
    ("direct_sum_pinching", check_direct_sum_pinching),
    ("positive_part_maximal", check_positive_part),
    ("extended_pinching", check_extended_pinching),
    ("mutual_information_identity", check_mutual_information),
    ("measured_entropy_monotone", check_monotonicity),
    ("psi_shape", check_psi),
    ("oh_bounds", check_oh_bounds),
    ("classical_reduction", check_classical_reduction),
    ("gentle_measurement", check_gentle),
    ("packing_bounds", check_packing),
    ("capacity_certificate", check_capacity),
]


def run_suite(seed: int = 0, inject_fault: bool = False) -> list[CheckResult]:
    results = []
    for i, (name, fn) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        if fn is check_packing:
            values, tol = fn(rng, inject_fault=inject_fault)
        else:
            values, tol = fn(rng)
        worst, ok = _margin([float(v) for v in values], tol)
        results.append(CheckResult(name, ok, len(values), worst, tol))
    return results


def format_report(results: list[CheckResult], seed: int) -> str:
    lines = [f"# cqpack verify seed={seed}", "check\tstatus\tcases\tworst\ttolerance"]
    lines += [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"# {len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
